//! Invariants of the square and equilateral lattices.
//!
//! Usage: `lattice_invariants [bits]`. Prints g2, g3, η1, η2 and the
//! Legendre residual for both shapes.

use torus_harmonic::arbprec::PrecisionContext;
use torus_harmonic::lattice::Lattice;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bits = std::env::args().nth(1).map_or(Ok(256), |s| s.parse())?;
    let c = PrecisionContext::new(bits)?;
    for (name, l) in [("square", Lattice::square(c)?), ("equilateral", Lattice::equilateral(c)?)] {
        println!("{name} lattice at {bits} bits");
        for (label, z) in [("g2", &l.g2), ("g3", &l.g3), ("eta1", &l.eta1), ("eta2", &l.eta2)] {
            println!("  {label:5} {} + {} i", z.re.to_decimal_digits(30), z.im.to_decimal_digits(30));
        }
        println!("  area  {}", l.area.to_decimal_digits(30));
        println!("  Legendre residual {:.3e}", l.legendre_residual().to_f64());
    }
    Ok(())
}
