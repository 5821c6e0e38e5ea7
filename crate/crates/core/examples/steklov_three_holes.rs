//! First Steklov eigenvalues of the square torus with three circular holes.
//!
//! Usage: `steklov_three_holes [bits] [k_max] [sigma_hi]`. Hole data are
//! the binary64 values of 0.3, 0.1 and 0.05.

use std::sync::Arc;

use torus_harmonic::arbprec::{BigComplex, PrecisionContext};
use torus_harmonic::geometry::{Domain, Hole};
use torus_harmonic::lattice::Lattice;
use torus_harmonic::steklov::{SteklovConfig, SteklovSystem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let bits = args.first().map_or(Ok(256), |s| s.parse())?;
    let k_max = args.get(1).map_or(Ok(20), |s| s.parse())?;
    let c = PrecisionContext::new(bits)?;
    let lattice = Arc::new(Lattice::square(c)?);
    let z = |x: f64, y: f64| BigComplex::new(c.from_f64(x), c.from_f64(y));
    let holes = vec![
        Hole::circle(z(0.3, 0.0), c.from_f64(0.1))?,
        Hole::circle(z(0.0, 0.3), c.from_f64(0.1))?,
        Hole::circle(z(-0.3, -0.3), c.from_f64(0.05))?,
    ];
    let domain = Domain::new(lattice, holes)?;
    let mut cfg = SteklovConfig::new(c, k_max);
    cfg.sigma_hi = c.parse(args.get(2).map_or("7", String::as_str))?;
    let sys = SteklovSystem::new(&domain, &cfg)?;
    let report = sys.scan_and_refine(&cfg)?;
    println!("m = {}", report.m);
    for cand in &report.candidates {
        println!(
            "sigma {}  residual {:.3e}  x{}",
            cand.sigma.to_decimal_digits(30),
            cand.residual_l2.to_f64(),
            cand.multiplicity
        );
    }
    Ok(())
}
