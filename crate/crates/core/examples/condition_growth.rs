//! Condition numbers of `BᵗB` and `BᵗA` for the flower domain as the
//! truncation grows.
//!
//! Usage: `condition_growth [bits]`.

use std::sync::Arc;

use torus_harmonic::arbprec::PrecisionContext;
use torus_harmonic::convergence::condition_numbers;
use torus_harmonic::geometry::{Domain, Hole};
use torus_harmonic::lattice::Lattice;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bits = std::env::args().nth(1).map_or(Ok(512), |s| s.parse())?;
    let c = PrecisionContext::new(bits)?;
    let lattice = Arc::new(Lattice::square(c)?);
    let rho = || vec![c.parse("0.3").unwrap(), c.zero(), c.zero(), c.parse("0.1").unwrap()];
    let a = c.complex(0.4, 0.4);
    let holes = vec![
        Hole::polar(a.clone(), rho(), c.zero())?,
        Hole::polar(-a, rho(), c.pi() / &c.int(3))?,
    ];
    let domain = Domain::new(lattice, holes)?;
    println!("{:>6} {:>6} {:>12} {:>12}", "k_max", "m", "cond BtB", "cond BtA");
    for k in [2, 5, 10, 15, 20, 25] {
        let (btb, bta) = condition_numbers(&domain, k, 3)?;
        let m = 1 + 4 * (k + 2) + 1;
        println!("{k:>6} {m:>6} {:>12.3e} {:>12.3e}", btb.to_f64(), bta.to_f64());
    }
    Ok(())
}
