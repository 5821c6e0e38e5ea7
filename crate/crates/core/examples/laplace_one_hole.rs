//! Square torus with one circular hole of radius 0.4 and data `sin 5θ`.
//!
//! Prints the boundary sup error for a few truncation orders; pass `--bits`
//! and a list of k_max values to change the sweep.

use std::sync::Arc;
use std::time::Instant;

use torus_harmonic::arbprec::PrecisionContext;
use torus_harmonic::geometry::{Domain, Hole};
use torus_harmonic::laplace::{solve_laplace, BoundaryData, FourierSeries, LaplaceOptions};
use torus_harmonic::lattice::Lattice;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut bits = 256;
    let mut kmaxes = vec![10, 20, 30];
    let args: Vec<String> = std::env::args().skip(1).collect();
    if let Some(i) = args.iter().position(|a| a == "--bits") {
        bits = args[i + 1].parse()?;
        let rest: Vec<usize> = args[i + 2..].iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
        if !rest.is_empty() {
            kmaxes = rest;
        }
    }
    let c = PrecisionContext::new(bits)?;
    let lattice = Arc::new(Lattice::square(c)?);
    let hole = Hole::circle(c.czero(), c.parse("0.4")?)?;
    let domain = Domain::new(lattice, vec![hole])?;
    let data = BoundaryData {
        holes: vec![FourierSeries::sin_mode(c, 5)],
    };
    println!("{:>6} {:>6} {:>12} {:>10}", "k_max", "m", "sup error", "seconds");
    for k in kmaxes {
        let t = Instant::now();
        let sol = solve_laplace(&domain, &data, LaplaceOptions::new(k))?;
        println!(
            "{:>6} {:>6} {:>12.3e} {:>10.2}",
            k,
            sol.spec().m(),
            sol.boundary_sup_error().to_f64(),
            t.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
