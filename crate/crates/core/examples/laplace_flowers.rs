//! Two non-convex "flower" holes `ρ(θ) = 0.3 + 0.1 cos 3θ` on the square
//! torus, held at 0 and 1. Writes the solution on a grid to
//! `flowers_field.csv` (columns x,y,u).
//!
//! Usage: `laplace_flowers [k_max] [grid_n]`.

use std::sync::Arc;

use torus_harmonic::arbprec::PrecisionContext;
use torus_harmonic::export::write_atomic;
use torus_harmonic::geometry::{Domain, Hole};
use torus_harmonic::laplace::{solve_laplace, BoundaryData, FourierSeries, LaplaceOptions};
use torus_harmonic::lattice::Lattice;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let k_max = args.first().map_or(Ok(30), |s| s.parse())?;
    let grid_n = args.get(1).map_or(Ok(61), |s| s.parse())?;
    let c = PrecisionContext::new(256)?;
    let lattice = Arc::new(Lattice::square(c)?);
    let rho = || vec![c.parse("0.3").unwrap(), c.zero(), c.zero(), c.parse("0.1").unwrap()];
    let a = c.complex(0.4, 0.4);
    let holes = vec![
        Hole::polar(a.clone(), rho(), c.zero())?,
        Hole::polar(-a, rho(), c.pi() / &c.int(3))?,
    ];
    let domain = Domain::new(lattice, holes)?;
    let data = BoundaryData {
        holes: vec![FourierSeries::constant(c.zero()), FourierSeries::constant(c.one())],
    };
    let sol = solve_laplace(&domain, &data, LaplaceOptions::new(k_max))?;
    println!("k_max {k_max}, m {}, boundary sup error {:.3e}", sol.spec().m(), sol.boundary_sup_error().to_f64());
    write_atomic("flowers_field.csv".as_ref(), sol.field_csv(grid_n)?.as_bytes())?;
    println!("wrote flowers_field.csv ({grid_n} x {grid_n})");
    Ok(())
}
