//! Laplace error against the number of unknowns for one hole of radius 0.4
//! with data `sin 5θ`, and the slope of `log10(error)` in `m`.

use std::sync::Arc;

use torus_harmonic::arbprec::PrecisionContext;
use torus_harmonic::convergence::{laplace_csv, laplace_sweep, linear_fit};
use torus_harmonic::geometry::{Domain, Hole};
use torus_harmonic::laplace::{BoundaryData, FourierSeries, LaplaceOptions};
use torus_harmonic::lattice::Lattice;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c = PrecisionContext::new(512)?;
    let lattice = Arc::new(Lattice::square(c)?);
    let domain = Domain::new(lattice, vec![Hole::circle(c.czero(), c.parse("0.4")?)?])?;
    let data = BoundaryData {
        holes: vec![FourierSeries::sin_mode(c, 5)],
    };
    let ks: Vec<usize> = (10..=60).step_by(10).collect();
    let rows = laplace_sweep(&domain, &data, &ks, LaplaceOptions::new(0), false);
    print!("{}", laplace_csv(&rows));
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter_map(|r| r.sup_error.as_ref().map(|e| (r.m as f64, e.to_f64().log10())))
        .unzip();
    let (slope, _, r2) = linear_fit(&xs, &ys);
    println!("slope {slope:.4} digits per unknown, R^2 {r2:.4}");
    Ok(())
}
