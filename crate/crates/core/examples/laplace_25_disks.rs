//! Runs a Laplace job from a JSON config, by default the 25-disk layout in
//! `configs/laplace_25_disks.json`.
//!
//! Usage: `laplace_25_disks [k_max] [config]`.

use std::path::PathBuf;
use std::time::Instant;

use torus_harmonic::cli::JobConfig;
use torus_harmonic::laplace::solve_laplace;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let path = args.get(1).map_or_else(
        || PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/laplace_25_disks.json"),
        PathBuf::from,
    );
    let mut cfg = JobConfig::from_path(&path)?;
    if let Some(k) = args.first() {
        cfg.k_max = k.parse()?;
    }
    let job = cfg.resolve()?;
    let domain = job.domain()?;
    let t = Instant::now();
    let sol = solve_laplace(domain, &job.boundary_data()?, job.laplace_options())?;
    println!(
        "{} holes, k_max {}, m {}: boundary sup error {:.3e} ({:.1}s)",
        domain.hole_count(),
        job.config.k_max,
        sol.spec().m(),
        sol.boundary_sup_error().to_f64(),
        t.elapsed().as_secs_f64()
    );
    Ok(())
}
