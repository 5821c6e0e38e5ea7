//! Steklov eigenvalues of the square torus with one hole of radius 0.4.
//!
//! Usage: `steklov_square_one_hole [bits] [k_max] [sigma_hi] [exact]`.
//! The radius is the binary64 value of 0.4 unless `exact` is given, in
//! which case it is the decimal 0.4 rounded to `bits`.

use std::sync::Arc;
use std::time::Instant;

use torus_harmonic::arbprec::PrecisionContext;
use torus_harmonic::geometry::{Domain, Hole};
use torus_harmonic::lattice::Lattice;
use torus_harmonic::steklov::{SteklovConfig, SteklovSystem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let bits = args.first().map_or(Ok(256), |s| s.parse())?;
    let k_max = args.get(1).map_or(Ok(20), |s| s.parse())?;
    let c = PrecisionContext::new(bits)?;
    let lattice = Arc::new(Lattice::square(c)?);
    let radius = if args.get(3).is_some_and(|a| a == "exact") {
        c.parse("0.4")?
    } else {
        c.from_f64(0.4)
    };
    let domain = Domain::new(lattice, vec![Hole::circle(c.czero(), radius)?])?;

    let mut cfg = SteklovConfig::new(c, k_max);
    cfg.sigma_hi = c.parse(args.get(2).map_or("8", String::as_str))?;
    let t = Instant::now();
    let sys = SteklovSystem::new(&domain, &cfg)?;
    println!("m = {}, assembled in {:.1}s", sys.spec().m(), t.elapsed().as_secs_f64());
    let report = sys.scan_and_refine(&cfg)?;
    println!("refined in {:.1}s", t.elapsed().as_secs_f64());
    for cand in &report.candidates {
        println!(
            "sigma {}  s {:.3e}  second {:.3e}  residual {:.3e}  x{}",
            cand.sigma.to_decimal_digits(45),
            cand.s_value.to_f64(),
            cand.second_s.to_f64(),
            cand.residual_l2.to_f64(),
            cand.multiplicity
        );
    }
    for d in &report.diagnostics {
        println!("note: {d}");
    }
    Ok(())
}
