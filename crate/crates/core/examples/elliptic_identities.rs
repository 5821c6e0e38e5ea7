//! Checks a handful of Weierstrass identities at one point of the square
//! lattice: the differential equation for ℘, periodicity of ℘ and ζ̂, and
//! the quasi-periodicity of ζ.

use std::sync::Arc;

use torus_harmonic::arbprec::PrecisionContext;
use torus_harmonic::elliptic::EllipticEvaluator;
use torus_harmonic::lattice::Lattice;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c = PrecisionContext::new(256)?;
    let lattice = Arc::new(Lattice::square(c)?);
    let ev = EllipticEvaluator::new(lattice.clone());
    let z = c.complex(0.3, 0.2);
    let (p, dp) = ev.wp_pair(&z)?;
    let ode = dp.sqr() - p.powi(3)?.scale_i32(4) + &(&lattice.g2 * &p) + &lattice.g3;
    println!("(wp')^2 - 4 wp^3 + g2 wp + g3      {:.3e}", ode.abs().to_f64());

    let shift = lattice.omega1.mul_2exp(1);
    let zs = &z + &shift;
    println!("wp(z + 2w1) - wp(z)                 {:.3e}", (ev.wp(&zs)? - &p).abs().to_f64());
    let jump = ev.zeta(&zs)? - &ev.zeta(&z)? - &lattice.eta1.mul_2exp(1);
    println!("zeta(z + 2w1) - zeta(z) - 2 eta1    {:.3e}", jump.abs().to_f64());
    let hat = ev.zeta_hat(&zs)? - &ev.zeta_hat(&z)?;
    println!("zeta_hat(z + 2w1) - zeta_hat(z)     {:.3e}", hat.abs().to_f64());
    let ls = ev.log_abs_sigma_hat(&zs)? - &ev.log_abs_sigma_hat(&z)?;
    println!("log|sigma_hat| jump                 {:.3e}", ls.abs().to_f64());
    Ok(())
}
