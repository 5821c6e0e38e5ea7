//! Identity checks for the elliptic evaluator at random points.

use std::sync::Arc;

use torus_harmonic::arbprec::{BigComplex, BigReal};
use torus_harmonic::elliptic::EllipticEvaluator;
use torus_harmonic::lattice::Lattice;

use super::checks::{Check, Worst};
use super::*;

fn big(c: &BigComplex) -> BigReal {
    c.abs().max(c.ctx().one())
}

/// Runs every identity of the suite at `n` random points of `lattice`.
pub fn run(lattice: Lattice, n: usize, seed: u64) -> Vec<Check> {
    let l = Arc::new(lattice);
    let ev = EllipticEvaluator::new(l.clone());
    let c = l.ctx();
    let bits = c.bits() as i32;
    let pts = random_points(&l, n, 0.15, seed);

    let mut de = Worst::new("(wp')^2 = 4wp^3 - g2 wp - g3");
    let mut zeta_fd = Worst::new("zeta' = -wp (finite differences)");
    let mut sigma_fd = Worst::new("sigma'/sigma = zeta (finite differences)");
    let mut parity = Worst::new("parity of wp, wp', zeta, sigma, log|sigma^|");
    let mut period = Worst::new("periodicity of wp^(k), zeta^, log|sigma^|");
    let mut quasi = Worst::new("zeta(z + 2w_i) - zeta(z) = 2 eta_i");
    let mut laurent = Worst::new("wp matches Laurent series near 0");
    let mut lap = Worst::new("Laplacian of log|sigma^| = -2pi/A");

    let h = c.pow2(-bits / 5);
    let fd_tol = (h.powi(4) + c.pow2(-bits) / &h) * c.pow2(48);
    let shifts = [(1i64, 0i64), (0, 1), (3, -2), (-3, 3), (2, 3)];
    let a = l.omega1.mul_2exp(1);
    let b = l.omega2.mul_2exp(1);

    for z in &pts {
        let derivs = ev.wp_derivs(z, 10).unwrap();
        let wp = &derivs[0];
        let wpp = &derivs[1];
        let lhs = &(&(&wpp.sqr() - &wp.powi(3).unwrap().scale_i32(4)) + &(&l.g2 * wp)) + &l.g3;
        de.record(lhs.abs(), c.tol(64) * big(wp).powi(3));

        let zeta = ev.zeta(z).unwrap();
        let dzeta = central_diff(|w| ev.zeta(w).unwrap(), z, &h);
        zeta_fd.record((&dzeta + wp).abs(), fd_tol.clone() * big(wp));

        let sigma = ev.sigma(z).unwrap();
        let dsigma = central_diff(|w| ev.sigma(w).unwrap(), z, &h);
        let ratio = &dsigma / &sigma;
        sigma_fd.record((&ratio - &zeta).abs(), fd_tol.clone() * big(&zeta));

        let mz = -z;
        let ptol = c.tol(48);
        parity.record((&ev.wp(&mz).unwrap() - wp).abs(), ptol.clone() * big(wp));
        parity.record((&ev.wp_prime(&mz).unwrap() + wpp).abs(), ptol.clone() * big(wpp));
        parity.record((&ev.zeta(&mz).unwrap() + &zeta).abs(), ptol.clone() * big(&zeta));
        parity.record((&ev.sigma(&mz).unwrap() + &sigma).abs(), ptol.clone() * big(&sigma));
        let ls = ev.log_abs_sigma_hat(z).unwrap();
        parity.record(
            (ev.log_abs_sigma_hat(&mz).unwrap() - &ls).abs(),
            ptol * ls.abs().max(c.one()),
        );

        let zh = ev.zeta_hat(z).unwrap();
        let scale = derivs.iter().map(big).fold(c.one(), BigReal::max);
        for &(p, q) in &shifts {
            let w = l.vector(p, q);
            let zs = z + &w;
            let ds = ev.wp_derivs(&zs, 10).unwrap();
            for (d0, d1) in derivs.iter().zip(&ds) {
                period.record((d0 - d1).abs(), c.tol(64) * &scale);
            }
            period.record((&ev.zeta_hat(&zs).unwrap() - &zh).abs(), c.tol(64) * big(&zh));
            period.record(
                (ev.log_abs_sigma_hat(&zs).unwrap() - &ls).abs(),
                c.tol(64) * ls.abs().max(c.one()),
            );
        }
        for (w, eta) in [(&a, &l.eta1), (&b, &l.eta2)] {
            let jump = &ev.zeta(&(z + w)).unwrap() - &zeta;
            quasi.record((&jump - &eta.mul_2exp(1)).abs(), c.tol(64) * big(&zeta));
        }

        let hl = c.pow2(-bits / 4);
        let hx = BigComplex::from_real(hl.clone());
        let hy = hx.mul_i();
        let f = |w: &BigComplex| ev.log_abs_sigma_hat(w).unwrap();
        let sum = f(&(z + &hx)) + f(&(z - &hx)) + f(&(z + &hy)) + f(&(z - &hy)) - ls.clone() * 4;
        let laplacian = sum / hl.sqr();
        let exact = -(c.pi().mul_2exp(1) / &l.area);
        lap.record((laplacian - &exact).abs(), c.pow2(-bits / 2 + 40));
    }

    let min_w = l.omega1.abs().min(l.omega2.abs());
    let co = wp_laurent_coeffs(&l, c.bits() as usize / 4 + 10);
    let mut r = rng(seed ^ 0x5eed);
    for _ in 0..n {
        use rand::Rng;
        let rho: f64 = r.random_range(0.1..1.0);
        let th: f64 = r.random_range(0.0..std::f64::consts::TAU);
        let u = c.complex(rho * th.cos(), rho * th.sin());
        let z = u.scale(&(min_w.clone() * c.ratio(3, 10)));
        let want = wp_laurent(&co, &z);
        let got = ev.wp(&z).unwrap();
        laurent.record((&got - &want).abs(), c.tol(64) * want.abs());
    }

    vec![
        de.finish(),
        zeta_fd.finish(),
        sigma_fd.finish(),
        parity.finish(),
        period.finish(),
        quasi.finish(),
        laurent.finish(),
        lap.finish(),
    ]
}
