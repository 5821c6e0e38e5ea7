//! Independent oracles shared by the integration tests.
//!
//! Lattice sums are evaluated row by row: for fixed `q` the sum over `p` has
//! a closed form in `cot(πx)`, and the remaining sum over `q` converges
//! geometrically. None of this goes through the nome series used by the
//! library.
#![allow(dead_code)]

pub mod checks;
pub mod elliptic_suite;
pub mod pencil;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torus_harmonic::arbprec::{BigComplex, BigReal, PrecisionContext};
use torus_harmonic::lattice::Lattice;

pub fn ctx(bits: u32) -> PrecisionContext {
    PrecisionContext::new(bits).unwrap()
}

/// Random lattice with `|ω1| ∈ [0.5, 2]`, arbitrary rotation and
/// `τ = x + iy`, `|x| <= 1/2`, `y ∈ [0.7, 1.6]`.
pub fn random_lattice(rng: &mut ChaCha8Rng, c: PrecisionContext) -> Lattice {
    let r: f64 = rng.random_range(0.5..2.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let tx: f64 = rng.random_range(-0.5..0.5);
    let ty: f64 = rng.random_range(0.7..1.6);
    let w1 = c.complex(r * phi.cos(), r * phi.sin());
    let w2 = &w1 * &c.complex(tx, ty);
    Lattice::new(w1, w2, c).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Points uniform in the fundamental cell, at least `margin · min|ω|` away
/// from every lattice point.
pub fn random_points(l: &Lattice, n: usize, margin: f64, seed: u64) -> Vec<BigComplex> {
    let c = l.ctx();
    let mut r = rng(seed);
    let min_w = l.omega1.abs().to_f64().min(l.omega2.abs().to_f64());
    let a = l.omega1.mul_2exp(1);
    let b = l.omega2.mul_2exp(1);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let s: f64 = r.random_range(-0.5..0.5);
        let t: f64 = r.random_range(-0.5..0.5);
        let z = &a.scale(&c.from_f64(s)) + &b.scale(&c.from_f64(t));
        if l.distance_to_lattice(&z).to_f64() > margin * min_w {
            out.push(z);
        }
    }
    out
}

/// Polynomial in `C = cot u` with integer coefficients, lowest degree first.
type Poly = Vec<i128>;

/// `d/du P(cot u) = −P'(C)(1 + C²)`.
fn d_cot(p: &Poly) -> Poly {
    let mut out = vec![0i128; p.len() + 1];
    for (k, &coef) in p.iter().enumerate().skip(1) {
        let dk = coef * k as i128;
        out[k - 1] -= dk;
        out[k + 1] -= dk;
    }
    out
}

fn eval_poly(p: &Poly, x: &BigComplex) -> BigComplex {
    let c = x.ctx();
    let mut acc = c.czero();
    for &coef in p.iter().rev() {
        acc = &(&acc * x) + &BigComplex::from_real(c.int(coef as i64));
    }
    acc
}

fn factorial(c: PrecisionContext, n: u32) -> BigReal {
    (2..=n as i64).fold(c.one(), |acc, k| acc * &c.int(k))
}

/// `Σ_p (x + p)^{-n}` for `n >= 2`, from derivatives of `π² csc²(πx)`.
pub fn row_power_sum(x: &BigComplex, n: u32) -> BigComplex {
    assert!(n >= 2);
    let c = x.ctx();
    let pi = c.pi();
    let cot = x.scale(&pi).cot().unwrap();
    let mut p: Poly = vec![1, 0, 1];
    for _ in 2..n {
        p = d_cot(&p);
    }
    let mut v = eval_poly(&p, &cot).scale(&pi.powi(n as i32));
    v = v.scale(&factorial(c, n - 1).recip().unwrap());
    if n % 2 == 1 {
        v = -v;
    }
    v
}

/// Number of rows `q` on each side needed for `bits` of accuracy.
fn row_count(l: &Lattice) -> i64 {
    let bits = l.ctx().bits() as f64;
    let y = (&l.omega2 / &l.omega1).im.to_f64();
    ((bits + 40.0) * std::f64::consts::LN_2 / (2.0 * std::f64::consts::PI * y)).ceil() as i64 + 3
}

/// `Σ_ℓ (z − ℓ)^{-n}` over the whole lattice, `n >= 3`.
pub fn lattice_power_sum(l: &Lattice, z: &BigComplex, n: u32) -> BigComplex {
    assert!(n >= 3);
    let c = l.ctx();
    let a = l.omega1.mul_2exp(1);
    let b = l.omega2.mul_2exp(1);
    let a_inv = a.recip().unwrap();
    let mut acc = c.czero();
    for q in -row_count(l)..=row_count(l) {
        let x = &(z - &b.scale(&c.int(q))) * &a_inv;
        acc += &row_power_sum(&x, n);
    }
    &acc * &a_inv.powi(n as i32).unwrap()
}

/// Eisenstein sum `Σ' ℓ^{-2k}` for `k >= 2`.
pub fn eisenstein_rows(l: &Lattice, k: u32) -> BigComplex {
    let c = l.ctx();
    let a = l.omega1.mul_2exp(1);
    let b = l.omega2.mul_2exp(1);
    let a_inv = a.recip().unwrap();
    let tau = &b * &a_inv;
    // q = 0 row: 2ζ(2k)
    let pi = c.pi();
    let zeta2k = match k {
        2 => pi.powi(4) / c.int(90),
        3 => pi.powi(6) / c.int(945),
        4 => pi.powi(8) / c.int(9450),
        5 => pi.powi(10) / c.int(93555),
        _ => panic!("weight 2k = {} not tabulated", 2 * k),
    };
    let mut acc = BigComplex::from_real(zeta2k.mul_2exp(1));
    for q in 1..=row_count(l) {
        let x = tau.scale(&c.int(q));
        acc += &row_power_sum(&x, 2 * k).mul_2exp(1);
    }
    &acc * &a_inv.powi(2 * k as i32).unwrap()
}

/// Eisenstein-summed (rows first) `Σ' ℓ^{-2}`.
pub fn g2_eisenstein_summed(l: &Lattice) -> BigComplex {
    let c = l.ctx();
    let a = l.omega1.mul_2exp(1);
    let b = l.omega2.mul_2exp(1);
    let a_inv = a.recip().unwrap();
    let tau = &b * &a_inv;
    let pi = c.pi();
    let mut acc = BigComplex::from_real(pi.sqr() / c.int(3));
    for q in 1..=row_count(l) {
        let x = tau.scale(&c.int(q));
        acc += &row_power_sum(&x, 2).mul_2exp(1);
    }
    &acc * &a_inv.sqr()
}

/// ℘ by rows: `Σ_q Σ_p (z − ℓ)^{-2} − Σ_q Σ'_p ℓ^{-2}`.
pub fn wp_rows(l: &Lattice, z: &BigComplex) -> BigComplex {
    let c = l.ctx();
    let b = l.omega2.mul_2exp(1);
    let a_inv = l.omega1.mul_2exp(1).recip().unwrap();
    let mut acc = c.czero();
    for q in -row_count(l)..=row_count(l) {
        let x = &(z - &b.scale(&c.int(q))) * &a_inv;
        acc += &row_power_sum(&x, 2);
    }
    &(&acc * &a_inv.sqr()) - &g2_eisenstein_summed(l)
}

/// `℘^{(k)}` for `k >= 1` from `(−1)^k (k+1)! Σ_ℓ (z − ℓ)^{-k-2}`.
pub fn wp_deriv_rows(l: &Lattice, z: &BigComplex, k: u32) -> BigComplex {
    assert!(k >= 1);
    let c = l.ctx();
    let s = lattice_power_sum(l, z, k + 2).scale(&factorial(c, k + 1));
    if k % 2 == 1 {
        -s
    } else {
        s
    }
}

/// ζ by rows with symmetric pairing of `q` and `−q`.
pub fn zeta_rows(l: &Lattice, z: &BigComplex) -> BigComplex {
    let c = l.ctx();
    let pi = c.pi();
    let b = l.omega2.mul_2exp(1);
    let a_inv = l.omega1.mul_2exp(1).recip().unwrap();
    let cot = |w: &BigComplex| (&(w * &a_inv)).scale(&pi).cot().unwrap();
    let mut acc = cot(z);
    for q in 1..=row_count(l) {
        let shift = b.scale(&c.int(q));
        acc += &cot(&(z - &shift));
        acc += &cot(&(z + &shift));
    }
    &(&acc * &a_inv).scale(&pi) + &(z * &g2_eisenstein_summed(l))
}

/// Laurent coefficients `c_k`, `k = 2..=kmax`, of
/// `℘ = z^{-2} + Σ_{k>=2} c_k z^{2k-2}`.
pub fn wp_laurent_coeffs(l: &Lattice, kmax: usize) -> Vec<BigComplex> {
    let c = l.ctx();
    let mut co = vec![c.czero(); kmax + 1];
    co[2] = l.g2.scale(&c.ratio(1, 20));
    if kmax >= 3 {
        co[3] = l.g3.scale(&c.ratio(1, 28));
    }
    for k in 4..=kmax {
        let mut s = c.czero();
        for m in 2..=k - 2 {
            s += &(&co[m] * &co[k - m]);
        }
        co[k] = s.scale(&c.ratio(3, ((2 * k + 1) * (k - 3)) as i64));
    }
    co
}

pub fn wp_laurent(co: &[BigComplex], z: &BigComplex) -> BigComplex {
    let z2 = z.sqr();
    let mut acc = z.ctx().czero();
    for ck in co.iter().skip(2).rev() {
        acc = &(&acc * &z2) + ck;
    }
    &(&acc * &z2) + &z2.recip().unwrap()
}

pub fn rel_err(a: &BigComplex, b: &BigComplex) -> BigReal {
    let c = a.ctx();
    (a - b).abs() / b.abs().max(c.one())
}

/// Fourth-order central difference of `f` along the real direction.
pub fn central_diff<F>(f: F, z: &BigComplex, h: &BigReal) -> BigComplex
where
    F: Fn(&BigComplex) -> BigComplex,
{
    let hc = BigComplex::from_real(h.clone());
    let f1p = f(&(z + &hc));
    let f1m = f(&(z - &hc));
    let f2p = f(&(z + &hc.mul_2exp(1)));
    let f2m = f(&(z - &hc.mul_2exp(1)));
    let num = &(&(&f1p - &f1m).scale_i32(8) - &f2p) + &f2m;
    num.scale(&(h * 12).recip().unwrap())
}
