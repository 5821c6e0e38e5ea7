//! Period lattice `2ω1ℤ + 2ω2ℤ` and its invariants.
//!
//! `g2`, `g3` and `η1` come from Eisenstein series in the nome
//! `q = exp(iπτ)`, which converge geometrically; `η2 = ζ(ω2)` is evaluated
//! from the same Lambert series used by the elliptic functions, so the
//! Legendre relation is a genuine check rather than an identity by
//! construction. The direct lattice sum [`eisenstein_direct`] is kept as an
//! independent oracle.

use serde::Serialize;

use crate::arbprec::{BigComplex, BigReal, PrecisionContext};
use crate::error::{Error, Result};

/// Immutable lattice data shared by every evaluator.
#[derive(Clone, Debug)]
pub struct Lattice {
    ctx: PrecisionContext,
    pub omega1: BigComplex,
    pub omega2: BigComplex,
    /// `ω2 / ω1`, with `Im τ > 0`.
    pub tau: BigComplex,
    pub nome_q: BigComplex,
    pub g2: BigComplex,
    pub g3: BigComplex,
    pub gamma2: BigComplex,
    pub eta1: BigComplex,
    pub eta2: BigComplex,
    /// Area of the fundamental cell.
    pub area: BigReal,
    pub(crate) pi: BigReal,
    /// `q^{2n} / (1 - q^{2n})` for `n = 1..=N`.
    pub(crate) lambert: Vec<BigComplex>,
    /// `(-1)^n q^{n(n+1)}` for `n = 0..=Nt`.
    pub(crate) theta: Vec<BigComplex>,
    /// `Σ (-1)^n (2n+1) q^{n(n+1)}`.
    pub(crate) theta_prime0: BigComplex,
    /// `π / (2ω1)`.
    pub(crate) v_scale: BigComplex,
    /// `η1 / ω1`.
    pub(crate) eta1_over_omega1: BigComplex,
    /// `Im(ā b)` with `a = 2ω1`, `b = 2ω2` (positive).
    im_ab: BigReal,
}

/// Nearest-cell representative of a point and the lattice shift removed.
#[derive(Clone, Debug)]
pub struct Reduced {
    pub z: BigComplex,
    pub p: i64,
    pub q: i64,
}

impl Lattice {
    pub fn new(omega1: BigComplex, omega2: BigComplex, ctx: PrecisionContext) -> Result<Self> {
        ctx.check_complex(&omega1)?;
        ctx.check_complex(&omega2)?;
        if omega1.is_zero() || omega2.is_zero() {
            return Err(Error::Geometry("half-periods must be non-zero".into()));
        }
        let mut omega2 = omega2;
        let mut tau = &omega2 / &omega1;
        if tau.im.abs() <= &tau.abs() * &ctx.tol(ctx.bits() as i32 / 2) {
            return Err(Error::Geometry("half-periods are colinear".into()));
        }
        if tau.im.is_negative() {
            omega2 = -omega2;
            tau = -tau;
        }
        let pi = ctx.pi();
        let i_pi_tau = BigComplex::new(-(&pi * &tau.im), &pi * &tau.re);
        let nome_q = i_pi_tau.exp();
        let q_abs = nome_q.abs();
        if q_abs >= ctx.one() - ctx.pow2(-8) {
            return Err(Error::Conditioning(format!(
                "|q| = {:.6} is too close to 1",
                q_abs.to_f64()
            )));
        }

        let neg_log2_q = -(q_abs.to_f64().log2());
        let target = ctx.bits() as f64 + 16.0;
        let mut n_terms = 1usize;
        while (n_terms as f64) * neg_log2_q < target + 2.0 * (n_terms as f64).log2() + 1.0 {
            n_terms += 1;
        }
        let theta_terms = ((target / neg_log2_q).sqrt().ceil() as usize) + 2;

        let q2 = nome_q.sqr();
        let one = ctx.cone();
        let mut lambert = Vec::with_capacity(n_terms);
        let mut q2n = one.clone();
        for _ in 0..n_terms {
            q2n = &q2n * &q2;
            let den = &one - &q2n;
            lambert.push(&q2n / &den);
        }

        // (-1)^n q^{n(n+1)}: successive ratio is -q^{2n}.
        let mut theta = Vec::with_capacity(theta_terms + 1);
        let mut term = one.clone();
        let mut theta_prime0 = one.clone();
        theta.push(term.clone());
        let mut q2n = one.clone();
        for n in 1..=theta_terms {
            q2n = &q2n * &q2;
            term = -(&term * &q2n);
            theta_prime0 += &term.scale_i32(2 * n as i32 + 1);
            theta.push(term.clone());
        }

        // Eisenstein series E2, E4, E6 in q^2.
        let mut s1 = ctx.czero();
        let mut s3 = ctx.czero();
        let mut s5 = ctx.czero();
        for (idx, l) in lambert.iter().enumerate() {
            let n = ctx.int(idx as i64 + 1);
            let n2 = n.sqr();
            let n3 = &n2 * &n;
            let n5 = &n3 * &n2;
            s1 += &l.scale(&n);
            s3 += &l.scale(&n3);
            s5 += &l.scale(&n5);
        }
        let e2 = &one - &s1.scale_i32(24);
        let e4 = &one + &s3.scale_i32(240);
        let e6 = &one - &s5.scale_i32(504);

        let pi_over_omega1 = BigComplex::from_real(pi.clone()) / &omega1;
        let p2 = pi_over_omega1.sqr();
        let p4 = p2.sqr();
        let p6 = &p4 * &p2;
        let g2 = (&p4 * &e4).scale(&ctx.ratio(1, 12));
        let g3 = (&p6 * &e6).scale(&ctx.ratio(1, 216));
        // η1 = π² E2 / (12 ω1)
        let eta1 = (&(&e2.scale(&pi.sqr()) / &omega1)).scale(&ctx.ratio(1, 12));
        let eta1_over_omega1 = &eta1 / &omega1;
        let v_scale = pi_over_omega1.mul_2exp(-1);

        let a = omega1.mul_2exp(1);
        let b = omega2.mul_2exp(1);
        let im_ab = (&a.conj() * &b).im;
        let area = im_ab.abs();

        let mut lattice = Lattice {
            ctx,
            omega1,
            omega2,
            tau,
            nome_q,
            g2,
            g3,
            gamma2: ctx.czero(),
            eta1,
            eta2: ctx.czero(),
            area,
            pi,
            lambert,
            theta,
            theta_prime0,
            v_scale,
            eta1_over_omega1,
            im_ab,
        };
        lattice.eta2 = lattice.zeta_series(&lattice.omega2.clone())?;
        let pi_over_area = &lattice.pi / &lattice.area;
        lattice.gamma2 =
            &(&lattice.eta1 - &lattice.omega1.conj().scale(&pi_over_area)) / &lattice.omega1;
        Ok(lattice)
    }

    /// Convenience constructor from `f64` half-periods (exact binary values).
    pub fn from_f64(omega1: (f64, f64), omega2: (f64, f64), ctx: PrecisionContext) -> Result<Self> {
        Lattice::new(ctx.complex(omega1.0, omega1.1), ctx.complex(omega2.0, omega2.1), ctx)
    }

    /// Square lattice `(ω1, ω2) = (1, i)`.
    pub fn square(ctx: PrecisionContext) -> Result<Self> {
        Lattice::new(ctx.cone(), ctx.imag_unit(), ctx)
    }

    /// Equilateral lattice `(ω1, ω2) = (1, 1/2 + i√3/2)`.
    pub fn equilateral(ctx: PrecisionContext) -> Result<Self> {
        let half = ctx.ratio(1, 2);
        let h = ctx.int(3).sqrt()?.mul_2exp(-1);
        Lattice::new(ctx.cone(), BigComplex::new(half, h), ctx)
    }

    pub fn ctx(&self) -> PrecisionContext {
        self.ctx
    }

    pub fn pi(&self) -> &BigReal {
        &self.pi
    }

    /// Lattice vector `2pω1 + 2qω2`.
    pub fn vector(&self, p: i64, q: i64) -> BigComplex {
        let a = self.omega1.scale(&self.ctx.int(2 * p));
        let b = self.omega2.scale(&self.ctx.int(2 * q));
        &a + &b
    }

    /// Real coordinates `(x, y)` with `z = 2ω1 x + 2ω2 y`.
    pub fn cell_coords(&self, z: &BigComplex) -> (BigReal, BigReal) {
        let a = self.omega1.mul_2exp(1);
        let b = self.omega2.mul_2exp(1);
        // Im(z b̄) = x Im(a b̄) = -x Im(ā b)
        let x = -((z * &b.conj()).im / &self.im_ab);
        let y = (z * &a.conj()).im / &self.im_ab;
        (x, y)
    }

    /// Reduces `z` by the nearest lattice vector in cell coordinates, so the
    /// representative has `|x|, |y| <= 1/2`.
    pub fn reduce(&self, z: &BigComplex) -> Reduced {
        let (x, y) = self.cell_coords(z);
        let p = x.round_to_i64();
        let q = y.round_to_i64();
        let zr = if p == 0 && q == 0 {
            z.clone()
        } else {
            z - &self.vector(p, q)
        };
        Reduced { z: zr, p, q }
    }

    /// Distance from `z` to the nearest lattice point.
    pub fn distance_to_lattice(&self, z: &BigComplex) -> BigReal {
        let r = self.reduce(z);
        let mut best = r.z.abs();
        for p in -1..=1 {
            for q in -1..=1 {
                if p == 0 && q == 0 {
                    continue;
                }
                let d = (&r.z - &self.vector(p, q)).abs();
                if d < best {
                    best = d;
                }
            }
        }
        best
    }

    /// Quasi-period `η_w = pη1 + qη2` of the lattice vector `2pω1 + 2qω2`,
    /// so that `ζ(z + w) = ζ(z) + 2η_w`.
    pub fn eta_of(&self, p: i64, q: i64) -> BigComplex {
        &self.eta1.scale(&self.ctx.int(p)) + &self.eta2.scale(&self.ctx.int(q))
    }

    /// `ζ(z)` from the Lambert series, valid for `z` in the reduced strip
    /// `|y| <= 1/2` (including `z = ω2`).
    pub(crate) fn zeta_series(&self, z: &BigComplex) -> Result<BigComplex> {
        let v = &self.v_scale * z;
        let sums = self.lambert_sums(&v, false);
        let cot = v.cot()?;
        let mut inner = cot;
        inner += &sums.sin1.scale_i32(4);
        Ok(&self.eta1_over_omega1 * z + &self.v_scale * &inner)
    }

    /// Lambert sums `Σ L_n sin 2nv`, and optionally `Σ n L_n cos 2nv`,
    /// `Σ n² L_n sin 2nv`.
    pub(crate) fn lambert_sums(&self, v: &BigComplex, derivatives: bool) -> LambertSums {
        let ctx = self.ctx;
        // w = exp(2iv)
        let two_iv = v.mul_i().mul_2exp(1);
        let w = two_iv.exp();
        let w_inv = (-&two_iv).exp();
        let mut pw = ctx.cone();
        let mut mw = ctx.cone();
        let mut tmp = ctx.czero();
        let mut d = ctx.czero();
        let mut e = ctx.czero();
        let mut x = ctx.czero();
        let mut y = ctx.czero();
        let mut zsum = ctx.czero();
        for (idx, l) in self.lambert.iter().enumerate() {
            let n = idx as i32 + 1;
            tmp.assign_mul(&pw, &w);
            std::mem::swap(&mut pw, &mut tmp);
            tmp.assign_mul(&mw, &w_inv);
            std::mem::swap(&mut mw, &mut tmp);
            let diff = &pw - &mw;
            d.assign_mul(l, &diff);
            x += &d;
            if derivatives {
                let sum = &pw + &mw;
                e.assign_mul(l, &sum);
                y += &e.scale_i32(n);
                zsum += &d.scale_i32(n * n);
            }
        }
        // sin = (P - M) / (2i) = -i (P - M) / 2, cos = (P + M) / 2
        let neg_half_i = |s: &BigComplex| (-s.mul_i()).mul_2exp(-1);
        LambertSums {
            sin1: neg_half_i(&x),
            cos_n: y.mul_2exp(-1),
            sin_n2: neg_half_i(&zsum),
        }
    }

    /// `|η1ω2 − η2ω1 − iπ/2|`.
    pub fn legendre_residual(&self) -> BigReal {
        let lhs = &(&self.eta1 * &self.omega2) - &(&self.eta2 * &self.omega1);
        let target = BigComplex::new(self.ctx.zero(), self.pi.mul_2exp(-1));
        (&lhs - &target).abs()
    }

    /// `max_i |η_i − γ2 ω_i − π ω_i* / A|`.
    pub fn eta_relation_residual(&self) -> BigReal {
        let pa = &self.pi / &self.area;
        let r1 = &(&self.eta1 - &(&self.gamma2 * &self.omega1)) - &self.omega1.conj().scale(&pa);
        let r2 = &(&self.eta2 - &(&self.gamma2 * &self.omega2)) - &self.omega2.conj().scale(&pa);
        r1.abs().max(r2.abs())
    }

    pub fn report(&self) -> LatticeReport {
        LatticeReport {
            precision_bits: self.ctx.bits(),
            omega1: self.omega1.clone(),
            omega2: self.omega2.clone(),
            tau: self.tau.clone(),
            nome_q: self.nome_q.clone(),
            g2: self.g2.clone(),
            g3: self.g3.clone(),
            gamma2: self.gamma2.clone(),
            eta1: self.eta1.clone(),
            eta2: self.eta2.clone(),
            area: self.area.clone(),
            legendre_residual: self.legendre_residual(),
            eta_relation_residual: self.eta_relation_residual(),
        }
    }
}

pub(crate) struct LambertSums {
    pub sin1: BigComplex,
    pub cos_n: BigComplex,
    pub sin_n2: BigComplex,
}

/// Serializable view of a [`Lattice`].
#[derive(Clone, Debug, Serialize)]
pub struct LatticeReport {
    pub precision_bits: u32,
    pub omega1: BigComplex,
    pub omega2: BigComplex,
    pub tau: BigComplex,
    pub nome_q: BigComplex,
    pub g2: BigComplex,
    pub g3: BigComplex,
    pub gamma2: BigComplex,
    pub eta1: BigComplex,
    pub eta2: BigComplex,
    pub area: BigReal,
    pub legendre_residual: BigReal,
    pub eta_relation_residual: BigReal,
}

/// Shell-ordered partial sum of `Σ ℓ^{-2k}` over `0 < max(|p|,|q|) <= radius`
/// with `ℓ = 2pω1 + 2qω2`, together with a bound on the neglected tail.
///
/// The tail bound uses `|ℓ| >= max(|p|,|q|) δ` with
/// `δ = |Im(a b̄)| / max(|a|,|b|)`, giving
/// `8 δ^{-2k} R^{2-2k} / (2k - 2)`.
pub fn eisenstein_direct(
    omega1: &BigComplex,
    omega2: &BigComplex,
    k: u32,
    radius: u32,
) -> Result<(BigComplex, BigReal)> {
    if k < 2 {
        return Err(Error::Domain(format!("Eisenstein weight 2k needs k >= 2, got {k}")));
    }
    if radius < 10 {
        return Err(Error::Domain(format!("shell radius must be at least 10, got {radius}")));
    }
    let ctx = omega1.ctx();
    let a = omega1.mul_2exp(1);
    let b = omega2.mul_2exp(1);
    let r = radius as i64;
    let exp = 2 * k as i32;
    let mut sum = ctx.czero();
    for shell in 1..=r {
        for p in -shell..=shell {
            for q in -shell..=shell {
                if p.abs().max(q.abs()) != shell {
                    continue;
                }
                let l = &a.scale(&ctx.int(p)) + &b.scale(&ctx.int(q));
                sum += &l.powi(-exp)?;
            }
        }
    }
    let delta = (&a.conj() * &b).im.abs() / a.abs().max(b.abs());
    let tail = ctx.int(8) * delta.powi(-exp) * ctx.int(radius as i64).powi(2 - exp)
        / ctx.int(2 * k as i64 - 2);
    Ok((sum, tail))
}
