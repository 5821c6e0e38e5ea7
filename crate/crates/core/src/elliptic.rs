//! Weierstrass ℘, its derivatives, ζ, σ and the doubly-periodic
//! modifications ζ̂ and log|σ̂|.
//!
//! Every evaluation first reduces `z` to the cell `|x|, |y| <= 1/2` and then
//! uses the theta-function Lambert series in `v = πz / (2ω1)`:
//!
//! ```text
//! ζ(z)  = (η1/ω1) z + c (cot v + 4 Σ L_n sin 2nv)
//! ℘(z)  = −η1/ω1 + c² (csc² v − 8 Σ n L_n cos 2nv)
//! ℘'(z) = c³ (−2 csc² v cot v + 16 Σ n² L_n sin 2nv)
//! σ(z)  = (2ω1/π) exp(η1 z² / (2ω1)) θ1(v) / θ1'(0)
//! ```
//!
//! with `c = π/(2ω1)` and `L_n = q^{2n}/(1 − q^{2n})`. Higher derivatives of
//! ℘ come from `℘'' = 6℘² − g2/2` and its differentiated form, carried out
//! on Taylor-normalized coefficients `℘^{(k)}/k!`.

use std::sync::Arc;

use crate::arbprec::{BigComplex, BigReal};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, Reduced};

/// Highest derivative order accepted by [`EllipticEvaluator::wp_derivs`].
pub const DEFAULT_K_CAP: usize = 512;

#[derive(Clone, Debug)]
pub struct EllipticEvaluator {
    lattice: Arc<Lattice>,
    pole_guard: BigReal,
    k_cap: usize,
}

/// All quantities the basis needs at one point, sharing a single reduction.
#[derive(Clone, Debug)]
pub struct PointEval {
    /// Reduced argument `z'` (same residue class as the input).
    pub reduced: BigComplex,
    /// `℘^{(k)}(z)` for `k = 0..=k_max`.
    pub derivs: Vec<BigComplex>,
    /// `ζ(z')` at the reduced argument.
    pub zeta_reduced: BigComplex,
    pub zeta_hat: BigComplex,
    pub log_abs_sigma_hat: BigReal,
}

struct Core {
    v: BigComplex,
    wp: BigComplex,
    wp_prime: BigComplex,
    zeta: BigComplex,
}

impl EllipticEvaluator {
    pub fn new(lattice: Arc<Lattice>) -> Self {
        let ctx = lattice.ctx();
        let pole_guard = ctx.pow2(-(ctx.bits() as i32) / 2);
        EllipticEvaluator {
            lattice,
            pole_guard,
            k_cap: DEFAULT_K_CAP,
        }
    }

    pub fn with_pole_guard(mut self, guard: BigReal) -> Self {
        self.pole_guard = guard;
        self
    }

    pub fn with_k_cap(mut self, k_cap: usize) -> Self {
        self.k_cap = k_cap;
        self
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn lattice_arc(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn pole_guard(&self) -> &BigReal {
        &self.pole_guard
    }

    fn reduce_checked(&self, z: &BigComplex) -> Result<Reduced> {
        self.lattice.ctx().check_complex(z)?;
        let r = self.lattice.reduce(z);
        let near = r.z.abs() <= self.pole_guard
            || (-1..=1)
                .flat_map(|p| (-1..=1).map(move |q| (p, q)))
                .filter(|&(p, q)| (p, q) != (0, 0))
                .any(|(p, q)| (&r.z - &self.lattice.vector(p, q)).abs() <= self.pole_guard);
        if near {
            return Err(Error::Pole {
                guard: self.pole_guard.to_f64(),
            });
        }
        Ok(r)
    }

    fn core(&self, zr: &BigComplex) -> Result<Core> {
        let l = &*self.lattice;
        let c = &l.v_scale;
        let v = c * zr;
        let cot = v.cot()?;
        let sums = l.lambert_sums(&v, true);
        let csc2 = &l.ctx().cone() + &cot.sqr();

        let c2 = c.sqr();
        let c3 = &c2 * c;
        let wp = &(&c2 * &(&csc2 - &sums.cos_n.scale_i32(8))) - &l.eta1_over_omega1;
        let wp_prime = &c3 * &(&(&csc2 * &cot).scale_i32(-2) + &sums.sin_n2.scale_i32(16));
        let mut inner = cot.clone();
        inner += &sums.sin1.scale_i32(4);
        let zeta = &(&l.eta1_over_omega1 * zr) + &(c * &inner);
        Ok(Core {
            v,
            wp,
            wp_prime,
            zeta,
        })
    }

    pub fn wp(&self, z: &BigComplex) -> Result<BigComplex> {
        Ok(self.wp_pair(z)?.0)
    }

    pub fn wp_prime(&self, z: &BigComplex) -> Result<BigComplex> {
        Ok(self.wp_pair(z)?.1)
    }

    /// `(℘(z), ℘'(z))`, both from their own series.
    pub fn wp_pair(&self, z: &BigComplex) -> Result<(BigComplex, BigComplex)> {
        let r = self.reduce_checked(z)?;
        let core = self.core(&r.z)?;
        Ok((core.wp, core.wp_prime))
    }

    /// `[℘, ℘', …, ℘^{(k_max)}]` at `z`.
    pub fn wp_derivs(&self, z: &BigComplex, k_max: usize) -> Result<Vec<BigComplex>> {
        if k_max > self.k_cap {
            return Err(Error::Domain(format!(
                "derivative order {k_max} exceeds cap {}",
                self.k_cap
            )));
        }
        let r = self.reduce_checked(z)?;
        let core = self.core(&r.z)?;
        Ok(self.derivative_ladder(core.wp, core.wp_prime, k_max))
    }

    /// Runs the ℘ recursion on `a_k = ℘^{(k)}/k!`:
    /// `a_2 = 3a_0² − g2/4`, `a_{n+2} = 6/((n+1)(n+2)) Σ_{k=0}^{n} a_{n−k} a_k`.
    fn derivative_ladder(&self, wp: BigComplex, wp_prime: BigComplex, k_max: usize) -> Vec<BigComplex> {
        let ctx = self.lattice.ctx();
        let mut a: Vec<BigComplex> = Vec::with_capacity(k_max + 1);
        a.push(wp);
        if k_max >= 1 {
            a.push(wp_prime);
        }
        if k_max >= 2 {
            let a2 = &a[0].sqr().scale_i32(3) - &self.lattice.g2.mul_2exp(-2);
            a.push(a2);
        }
        for target in 3..=k_max {
            let n = target - 2;
            let mut acc = ctx.czero();
            for k in 0..(n + 1) / 2 {
                acc.add_mul(&a[k], &a[n - k]);
            }
            acc = acc.mul_2exp(1);
            if n % 2 == 0 {
                acc.add_mul(&a[n / 2], &a[n / 2]);
            }
            let den = ((n + 1) * (n + 2)) as i32;
            let mut next = acc.scale_i32(6);
            next.re /= den;
            next.im /= den;
            a.push(next);
        }
        let mut fact = ctx.one();
        for (k, ak) in a.iter_mut().enumerate().skip(2) {
            fact *= k as i32;
            *ak = ak.scale(&fact);
        }
        a
    }

    /// Raw Weierstrass ζ, quasi-periodic: `ζ(z + 2ω_i) = ζ(z) + 2η_i`.
    pub fn zeta(&self, z: &BigComplex) -> Result<BigComplex> {
        let r = self.reduce_checked(z)?;
        let core = self.core(&r.z)?;
        let shift = self.lattice.eta_of(r.p, r.q).mul_2exp(1);
        Ok(&core.zeta + &shift)
    }

    /// `ζ̂(z) = ζ(z) − γ2 z − (π/A) z̄`, doubly periodic.
    pub fn zeta_hat(&self, z: &BigComplex) -> Result<BigComplex> {
        let r = self.reduce_checked(z)?;
        let core = self.core(&r.z)?;
        Ok(self.zeta_hat_reduced(&r.z, &core.zeta))
    }

    fn zeta_hat_reduced(&self, zr: &BigComplex, zeta: &BigComplex) -> BigComplex {
        let l = &*self.lattice;
        let pa = &l.pi / &l.area;
        &(zeta - &(&l.gamma2 * zr)) - &zr.conj().scale(&pa)
    }

    /// `θ1(v)/θ1'(0)` with the common `q^{1/4}` factor cancelled.
    fn theta_ratio(&self, v: &BigComplex) -> BigComplex {
        let l = &*self.lattice;
        let ctx = l.ctx();
        let iv = v.mul_i();
        let u = iv.exp();
        let u_inv = (-&iv).exp();
        let u2 = u.sqr();
        let u2_inv = u_inv.sqr();
        let mut up = u;
        let mut um = u_inv;
        let mut num = ctx.czero();
        let mut tmp = ctx.czero();
        for (n, t) in l.theta.iter().enumerate() {
            if n > 0 {
                tmp.assign_mul(&up, &u2);
                std::mem::swap(&mut up, &mut tmp);
                tmp.assign_mul(&um, &u2_inv);
                std::mem::swap(&mut um, &mut tmp);
            }
            let diff = &up - &um;
            num.add_mul(t, &diff);
        }
        // sin = (U - U^{-1}) / (2i)
        let num = (-num.mul_i()).mul_2exp(-1);
        &num / &l.theta_prime0
    }

    fn sigma_reduced(&self, zr: &BigComplex, v: &BigComplex) -> BigComplex {
        let l = &*self.lattice;
        let pref = BigComplex::from_real(l.pi.clone());
        let pref = &l.omega1.mul_2exp(1) / &pref;
        let gauss = (&(&l.eta1_over_omega1 * &zr.sqr())).mul_2exp(-1).exp();
        &(&pref * &gauss) * &self.theta_ratio(v)
    }

    /// Weierstrass σ, entire; quasi-periodicity is applied analytically after
    /// reduction: `σ(z' + w) = ε(w) exp(2η_w (z' + w/2)) σ(z')`.
    pub fn sigma(&self, z: &BigComplex) -> Result<BigComplex> {
        let l = &*self.lattice;
        l.ctx().check_complex(z)?;
        let r = l.reduce(z);
        let v = &l.v_scale * &r.z;
        let base = self.sigma_reduced(&r.z, &v);
        if r.p == 0 && r.q == 0 {
            return Ok(base);
        }
        let w = l.vector(r.p, r.q);
        let eta_w = l.eta_of(r.p, r.q);
        let arg = (&eta_w * &(&r.z + &w.mul_2exp(-1))).mul_2exp(1);
        let mut out = &base * &arg.exp();
        let parity = r.p + r.q + r.p * r.q;
        if parity.rem_euclid(2) == 1 {
            out = -out;
        }
        Ok(out)
    }

    /// `log|σ̂(z)| = log|σ(z)| − Re(γ2 z²)/2 − π|z|²/(2A)`, doubly periodic.
    pub fn log_abs_sigma_hat(&self, z: &BigComplex) -> Result<BigReal> {
        let r = self.reduce_checked(z)?;
        let v = &self.lattice.v_scale * &r.z;
        self.log_abs_sigma_hat_reduced(&r.z, &v)
    }

    fn log_abs_sigma_hat_reduced(&self, zr: &BigComplex, v: &BigComplex) -> Result<BigReal> {
        let l = &*self.lattice;
        let pref = (&l.omega1.mul_2exp(1).abs() / &l.pi).ln()?;
        let z2 = zr.sqr();
        let gauss = (&l.eta1_over_omega1 * &z2).re.mul_2exp(-1);
        let theta = self.theta_ratio(v);
        if theta.is_zero() {
            return Err(Error::Pole {
                guard: self.pole_guard.to_f64(),
            });
        }
        let log_theta = theta.abs().ln()?;
        let quad = (&l.gamma2 * &z2).re.mul_2exp(-1);
        let radial = (&(&l.pi * &zr.norm_sqr()) / &l.area).mul_2exp(-1);
        Ok(pref + gauss + log_theta - quad - radial)
    }

    /// Evaluates everything the basis needs at `z`: `℘^{(0..=k_max)}`, ζ at
    /// the reduced point, ζ̂ and log|σ̂|.
    pub fn point(&self, z: &BigComplex, k_max: usize) -> Result<PointEval> {
        if k_max > self.k_cap {
            return Err(Error::Domain(format!(
                "derivative order {k_max} exceeds cap {}",
                self.k_cap
            )));
        }
        let r = self.reduce_checked(z)?;
        let core = self.core(&r.z)?;
        let zeta_hat = self.zeta_hat_reduced(&r.z, &core.zeta);
        let log_abs_sigma_hat = self.log_abs_sigma_hat_reduced(&r.z, &core.v)?;
        let derivs = self.derivative_ladder(core.wp, core.wp_prime, k_max);
        Ok(PointEval {
            reduced: r.z,
            derivs,
            zeta_reduced: core.zeta,
            zeta_hat,
            log_abs_sigma_hat,
        })
    }
}
