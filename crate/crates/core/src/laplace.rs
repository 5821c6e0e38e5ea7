//! Dirichlet problem by least-squares collocation on the hole boundaries.
//!
//! The error is measured on a boundary sample set twice as fine as the one
//! used for fitting; by the maximum principle that sampled sup error bounds the
//! interior error up to sampling resolution.

use serde::Serialize;

use crate::arbprec::{BigComplex, BigReal, PrecisionContext};
use crate::basis::{column_scales, dot, unscale, BasisSpec, Coefficients};
use crate::error::{Error, Result};
use crate::export;
use crate::geometry::{BoundarySample, BoundarySampling, Domain};
use crate::linalg::{least_squares, DenseMatrix, LeastSquaresMode};

/// `f(θ) = a0 + Σ_k cos[k−1]·cos kθ + sin[k−1]·sin kθ` in a hole's parameter
/// angle.
#[derive(Clone, Debug, Serialize)]
pub struct FourierSeries {
    pub a0: BigReal,
    pub cos: Vec<BigReal>,
    pub sin: Vec<BigReal>,
}

impl FourierSeries {
    pub fn constant(v: BigReal) -> Self {
        FourierSeries {
            a0: v,
            cos: Vec::new(),
            sin: Vec::new(),
        }
    }

    /// `sin kθ`.
    pub fn sin_mode(ctx: PrecisionContext, k: usize) -> Self {
        let mut sin = vec![ctx.zero(); k];
        if k > 0 {
            sin[k - 1] = ctx.one();
        }
        FourierSeries {
            a0: ctx.zero(),
            cos: Vec::new(),
            sin,
        }
    }

    pub fn eval(&self, theta: &BigReal) -> BigReal {
        let mut acc = self.a0.clone();
        let n = self.cos.len().max(self.sin.len());
        for k in 1..=n {
            let (s, c) = (theta * k as i32).sin_cos();
            if let Some(a) = self.cos.get(k - 1) {
                if !a.is_zero() {
                    acc += &(a * &c);
                }
            }
            if let Some(b) = self.sin.get(k - 1) {
                if !b.is_zero() {
                    acc += &(b * &s);
                }
            }
        }
        acc
    }

    fn check(&self, ctx: PrecisionContext) -> Result<()> {
        for x in std::iter::once(&self.a0).chain(&self.cos).chain(&self.sin) {
            ctx.check(x)?;
            if !x.is_finite() {
                return Err(Error::Config("boundary data coefficients must be finite".into()));
            }
        }
        Ok(())
    }
}

/// One Fourier series per hole.
#[derive(Clone, Debug, Serialize)]
pub struct BoundaryData {
    pub holes: Vec<FourierSeries>,
}

impl BoundaryData {
    pub fn constant(holes: usize, v: BigReal) -> Self {
        BoundaryData {
            holes: vec![FourierSeries::constant(v); holes],
        }
    }

    pub fn eval(&self, s: &BoundarySample) -> BigReal {
        self.holes[s.hole].eval(&s.theta)
    }

    fn validate(&self, domain: &Domain) -> Result<()> {
        if self.holes.len() != domain.hole_count() {
            return Err(Error::Config(format!(
                "boundary data given for {} holes, domain has {}",
                self.holes.len(),
                domain.hole_count()
            )));
        }
        let ctx = domain.lattice().ctx();
        self.holes.iter().try_for_each(|h| h.check(ctx))
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LaplaceOptions {
    pub k_max: usize,
    /// Boundary samples per unknown.
    pub oversample: usize,
    pub mode: LeastSquaresMode,
    /// Divide each column by its largest boundary value before solving.
    pub scale_columns: bool,
}

impl LaplaceOptions {
    pub fn new(k_max: usize) -> Self {
        LaplaceOptions {
            k_max,
            oversample: 3,
            mode: LeastSquaresMode::Qr,
            scale_columns: true,
        }
    }
}

/// `B` and `b` for the given samples.
pub fn assemble_dirichlet(
    spec: &BasisSpec,
    samples: &[BoundarySample],
    data: &BoundaryData,
) -> Result<(DenseMatrix, Vec<BigReal>)> {
    let (b, _) = spec.boundary_matrices(samples, false)?;
    let rhs = samples.iter().map(|s| data.eval(s)).collect();
    Ok((b, rhs))
}

#[derive(Clone, Debug)]
pub struct LaplaceSolution {
    spec: BasisSpec,
    data: BoundaryData,
    options: LaplaceOptions,
    coefficients: Vec<BigReal>,
    boundary_sup_error: BigReal,
    coarse_sup_error: BigReal,
    samples_used: usize,
}

/// Serializable summary of a solve.
#[derive(Clone, Debug, Serialize)]
pub struct LaplaceReport {
    pub bits: u32,
    pub k_max: usize,
    pub m: usize,
    pub samples: usize,
    pub verify_samples: usize,
    pub boundary_sup_error: BigReal,
    /// Same maximum over the fitting samples only.
    pub coarse_sup_error: BigReal,
    pub options: LaplaceOptions,
    pub coefficients: Coefficients,
}

pub fn solve_laplace(domain: &Domain, data: &BoundaryData, options: LaplaceOptions) -> Result<LaplaceSolution> {
    data.validate(domain)?;
    if options.oversample == 0 {
        return Err(Error::Config("oversample must be positive".into()));
    }
    let spec = BasisSpec::new(domain.clone(), options.k_max)?;
    let m = spec.m();
    let sampling = BoundarySampling::proportional(domain, options.oversample * m)?;
    let samples = sampling.sample(domain)?;
    let (mut b, rhs) = assemble_dirichlet(&spec, &samples, data)?;
    let coefficients = if options.scale_columns {
        let scales = column_scales(&b);
        b.scale_columns(&scales);
        unscale(&least_squares(&b, &rhs, options.mode)?, &scales)
    } else {
        least_squares(&b, &rhs, options.mode)?
    };

    let verify = sampling.doubled().sample(domain)?;
    let mut fine = spec.ctx().zero();
    let mut coarse = spec.ctx().zero();
    // doubled angles are nested: every second sample of a hole is a fitting sample
    let mut k = 0;
    for (i, s) in verify.iter().enumerate() {
        if i > 0 && verify[i - 1].hole != s.hole {
            k = 0;
        }
        let u = dot(&spec.row(&s.point, None)?.values, &coefficients);
        let err = (u - &data.eval(s)).abs();
        if k % 2 == 0 && err > coarse {
            coarse = err.clone();
        }
        if err > fine {
            fine = err;
        }
        k += 1;
    }
    Ok(LaplaceSolution {
        spec,
        data: data.clone(),
        options,
        coefficients,
        boundary_sup_error: fine,
        coarse_sup_error: coarse,
        samples_used: samples.len(),
    })
}

impl LaplaceSolution {
    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    pub fn data(&self) -> &BoundaryData {
        &self.data
    }

    /// Coefficients of the unscaled basis.
    pub fn coefficients(&self) -> &[BigReal] {
        &self.coefficients
    }

    pub fn boundary_sup_error(&self) -> &BigReal {
        &self.boundary_sup_error
    }

    pub fn coarse_sup_error(&self) -> &BigReal {
        &self.coarse_sup_error
    }

    pub fn samples_used(&self) -> usize {
        self.samples_used
    }

    /// `u(z)` for `z` in Ω.
    pub fn eval(&self, z: &BigComplex) -> Result<BigReal> {
        if !self.spec.domain().contains(z) {
            return Err(Error::PointOutsideDomain);
        }
        self.spec.evaluate(&self.coefficients, z)
    }

    /// `u` at a boundary sample (no membership check).
    pub fn eval_boundary(&self, s: &BoundarySample) -> Result<BigReal> {
        self.spec.evaluate(&self.coefficients, &s.point)
    }

    pub fn report(&self) -> Result<LaplaceReport> {
        Ok(LaplaceReport {
            bits: self.spec.ctx().bits(),
            k_max: self.spec.k_max(),
            m: self.spec.m(),
            samples: self.samples_used,
            verify_samples: 2 * self.samples_used,
            boundary_sup_error: self.boundary_sup_error.clone(),
            coarse_sup_error: self.coarse_sup_error.clone(),
            options: self.options,
            coefficients: self.spec.expand_coefficients(&self.coefficients)?,
        })
    }

    /// `x,y,u` CSV over a `grid_n × grid_n` grid of the fundamental cell.
    pub fn field_csv(&self, grid_n: usize) -> Result<String> {
        export::field_csv(self.spec.domain(), grid_n, |z| self.eval(z))
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::geometry::Hole;
    use crate::lattice::Lattice;

    fn one_hole(bits: u32) -> Domain {
        let c = PrecisionContext::new(bits).unwrap();
        let l = Arc::new(Lattice::square(c).unwrap());
        Domain::new(l, vec![Hole::circle(c.czero(), c.parse("0.4").unwrap()).unwrap()]).unwrap()
    }

    #[test]
    fn fourier_eval() {
        let c = PrecisionContext::new(128).unwrap();
        let f = FourierSeries {
            a0: c.one(),
            cos: vec![c.zero(), c.int(2)],
            sin: vec![c.int(3)],
        };
        let th = c.ratio(1, 3);
        let want = c.one() + &(th.mul_2exp(1).cos() * 2) + &(th.sin() * 3);
        assert!((f.eval(&th) - want).abs() < c.tol(4));
        let s5 = FourierSeries::sin_mode(c, 5);
        assert!((s5.eval(&th) - (&th * 5).sin()).abs() < c.tol(4));
    }

    #[test]
    fn constant_data_is_reproduced() {
        let d = one_hole(128);
        let c = d.lattice().ctx();
        let sol = solve_laplace(&d, &BoundaryData::constant(1, c.one()), LaplaceOptions::new(4)).unwrap();
        assert!(*sol.boundary_sup_error() < c.tol(48));
        let z = c.complex(0.7, 0.2);
        assert!((sol.eval(&z).unwrap() - c.one()).abs() < c.tol(48));
    }

    #[test]
    fn rhs_matches_data() {
        let d = one_hole(96);
        let c = d.lattice().ctx();
        let spec = BasisSpec::new(d.clone(), 2).unwrap();
        let samples = crate::geometry::sample_boundary(&d, 20).unwrap();
        let data = BoundaryData {
            holes: vec![FourierSeries::sin_mode(c, 5)],
        };
        let (b, rhs) = assemble_dirichlet(&spec, &samples, &data).unwrap();
        for (s, r) in samples.iter().zip(&rhs) {
            assert!((r - &(&s.theta * 5).sin()).abs() < c.tol(4));
        }
        for r in 0..b.rows() {
            assert_eq!(b.get(r, 0).to_f64(), 1.0);
        }
    }

    #[test]
    fn mismatched_data_is_rejected() {
        let d = one_hole(96);
        let c = d.lattice().ctx();
        let data = BoundaryData::constant(2, c.one());
        assert!(matches!(solve_laplace(&d, &data, LaplaceOptions::new(2)), Err(Error::Config(_))));
    }
}
