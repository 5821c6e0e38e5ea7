//! Steklov eigenvalues from local minima of `s(σ)`.
//!
//! `s(σ)` is the smallest generalized eigenvalue of
//! `D(σ) = (A − σB)ᵗ(A − σB)` against `CᵗC`, where `A`, `B` hold normal
//! derivatives and values of the basis on the boundary and `C` its values at
//! interior points. `D(σ) = AᵗA − σ(AᵗB + BᵗA) + σ²BᵗB`, so the three Gram
//! matrices are rotated into the range/kernel frame of `C` once and every
//! evaluation is a combination plus a reduced solve.

use serde::Serialize;

use crate::arbprec::{BigComplex, BigReal, PrecisionContext};
use crate::basis::{column_scales, dot, unscale, BasisSpec};
use crate::error::{Error, Result};
use crate::export;
use crate::geometry::{BoundarySample, BoundarySampling, Domain};
use crate::linalg::{DenseMatrix, GenPair, PencilReducer};

#[derive(Clone, Debug, Serialize)]
pub struct SteklovConfig {
    pub k_max: usize,
    /// Number of interior points `R`.
    pub interior_r: usize,
    pub seed: u64,
    pub sigma_lo: BigReal,
    pub sigma_hi: BigReal,
    pub step: BigReal,
    /// Golden-section stopping width.
    pub tol: BigReal,
    pub oversample: usize,
    pub scale_columns: bool,
    /// The second reduced eigenvalue at a minimizer must fall below this
    /// for the candidate to count as double.
    pub multiplicity_threshold: BigReal,
}

impl SteklovConfig {
    /// Scan `(−tol, 25)` in steps of 0.05 with `tol = 10^{-40}`, `R = 50`.
    pub fn new(ctx: PrecisionContext, k_max: usize) -> Self {
        let tol = ctx.parse("1e-40").expect("literal");
        SteklovConfig {
            k_max,
            interior_r: 50,
            seed: 0,
            sigma_lo: -tol.clone(),
            sigma_hi: ctx.int(25),
            step: ctx.parse("0.05").expect("literal"),
            tol,
            oversample: 3,
            scale_columns: true,
            multiplicity_threshold: ctx.parse("1e-12").expect("literal"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sigma_lo.is_negative() && self.sigma_lo.abs() > self.tol {
            return Err(Error::Config("sigma_lo must be >= -tol".into()));
        }
        if self.sigma_hi <= self.sigma_lo {
            return Err(Error::Config("sigma_hi must exceed sigma_lo".into()));
        }
        if self.step.is_negative() || self.step.is_zero() {
            return Err(Error::Config("scan step must be positive".into()));
        }
        if self.tol.is_negative() || self.tol.is_zero() {
            return Err(Error::Config("tol must be positive".into()));
        }
        if self.interior_r == 0 || self.oversample == 0 {
            return Err(Error::Config("interior_r and oversample must be positive".into()));
        }
        Ok(())
    }
}

/// Assembled collocation system for one domain and truncation.
#[derive(Clone, Debug)]
pub struct SteklovSystem {
    spec: BasisSpec,
    sampling: BoundarySampling,
    interior: Vec<BigComplex>,
    a: DenseMatrix,
    b: DenseMatrix,
    c: DenseMatrix,
    scales: Vec<BigReal>,
    reducer: PencilReducer,
    aa: DenseMatrix,
    ab: DenseMatrix,
    bb: DenseMatrix,
}

/// `A`, `B` on the samples and `C` on the interior points.
pub fn assemble_steklov(
    spec: &BasisSpec,
    samples: &[BoundarySample],
    interior: &[BigComplex],
) -> Result<(DenseMatrix, DenseMatrix, DenseMatrix)> {
    for z in interior {
        if !spec.domain().contains(z) {
            return Err(Error::PointOutsideDomain);
        }
    }
    let (b, a) = spec.boundary_matrices(samples, true)?;
    let c = spec.value_matrix(interior)?;
    Ok((a.expect("normals requested"), b, c))
}

/// One refined local minimizer of `s(σ)`.
#[derive(Clone, Debug, Serialize)]
pub struct SteklovCandidate {
    pub sigma: BigReal,
    pub s_value: BigReal,
    /// Second smallest reduced eigenvalue at `sigma`.
    pub second_s: BigReal,
    /// `‖∂n u − σu‖` on the doubled sample set, `‖u‖ = 1`.
    pub residual_l2: BigReal,
    /// The same on the fitting samples.
    pub residual_coarse: BigReal,
    pub bracket: (BigReal, BigReal),
    pub multiplicity: usize,
    /// Another candidate lies within `10·tol`.
    pub near_degenerate: bool,
    /// Coefficients of the unscaled basis, boundary-L² normalized.
    #[serde(skip)]
    pub coefficients: Vec<BigReal>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SteklovReport {
    pub bits: u32,
    pub k_max: usize,
    pub m: usize,
    pub samples: usize,
    pub config: SteklovConfig,
    pub candidates: Vec<SteklovCandidate>,
    /// Candidates repeated by multiplicity, ascending.
    pub eigenvalues: Vec<BigReal>,
    pub diagnostics: Vec<String>,
}

impl SteklovSystem {
    pub fn new(domain: &Domain, cfg: &SteklovConfig) -> Result<Self> {
        cfg.validate()?;
        let spec = BasisSpec::new(domain.clone(), cfg.k_max)?;
        let sampling = BoundarySampling::proportional(domain, cfg.oversample * spec.m())?;
        let samples = sampling.sample(domain)?;
        let interior = domain.random_interior_points(cfg.interior_r, cfg.seed)?;
        let (mut a, mut b, mut c) = assemble_steklov(&spec, &samples, &interior)?;
        let ctx = spec.ctx();
        let scales = if cfg.scale_columns {
            column_scales(&b)
        } else {
            vec![ctx.one(); spec.m()]
        };
        if cfg.scale_columns {
            a.scale_columns(&scales);
            b.scale_columns(&scales);
            c.scale_columns(&scales);
        }
        let reducer = PencilReducer::new(&c)?;
        let ab = a.cross_gram(&b)?;
        let sym = ab.add_scaled(&ab.transpose(), &ctx.one())?;
        Ok(SteklovSystem {
            aa: reducer.rotate(&a.gram())?,
            ab: reducer.rotate(&sym)?,
            bb: reducer.rotate(&b.gram())?,
            spec,
            sampling,
            interior,
            a,
            b,
            c,
            scales,
            reducer,
        })
    }

    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    pub fn interior(&self) -> &[BigComplex] {
        &self.interior
    }

    /// Scaled `A`, `B`, `C`.
    pub fn matrices(&self) -> (&DenseMatrix, &DenseMatrix, &DenseMatrix) {
        (&self.a, &self.b, &self.c)
    }

    pub fn samples(&self) -> Result<Vec<BoundarySample>> {
        self.sampling.sample(self.spec.domain())
    }

    /// Retries at `σ ± 2^{-bits/4}` when the kernel block is numerically
    /// singular.
    fn pair_at(&self, sigma: &BigReal, want_second: bool) -> Result<GenPair> {
        match self.pair_at_exact(sigma, want_second) {
            Err(Error::IndefiniteReduction) | Err(Error::NotPositiveDefinite(_)) => {
                let ctx = self.spec.ctx();
                let delta = ctx.pow2(-(ctx.bits() as i32) / 4);
                self.pair_at_exact(&(sigma + &delta), want_second)
                    .or_else(|_| self.pair_at_exact(&(sigma - &delta), want_second))
            }
            other => other,
        }
    }

    fn pair_at_exact(&self, sigma: &BigReal, want_second: bool) -> Result<GenPair> {
        let d = self.aa.add_scaled(&self.ab, &-sigma.clone())?.add_scaled(&self.bb, &sigma.sqr())?;
        self.reducer.solve_rotated(&d, want_second)
    }

    /// `s(σ)` and the minimizing coefficients of the unscaled basis.
    pub fn s_of_sigma(&self, sigma: &BigReal) -> Result<(BigReal, Vec<BigReal>)> {
        let gp = self.pair_at(sigma, false)?;
        Ok((gp.s, unscale(&gp.x, &self.scales)))
    }

    fn s_only(&self, sigma: &BigReal) -> Result<BigReal> {
        Ok(self.pair_at(sigma, false)?.s)
    }

    /// Golden-section search for the minimizer of `s` on `(lo, hi)`.
    pub fn golden_section(&self, lo: &BigReal, hi: &BigReal, tol: &BigReal) -> Result<BigReal> {
        let ctx = self.spec.ctx();
        let invphi = (ctx.int(5).sqrt()? - ctx.one()).mul_2exp(-1);
        let mut a = lo.clone();
        let mut b = hi.clone();
        let mut c = &b - &(&(&b - &a) * &invphi);
        let mut d = &a + &(&(&b - &a) * &invphi);
        let mut fc = self.s_only(&c)?;
        let mut fd = self.s_only(&d)?;
        while &b - &a > *tol {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = &b - &(&(&b - &a) * &invphi);
                fc = self.s_only(&c)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = &a + &(&(&b - &a) * &invphi);
                fd = self.s_only(&d)?;
            }
        }
        Ok((&a + &b).mul_2exp(-1))
    }

    /// Evaluates, normalizes and certifies the candidate at `sigma`.
    pub fn candidate(
        &self,
        sigma: &BigReal,
        bracket: (BigReal, BigReal),
        threshold: &BigReal,
    ) -> Result<SteklovCandidate> {
        let gp = self.pair_at(sigma, true)?;
        let coeffs = unscale(&gp.x, &self.scales);
        let (norm_fine, res_fine, norm_coarse, res_coarse) = self.boundary_norms(sigma, &coeffs)?;
        if norm_fine.is_zero() || norm_coarse.is_zero() {
            return Err(Error::DegenerateCandidate(format!(
                "eigenfunction vanishes on the boundary at sigma = {}",
                sigma.to_decimal_digits(20)
            )));
        }
        let inv = norm_fine.sqrt()?.recip()?;
        let second = gp.second.unwrap_or_else(|| self.spec.ctx().zero());
        Ok(SteklovCandidate {
            sigma: sigma.clone(),
            s_value: gp.s,
            multiplicity: if second <= *threshold { 2 } else { 1 },
            second_s: second,
            residual_l2: (res_fine / &norm_fine).sqrt()?,
            residual_coarse: (res_coarse / &norm_coarse).sqrt()?,
            bracket,
            near_degenerate: false,
            coefficients: coeffs.iter().map(|x| x * &inv).collect(),
        })
    }

    /// Trapezoid `‖u‖²`, `‖∂n u − σu‖²` on the doubled samples, then on
    /// every other one.
    fn boundary_norms(&self, sigma: &BigReal, v: &[BigReal]) -> Result<(BigReal, BigReal, BigReal, BigReal)> {
        let ctx = self.spec.ctx();
        let fine = self.sampling.doubled().sample(self.spec.domain())?;
        let (mut nf, mut rf, mut nc, mut rc) = (ctx.zero(), ctx.zero(), ctx.zero(), ctx.zero());
        let mut k = 0;
        for (i, s) in fine.iter().enumerate() {
            if i > 0 && fine[i - 1].hole != s.hole {
                k = 0;
            }
            let row = self.spec.row(&s.point, Some(&s.normal))?;
            let u = dot(&row.values, v);
            let dn = dot(row.normals.as_ref().expect("normals requested"), v);
            let f = dn - &(sigma * &u);
            let wu = &s.weight * &u.sqr();
            let wf = &s.weight * &f.sqr();
            if k % 2 == 0 {
                // coarse weights are twice the fine ones
                nc += &wu.mul_2exp(1);
                rc += &wf.mul_2exp(1);
            }
            nf += &wu;
            rf += &wf;
            k += 1;
        }
        Ok((nf, rf, nc, rc))
    }

    /// Values of `s` on the scan grid `lo, lo + Δ, …` up to `hi`.
    pub fn scan(&self, cfg: &SteklovConfig) -> Result<Vec<(BigReal, BigReal)>> {
        let n = ((&cfg.sigma_hi - &cfg.sigma_lo) / &cfg.step).to_f64().ceil() as i64;
        let mut out = Vec::with_capacity(n as usize + 1);
        for i in 0..=n {
            let sigma = &cfg.sigma_lo + &(&cfg.step * &self.spec.ctx().int(i));
            let s = self.s_only(&sigma)?;
            out.push((sigma, s));
        }
        Ok(out)
    }

    /// Scan, bracket every strict local minimum, refine by golden section.
    pub fn scan_and_refine(&self, cfg: &SteklovConfig) -> Result<SteklovReport> {
        cfg.validate()?;
        let grid = self.scan(cfg)?;
        let mut brackets = Vec::new();
        let mut diagnostics = Vec::new();
        let n = grid.len();
        for i in 1..n.saturating_sub(1) {
            if grid[i - 1].1 > grid[i].1 && grid[i].1 < grid[i + 1].1 {
                brackets.push((grid[i - 1].0.clone(), grid[i + 1].0.clone()));
            }
        }
        // endpoint minima: look one step outside the range
        if n >= 2 && grid[0].1 < grid[1].1 {
            let outside = &grid[0].0 - &cfg.step;
            if self.s_only(&outside)? > grid[0].1 {
                brackets.insert(0, (outside, grid[1].0.clone()));
            }
        }
        if n >= 2 && grid[n - 1].1 < grid[n - 2].1 {
            let outside = &grid[n - 1].0 + &cfg.step;
            if self.s_only(&outside)? > grid[n - 1].1 {
                brackets.push((grid[n - 2].0.clone(), outside));
            }
        }
        if brackets.is_empty() {
            diagnostics.push("no local minimum of s(sigma) on the scan grid".to_string());
        }
        let mut candidates = Vec::with_capacity(brackets.len());
        for (lo, hi) in brackets {
            let sigma = self.golden_section(&lo, &hi, &cfg.tol)?;
            match self.candidate(&sigma, (lo, hi), &cfg.multiplicity_threshold) {
                Ok(c) => candidates.push(c),
                Err(e) => diagnostics.push(format!("candidate near {}: {e}", sigma.to_decimal_digits(20))),
            }
        }
        candidates.sort_by(|x, y| x.sigma.total_cmp(&y.sigma));
        let close = cfg.tol.clone() * 10;
        for i in 1..candidates.len() {
            if &candidates[i].sigma - &candidates[i - 1].sigma < close {
                candidates[i].near_degenerate = true;
                candidates[i - 1].near_degenerate = true;
            }
        }
        let eigenvalues = candidates
            .iter()
            .flat_map(|c| std::iter::repeat_n(c.sigma.clone(), c.multiplicity))
            .collect();
        Ok(SteklovReport {
            bits: self.spec.ctx().bits(),
            k_max: self.spec.k_max(),
            m: self.spec.m(),
            samples: self.sampling.total(),
            config: cfg.clone(),
            candidates,
            eigenvalues,
            diagnostics,
        })
    }

    /// `x,y,u` CSV of a candidate's eigenfunction.
    pub fn eigenfunction_csv(&self, cand: &SteklovCandidate, grid_n: usize) -> Result<String> {
        export::field_csv(self.spec.domain(), grid_n, |z| self.spec.evaluate(&cand.coefficients, z))
    }

    /// `‖f_ε‖` for a candidate on an arbitrary sample set.
    pub fn residual_on(&self, cand: &SteklovCandidate, samples: &[BoundarySample]) -> Result<BigReal> {
        let ctx = self.spec.ctx();
        let (mut nu, mut nf) = (ctx.zero(), ctx.zero());
        for s in samples {
            let (u, dn) = self.spec.evaluate_with_normal(&cand.coefficients, s)?;
            let f = dn - &(&cand.sigma * &u);
            nu += &(&s.weight * &u.sqr());
            nf += &(&s.weight * &f.sqr());
        }
        if nu.is_zero() {
            return Err(Error::DegenerateCandidate("zero boundary norm".into()));
        }
        (nf / &nu).sqrt()
    }
}
