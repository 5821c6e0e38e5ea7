//! The truncated harmonic basis on a torus with holes.
//!
//! Layout of the `m = 1 + 2b(k_max + 2) + (b − 1)` slots:
//! `[C; per hole j: Re ζ̂, Im ζ̂, Re ℘, Im ℘, …, Re ℘^{(k_max)}, Im ℘^{(k_max)};
//! log|σ̂(z − a_j)| − log|σ̂(z − a_b)| for j < b]`, every function taken at
//! `z − a_j`. Writing the log slots as differences against the last hole builds
//! `Σ c_j = 0` into the parametrization.

use serde::Serialize;

use crate::arbprec::{BigComplex, BigReal, PrecisionContext};
use crate::elliptic::{EllipticEvaluator, PointEval};
use crate::error::{Error, Result};
use crate::geometry::{BoundarySample, Domain};
use crate::linalg::DenseMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Constant,
    /// `Re ζ̂` (`imag = false`) or `Im ζ̂` about hole `hole`.
    ZetaHat { hole: usize, imag: bool },
    /// `Re ℘^{(k)}` or `Im ℘^{(k)}` about hole `hole`.
    Wp { hole: usize, k: usize, imag: bool },
    /// `log|σ̂(z − a_hole)| − log|σ̂(z − a_b)|`.
    Log { hole: usize },
}

#[derive(Clone, Debug)]
pub struct BasisSpec {
    domain: Domain,
    evaluator: EllipticEvaluator,
    k_max: usize,
    m: usize,
}

/// Named coefficients with the eliminated `c_b` restored.
#[derive(Clone, Debug, Serialize)]
pub struct Coefficients {
    pub constant: BigReal,
    pub holes: Vec<HoleCoefficients>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HoleCoefficients {
    /// `(a_{j,−1}, b_{j,−1})`, the ζ̂ pair.
    pub zeta: (BigReal, BigReal),
    /// `(a_{j,k}, b_{j,k})` for `k = 0..=k_max`.
    pub wp: Vec<(BigReal, BigReal)>,
    /// `c_j`.
    pub log: BigReal,
}

/// Basis values (and optionally normal derivatives) at one point.
pub struct Row {
    pub values: Vec<BigReal>,
    pub normals: Option<Vec<BigReal>>,
}

impl BasisSpec {
    pub fn new(domain: Domain, k_max: usize) -> Result<Self> {
        let evaluator = EllipticEvaluator::new(domain.lattice_arc().clone());
        let b = domain.hole_count();
        let m = 1 + 2 * b * (k_max + 2) + (b - 1);
        // normal derivatives need one order more than the values
        if k_max + 1 > crate::elliptic::DEFAULT_K_CAP {
            return Err(Error::Domain(format!(
                "k_max = {k_max} exceeds the derivative cap {}",
                crate::elliptic::DEFAULT_K_CAP - 1
            )));
        }
        Ok(BasisSpec {
            domain,
            evaluator,
            k_max,
            m,
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn evaluator(&self) -> &EllipticEvaluator {
        &self.evaluator
    }

    pub fn ctx(&self) -> PrecisionContext {
        self.domain.lattice().ctx()
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Number of basis functions.
    pub fn m(&self) -> usize {
        self.m
    }

    fn block(&self) -> usize {
        2 * (self.k_max + 2)
    }

    pub fn slot(&self, i: usize) -> Result<Slot> {
        if i >= self.m {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.m,
            });
        }
        if i == 0 {
            return Ok(Slot::Constant);
        }
        let b = self.domain.hole_count();
        let r = i - 1;
        if r < b * self.block() {
            let hole = r / self.block();
            let off = r % self.block();
            let imag = off % 2 == 1;
            return Ok(if off < 2 {
                Slot::ZetaHat { hole, imag }
            } else {
                Slot::Wp {
                    hole,
                    k: off / 2 - 1,
                    imag,
                }
            });
        }
        Ok(Slot::Log {
            hole: r - b * self.block(),
        })
    }

    pub fn index(&self, slot: Slot) -> Result<usize> {
        let b = self.domain.hole_count();
        let i = match slot {
            Slot::Constant => 0,
            Slot::ZetaHat { hole, imag } if hole < b => 1 + hole * self.block() + imag as usize,
            Slot::Wp { hole, k, imag } if hole < b && k <= self.k_max => {
                1 + hole * self.block() + 2 * (k + 1) + imag as usize
            }
            Slot::Log { hole } if hole + 1 < b => 1 + b * self.block() + hole,
            _ => {
                return Err(Error::Domain(format!("slot {slot:?} does not exist in this basis")));
            }
        };
        Ok(i)
    }

    /// All basis values at `z`, and normal derivatives along `normal` if
    /// given. Only the pole guard is enforced; membership is the caller's
    /// business.
    pub fn row(&self, z: &BigComplex, normal: Option<&BigComplex>) -> Result<Row> {
        let ctx = self.ctx();
        let l = self.domain.lattice();
        let b = self.domain.hole_count();
        let order = self.k_max + normal.is_some() as usize;
        let mut values = Vec::with_capacity(self.m);
        let mut normals = normal.map(|_| Vec::with_capacity(self.m));
        values.push(ctx.one());
        if let Some(nv) = normals.as_mut() {
            nv.push(ctx.zero());
        }
        let pa = l.pi() / &l.area;
        let mut logs = Vec::with_capacity(b);
        for hole in self.domain.holes() {
            let w = z - &hole.center;
            let pe: PointEval = self.evaluator.point(&w, order)?;
            values.push(pe.zeta_hat.re.clone());
            values.push(pe.zeta_hat.im.clone());
            for d in &pe.derivs[..=self.k_max] {
                values.push(d.re.clone());
                values.push(d.im.clone());
            }
            let mut log_n = None;
            if let (Some(n), Some(nv)) = (normal, normals.as_mut()) {
                // ζ̂ = ζ − γ2 w − (π/A) w̄: the analytic part differentiates to
                // −℘ − γ2, the conjugate part contributes ∓(π/A) n1,2.
                let f = &(-&(n * &pe.derivs[0])) - &(n * &l.gamma2);
                nv.push(&f.re - &(&pa * &n.re));
                nv.push(&f.im + &(&pa * &n.im));
                for d in &pe.derivs[1..=self.k_max + 1] {
                    let nd = n * d;
                    nv.push(nd.re);
                    nv.push(nd.im);
                }
                // grad log|σ̂| = conj(ζ̂)
                log_n = Some((n * &pe.zeta_hat).re);
            }
            logs.push((pe.log_abs_sigma_hat, log_n));
        }
        if b > 1 {
            let (last_v, last_n) = &logs[b - 1];
            for (v, dn) in &logs[..b - 1] {
                values.push(v - last_v);
                if let (Some(nv), Some(dn), Some(last_n)) = (normals.as_mut(), dn, last_n) {
                    nv.push(dn - last_n);
                }
            }
        }
        debug_assert_eq!(values.len(), self.m);
        Ok(Row { values, normals })
    }

    /// `φ_i(z)` for `z` in the closure of Ω.
    pub fn basis_eval(&self, i: usize, z: &BigComplex) -> Result<BigReal> {
        self.slot(i)?;
        if !self.domain.in_closure(z) {
            return Err(Error::PointOutsideDomain);
        }
        Ok(self.row(z, None)?.values.swap_remove(i))
    }

    /// `∂φ_i/∂n` at a boundary sample, `n` pointing out of Ω.
    pub fn basis_normal_deriv(&self, i: usize, sample: &BoundarySample) -> Result<BigReal> {
        self.slot(i)?;
        if !self.domain.in_closure(&sample.point) {
            return Err(Error::PointOutsideDomain);
        }
        let row = self.row(&sample.point, Some(&sample.normal))?;
        Ok(row.normals.expect("normals requested").swap_remove(i))
    }

    /// Boundary-value matrix `B` and, if requested, normal-derivative matrix
    /// `A`, one row per sample.
    pub fn boundary_matrices(
        &self,
        samples: &[BoundarySample],
        normals: bool,
    ) -> Result<(DenseMatrix, Option<DenseMatrix>)> {
        let ctx = self.ctx();
        let mut bm = DenseMatrix::zeros(samples.len(), self.m, ctx);
        let mut am = normals.then(|| DenseMatrix::zeros(samples.len(), self.m, ctx));
        for (r, s) in samples.iter().enumerate() {
            let row = self.row(&s.point, normals.then_some(&s.normal))?;
            bm.set_row(r, row.values);
            if let (Some(am), Some(n)) = (am.as_mut(), row.normals) {
                am.set_row(r, n);
            }
        }
        Ok((bm, am))
    }

    /// Interior-value matrix `C`, one row per point.
    pub fn value_matrix(&self, points: &[BigComplex]) -> Result<DenseMatrix> {
        let mut cm = DenseMatrix::zeros(points.len(), self.m, self.ctx());
        for (r, z) in points.iter().enumerate() {
            cm.set_row(r, self.row(z, None)?.values);
        }
        Ok(cm)
    }

    /// `u(z) = Σ v_i φ_i(z)`.
    pub fn evaluate(&self, v: &[BigReal], z: &BigComplex) -> Result<BigReal> {
        self.check_len(v)?;
        let row = self.row(z, None)?;
        Ok(dot(&row.values, v))
    }

    /// `(u(p), ∂u/∂n(p))` at a boundary sample.
    pub fn evaluate_with_normal(&self, v: &[BigReal], s: &BoundarySample) -> Result<(BigReal, BigReal)> {
        self.check_len(v)?;
        let row = self.row(&s.point, Some(&s.normal))?;
        let n = row.normals.expect("normals requested");
        Ok((dot(&row.values, v), dot(&n, v)))
    }

    fn check_len(&self, v: &[BigReal]) -> Result<()> {
        if v.len() != self.m {
            return Err(Error::LengthMismatch {
                expected: self.m,
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Names every coefficient and restores `c_b = −Σ_{j<b} c_j`.
    pub fn expand_coefficients(&self, v: &[BigReal]) -> Result<Coefficients> {
        self.check_len(v)?;
        let ctx = self.ctx();
        let b = self.domain.hole_count();
        let mut holes = Vec::with_capacity(b);
        for j in 0..b {
            let base = 1 + j * self.block();
            let wp = (0..=self.k_max)
                .map(|k| (v[base + 2 * k + 2].clone(), v[base + 2 * k + 3].clone()))
                .collect();
            holes.push(HoleCoefficients {
                zeta: (v[base].clone(), v[base + 1].clone()),
                wp,
                log: ctx.zero(),
            });
        }
        let log_base = 1 + b * self.block();
        let mut sum = ctx.zero();
        for j in 0..b - 1 {
            holes[j].log = v[log_base + j].clone();
            sum += &v[log_base + j];
        }
        holes[b - 1].log = -sum;
        Ok(Coefficients {
            constant: v[0].clone(),
            holes,
        })
    }
}

pub(crate) fn dot(a: &[BigReal], b: &[BigReal]) -> BigReal {
    let ctx = a.first().map(BigReal::ctx).unwrap_or_else(|| b[0].ctx());
    let mut acc = ctx.zero();
    for (x, y) in a.iter().zip(b) {
        acc += &(x * y);
    }
    acc
}

/// Per-column scale factors `max_ℓ |M_{ℓ,i}|` (1 for all-zero columns).
pub fn column_scales(m: &DenseMatrix) -> Vec<BigReal> {
    let ctx = m.ctx();
    let mut out = vec![ctx.zero(); m.cols()];
    for r in 0..m.rows() {
        for (s, x) in out.iter_mut().zip(m.row(r)) {
            if x.abs() > *s {
                *s = x.abs();
            }
        }
    }
    for s in &mut out {
        if s.is_zero() {
            *s = ctx.one();
        }
    }
    out
}

/// Converts coefficients of the scaled basis `φ_i / s_i` back to the
/// unscaled layout.
pub fn unscale(x: &[BigReal], scales: &[BigReal]) -> Vec<BigReal> {
    x.iter().zip(scales).map(|(xi, si)| xi / si).collect()
}
