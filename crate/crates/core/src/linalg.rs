//! Dense linear algebra over [`BigReal`].
//!
//! Everything is plain textbook material (Householder QR with column
//! pivoting, Cholesky, Householder tridiagonalization with Sturm bisection,
//! one-sided Jacobi SVD) written against MPFR floats. Inner loops work on the
//! raw floats with a scratch product to avoid allocation.

use rug::{Assign, Float};

use crate::arbprec::{BigReal, PrecisionContext};
use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigReal>,
    ctx: PrecisionContext,
}

#[inline]
fn acc_mul(acc: &mut Float, a: &Float, b: &Float, tmp: &mut Float) {
    tmp.assign(a * b);
    *acc += &*tmp;
}

#[inline]
fn sub_mul(acc: &mut Float, a: &Float, b: &Float, tmp: &mut Float) {
    tmp.assign(a * b);
    *acc -= &*tmp;
}

fn dot_raw(a: &[BigReal], b: &[BigReal], ctx: PrecisionContext) -> BigReal {
    let mut acc = ctx.zero();
    let mut tmp = ctx.zero();
    for (x, y) in a.iter().zip(b) {
        acc_mul(&mut acc.0, &x.0, &y.0, &mut tmp.0);
    }
    acc
}

fn norm2(a: &[BigReal], ctx: PrecisionContext) -> BigReal {
    dot_raw(a, a, ctx).sqrt().expect("sum of squares is non-negative")
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize, ctx: PrecisionContext) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![ctx.zero(); rows * cols],
            ctx,
        }
    }

    pub fn identity(n: usize, ctx: PrecisionContext) -> Self {
        let mut m = DenseMatrix::zeros(n, n, ctx);
        for i in 0..n {
            m.set(i, i, ctx.one());
        }
        m
    }

    pub fn from_rows(ctx: PrecisionContext, rows: Vec<Vec<BigReal>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::LengthMismatch {
                    expected: c,
                    found: row.len(),
                });
            }
            for x in &row {
                ctx.check(x)?;
            }
            data.extend(row);
        }
        Ok(DenseMatrix {
            rows: r,
            cols: c,
            data,
            ctx,
        })
    }

    /// Row-major `f64` entries, converted exactly.
    pub fn from_f64(ctx: PrecisionContext, rows: usize, cols: usize, vals: &[f64]) -> Result<Self> {
        if vals.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                found: vals.len(),
            });
        }
        Ok(DenseMatrix {
            rows,
            cols,
            data: vals.iter().map(|&v| ctx.from_f64(v)).collect(),
            ctx,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ctx(&self) -> PrecisionContext {
        self.ctx
    }

    pub fn get(&self, i: usize, j: usize) -> &BigReal {
        &self.data[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut BigReal {
        &mut self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigReal) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigReal] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn set_row(&mut self, i: usize, row: Vec<BigReal>) {
        assert_eq!(row.len(), self.cols, "row length");
        for (dst, src) in self.data[i * self.cols..(i + 1) * self.cols].iter_mut().zip(row) {
            *dst = src;
        }
    }

    pub fn column(&self, j: usize) -> Vec<BigReal> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.cols, self.rows, self.ctx);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols, self.ctx);
        let mut tmp = self.ctx.zero();
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.get(i, k).0;
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * out.cols + j;
                    acc_mul(&mut out.data[idx].0, a, &other.get(k, j).0, &mut tmp.0);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigReal]) -> Result<Vec<BigReal>> {
        if v.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows).map(|i| dot_raw(self.row(i), v, self.ctx)).collect())
    }

    /// `Mᵗ v`.
    pub fn tr_mul_vec(&self, v: &[BigReal]) -> Result<Vec<BigReal>> {
        if v.len() != self.rows {
            return Err(Error::LengthMismatch {
                expected: self.rows,
                found: v.len(),
            });
        }
        let mut out = vec![self.ctx.zero(); self.cols];
        let mut tmp = self.ctx.zero();
        for (i, vi) in v.iter().enumerate() {
            for (o, x) in out.iter_mut().zip(self.row(i)) {
                acc_mul(&mut o.0, &vi.0, &x.0, &mut tmp.0);
            }
        }
        Ok(out)
    }

    /// `Mᵗ N` for matrices with the same number of rows.
    pub fn cross_gram(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.rows != other.rows {
            return Err(Error::LengthMismatch {
                expected: self.rows,
                found: other.rows,
            });
        }
        let mut out = DenseMatrix::zeros(self.cols, other.cols, self.ctx);
        let mut tmp = self.ctx.zero();
        for r in 0..self.rows {
            let a = self.row(r);
            let b = other.row(r);
            for (i, ai) in a.iter().enumerate() {
                let base = i * other.cols;
                for (j, bj) in b.iter().enumerate() {
                    acc_mul(&mut out.data[base + j].0, &ai.0, &bj.0, &mut tmp.0);
                }
            }
        }
        Ok(out)
    }

    /// `Mᵗ M`, exactly symmetric.
    pub fn gram(&self) -> DenseMatrix {
        let n = self.cols;
        let mut out = DenseMatrix::zeros(n, n, self.ctx);
        let mut tmp = self.ctx.zero();
        for r in 0..self.rows {
            let a = self.row(r);
            for i in 0..n {
                let base = i * n;
                for j in i..n {
                    acc_mul(&mut out.data[base + j].0, &a[i].0, &a[j].0, &mut tmp.0);
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                out.data[i * n + j] = out.data[j * n + i].clone();
            }
        }
        out
    }

    /// `self + k · other`.
    pub fn add_scaled(&self, other: &DenseMatrix, k: &BigReal) -> Result<DenseMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::LengthMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        let mut out = self.clone();
        let mut tmp = self.ctx.zero();
        for (o, x) in out.data.iter_mut().zip(&other.data) {
            acc_mul(&mut o.0, &x.0, &k.0, &mut tmp.0);
        }
        Ok(out)
    }

    /// Divides column `j` by `scales[j]`.
    pub fn scale_columns(&mut self, scales: &[BigReal]) {
        assert_eq!(scales.len(), self.cols, "scale vector length");
        let inv: Vec<BigReal> = scales
            .iter()
            .map(|s| s.recip().expect("column scales are non-zero"))
            .collect();
        for r in 0..self.rows {
            for (x, s) in self.data[r * self.cols..(r + 1) * self.cols].iter_mut().zip(&inv) {
                x.0 *= &s.0;
            }
        }
    }

    /// `Δ M Δ` for diagonal `Δ = diag(d)`.
    pub fn congruence_diag(&self, d: &[BigReal]) -> DenseMatrix {
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let idx = i * self.cols + j;
                out.data[idx] = &(&out.data[idx] * &d[i]) * &d[j];
            }
        }
        out
    }

    pub fn max_abs(&self) -> BigReal {
        self.data
            .iter()
            .map(BigReal::abs)
            .fold(self.ctx.zero(), BigReal::max)
    }

    pub fn frobenius(&self) -> BigReal {
        norm2(&self.data, self.ctx)
    }

    /// Keeps the rows whose indices are listed.
    pub fn select_rows(&self, idx: &[usize]) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(idx.len(), self.cols, self.ctx);
        for (r, &i) in idx.iter().enumerate() {
            out.set_row(r, self.row(i).to_vec());
        }
        out
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(BigReal::to_f64).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeastSquaresMode {
    /// Householder QR with column pivoting.
    #[default]
    Qr,
    /// Cholesky on `MᵗM v = Mᵗ rhs`.
    NormalEquations,
}

/// Column-pivoted Householder QR of a tall matrix, kept in factored form.
struct PivotedQr {
    /// Upper triangle holds `R`; reflector tails are in `vs`.
    r: DenseMatrix,
    vs: Vec<Vec<BigReal>>,
    betas: Vec<BigReal>,
    perm: Vec<usize>,
    rank: usize,
}

/// Factorizes `m` (consumed) with column pivoting. Stops at the first
/// column whose pivot falls below `2^{-bits/2}·|R_00|`; `rank` records how
/// many columns were completed.
fn pivoted_qr(mut m: DenseMatrix, stop_early: bool) -> PivotedQr {
    let ctx = m.ctx;
    let (rows, cols) = (m.rows, m.cols);
    let steps = rows.min(cols);
    let mut perm: Vec<usize> = (0..cols).collect();
    let mut tmp = ctx.zero();

    let mut norms: Vec<BigReal> = vec![ctx.zero(); cols];
    for r in 0..rows {
        for (n, x) in norms.iter_mut().zip(m.row(r)) {
            acc_mul(&mut n.0, &x.0, &x.0, &mut tmp.0);
        }
    }
    let mut ref_norms = norms.clone();
    let recompute_tol = ctx.pow2(-(ctx.bits() as i32) / 4);
    let rank_tol = ctx.pow2(-(ctx.bits() as i32) / 2);

    let mut vs = Vec::with_capacity(steps);
    let mut betas = Vec::with_capacity(steps);
    let mut r00: Option<BigReal> = None;
    let mut rank = steps;

    for k in 0..steps {
        // pivot: largest remaining column norm
        let mut p = k;
        for j in k + 1..cols {
            if norms[j] > norms[p] {
                p = j;
            }
        }
        if p != k {
            for r in 0..rows {
                m.data.swap(r * cols + k, r * cols + p);
            }
            norms.swap(k, p);
            ref_norms.swap(k, p);
            perm.swap(k, p);
        }

        let x: Vec<BigReal> = (k..rows).map(|i| m.get(i, k).clone()).collect();
        let xnorm = norm2(&x, ctx);
        let small = match &r00 {
            Some(r0) => xnorm <= rank_tol.clone() * r0,
            None => xnorm.is_zero(),
        };
        if small {
            rank = k;
            if stop_early {
                break;
            }
        }
        if xnorm.is_zero() {
            vs.push(vec![ctx.zero(); rows - k]);
            betas.push(ctx.zero());
            continue;
        }
        let alpha = if x[0].is_negative() { xnorm.clone() } else { -xnorm.clone() };
        let mut v = x;
        v[0] -= &alpha;
        // vᵗv = 2(‖x‖² − α x0) = 2‖x‖(‖x‖ + |x0|)
        let vtv = dot_raw(&v, &v, ctx);
        let beta = (ctx.int(2) / &vtv).clone();
        if r00.is_none() {
            r00 = Some(xnorm.clone());
        }

        // apply H = I − β v vᵗ to columns k+1.. row by row
        let tail = cols - k - 1;
        if tail > 0 {
            let mut dots = vec![ctx.zero(); tail];
            for (ii, vi) in v.iter().enumerate() {
                let row = &m.data[(k + ii) * cols + k + 1..(k + ii + 1) * cols];
                for (d, x) in dots.iter_mut().zip(row) {
                    acc_mul(&mut d.0, &vi.0, &x.0, &mut tmp.0);
                }
            }
            for d in &mut dots {
                d.0 *= &beta.0;
            }
            for (ii, vi) in v.iter().enumerate() {
                let row = &mut m.data[(k + ii) * cols + k + 1..(k + ii + 1) * cols];
                for (x, d) in row.iter_mut().zip(&dots) {
                    sub_mul(&mut x.0, &vi.0, &d.0, &mut tmp.0);
                }
            }
        }
        m.set(k, k, alpha);
        for i in k + 1..rows {
            m.set(i, k, ctx.zero());
        }

        // downdate remaining column norms, recomputing when cancellation bites
        for j in k + 1..cols {
            let rkj = m.get(k, j);
            tmp.0.assign(&rkj.0 * &rkj.0);
            norms[j].0 -= &tmp.0;
            if norms[j] <= recompute_tol.clone() * &ref_norms[j] || norms[j].is_negative() {
                let mut s = ctx.zero();
                for i in k + 1..rows {
                    let x = &m.get(i, j).0;
                    acc_mul(&mut s.0, x, x, &mut tmp.0);
                }
                norms[j] = s.clone();
                ref_norms[j] = s;
            }
        }
        vs.push(v);
        betas.push(beta);
    }
    PivotedQr {
        r: m,
        vs,
        betas,
        perm,
        rank,
    }
}

impl PivotedQr {
    /// `Qᵗ b` in place.
    fn apply_qt(&self, b: &mut [BigReal]) {
        let ctx = self.r.ctx;
        let mut tmp = ctx.zero();
        for (k, (v, beta)) in self.vs.iter().zip(&self.betas).enumerate() {
            if beta.is_zero() {
                continue;
            }
            let mut d = ctx.zero();
            for (vi, bi) in v.iter().zip(&b[k..]) {
                acc_mul(&mut d.0, &vi.0, &bi.0, &mut tmp.0);
            }
            d.0 *= &beta.0;
            for (vi, bi) in v.iter().zip(&mut b[k..]) {
                sub_mul(&mut bi.0, &vi.0, &d.0, &mut tmp.0);
            }
        }
    }

    /// `Q x` in place (reflectors applied in reverse order).
    fn apply_q(&self, x: &mut [BigReal]) {
        let ctx = self.r.ctx;
        let mut tmp = ctx.zero();
        for (k, (v, beta)) in self.vs.iter().zip(&self.betas).enumerate().rev() {
            if beta.is_zero() {
                continue;
            }
            let mut d = ctx.zero();
            for (vi, xi) in v.iter().zip(&x[k..]) {
                acc_mul(&mut d.0, &vi.0, &xi.0, &mut tmp.0);
            }
            d.0 *= &beta.0;
            for (vi, xi) in v.iter().zip(&mut x[k..]) {
                sub_mul(&mut xi.0, &vi.0, &d.0, &mut tmp.0);
            }
        }
    }
}

/// Solves `R x = b` for upper-triangular leading `n×n` block of `r`.
fn back_substitute(r: &DenseMatrix, b: &[BigReal], n: usize) -> Vec<BigReal> {
    let ctx = r.ctx;
    let mut x = vec![ctx.zero(); n];
    let mut tmp = ctx.zero();
    for i in (0..n).rev() {
        let mut s = b[i].clone();
        for j in i + 1..n {
            sub_mul(&mut s.0, &r.get(i, j).0, &x[j].0, &mut tmp.0);
        }
        x[i] = s / r.get(i, i);
    }
    x
}

/// Least-squares solution of `M v ≈ rhs` (`rows >= cols`).
pub fn least_squares(m: &DenseMatrix, rhs: &[BigReal], mode: LeastSquaresMode) -> Result<Vec<BigReal>> {
    if rhs.len() != m.rows {
        return Err(Error::LengthMismatch {
            expected: m.rows,
            found: rhs.len(),
        });
    }
    if m.rows < m.cols {
        return Err(Error::Conditioning(format!(
            "least squares needs at least as many rows as columns ({} < {})",
            m.rows, m.cols
        )));
    }
    match mode {
        LeastSquaresMode::Qr => {
            let qr = pivoted_qr(m.clone(), true);
            if qr.rank < m.cols {
                return Err(Error::RankDeficient {
                    column: qr.perm[qr.rank],
                    rank: qr.rank,
                    cols: m.cols,
                });
            }
            let mut b = rhs.to_vec();
            qr.apply_qt(&mut b);
            let y = back_substitute(&qr.r, &b, m.cols);
            let mut x = vec![m.ctx.zero(); m.cols];
            for (j, yj) in y.into_iter().enumerate() {
                x[qr.perm[j]] = yj;
            }
            Ok(x)
        }
        LeastSquaresMode::NormalEquations => {
            let g = m.gram();
            let b = m.tr_mul_vec(rhs)?;
            let l = cholesky(&g).map_err(|e| match e {
                Error::NotPositiveDefinite(_) => Error::RankDeficient {
                    column: first_bad_pivot(&g),
                    rank: first_bad_pivot(&g),
                    cols: m.cols,
                },
                other => other,
            })?;
            Ok(cholesky_solve(&l, &b))
        }
    }
}

fn first_bad_pivot(g: &DenseMatrix) -> usize {
    match cholesky_partial(g) {
        Ok(_) => g.rows,
        Err(k) => k,
    }
}

/// Lower-triangular `L` with `LLᵗ = a`, or the failing pivot index.
fn cholesky_partial(a: &DenseMatrix) -> std::result::Result<DenseMatrix, usize> {
    let n = a.rows;
    let ctx = a.ctx;
    let mut l = DenseMatrix::zeros(n, n, ctx);
    let max_diag = (0..n).map(|i| a.get(i, i).abs()).fold(ctx.zero(), BigReal::max);
    let floor = ctx.pow2(-(ctx.bits() as i32) + 8) * &max_diag * &ctx.int(n.max(1) as i64);
    let mut tmp = ctx.zero();
    for j in 0..n {
        let mut d = a.get(j, j).clone();
        for x in &l.data[j * n..j * n + j] {
            sub_mul(&mut d.0, &x.0, &x.0, &mut tmp.0);
        }
        if d <= floor {
            return Err(j);
        }
        let djj = d.sqrt().expect("positive pivot");
        let inv = djj.recip().expect("positive pivot");
        let (head, tail) = l.data.split_at_mut((j + 1) * n);
        let lj = &head[j * n..j * n + j];
        for i in j + 1..n {
            let li = &mut tail[(i - j - 1) * n..(i - j) * n];
            let mut s = a.get(i, j).clone();
            for (x, y) in li[..j].iter().zip(lj) {
                sub_mul(&mut s.0, &x.0, &y.0, &mut tmp.0);
            }
            li[j] = s * &inv;
        }
        l.set(j, j, djj);
    }
    Ok(l)
}

/// Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky(a: &DenseMatrix) -> Result<DenseMatrix> {
    if a.rows != a.cols {
        return Err(Error::LengthMismatch {
            expected: a.rows,
            found: a.cols,
        });
    }
    cholesky_partial(a).map_err(|k| Error::NotPositiveDefinite(format!("pivot {k} is not positive")))
}

/// Solves `L y = b` (forward substitution).
pub fn forward_substitute(l: &DenseMatrix, b: &[BigReal]) -> Vec<BigReal> {
    let n = l.rows;
    let ctx = l.ctx;
    let mut y = vec![ctx.zero(); n];
    let mut tmp = ctx.zero();
    for i in 0..n {
        let mut s = b[i].clone();
        for k in 0..i {
            sub_mul(&mut s.0, &l.get(i, k).0, &y[k].0, &mut tmp.0);
        }
        y[i] = s / l.get(i, i);
    }
    y
}

/// Solves `Lᵗ x = y`.
pub fn backward_substitute_transposed(l: &DenseMatrix, y: &[BigReal]) -> Vec<BigReal> {
    let n = l.rows;
    let ctx = l.ctx;
    let mut x = vec![ctx.zero(); n];
    let mut tmp = ctx.zero();
    for i in (0..n).rev() {
        let mut s = y[i].clone();
        for k in i + 1..n {
            sub_mul(&mut s.0, &l.get(k, i).0, &x[k].0, &mut tmp.0);
        }
        x[i] = s / l.get(i, i);
    }
    x
}

/// Solves `L Lᵗ x = b`.
pub fn cholesky_solve(l: &DenseMatrix, b: &[BigReal]) -> Vec<BigReal> {
    backward_substitute_transposed(l, &forward_substitute(l, b))
}

/// Symmetric tridiagonal form `T = Qᵗ H Q` with `Q` kept as reflectors.
struct Tridiagonal {
    d: Vec<BigReal>,
    e: Vec<BigReal>,
    vs: Vec<Vec<BigReal>>,
    betas: Vec<BigReal>,
}

fn tridiagonalize(h: &DenseMatrix) -> Tridiagonal {
    let n = h.rows;
    let ctx = h.ctx;
    let mut a = h.clone();
    let mut tmp = ctx.zero();
    let mut vs = Vec::new();
    let mut betas = Vec::new();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<BigReal> = (k + 1..n).map(|i| a.get(i, k).clone()).collect();
        let xnorm = norm2(&x, ctx);
        if xnorm.is_zero() {
            vs.push(vec![ctx.zero(); n - k - 1]);
            betas.push(ctx.zero());
            continue;
        }
        let alpha = if x[0].is_negative() { xnorm.clone() } else { -xnorm };
        let mut v = x;
        v[0] -= &alpha;
        let beta = ctx.int(2) / &dot_raw(&v, &v, ctx);
        let sub = n - k - 1;
        // p = β A22 v
        let mut p = vec![ctx.zero(); sub];
        for (i, pi) in p.iter_mut().enumerate() {
            let row = &a.data[(k + 1 + i) * n + k + 1..(k + 2 + i) * n];
            for (x, vj) in row.iter().zip(&v) {
                acc_mul(&mut pi.0, &x.0, &vj.0, &mut tmp.0);
            }
            pi.0 *= &beta.0;
        }
        // w = p − (β/2)(pᵗv) v
        let kf = dot_raw(&p, &v, ctx) * &beta.mul_2exp(-1);
        let w: Vec<BigReal> = p.iter().zip(&v).map(|(pi, vi)| pi - &(vi * &kf)).collect();
        for i in 0..sub {
            for j in 0..sub {
                let idx = (k + 1 + i) * n + k + 1 + j;
                sub_mul(&mut a.data[idx].0, &v[i].0, &w[j].0, &mut tmp.0);
                sub_mul(&mut a.data[idx].0, &w[i].0, &v[j].0, &mut tmp.0);
            }
        }
        a.set(k + 1, k, alpha.clone());
        a.set(k, k + 1, alpha);
        for i in k + 2..n {
            a.set(i, k, ctx.zero());
            a.set(k, i, ctx.zero());
        }
        vs.push(v);
        betas.push(beta);
    }
    let d = (0..n).map(|i| a.get(i, i).clone()).collect();
    let e = (0..n.saturating_sub(1)).map(|i| a.get(i + 1, i).clone()).collect();
    Tridiagonal { d, e, vs, betas }
}

impl Tridiagonal {
    /// Number of eigenvalues strictly less than `x`.
    fn sturm_count(&self, x: &BigReal, pivmin: &BigReal) -> usize {
        let ctx = x.ctx();
        let mut count = 0;
        let mut q = &self.d[0] - x;
        let mut tmp = ctx.zero();
        for i in 0..self.d.len() {
            if i > 0 {
                let mut nq = &self.d[i] - x;
                tmp.0.assign(&self.e[i - 1].0 * &self.e[i - 1].0);
                tmp.0 /= &q.0;
                nq.0 -= &tmp.0;
                q = nq;
            }
            if q.abs() < *pivmin {
                q = -pivmin.clone();
            }
            if q.is_negative() {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (BigReal, BigReal) {
        let n = self.d.len();
        let ctx = self.d[0].ctx();
        let mut lo: Option<BigReal> = None;
        let mut hi: Option<BigReal> = None;
        for i in 0..n {
            let mut r = ctx.zero();
            if i > 0 {
                r += &self.e[i - 1].abs();
            }
            if i + 1 < n {
                r += &self.e[i].abs();
            }
            let l = &self.d[i] - &r;
            let h = &self.d[i] + &r;
            lo = Some(match lo {
                Some(x) => x.min(l),
                None => l,
            });
            hi = Some(match hi {
                Some(x) => x.max(h),
                None => h,
            });
        }
        (lo.unwrap(), hi.unwrap())
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    fn eigenvalue(&self, k: usize) -> BigReal {
        let ctx = self.d[0].ctx();
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(ctx.pow2(-(ctx.bits() as i32)));
        let pivmin = ctx.pow2(-2 * ctx.bits() as i32) * &scale;
        let abs_tol = ctx.pow2(-(ctx.bits() as i32) - 4) * &scale;
        for _ in 0..(4 * ctx.bits() + 64) {
            let mid = (&lo + &hi).mul_2exp(-1);
            if self.sturm_count(&mid, &pivmin) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            let width = &hi - &lo;
            let rel = ctx.pow2(-(ctx.bits() as i32) + 2) * &lo.abs().max(hi.abs());
            if width <= abs_tol || width <= rel {
                break;
            }
        }
        (&lo + &hi).mul_2exp(-1)
    }

    /// Eigenvector of `T` for eigenvalue `lambda` by inverse iteration.
    fn eigenvector(&self, lambda: &BigReal) -> Vec<BigReal> {
        let n = self.d.len();
        let ctx = lambda.ctx();
        if n == 1 {
            return vec![ctx.one()];
        }
        let scale = self
            .d
            .iter()
            .chain(&self.e)
            .map(BigReal::abs)
            .fold(ctx.zero(), BigReal::max)
            .max(ctx.pow2(-(ctx.bits() as i32)));
        let eps = ctx.pow2(-(ctx.bits() as i32)) * &scale;
        // LU with partial pivoting of T − λI (bands: diag, super, super2)
        let mut diag: Vec<BigReal> = self.d.iter().map(|x| x - lambda).collect();
        let mut sup: Vec<BigReal> = self.e.clone();
        sup.push(ctx.zero());
        let mut sup2 = vec![ctx.zero(); n];
        let mut sub = self.e.clone();
        let mut mult = vec![ctx.zero(); n];
        let mut swapped = vec![false; n];
        for i in 0..n - 1 {
            if sub[i].abs() > diag[i].abs() {
                // swap rows i and i+1
                swapped[i] = true;
                std::mem::swap(&mut diag[i], &mut sub[i]);
                // row i: (sub_old, diag_{i+1}, sup_{i+1}); row i+1: (diag_old, sup_old, 0)
                let new_sup = diag[i + 1].clone();
                let new_sup2 = sup[i + 1].clone();
                diag[i + 1] = sup[i].clone();
                sup[i + 1] = ctx.zero();
                sup[i] = new_sup;
                sup2[i] = new_sup2;
                // `sub[i]` now holds the old diagonal entry to eliminate
            }
            if diag[i].abs() < eps {
                diag[i] = eps.clone();
            }
            let f = &sub[i] / &diag[i];
            diag[i + 1] = &diag[i + 1] - &(&f * &sup[i]);
            if i + 2 <= n - 1 {
                sup[i + 1] = &sup[i + 1] - &(&f * &sup2[i]);
            }
            mult[i] = f;
        }
        if diag[n - 1].abs() < eps {
            diag[n - 1] = eps.clone();
        }
        let mut x: Vec<BigReal> = (0..n).map(|i| ctx.one() + ctx.ratio(i as i64 % 7, 13)).collect();
        for _ in 0..3 {
            // forward: apply the row operations
            let mut y = x.clone();
            for i in 0..n - 1 {
                if swapped[i] {
                    y.swap(i, i + 1);
                }
                let t = &mult[i] * &y[i];
                y[i + 1] -= &t;
            }
            // back substitution
            for i in (0..n).rev() {
                let mut s = y[i].clone();
                if i + 1 < n {
                    s -= &(&sup[i] * &y[i + 1]);
                }
                if i + 2 < n {
                    s -= &(&sup2[i] * &y[i + 2]);
                }
                y[i] = s / &diag[i];
            }
            let nrm = norm2(&y, ctx);
            x = y.into_iter().map(|v| v / &nrm).collect();
        }
        x
    }

    /// Maps an eigenvector of `T` to one of the original matrix.
    fn back_transform(&self, y: &mut [BigReal]) {
        let ctx = y[0].ctx();
        let mut tmp = ctx.zero();
        for (k, (v, beta)) in self.vs.iter().zip(&self.betas).enumerate().rev() {
            if beta.is_zero() {
                continue;
            }
            let seg = &mut y[k + 1..];
            let mut d = ctx.zero();
            for (vi, yi) in v.iter().zip(seg.iter()) {
                acc_mul(&mut d.0, &vi.0, &yi.0, &mut tmp.0);
            }
            d.0 *= &beta.0;
            for (vi, yi) in v.iter().zip(seg.iter_mut()) {
                sub_mul(&mut yi.0, &vi.0, &d.0, &mut tmp.0);
            }
        }
    }
}

/// The `count` smallest eigenvalues of a symmetric matrix, ascending, with a
/// unit eigenvector for the smallest.
pub fn symmetric_smallest(h: &DenseMatrix, count: usize) -> Result<(Vec<BigReal>, Vec<BigReal>)> {
    if h.rows != h.cols || h.rows == 0 {
        return Err(Error::LengthMismatch {
            expected: h.rows,
            found: h.cols,
        });
    }
    let t = tridiagonalize(h);
    let count = count.clamp(1, h.rows);
    let values: Vec<BigReal> = (0..count).map(|k| t.eigenvalue(k)).collect();
    let mut y = t.eigenvector(&values[0]);
    t.back_transform(&mut y);
    Ok((values, y))
}

/// Full eigen-decomposition of a symmetric matrix by cyclic Jacobi
/// rotations: eigenvalues ascending and the matching unit eigenvectors as
/// columns.
pub fn jacobi_eigen(h: &DenseMatrix) -> (Vec<BigReal>, DenseMatrix) {
    let n = h.rows;
    let ctx = h.ctx;
    let mut a = h.clone();
    let mut v = DenseMatrix::identity(n, ctx);
    let tol = ctx.pow2(-(ctx.bits() as i32) + 4);
    for _sweep in 0..60 {
        let mut off = ctx.zero();
        for i in 0..n {
            for j in i + 1..n {
                off += &a.get(i, j).sqr();
            }
        }
        let diag_norm = (0..n).map(|i| a.get(i, i).sqr()).fold(ctx.zero(), |s, x| s + &x);
        if off <= tol.sqr() * &diag_norm || off.is_zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a.get(p, q).clone();
                if apq.is_zero() {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / &apq.mul_2exp(1);
                let t = {
                    let r = (theta.sqr() + ctx.one()).sqrt().expect("positive");
                    let den = theta.abs() + &r;
                    let t = den.recip().expect("positive");
                    if theta.is_negative() {
                        -t
                    } else {
                        t
                    }
                };
                let c = (t.sqr() + ctx.one()).sqrt().expect("positive").recip().expect("positive");
                let s = &t * &c;
                for k in 0..n {
                    let akp = a.get(k, p).clone();
                    let akq = a.get(k, q).clone();
                    a.set(k, p, &(&c * &akp) - &(&s * &akq));
                    a.set(k, q, &(&s * &akp) + &(&c * &akq));
                }
                for k in 0..n {
                    let apk = a.get(p, k).clone();
                    let aqk = a.get(q, k).clone();
                    a.set(p, k, &(&c * &apk) - &(&s * &aqk));
                    a.set(q, k, &(&s * &apk) + &(&c * &aqk));
                }
                for k in 0..n {
                    let vkp = v.get(k, p).clone();
                    let vkq = v.get(k, q).clone();
                    v.set(k, p, &(&c * &vkp) - &(&s * &vkq));
                    v.set(k, q, &(&s * &vkp) + &(&c * &vkq));
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).total_cmp(a.get(j, j)));
    let values = order.iter().map(|&i| a.get(i, i).clone()).collect();
    let mut vecs = DenseMatrix::zeros(n, n, ctx);
    for (c, &i) in order.iter().enumerate() {
        for r in 0..n {
            vecs.set(r, c, v.get(r, i).clone());
        }
    }
    (values, vecs)
}

/// Result of a reduced generalized eigen-solve.
#[derive(Clone, Debug)]
pub struct GenPair {
    /// Smallest generalized eigenvalue `s`.
    pub s: BigReal,
    /// Second smallest, when requested.
    pub second: Option<BigReal>,
    /// Minimizer lifted to the full space, scaled so `xᵗGx = 1`.
    pub x: Vec<BigReal>,
}

/// Range/kernel split of `G = CᵗC` from a pivoted QR of `Cᵗ`, reused for
/// every `D` paired with the same `C`.
#[derive(Clone, Debug)]
pub struct PencilReducer {
    /// Orthogonal `Q` (columns `0..rank` span range `Cᵗ`).
    q: DenseMatrix,
    rank: usize,
    /// Cholesky factor of `Q1ᵗ G Q1`.
    lg: DenseMatrix,
}

impl PencilReducer {
    /// `c` is the `R×m` factor with `G = cᵗ c`.
    pub fn new(c: &DenseMatrix) -> Result<Self> {
        let ctx = c.ctx;
        let m = c.cols;
        let qr = pivoted_qr(c.transpose(), true);
        let rank = qr.rank;
        if rank == 0 {
            return Err(Error::DegeneratePencil);
        }
        let mut q = DenseMatrix::zeros(m, m, ctx);
        for j in 0..m {
            let mut e = vec![ctx.zero(); m];
            e[j] = ctx.one();
            qr.apply_q(&mut e);
            for (i, x) in e.into_iter().enumerate() {
                q.set(i, j, x);
            }
        }
        // Q1ᵗ G Q1 = R1 R1ᵗ, R1 the leading `rank` rows of R (in pivoted order)
        let rc = qr.r.cols;
        let mut g11 = DenseMatrix::zeros(rank, rank, ctx);
        let mut tmp = ctx.zero();
        for i in 0..rank {
            for j in 0..=i {
                let mut s = ctx.zero();
                for k in i.max(j)..rc {
                    acc_mul(&mut s.0, &qr.r.get(i, k).0, &qr.r.get(j, k).0, &mut tmp.0);
                }
                g11.set(i, j, s.clone());
                g11.set(j, i, s);
            }
        }
        let lg = cholesky(&g11)?;
        Ok(PencilReducer { q, rank, lg })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.q.rows
    }

    /// `Qᵗ D Q`.
    pub fn rotate(&self, d: &DenseMatrix) -> Result<DenseMatrix> {
        self.q.transpose().matmul(d)?.matmul(&self.q)
    }

    /// Smallest generalized eigenpair of `(D, G)` given `D̂ = Qᵗ D Q`.
    pub fn solve_rotated(&self, d_hat: &DenseMatrix, want_second: bool) -> Result<GenPair> {
        let ctx = d_hat.ctx;
        let m = self.dim();
        let r = self.rank;
        let k = m - r;
        let mut tmp = ctx.zero();

        // With D22 = L22 L22ᵗ and W = L22⁻¹ D21 the Schur complement is
        // S = D11 − WᵗW; the kernel part of the minimizer is −L22⁻ᵗ W y1.
        let (s_mat, lifting) = if k > 0 {
            let mut d22 = DenseMatrix::zeros(k, k, ctx);
            for i in 0..k {
                for j in 0..k {
                    d22.set(i, j, d_hat.get(r + i, r + j).clone());
                }
            }
            let l22 = cholesky(&d22).map_err(|_| Error::IndefiniteReduction)?;
            // row j of `wt` is column j of W
            let mut wt = DenseMatrix::zeros(r, k, ctx);
            for j in 0..r {
                let col: Vec<BigReal> = (0..k).map(|i| d_hat.get(r + i, j).clone()).collect();
                wt.set_row(j, forward_substitute(&l22, &col));
            }
            let mut s = DenseMatrix::zeros(r, r, ctx);
            for i in 0..r {
                for j in 0..=i {
                    let mut acc = d_hat.get(i, j).clone();
                    for (a, b) in wt.row(i).iter().zip(wt.row(j)) {
                        sub_mul(&mut acc.0, &a.0, &b.0, &mut tmp.0);
                    }
                    s.set(i, j, acc.clone());
                    s.set(j, i, acc);
                }
            }
            (s, Some((l22, wt)))
        } else {
            (d_hat.clone(), None)
        };

        // H = L⁻¹ S L⁻ᵗ
        let mut y = DenseMatrix::zeros(r, r, ctx);
        for j in 0..r {
            let col: Vec<BigReal> = (0..r).map(|i| s_mat.get(i, j).clone()).collect();
            for (i, v) in forward_substitute(&self.lg, &col).into_iter().enumerate() {
                y.set(i, j, v);
            }
        }
        let mut h = DenseMatrix::zeros(r, r, ctx);
        for i in 0..r {
            let row = y.row(i).to_vec();
            for (j, v) in forward_substitute(&self.lg, &row).into_iter().enumerate() {
                h.set(i, j, v);
            }
        }
        for i in 0..r {
            for j in 0..i {
                let avg = (h.get(i, j) + h.get(j, i)).mul_2exp(-1);
                h.set(i, j, avg.clone());
                h.set(j, i, avg);
            }
        }
        let (vals, w) = symmetric_smallest(&h, if want_second { 2 } else { 1 })?;
        let y1 = backward_substitute_transposed(&self.lg, &w);
        let mut full = y1.clone();
        if let Some((l22, wt)) = &lifting {
            let wy = wt.tr_mul_vec(&y1)?;
            let y2 = backward_substitute_transposed(l22, &wy);
            full.extend(y2.into_iter().map(|v| -v));
        }
        let lifted = self.q.mul_vec(&full)?;
        let mut vals = vals.into_iter();
        Ok(GenPair {
            s: vals.next().expect("at least one eigenvalue"),
            second: if want_second { vals.next() } else { None },
            x: lifted,
        })
    }
}

/// Smallest generalized eigenpair of `D x = s CᵗC x` over `x` with `Cx ≠ 0`.
pub fn smallest_genpair(d: &DenseMatrix, c: &DenseMatrix) -> Result<GenPair> {
    if d.rows != d.cols || d.cols != c.cols {
        return Err(Error::LengthMismatch {
            expected: c.cols,
            found: d.cols,
        });
    }
    let red = PencilReducer::new(c)?;
    red.solve_rotated(&red.rotate(d)?, true)
}

/// Singular spectrum and 2-norm condition number.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ConditionReport {
    pub cond2: BigReal,
    /// Descending.
    pub singular_values: Vec<BigReal>,
}

/// One-sided Jacobi SVD.
pub fn condition_report(m: &DenseMatrix) -> ConditionReport {
    let ctx = m.ctx;
    let a = if m.rows >= m.cols { m.clone() } else { m.transpose() };
    let n = a.cols;
    let mut cols: Vec<Vec<BigReal>> = (0..n).map(|j| a.column(j)).collect();
    let tol = ctx.pow2(-(ctx.bits() as i32) + 4);
    let mut tmp = ctx.zero();
    for _sweep in 0..80 {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let alpha = dot_raw(&cols[i], &cols[i], ctx);
                let beta = dot_raw(&cols[j], &cols[j], ctx);
                let gamma = dot_raw(&cols[i], &cols[j], ctx);
                if gamma.is_zero() || gamma.abs() <= tol.clone() * &(&alpha * &beta).sqrt().expect("non-negative") {
                    continue;
                }
                rotated = true;
                let zeta = (&beta - &alpha) / &gamma.mul_2exp(1);
                let t = {
                    let r = (zeta.sqr() + ctx.one()).sqrt().expect("positive");
                    let t = (zeta.abs() + &r).recip().expect("positive");
                    if zeta.is_negative() {
                        -t
                    } else {
                        t
                    }
                };
                let c = (t.sqr() + ctx.one()).sqrt().expect("positive").recip().expect("positive");
                let s = &c * &t;
                let (left, right) = cols.split_at_mut(j);
                for (x, y) in left[i].iter_mut().zip(right[0].iter_mut()) {
                    let xi = x.clone();
                    // x' = c x − s y, y' = s x + c y
                    x.0 *= &c.0;
                    sub_mul(&mut x.0, &s.0, &y.0, &mut tmp.0);
                    y.0 *= &c.0;
                    acc_mul(&mut y.0, &s.0, &xi.0, &mut tmp.0);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<BigReal> = cols.iter().map(|c| norm2(c, ctx)).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let smax = sv.first().cloned().unwrap_or_else(|| ctx.zero());
    let smin = sv.last().cloned().unwrap_or_else(|| ctx.zero());
    let cond2 = if smin.is_zero() {
        BigReal::from_float(Float::with_val(ctx.bits(), rug::float::Special::Infinity))
    } else {
        smax / &smin
    };
    ConditionReport {
        cond2,
        singular_values: sv,
    }
}
