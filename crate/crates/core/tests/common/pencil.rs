//! Brute-force oracle for the smallest generalized eigenpair of `(D, CᵗC)`.
//!
//! Route: eigen-decompose `G = CᵗC` by cyclic Jacobi, split range/kernel by
//! eigenvalue size, eliminate the kernel block by Gaussian elimination, then
//! take the smallest eigenvalue of `Λ^{-1/2} S Λ^{-1/2}` by Jacobi again. No
//! QR and no Cholesky, unlike the library.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use torus_harmonic::arbprec::{BigReal, PrecisionContext};
use torus_harmonic::linalg::DenseMatrix;

pub type Mat = Vec<Vec<BigReal>>;

pub fn to_mat(m: &DenseMatrix) -> Mat {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn zeros(c: PrecisionContext, r: usize, k: usize) -> Mat {
    vec![vec![c.zero(); k]; r]
}

fn mul(a: &Mat, b: &Mat) -> Mat {
    let c = a[0][0].ctx();
    let mut out = zeros(c, a.len(), b[0].len());
    for i in 0..a.len() {
        for k in 0..b.len() {
            for j in 0..b[0].len() {
                let t = &a[i][k] * &b[k][j];
                out[i][j] += &t;
            }
        }
    }
    out
}

fn transpose(a: &Mat) -> Mat {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Cyclic Jacobi: ascending eigenvalues and eigenvectors as columns.
pub fn jacobi(a: &Mat) -> (Vec<BigReal>, Mat) {
    let n = a.len();
    let c = a[0][0].ctx();
    let mut a = a.clone();
    let mut v = zeros(c, n, n);
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = c.one();
    }
    for _ in 0..100 {
        let mut off = c.zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += &a[i][j].sqr();
                }
            }
        }
        let norm: BigReal = a.iter().flatten().fold(c.zero(), |s, x| s + &x.sqr());
        if off <= c.tol(8).sqr() * &norm {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].is_zero() {
                    continue;
                }
                let phi = (&a[q][q] - &a[p][p]) / &a[p][q].mul_2exp(1);
                let t = {
                    let t = (phi.abs() + &(phi.sqr() + c.one()).sqrt().unwrap()).recip().unwrap();
                    if phi.is_negative() {
                        -t
                    } else {
                        t
                    }
                };
                let cs = (t.sqr() + c.one()).sqrt().unwrap().recip().unwrap();
                let sn = &t * &cs;
                for row in a.iter_mut() {
                    let (x, y) = (row[p].clone(), row[q].clone());
                    row[p] = &(&cs * &x) - &(&sn * &y);
                    row[q] = &(&sn * &x) + &(&cs * &y);
                }
                for k in 0..n {
                    let (x, y) = (a[p][k].clone(), a[q][k].clone());
                    a[p][k] = &(&cs * &x) - &(&sn * &y);
                    a[q][k] = &(&sn * &x) + &(&cs * &y);
                }
                for row in v.iter_mut() {
                    let (x, y) = (row[p].clone(), row[q].clone());
                    row[p] = &(&cs * &x) - &(&sn * &y);
                    row[q] = &(&sn * &x) + &(&cs * &y);
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let vals = idx.iter().map(|&i| a[i][i].clone()).collect();
    let vecs = (0..n).map(|r| idx.iter().map(|&i| v[r][i].clone()).collect()).collect();
    (vals, vecs)
}

/// Solves `a X = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut a = a.clone();
    let mut b = b.clone();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = &a[i][k] / &a[k][k];
            for j in k..n {
                let t = &f * &a[k][j];
                a[i][j] -= &t;
            }
            for j in 0..b[0].len() {
                let t = &f * &b[k][j];
                b[i][j] -= &t;
            }
        }
    }
    let c = a[0][0].ctx();
    let mut x = zeros(c, n, b[0].len());
    for j in 0..b[0].len() {
        for i in (0..n).rev() {
            let mut s = b[i][j].clone();
            for k in i + 1..n {
                s -= &(&a[i][k] * &x[k][j]);
            }
            x[i][j] = s / &a[i][i];
        }
    }
    x
}

/// The two smallest generalized eigenvalues of `(D, CᵗC)` restricted to
/// `Cx ≠ 0`.
pub fn oracle_smallest(d: &DenseMatrix, cm: &DenseMatrix) -> (BigReal, BigReal) {
    let c = d.ctx();
    let g = to_mat(&cm.gram());
    let (lam, v) = jacobi(&g);
    let lmax = lam.last().unwrap().abs();
    let cut = c.pow2(-(c.bits() as i32) / 2) * &lmax;
    let range: Vec<usize> = (0..lam.len()).filter(|&i| lam[i] > cut).collect();
    let kernel: Vec<usize> = (0..lam.len()).filter(|&i| lam[i] <= cut).collect();
    let dp = mul(&mul(&transpose(&v), &to_mat(d)), &v);
    let pick = |rows: &[usize], cols: &[usize]| -> Mat {
        rows.iter().map(|&i| cols.iter().map(|&j| dp[i][j].clone()).collect()).collect()
    };
    let d11 = pick(&range, &range);
    let s = if kernel.is_empty() {
        d11
    } else {
        let d12 = pick(&range, &kernel);
        let d22 = pick(&kernel, &kernel);
        let d21 = pick(&kernel, &range);
        let x = gauss_solve(&d22, &d21);
        let corr = mul(&d12, &x);
        d11.iter()
            .zip(&corr)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect()
    };
    let inv_sqrt: Vec<BigReal> = range.iter().map(|&i| lam[i].sqrt().unwrap().recip().unwrap()).collect();
    let h: Mat = s
        .iter()
        .enumerate()
        .map(|(i, row)| row.iter().enumerate().map(|(j, x)| &(x * &inv_sqrt[i]) * &inv_sqrt[j]).collect())
        .collect();
    let (vals, _) = jacobi(&h);
    (vals[0].clone(), vals[1].clone())
}

pub fn random_matrix(rng: &mut ChaCha8Rng, c: PrecisionContext, r: usize, k: usize) -> DenseMatrix {
    let vals: Vec<f64> = (0..r * k).map(|_| rng.random_range(-1.0..1.0)).collect();
    DenseMatrix::from_f64(c, r, k, &vals).unwrap()
}

/// `D = MᵗM` (positive definite) and a `C` with `rows` rows of which only
/// `rank` are independent.
pub fn random_pencil(
    rng: &mut ChaCha8Rng,
    c: PrecisionContext,
    m: usize,
    rows: usize,
    rank: usize,
) -> (DenseMatrix, DenseMatrix) {
    let d = random_matrix(rng, c, m + 4, m).gram();
    let base = random_matrix(rng, c, rank, m);
    let mix = random_matrix(rng, c, rows, rank);
    (d, mix.matmul(&base).unwrap())
}
