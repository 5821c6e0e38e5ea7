//! Truncation sweeps: error (or residual) and conditioning against `m`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::arbprec::BigReal;
use crate::basis::BasisSpec;
use crate::error::Result;
use crate::geometry::{BoundarySampling, Domain};
use crate::laplace::{solve_laplace, BoundaryData, LaplaceOptions};
use crate::linalg::condition_report;
use crate::steklov::{SteklovConfig, SteklovSystem};

#[derive(Clone, Debug, Serialize)]
pub struct LaplaceRow {
    pub k_max: usize,
    pub m: usize,
    pub sup_error: Option<BigReal>,
    /// 2-norm condition numbers of `BᵗB` and `BᵗA` for the unscaled basis
    /// (see [`condition_numbers`]).
    pub cond_btb: Option<BigReal>,
    pub cond_bta: Option<BigReal>,
    /// Failure message when this truncation could not be solved.
    pub status: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SteklovRow {
    pub k_max: usize,
    pub m: usize,
    /// `(σ, residual)` for the first eigenvalues, repeated by multiplicity.
    pub eigen: Vec<(BigReal, BigReal)>,
    pub status: String,
}

/// Condition numbers of `BᵗB` and `BᵗA` at `S = oversample · m` samples.
///
/// The constant column has zero normal derivative, so `BᵗA` is taken over
/// the remaining columns.
pub fn condition_numbers(domain: &Domain, k_max: usize, oversample: usize) -> Result<(BigReal, BigReal)> {
    let spec = BasisSpec::new(domain.clone(), k_max)?;
    let samples = BoundarySampling::proportional(domain, oversample * spec.m())?.sample(domain)?;
    let (b, a) = spec.boundary_matrices(&samples, true)?;
    let a = a.expect("normals requested");
    let btb = condition_report(&b.gram()).cond2;
    let rest: Vec<usize> = (1..b.cols()).collect();
    let b1 = b.transpose().select_rows(&rest).transpose();
    let a1 = a.transpose().select_rows(&rest).transpose();
    let bta = condition_report(&b1.cross_gram(&a1)?).cond2;
    Ok((btb, bta))
}

/// One Laplace solve per `k_max`; failures are recorded, not propagated.
pub fn laplace_sweep(
    domain: &Domain,
    data: &BoundaryData,
    k_maxes: &[usize],
    options: LaplaceOptions,
    with_condition: bool,
) -> Vec<LaplaceRow> {
    let b = domain.hole_count();
    k_maxes
        .iter()
        .map(|&k| {
            let m = 1 + 2 * b * (k + 2) + (b - 1);
            let mut row = LaplaceRow {
                k_max: k,
                m,
                sup_error: None,
                cond_btb: None,
                cond_bta: None,
                status: "ok".into(),
            };
            match solve_laplace(domain, data, LaplaceOptions { k_max: k, ..options }) {
                Ok(sol) => row.sup_error = Some(sol.boundary_sup_error().clone()),
                Err(e) => row.status = e.to_string(),
            }
            if with_condition {
                match condition_numbers(domain, k, options.oversample) {
                    Ok((x, y)) => {
                        row.cond_btb = Some(x);
                        row.cond_bta = Some(y);
                    }
                    Err(e) if row.status == "ok" => row.status = e.to_string(),
                    Err(_) => {}
                }
            }
            row
        })
        .collect()
}

/// Scan-and-refine per `k_max`, keeping the first `count` eigenvalues.
pub fn steklov_sweep(domain: &Domain, cfg: &SteklovConfig, k_maxes: &[usize], count: usize) -> Vec<SteklovRow> {
    let b = domain.hole_count();
    k_maxes
        .iter()
        .map(|&k| {
            let m = 1 + 2 * b * (k + 2) + (b - 1);
            let cfg = SteklovConfig {
                k_max: k,
                ..cfg.clone()
            };
            let run = SteklovSystem::new(domain, &cfg).and_then(|sys| sys.scan_and_refine(&cfg));
            match run {
                Ok(report) => {
                    let eigen = report
                        .candidates
                        .iter()
                        .flat_map(|c| {
                            std::iter::repeat_n((c.sigma.clone(), c.residual_l2.clone()), c.multiplicity)
                        })
                        .take(count)
                        .collect();
                    SteklovRow {
                        k_max: k,
                        m,
                        eigen,
                        status: "ok".into(),
                    }
                }
                Err(e) => SteklovRow {
                    k_max: k,
                    m,
                    eigen: Vec::new(),
                    status: e.to_string(),
                },
            }
        })
        .collect()
}

fn opt(x: &Option<BigReal>) -> String {
    x.as_ref().map_or_else(|| "nan".to_string(), |v| format!("{:.6e}", v.to_f64()))
}

pub fn laplace_csv(rows: &[LaplaceRow]) -> String {
    let mut out = String::from("k_max,m,sup_error,cond_btb,cond_bta,status\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.k_max,
            r.m,
            opt(&r.sup_error),
            opt(&r.cond_btb),
            opt(&r.cond_bta),
            csv_field(&r.status)
        )
        .expect("writing to a String");
    }
    out
}

pub fn steklov_csv(rows: &[SteklovRow], count: usize) -> String {
    let mut out = String::from("k_max,m");
    for i in 1..=count {
        write!(out, ",sigma_{i},residual_{i}").expect("writing to a String");
    }
    out.push_str(",status\n");
    for r in rows {
        write!(out, "{},{}", r.k_max, r.m).expect("writing to a String");
        for i in 0..count {
            match r.eigen.get(i) {
                Some((s, res)) => write!(out, ",{},{:.6e}", s.to_decimal_digits(30), res.to_f64()),
                None => write!(out, ",nan,nan"),
            }
            .expect("writing to a String");
        }
        writeln!(out, ",{}", csv_field(&r.status)).expect("writing to a String");
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Least-squares line `y = slope·x + intercept` and its `R²`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mx, r2)
}
