mod common;

use std::sync::Arc;

use common::{ctx, wp_rows};
use torus_harmonic::arbprec::{BigComplex, BigReal, PrecisionContext};
use torus_harmonic::geometry::{sample_boundary, Domain, Hole};
use torus_harmonic::laplace::{solve_laplace, BoundaryData, FourierSeries, LaplaceOptions};
use torus_harmonic::lattice::Lattice;
use torus_harmonic::linalg::LeastSquaresMode;

fn square(c: PrecisionContext) -> Arc<Lattice> {
    Arc::new(Lattice::square(c).unwrap())
}

fn two_holes(c: PrecisionContext) -> Domain {
    let r = c.parse("0.2").unwrap();
    Domain::new(
        square(c),
        vec![
            Hole::circle(c.complex(0.4, 0.0), r.clone()).unwrap(),
            Hole::circle(c.complex(-0.4, -0.4), r).unwrap(),
        ],
    )
    .unwrap()
}

fn two_hole_data(c: PrecisionContext) -> BoundaryData {
    BoundaryData {
        holes: vec![FourierSeries::sin_mode(c, 4), FourierSeries::sin_mode(c, 3)],
    }
}

/// Fourier coefficients of `g` on `[0, 2π)` by the trapezoid rule.
fn fourier_fit(c: PrecisionContext, modes: usize, g: impl Fn(&BigReal) -> BigReal) -> FourierSeries {
    let n = 4 * modes + 8;
    let step = c.pi().mul_2exp(1) / c.int(n as i64);
    let vals: Vec<(BigReal, BigReal)> = (0..n)
        .map(|j| {
            let th = &step * &c.int(j as i64);
            let v = g(&th);
            (th, v)
        })
        .collect();
    let scale = c.ratio(2, n as i64);
    let mut a0 = c.zero();
    for (_, v) in &vals {
        a0 += v;
    }
    let mut cos = Vec::new();
    let mut sin = Vec::new();
    for k in 1..=modes {
        let (mut a, mut b) = (c.zero(), c.zero());
        for (th, v) in &vals {
            let (s, co) = (th * k as i32).sin_cos();
            a += &(v * &co);
            b += &(v * &s);
        }
        cos.push(a * &scale);
        sin.push(b * &scale);
    }
    FourierSeries {
        a0: a0 / c.int(n as i64),
        cos,
        sin,
    }
}

#[test]
fn harmonic_with_pole_inside_the_hole_is_recovered() {
    // u = Re ℘(z − p) is harmonic and periodic off the lattice translates of p.
    let c = ctx(160);
    let l = square(c);
    let center = c.complex(0.1, -0.05);
    let r = c.parse("0.4").unwrap();
    let p = &center + &c.complex(0.08, 0.03);
    let hole = Hole::circle(center.clone(), r.clone()).unwrap();
    let domain = Domain::new(l.clone(), vec![hole]).unwrap();
    let exact = |z: &BigComplex| wp_rows(&l, &(z - &p)).re;
    let on_circle = |th: &BigReal| {
        let (s, co) = th.sin_cos();
        exact(&(&center + &BigComplex::new(&r * &co, &r * &s)))
    };
    let data = BoundaryData {
        holes: vec![fourier_fit(c, 48, on_circle)],
    };
    let sol = solve_laplace(&domain, &data, LaplaceOptions::new(45)).unwrap();
    assert!(sol.boundary_sup_error().to_f64() < 1e-20, "{}", sol.boundary_sup_error().to_f64());
    for (x, y) in [(0.9, 0.9), (-0.7, 0.6), (0.55, -0.2), (-0.95, -0.1)] {
        let z = c.complex(x, y);
        let err = (sol.eval(&z).unwrap() - exact(&z)).abs().to_f64();
        assert!(err < 1e-19, "({x}, {y}): {err:e}");
    }
}

#[test]
fn constant_data_gives_a_constant_solution() {
    let c = ctx(128);
    let d = two_holes(c);
    let v = c.parse("-2.5").unwrap();
    let sol = solve_laplace(&d, &BoundaryData::constant(2, v.clone()), LaplaceOptions::new(6)).unwrap();
    for (x, y) in [(0.0, 0.5), (0.9, -0.9), (-0.1, 0.1)] {
        let err = (sol.eval(&c.complex(x, y)).unwrap() - &v).abs();
        assert!(err < c.tol(40), "{}", err.to_f64());
    }
}

#[test]
fn solution_is_doubly_periodic() {
    let c = ctx(128);
    let d = two_holes(c);
    let sol = solve_laplace(&d, &two_hole_data(c), LaplaceOptions::new(12)).unwrap();
    let l = d.lattice();
    let z = c.complex(0.1, 0.6);
    let u = sol.spec().evaluate(sol.coefficients(), &z).unwrap();
    for (p, q) in [(1, 0), (0, 1), (-2, 3)] {
        let w = &z + &l.vector(p, q);
        let v = sol.spec().evaluate(sol.coefficients(), &w).unwrap();
        assert!((&v - &u).abs() < c.tol(40), "shift ({p}, {q})");
    }
}

#[test]
fn column_scaling_does_not_change_the_fit() {
    let c = ctx(256);
    let d = two_holes(c);
    let data = two_hole_data(c);
    let mut opts = LaplaceOptions::new(16);
    let scaled = solve_laplace(&d, &data, opts).unwrap();
    opts.scale_columns = false;
    let plain = solve_laplace(&d, &data, opts).unwrap();
    let tol = c.pow2(-128);
    for s in sample_boundary(&d, 64).unwrap() {
        let diff = (scaled.eval_boundary(&s).unwrap() - plain.eval_boundary(&s).unwrap()).abs();
        assert!(diff < tol, "{}", diff.to_f64());
    }
}

#[test]
fn normal_equations_agree_with_qr_when_well_conditioned() {
    let c = ctx(256);
    let d = two_holes(c);
    let data = two_hole_data(c);
    let mut opts = LaplaceOptions::new(6);
    let qr = solve_laplace(&d, &data, opts).unwrap();
    opts.mode = LeastSquaresMode::NormalEquations;
    let ne = solve_laplace(&d, &data, opts).unwrap();
    for (a, b) in qr.coefficients().iter().zip(ne.coefficients()) {
        assert!((a - b).abs() < c.tol(200));
    }
}

#[test]
fn error_decreases_with_truncation() {
    let c = ctx(192);
    let d = two_holes(c);
    let data = two_hole_data(c);
    let errs: Vec<f64> = [4, 10, 16]
        .iter()
        .map(|&k| solve_laplace(&d, &data, LaplaceOptions::new(k)).unwrap().boundary_sup_error().to_f64())
        .collect();
    assert!(errs[0] > 10.0 * errs[1] && errs[1] > 10.0 * errs[2], "{errs:?}");
}

#[test]
fn constant_polar_radius_matches_the_circle() {
    let c = ctx(128);
    let r = c.parse("0.35").unwrap();
    let a = c.complex(0.1, 0.2);
    let circle = Domain::new(square(c), vec![Hole::circle(a.clone(), r.clone()).unwrap()]).unwrap();
    let polar = Domain::new(square(c), vec![Hole::polar(a, vec![r], c.zero()).unwrap()]).unwrap();
    let data = BoundaryData {
        holes: vec![FourierSeries::sin_mode(c, 2)],
    };
    let u1 = solve_laplace(&circle, &data, LaplaceOptions::new(10)).unwrap();
    let u2 = solve_laplace(&polar, &data, LaplaceOptions::new(10)).unwrap();
    let z = c.complex(-0.6, -0.5);
    assert!((u1.eval(&z).unwrap() - u2.eval(&z).unwrap()).abs() < c.tol(40));
    assert_eq!(u1.boundary_sup_error().to_f64(), u2.boundary_sup_error().to_f64());
}

#[test]
fn points_inside_holes_are_rejected() {
    let c = ctx(96);
    let d = two_holes(c);
    let sol = solve_laplace(&d, &two_hole_data(c), LaplaceOptions::new(2)).unwrap();
    assert!(sol.eval(&c.complex(0.45, 0.05)).is_err());
    // a periodic copy of the second hole
    assert!(sol.eval(&c.complex(1.6, -0.4)).is_err());
}

#[test]
fn field_export_reevaluates_to_the_same_values() {
    let c = ctx(128);
    let d = two_holes(c);
    let sol = solve_laplace(&d, &two_hole_data(c), LaplaceOptions::new(8)).unwrap();
    let grid = 9;
    let csv = sol.field_csv(grid).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,y,u"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), grid * grid);
    let mut holes = 0;
    for row in rows {
        let f: Vec<&str> = row.split(',').collect();
        let z = c.parse_complex(f[0], f[1]).unwrap();
        if f[2] == "nan" {
            assert!(!d.contains(&z), "{row}");
            holes += 1;
        } else {
            let u: f64 = f[2].parse().unwrap();
            let want = sol.eval(&z).unwrap().to_f64();
            assert!((u - want).abs() <= 1e-15 * want.abs().max(1.0), "{row}");
        }
    }
    assert!(holes > 0);
}

#[test]
fn tiny_grid_has_four_rows() {
    let c = ctx(96);
    let d = two_holes(c);
    let sol = solve_laplace(&d, &two_hole_data(c), LaplaceOptions::new(2)).unwrap();
    let csv = sol.field_csv(2).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(sol.field_csv(1).is_err());
}
