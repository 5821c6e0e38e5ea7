//! Tori with holes: hole shapes, membership, boundary sampling and random
//! interior points.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arbprec::{BigComplex, BigReal};
use crate::error::{Error, Result};
use crate::lattice::Lattice;

/// Points per hole used by the `f64` geometric validation and perimeter
/// estimates.
const VALIDATION_POINTS: usize = 2048;

#[derive(Clone, Debug)]
pub enum HoleShape {
    Circle {
        radius: BigReal,
    },
    /// Star-shaped hole `a + ρ(θ + phase) e^{iθ}` with
    /// `ρ(t) = ρ0 + Σ_k ρ_k cos(kt)`.
    Polar {
        rho_cos_coeffs: Vec<BigReal>,
        phase: BigReal,
    },
}

#[derive(Clone, Debug)]
pub struct Hole {
    pub center: BigComplex,
    pub shape: HoleShape,
}

impl Hole {
    pub fn circle(center: BigComplex, radius: BigReal) -> Result<Hole> {
        if radius.is_negative() || radius.is_zero() || !radius.is_finite() {
            return Err(Error::Geometry(format!(
                "circle radius must be positive, got {}",
                radius.to_f64()
            )));
        }
        Ok(Hole {
            center,
            shape: HoleShape::Circle { radius },
        })
    }

    pub fn polar(center: BigComplex, rho_cos_coeffs: Vec<BigReal>, phase: BigReal) -> Result<Hole> {
        if rho_cos_coeffs.is_empty() {
            return Err(Error::Geometry("polar hole needs at least ρ0".into()));
        }
        let hole = Hole {
            center,
            shape: HoleShape::Polar {
                rho_cos_coeffs,
                phase,
            },
        };
        for k in 0..VALIDATION_POINTS {
            let t = 2.0 * PI * k as f64 / VALIDATION_POINTS as f64;
            if hole.rho_f64(t) <= 0.0 {
                return Err(Error::Geometry(format!(
                    "polar radius is not positive at θ = {t:.4}"
                )));
            }
        }
        Ok(hole)
    }

    fn check_ctx(&self, lattice: &Lattice) -> Result<()> {
        let ctx = lattice.ctx();
        ctx.check_complex(&self.center)?;
        match &self.shape {
            HoleShape::Circle { radius } => ctx.check(radius),
            HoleShape::Polar {
                rho_cos_coeffs,
                phase,
            } => {
                ctx.check(phase)?;
                rho_cos_coeffs.iter().try_for_each(|c| ctx.check(c))
            }
        }
    }

    /// `(ρ(θ + phase), ρ'(θ + phase))` in the hole's parameter angle.
    pub fn rho(&self, theta: &BigReal) -> (BigReal, BigReal) {
        match &self.shape {
            HoleShape::Circle { radius } => (radius.clone(), radius.ctx().zero()),
            HoleShape::Polar {
                rho_cos_coeffs,
                phase,
            } => {
                let t = theta + phase;
                let mut rho = rho_cos_coeffs[0].clone();
                let mut drho = t.ctx().zero();
                for (k, coeff) in rho_cos_coeffs.iter().enumerate().skip(1) {
                    let (s, c) = (&t * k as i32).sin_cos();
                    rho += &(coeff * &c);
                    drho -= &(coeff * &s) * k as i32;
                }
                (rho, drho)
            }
        }
    }

    fn rho_f64(&self, theta: f64) -> f64 {
        match &self.shape {
            HoleShape::Circle { radius } => radius.to_f64(),
            HoleShape::Polar {
                rho_cos_coeffs,
                phase,
            } => {
                let t = theta + phase.to_f64();
                rho_cos_coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c.to_f64() * (k as f64 * t).cos())
                    .sum()
            }
        }
    }

    fn drho_f64(&self, theta: f64) -> f64 {
        match &self.shape {
            HoleShape::Circle { .. } => 0.0,
            HoleShape::Polar {
                rho_cos_coeffs,
                phase,
            } => {
                let t = theta + phase.to_f64();
                rho_cos_coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| -(k as f64) * c.to_f64() * (k as f64 * t).sin())
                    .sum()
            }
        }
    }

    /// Largest distance from the center to the boundary.
    pub fn bounding_radius(&self) -> f64 {
        match &self.shape {
            HoleShape::Circle { radius } => radius.to_f64(),
            HoleShape::Polar { .. } => (0..VALIDATION_POINTS)
                .map(|k| self.rho_f64(2.0 * PI * k as f64 / VALIDATION_POINTS as f64))
                .fold(0.0, f64::max),
        }
    }

    pub fn perimeter_f64(&self) -> f64 {
        match &self.shape {
            HoleShape::Circle { radius } => 2.0 * PI * radius.to_f64(),
            HoleShape::Polar { .. } => {
                let h = 2.0 * PI / VALIDATION_POINTS as f64;
                (0..VALIDATION_POINTS)
                    .map(|k| {
                        let t = k as f64 * h;
                        self.rho_f64(t).hypot(self.drho_f64(t)) * h
                    })
                    .sum()
            }
        }
    }

    /// Boundary point and tangent `(ρ' + iρ) e^{iθ}` at parameter `θ`.
    pub fn boundary_point(&self, theta: &BigReal) -> (BigComplex, BigComplex) {
        let (s, c) = theta.sin_cos();
        let dir = BigComplex::new(c, s);
        let (rho, drho) = self.rho(theta);
        let point = &self.center + &dir.scale(&rho);
        let tangent = &dir * &BigComplex::new(drho, rho);
        (point, tangent)
    }

    /// Whether the offset `d` from the center (already the relevant periodic
    /// image) lies in the closed hole, with `slack` added to the radius.
    fn covers(&self, d: &BigComplex, slack: &BigReal) -> bool {
        let r = d.abs();
        match &self.shape {
            HoleShape::Circle { radius } => r <= radius + slack,
            HoleShape::Polar { .. } => {
                let (rho, _) = self.rho(&d.arg());
                r <= rho + slack
            }
        }
    }
}

/// A flat torus with `b >= 1` disjoint holes removed.
#[derive(Clone, Debug)]
pub struct Domain {
    lattice: Arc<Lattice>,
    holes: Vec<Hole>,
}

impl Domain {
    pub fn new(lattice: Arc<Lattice>, holes: Vec<Hole>) -> Result<Domain> {
        if holes.is_empty() {
            return Err(Error::Geometry("domain needs at least one hole".into()));
        }
        for h in &holes {
            h.check_ctx(&lattice)?;
        }
        let domain = Domain { lattice, holes };
        domain.validate()?;
        Ok(domain)
    }

    fn validate(&self) -> Result<()> {
        let l = &*self.lattice;
        let a = l.omega1.mul_2exp(1).to_f64_pair();
        let b = l.omega2.mul_2exp(1).to_f64_pair();
        let im_ab = a.0 * b.1 - a.1 * b.0;
        // x = Im(z b̄)/Im(a b̄), y = Im(z ā)/Im(b ā)
        let coords = |z: (f64, f64)| {
            let x = (z.1 * b.0 - z.0 * b.1) / (-im_ab);
            let y = (z.1 * a.0 - z.0 * a.1) / im_ab;
            (x, y)
        };
        for (j, h) in self.holes.iter().enumerate() {
            let c = h.center.to_f64_pair();
            let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
            for k in 0..VALIDATION_POINTS {
                let t = 2.0 * PI * k as f64 / VALIDATION_POINTS as f64;
                let r = h.rho_f64(t) * 1.001;
                let (x, y) = coords((c.0 + r * t.cos(), c.1 + r * t.sin()));
                xmin = xmin.min(x);
                xmax = xmax.max(x);
                ymin = ymin.min(y);
                ymax = ymax.max(y);
            }
            if xmax - xmin >= 1.0 || ymax - ymin >= 1.0 {
                return Err(Error::Geometry(format!(
                    "hole {j} does not fit inside a fundamental cell"
                )));
            }
        }
        for i in 0..self.holes.len() {
            for j in i + 1..self.holes.len() {
                let d = &self.holes[j].center - &self.holes[i].center;
                let reach = self.holes[i].bounding_radius() + self.holes[j].bounding_radius();
                let red = l.reduce(&d);
                for p in -1..=1 {
                    for q in -1..=1 {
                        let off = (&red.z - &l.vector(p, q)).abs().to_f64();
                        if off <= reach {
                            return Err(Error::Geometry(format!(
                                "holes {i} and {j} overlap (possibly across the periodic boundary)"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn lattice_arc(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn holes(&self) -> &[Hole] {
        &self.holes
    }

    /// Number of holes `b`.
    pub fn hole_count(&self) -> usize {
        self.holes.len()
    }

    fn hit(&self, z: &BigComplex, slack: &BigReal) -> bool {
        let l = &*self.lattice;
        self.holes.iter().any(|h| {
            let red = l.reduce(&(z - &h.center));
            (-1..=1).any(|p| {
                (-1..=1).any(|q| {
                    let d = if p == 0 && q == 0 {
                        red.z.clone()
                    } else {
                        &red.z - &l.vector(p, q)
                    };
                    h.covers(&d, slack)
                })
            })
        })
    }

    /// True iff `z` (modulo the lattice) lies strictly outside every hole.
    pub fn contains(&self, z: &BigComplex) -> bool {
        !self.hit(z, &self.lattice.ctx().zero())
    }

    /// True unless `z` lies inside a hole by more than `2^{-bits/2}`; boundary
    /// points are accepted.
    pub fn in_closure(&self, z: &BigComplex) -> bool {
        let ctx = self.lattice.ctx();
        !self.hit(z, &-ctx.tol(ctx.bits() as i32 / 2))
    }

    /// `count` points uniform on Ω by rejection from the fundamental cell,
    /// deterministic in `seed`.
    pub fn random_interior_points(&self, count: usize, seed: u64) -> Result<Vec<BigComplex>> {
        if count == 0 {
            return Err(Error::Geometry("need at least one interior point".into()));
        }
        let ctx = self.lattice.ctx();
        let a = self.lattice.omega1.mul_2exp(1);
        let b = self.lattice.omega2.mul_2exp(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let max_draws = count * 100;
        let mut out = Vec::with_capacity(count);
        for _ in 0..max_draws {
            let x: f64 = rng.random();
            let y: f64 = rng.random();
            let z = &a.scale(&ctx.from_f64(x)) + &b.scale(&ctx.from_f64(y));
            if self.contains(&z) {
                out.push(z);
                if out.len() == count {
                    return Ok(out);
                }
            }
        }
        Err(Error::Geometry(format!(
            "rejection sampling accepted {} of {max_draws} draws (< 1%); holes nearly fill the torus",
            out.len()
        )))
    }
}

/// One collocation point on a hole boundary.
#[derive(Clone, Debug)]
pub struct BoundarySample {
    pub point: BigComplex,
    /// Unit normal pointing out of Ω, i.e. into the hole.
    pub normal: BigComplex,
    pub hole: usize,
    /// Periodic-trapezoid arclength weight `|γ'(θ)| Δθ`.
    pub weight: BigReal,
    /// Parameter (polar) angle about the hole center.
    pub theta: BigReal,
}

/// Per-hole point counts; doubling keeps the angles nested.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundarySampling {
    pub counts: Vec<usize>,
}

impl BoundarySampling {
    /// Splits `total` points across holes in proportion to perimeter, at
    /// least 8 per hole.
    pub fn proportional(domain: &Domain, total: usize) -> Result<Self> {
        let b = domain.hole_count();
        if total < 8 * b {
            return Err(Error::Geometry(format!(
                "need at least {} boundary samples for {b} holes, got {total}",
                8 * b
            )));
        }
        let perims: Vec<f64> = domain.holes().iter().map(Hole::perimeter_f64).collect();
        let sum: f64 = perims.iter().sum();
        let raw: Vec<f64> = perims.iter().map(|p| total as f64 * p / sum).collect();
        let mut counts: Vec<usize> = raw.iter().map(|r| (r.floor() as usize).max(8)).collect();
        let mut order: Vec<usize> = (0..b).collect();
        order.sort_by(|&i, &j| {
            let fi = raw[i] - raw[i].floor();
            let fj = raw[j] - raw[j].floor();
            fj.partial_cmp(&fi).unwrap().then(i.cmp(&j))
        });
        let mut assigned: usize = counts.iter().sum();
        let mut idx = 0;
        while assigned < total {
            counts[order[idx % b]] += 1;
            assigned += 1;
            idx += 1;
        }
        while assigned > total {
            let j = (0..b)
                .filter(|&j| counts[j] > 8)
                .max_by_key(|&j| counts[j])
                .expect("total >= 8b leaves room");
            counts[j] -= 1;
            assigned -= 1;
        }
        Ok(BoundarySampling { counts })
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn doubled(&self) -> Self {
        BoundarySampling {
            counts: self.counts.iter().map(|c| 2 * c).collect(),
        }
    }

    pub fn sample(&self, domain: &Domain) -> Result<Vec<BoundarySample>> {
        if self.counts.len() != domain.hole_count() {
            return Err(Error::LengthMismatch {
                expected: domain.hole_count(),
                found: self.counts.len(),
            });
        }
        let ctx = domain.lattice().ctx();
        let two_pi = ctx.pi().mul_2exp(1);
        let mut out = Vec::with_capacity(self.total());
        for (j, (hole, &n)) in domain.holes().iter().zip(&self.counts).enumerate() {
            let dtheta = &two_pi / &ctx.int(n as i64);
            for k in 0..n {
                let theta = &dtheta * k as i32;
                let (point, tangent) = hole.boundary_point(&theta);
                let speed = tangent.abs();
                if speed.is_zero() {
                    return Err(Error::Geometry(format!("degenerate boundary on hole {j}")));
                }
                // i·t/|t| points into the hole for counter-clockwise curves.
                let normal = tangent.mul_i().scale(&speed.recip()?);
                out.push(BoundarySample {
                    point,
                    normal,
                    hole: j,
                    weight: &speed * &dtheta,
                    theta,
                });
            }
        }
        Ok(out)
    }
}

/// Samples `total` boundary points distributed over the holes.
pub fn sample_boundary(domain: &Domain, total: usize) -> Result<Vec<BoundarySample>> {
    BoundarySampling::proportional(domain, total)?.sample(domain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arbprec::PrecisionContext;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(128).unwrap()
    }

    fn one_hole(c: PrecisionContext) -> Domain {
        let l = Arc::new(Lattice::square(c).unwrap());
        let h = Hole::circle(c.czero(), c.parse("0.4").unwrap()).unwrap();
        Domain::new(l, vec![h]).unwrap()
    }

    fn flower(c: PrecisionContext, center: (f64, f64), phase: BigReal) -> Hole {
        let coeffs = vec![c.parse("0.3").unwrap(), c.zero(), c.zero(), c.parse("0.1").unwrap()];
        Hole::polar(c.complex(center.0, center.1), coeffs, phase).unwrap()
    }

    #[test]
    fn circle_samples_are_uniform_with_inward_normals() {
        let c = ctx();
        let d = one_hole(c);
        let s = sample_boundary(&d, 12).unwrap();
        assert_eq!(s.len(), 12);
        for (k, smp) in s.iter().enumerate() {
            let th = 2.0 * PI * k as f64 / 12.0;
            let (x, y) = smp.point.to_f64_pair();
            assert!((x - 0.4 * th.cos()).abs() < 1e-15 && (y - 0.4 * th.sin()).abs() < 1e-15);
            let (n1, n2) = smp.normal.to_f64_pair();
            assert!((n1 + th.cos()).abs() < 1e-15 && (n2 + th.sin()).abs() < 1e-15);
        }
        let total: BigReal = s.iter().fold(c.zero(), |acc, smp| acc + &smp.weight);
        let exact = c.pi() * c.parse("0.8").unwrap();
        assert!((total - exact).abs() < c.tol(16));
    }

    #[test]
    fn normals_point_into_holes() {
        let c = ctx();
        let l = Arc::new(Lattice::square(c).unwrap());
        let holes = vec![flower(c, (0.4, 0.4), c.zero()), flower(c, (-0.4, -0.4), c.pi() / c.int(3))];
        let d = Domain::new(l, holes).unwrap();
        let s = sample_boundary(&d, 96).unwrap();
        for j in 0..2 {
            let center = &d.holes()[j].center;
            let flux = s.iter().filter(|p| p.hole == j).fold(c.zero(), |acc, p| {
                let r = &p.point - center;
                acc + &p.weight * &(&p.normal.conj() * &r).re
            });
            assert!(flux.is_negative());
        }
        for p in &s {
            assert!((p.normal.abs() - c.one()).abs() < c.tol(8));
        }
    }

    #[test]
    fn doubling_nests_angles() {
        let c = ctx();
        let d = one_hole(c);
        let base = BoundarySampling::proportional(&d, 20).unwrap();
        let coarse = base.sample(&d).unwrap();
        let fine = base.doubled().sample(&d).unwrap();
        for (k, p) in coarse.iter().enumerate() {
            assert!((&fine[2 * k].point - &p.point).abs() < c.tol(8));
        }
    }

    #[test]
    fn proportional_counts() {
        let c = ctx();
        let l = Arc::new(Lattice::square(c).unwrap());
        let holes = vec![
            Hole::circle(c.complex(0.3, 0.0), c.parse("0.1").unwrap()).unwrap(),
            Hole::circle(c.complex(0.0, 0.3), c.parse("0.1").unwrap()).unwrap(),
            Hole::circle(c.complex(-0.3, -0.3), c.parse("0.05").unwrap()).unwrap(),
        ];
        let d = Domain::new(l, holes).unwrap();
        let s = BoundarySampling::proportional(&d, 100).unwrap();
        assert_eq!(s.total(), 100);
        assert_eq!(s.counts, vec![40, 40, 20]);
        let s = BoundarySampling::proportional(&d, 24).unwrap();
        assert_eq!(s.total(), 24);
        assert!(s.counts.iter().all(|&n| n >= 8));
        assert!(BoundarySampling::proportional(&d, 23).is_err());
    }

    #[test]
    fn membership() {
        let c = ctx();
        let d = one_hole(c);
        assert!(!d.contains(&c.czero()));
        assert!(d.contains(&c.complex(1.0, 1.0)));
        assert!(d.contains(&c.complex(0.40004, 0.0)));
        assert!(!d.contains(&c.complex(0.39996, 0.0)));
        // periodic image of the hole
        assert!(!d.contains(&c.complex(2.1, -1.9)));
    }

    #[test]
    fn rejects_overlaps_and_wrapping() {
        let c = ctx();
        let l = Arc::new(Lattice::square(c).unwrap());
        let too_big = Hole::circle(c.czero(), c.parse("1.01").unwrap()).unwrap();
        assert!(Domain::new(l.clone(), vec![too_big]).is_err());
        let a = Hole::circle(c.complex(0.9, 0.0), c.parse("0.2").unwrap()).unwrap();
        let b = Hole::circle(c.complex(-0.9, 0.0), c.parse("0.2").unwrap()).unwrap();
        assert!(matches!(Domain::new(l.clone(), vec![a, b]), Err(Error::Geometry(_))));
        assert!(Domain::new(l, vec![]).is_err());
        assert!(Hole::circle(c.czero(), c.zero()).is_err());
        let bad = vec![c.parse("0.1").unwrap(), c.parse("0.2").unwrap()];
        assert!(Hole::polar(c.czero(), bad, c.zero()).is_err());
    }

    #[test]
    fn interior_points_are_seeded() {
        let c = ctx();
        let d = one_hole(c);
        let p1 = d.random_interior_points(50, 7).unwrap();
        let p2 = d.random_interior_points(50, 7).unwrap();
        assert_eq!(p1.len(), 50);
        assert!(p1.iter().all(|z| d.contains(z)));
        assert_eq!(p1, p2);
        assert_ne!(p1, d.random_interior_points(50, 8).unwrap());
    }
}
