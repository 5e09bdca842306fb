//! Convex rate regions in the nonnegative quadrant.
//!
//! Every region here is an intersection of half-planes `a·R₁ + b·R₂ ≤ c` with
//! `a, b ≥ 0` and the quadrant `R₁, R₂ ≥ 0`, so it is closed under moving
//! towards the origin. Erosion by `τ` per user keeps the constraint normals and
//! lowers each offset by `(a + b)·τ`; a region stores its base constraints
//! plus the accumulated erosion so repeated erosions compose exactly.

mod gap;

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::format::sig;

pub use gap::{
    gap_at, gap_sweep, gap_sweep_with, GapRecord, GapReport, CERTIFIED_DISTORTION, THEOREM_GAP_BITS,
};

/// Tolerance for geometric predicates.
pub const GEOMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePair {
    pub r1: f64,
    pub r2: f64,
}

impl RatePair {
    pub const ORIGIN: RatePair = RatePair { r1: 0.0, r2: 0.0 };

    pub fn new(r1: f64, r2: f64) -> Self {
        RatePair { r1, r2 }
    }

    fn dist(&self, other: &RatePair) -> f64 {
        (self.r1 - other.r1).hypot(self.r2 - other.r2)
    }
}

/// `a·R₁ + b·R₂ ≤ c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl HalfPlane {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        contract!(
            a.is_finite() && b.is_finite() && c.is_finite(),
            "half-plane coefficients must be finite"
        );
        contract!(a >= 0.0 && b >= 0.0, "half-plane normals must be nonnegative, got ({a}, {b})");
        contract!(a > 0.0 || b > 0.0, "half-plane normal must be nonzero");
        Ok(HalfPlane { a, b, c })
    }

    pub fn slack(&self, p: &RatePair) -> f64 {
        self.c - self.a * p.r1 - self.b * p.r2
    }

    fn eroded(&self, tau: f64) -> HalfPlane {
        HalfPlane {
            c: self.c - (self.a + self.b) * tau,
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRegion {
    base: Vec<HalfPlane>,
    erosion: f64,
    vertices: Vec<RatePair>,
}

impl RateRegion {
    /// Intersection of `constraints` with the nonnegative quadrant; must be
    /// bounded in both rate directions.
    pub fn new(constraints: Vec<HalfPlane>) -> Result<Self> {
        RateRegion::with_erosion(constraints, 0.0)
    }

    fn with_erosion(base: Vec<HalfPlane>, erosion: f64) -> Result<Self> {
        contract!(
            base.iter().any(|h| h.a > 0.0) && base.iter().any(|h| h.b > 0.0),
            "rate region is unbounded"
        );
        let mut region = RateRegion {
            base,
            erosion,
            vertices: Vec::new(),
        };
        region.vertices = compute_vertices(&region.constraints());
        Ok(region)
    }

    /// Effective constraints after erosion.
    pub fn constraints(&self) -> Vec<HalfPlane> {
        self.base.iter().map(|h| h.eroded(self.erosion)).collect()
    }

    /// Vertices counterclockwise from the origin; empty for an empty region.
    pub fn vertices(&self) -> &[RatePair] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, p: &RatePair) -> bool {
        p.r1 >= -GEOMETRY_TOL
            && p.r2 >= -GEOMETRY_TOL
            && self.constraints().iter().all(|h| h.slack(p) >= -GEOMETRY_TOL)
    }

    /// Region of pairs `(R₁, R₂) ≥ 0` with `(R₁ + τ, R₂ + τ)` inside `self`.
    pub fn erode(&self, tau: f64) -> RateRegion {
        RateRegion::with_erosion(self.base.clone(), self.erosion + tau)
            .expect("erosion keeps the region bounded")
    }

    /// Rebuilds a region from points whose down-closure is the region.
    pub fn from_vertices(points: &[RatePair]) -> Result<Self> {
        contract!(!points.is_empty(), "no vertices given");
        contract!(
            points.iter().all(|p| p.r1 >= -GEOMETRY_TOL && p.r2 >= -GEOMETRY_TOL),
            "vertices must lie in the nonnegative quadrant"
        );
        let mut cloud = vec![RatePair::ORIGIN];
        for p in points {
            let p = RatePair::new(p.r1.max(0.0), p.r2.max(0.0));
            cloud.extend([p, RatePair::new(p.r1, 0.0), RatePair::new(0.0, p.r2)]);
        }
        let hull = convex_hull(cloud);
        let mut constraints = Vec::new();
        for (i, p) in hull.iter().enumerate() {
            let q = hull[(i + 1) % hull.len()];
            // Outward normal of a counterclockwise edge.
            let (a, b) = (q.r2 - p.r2, p.r1 - q.r1);
            if a < -GEOMETRY_TOL || b < -GEOMETRY_TOL || (a.abs() <= GEOMETRY_TOL && b.abs() <= GEOMETRY_TOL) {
                continue;
            }
            let (a, b) = (a.max(0.0), b.max(0.0));
            constraints.push(HalfPlane::new(a, b, a * p.r1 + b * p.r2)?);
        }
        if constraints.is_empty() {
            // The cloud collapsed to the origin.
            constraints.push(HalfPlane::new(1.0, 1.0, 0.0)?);
        }
        if !constraints.iter().any(|h| h.a > 0.0) {
            constraints.push(HalfPlane::new(1.0, 0.0, 0.0)?);
        }
        if !constraints.iter().any(|h| h.b > 0.0) {
            constraints.push(HalfPlane::new(0.0, 1.0, 0.0)?);
        }
        RateRegion::new(constraints)
    }

    /// Largest `R₁` reachable with `R₂ = 0`.
    pub fn axis_extent_r1(&self) -> f64 {
        self.constraints()
            .iter()
            .filter(|h| h.a > 0.0)
            .map(|h| h.c / h.a)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn axis_extent_r2(&self) -> f64 {
        self.constraints()
            .iter()
            .filter(|h| h.b > 0.0)
            .map(|h| h.c / h.b)
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest `t` with `(t, t)` in the region.
    pub fn symmetric_extent(&self) -> f64 {
        self.constraints()
            .iter()
            .map(|h| h.c / (h.a + h.b))
            .fold(f64::INFINITY, f64::min)
    }
}

fn intersect(l1: (f64, f64, f64), l2: (f64, f64, f64)) -> Option<RatePair> {
    let det = l1.0 * l2.1 - l1.1 * l2.0;
    if det.abs() < 1e-15 {
        return None;
    }
    Some(RatePair::new(
        (l1.2 * l2.1 - l1.1 * l2.2) / det,
        (l1.0 * l2.2 - l1.2 * l2.0) / det,
    ))
}

fn cross(o: &RatePair, a: &RatePair, b: &RatePair) -> f64 {
    (a.r1 - o.r1) * (b.r2 - o.r2) - (a.r2 - o.r2) * (b.r1 - o.r1)
}

fn compute_vertices(constraints: &[HalfPlane]) -> Vec<RatePair> {
    if constraints.iter().any(|h| h.c < 0.0) {
        return Vec::new();
    }
    let mut lines: Vec<(f64, f64, f64)> = vec![(1.0, 0.0, 0.0), (0.0, 1.0, 0.0)];
    lines.extend(constraints.iter().map(|h| (h.a, h.b, h.c)));
    let feasible = |p: &RatePair| {
        p.r1 >= -GEOMETRY_TOL
            && p.r2 >= -GEOMETRY_TOL
            && constraints.iter().all(|h| h.slack(p) >= -GEOMETRY_TOL)
    };
    let mut points: Vec<RatePair> = Vec::new();
    for i in 0..lines.len() {
        for j in (i + 1)..lines.len() {
            if let Some(p) = intersect(lines[i], lines[j]) {
                let p = RatePair::new(p.r1.max(0.0), p.r2.max(0.0));
                if feasible(&p) && !points.iter().any(|q| q.dist(&p) <= GEOMETRY_TOL) {
                    points.push(p);
                }
            }
        }
    }
    if points.len() <= 1 {
        return points;
    }
    convex_hull(points)
}

/// Andrew's monotone chain; counterclockwise, collinear points dropped,
/// rotated to start at the point closest to the origin.
fn convex_hull(mut pts: Vec<RatePair>) -> Vec<RatePair> {
    pts.sort_by(|a, b| a.r1.total_cmp(&b.r1).then(a.r2.total_cmp(&b.r2)));
    pts.dedup_by(|a, b| a.dist(b) <= GEOMETRY_TOL);
    if pts.len() <= 2 {
        return pts;
    }
    let eps = 1e-12;
    let mut hull: Vec<RatePair> = Vec::with_capacity(2 * pts.len());
    for p in &pts {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= eps {
            hull.pop();
        }
        hull.push(*p);
    }
    // The upper chain may not pop back into the lower one.
    let lower = hull.len() + 1;
    for p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= eps {
            hull.pop();
        }
        hull.push(*p);
    }
    hull.pop();
    let start = hull
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1.r1 + a.1.r2).total_cmp(&(b.1.r1 + b.1.r2)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    hull.rotate_left(start);
    hull
}

/// True iff every vertex of `inner` satisfies every constraint of `outer`.
pub fn is_subset(inner: &RateRegion, outer: &RateRegion) -> bool {
    let constraints = outer.constraints();
    if outer.is_empty() {
        return inner.is_empty();
    }
    inner
        .vertices()
        .iter()
        .all(|p| constraints.iter().all(|h| h.slack(p) >= -GEOMETRY_TOL))
}

/// `{R₁ + 2R₂ ≤ 2c, 2R₁ + R₂ ≤ 2c}`, the intersection of the two
/// single-user-enhanced outer bounds.
pub fn outer_region(c21: f64) -> Result<RateRegion> {
    contract!(c21 >= 0.0 && c21.is_finite(), "capacity must be finite and nonnegative, got {c21}");
    RateRegion::new(vec![
        HalfPlane::new(1.0, 2.0, 2.0 * c21)?,
        HalfPlane::new(2.0, 1.0, 2.0 * c21)?,
    ])
}

/// Slope coefficient `α = 3·C₂ₓ₁ / C₂ₓ₂(D) − 1` of the achievable region.
pub fn achievable_slope(c21: f64, c22d: f64) -> f64 {
    3.0 * c21 / c22d - 1.0
}

/// `{R₁ + αR₂ ≤ C₂ₓ₁, αR₁ + R₂ ≤ C₂ₓ₁}`; its symmetric point is
/// `(C₂ₓ₂(D)/3, C₂ₓ₂(D)/3)`.
pub fn achievable_region(c21: f64, c22d: f64) -> Result<RateRegion> {
    contract!(c21 > 0.0 && c21.is_finite(), "C21 must be positive, got {c21}");
    contract!(c22d > 0.0 && c22d.is_finite(), "C22(D) must be positive, got {c22d}");
    let alpha = achievable_slope(c21, c22d);
    if alpha < 0.0 {
        return Err(Error::Domain(format!(
            "3*C21/C22(D) = {} < 1; the achievable region needs 3*C21/C22(D) >= 1 (holds for D >= 4)",
            alpha + 1.0
        )));
    }
    RateRegion::new(vec![
        HalfPlane::new(1.0, alpha, c21)?,
        HalfPlane::new(alpha, 1.0, c21)?,
    ])
}

/// The corner points whose time sharing spans the achievable region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Corners {
    /// Symmetric point.
    pub a: RatePair,
    /// Largest single-user rate for user 1.
    pub b: RatePair,
    /// Largest single-user rate for user 2.
    pub c: RatePair,
    /// Set when the region has collapsed to a point and the labels coincide.
    pub collapsed: bool,
}

pub fn corner_points(region: &RateRegion) -> Corners {
    if region.is_empty() {
        let o = RatePair::ORIGIN;
        return Corners { a: o, b: o, c: o, collapsed: true };
    }
    let t = region.symmetric_extent().max(0.0);
    let a = RatePair::new(t, t);
    let b = RatePair::new(region.axis_extent_r1().max(0.0), 0.0);
    let c = RatePair::new(0.0, region.axis_extent_r2().max(0.0));
    let collapsed = a.dist(&b) <= GEOMETRY_TOL && a.dist(&c) <= GEOMETRY_TOL;
    Corners { a, b, c, collapsed }
}

/// Smallest `τ ≥ 0` with `outer ⊖ (τ, τ) ⊆ inner`, by bisection.
pub fn per_user_gap(outer: &RateRegion, inner: &RateRegion) -> Result<f64> {
    contract!(
        is_subset(inner, outer),
        "inner region is not contained in the outer region"
    );
    if is_subset(outer, inner) {
        return Ok(0.0);
    }
    let extent = outer
        .vertices()
        .iter()
        .map(|p| p.r1.max(p.r2))
        .fold(0.0, f64::max);
    let (mut lo, mut hi) = (0.0, extent + 1.0);
    while hi - lo > 1e-11 {
        let mid = 0.5 * (lo + hi);
        if is_subset(&outer.erode(mid), inner) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Two-column `R1,R2` vertex listing.
pub fn write_vertices_csv<W: Write>(region: &RateRegion, mut w: W) -> Result<()> {
    writeln!(w, "R1,R2")?;
    for p in region.vertices() {
        writeln!(w, "{},{}", sig(p.r1), sig(p.r2))?;
    }
    Ok(())
}

pub fn read_vertices_csv<R: BufRead>(r: R) -> Result<Vec<RatePair>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("R1") {
            continue;
        }
        let bad = || Error::Usage(format!("malformed vertex line '{line}'"));
        let (x, y) = line.split_once(',').ok_or_else(bad)?;
        out.push(RatePair::new(
            x.trim().parse().map_err(|_| bad())?,
            y.trim().parse().map_err(|_| bad())?,
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(region: &RateRegion) -> Vec<(f64, f64)> {
        region.vertices().iter().map(|p| (p.r1, p.r2)).collect()
    }

    fn close(a: &[(f64, f64)], b: &[(f64, f64)]) -> bool {
        a.len() == b.len()
            && a.iter().zip(b).all(|(p, q)| (p.0 - q.0).abs() < 1e-12 && (p.1 - q.1).abs() < 1e-12)
    }

    #[test]
    fn box_keeps_its_far_corner() {
        let r = RateRegion::new(vec![
            HalfPlane::new(1.0, 0.0, 2.0).unwrap(),
            HalfPlane::new(0.0, 1.0, 1.0).unwrap(),
        ])
        .unwrap();
        assert!(close(&pts(&r), &[(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (0.0, 1.0)]), "{:?}", pts(&r));
    }

    #[test]
    fn outer_vertices() {
        let r = outer_region(3.0).unwrap();
        assert!(close(&pts(&r), &[(0.0, 0.0), (3.0, 0.0), (2.0, 2.0), (0.0, 3.0)]));
        let z = outer_region(0.0).unwrap();
        assert_eq!(pts(&z), vec![(0.0, 0.0)]);
        assert!(outer_region(-1.0).is_err());
        let c = 1.7;
        assert_eq!(outer_region(c).unwrap().symmetric_extent(), 2.0 * c / 3.0);
    }

    #[test]
    fn achievable_triangle_when_slope_is_one() {
        let r = achievable_region(3.0, 4.5).unwrap();
        assert_eq!(achievable_slope(3.0, 4.5), 1.0);
        assert!(close(&pts(&r), &[(0.0, 0.0), (3.0, 0.0), (0.0, 3.0)]));
        let k = corner_points(&r);
        assert_eq!((k.a.r1, k.a.r2), (1.5, 1.5));
        assert_eq!((k.b.r1, k.b.r2), (3.0, 0.0));
        assert_eq!((k.c.r1, k.c.r2), (0.0, 3.0));
        assert!(!k.collapsed);
    }

    #[test]
    fn achievable_corners_with_steep_slope() {
        let r = achievable_region(2.0, 2.0).unwrap();
        let k = corner_points(&r);
        assert!((k.a.r1 - 2.0 / 3.0).abs() < 1e-15 && (k.a.r2 - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!((k.b.r1, k.b.r2), (1.0, 0.0));
        assert_eq!((k.c.r1, k.c.r2), (0.0, 1.0));
        // (c21, 0) lies inside only for α ≤ 1.
        assert!(!r.contains(&RatePair::new(2.0, 0.0)));
        assert!(achievable_region(3.0, 6.0).unwrap().contains(&RatePair::new(3.0, 0.0)));
    }

    #[test]
    fn achievable_precondition() {
        assert!(matches!(achievable_region(1.0, 3.5), Err(Error::Domain(_))));
        assert!(achievable_region(1.0, 3.0).is_ok());
        assert!(achievable_region(0.0, 1.0).is_err());
    }

    #[test]
    fn erosion_examples() {
        let r = RateRegion::new(vec![
            HalfPlane::new(1.0, 2.0, 6.0).unwrap(),
            HalfPlane::new(2.0, 1.0, 6.0).unwrap(),
        ])
        .unwrap();
        let e = r.erode(1.0);
        assert_eq!(
            e.constraints(),
            vec![HalfPlane::new(1.0, 2.0, 3.0).unwrap(), HalfPlane::new(2.0, 1.0, 3.0).unwrap()]
        );
        assert_eq!(r.erode(0.0).vertices(), r.vertices());
        assert!(r.erode(3.0).is_empty());
        assert!(r.erode(2.5).is_empty());
        assert!(!r.erode(2.0).is_empty());
    }

    #[test]
    fn subset_examples() {
        let outer = outer_region(3.0).unwrap();
        let inner = achievable_region(3.0, 4.5).unwrap();
        assert!(is_subset(&outer, &outer));
        assert!(is_subset(&inner, &outer));
        assert!(!is_subset(&outer, &inner));
        assert!(is_subset(&outer.erode(10.0), &inner));
    }

    #[test]
    fn gap_examples() {
        let outer = RateRegion::new(vec![HalfPlane::new(1.0, 1.0, 4.0).unwrap()]).unwrap();
        let inner = RateRegion::new(vec![HalfPlane::new(1.0, 1.0, 2.0).unwrap()]).unwrap();
        assert!((per_user_gap(&outer, &inner).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(per_user_gap(&outer, &outer).unwrap(), 0.0);
        assert!(matches!(per_user_gap(&inner, &outer), Err(Error::Contract(_))));
    }

    #[test]
    fn vertex_csv_roundtrip() {
        let r = outer_region(3.0).unwrap();
        let mut buf = Vec::new();
        write_vertices_csv(&r, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "R1,R2\n0,0\n3,0\n2,2\n0,3\n");
        let back = RateRegion::from_vertices(&read_vertices_csv(buf.as_slice()).unwrap()).unwrap();
        assert!(is_subset(&back, &r) && is_subset(&r, &back));
    }

    #[test]
    fn unbounded_rejected() {
        assert!(RateRegion::new(vec![HalfPlane::new(1.0, 0.0, 1.0).unwrap()]).is_err());
        assert!(HalfPlane::new(-1.0, 1.0, 1.0).is_err());
        assert!(HalfPlane::new(0.0, 0.0, 1.0).is_err());
    }
}
