//! Planar primitives for unit circles: intersections, containment, angular
//! intervals, and the boundary of a union of disks.
//!
//! All comparisons go through the single tolerance [`TOL`]. Angles are
//! canonicalized to `[0, 2π)` and angular intervals are traversed
//! counterclockwise from their start.

use crate::error::GeomError;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Global geometric tolerance in plane units.
pub const TOL: f64 = 1e-9;

/// Scale of the deterministic perturbation applied on degeneracy.
pub const JITTER: f64 = 1e-7;

pub type DiskId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// A weighted unit disk. The radius is fixed at 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub id: DiskId,
    pub center: Point,
    pub weight: f64,
}

impl Disk {
    pub fn new(id: DiskId, x: f64, y: f64, weight: f64) -> Self {
        Disk { id, center: Point::new(x, y), weight }
    }
}

/// True iff `p` lies within distance `1 + tol` of the disk center.
/// The boundary counts as covered.
pub fn point_in_disk(p: &Point, d: &Disk, tol: f64) -> bool {
    p.dist(&d.center) <= 1.0 + tol
}

/// Strict interior membership: distance `< 1 - tol`.
pub fn point_in_disk_interior(p: &Point, d: &Disk, tol: f64) -> bool {
    p.dist(&d.center) < 1.0 - tol
}

/// Canonicalize an angle into `[0, 2π)`.
pub fn norm_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// CCW angular distance from `from` to `to` in `[0, 2π)`.
pub fn ccw_delta(from: f64, to: f64) -> f64 {
    norm_angle(to - from)
}

/// A counterclockwise angular interval on a unit circle.
///
/// `extent` may be `2π` for a full circle (union boundary of an isolated
/// disk); uncovered arcs always keep `extent < π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularInterval {
    pub disk_id: DiskId,
    pub start: f64,
    pub extent: f64,
}

impl AngularInterval {
    pub fn new(disk_id: DiskId, start: f64, extent: f64) -> Self {
        debug_assert!(extent > 0.0 && extent <= TAU + TOL);
        AngularInterval { disk_id, start: norm_angle(start), extent: extent.min(TAU) }
    }

    pub fn full(disk_id: DiskId) -> Self {
        AngularInterval { disk_id, start: 0.0, extent: TAU }
    }

    pub fn end(&self) -> f64 {
        norm_angle(self.start + self.extent)
    }

    /// Membership with wraparound, slack `tol` (radians) at both ends.
    pub fn contains(&self, angle: f64, tol: f64) -> bool {
        if self.extent >= TAU - TOL {
            return true;
        }
        let d = ccw_delta(self.start, angle);
        d <= self.extent + tol || d >= TAU - tol
    }

    /// Point on the owning circle at CCW offset `t` from the start.
    pub fn point_at(&self, center: &Point, t: f64) -> Point {
        let a = self.start + t;
        Point::new(center.x + a.cos(), center.y + a.sin())
    }

    pub fn midpoint(&self, center: &Point) -> Point {
        self.point_at(center, self.extent / 2.0)
    }
}

/// The central angle of an interval. Callers working with uncovered arcs
/// assert `extent < π` separately.
pub fn central_angle(interval: &AngularInterval) -> f64 {
    interval.extent
}

/// Returns the intersection points of two unit circles, sorted by angle
/// around `a.center`. One point within tolerance of tangency, two for a
/// proper crossing, empty when disjoint, nested, or coincident.
pub fn circle_intersections(a: &Disk, b: &Disk) -> Vec<Point> {
    let d = a.center.dist(&b.center);
    if d <= TOL {
        // coincident centers: degenerate, handled by the caller
        return vec![];
    }
    if d > 2.0 + TOL {
        return vec![];
    }
    if (d - 2.0).abs() <= TOL {
        // tangency: midpoint of the two centers
        return vec![Point::new(
            (a.center.x + b.center.x) / 2.0,
            (a.center.y + b.center.y) / 2.0,
        )];
    }
    let half = d / 2.0;
    let h = (1.0 - half * half).max(0.0).sqrt();
    let ux = (b.center.x - a.center.x) / d;
    let uy = (b.center.y - a.center.y) / d;
    let mx = a.center.x + half * ux;
    let my = a.center.y + half * uy;
    let p1 = Point::new(mx - h * uy, my + h * ux);
    let p2 = Point::new(mx + h * uy, my - h * ux);
    let a1 = norm_angle((p1.y - a.center.y).atan2(p1.x - a.center.x));
    let a2 = norm_angle((p2.y - a.center.y).atan2(p2.x - a.center.x));
    if a1 <= a2 {
        vec![p1, p2]
    } else {
        vec![p2, p1]
    }
}

/// Angle of point `p` as seen from `center`, in `[0, 2π)`.
pub fn angle_from(center: &Point, p: &Point) -> f64 {
    norm_angle((p.y - center.y).atan2(p.x - center.x))
}

/// Subtract a set of covered CCW intervals `[start, start+extent]` from the
/// full circle, returning the uncovered intervals sorted by start angle.
///
/// Intervals shorter than `sliver` radians on either side are treated as
/// degenerate and reported as an error.
pub fn subtract_intervals(
    covered: &[(f64, f64)],
    sliver: f64,
) -> Result<Vec<(f64, f64)>, GeomError> {
    if covered.is_empty() {
        return Ok(vec![(0.0, TAU)]);
    }
    // split wrap-around intervals at 0
    let mut segs: Vec<(f64, f64)> = Vec::new();
    for &(s, e) in covered {
        let s = norm_angle(s);
        if e >= TAU - TOL {
            return Ok(vec![]);
        }
        let end = s + e;
        if end > TAU {
            segs.push((s, TAU));
            segs.push((0.0, end - TAU));
        } else {
            segs.push((s, end));
        }
    }
    segs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // merge overlapping
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for seg in segs {
        match merged.last_mut() {
            Some(last) if seg.0 <= last.1 + TOL => {
                last.1 = last.1.max(seg.1);
            }
            _ => merged.push(seg),
        }
    }
    if merged.len() == 1 && merged[0].0 <= TOL && merged[0].1 >= TAU - TOL {
        return Ok(vec![]);
    }
    let mut out = Vec::new();
    for i in 0..merged.len() {
        let gap_start = merged[i].1;
        let gap_end = if i + 1 < merged.len() { merged[i + 1].0 } else { merged[0].0 + TAU };
        let len = gap_end - gap_start;
        if len <= 0.0 {
            continue;
        }
        if len < sliver {
            return Err(GeomError::DegenerateArrangement(format!(
                "sliver arc of angular length {len:.3e}"
            )));
        }
        out.push((norm_angle(gap_start), len));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    if out.is_empty() {
        // covered intervals wrapped the whole circle
        return Ok(vec![]);
    }
    Ok(out)
}

/// One piece of a union-boundary loop: an interval of a specific circle,
/// with its cumulative arclength offset within the loop.
#[derive(Debug, Clone)]
pub struct BoundarySeg {
    pub interval: AngularInterval,
    pub center: Point,
    /// Cumulative arclength of the segment start within its loop.
    pub s0: f64,
}

impl BoundarySeg {
    pub fn len(&self) -> f64 {
        self.interval.extent
    }

    pub fn start_point(&self) -> Point {
        self.interval.point_at(&self.center, 0.0)
    }

    pub fn end_point(&self) -> Point {
        self.interval.point_at(&self.center, self.interval.extent)
    }

    /// Point at arclength `s - s0` into the segment.
    pub fn point_at_s(&self, s: f64) -> Point {
        self.interval.point_at(&self.center, s - self.s0)
    }
}

/// A closed boundary curve of the union: a cyclic sequence of segments.
#[derive(Debug, Clone)]
pub struct BoundaryLoop {
    pub segs: Vec<BoundarySeg>,
    pub total_len: f64,
}

impl BoundaryLoop {
    /// Segment index owning arclength position `s` (cyclic).
    pub fn seg_at(&self, s: f64) -> usize {
        let s = s.rem_euclid(self.total_len);
        match self.segs.binary_search_by(|seg| seg.s0.total_cmp(&s)) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        }
    }

    pub fn point_at(&self, s: f64) -> Point {
        let s = s.rem_euclid(self.total_len);
        let seg = &self.segs[self.seg_at(s)];
        seg.point_at_s(s)
    }

    /// Forward arclength from `a` to `b` (cyclic).
    pub fn forward_dist(&self, a: f64, b: f64) -> f64 {
        (b - a).rem_euclid(self.total_len)
    }
}

/// Boundary of a union of disks: one or more closed loops.
#[derive(Debug, Clone, Default)]
pub struct UnionBoundary {
    pub loops: Vec<BoundaryLoop>,
}

impl UnionBoundary {
    pub fn seg_count(&self) -> usize {
        self.loops.iter().map(|l| l.segs.len()).sum()
    }

    /// Locate a point known to lie on circle `disk` on the boundary.
    /// Returns `(loop index, arclength position)`.
    pub fn locate_on_disk(&self, disk: &Disk, p: &Point) -> Option<(usize, f64)> {
        let theta = angle_from(&disk.center, p);
        for (li, lp) in self.loops.iter().enumerate() {
            for seg in &lp.segs {
                if seg.interval.disk_id == disk.id && seg.interval.contains(theta, 1e-7) {
                    let off = ccw_delta(seg.interval.start, theta).min(seg.interval.extent);
                    return Some((li, seg.s0 + off));
                }
            }
        }
        None
    }
}

/// Uncovered angular intervals of `disk`'s circle with respect to `others`.
/// Records, per interval, nothing but the geometry; endpoint ownership is
/// recovered by the caller when needed.
pub fn uncovered_intervals(
    disk: &Disk,
    others: &[Disk],
    sliver: f64,
) -> Result<Vec<AngularInterval>, GeomError> {
    let mut covered: Vec<(f64, f64)> = Vec::new();
    for o in others {
        if o.id == disk.id {
            continue;
        }
        let d = disk.center.dist(&o.center);
        if d <= TOL {
            return Err(GeomError::DegenerateArrangement(format!(
                "coincident centers {} and {}",
                disk.id, o.id
            )));
        }
        if (d - 2.0).abs() <= TOL {
            return Err(GeomError::DegenerateArrangement(format!(
                "near-tangent circles {} and {}",
                disk.id, o.id
            )));
        }
        if d >= 2.0 {
            continue;
        }
        // the arc of `disk` inside `o` spans theta +- acos(d/2)
        let theta = angle_from(&disk.center, &o.center);
        let half = (d / 2.0).clamp(-1.0, 1.0).acos();
        covered.push((norm_angle(theta - half), 2.0 * half));
    }
    let gaps = subtract_intervals(&covered, sliver)?;
    Ok(gaps
        .into_iter()
        .map(|(s, e)| AngularInterval::new(disk.id, s, e))
        .collect())
}

/// Compute the boundary of the union of `disks` as closed loops.
///
/// Fails with `DegenerateArrangement` on tangencies, coincident centers,
/// slivers, or ambiguous stitching (concurrent triples); the caller is
/// expected to perturb and retry (see [`union_boundary_perturbed`]).
pub fn union_boundary(disks: &[Disk]) -> Result<UnionBoundary, GeomError> {
    assert!(!disks.is_empty(), "union_boundary needs at least one disk");
    let sliver = 1e-9;
    struct RawArc {
        disk_idx: usize,
        interval: AngularInterval,
        start_pt: Point,
        end_pt: Point,
    }
    let mut arcs: Vec<RawArc> = Vec::new();
    for (i, d) in disks.iter().enumerate() {
        for interval in uncovered_intervals(d, disks, sliver)? {
            let start_pt = interval.point_at(&d.center, 0.0);
            let end_pt = interval.point_at(&d.center, interval.extent);
            arcs.push(RawArc { disk_idx: i, interval, start_pt, end_pt });
        }
    }
    let match_tol = 1e-9;
    let n = arcs.len();
    let mut used = vec![false; n];
    let mut loops = Vec::new();
    for first in 0..n {
        if used[first] {
            continue;
        }
        let mut order = vec![first];
        used[first] = true;
        if arcs[first].interval.extent >= TAU - TOL {
            // isolated full circle
        } else {
            loop {
                let cur_end = arcs[*order.last().unwrap()].end_pt;
                let mut next: Option<usize> = None;
                for (j, arc) in arcs.iter().enumerate() {
                    if arc.interval.extent >= TAU - TOL {
                        continue;
                    }
                    if arc.start_pt.dist(&cur_end) <= match_tol {
                        if let Some(k) = next {
                            if k != j {
                                return Err(GeomError::DegenerateArrangement(format!(
                                    "ambiguous stitch at ({:.6},{:.6})",
                                    cur_end.x, cur_end.y
                                )));
                            }
                        }
                        next = Some(j);
                    }
                }
                let j = next.ok_or_else(|| {
                    GeomError::DegenerateArrangement(format!(
                        "no continuation at ({:.6},{:.6})",
                        cur_end.x, cur_end.y
                    ))
                })?;
                if j == first {
                    break;
                }
                if used[j] {
                    return Err(GeomError::DegenerateArrangement(
                        "stitching revisited an arc".into(),
                    ));
                }
                used[j] = true;
                order.push(j);
            }
        }
        let mut segs = Vec::with_capacity(order.len());
        let mut s = 0.0;
        for &idx in &order {
            let arc = &arcs[idx];
            segs.push(BoundarySeg {
                interval: arc.interval,
                center: disks[arc.disk_idx].center,
                s0: s,
            });
            s += arc.interval.extent;
        }
        loops.push(BoundaryLoop { segs, total_len: s });
    }
    Ok(UnionBoundary { loops })
}

/// Deterministic id-seeded jitter for perturbation retries. The magnitude
/// grows with the attempt (still capped at [`JITTER`]) so a retry always
/// moves farther than the previous one.
fn jitter_offset(id: DiskId, attempt: u32) -> (f64, f64) {
    // cheap splitmix-style hash; stable across runs
    let mut h = (id as u64).wrapping_mul(0x9e3779b97f4a7c15) ^ ((attempt as u64) << 32);
    h ^= h >> 30;
    h = h.wrapping_mul(0xbf58476d1ce4e5b9);
    h ^= h >> 27;
    h = h.wrapping_mul(0x94d049bb133111eb);
    h ^= h >> 31;
    let a = ((h & 0xffff_ffff) as f64 / u32::MAX as f64) * 2.0 - 1.0;
    let b = ((h >> 32) as f64 / u32::MAX as f64) * 2.0 - 1.0;
    let scale = JITTER * attempt.min(3) as f64 / 3.0;
    // keep a floor so attempt 1 already clears the degeneracy bands
    let scale = scale.max(JITTER / 3.0);
    (a * scale, b * scale)
}

/// Apply the attempt-`k` perturbation to a disk set (attempt 0 = identity).
pub fn perturbed(disks: &[Disk], attempt: u32) -> Vec<Disk> {
    if attempt == 0 {
        return disks.to_vec();
    }
    disks
        .iter()
        .map(|d| {
            let (dx, dy) = jitter_offset(d.id, attempt);
            Disk { id: d.id, center: Point::new(d.center.x + dx, d.center.y + dy), weight: d.weight }
        })
        .collect()
}

/// Union boundary with the degenerate-arrangement retry loop: on failure the
/// inputs are jittered by id-seeded offsets and recomputed, up to 3 retries.
/// Returns the boundary together with the (possibly perturbed) disks used.
pub fn union_boundary_perturbed(disks: &[Disk]) -> Result<(UnionBoundary, Vec<Disk>), GeomError> {
    let mut last = None;
    for attempt in 0..4 {
        let ds = perturbed(disks, attempt);
        match union_boundary(&ds) {
            Ok(b) => return Ok((b, ds)),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn disk(id: DiskId, x: f64, y: f64) -> Disk {
        Disk::new(id, x, y, 1.0)
    }

    #[test]
    fn intersections_disjoint() {
        assert!(circle_intersections(&disk(0, 0.0, 0.0), &disk(1, 3.0, 0.0)).is_empty());
    }

    #[test]
    fn intersections_tangent() {
        let pts = circle_intersections(&disk(0, 0.0, 0.0), &disk(1, 2.0, 0.0));
        assert_eq!(pts.len(), 1);
        assert!((pts[0].x - 1.0).abs() < TOL && pts[0].y.abs() < TOL);
    }

    #[test]
    fn intersections_unit_apart() {
        let pts = circle_intersections(&disk(0, 0.0, 0.0), &disk(1, 1.0, 0.0));
        assert_eq!(pts.len(), 2);
        let r3 = 3f64.sqrt() / 2.0;
        // sorted by angle around the first center: +sqrt(3)/2 first (smaller angle)
        assert!((pts[0].x - 0.5).abs() < 1e-12 && (pts[0].y - r3).abs() < 1e-12);
        assert!((pts[1].x - 0.5).abs() < 1e-12 && (pts[1].y + r3).abs() < 1e-12);
        // cross-check by substitution into both circle equations
        for p in &pts {
            assert!((p.x * p.x + p.y * p.y - 1.0).abs() < 1e-12);
            assert!(((p.x - 1.0).powi(2) + p.y * p.y - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn point_in_disk_boundary_counts() {
        let d = disk(0, 0.0, 0.0);
        assert!(point_in_disk(&Point::new(0.0, 0.0), &d, 0.0));
        assert!(point_in_disk(&Point::new(1.0, 0.0), &d, 0.0));
        assert!(!point_in_disk(&Point::new(1.0000001, 0.0), &d, 1e-9));
    }

    #[test]
    fn central_angle_from_endpoints() {
        // endpoints (1,0) -> (0,1) CCW on the unit circle at the origin
        let c = Point::new(0.0, 0.0);
        let a0 = angle_from(&c, &Point::new(1.0, 0.0));
        let a1 = angle_from(&c, &Point::new(0.0, 1.0));
        let iv = AngularInterval::new(0, a0, ccw_delta(a0, a1));
        assert!((central_angle(&iv) - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn union_single_disk_is_full_circle() {
        let b = union_boundary(&[disk(0, 0.0, 0.0)]).unwrap();
        assert_eq!(b.loops.len(), 1);
        assert_eq!(b.loops[0].segs.len(), 1);
        assert!((b.loops[0].total_len - TAU).abs() < TOL);
    }

    #[test]
    fn union_two_disjoint_disks() {
        let b = union_boundary(&[disk(0, 0.0, 0.0), disk(1, 5.0, 0.0)]).unwrap();
        assert_eq!(b.loops.len(), 2);
    }

    #[test]
    fn union_two_overlapping_disks_arc_lengths() {
        // centers at distance 1: each boundary arc spans 2*pi - 2*acos(1/2) = 4*pi/3
        let b = union_boundary(&[disk(0, 0.0, 0.0), disk(1, 1.0, 0.0)]).unwrap();
        assert_eq!(b.loops.len(), 1);
        assert_eq!(b.loops[0].segs.len(), 2);
        for seg in &b.loops[0].segs {
            assert!((seg.interval.extent - 4.0 * PI / 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn union_boundary_points_on_union() {
        let disks = vec![disk(0, 0.0, 0.0), disk(1, 1.0, 0.3), disk(2, 0.4, 1.1)];
        let b = union_boundary(&disks).unwrap();
        for lp in &b.loops {
            for seg in &lp.segs {
                for k in 0..64 {
                    let t = seg.interval.extent * (k as f64 + 0.5) / 64.0;
                    let p = seg.interval.point_at(&seg.center, t);
                    // on the owning circle
                    assert!((p.dist(&seg.center) - 1.0).abs() < 1e-9);
                    // not strictly inside any other disk
                    for d in &disks {
                        if d.id != seg.interval.disk_id {
                            assert!(p.dist(&d.center) >= 1.0 - 1e-9);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn tangency_detected_and_perturbation_recovers() {
        let disks = vec![disk(0, 0.0, 0.0), disk(1, 2.0, 0.0)];
        assert!(union_boundary(&disks).is_err());
        let (b, _) = union_boundary_perturbed(&disks).unwrap();
        assert!(!b.loops.is_empty());
    }

    #[test]
    fn perturbation_is_deterministic() {
        let disks = vec![disk(0, 0.1, 0.2), disk(1, 0.5, 0.6)];
        let a = perturbed(&disks, 2);
        let b = perturbed(&disks, 2);
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!(x.center, y.center);
        }
        for (x, y) in a.iter().zip(disks.iter()) {
            assert!(x.center.dist(&y.center) <= JITTER * 1.5);
        }
    }
}
