//! Square gadgets: the μ-grid inside a block, farthest-pair gadgets per
//! square, central / core-central areas, active regions, and dome regions.

use crate::geom::{circle_intersections, Disk, DiskId, Point, TOL};
use std::collections::BTreeMap;

/// μ-square grid covering a block (and a margin for disks centered outside
/// the block but able to reach into it).
#[derive(Debug, Clone)]
pub struct SquareGrid {
    pub origin: Point,
    pub mu: f64,
    /// Squares per block side; `K * mu == L` up to tolerance.
    pub k: u32,
}

impl SquareGrid {
    /// Grid cell of a point. Cells are half-open `[i·μ, (i+1)·μ)` and may
    /// have negative indices for the margin around the block.
    pub fn cell_of(&self, p: &Point) -> (i32, i32) {
        (
            ((p.x - self.origin.x) / self.mu).floor() as i32,
            ((p.y - self.origin.y) / self.mu).floor() as i32,
        )
    }
}

/// `mu = L / ceil(L / min(eps, 0.7))`, so that `K = L / mu` is an integer
/// and a unit disk centered in a square covers the whole square
/// (μ ≤ 0.7 < 1/√2 keeps the square diagonal below 1 with slack).
pub fn build_grid(block_origin: Point, l: f64, eps: f64) -> SquareGrid {
    assert!(eps > 0.0 && l > 0.0);
    let cap = eps.min(0.7);
    let k = (l / cap).ceil() as u32;
    let mu = l / k as f64;
    SquareGrid { origin: block_origin, mu, k }
}

/// The farthest-pair gadget of one grid square, or a lone disk when the
/// square holds a single center.
#[derive(Debug, Clone)]
pub struct Gadget {
    pub square: (i32, i32),
    pub ds: DiskId,
    pub dt: DiskId,
    pub ds_center: Point,
    pub dt_center: Point,
    /// Intersections of the two gadget circles; `p` on the positive side of
    /// the axis, `q` on the negative side. Unset for singleton gadgets.
    pub p: Option<Point>,
    pub q: Option<Point>,
    /// Unit vector along the segment between the two centers.
    pub axis: (f64, f64),
    pub r_st: f64,
}

impl Gadget {
    pub fn is_singleton(&self) -> bool {
        self.ds == self.dt
    }

    pub fn disk_ids(&self) -> Vec<DiskId> {
        if self.is_singleton() {
            vec![self.ds]
        } else {
            vec![self.ds, self.dt]
        }
    }

    /// Signed side of the axis line through the two centers: positive for
    /// the halfplane containing `p`.
    pub fn side_of(&self, pt: &Point) -> f64 {
        let (ax, ay) = self.axis;
        ax * (pt.y - self.ds_center.y) - ay * (pt.x - self.ds_center.x)
    }

    /// Central-area membership: within `r_st` of both gadget centers.
    pub fn in_central(&self, pt: &Point) -> bool {
        !self.is_singleton()
            && pt.dist(&self.ds_center) <= self.r_st + TOL
            && pt.dist(&self.dt_center) <= self.r_st + TOL
    }
}

/// Core-central membership: within 1 of both circle-intersection points.
pub fn in_core_central(pt: &Point, g: &Gadget) -> Option<bool> {
    match (g.p, g.q) {
        (Some(p), Some(q)) => Some(pt.dist(&p) <= 1.0 + TOL && pt.dist(&q) <= 1.0 + TOL),
        _ => None,
    }
}

/// Build the gadget for one square. Ties on the farthest pair break to the
/// lexicographically smallest id pair. Panics if the square is empty.
pub fn build_gadget(square: (i32, i32), disks: &[Disk]) -> Gadget {
    assert!(!disks.is_empty());
    if disks.len() == 1 {
        let d = &disks[0];
        return Gadget {
            square,
            ds: d.id,
            dt: d.id,
            ds_center: d.center,
            dt_center: d.center,
            p: None,
            q: None,
            axis: (1.0, 0.0),
            r_st: 0.0,
        };
    }
    let mut best: Option<(f64, DiskId, DiskId)> = None;
    for i in 0..disks.len() {
        for j in i + 1..disks.len() {
            let (a, b) = if disks[i].id < disks[j].id { (i, j) } else { (j, i) };
            let dist = disks[a].center.dist(&disks[b].center);
            let key = (disks[a].id, disks[b].id);
            let better = match best {
                None => true,
                Some((bd, bi, bj)) => {
                    dist > bd + TOL || ((dist - bd).abs() <= TOL && key < (bi, bj))
                }
            };
            if better {
                best = Some((dist, key.0, key.1));
            }
        }
    }
    let (r_st, ds_id, dt_id) = best.unwrap();
    let ds = disks.iter().find(|d| d.id == ds_id).unwrap();
    let dt = disks.iter().find(|d| d.id == dt_id).unwrap();
    let (axis, p, q) = if r_st <= TOL {
        ((1.0, 0.0), None, None)
    } else {
        let ax = (dt.center.x - ds.center.x) / r_st;
        let ay = (dt.center.y - ds.center.y) / r_st;
        let pts = circle_intersections(ds, dt);
        // classify the two intersections by side of the axis
        let mut p = None;
        let mut q = None;
        for pt in &pts {
            let side = ax * (pt.y - ds.center.y) - ay * (pt.x - ds.center.x);
            if side > 0.0 {
                p = Some(*pt);
            } else {
                q = Some(*pt);
            }
        }
        ((ax, ay), p, q)
    };
    Gadget {
        square,
        ds: ds.id,
        dt: dt.id,
        ds_center: ds.center,
        dt_center: dt.center,
        p,
        q,
        axis,
        r_st,
    }
}

/// Group disks by grid cell and build one gadget per nonempty square,
/// in deterministic cell order.
pub fn gadgets_for(grid: &SquareGrid, disks: &[Disk]) -> Vec<Gadget> {
    let mut cells: BTreeMap<(i32, i32), Vec<Disk>> = BTreeMap::new();
    for d in disks {
        cells.entry(grid.cell_of(&d.center)).or_default().push(*d);
    }
    cells.into_iter().map(|(cell, ds)| build_gadget(cell, &ds)).collect()
}

/// Dome descriptor for one halfplane of a gadget: the dome point `D` and
/// the data for the membership predicate `(D(D,1) − D_s − D_t) ∩ H^σ`.
#[derive(Debug, Clone)]
pub struct DomeRegion {
    pub dome_point: Point,
    pub side: f64,
    ds_center: Point,
    dt_center: Point,
    axis: (f64, f64),
    /// Tangency points of `D(P,2)` with the two gadget disks.
    pub qs: Point,
    pub qt: Point,
}

impl DomeRegion {
    pub fn contains(&self, pt: &Point) -> bool {
        let side = self.axis.0 * (pt.y - self.ds_center.y) - self.axis.1 * (pt.x - self.ds_center.x);
        if side * self.side < 0.0 {
            return false;
        }
        pt.dist(&self.dome_point) <= 1.0 + TOL
            && pt.dist(&self.ds_center) > 1.0 - TOL
            && pt.dist(&self.dt_center) > 1.0 - TOL
    }
}

/// Build the dome region for the halfplane of sign `side` (+1 uses the
/// gadget's `p` corner, -1 uses `q`). `None` for singleton gadgets.
pub fn dome_region(g: &Gadget, side: f64) -> Option<DomeRegion> {
    let corner = if side > 0.0 { g.p? } else { g.q? };
    // D(corner, 2) is internally tangent to each unit gadget disk at the
    // point on the ray from the corner through the disk center, at radius 2
    let tangent = |c: Point| {
        let d = corner.dist(&c);
        Point::new(corner.x + 2.0 * (c.x - corner.x) / d, corner.y + 2.0 * (c.y - corner.y) / d)
    };
    let qs = tangent(g.ds_center);
    let qt = tangent(g.dt_center);
    let a = Disk::new(u32::MAX, qs.x, qs.y, 0.0);
    let b = Disk::new(u32::MAX - 1, qt.x, qt.y, 0.0);
    let cands = circle_intersections(&a, &b);
    // the dome point is the intersection closer to the gadget corner
    let dome_point = cands
        .into_iter()
        .min_by(|u, v| u.dist(&corner).total_cmp(&v.dist(&corner)))?;
    Some(DomeRegion {
        dome_point,
        side,
        ds_center: g.ds_center,
        dt_center: g.dt_center,
        axis: g.axis,
        qs,
        qt,
    })
}

/// An active region of a gadget: the disks centered in the core-central
/// area that leave uncovered area on one side of the axis.
#[derive(Debug, Clone)]
pub struct ActiveRegion {
    pub gadget_idx: usize,
    pub side: f64,
    pub disk_ids: Vec<DiskId>,
}

/// Does `(disk − D_s − D_t) ∩ H^side` have positive area? Tested through the
/// disk's boundary: the region is nonempty iff part of the circle escapes
/// both gadget disks on that side.
pub fn pokes_out(disk: &Disk, g: &Gadget, side: f64) -> bool {
    let gadget_disks = [
        Disk::new(0, g.ds_center.x, g.ds_center.y, 0.0),
        Disk::new(1, g.dt_center.x, g.dt_center.y, 0.0),
    ];
    let samples = 720;
    for k in 0..samples {
        let a = k as f64 / samples as f64 * std::f64::consts::TAU;
        let pt = Point::new(disk.center.x + a.cos(), disk.center.y + a.sin());
        if g.side_of(&pt) * side > TOL
            && gadget_disks.iter().all(|gd| pt.dist(&gd.center) > 1.0 + TOL)
        {
            return true;
        }
    }
    false
}

/// Active regions of gadget `gadget_idx` over the remaining (non-helper)
/// disks: one region per halfplane that has at least one contributing disk.
pub fn active_regions(gadgets: &[Gadget], gadget_idx: usize, remaining: &[Disk]) -> Vec<ActiveRegion> {
    let g = &gadgets[gadget_idx];
    if g.is_singleton() || g.p.is_none() {
        return vec![];
    }
    let mut out = Vec::new();
    for side in [1.0, -1.0] {
        let mut ids = Vec::new();
        for d in remaining {
            if in_core_central(&d.center, g) == Some(true) && pokes_out(d, g, side) {
                ids.push(d.id);
            }
        }
        if !ids.is_empty() {
            ids.sort_unstable();
            out.push(ActiveRegion { gadget_idx, side, disk_ids: ids });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_formula_cases() {
        let g = build_grid(Point::new(0.0, 0.0), 1.0, 0.5);
        assert!((g.mu - 0.5).abs() < 1e-12);
        assert_eq!(g.k, 2);
        let g = build_grid(Point::new(0.0, 0.0), 5.0, 1.0);
        assert!((g.mu - 0.625).abs() < 1e-12);
        assert_eq!(g.k, 8);
        // any eps: mu stays below 1/sqrt(2) so the square diagonal is <= 1
        for eps in [0.1, 0.3, 0.9, 2.0, 10.0] {
            let g = build_grid(Point::new(0.0, 0.0), 6.0, eps);
            assert!(g.mu <= 0.7 + 1e-12);
            assert!((g.k as f64 * g.mu - 6.0).abs() < 1e-9);
        }
    }

    #[test]
    fn singleton_gadget() {
        let g = build_gadget((0, 0), &[Disk::new(3, 0.1, 0.1, 1.0)]);
        assert!(g.is_singleton());
        assert!(g.p.is_none());
        assert_eq!(g.disk_ids(), vec![3]);
    }

    #[test]
    fn two_disk_gadget_uses_that_pair() {
        let g = build_gadget(
            (0, 0),
            &[Disk::new(0, 0.0, 0.0, 1.0), Disk::new(1, 0.5, 0.1, 1.0)],
        );
        assert_eq!((g.ds, g.dt), (0, 1));
        assert!(g.p.is_some() && g.q.is_some());
        assert!(g.side_of(&g.p.unwrap()) > 0.0);
        assert!(g.side_of(&g.q.unwrap()) < 0.0);
    }

    #[test]
    fn farthest_pair_matches_brute_force() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let disks: Vec<Disk> = (0..10)
                .map(|i| Disk::new(i, rng.gen_range(0.0..0.6), rng.gen_range(0.0..0.6), 1.0))
                .collect();
            let g = build_gadget((0, 0), &disks);
            let mut best = 0.0f64;
            for i in 0..disks.len() {
                for j in i + 1..disks.len() {
                    best = best.max(disks[i].center.dist(&disks[j].center));
                }
            }
            assert!((g.r_st - best).abs() <= TOL);
            // every non-gadget center lies in the central area
            for d in &disks {
                if d.id != g.ds && d.id != g.dt {
                    assert!(g.in_central(&d.center));
                }
            }
        }
    }

    #[test]
    fn core_central_membership() {
        let g = build_gadget(
            (0, 0),
            &[Disk::new(0, 0.0, 0.0, 1.0), Disk::new(1, 0.6, 0.0, 1.0)],
        );
        // midpoint of the centers is within 1 of both corners
        let mid = Point::new(0.3, 0.0);
        assert_eq!(in_core_central(&mid, &g), Some(true));
        assert_eq!(in_core_central(&Point::new(5.0, 5.0), &g), Some(false));
        // agreement with the direct two-distance test on samples
        let (p, q) = (g.p.unwrap(), g.q.unwrap());
        for k in 0..50 {
            let pt = Point::new(-0.5 + 0.03 * k as f64, -0.4 + 0.017 * k as f64);
            let direct = pt.dist(&p) <= 1.0 + TOL && pt.dist(&q) <= 1.0 + TOL;
            assert_eq!(in_core_central(&pt, &g), Some(direct));
        }
    }

    #[test]
    fn dome_point_equidistant_from_tangency_points() {
        let g = build_gadget(
            (0, 0),
            &[Disk::new(0, 0.0, 0.0, 1.0), Disk::new(1, 0.6, 0.05, 1.0)],
        );
        for side in [1.0, -1.0] {
            let dome = dome_region(&g, side).unwrap();
            assert!((dome.dome_point.dist(&dome.qs) - 1.0).abs() < 1e-9);
            assert!((dome.dome_point.dist(&dome.qt) - 1.0).abs() < 1e-9);
            // points inside a gadget disk are never in the dome region
            assert!(!dome.contains(&Point::new(0.0, 0.1)));
        }
    }

    #[test]
    fn active_region_membership_cases() {
        let disks = [
            Disk::new(0, 0.0, 0.0, 1.0),
            Disk::new(1, 0.6, 0.0, 1.0),
            Disk::new(2, 0.3, 0.02, 1.0),
        ];
        let g = build_gadget((0, 0), &disks);
        let gadgets = vec![g];
        // disk 2 sits slightly above the axis and pokes out on both sides
        // (it reaches past the top and bottom notches of the gadget)
        let regions = active_regions(&gadgets, 0, &disks[2..]);
        assert!(!regions.is_empty());
        for r in &regions {
            assert_eq!(r.disk_ids, vec![2]);
        }
        // no core-central disks -> no regions
        let none = active_regions(&gadgets, 0, &[]);
        assert!(none.is_empty());
    }

    #[test]
    fn symmetric_configuration_gives_mirrored_regions() {
        let disks = [
            Disk::new(0, 0.0, 0.0, 1.0),
            Disk::new(1, 0.6, 0.0, 1.0),
            Disk::new(2, 0.3, 0.0, 1.0),
        ];
        let g = build_gadget((0, 0), &disks);
        let gadgets = vec![g];
        let regions = active_regions(&gadgets, 0, &disks[2..]);
        assert_eq!(regions.len(), 2);
        assert_eq!(regions[0].disk_ids, regions[1].disk_ids);
    }
}
