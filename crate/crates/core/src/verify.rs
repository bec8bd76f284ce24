//! Invariant checkers: the structural properties P1-P4, the central-angle
//! and single-intersection facts, the ledger bound, and the lens-angle
//! consequence for cross-substructure disk intersections.

use crate::geom::{angle_from, circle_intersections};
use crate::hbuilder::{directed_subarc_cycle, HBuilder};
use crate::substructures::{discretize, self_intersecting_pair, span_order, ArcOrder};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CheckReport {
    pub checks: Vec<CheckResult>,
}

impl CheckReport {
    fn add(&mut self, name: &str, ok: bool, detail: String) {
        self.checks.push(CheckResult { name: name.into(), ok, detail });
    }

    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }
}

/// Run every invariant check against a finished pipeline.
pub fn check_all(builder: &HBuilder) -> CheckReport {
    let mut report = CheckReport::default();
    p1_region_uniqueness(builder, &mut report);
    p2_non_self_intersection(builder, &mut report);
    p3_acyclic_two_matching(builder, &mut report);
    p4_point_order(builder, &mut report);
    central_angles_below_pi(builder, &mut report);
    single_interior_intersection(builder, &mut report);
    ledger_bound(builder, &mut report);
    lens_angle_bound(builder, &mut report);
    sibling_order_consistency(builder, &mut report);
    report
}

/// P1: each substructure contains at most one (merged) region group.
fn p1_region_uniqueness(builder: &HBuilder, report: &mut CheckReport) {
    let model = builder.model();
    let mut per_sub = vec![0usize; model.subs.len()];
    for group in &builder.groups {
        let mut subs: Vec<usize> = Vec::new();
        for ai in group_arcs(builder, group) {
            let s = model.arc_sub[ai];
            if !subs.contains(&s) {
                subs.push(s);
            }
        }
        if subs.len() > 1 {
            report.add(
                "P1",
                false,
                format!("region group {:?} spans substructures {subs:?}", group.slots),
            );
            return;
        }
        for s in subs {
            per_sub[s] += 1;
        }
    }
    match per_sub.iter().position(|&c| c > 1) {
        Some(s) => report.add("P1", false, format!("substructure {s} holds {} regions", per_sub[s])),
        None => report.add("P1", true, "every substructure holds at most one region".into()),
    }
}

fn group_arcs(builder: &HBuilder, group: &crate::hbuilder::RegionGroup) -> Vec<usize> {
    let model = builder.model();
    let mut out = Vec::new();
    for (ai, a) in model.arcs.iter().enumerate() {
        if group.disk_ids.contains(&a.disk_id) {
            for &(gi, side) in &group.slots {
                let g = &builder.gadgets[gi];
                let mid = a.interval.midpoint(&model.rest[a.rest_idx].center);
                if g.side_of(&mid) * side > 0.0 {
                    out.push(ai);
                    break;
                }
            }
        }
    }
    out
}

/// P2: no substructure is self-intersecting.
fn p2_non_self_intersection(builder: &HBuilder, report: &mut CheckReport) {
    let model = builder.model();
    for sub in 0..model.subs.len() {
        if model.baselines[model.subs[sub].baseline_idx].cyclic {
            report.add("P2", false, format!("substructure {sub} still cyclic"));
            return;
        }
        let view = discretize(model, sub, true);
        if let Some((i, j)) = self_intersecting_pair(model, &view) {
            report.add(
                "P2",
                false,
                format!(
                    "substructure {sub}: non-adjacent arcs of disks {} and {} share a point",
                    view.arcs[i].disk_id, view.arcs[j].disk_id
                ),
            );
            return;
        }
    }
    report.add("P2", true, "no self-intersecting substructure".into());
}

/// P3: blue matching, red matching, acyclic.
fn p3_acyclic_two_matching(builder: &HBuilder, report: &mut CheckReport) {
    let g = &builder.graph;
    for v in 0..g.n {
        if g.degree_blue(v) > 1 {
            report.add("P3", false, format!("blue degree {} at {v}", g.degree_blue(v)));
            return;
        }
        if g.degree_red(v) > 1 {
            report.add("P3", false, format!("red degree {} at {v}", g.degree_red(v)));
            return;
        }
    }
    if let Some(cyc) = g.find_cycle() {
        report.add("P3", false, format!("cycle {cyc:?}"));
        return;
    }
    report.add("P3", true, "relation graph is an acyclic 2-matching".into());
}

/// P4: every point covered by at most two substructures; covered pairs are
/// point-order consistent (brute force over point pairs and arc quadruples),
/// and the directed subarc graph of every red pair is acyclic.
fn p4_point_order(builder: &HBuilder, report: &mut CheckReport) {
    let model = builder.model();
    for pi in 0..model.points.len() {
        let subs = model.subs_covering_point(pi);
        if subs.len() > 2 {
            report.add("P4", false, format!("point {pi} covered by {subs:?}"));
            return;
        }
    }
    for &(s1, s2) in &builder.graph.red {
        let f1 = builder.orientation.get(s1).copied().unwrap_or(true);
        let f2 = builder.orientation.get(s2).copied().unwrap_or(false);
        let v1 = discretize(model, s1, f1);
        let v2 = discretize(model, s2, f2);
        if directed_subarc_cycle(model, &v1, &v2).is_some() {
            report.add("P4", false, format!("directed subarc cycle between {s1} and {s2}"));
            return;
        }
        // brute force point-order consistency
        let pts: Vec<usize> = (0..model.points.len())
            .filter(|&pi| {
                let subs = model.subs_covering_point(pi);
                subs.contains(&s1) && subs.contains(&s2)
            })
            .collect();
        let cover = |view: &crate::substructures::SubView, vi: usize, pi: usize| {
            view.arcs[vi].points.get(pi)
        };
        for (xi, &p1) in pts.iter().enumerate() {
            for &p2 in pts.iter().skip(xi + 1) {
                for a1 in 0..v1.arcs.len() {
                    for a2 in 0..v1.arcs.len() {
                        if a1 == a2 || !cover(&v1, a1, p1) || !cover(&v1, a2, p2) {
                            continue;
                        }
                        for b1 in 0..v2.arcs.len() {
                            for b2 in 0..v2.arcs.len() {
                                if b1 == b2 || !cover(&v2, b1, p1) || !cover(&v2, b2, p2) {
                                    continue;
                                }
                                // exclusivity preconditions
                                if cover(&v1, a2, p1)
                                    || cover(&v2, b2, p1)
                                    || cover(&v1, a1, p2)
                                    || cover(&v2, b1, p2)
                                {
                                    continue;
                                }
                                let o1 = span_order(v1.arcs[a1].span, v1.arcs[a2].span);
                                let o2 = span_order(v2.arcs[b1].span, v2.arcs[b2].span);
                                let consistent = !(o1 == ArcOrder::Earlier
                                    && o2 == ArcOrder::Later)
                                    && !(o1 == ArcOrder::Later && o2 == ArcOrder::Earlier);
                                if !consistent {
                                    report.add(
                                        "P4",
                                        false,
                                        format!(
                                            "points {p1},{p2} order-inconsistent across {s1},{s2}"
                                        ),
                                    );
                                    return;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    report.add("P4", true, "point coverage and order consistency hold".into());
}

/// Every uncovered arc keeps a central angle below π.
fn central_angles_below_pi(builder: &HBuilder, report: &mut CheckReport) {
    let model = builder.model();
    for a in &model.arcs {
        if a.central_angle() >= std::f64::consts::PI {
            report.add(
                "central-angle",
                false,
                format!("arc of disk {} spans {:.4} rad", a.disk_id, a.central_angle()),
            );
            return;
        }
    }
    report.add("central-angle", true, "all arcs below pi".into());
}

/// Any two arcs of one substructure cross at most once in the interior.
fn single_interior_intersection(builder: &HBuilder, report: &mut CheckReport) {
    let model = builder.model();
    for sub in 0..model.subs.len() {
        let arcs = &model.subs[sub].arc_idxs;
        for (i, &ai) in arcs.iter().enumerate() {
            for &aj in arcs.iter().skip(i + 1) {
                let (a, b) = (&model.arcs[ai], &model.arcs[aj]);
                if a.disk_id == b.disk_id {
                    continue;
                }
                let da = &model.rest[a.rest_idx];
                let db = &model.rest[b.rest_idx];
                let crossings = circle_intersections(da, db)
                    .into_iter()
                    .filter(|p| {
                        let ta = angle_from(&da.center, p);
                        let tb = angle_from(&db.center, p);
                        a.interval.contains(ta, 1e-7)
                            && b.interval.contains(tb, 1e-7)
                            && !model.h.iter().any(|hd| p.dist(&hd.center) < 1.0 - 1e-7)
                    })
                    .count();
                if crossings > 1 {
                    report.add(
                        "single-intersection",
                        false,
                        format!(
                            "arcs of disks {} and {} cross {crossings} times in substructure {sub}",
                            a.disk_id, b.disk_id
                        ),
                    );
                    return;
                }
            }
        }
    }
    report.add("single-intersection", true, "at most one interior crossing per pair".into());
}

/// Ledger bound: total helper additions stay within 64·K².
fn ledger_bound(builder: &HBuilder, report: &mut CheckReport) {
    let k = builder.grid.k as usize;
    let bound = 64 * k * k;
    let total = builder.ledger.total_disks();
    report.add(
        "ledger-bound",
        total <= bound,
        format!("{total} helper disks vs bound {bound} (K = {k})"),
    );
}

/// Two disks of different substructures intersecting inside the uncovered
/// region subtend a lens angle of at most 2·sqrt(2μ).
fn lens_angle_bound(builder: &HBuilder, report: &mut CheckReport) {
    let model = builder.model();
    let cap = 2.0 * (2.0 * builder.grid.mu).sqrt();
    for (ai, a) in model.arcs.iter().enumerate() {
        for (aj, b) in model.arcs.iter().enumerate() {
            if ai >= aj || model.arc_sub[ai] == model.arc_sub[aj] || a.disk_id == b.disk_id {
                continue;
            }
            // the lemma's hypothesis excludes gadget disks; remaining disks
            // are never in ℋ, so just measure the lens if a crossing point
            // lies in the uncovered region
            let da = &model.rest[a.rest_idx];
            let db = &model.rest[b.rest_idx];
            let pts = circle_intersections(da, db);
            if pts.len() != 2 {
                continue;
            }
            let in_u = pts
                .iter()
                .any(|p| !model.h.iter().any(|hd| p.dist(&hd.center) < 1.0 - 1e-7));
            if !in_u {
                continue;
            }
            let d = da.center.dist(&db.center);
            let lens = 2.0 * (d / 2.0).clamp(-1.0, 1.0).acos();
            if lens > cap + 1e-9 {
                report.add(
                    "lens-angle",
                    false,
                    format!(
                        "disks {} and {} of different substructures subtend {lens:.4} > {cap:.4}",
                        a.disk_id, b.disk_id
                    ),
                );
                return;
            }
        }
    }
    report.add("lens-angle", true, "cross-substructure lens angles within bound".into());
}

/// Global order consistency across blue edges: sibling arc pairs must not
/// appear in the same order in both substructures (orientations are
/// opposite along every edge).
fn sibling_order_consistency(builder: &HBuilder, report: &mut CheckReport) {
    let model = builder.model();
    for &(s1, s2) in &builder.graph.blue {
        let f1 = builder.orientation.get(s1).copied().unwrap_or(true);
        let f2 = builder.orientation.get(s2).copied().unwrap_or(false);
        let v1 = discretize(model, s1, f1);
        let v2 = discretize(model, s2, f2);
        let shared: Vec<u32> = v1
            .arcs
            .iter()
            .map(|a| a.disk_id)
            .filter(|id| v2.arcs.iter().any(|b| b.disk_id == *id))
            .collect();
        for (i, &u) in shared.iter().enumerate() {
            for &v in shared.iter().skip(i + 1) {
                let find = |view: &crate::substructures::SubView, id: u32| {
                    view.arcs.iter().position(|a| a.disk_id == id).unwrap()
                };
                let o1 = span_order(
                    v1.arcs[find(&v1, u)].span,
                    v1.arcs[find(&v1, v)].span,
                );
                let o2 = span_order(
                    v2.arcs[find(&v2, u)].span,
                    v2.arcs[find(&v2, v)].span,
                );
                let bad = (o1 == ArcOrder::Earlier && o2 == ArcOrder::Earlier)
                    || (o1 == ArcOrder::Later && o2 == ArcOrder::Later);
                if bad {
                    report.add(
                        "sibling-order",
                        false,
                        format!("disks {u},{v} ordered alike in both of {s1},{s2}"),
                    );
                    return;
                }
            }
        }
    }
    report.add("sibling-order", true, "sibling orders flip across blue edges".into());
}
