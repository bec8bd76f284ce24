//! Construction of the helper set ℋ: square gadgets first, then a pipeline
//! of merge and cut operations (cycle breaking, active-region separation and
//! isolation, self-intersection elimination, overlap cuts, point-order
//! repair) until the four structural properties hold:
//!
//!   P1. each substructure contains at most one active region,
//!   P2. no substructure is self-intersecting,
//!   P3. the relation graph is an acyclic 2-matching,
//!   P4. every point is covered by at most two substructures and covered
//!       point pairs are point-order consistent.
//!
//! Every helper addition lands in the cut ledger; the total stays O(K²).
//! Each stage computes its decision against the current strip model, then
//! applies it and rebuilds; the driver loops the stages to a fixpoint.

use crate::error::SolveError;
use crate::gadgets::{active_regions, dome_region, gadgets_for, ActiveRegion, Gadget, SquareGrid};
use crate::geom::{angle_from, circle_intersections, Disk, DiskId, Point, TOL};
use crate::instance::Stage;
use crate::substructures::{
    build_strip_model, discretize, envelope, self_intersecting_pair, span_order, ArcOrder,
    StripBuild, StripModel, SubView,
};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

/// Why a disk was added to ℋ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum CutTag {
    Gadget,
    BridgeCut,
    VisibilityCut,
    SiblingSplit,
    CycleBreak,
    RegionSeparation,
    RegionIsolation,
    SelfIntersection,
    MultiOverlap,
    PointOrder,
}

#[derive(Debug, Clone, Serialize)]
pub struct LedgerEntry {
    pub op: CutTag,
    pub disks: Vec<DiskId>,
    pub subs: Vec<usize>,
}

/// Ordered log of helper additions with per-category counters.
#[derive(Debug, Clone, Default, Serialize)]
pub struct CutLedger {
    pub entries: Vec<LedgerEntry>,
}

impl CutLedger {
    pub fn push(&mut self, op: CutTag, disks: Vec<DiskId>, subs: Vec<usize>) {
        self.entries.push(LedgerEntry { op, disks, subs });
    }

    pub fn total_disks(&self) -> usize {
        self.entries.iter().map(|e| e.disks.len()).sum()
    }

    pub fn count_by(&self) -> BTreeMap<CutTag, usize> {
        let mut m = BTreeMap::new();
        for e in &self.entries {
            *m.entry(e.op).or_insert(0) += e.disks.len();
        }
        m
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("ledger serialization");
        s.push('\n');
        s
    }
}

/// Substructure relation graph: blue edges join the two substructures
/// holding the two active regions of one gadget (R-correlation), red edges
/// join substructures whose arcs share a covered point.
#[derive(Debug, Clone, Default)]
pub struct RelationGraph {
    pub n: usize,
    pub blue: Vec<(usize, usize)>,
    pub red: Vec<(usize, usize)>,
}

impl RelationGraph {
    pub fn degree_blue(&self, v: usize) -> usize {
        self.blue.iter().filter(|e| e.0 == v || e.1 == v).count()
    }

    pub fn degree_red(&self, v: usize) -> usize {
        self.red.iter().filter(|e| e.0 == v || e.1 == v).count()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for &(a, b) in self.blue.iter().chain(self.red.iter()) {
            if a == v {
                out.push(b);
            } else if b == v {
                out.push(a);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Undirected cycle detection; returns the nodes of one cycle.
    pub fn find_cycle(&self) -> Option<Vec<usize>> {
        let mut color = vec![0u8; self.n];
        let mut parent = vec![usize::MAX; self.n];
        for start in 0..self.n {
            if color[start] != 0 {
                continue;
            }
            let mut stack = vec![(start, usize::MAX)];
            while let Some((v, from)) = stack.pop() {
                if color[v] != 0 {
                    continue;
                }
                color[v] = 1;
                parent[v] = from;
                for w in self.neighbors(v) {
                    if w == from {
                        continue;
                    }
                    if color[w] != 0 {
                        // back edge: collect the cycle v .. w
                        let mut cyc = vec![w, v];
                        let mut cur = v;
                        while parent[cur] != usize::MAX && parent[cur] != w {
                            cur = parent[cur];
                            cyc.push(cur);
                        }
                        return Some(cyc);
                    }
                    stack.push((w, v));
                }
            }
        }
        None
    }

    /// Connected components ordered as paths (smallest-id endpoint first).
    /// Requires acyclicity.
    pub fn path_components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for v in 0..self.n {
            if seen[v] {
                continue;
            }
            let mut comp = vec![v];
            seen[v] = true;
            let mut i = 0;
            while i < comp.len() {
                for w in self.neighbors(comp[i]) {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
                i += 1;
            }
            let endpoints: Vec<usize> = comp
                .iter()
                .copied()
                .filter(|&u| self.neighbors(u).len() <= 1)
                .collect();
            let start = endpoints.iter().copied().min().unwrap_or(comp[0]);
            let mut path = vec![start];
            let mut prev = usize::MAX;
            let mut cur = start;
            while path.len() < comp.len() {
                let next = self
                    .neighbors(cur)
                    .into_iter()
                    .find(|&w| w != prev)
                    .expect("acyclic 2-matching components are paths");
                path.push(next);
                prev = cur;
                cur = next;
            }
            out.push(path);
        }
        out
    }
}

/// An active region or a merged group of mixed regions.
#[derive(Debug, Clone)]
pub struct RegionGroup {
    /// (gadget index, halfplane sign) slots this group unions.
    pub slots: Vec<(usize, f64)>,
    pub disk_ids: Vec<DiskId>,
}

/// The ℋ-construction pipeline state for one block.
pub struct HBuilder {
    pub pool: Vec<Disk>,
    pub points: Vec<Point>,
    pub grid: SquareGrid,
    pub gadgets: Vec<Gadget>,
    gadget_of: BTreeMap<DiskId, usize>,
    pub h: BTreeSet<DiskId>,
    pub gadget_ids: BTreeSet<DiskId>,
    pub ledger: CutLedger,
    pub angle_cap: f64,
    model: Option<StripModel>,
    /// Merged active-region groups, recomputed per pass.
    pub groups: Vec<RegionGroup>,
    pub graph: RelationGraph,
    /// Final orientation per substructure (true = forward along the loop).
    pub orientation: Vec<bool>,
}

/// Pipeline products needed by the DP stage.
pub struct HOutcome {
    pub gadget_ids: Vec<DiskId>,
    pub cut_ids: Vec<DiskId>,
}

impl HBuilder {
    /// Set up gadgets for every nonempty square and install them in ℋ.
    pub fn new(pool: Vec<Disk>, points: Vec<Point>, grid: SquareGrid, angle_cap: f64) -> Self {
        let gadgets = gadgets_for(&grid, &pool);
        let mut gadget_of = BTreeMap::new();
        for (gi, g) in gadgets.iter().enumerate() {
            for d in &pool {
                if grid.cell_of(&d.center) == g.square {
                    gadget_of.insert(d.id, gi);
                }
            }
        }
        let mut h = BTreeSet::new();
        let mut gadget_ids = BTreeSet::new();
        let mut ledger = CutLedger::default();
        for g in &gadgets {
            for id in g.disk_ids() {
                h.insert(id);
                gadget_ids.insert(id);
            }
            ledger.push(CutTag::Gadget, g.disk_ids(), vec![]);
        }
        HBuilder {
            pool,
            points,
            grid,
            gadgets,
            gadget_of,
            h,
            gadget_ids,
            ledger,
            angle_cap,
            model: None,
            groups: Vec::new(),
            graph: RelationGraph::default(),
            orientation: Vec::new(),
        }
    }

    pub fn remaining(&self) -> Vec<Disk> {
        self.pool.iter().filter(|d| !self.h.contains(&d.id)).copied().collect()
    }

    pub fn model(&self) -> &StripModel {
        self.model.as_ref().expect("rebuild() must precede model access")
    }

    fn add_to_h(&mut self, ids: &[DiskId], tag: CutTag, subs: Vec<usize>) -> usize {
        let mut added = Vec::new();
        for &id in ids {
            if self.h.insert(id) {
                added.push(id);
            }
        }
        let n = added.len();
        if n > 0 {
            self.ledger.push(tag, added, subs);
            self.model = None;
        }
        n
    }

    /// Rebuild the strip model, hammering anomalous disks into ℋ until the
    /// strip formalism applies and every point is arc-reachable.
    pub fn rebuild(&mut self) -> Result<(), SolveError> {
        if self.model.is_some() {
            return Ok(());
        }
        if self.pool.is_empty() {
            return Err(SolveError::NoFeasiblePath { point: 0 });
        }
        loop {
            let build = {
                let gadget_of = &self.gadget_of;
                build_strip_model(
                    &self.pool,
                    &self.h,
                    &self.points,
                    |d| gadget_of[&d.id],
                    &self.gadgets,
                )?
            };
            match build {
                StripBuild::Ok(model) => {
                    self.model = Some(model);
                    match self.visibility_gap()? {
                        Some(id) => {
                            self.add_to_h(&[id], CutTag::VisibilityCut, vec![]);
                        }
                        None => return Ok(()),
                    }
                }
                StripBuild::Anomaly(a) => {
                    use crate::substructures::StripAnomaly::*;
                    let (rest_idx, tag) = match a {
                        BridgeDisk { rest_idx } => (rest_idx, CutTag::BridgeCut),
                        FloatingDisk { rest_idx } => (rest_idx, CutTag::BridgeCut),
                        SameSubSiblings { rest_idx } => (rest_idx, CutTag::SiblingSplit),
                    };
                    let id = self.remaining()[rest_idx].id;
                    self.add_to_h(&[id], tag, vec![]);
                }
            }
        }
    }

    /// A remaining point not reachable through any arc region: the cheapest
    /// covering disk must join ℋ directly. Errors if no disk covers it.
    fn visibility_gap(&self) -> Result<Option<DiskId>, SolveError> {
        let model = self.model();
        for (pi, p) in model.points.iter().enumerate() {
            if (0..model.arcs.len()).any(|ai| model.point_covered_by_arc(p, ai)) {
                continue;
            }
            let mut best: Option<(f64, DiskId)> = None;
            for d in &model.rest {
                if p.dist(&d.center) <= 1.0 + TOL {
                    let better = match best {
                        None => true,
                        Some((w, id)) => {
                            d.weight < w - 1e-15 || ((d.weight - w).abs() <= 1e-15 && d.id < id)
                        }
                    };
                    if better {
                        best = Some((d.weight, d.id));
                    }
                }
            }
            return match best {
                Some((_, id)) => Ok(Some(id)),
                None => Err(SolveError::NoFeasiblePath { point: model.point_ids[pi] }),
            };
        }
        Ok(None)
    }

    /// Current (unmerged) active regions over the remaining disks.
    fn raw_regions(&self) -> Vec<ActiveRegion> {
        let remaining = self.remaining();
        let mut out = Vec::new();
        for gi in 0..self.gadgets.len() {
            out.extend(active_regions(&self.gadgets, gi, &remaining));
        }
        out
    }

    /// Model arc indices belonging to region slot (gadget, side).
    fn slot_arcs(&self, disk_ids: &[DiskId], gi: usize, side: f64) -> Vec<usize> {
        let model = self.model();
        let g = &self.gadgets[gi];
        let mut out = Vec::new();
        for (ai, a) in model.arcs.iter().enumerate() {
            if disk_ids.contains(&a.disk_id) {
                let mid = a.interval.midpoint(&model.rest[a.rest_idx].center);
                if g.side_of(&mid) * side > 0.0 {
                    out.push(ai);
                }
            }
        }
        out
    }

    /// The substructure holding a region slot's arcs, if unique.
    fn slot_substructure(&self, disk_ids: &[DiskId], gi: usize, side: f64) -> Option<usize> {
        let model = self.model();
        let subs: BTreeSet<usize> = self
            .slot_arcs(disk_ids, gi, side)
            .into_iter()
            .map(|ai| model.arc_sub[ai])
            .collect();
        if subs.len() == 1 {
            subs.into_iter().next()
        } else {
            None
        }
    }

    /// Model arc indices of a whole group (all slots).
    fn group_arcs(&self, group: &RegionGroup) -> Vec<usize> {
        let mut out: Vec<usize> = group
            .slots
            .iter()
            .flat_map(|&(gi, side)| self.slot_arcs(&group.disk_ids, gi, side))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// The unique substructure of a group, if any.
    fn group_substructure(&self, group: &RegionGroup) -> Option<usize> {
        let model = self.model();
        let subs: BTreeSet<usize> =
            self.group_arcs(group).into_iter().map(|ai| model.arc_sub[ai]).collect();
        if subs.len() == 1 {
            subs.into_iter().next()
        } else {
            None
        }
    }

    /// View-arc indices of a group within a view.
    fn group_arcs_in_view(&self, group: &RegionGroup, view: &SubView) -> Vec<usize> {
        let arcs = self.group_arcs(group);
        view.arcs
            .iter()
            .enumerate()
            .filter(|(_, va)| arcs.contains(&va.arc_idx))
            .map(|(vi, _)| vi)
            .collect()
    }

    // ---------------------------------------------------------------
    // pipeline stages
    // ---------------------------------------------------------------

    /// Break cyclic baselines: prefer one covering arc at a point no active
    /// region covers; otherwise cut right after one region's footprint.
    pub fn break_cyclic_baselines(&mut self) -> Result<usize, SolveError> {
        self.rebuild()?;
        let decision: Option<(DiskId, usize)> = {
            let model = self.model();
            let regions = self.raw_regions();
            let mut pick = None;
            for (bi, b) in model.baselines.iter().enumerate() {
                if !b.cyclic {
                    continue;
                }
                let total = model.boundary.loops[b.loop_id].total_len;
                let sub_of = |ai: usize| model.subs[model.arc_sub[ai]].baseline_idx == bi;
                let region_arcs: BTreeSet<usize> = regions
                    .iter()
                    .flat_map(|r| self.slot_arcs(&r.disk_ids, r.gadget_idx, r.side))
                    .filter(|&ai| sub_of(ai))
                    .collect();
                let in_foot = |ai: usize, s: f64| {
                    let a = &model.arcs[ai];
                    let off = (s - a.foot.0).rem_euclid(total);
                    off <= (a.foot.1 - a.foot.0).rem_euclid(total) + 1e-9
                };
                // a cycle point uncovered by region arcs
                let samples = 512;
                let gap = (0..samples)
                    .map(|k| total * (k as f64 + 0.5) / samples as f64)
                    .find(|&s| !region_arcs.iter().any(|&ai| in_foot(ai, s)));
                let probe = match gap {
                    Some(s) => s,
                    None => {
                        // fully region-covered: probe just past the first
                        // region arc's footprint end
                        let first = region_arcs
                            .iter()
                            .copied()
                            .min_by_key(|&ai| model.arcs[ai].disk_id)
                            .expect("covered cycle implies region arcs");
                        (model.arcs[first].foot.1 + 1e-6).rem_euclid(total)
                    }
                };
                // covering arc reaching farthest past the probe point
                let best = model
                    .arcs
                    .iter()
                    .enumerate()
                    .filter(|(ai, _)| sub_of(*ai) && in_foot(*ai, probe))
                    .max_by(|(x, ax), (y, ay)| {
                        let fx = (ax.foot.1 - probe).rem_euclid(total);
                        let fy = (ay.foot.1 - probe).rem_euclid(total);
                        fx.total_cmp(&fy)
                            .then(ay.disk_id.cmp(&ax.disk_id))
                            .then(y.cmp(x))
                    })
                    .map(|(_, a)| a.disk_id);
                if let Some(id) = best {
                    pick = Some((id, bi));
                    break;
                }
            }
            pick
        };
        match decision {
            Some((id, bi)) => {
                let n = self.add_to_h(&[id], CutTag::CycleBreak, vec![bi]);
                self.rebuild()?;
                Ok(n)
            }
            None => Ok(0),
        }
    }

    /// Order-separability of two view-arc sets: every arc of the first
    /// strictly precedes every arc of the second.
    pub fn order_separable(view: &SubView, a1: &[usize], a2: &[usize]) -> bool {
        a1.iter().all(|&x| {
            a2.iter()
                .all(|&y| span_order(view.arcs[x].span, view.arcs[y].span) == ArcOrder::Earlier)
        })
    }

    /// Group mixed active regions. Double-mixtures merge logically (no disks
    /// are added); a single mixture is a geometry bug.
    pub fn merge_or_mark_mixtures(&mut self) -> Result<usize, SolveError> {
        self.rebuild()?;
        let regions = self.raw_regions();
        let mut mixture: Vec<(usize, usize)> = Vec::new();
        {
            let model = self.model();
            for i in 0..regions.len() {
                for j in i + 1..regions.len() {
                    let (ri, rj) = (&regions[i], &regions[j]);
                    if ri.gadget_idx == rj.gadget_idx {
                        continue;
                    }
                    let si = self.slot_substructure(&ri.disk_ids, ri.gadget_idx, ri.side);
                    let sj = self.slot_substructure(&rj.disk_ids, rj.gadget_idx, rj.side);
                    let (Some(si), Some(sj)) = (si, sj) else { continue };
                    if si != sj || model.baselines[model.subs[si].baseline_idx].cyclic {
                        continue;
                    }
                    let view = discretize(model, si, true);
                    let gi = RegionGroup {
                        slots: vec![(ri.gadget_idx, ri.side)],
                        disk_ids: ri.disk_ids.clone(),
                    };
                    let gj = RegionGroup {
                        slots: vec![(rj.gadget_idx, rj.side)],
                        disk_ids: rj.disk_ids.clone(),
                    };
                    let ai = self.group_arcs_in_view(&gi, &view);
                    let aj = self.group_arcs_in_view(&gj, &view);
                    if ai.is_empty() || aj.is_empty() {
                        continue;
                    }
                    let sep = Self::order_separable(&view, &ai, &aj)
                        || Self::order_separable(&view, &aj, &ai);
                    if !sep {
                        mixture.push((i, j));
                    }
                }
            }
        }
        // double-mixture validation per gadget pair
        let mut pair_mix: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for &(i, j) in &mixture {
            let (x, y) = (regions[i].gadget_idx, regions[j].gadget_idx);
            *pair_mix.entry((x.min(y), x.max(y))).or_insert(0) += 1;
        }
        for (&(ga, gb), &count) in &pair_mix {
            let both_sides = |g: usize| {
                regions.iter().filter(|r| r.gadget_idx == g).count() == 2
            };
            if both_sides(ga) && both_sides(gb) && count == 1 {
                return Err(SolveError::SingleMixtureDetected(ga, gb));
            }
            // testable double-mixture facts: adjacent squares, close axes,
            // overlapping core-central areas
            let (sa, sb) = (self.gadgets[ga].square, self.gadgets[gb].square);
            assert!(
                (sa.0 - sb.0).abs() <= 1 && (sa.1 - sb.1).abs() <= 1,
                "mixed gadgets must come from adjacent squares"
            );
            let (axa, axb) = (self.gadgets[ga].axis, self.gadgets[gb].axis);
            let dot = (axa.0 * axb.0 + axa.1 * axb.1).abs().clamp(0.0, 1.0);
            assert!(
                dot.acos() <= self.angle_cap + 1e-9,
                "mixed gadget axes diverge beyond the angle cap"
            );
            assert!(
                core_central_overlap(&self.gadgets[ga], &self.gadgets[gb]),
                "mixed gadgets must have overlapping core-central areas"
            );
        }
        // union-find over regions through mixtures
        let mut parent: Vec<usize> = (0..regions.len()).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            while p[x] != x {
                let up = p[p[x]];
                p[x] = up;
                return find(p, up);
            }
            x
        }
        for &(i, j) in &mixture {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                let (lo, hi) = (ri.min(rj), ri.max(rj));
                parent[hi] = lo;
            }
        }
        let mut groups: BTreeMap<usize, RegionGroup> = BTreeMap::new();
        for (i, r) in regions.iter().enumerate() {
            let root = find(&mut parent, i);
            let e = groups
                .entry(root)
                .or_insert_with(|| RegionGroup { slots: vec![], disk_ids: vec![] });
            e.slots.push((r.gadget_idx, r.side));
            for &d in &r.disk_ids {
                if !e.disk_ids.contains(&d) {
                    e.disk_ids.push(d);
                }
            }
        }
        self.groups = groups.into_values().collect();
        for g in &mut self.groups {
            g.slots.sort_by(|a, b| a.0.cmp(&b.0).then((a.1 as i64).cmp(&(b.1 as i64))));
            g.disk_ids.sort_unstable();
        }
        Ok(mixture.len())
    }

    /// Label-cut: add at most two consecutive envelope disks so the two
    /// order-separable label sets land in different substructures.
    pub fn label_cut(
        &mut self,
        sub: usize,
        a1: &[usize],
        a2: &[usize],
        tag: CutTag,
    ) -> Result<Vec<DiskId>, SolveError> {
        let ids: Vec<DiskId> = {
            let model = self.model();
            let view = discretize(model, sub, true);
            if a1.is_empty() || a2.is_empty() || !Self::order_separable(&view, a1, a2) {
                return Err(SolveError::NotSeparable);
            }
            let env = envelope(model, &view)?;
            let hi1 = a1.iter().map(|&i| view.arcs[i].span.1).max().unwrap();
            let lo2 = a2.iter().map(|&i| view.arcs[i].span.0).min().unwrap();
            // simple case: one envelope arc strictly between the labels
            let between = env
                .iter()
                .map(|s| s.view_arc)
                .find(|&i| view.arcs[i].span.0 > hi1 && view.arcs[i].span.1 < lo2);
            match between {
                Some(i) => vec![view.arcs[i].disk_id],
                None => {
                    // two consecutive envelope arcs spanning the boundary
                    let mut pick: Option<(usize, usize)> = None;
                    for w in env.windows(2) {
                        let (u, v) = (w[0].view_arc, w[1].view_arc);
                        if view.arcs[u].span.0 <= hi1 && view.arcs[v].span.1 >= lo2 {
                            pick = Some((u, v));
                        }
                    }
                    let (u, v) = pick.ok_or(SolveError::NotSeparable)?;
                    let mut ids = vec![view.arcs[u].disk_id, view.arcs[v].disk_id];
                    ids.dedup();
                    ids
                }
            }
        };
        self.add_to_h(&ids, tag, vec![sub]);
        self.rebuild()?;
        Ok(ids)
    }

    /// P1: cut substructures holding two or more region groups.
    pub fn separate_active_regions(&mut self) -> Result<usize, SolveError> {
        self.rebuild()?;
        self.merge_or_mark_mixtures()?;
        let decision: Option<(usize, Vec<usize>, Vec<usize>, usize, usize)> = {
            let model = self.model();
            let mut by_sub: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for (gi, g) in self.groups.iter().enumerate() {
                let subs: BTreeSet<usize> =
                    self.group_arcs(g).into_iter().map(|ai| model.arc_sub[ai]).collect();
                for s in subs {
                    by_sub.entry(s).or_default().push(gi);
                }
            }
            let mut pick = None;
            for (sub, gs) in by_sub {
                if gs.len() < 2 || model.baselines[model.subs[sub].baseline_idx].cyclic {
                    continue;
                }
                let view = discretize(model, sub, true);
                let arcs1 = self.group_arcs_in_view(&self.groups[gs[0]], &view);
                let arcs2 = self.group_arcs_in_view(&self.groups[gs[1]], &view);
                if arcs1.is_empty() || arcs2.is_empty() {
                    continue;
                }
                if Self::order_separable(&view, &arcs1, &arcs2) {
                    pick = Some((sub, arcs1, arcs2, gs[0], gs[1]));
                } else if Self::order_separable(&view, &arcs2, &arcs1) {
                    pick = Some((sub, arcs2, arcs1, gs[1], gs[0]));
                } else {
                    // merge_or_mark_mixtures groups inseparable regions, so
                    // two leftover groups must be separable one way
                    return Err(SolveError::SingleMixtureDetected(
                        self.groups[gs[0]].slots[0].0,
                        self.groups[gs[1]].slots[0].0,
                    ));
                }
                break;
            }
            pick
        };
        match decision {
            Some((sub, a, b, _, _)) => {
                let ids = self.label_cut(sub, &a, &b, CutTag::RegionSeparation)?;
                Ok(ids.len())
            }
            None => Ok(0),
        }
    }

    /// Isolate each region-holding substructure: one covering disk when a
    /// center lies in both tangency disks, otherwise flanking label-cuts
    /// bounding the region inside its dome.
    pub fn isolate_active_region(&mut self) -> Result<usize, SolveError> {
        self.rebuild()?;
        self.merge_or_mark_mixtures()?;
        enum Action {
            Cover(DiskId, usize),
            Cut(usize, Vec<usize>, Vec<usize>),
        }
        let decision: Option<Action> = {
            let model = self.model();
            let mut pick = None;
            'groups: for group in &self.groups {
                let Some(sub) = self.group_substructure(group) else { continue };
                if model.baselines[model.subs[sub].baseline_idx].cyclic {
                    continue;
                }
                let view = discretize(model, sub, true);
                let region_arcs = self.group_arcs_in_view(group, &view);
                if region_arcs.is_empty() || region_arcs.len() == view.arcs.len() {
                    continue; // already alone
                }
                let (gi, side) = group.slots[0];
                let g = &self.gadgets[gi];
                let Some(dome) = dome_region(g, side) else { continue };
                // one disk centered in D(Qs,1) ∩ D(Qt,1) covers the region
                let cover = self
                    .remaining()
                    .iter()
                    .filter(|d| {
                        !group.disk_ids.contains(&d.id)
                            && d.center.dist(&dome.qs) <= 1.0 - TOL
                            && d.center.dist(&dome.qt) <= 1.0 - TOL
                            && g.side_of(&d.center) * side > 0.0
                    })
                    .map(|d| d.id)
                    .min();
                if let Some(id) = cover {
                    pick = Some(Action::Cover(id, sub));
                    break 'groups;
                }
                // flanks by span position relative to the region hull
                let rlo = region_arcs.iter().map(|&i| view.arcs[i].span.0).min().unwrap();
                let rhi = region_arcs.iter().map(|&i| view.arcs[i].span.1).max().unwrap();
                let mut before = Vec::new();
                let mut after = Vec::new();
                for (vi, va) in view.arcs.iter().enumerate() {
                    if region_arcs.contains(&vi) {
                        continue;
                    }
                    if va.span.1 <= rlo {
                        before.push(vi);
                    } else if va.span.0 >= rhi {
                        after.push(vi);
                    }
                }
                if !before.is_empty() && Self::order_separable(&view, &before, &region_arcs) {
                    pick = Some(Action::Cut(sub, before, region_arcs.clone()));
                    break 'groups;
                }
                if !after.is_empty() && Self::order_separable(&view, &region_arcs, &after) {
                    pick = Some(Action::Cut(sub, region_arcs.clone(), after));
                    break 'groups;
                }
            }
            pick
        };
        match decision {
            Some(Action::Cover(id, sub)) => {
                let n = self.add_to_h(&[id], CutTag::RegionIsolation, vec![sub]);
                self.rebuild()?;
                Ok(n)
            }
            Some(Action::Cut(sub, a, b)) => {
                let ids = self.label_cut(sub, &a, &b, CutTag::RegionIsolation)?;
                Ok(ids.len())
            }
            None => Ok(0),
        }
    }

    /// P2: walk each substructure's envelope and cut at the first arc whose
    /// prefix becomes self-intersecting.
    pub fn eliminate_self_intersections(&mut self) -> Result<usize, SolveError> {
        self.rebuild()?;
        let decision: Option<(DiskId, usize)> = {
            let model = self.model();
            let mut pick = None;
            for sub in 0..model.subs.len() {
                if model.baselines[model.subs[sub].baseline_idx].cyclic {
                    continue;
                }
                let view = discretize(model, sub, true);
                if self_intersecting_pair(model, &view).is_none() {
                    continue;
                }
                let env = envelope(model, &view)?;
                let mut prefix: Vec<usize> = Vec::new();
                let mut cut = None;
                for step in &env {
                    prefix.push(step.view_arc);
                    let bad = prefix.iter().any(|&x| {
                        prefix.iter().any(|&y| {
                            view.arcs[x].span.1 < view.arcs[y].span.0
                                && view.arcs[x].points.intersect_count(&view.arcs[y].points) > 0
                        })
                    });
                    if bad {
                        cut = Some(view.arcs[*prefix.last().unwrap()].disk_id);
                        break;
                    }
                }
                let id = cut.unwrap_or_else(|| {
                    // violation among non-envelope arcs: cut the envelope arc
                    // covering the shared point
                    let (i, j) = self_intersecting_pair(model, &view).unwrap();
                    let shared = (0..model.points.len())
                        .find(|&p| view.arcs[i].points.get(p) && view.arcs[j].points.get(p))
                        .unwrap();
                    env.iter()
                        .map(|s| s.view_arc)
                        .find(|&v| view.arcs[v].points.get(shared))
                        .map(|v| view.arcs[v].disk_id)
                        .unwrap_or(view.arcs[j].disk_id)
                });
                pick = Some((id, sub));
                break;
            }
            pick
        };
        match decision {
            Some((id, sub)) => {
                let n = self.add_to_h(&[id], CutTag::SelfIntersection, vec![sub]);
                self.rebuild()?;
                Ok(n)
            }
            None => Ok(0),
        }
    }

    /// Build the relation graph: blue edges for R-correlated region pairs,
    /// red edges for substructures sharing a covered point.
    pub fn build_relation_graph(&mut self) -> Result<(), SolveError> {
        self.rebuild()?;
        self.merge_or_mark_mixtures()?;
        let (n, red, blue) = {
            let model = self.model();
            let n = model.subs.len();
            let mut red: BTreeSet<(usize, usize)> = BTreeSet::new();
            for pi in 0..model.points.len() {
                let subs = model.subs_covering_point(pi);
                for i in 0..subs.len() {
                    for j in i + 1..subs.len() {
                        red.insert((subs[i], subs[j]));
                    }
                }
            }
            let mut blue: BTreeSet<(usize, usize)> = BTreeSet::new();
            for gi in 0..self.gadgets.len() {
                let plus = self.groups.iter().find(|g| g.slots.contains(&(gi, 1.0)));
                let minus = self.groups.iter().find(|g| g.slots.contains(&(gi, -1.0)));
                let (Some(p), Some(m)) = (plus, minus) else { continue };
                let sp = self.group_substructure(p);
                let sm = self.group_substructure(m);
                let (Some(sp), Some(sm)) = (sp, sm) else { continue };
                if sp == sm {
                    continue;
                }
                let key = (sp.min(sm), sp.max(sm));
                // R-correlation excludes overlapping pairs by definition
                if !red.contains(&key) {
                    blue.insert(key);
                }
            }
            (n, red, blue)
        };
        self.graph =
            RelationGraph { n, blue: blue.into_iter().collect(), red: red.into_iter().collect() };
        for v in 0..n {
            if self.graph.degree_blue(v) > 1 {
                return Err(SolveError::CycleDetected {
                    nodes: vec![],
                    note: format!(
                        "blue degree {} at substructure {v}",
                        self.graph.degree_blue(v)
                    ),
                });
            }
        }
        Ok(())
    }

    /// Make red edges a matching: cut substructures overlapping two or more
    /// others between consecutive distinct nonzero envelope labels.
    pub fn cut_multi_overlaps(&mut self) -> Result<usize, SolveError> {
        self.build_relation_graph()?;
        let decision: Option<(Vec<DiskId>, usize)> = {
            let model = self.model();
            let mut pick = None;
            for sub in 0..model.subs.len() {
                if self.graph.degree_red(sub) < 2
                    || model.baselines[model.subs[sub].baseline_idx].cyclic
                {
                    continue;
                }
                let labels = self.envelope_labels(sub)?;
                let seq: Vec<usize> = labels.iter().map(|l| l.label).collect();
                if let Some((a, b)) = find_abab(&compress_labels(&seq)) {
                    return Err(SolveError::LabelConflict { st: sub, a: a - 1, b: b - 1 });
                }
                let mut cuts: Vec<DiskId> = Vec::new();
                let mut runs: Vec<(usize, usize, usize)> = Vec::new();
                let mut idx = 0;
                while idx < seq.len() {
                    if seq[idx] == 0 {
                        idx += 1;
                        continue;
                    }
                    let letter = seq[idx];
                    let start = idx;
                    let mut last = idx;
                    let mut j = idx + 1;
                    while j < seq.len() && (seq[j] == 0 || seq[j] == letter) {
                        if seq[j] == letter {
                            last = j;
                        }
                        j += 1;
                    }
                    runs.push((letter, start, last));
                    idx = last + 1;
                }
                for w in runs.windows(2) {
                    let (l1, _, last1) = w[0];
                    let (l2, first2, _) = w[1];
                    if l1 != l2 {
                        cuts.push(labels[last1].envelope_disk);
                        cuts.push(labels[first2].envelope_disk);
                    }
                }
                cuts.sort_unstable();
                cuts.dedup();
                if !cuts.is_empty() {
                    pick = Some((cuts, sub));
                    break;
                }
            }
            pick
        };
        match decision {
            Some((cuts, sub)) => {
                let n = self.add_to_h(&cuts, CutTag::MultiOverlap, vec![sub]);
                self.rebuild()?;
                Ok(n)
            }
            None => Ok(0),
        }
    }

    /// Envelope pieces of `sub` labeled by the foreign substructure covering
    /// them (0 when none); conflict when two foreign substructures claim one
    /// piece.
    fn envelope_labels(&self, sub: usize) -> Result<Vec<PieceLabel>, SolveError> {
        let model = self.model();
        let view = discretize(model, sub, true);
        let env = envelope(model, &view)?;
        let mut out = Vec::new();
        for step in &env {
            let va = &view.arcs[step.view_arc];
            let arc = &model.arcs[va.arc_idx];
            let disk = &model.rest[arc.rest_idx];
            let mut params = vec![step.enter_t, step.exit_t];
            for (oi, other) in model.arcs.iter().enumerate() {
                if model.arc_sub[oi] == sub {
                    continue;
                }
                let od = &model.rest[other.rest_idx];
                for p in circle_intersections(disk, od) {
                    let ta = angle_from(&disk.center, &p);
                    let tb = angle_from(&od.center, &p);
                    if arc.interval.contains(ta, 1e-7)
                        && other.interval.contains(tb, 1e-7)
                        && !model.h.iter().any(|hd| p.dist(&hd.center) < 1.0 - 1e-7)
                    {
                        let t = travel_param(arc, &p, view.forward);
                        if t >= step.enter_t - 1e-9 && t <= step.exit_t + 1e-9 {
                            params.push(t);
                        }
                    }
                }
            }
            params.sort_by(|a, b| a.total_cmp(b));
            params.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
            for w in params.windows(2) {
                if w[1] - w[0] <= 1e-9 {
                    continue;
                }
                let mid = point_at_travel(arc, (w[0] + w[1]) / 2.0, view.forward);
                let mut owner = 0usize;
                for oi in 0..model.arcs.len() {
                    let os = model.arc_sub[oi];
                    if os == sub {
                        continue;
                    }
                    if model.point_covered_by_arc(&mid, oi) {
                        if owner != 0 && owner != os + 1 {
                            return Err(SolveError::LabelConflict {
                                st: sub,
                                a: owner - 1,
                                b: os,
                            });
                        }
                        owner = os + 1;
                    }
                }
                out.push(PieceLabel { label: owner, envelope_disk: va.disk_id });
            }
        }
        Ok(out)
    }

    /// P3: the relation graph must be acyclic; reports the offending cycle
    /// as a polygon of substructure midpoints.
    pub fn assert_acyclic(&mut self) -> Result<(), SolveError> {
        self.build_relation_graph()?;
        if let Some(cycle) = self.graph.find_cycle() {
            let model = self.model();
            let nodes = cycle
                .iter()
                .map(|&s| {
                    let b = &model.baselines[model.subs[s].baseline_idx];
                    let p = model.boundary.loops[b.loop_id].point_at(b.start_s + b.len / 2.0);
                    (p.x, p.y)
                })
                .collect();
            return Err(SolveError::CycleDetected {
                nodes,
                note: format!("substructure cycle {cycle:?}"),
            });
        }
        Ok(())
    }

    /// P4: break directed subarc cycles between each overlapping pair by
    /// adding one arc of the non-region substructure between the extremal
    /// overlap witnesses.
    pub fn enforce_point_order_consistency(&mut self) -> Result<usize, SolveError> {
        self.build_relation_graph()?;
        let red = self.graph.red.clone();
        for (s1, s2) in red {
            let cut = self.point_order_cut(s1, s2)?;
            if let Some(id) = cut {
                let n = self.add_to_h(&[id], CutTag::PointOrder, vec![s1, s2]);
                self.rebuild()?;
                // the kept substructure may now overlap both halves; the
                // multi-overlap stage repairs that on the next pass
                return Ok(n);
            }
        }
        Ok(0)
    }

    /// Detect a directed cycle in the subarc graph of an overlapping pair
    /// and pick the cut disk.
    fn point_order_cut(&self, s1: usize, s2: usize) -> Result<Option<DiskId>, SolveError> {
        let model = self.model();
        if model.baselines[model.subs[s1].baseline_idx].cyclic
            || model.baselines[model.subs[s2].baseline_idx].cyclic
        {
            return Ok(None);
        }
        // canonical relative orientation: opposite along every red edge
        let v1 = discretize(model, s1, true);
        let v2 = discretize(model, s2, false);
        if directed_subarc_cycle(model, &v1, &v2).is_none() {
            return Ok(None);
        }
        let has_region = |s: usize| {
            self.groups.iter().any(|g| self.group_substructure(g) == Some(s))
        };
        // cut the substructure without an active region
        let (vk, vc) = if has_region(s2) && !has_region(s1) {
            (&v2, &v1)
        } else {
            (&v1, &v2)
        };
        let env = envelope(model, vk)?;
        let crossing_arcs = |vi: usize| -> Vec<usize> {
            let arc = &model.arcs[vk.arcs[vi].arc_idx];
            let d = &model.rest[arc.rest_idx];
            let mut hits = Vec::new();
            for (vj, vb) in vc.arcs.iter().enumerate() {
                let other = &model.arcs[vb.arc_idx];
                let od = &model.rest[other.rest_idx];
                for p in circle_intersections(d, od) {
                    let ta = angle_from(&d.center, &p);
                    let tb = angle_from(&od.center, &p);
                    if arc.interval.contains(ta, 1e-7)
                        && other.interval.contains(tb, 1e-7)
                        && !model.h.iter().any(|hd| p.dist(&hd.center) < 1.0 - 1e-7)
                    {
                        hits.push(vj);
                    }
                }
            }
            hits.sort_unstable();
            hits.dedup();
            hits
        };
        let mut first: Option<Vec<usize>> = None;
        let mut last: Option<Vec<usize>> = None;
        for step in &env {
            let h = crossing_arcs(step.view_arc);
            if h.is_empty() {
                continue;
            }
            if first.is_none() {
                first = Some(h.clone());
            }
            last = Some(h);
        }
        let (Some(first), Some(last)) = (first, last) else { return Ok(None) };
        let b_first = first.into_iter().min_by_key(|&vj| vc.arcs[vj].span).unwrap();
        let b_last = last.into_iter().max_by_key(|&vj| vc.arcs[vj].span).unwrap();
        let between = vc
            .arcs
            .iter()
            .filter(|a| {
                span_order(vc.arcs[b_last].span, a.span) == ArcOrder::Earlier
                    && span_order(a.span, vc.arcs[b_first].span) == ArcOrder::Earlier
            })
            .map(|a| a.disk_id)
            .min();
        Ok(Some(between.unwrap_or(vc.arcs[b_first].disk_id)))
    }

    /// Orient baselines: within each path component nodes alternate between
    /// forward and reversed, the smallest-id endpoint running forward.
    pub fn orient_baselines(&mut self) -> Result<(), SolveError> {
        self.assert_acyclic()?;
        let n = self.graph.n;
        let mut orient = vec![true; n];
        for comp in self.graph.path_components() {
            for (i, &s) in comp.iter().enumerate() {
                orient[s] = i % 2 == 0;
            }
        }
        self.orientation = orient;
        Ok(())
    }

    /// Run the whole pipeline to a fixpoint.
    pub fn build(&mut self) -> Result<HOutcome, SolveError> {
        let max_iters = 2 * self.pool.len() + 16;
        let mut iters = 0;
        loop {
            iters += 1;
            if iters > max_iters {
                return Err(SolveError::BrokenChain(
                    "pipeline failed to reach a fixpoint".into(),
                ));
            }
            if self.break_cyclic_baselines()? > 0 {
                continue;
            }
            if self.separate_active_regions()? > 0 {
                continue;
            }
            if self.isolate_active_region()? > 0 {
                continue;
            }
            if self.eliminate_self_intersections()? > 0 {
                continue;
            }
            if self.cut_multi_overlaps()? > 0 {
                continue;
            }
            self.assert_acyclic()?;
            if self.enforce_point_order_consistency()? > 0 {
                continue;
            }
            break;
        }
        self.orient_baselines()?;
        let cut_ids: Vec<DiskId> = self
            .h
            .iter()
            .copied()
            .filter(|id| !self.gadget_ids.contains(id))
            .collect();
        Ok(HOutcome { gadget_ids: self.gadget_ids.iter().copied().collect(), cut_ids })
    }

    /// Helper disks as a stage map for solution assembly.
    pub fn stage_map(&self) -> BTreeMap<DiskId, Stage> {
        let mut m = BTreeMap::new();
        for &id in &self.h {
            let stage = if self.gadget_ids.contains(&id) { Stage::Gadget } else { Stage::Cut };
            m.insert(id, stage);
        }
        m
    }
}

/// Overlap test for two core-central areas, by boundary sampling of one
/// lens against membership in the other.
fn core_central_overlap(a: &Gadget, b: &Gadget) -> bool {
    let (Some(pa), Some(qa)) = (a.p, a.q) else { return false };
    let (Some(pb), Some(qb)) = (b.p, b.q) else { return false };
    let in_a = |pt: &Point| pt.dist(&pa) <= 1.0 + TOL && pt.dist(&qa) <= 1.0 + TOL;
    let in_b = |pt: &Point| pt.dist(&pb) <= 1.0 + TOL && pt.dist(&qb) <= 1.0 + TOL;
    // centers of either lens
    let ca = Point::new((pa.x + qa.x) / 2.0, (pa.y + qa.y) / 2.0);
    let cb = Point::new((pb.x + qb.x) / 2.0, (pb.y + qb.y) / 2.0);
    if in_b(&ca) || in_a(&cb) {
        return true;
    }
    // sample along the segment between the lens centers
    for k in 1..64 {
        let t = k as f64 / 64.0;
        let pt = Point::new(ca.x + t * (cb.x - ca.x), ca.y + t * (cb.y - ca.y));
        if in_a(&pt) && in_b(&pt) {
            return true;
        }
    }
    false
}

struct PieceLabel {
    /// 0 for uncovered-by-others, `substructure id + 1` otherwise.
    label: usize,
    envelope_disk: DiskId,
}

/// Travel parameter of a point on an uncovered arc, measured from the
/// earlier (under orientation) footprint endpoint.
fn travel_param(arc: &crate::substructures::UncoveredArc, p: &Point, forward: bool) -> f64 {
    let c = Point::new(
        arc.endpoints.0.x - arc.interval.start.cos(),
        arc.endpoints.0.y - arc.interval.start.sin(),
    );
    let ang = angle_from(&c, p);
    if arc.start_at_foot0 == forward {
        crate::geom::ccw_delta(arc.interval.start, ang).min(arc.interval.extent)
    } else {
        crate::geom::ccw_delta(ang, arc.interval.end()).min(arc.interval.extent)
    }
}

fn point_at_travel(arc: &crate::substructures::UncoveredArc, t: f64, forward: bool) -> Point {
    let c = Point::new(
        arc.endpoints.0.x - arc.interval.start.cos(),
        arc.endpoints.0.y - arc.interval.start.sin(),
    );
    let ang = if arc.start_at_foot0 == forward {
        arc.interval.start + t
    } else {
        arc.interval.end() - t
    };
    Point::new(c.x + ang.cos(), c.y + ang.sin())
}

/// Compress a label sequence: each maximal run over `{0, i}` starting and
/// ending with `i` collapses to the single letter `i`.
pub fn compress_labels(seq: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut idx = 0;
    while idx < seq.len() {
        if seq[idx] == 0 {
            out.push(0);
            idx += 1;
            continue;
        }
        let letter = seq[idx];
        let mut last = idx;
        let mut j = idx + 1;
        while j < seq.len() && (seq[j] == 0 || seq[j] == letter) {
            if seq[j] == letter {
                last = j;
            }
            j += 1;
        }
        out.push(letter);
        idx = last + 1;
    }
    out
}

/// First `a..b..a..b` pattern over distinct nonzero letters, if any
/// (forbidden in a Davenport-Schinzel sequence of order 2).
pub fn find_abab(seq: &[usize]) -> Option<(usize, usize)> {
    let letters: BTreeSet<usize> = seq.iter().copied().filter(|&x| x != 0).collect();
    for &a in &letters {
        for &b in &letters {
            if a == b {
                continue;
            }
            let mut state = 0;
            for &x in seq {
                state = match (state, x) {
                    (0, v) if v == a => 1,
                    (1, v) if v == b => 2,
                    (2, v) if v == a => 3,
                    (3, v) if v == b => return Some((a, b)),
                    (s, _) => s,
                };
            }
        }
    }
    None
}

/// Directed subarc graph over the arcs of two oriented substructure views;
/// returns one directed cycle's node points if present.
pub fn directed_subarc_cycle(
    model: &StripModel,
    v1: &SubView,
    v2: &SubView,
) -> Option<Vec<Point>> {
    let mut nodes: Vec<Point> = Vec::new();
    let mut tracks: Vec<Vec<(f64, usize)>> = Vec::new();
    let mut arc_refs: Vec<(usize, bool)> = Vec::new();
    for va in &v1.arcs {
        arc_refs.push((va.arc_idx, true));
        tracks.push(Vec::new());
    }
    for va in &v2.arcs {
        arc_refs.push((va.arc_idx, false));
        tracks.push(Vec::new());
    }
    let forward_of = |i: usize| if arc_refs[i].1 { v1.forward } else { v2.forward };
    for i in 0..arc_refs.len() {
        for j in i + 1..arc_refs.len() {
            let a = &model.arcs[arc_refs[i].0];
            let b = &model.arcs[arc_refs[j].0];
            if a.disk_id == b.disk_id {
                continue;
            }
            let da = &model.rest[a.rest_idx];
            let db = &model.rest[b.rest_idx];
            for p in circle_intersections(da, db) {
                let ta = angle_from(&da.center, &p);
                let tb = angle_from(&db.center, &p);
                if a.interval.contains(ta, 1e-7)
                    && b.interval.contains(tb, 1e-7)
                    && !model.h.iter().any(|hd| p.dist(&hd.center) < 1.0 - 1e-7)
                {
                    let id = nodes.len();
                    nodes.push(p);
                    tracks[i].push((travel_param(a, &p, forward_of(i)), id));
                    tracks[j].push((travel_param(b, &p, forward_of(j)), id));
                }
            }
        }
    }
    let n = nodes.len();
    if n == 0 {
        return None;
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for t in &mut tracks {
        t.sort_by(|x, y| x.0.total_cmp(&y.0));
        for w in t.windows(2) {
            adj[w[0].1].push(w[1].1);
        }
    }
    fn dfs(
        v: usize,
        adj: &[Vec<usize>],
        color: &mut [u8],
        trace: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        color[v] = 1;
        trace.push(v);
        for &w in &adj[v] {
            if color[w] == 1 {
                let pos = trace.iter().position(|&x| x == w).unwrap();
                return Some(trace[pos..].to_vec());
            }
            if color[w] == 0 {
                if let Some(c) = dfs(w, adj, color, trace) {
                    return Some(c);
                }
            }
        }
        trace.pop();
        color[v] = 2;
        None
    }
    let mut color = vec![0u8; n];
    let mut trace = Vec::new();
    for v in 0..n {
        if color[v] == 0 {
            if let Some(cyc) = dfs(v, &adj, &mut color, &mut trace) {
                return Some(cyc.into_iter().map(|i| nodes[i]).collect());
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compress_matches_known_sequence() {
        // 0101020 compresses to 01020: five l-segments
        assert_eq!(compress_labels(&[0, 1, 0, 1, 0, 2, 0]), vec![0, 1, 0, 2, 0]);
        assert_eq!(compress_labels(&[]), Vec::<usize>::new());
        assert_eq!(compress_labels(&[0, 0]), vec![0, 0]);
        assert_eq!(compress_labels(&[1, 1, 1]), vec![1]);
        assert_eq!(compress_labels(&[1, 0, 1, 2, 0, 2]), vec![1, 2]);
    }

    #[test]
    fn abab_detection() {
        assert_eq!(find_abab(&[0, 1, 0, 2, 0]), None);
        assert_eq!(find_abab(&[1, 2, 1, 2]), Some((1, 2)));
        assert_eq!(find_abab(&[1, 0, 2, 0, 1, 0, 2]), Some((1, 2)));
        assert_eq!(find_abab(&[1, 2, 2, 1]), None);
    }

    #[test]
    fn relation_graph_cycle_checker() {
        // hand-built 4-cycle: the checker alone must flag it
        let g = RelationGraph {
            n: 4,
            blue: vec![(0, 1), (2, 3)],
            red: vec![(1, 2), (3, 0)],
        };
        assert!(g.find_cycle().is_some());
        let path = RelationGraph { n: 3, blue: vec![(0, 1)], red: vec![(1, 2)] };
        assert!(path.find_cycle().is_none());
        assert_eq!(path.path_components(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn path_components_order_and_isolated() {
        let g = RelationGraph { n: 4, blue: vec![(2, 1)], red: vec![] };
        let comps = g.path_components();
        assert!(comps.contains(&vec![0]));
        assert!(comps.contains(&vec![1, 2]));
        assert!(comps.contains(&vec![3]));
    }
}
