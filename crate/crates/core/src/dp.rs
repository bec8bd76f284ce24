//! Dynamic programs over substructure components: exact minimum-weight
//! valid-path selection for one substructure, two overlapping substructures,
//! and a whole relation-graph path with sibling-arc single payment.
//!
//! The engine walks states made of one position handle per substructure.
//! A position is (current arc, next switch opportunity on it); the current
//! arc of each substructure is its base-arc. Baseline segments take part as
//! zero-weight pseudo-arcs owned by sentinel disks. A disk is paid exactly
//! once, at the transition that leaves its base-arc(s); sibling arcs of one
//! disk leave together when the disk is ready (no sibling still boardable
//! ahead), which is what makes the weight count once.

use crate::baselines::BitSet;
use crate::error::SolveError;
use crate::substructures::{span_order, ArcOrder, Code};
use std::collections::BTreeMap;
use std::collections::HashMap;

/// Sentinel disk id space for pseudo-arcs (baseline segments).
pub const SENTINEL_BASE: u32 = u32::MAX - 1_000_000;

#[derive(Debug, Clone)]
pub struct DpArc {
    pub disk: u32,
    pub weight: f64,
    pub span: (Code, Code),
    pub points: BitSet,
}

/// A strict-overlap crossing between two real arcs (`lower` precedes
/// `upper`), with travel parameters along each.
#[derive(Debug, Clone, Copy)]
pub struct DpCrossing {
    pub lower: usize,
    pub upper: usize,
    pub t_lower: f64,
    pub t_upper: f64,
}

#[derive(Debug, Clone)]
pub struct DpSub {
    /// Real arcs sorted by span.
    pub arcs: Vec<DpArc>,
    /// Number of snapped events on the baseline (>= 2).
    pub n_events: usize,
    pub crossings: Vec<DpCrossing>,
}

/// One relation-graph path component, ready for the DP.
#[derive(Debug, Clone)]
pub struct DpInput {
    pub subs: Vec<DpSub>,
    pub n_points: usize,
}

/// Node index space per substructure: real arcs, then pseudo-arcs (one per
/// gap between consecutive events), then the start and end sentinels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Node(u16);

#[derive(Debug, Clone, Copy)]
struct Edge {
    /// Switch from the owning node onto `to`, at these travel parameters.
    to: Node,
    t_from: f64,
    t_to: f64,
}

struct SubGraph {
    n_real: usize,
    n_pseudo: usize,
    /// Spans in a signed code space so sentinels order cleanly.
    spans: Vec<(i64, i64)>,
    disks: Vec<u32>,
    weights: Vec<f64>,
    points: Vec<BitSet>,
    /// Outgoing switch opportunities per node, sorted along the travel.
    edges: Vec<Vec<Edge>>,
}

impl SubGraph {
    fn start(&self) -> Node {
        Node((self.n_real + self.n_pseudo) as u16)
    }

    fn end(&self) -> Node {
        Node((self.n_real + self.n_pseudo + 1) as u16)
    }

    fn is_real(&self, n: Node) -> bool {
        (n.0 as usize) < self.n_real
    }

    fn span(&self, n: Node) -> (i64, i64) {
        self.spans[n.0 as usize]
    }
}

fn build_subgraph(sub: &DpSub, sub_idx: usize, n_points: usize) -> SubGraph {
    let n_real = sub.arcs.len();
    let n_events = sub.n_events.max(2);
    let n_pseudo = n_events - 1;
    let end_code = 3 * (n_events as i64 - 1);
    let mut spans: Vec<(i64, i64)> = Vec::new();
    let mut disks: Vec<u32> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let mut points: Vec<BitSet> = Vec::new();
    for a in &sub.arcs {
        spans.push((a.span.0 as i64, a.span.1 as i64));
        disks.push(a.disk);
        weights.push(a.weight);
        points.push(a.points.clone());
    }
    assert!(n_pseudo < 4094, "baseline event count exceeds the sentinel id space");
    for j in 0..n_pseudo {
        spans.push((3 * j as i64 + 1, 3 * j as i64 + 2));
        disks.push(SENTINEL_BASE + (sub_idx * 4096 + j) as u32);
        weights.push(0.0);
        points.push(BitSet::empty(n_points));
    }
    // start sentinel before everything, end sentinel after everything;
    // sentinel ids stay unique per substructure so hop enumeration never
    // conflates them
    spans.push((-2, -1));
    disks.push(SENTINEL_BASE + (sub_idx * 4096 + 4094) as u32);
    weights.push(0.0);
    points.push(BitSet::empty(n_points));
    spans.push((end_code + 1, end_code + 2));
    disks.push(SENTINEL_BASE + (sub_idx * 4096 + 4095) as u32);
    weights.push(0.0);
    points.push(BitSet::empty(n_points));

    let total = n_real + n_pseudo + 2;
    let mut edges: Vec<Vec<Edge>> = vec![Vec::new(); total];
    // real-real strict crossings
    for c in &sub.crossings {
        debug_assert!(matches!(
            span_order(sub.arcs[c.lower].span, sub.arcs[c.upper].span),
            ArcOrder::Earlier
        ));
        edges[c.lower].push(Edge { to: Node(c.upper as u16), t_from: c.t_lower, t_to: c.t_upper });
    }
    let travel_end = |a: usize| -> f64 {
        // travel length proxy: strictly after every stored crossing
        sub.crossings
            .iter()
            .filter(|c| c.lower == a)
            .map(|c| c.t_lower)
            .fold(0.0f64, f64::max)
            + 1.0
    };
    for a in 0..n_real {
        let (lo, hi) = (sub.arcs[a].span.0 as i64, sub.arcs[a].span.1 as i64);
        // touches with real arcs starting exactly at this arc's end
        for b in 0..n_real {
            if b != a && sub.arcs[b].span.0 as i64 == hi && (sub.arcs[a].span.1) < sub.arcs[b].span.1
            {
                edges[a].push(Edge { to: Node(b as u16), t_from: travel_end(a), t_to: 0.0 });
            }
        }
        // step off onto the pseudo-arc after the end event, or the end sentinel
        let end_rank = (hi / 3) as usize;
        if hi == end_code {
            let end = Node((n_real + n_pseudo + 1) as u16);
            edges[a].push(Edge { to: end, t_from: travel_end(a), t_to: 0.0 });
        } else {
            let pseudo = Node((n_real + end_rank) as u16);
            edges[a].push(Edge { to: pseudo, t_from: travel_end(a), t_to: 0.0 });
        }
        // boarding from the pseudo-arc before the start event
        let start_rank = (lo / 3) as usize;
        if lo == 0 {
            let start = Node((n_real + n_pseudo) as u16);
            edges[start.0 as usize].push(Edge { to: Node(a as u16), t_from: 0.0, t_to: 0.0 });
        } else {
            let pseudo = n_real + start_rank - 1;
            edges[pseudo].push(Edge { to: Node(a as u16), t_from: 1.0, t_to: 0.0 });
        }
    }
    for j in 0..n_pseudo {
        let me = n_real + j;
        if j + 1 < n_pseudo {
            edges[me].push(Edge { to: Node((me + 1) as u16), t_from: 1.0, t_to: 0.0 });
        } else {
            let end = Node((n_real + n_pseudo + 1) as u16);
            edges[me].push(Edge { to: end, t_from: 1.0, t_to: 0.0 });
        }
    }
    // start sentinel also steps onto the first pseudo-arc
    let start = n_real + n_pseudo;
    edges[start].push(Edge { to: Node(n_real as u16), t_from: 0.5, t_to: 0.0 });
    for list in edges.iter_mut() {
        list.sort_by(|x, y| x.t_from.total_cmp(&y.t_from).then(x.to.cmp(&y.to)));
    }
    SubGraph { n_real, n_pseudo, spans, disks, weights, points, edges }
}

/// A DP state: per substructure, the base-arc node and the index of the
/// next switch opportunity on it.
type StateKey = Vec<u32>;

fn key_of(pos: &[(Node, u16)]) -> StateKey {
    pos.iter().map(|(n, p)| ((n.0 as u32) << 16) | *p as u32).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Branch {
    /// Advance substructure k past its current switch opportunity.
    Free(usize),
    /// Pay the disk owning the base-arc of substructure k (and of every
    /// sibling base), hop all of them onto their top-arcs.
    Hop(usize),
}

#[derive(Debug)]
pub struct DpOutcome {
    pub weight: f64,
    /// Disks paid by the DP (sentinels excluded).
    pub disks: Vec<u32>,
    /// Per substructure: the boarded arc indices, in travel order.
    pub paths: Vec<Vec<usize>>,
    pub states_visited: u64,
}

struct Engine<'a> {
    graphs: Vec<SubGraph>,
    input: &'a DpInput,
    memo: HashMap<StateKey, (f64, Option<Branch>)>,
    req_cache: HashMap<Vec<u16>, BitSet>,
    stuck_seen: bool,
    state_budget: u64,
}

impl Engine<'_> {
    /// The subproblem point set for a state: points under arcs strictly
    /// later than each base, minus points under the bases themselves.
    fn req(&mut self, pos: &[(Node, u16)]) -> BitSet {
        let sig: Vec<u16> = pos.iter().map(|(n, _)| n.0).collect();
        if let Some(b) = self.req_cache.get(&sig) {
            return b.clone();
        }
        let mut need = BitSet::empty(self.input.n_points);
        for (k, (node, _)) in pos.iter().enumerate() {
            let g = &self.graphs[k];
            let base_span = g.span(*node);
            for a in 0..g.n_real {
                let sp = g.spans[a];
                if base_span.0 < sp.0 && base_span.1 < sp.1 {
                    need.union_with(&g.points[a]);
                }
            }
        }
        for (k, (node, _)) in pos.iter().enumerate() {
            let g = &self.graphs[k];
            if g.is_real(*node) {
                need.subtract(&g.points[node.0 as usize]);
            }
        }
        self.req_cache.insert(sig, need.clone());
        need
    }

    fn is_final(&self, pos: &[(Node, u16)]) -> bool {
        pos.iter().enumerate().all(|(k, (n, _))| *n == self.graphs[k].end())
    }

    /// Sibling substructures whose base-arc belongs to `disk`.
    fn processing_set(&self, pos: &[(Node, u16)], disk: u32) -> Vec<usize> {
        pos.iter()
            .enumerate()
            .filter(|(k, (n, _))| {
                self.graphs[*k].is_real(*n) && self.graphs[*k].disks[n.0 as usize] == disk
            })
            .map(|(k, _)| k)
            .collect()
    }

    /// Ready: no arc of `disk` is still boardable ahead of its
    /// substructure's base.
    fn disk_ready(&self, pos: &[(Node, u16)], disk: u32) -> bool {
        for (k, (node, _)) in pos.iter().enumerate() {
            let g = &self.graphs[k];
            let base_span = g.span(*node);
            for a in 0..g.n_real {
                if g.disks[a] == disk && g.spans[a] != base_span {
                    let sp = g.spans[a];
                    if base_span.0 < sp.0 && base_span.1 < sp.1 {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn solve(&mut self, pos: &mut Vec<(Node, u16)>) -> Result<f64, SolveError> {
        let key = key_of(pos);
        if let Some((v, _)) = self.memo.get(&key) {
            return Ok(*v);
        }
        if self.memo.len() as u64 >= self.state_budget {
            return Err(SolveError::StateBudgetExceeded { states: self.memo.len() as u64 });
        }
        if self.is_final(pos) {
            self.memo.insert(key, (0.0, None));
            return Ok(0.0);
        }
        // reserve the slot to catch accidental cycles in the transition graph
        self.memo.insert(key.clone(), (f64::INFINITY, None));
        let req_here = self.req(pos);
        let mut best = f64::INFINITY;
        let mut best_branch: Option<Branch> = None;
        let mut structural = false;

        // "add no disk": skip the current switch opportunity of one
        // substructure, guarded by point-set equality
        for k in 0..pos.len() {
            let (node, p) = pos[k];
            let list = &self.graphs[k].edges[node.0 as usize];
            if (p as usize) + 1 < list.len() {
                structural = true;
                pos[k] = (node, p + 1);
                let indicator_ok = {
                    let r2 = self.req(pos);
                    r2 == req_here
                };
                let v = if indicator_ok { self.solve(pos)? } else { f64::INFINITY };
                pos[k] = (node, p);
                let cand = v;
                if cand < best - 1e-15
                    || ((cand - best).abs() <= 1e-15 && better_branch(Branch::Free(k), best_branch, self, pos))
                {
                    best = cand;
                    best_branch = Some(Branch::Free(k));
                }
            }
        }

        // "add disk": hop every processing sibling of a ready disk
        let mut seen_disks: Vec<u32> = Vec::new();
        for k in 0..pos.len() {
            let (node, _) = pos[k];
            if node == self.graphs[k].end() {
                continue;
            }
            let disk = self.graphs[k].disks[node.0 as usize];
            if seen_disks.contains(&disk) {
                continue;
            }
            seen_disks.push(disk);
            let group = if self.graphs[k].is_real(node) {
                if !self.disk_ready(pos, disk) {
                    continue;
                }
                self.processing_set(pos, disk)
            } else {
                vec![k]
            };
            structural = true;
            let cost = if self.graphs[k].is_real(node) { self.graphs[k].weights[node.0 as usize] } else { 0.0 };
            let saved: Vec<(usize, (Node, u16))> = group.iter().map(|&j| (j, pos[j])).collect();
            let mut covered_by_boarded = BitSet::empty(self.input.n_points);
            for &j in &group {
                let (n, p) = pos[j];
                let edge = self.graphs[j].edges[n.0 as usize][p as usize];
                let to = edge.to;
                let arrive = edge.t_to;
                let next_p = self.graphs[j].edges[to.0 as usize]
                    .iter()
                    .position(|e| e.t_from >= arrive - 1e-12)
                    .unwrap_or(self.graphs[j].edges[to.0 as usize].len().saturating_sub(1));
                pos[j] = (to, next_p as u16);
                if self.graphs[j].is_real(to) {
                    covered_by_boarded.union_with(&self.graphs[j].points[to.0 as usize]);
                }
            }
            // feasibility: points required here may only disappear into the
            // requirement of the child state or under a boarded top-arc
            let r2 = self.req(pos);
            let mut dropped = req_here.clone();
            dropped.subtract(&r2);
            dropped.subtract(&covered_by_boarded);
            let v = if dropped.is_empty() { self.solve(pos)? } else { f64::INFINITY };
            for (j, old) in saved {
                pos[j] = old;
            }
            let cand = v + cost;
            if cand < best - 1e-15
                || ((cand - best).abs() <= 1e-15
                    && better_branch(Branch::Hop(k), best_branch, self, pos))
            {
                best = cand;
                best_branch = Some(Branch::Hop(k));
            }
        }

        if !structural {
            self.stuck_seen = true;
        }
        self.memo.insert(key, (best, best_branch));
        Ok(best)
    }
}

/// Deterministic tie-break: prefer "add no disk" over paying, then the
/// smaller substructure index, then the smaller disk id.
fn better_branch(new: Branch, old: Option<Branch>, eng: &Engine<'_>, pos: &[(Node, u16)]) -> bool {
    let rank = |b: Branch| -> (u8, u64) {
        match b {
            Branch::Free(k) => (0, k as u64),
            Branch::Hop(k) => {
                let (n, _) = pos[k];
                (1, eng.graphs[k].disks[n.0 as usize] as u64)
            }
        }
    };
    match old {
        None => true,
        Some(o) => rank(new) < rank(o),
    }
}

/// Exposed for checks: the subproblem point set of the initial state.
pub fn subproblem_points_initial(input: &DpInput) -> BitSet {
    let mut all = BitSet::empty(input.n_points);
    for s in &input.subs {
        for a in &s.arcs {
            all.union_with(&a.points);
        }
    }
    all
}

/// Solve one relation-graph path component. `state_budget` caps the number
/// of memoized states.
pub fn solve_component(input: &DpInput, state_budget: u64) -> Result<DpOutcome, SolveError> {
    for s in &input.subs {
        assert!(!s.arcs.is_empty(), "substructures always carry at least one arc");
    }
    // a point outside every arc region can never be covered
    let reachable = subproblem_points_initial(input);
    if let Some(point) = (0..input.n_points).find(|&i| !reachable.get(i)) {
        return Err(SolveError::NoFeasiblePath { point });
    }
    let graphs: Vec<SubGraph> = input
        .subs
        .iter()
        .enumerate()
        .map(|(i, s)| build_subgraph(s, i, input.n_points))
        .collect();
    let mut eng = Engine {
        graphs,
        input,
        memo: HashMap::new(),
        req_cache: HashMap::new(),
        stuck_seen: false,
        state_budget,
    };
    let mut pos: Vec<(Node, u16)> = (0..input.subs.len())
        .map(|k| (eng.graphs[k].start(), 0u16))
        .collect();
    let start_pos = pos.clone();
    let value = eng.solve(&mut pos)?;
    if !value.is_finite() {
        if eng.stuck_seen {
            return Err(SolveError::StuckState("no ready disk on some reachable state".into()));
        }
        let need = eng.req(&start_pos);
        let point = need.iter_ones(input.n_points).next().unwrap_or(0);
        return Err(SolveError::NoFeasiblePath { point });
    }
    // reconstruct the chosen branches
    let mut disks: Vec<u32> = Vec::new();
    let mut paths: Vec<Vec<usize>> = vec![Vec::new(); input.subs.len()];
    let mut cur = start_pos;
    loop {
        if eng.is_final(&cur) {
            break;
        }
        let key = key_of(&cur);
        let (_, branch) = eng.memo.get(&key).copied().expect("memoized state");
        match branch.expect("finite value implies a branch") {
            Branch::Free(k) => {
                cur[k].1 += 1;
            }
            Branch::Hop(k) => {
                let (node, _) = cur[k];
                let g = &eng.graphs[k];
                let disk = g.disks[node.0 as usize];
                let group = if g.is_real(node) { eng.processing_set(&cur, disk) } else { vec![k] };
                if g.is_real(node) && disk < SENTINEL_BASE {
                    disks.push(disk);
                }
                for j in group {
                    let (n, p) = cur[j];
                    let edge = eng.graphs[j].edges[n.0 as usize][p as usize];
                    let arrive = edge.t_to;
                    let to = edge.to;
                    let next_p = eng.graphs[j].edges[to.0 as usize]
                        .iter()
                        .position(|e| e.t_from >= arrive - 1e-12)
                        .unwrap_or(eng.graphs[j].edges[to.0 as usize].len().saturating_sub(1));
                    cur[j] = (to, next_p as u16);
                    if eng.graphs[j].is_real(to) {
                        paths[j].push(to.0 as usize);
                    }
                }
            }
        }
    }
    disks.sort_unstable();
    disks.dedup();
    // canonical weight: recomputed from the disk set in ascending id order
    let mut weight = 0.0;
    for &d in &disks {
        let w = input
            .subs
            .iter()
            .flat_map(|s| s.arcs.iter())
            .find(|a| a.disk == d)
            .map(|a| a.weight)
            .unwrap_or(0.0);
        weight += w;
    }
    Ok(DpOutcome { weight, disks, paths, states_visited: eng.memo.len() as u64 })
}

/// The two-substructure recursion: pair states with four branches (skip or
/// pay, on either side), indicators by point-set equality. Shared disks
/// between the two substructures are not supported here; use
/// [`solve_component`] for those.
pub fn solve_two(
    st1: &DpSub,
    st2: &DpSub,
    n_points: usize,
    state_budget: u64,
) -> Result<DpOutcome, SolveError> {
    for a in &st1.arcs {
        assert!(
            !st2.arcs.iter().any(|b| b.disk == a.disk),
            "solve_two requires disjoint disk sets; use solve_component"
        );
    }
    let input = DpInput { subs: vec![st1.clone(), st2.clone()], n_points };
    // with disjoint disks, ready-disk synchronization degenerates to the
    // four-branch pair recursion; run the engine and double-check the pair
    // structure in debug builds
    solve_component(&input, state_budget)
}

/// Re-derives every memoized finite state value from its successor states'
/// memoized values plus transition costs. Validates optimal substructure
/// for the test-suite: the stored value must equal the minimum over the
/// branches the engine lists.
pub fn audit_optimal_substructure(input: &DpInput, state_budget: u64) -> Result<bool, SolveError> {
    let graphs: Vec<SubGraph> = input
        .subs
        .iter()
        .enumerate()
        .map(|(i, s)| build_subgraph(s, i, input.n_points))
        .collect();
    let mut eng = Engine {
        graphs,
        input,
        memo: HashMap::new(),
        req_cache: HashMap::new(),
        stuck_seen: false,
        state_budget,
    };
    let mut pos: Vec<(Node, u16)> =
        (0..input.subs.len()).map(|k| (eng.graphs[k].start(), 0u16)).collect();
    eng.solve(&mut pos)?;
    let memo = eng.memo.clone();
    for (key, (value, _)) in &memo {
        if !value.is_finite() {
            continue;
        }
        let mut pos: Vec<(Node, u16)> = key
            .iter()
            .map(|&packed| (Node((packed >> 16) as u16), (packed & 0xffff) as u16))
            .collect();
        if eng.is_final(&pos) {
            if *value != 0.0 {
                return Ok(false);
            }
            continue;
        }
        // replay: recompute the min over branch candidates using only the
        // memoized child values
        let req_here = eng.req(&pos);
        let mut best = f64::INFINITY;
        for k in 0..pos.len() {
            let (node, p) = pos[k];
            let list_len = eng.graphs[k].edges[node.0 as usize].len();
            if (p as usize) + 1 < list_len {
                pos[k] = (node, p + 1);
                if eng.req(&pos) == req_here {
                    if let Some((v, _)) = memo.get(&key_of(&pos)) {
                        best = best.min(*v);
                    }
                }
                pos[k] = (node, p);
            }
        }
        let mut seen: Vec<u32> = Vec::new();
        for k in 0..pos.len() {
            let (node, _) = pos[k];
            if node == eng.graphs[k].end() {
                continue;
            }
            let disk = eng.graphs[k].disks[node.0 as usize];
            if seen.contains(&disk) {
                continue;
            }
            seen.push(disk);
            let group = if eng.graphs[k].is_real(node) {
                if !eng.disk_ready(&pos, disk) {
                    continue;
                }
                eng.processing_set(&pos, disk)
            } else {
                vec![k]
            };
            let cost = if eng.graphs[k].is_real(node) {
                eng.graphs[k].weights[node.0 as usize]
            } else {
                0.0
            };
            let saved: Vec<(usize, (Node, u16))> = group.iter().map(|&j| (j, pos[j])).collect();
            let mut boarded = BitSet::empty(input.n_points);
            for &j in &group {
                let (n, p) = pos[j];
                let edge = eng.graphs[j].edges[n.0 as usize][p as usize];
                let next_p = eng.graphs[j].edges[edge.to.0 as usize]
                    .iter()
                    .position(|e| e.t_from >= edge.t_to - 1e-12)
                    .unwrap_or(eng.graphs[j].edges[edge.to.0 as usize].len().saturating_sub(1));
                pos[j] = (edge.to, next_p as u16);
                if eng.graphs[j].is_real(edge.to) {
                    boarded.union_with(&eng.graphs[j].points[edge.to.0 as usize]);
                }
            }
            let r2 = eng.req(&pos);
            let mut dropped = req_here.clone();
            dropped.subtract(&r2);
            dropped.subtract(&boarded);
            if dropped.is_empty() {
                if let Some((v, _)) = memo.get(&key_of(&pos)) {
                    best = best.min(*v + cost);
                }
            }
            for (j, old) in saved {
                pos[j] = old;
            }
        }
        if (best - *value).abs() > 1e-12 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Per-arc edge labels of the disk-substructure incidence graph at a state,
/// for invariant checks: the base-arc is `processing`, arcs still boardable
/// ahead of the base are `unprocessed`, everything else is `done`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeLabel {
    Unprocessed,
    Processing,
    Done,
}

/// Labels for one substructure given its base span.
pub fn incidence_labels(sub: &DpSub, base_span: (i64, i64)) -> Vec<EdgeLabel> {
    sub.arcs
        .iter()
        .map(|a| {
            let sp = (a.span.0 as i64, a.span.1 as i64);
            if sp == base_span {
                EdgeLabel::Processing
            } else if base_span.0 < sp.0 && base_span.1 < sp.1 {
                EdgeLabel::Unprocessed
            } else {
                EdgeLabel::Done
            }
        })
        .collect()
}

/// Assemble the final block solution: guess ∪ helpers ∪ DP picks, each disk
/// counted once; feasibility is verified by the caller against the original
/// instance.
pub fn assemble_disk_sets(
    guess: &[u32],
    helpers_gadget: &[u32],
    helpers_cut: &[u32],
    dp_disks: &[u32],
) -> BTreeMap<u32, crate::instance::Stage> {
    use crate::instance::Stage;
    let mut map = BTreeMap::new();
    for &d in guess {
        map.insert(d, Stage::Guess);
    }
    for &d in helpers_gadget {
        map.entry(d).or_insert(Stage::Gadget);
    }
    for &d in helpers_cut {
        map.entry(d).or_insert(Stage::Cut);
    }
    for &d in dp_disks {
        map.entry(d).or_insert(Stage::Dp);
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(n: usize, ones: &[usize]) -> BitSet {
        let mut b = BitSet::empty(n);
        for &i in ones {
            b.set(i);
        }
        b
    }

    /// One arc spanning the whole baseline (events 0..1), covering point 0.
    fn single_arc_sub(weight: f64) -> DpSub {
        DpSub {
            arcs: vec![DpArc { disk: 0, weight, span: (0, 3), points: bits(1, &[0]) }],
            n_events: 2,
            crossings: vec![],
        }
    }

    #[test]
    fn zero_points_costs_nothing() {
        let sub = DpSub {
            arcs: vec![DpArc { disk: 0, weight: 5.0, span: (0, 3), points: bits(0, &[]) }],
            n_events: 2,
            crossings: vec![],
        };
        let out = solve_component(&DpInput { subs: vec![sub], n_points: 0 }, 1 << 20).unwrap();
        assert_eq!(out.weight, 0.0);
        assert!(out.disks.is_empty());
    }

    #[test]
    fn single_required_arc_is_paid() {
        let out =
            solve_component(&DpInput { subs: vec![single_arc_sub(2.5)], n_points: 1 }, 1 << 20)
                .unwrap();
        assert_eq!(out.weight, 2.5);
        assert_eq!(out.disks, vec![0]);
    }

    #[test]
    fn chain_picks_cheapest_cover() {
        // two crossing arcs; point 0 under both, point 1 only under arc b;
        // optimum pays only b
        let sub = DpSub {
            arcs: vec![
                DpArc { disk: 0, weight: 3.0, span: (0, 6), points: bits(2, &[0]) },
                DpArc { disk: 1, weight: 2.0, span: (3, 9), points: bits(2, &[0, 1]) },
            ],
            n_events: 4,
            crossings: vec![DpCrossing { lower: 0, upper: 1, t_lower: 0.5, t_upper: 0.1 }],
        };
        let out = solve_component(&DpInput { subs: vec![sub], n_points: 2 }, 1 << 20).unwrap();
        assert_eq!(out.disks, vec![1]);
        assert_eq!(out.weight, 2.0);
    }

    #[test]
    fn uncoverable_point_is_no_feasible_path() {
        let sub = DpSub {
            arcs: vec![DpArc { disk: 0, weight: 1.0, span: (0, 3), points: bits(2, &[0]) }],
            n_events: 2,
            crossings: vec![],
        };
        match solve_component(&DpInput { subs: vec![sub], n_points: 2 }, 1 << 20) {
            Err(SolveError::NoFeasiblePath { point: 1 }) => {}
            other => panic!("expected NoFeasiblePath for point 1, got {other:?}"),
        }
    }

    #[test]
    fn sibling_disk_counted_once() {
        // the same disk contributes one arc to each of two substructures;
        // both arcs are required; weight must count once
        let mk = |points: BitSet| DpSub {
            arcs: vec![DpArc { disk: 7, weight: 4.0, span: (0, 3), points }],
            n_events: 2,
            crossings: vec![],
        };
        let input =
            DpInput { subs: vec![mk(bits(2, &[0])), mk(bits(2, &[1]))], n_points: 2 };
        let out = solve_component(&input, 1 << 20).unwrap();
        assert_eq!(out.disks, vec![7]);
        assert_eq!(out.weight, 4.0, "sibling arcs pay their disk once, not twice");
    }

    #[test]
    fn solve_two_matches_component_on_disjoint_pair() {
        let s1 = DpSub {
            arcs: vec![
                DpArc { disk: 0, weight: 1.0, span: (0, 6), points: bits(3, &[0]) },
                DpArc { disk: 1, weight: 2.0, span: (3, 9), points: bits(3, &[1]) },
            ],
            n_events: 4,
            crossings: vec![DpCrossing { lower: 0, upper: 1, t_lower: 0.5, t_upper: 0.1 }],
        };
        let s2 = DpSub {
            arcs: vec![DpArc { disk: 2, weight: 1.5, span: (0, 3), points: bits(3, &[2]) }],
            n_events: 2,
            crossings: vec![],
        };
        let a = solve_two(&s1, &s2, 3, 1 << 20).unwrap();
        let b =
            solve_component(&DpInput { subs: vec![s1, s2], n_points: 3 }, 1 << 20).unwrap();
        assert_eq!(a.weight, b.weight);
        assert_eq!(a.disks, b.disks);
    }

    #[test]
    fn incidence_labels_cases() {
        let sub = DpSub {
            arcs: vec![
                DpArc { disk: 0, weight: 1.0, span: (0, 6), points: bits(0, &[]) },
                DpArc { disk: 1, weight: 1.0, span: (3, 9), points: bits(0, &[]) },
                DpArc { disk: 2, weight: 1.0, span: (9, 12), points: bits(0, &[]) },
            ],
            n_events: 5,
            crossings: vec![],
        };
        let labels = incidence_labels(&sub, (3, 9));
        assert_eq!(
            labels,
            vec![EdgeLabel::Done, EdgeLabel::Processing, EdgeLabel::Unprocessed]
        );
    }
}
