//! Shared test support: independent oracles (valid-path enumeration for the
//! DP, exhaustive subset covers, a dominating-set branch-and-bound) and
//! fixture harvesting through the helper pipeline.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use udc_core::baselines::BitSet;
use udc_core::dp::{DpInput, DpSub};
use udc_core::gadgets::build_grid;
use udc_core::geom::{point_in_disk, Disk, DiskId, Point, TOL};
use udc_core::hbuilder::HBuilder;
use udc_core::instance::Instance;

/// All valid paths of one substructure as sets of boarded real arcs.
///
/// A path may start on any arc (boarded at its footprint start, reachable by
/// riding the baseline) and moves to a strictly later arc either through a
/// recorded crossing at or after the boarding parameter, or by riding the
/// baseline across a footprint gap (including endpoint touches).
fn all_path_sets(sub: &DpSub) -> Vec<Vec<usize>> {
    let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
    out.insert(vec![]);
    fn dfs(sub: &DpSub, cur: usize, t_board: f64, path: &mut Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
        let mut sorted = path.clone();
        sorted.sort_unstable();
        out.insert(sorted);
        for c in 0..sub.arcs.len() {
            if path.contains(&c) {
                continue;
            }
            // gap or endpoint touch: always boardable at the start of c
            if sub.arcs[c].span.0 >= sub.arcs[cur].span.1 {
                path.push(c);
                dfs(sub, c, 0.0, path, out);
                path.pop();
                continue;
            }
            // strict overlap: board at a crossing not behind the entry
            for cr in &sub.crossings {
                if cr.lower == cur && cr.upper == c && cr.t_lower >= t_board - 1e-12 {
                    path.push(c);
                    dfs(sub, c, cr.t_upper, path, out);
                    path.pop();
                }
            }
        }
    }
    for a in 0..sub.arcs.len() {
        let mut path = vec![a];
        dfs(sub, a, 0.0, &mut path, &mut out);
    }
    out.into_iter().collect()
}

/// Exhaustive minimum over tuples of valid paths: feasibility by direct
/// coverage union, weight by the deduplicated disk set summed in ascending
/// id order. Returns `(weight, disk ids)` or `None` when infeasible.
pub fn enumerate_optimum(input: &DpInput) -> Option<(f64, Vec<u32>)> {
    let per_sub: Vec<Vec<Vec<usize>>> = input.subs.iter().map(all_path_sets).collect();
    let weight_of = |disk: u32| -> f64 {
        input
            .subs
            .iter()
            .flat_map(|s| s.arcs.iter())
            .find(|a| a.disk == disk)
            .map(|a| a.weight)
            .unwrap()
    };
    let mut best: Option<(f64, Vec<u32>)> = None;
    let mut stack: Vec<usize> = vec![0; input.subs.len()];
    loop {
        // evaluate the tuple
        let mut covered = BitSet::empty(input.n_points);
        let mut disks: Vec<u32> = Vec::new();
        for (k, &pi) in stack.iter().enumerate() {
            for &a in &per_sub[k][pi] {
                covered.union_with(&input.subs[k].arcs[a].points);
                disks.push(input.subs[k].arcs[a].disk);
            }
        }
        let feasible = (0..input.n_points).all(|i| covered.get(i));
        if feasible {
            disks.sort_unstable();
            disks.dedup();
            let weight: f64 = disks.iter().map(|&d| weight_of(d)).sum();
            let better = match &best {
                None => true,
                Some((bw, bd)) => weight < bw - 1e-15 || ((weight - bw).abs() <= 1e-15 && disks < *bd),
            };
            if better {
                best = Some((weight, disks));
            }
        }
        // advance the product counter
        let mut k = 0;
        loop {
            if k == stack.len() {
                return best;
            }
            stack[k] += 1;
            if stack[k] < per_sub[k].len() {
                break;
            }
            stack[k] = 0;
            k += 1;
        }
    }
}

/// Exhaustive minimum-weight cover over all disk subsets (n <= 20).
pub fn exhaustive_cover(instance: &Instance) -> Option<(f64, BTreeSet<DiskId>)> {
    let n = instance.disks.len();
    assert!(n <= 20);
    let mut best: Option<(f64, BTreeSet<DiskId>)> = None;
    for mask in 0u32..(1u32 << n) {
        let ids: BTreeSet<DiskId> =
            (0..n).filter(|i| mask >> i & 1 == 1).map(|i| instance.disks[i].id).collect();
        let covers = instance.points.iter().all(|p| {
            ids.iter().any(|&id| point_in_disk(p, instance.disk_by_id(id).unwrap(), TOL))
        });
        if !covers {
            continue;
        }
        let w = instance.total_weight_of(&ids);
        let better = match &best {
            None => true,
            Some((bw, bids)) => w < bw - 1e-15 || ((w - bw).abs() <= 1e-15 && ids < *bids),
        };
        if better {
            best = Some((w, ids));
        }
    }
    best
}

/// Run the helper pipeline over a whole instance (no guessing) with a grid
/// sized to the instance bounds.
pub fn pipeline_on(instance: &Instance, eps: f64) -> Result<HBuilder, udc_core::SolveError> {
    assert!(!instance.disks.is_empty());
    let min_x = instance.disks.iter().map(|d| d.center.x).fold(f64::INFINITY, f64::min);
    let min_y = instance.disks.iter().map(|d| d.center.y).fold(f64::INFINITY, f64::min);
    let max_x = instance.disks.iter().map(|d| d.center.x).fold(f64::NEG_INFINITY, f64::max);
    let max_y = instance.disks.iter().map(|d| d.center.y).fold(f64::NEG_INFINITY, f64::max);
    let origin = Point::new(min_x - 0.05, min_y - 0.05);
    let span = (max_x - min_x).max(max_y - min_y).max(1.0) + 0.1;
    let grid = build_grid(origin, span, eps);
    let cap = 8.0 * grid.mu;
    let mut builder =
        HBuilder::new(instance.disks.clone(), instance.points.clone(), grid, cap);
    builder.build()?;
    Ok(builder)
}

/// Unit disk graph adjacency under the `||u - v|| <= 1` edge rule.
pub fn udg_adjacency(vertices: &[(Point, f64)]) -> Vec<Vec<bool>> {
    let n = vertices.len();
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && vertices[i].0.dist(&vertices[j].0) <= 1.0 + TOL {
                adj[i][j] = true;
            }
        }
    }
    adj
}

pub fn is_dominating_set(vertices: &[(Point, f64)], set: &BTreeSet<u32>) -> bool {
    let adj = udg_adjacency(vertices);
    (0..vertices.len()).all(|v| {
        set.contains(&(v as u32))
            || adj[v].iter().enumerate().any(|(u, &e)| e && set.contains(&(u as u32)))
    })
}

/// Direct dominating-set branch and bound: branch on the first undominated
/// vertex over its closed neighborhood. Independent of the set-cover path.
pub fn mwds_exact(vertices: &[(Point, f64)]) -> (f64, BTreeSet<u32>) {
    let n = vertices.len();
    let adj = udg_adjacency(vertices);
    let closed: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let mut c = vec![v];
            c.extend((0..n).filter(|&u| adj[v][u]));
            c.sort_unstable();
            c
        })
        .collect();
    struct S<'a> {
        vertices: &'a [(Point, f64)],
        closed: &'a [Vec<usize>],
        best: f64,
        best_set: Option<BTreeSet<u32>>,
    }
    fn rec(s: &mut S<'_>, chosen: &mut Vec<usize>, dominated: &mut Vec<u32>, weight: f64) {
        if weight > s.best + 1e-15 {
            return;
        }
        let undom = dominated.iter().position(|&c| c == 0);
        match undom {
            None => {
                let ids: BTreeSet<u32> = chosen.iter().map(|&v| v as u32).collect();
                let better = weight < s.best - 1e-15
                    || ((weight - s.best).abs() <= 1e-15
                        && s.best_set.as_ref().is_none_or(|b| ids < *b));
                if better {
                    s.best = weight;
                    s.best_set = Some(ids);
                }
            }
            Some(v) => {
                // some vertex of N[v] must join the set
                let mut cands = s.closed[v].clone();
                cands.sort_by(|&a, &b| {
                    s.vertices[a].1.total_cmp(&s.vertices[b].1).then(a.cmp(&b))
                });
                for u in cands {
                    if chosen.contains(&u) {
                        continue;
                    }
                    chosen.push(u);
                    for &d in &s.closed[u] {
                        dominated[d] += 1;
                    }
                    rec(s, chosen, dominated, weight + s.vertices[u].1);
                    for &d in &s.closed[u] {
                        dominated[d] -= 1;
                    }
                    chosen.pop();
                }
            }
        }
    }
    let mut s = S { vertices, closed: &closed, best: f64::INFINITY, best_set: None };
    rec(&mut s, &mut Vec::new(), &mut vec![0; n], 0.0);
    let set = s.best_set.expect("a dominating set always exists (take all vertices)");
    let weight = set.iter().map(|&v| vertices[v as usize].1).sum();
    (weight, set)
}

/// Facing-squares fixture family: two gadget rows whose strips overlap in a
/// band between them, so substructures of different squares share covered
/// points (red edges). Deterministic per seed.
pub fn facing_squares_instance(seed: u64) -> Instance {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    // (x, y, jitter x, jitter y) per disk; lower square around y ~ 0.35,
    // upper square around y ~ 2.25
    let layout: [(f64, f64, f64, f64); 7] = [
        (0.08, 0.30, 0.02, 0.02),
        (0.60, 0.38, 0.02, 0.02),
        (0.33, 0.36, 0.04, 0.04),
        (0.25, 0.42, 0.06, 0.05),
        (0.10, 2.22, 0.02, 0.02),
        (0.58, 2.28, 0.02, 0.02),
        (0.36, 2.24, 0.04, 0.04),
    ];
    let mut disks = Vec::new();
    for (id, &(x, y, jx, jy)) in layout.iter().enumerate() {
        let dx = rng.gen_range(-jx..jx);
        let dy = rng.gen_range(-jy..jy);
        let w = rng.gen_range(1.0..5.0f64);
        disks.push(Disk::new(id as u32, x + dx, y + dy, w));
    }
    let mut points = Vec::new();
    // points in the shared band, plus a few in each strip
    for _ in 0..4 {
        points.push(Point::new(rng.gen_range(0.1..0.6), rng.gen_range(1.26..1.33)));
    }
    for _ in 0..2 {
        points.push(Point::new(rng.gen_range(0.1..0.6), rng.gen_range(1.05..1.2)));
        points.push(Point::new(rng.gen_range(0.1..0.6), rng.gen_range(1.4..1.5)));
    }
    Instance::new(disks, points)
}
