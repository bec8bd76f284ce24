//! Exact and greedy reference solvers over the set-system view of an
//! instance. Both serve as correctness and ratio oracles for the PTAS.

use crate::error::SolveError;
use crate::geom::{point_in_disk, DiskId, TOL};
use crate::instance::{Instance, Solution, Stage};
use std::collections::{BTreeMap, BTreeSet};

/// Bit per (point, disk) pair meaning `point_in_disk`. Immutable after build.
#[derive(Debug, Clone)]
pub struct CoverageMatrix {
    pub n_points: usize,
    pub n_disks: usize,
    /// One bitset of covered points per disk.
    disk_rows: Vec<BitSet>,
}

/// Minimal fixed-capacity bitset over point indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn empty(n: usize) -> Self {
        BitSet { words: vec![0; n.div_ceil(64)] }
    }

    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn union_with(&mut self, other: &BitSet) {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
    }

    pub fn subtract(&mut self, other: &BitSet) {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w &= !o;
        }
    }

    pub fn intersect_count(&self, other: &BitSet) -> u32 {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum()
    }

    pub fn count(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn contains_all(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| b & !a == 0)
    }

    pub fn first_missing(&self, universe: usize) -> Option<usize> {
        (0..universe).find(|&i| !self.get(i))
    }

    pub fn iter_ones(&self, universe: usize) -> impl Iterator<Item = usize> + '_ {
        (0..universe).filter(move |&i| self.get(i))
    }
}

impl CoverageMatrix {
    pub fn build(instance: &Instance) -> Self {
        let n_points = instance.points.len();
        let disk_rows = instance
            .disks
            .iter()
            .map(|d| {
                let mut row = BitSet::empty(n_points);
                for (i, p) in instance.points.iter().enumerate() {
                    if point_in_disk(p, d, TOL) {
                        row.set(i);
                    }
                }
                row
            })
            .collect();
        CoverageMatrix { n_points, n_disks: instance.disks.len(), disk_rows }
    }

    pub fn row(&self, disk: usize) -> &BitSet {
        &self.disk_rows[disk]
    }

    pub fn covers(&self, disk: usize, point: usize) -> bool {
        self.disk_rows[disk].get(point)
    }

    /// First point not covered by any disk, if any.
    pub fn uncoverable_point(&self) -> Option<usize> {
        let mut all = BitSet::empty(self.n_points);
        for row in &self.disk_rows {
            all.union_with(row);
        }
        all.first_missing(self.n_points)
    }
}

/// Admissible lower bound for the remaining uncovered set: each uncovered
/// point is charged the cheapest per-point share `w(D) / |cov(D) ∩ U|`
/// among the disks that cover it.
fn share_lower_bound(cov: &CoverageMatrix, weights: &[f64], uncovered: &BitSet) -> f64 {
    let mut lb = 0.0;
    for p in uncovered.iter_ones(cov.n_points) {
        let mut best = f64::INFINITY;
        for d in 0..cov.n_disks {
            if cov.covers(d, p) {
                let gain = cov.row(d).intersect_count(uncovered) as f64;
                if gain > 0.0 {
                    let share = weights[d] / gain;
                    if share < best {
                        best = share;
                    }
                }
            }
        }
        if best.is_finite() {
            lb += best;
        }
    }
    lb
}

struct BnB<'a> {
    cov: &'a CoverageMatrix,
    weights: Vec<f64>,
    order: Vec<usize>,
    best_weight: f64,
    best_set: Option<Vec<usize>>,
    nodes: u64,
    budget: u64,
}

impl BnB<'_> {
    fn run(&mut self, chosen: &mut Vec<usize>, covered: BitSet, weight: f64) -> Result<(), SolveError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(SolveError::BudgetExceeded { nodes: self.nodes });
        }
        let uncovered = {
            let mut u = BitSet::empty(self.cov.n_points);
            for i in 0..self.cov.n_points {
                if !covered.get(i) {
                    u.set(i);
                }
            }
            u
        };
        if uncovered.is_empty() {
            let mut ids = chosen.clone();
            ids.sort_unstable();
            let better = weight < self.best_weight - 1e-15
                || ((weight - self.best_weight).abs() <= 1e-15
                    && self.best_set.as_ref().is_none_or(|b| ids < *b));
            if better {
                self.best_weight = weight;
                self.best_set = Some(ids);
            }
            return Ok(());
        }
        // prune strictly worse branches; ties continue so the lexicographic
        // tie-break can still surface a smaller id set
        if weight + share_lower_bound(self.cov, &self.weights, &uncovered)
            > self.best_weight + 1e-15
        {
            return Ok(());
        }
        // branch on the first uncovered point: some covering disk must be
        // chosen; explore in ratio order so good incumbents arrive early
        let p = uncovered.iter_ones(self.cov.n_points).next().unwrap();
        let candidates: Vec<usize> = self
            .order
            .iter()
            .copied()
            .filter(|&d| self.cov.covers(d, p) && !chosen.contains(&d))
            .collect();
        for d in candidates {
            let mut cov2 = covered.clone();
            cov2.union_with(self.cov.row(d));
            chosen.push(d);
            self.run(chosen, cov2, weight + self.weights[d])?;
            chosen.pop();
        }
        Ok(())
    }
}

/// Minimum-total-weight feasible cover by branch-and-bound over disk subsets.
/// Deterministic: ties are broken by the lexicographically smallest sorted
/// disk-id set.
pub fn exact_solve(instance: &Instance, node_budget: u64) -> Result<Solution, SolveError> {
    let cov = CoverageMatrix::build(instance);
    if let Some(p) = cov.uncoverable_point() {
        return Err(SolveError::Infeasible { point: p });
    }
    let weights: Vec<f64> = instance.disks.iter().map(|d| d.weight).collect();
    let mut order: Vec<usize> = (0..cov.n_disks).collect();
    // explore cheap high-coverage disks first
    order.sort_by(|&a, &b| {
        let ra = weights[a] / (cov.row(a).count().max(1) as f64);
        let rb = weights[b] / (cov.row(b).count().max(1) as f64);
        ra.total_cmp(&rb).then(a.cmp(&b))
    });
    let mut bnb = BnB {
        cov: &cov,
        weights,
        order,
        best_weight: f64::INFINITY,
        best_set: None,
        nodes: 0,
        budget: node_budget,
    };
    let covered = BitSet::empty(cov.n_points);
    bnb.run(&mut Vec::new(), covered, 0.0)?;
    // positions -> instance disk ids (subinstances may carry sparse ids)
    let ids: BTreeSet<DiskId> = bnb
        .best_set
        .expect("feasible instance")
        .into_iter()
        .map(|d| instance.disks[d].id)
        .collect();
    let trace: BTreeMap<DiskId, Stage> = ids.iter().map(|&id| (id, Stage::Baseline)).collect();
    Ok(Solution::from_ids(instance, ids, trace))
}

/// Default branch-and-bound node budget.
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

/// Greedy weighted set cover: each iteration picks the disk minimizing
/// `weight / newly covered points`, ties broken by smaller id.
pub fn greedy_solve(instance: &Instance) -> Result<Solution, SolveError> {
    let cov = CoverageMatrix::build(instance);
    if let Some(p) = cov.uncoverable_point() {
        return Err(SolveError::Infeasible { point: p });
    }
    let mut uncovered = BitSet::empty(cov.n_points);
    for i in 0..cov.n_points {
        uncovered.set(i);
    }
    let mut chosen: BTreeSet<usize> = BTreeSet::new();
    while !uncovered.is_empty() {
        let mut best: Option<(f64, usize)> = None;
        for d in 0..cov.n_disks {
            if chosen.contains(&d) {
                continue;
            }
            let gain = cov.row(d).intersect_count(&uncovered);
            if gain == 0 {
                continue;
            }
            let ratio = instance.disks[d].weight / gain as f64;
            let better = match best {
                None => true,
                Some((r, i)) => {
                    ratio < r - 1e-15
                        || ((ratio - r).abs() <= 1e-15 && instance.disks[d].id < instance.disks[i].id)
                }
            };
            if better {
                best = Some((ratio, d));
            }
        }
        let (_, d) = best.expect("coverable instance cannot stall");
        chosen.insert(d);
        uncovered.subtract(cov.row(d));
    }
    let ids: BTreeSet<DiskId> = chosen.into_iter().map(|d| instance.disks[d].id).collect();
    let trace: BTreeMap<DiskId, Stage> = ids.iter().map(|&id| (id, Stage::Baseline)).collect();
    Ok(Solution::from_ids(instance, ids, trace))
}

/// Harmonic number `H_m`.
pub fn harmonic(m: usize) -> f64 {
    (1..=m).map(|i| 1.0 / i as f64).sum()
}
