//! Shifted grid decomposition: the plane is cut into L×L blocks over L
//! diagonal shifts, each block is solved independently, and the cheapest
//! combined solution over all shifts wins.

use crate::error::SolveError;
use crate::geom::{Disk, DiskId, Point};
use crate::instance::{Instance, Solution, Stage};
use std::collections::{BTreeMap, BTreeSet};

/// One block of a shifted decomposition.
#[derive(Debug, Clone)]
pub struct Block {
    /// Half-open bounding box `[x0, x0+L) x [y0, y0+L)`.
    pub x0: f64,
    pub y0: f64,
    pub side: f64,
    pub point_indices: Vec<usize>,
    pub disk_indices: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    pub l: u32,
    pub shift: u32,
    pub blocks: Vec<Block>,
}

fn block_coord(v: f64, l: f64, shift: f64) -> i64 {
    ((v - shift) / l).floor() as i64
}

/// Distance from a point to a closed axis-aligned box.
fn box_dist(p: &Point, x0: f64, y0: f64, side: f64) -> f64 {
    let dx = (x0 - p.x).max(p.x - (x0 + side)).max(0.0);
    let dy = (y0 - p.y).max(p.y - (y0 + side)).max(0.0);
    dx.hypot(dy)
}

/// Partition points into L×L blocks on the grid shifted diagonally by
/// `shift` on both axes. Every point lands in exactly one (half-open) block;
/// a disk is a candidate of a block iff its center is within distance 1 of
/// the block's box.
pub fn decompose(instance: &Instance, l: u32, shift: u32) -> BlockDecomposition {
    assert!(l >= 3, "block side must be an integer >= 3");
    assert!(shift < l);
    let lf = l as f64;
    let sf = shift as f64;
    let mut map: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for (i, p) in instance.points.iter().enumerate() {
        let key = (block_coord(p.x, lf, sf), block_coord(p.y, lf, sf));
        map.entry(key).or_default().push(i);
    }
    let blocks = map
        .into_iter()
        .map(|((bx, by), point_indices)| {
            let x0 = bx as f64 * lf + sf;
            let y0 = by as f64 * lf + sf;
            let disk_indices = instance
                .disks
                .iter()
                .enumerate()
                .filter(|(_, d)| box_dist(&d.center, x0, y0, lf) <= 1.0)
                .map(|(i, _)| i)
                .collect();
            Block { x0, y0, side: lf, point_indices, disk_indices }
        })
        .collect();
    BlockDecomposition { l, shift, blocks }
}

/// A per-block subinstance. Disk ids are preserved from the parent instance
/// so block solutions can be unioned directly.
pub fn block_subinstance(instance: &Instance, block: &Block) -> Instance {
    let disks: Vec<Disk> = block.disk_indices.iter().map(|&i| instance.disks[i]).collect();
    let points: Vec<Point> = block.point_indices.iter().map(|&i| instance.points[i]).collect();
    let mut sub = Instance::new(disks, points);
    sub.meta.insert("block".into(), format!("{},{}", block.x0, block.y0));
    sub
}

/// Per-block solver contract: returns a feasible cover of the subinstance
/// (ids refer to the parent instance) or an error.
pub type BlockSolver<'a> = dyn Fn(&Instance, &Block) -> Result<Solution, SolveError> + Sync + 'a;

/// Lemma-style outer loop: for each shift, solve every block and union the
/// per-block solutions (a disk selected in two blocks is paid once); return
/// the minimum-weight union over shifts.
///
/// `threads` > 1 solves the blocks of one shift concurrently; the reduction
/// is deterministic (blocks are merged in index order).
pub fn shifted_solve(
    instance: &Instance,
    l: u32,
    block_solver: &BlockSolver<'_>,
    threads: usize,
) -> Result<Solution, SolveError> {
    if instance.points.is_empty() {
        return Ok(Solution::from_ids(instance, BTreeSet::new(), BTreeMap::new()));
    }
    let mut best: Option<Solution> = None;
    let mut last_err: Option<SolveError> = None;
    for shift in 0..l {
        let dec = decompose(instance, l, shift);
        let results = solve_blocks(instance, &dec.blocks, block_solver, threads);
        let mut ids: BTreeSet<DiskId> = BTreeSet::new();
        let mut trace: BTreeMap<DiskId, Stage> = BTreeMap::new();
        let mut failed = false;
        for r in results {
            match r {
                Ok(sol) => {
                    for id in sol.disk_ids {
                        ids.insert(id);
                        let stage = sol.trace.get(&id).copied().unwrap_or(Stage::Baseline);
                        trace.entry(id).or_insert(stage);
                    }
                }
                Err(e) => {
                    last_err = Some(e);
                    failed = true;
                    break;
                }
            }
        }
        if failed {
            continue;
        }
        let candidate = Solution::from_ids(instance, ids, trace);
        // feasibility of the union is checked before taking the min
        if candidate.verify_cover(instance).is_err() {
            continue;
        }
        let better = match &best {
            None => true,
            Some(b) => candidate.total_weight < b.total_weight - 1e-15,
        };
        if better {
            best = Some(candidate);
        }
    }
    best.ok_or_else(|| last_err.unwrap_or(SolveError::Infeasible { point: 0 }))
}

fn solve_blocks(
    instance: &Instance,
    blocks: &[Block],
    block_solver: &BlockSolver<'_>,
    threads: usize,
) -> Vec<Result<Solution, SolveError>> {
    if threads <= 1 || blocks.len() <= 1 {
        return blocks.iter().map(|b| block_solver(instance, b)).collect();
    }
    let mut results: Vec<Option<Result<Solution, SolveError>>> = Vec::new();
    results.resize_with(blocks.len(), || None);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let results_mx = std::sync::Mutex::new(&mut results);
    std::thread::scope(|scope| {
        for _ in 0..threads.min(blocks.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if i >= blocks.len() {
                    break;
                }
                let r = block_solver(instance, &blocks[i]);
                results_mx.lock().unwrap()[i] = Some(r);
            });
        }
    });
    results.into_iter().map(|r| r.expect("all blocks solved")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::exact_solve;
    use crate::geom::Disk;
    use crate::instance::{generate, WeightSpec};

    fn exact_block_solver(parent: &Instance, block: &Block) -> Result<Solution, SolveError> {
        // subinstances preserve parent disk ids, so the solution unions directly
        exact_solve(&block_subinstance(parent, block), 50_000_000)
    }

    #[test]
    fn points_partition_across_blocks() {
        let inst = generate(30, 60, 10.0, 5, WeightSpec::Uniform(1.0, 2.0));
        for shift in 0..4 {
            let dec = decompose(&inst, 4, shift);
            let mut seen = vec![0u32; inst.points.len()];
            for b in &dec.blocks {
                for &i in &b.point_indices {
                    seen[i] += 1;
                }
            }
            assert!(seen.iter().all(|&c| c == 1));
        }
    }

    #[test]
    fn grid_line_point_goes_lower_left() {
        let mut inst = Instance::new(
            vec![Disk::new(0, 4.0, 4.0, 1.0)],
            vec![Point::new(4.0, 4.0), Point::new(3.999999, 4.0)],
        );
        inst.meta.clear();
        let dec = decompose(&inst, 4, 0);
        // x=4 sits on a grid line: it belongs to the block starting at 4
        // (half-open boxes [4,8)), while 3.999999 belongs to [0,4)
        let owner_of = |idx: usize| {
            dec.blocks
                .iter()
                .find(|b| b.point_indices.contains(&idx))
                .map(|b| (b.x0, b.y0))
                .unwrap()
        };
        assert_eq!(owner_of(0), (4.0, 4.0));
        assert_eq!(owner_of(1), (0.0, 4.0));
    }

    #[test]
    fn candidate_disks_cover_their_blocks() {
        let inst = generate(40, 40, 9.0, 9, WeightSpec::Const(1.0));
        let dec = decompose(&inst, 3, 1);
        for b in &dec.blocks {
            for (i, d) in inst.disks.iter().enumerate() {
                let near = box_dist(&d.center, b.x0, b.y0, b.side) <= 1.0;
                assert_eq!(b.disk_indices.contains(&i), near);
            }
        }
    }

    #[test]
    fn single_block_equals_block_solver() {
        // instance inside [0.5, 2.5]^2 stays within one block for every shift of L=6
        let mut inst = generate(8, 12, 2.0, 21, WeightSpec::Uniform(1.0, 5.0));
        for d in &mut inst.disks {
            d.center.x += 0.5;
            d.center.y += 0.5;
        }
        for p in &mut inst.points {
            p.x += 0.5;
            p.y += 0.5;
        }
        if !inst.is_coverable() {
            return;
        }
        let global = exact_solve(&inst, 10_000_000).unwrap();
        let shifted = shifted_solve(&inst, 6, &exact_block_solver, 1).unwrap();
        assert!((shifted.total_weight - global.total_weight).abs() <= 1e-12);
    }

    #[test]
    fn two_far_clusters_sum_independent_optima() {
        // clusters separated by more than 2(L+1): no shift merges them wrongly
        let mut disks = Vec::new();
        let mut points = Vec::new();
        for k in 0..3 {
            disks.push(Disk::new(k, 0.2 * k as f64, 0.1, 1.0 + k as f64));
            points.push(Point::new(0.2 * k as f64 + 0.1, 0.1));
        }
        let off = 20.0;
        for k in 0..3 {
            disks.push(Disk::new(3 + k, off + 0.2 * k as f64, 0.1, 2.0 + k as f64));
            points.push(Point::new(off + 0.2 * k as f64 + 0.1, 0.1));
        }
        let inst = Instance::new(disks, points);
        let shifted = shifted_solve(&inst, 6, &exact_block_solver, 1).unwrap();
        let c1 = Instance::new(inst.disks[..3].to_vec(), inst.points[..3].to_vec());
        let mut right: Vec<Disk> = inst.disks[3..].to_vec();
        for (i, d) in right.iter_mut().enumerate() {
            d.id = i as DiskId;
        }
        let c2 = Instance::new(right, inst.points[3..].to_vec());
        let w = exact_solve(&c1, 1_000_000).unwrap().total_weight
            + exact_solve(&c2, 1_000_000).unwrap().total_weight;
        assert!((shifted.total_weight - w).abs() <= 1e-12);
    }

    #[test]
    fn shifted_loss_small_sweep() {
        // module-scale version of the acceptance sweep: 20 seeds, L=6
        for seed in 100..120u64 {
            let inst =
                crate::instance::generate_covered(12, 18, 8.0, seed, WeightSpec::Uniform(1.0, 10.0));
            let global = exact_solve(&inst, 50_000_000).unwrap();
            let shifted = shifted_solve(&inst, 6, &exact_block_solver, 1).unwrap();
            assert!(shifted.total_weight >= global.total_weight - 1e-12);
            assert!(shifted.total_weight <= (1.0 + 4.0 / 6.0) * global.total_weight + 1e-9);
        }
    }

    #[test]
    fn threaded_matches_sequential() {
        let inst = generate(20, 30, 9.0, 77, WeightSpec::Uniform(1.0, 10.0));
        if !inst.is_coverable() {
            return;
        }
        let a = shifted_solve(&inst, 3, &exact_block_solver, 1).unwrap();
        let b = shifted_solve(&inst, 3, &exact_block_solver, 4).unwrap();
        assert_eq!(a.disk_ids, b.disk_ids);
        assert_eq!(a.total_weight, b.total_weight);
    }

    #[test]
    fn monotone_under_added_unused_disk() {
        let mut checked = 0;
        let mut seed = 300u64;
        while checked < 10 {
            let inst = generate(10, 15, 7.0, seed, WeightSpec::Uniform(1.0, 10.0));
            seed += 1;
            if !inst.is_coverable() {
                continue;
            }
            let base = shifted_solve(&inst, 6, &exact_block_solver, 1).unwrap();
            let mut bigger = inst.clone();
            bigger.disks.push(Disk::new(10, 3.5, 3.5, 1000.0));
            let b = shifted_solve(&bigger, 6, &exact_block_solver, 1).unwrap();
            assert!(b.total_weight <= base.total_weight + 1e-12);
            checked += 1;
        }
    }
}
