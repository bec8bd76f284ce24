mod common;
use common::pipeline_on;
use udc_core::blocksolver::lower_components;
use udc_core::geom::{Disk, Point};
use udc_core::instance::Instance;
use rand::Rng;
use rand::SeedableRng;

fn cluster(seed: u64) -> Instance {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n_extra = rng.gen_range(2..6usize);
    let mut disks = vec![
        Disk::new(0, 0.05 + rng.gen_range(-0.02..0.02), 0.08 + rng.gen_range(-0.02..0.02), rng.gen_range(1.0..5.0)),
        Disk::new(1, 0.55 + rng.gen_range(-0.02..0.02), 0.12 + rng.gen_range(-0.02..0.02), rng.gen_range(1.0..5.0)),
    ];
    for i in 0..n_extra {
        disks.push(Disk::new(2 + i as u32,
            rng.gen_range(0.08..0.55), rng.gen_range(0.05..0.45), rng.gen_range(1.0..5.0)));
    }
    let mut points = Vec::new();
    let m = rng.gen_range(4..10usize);
    let mut attempts = 0;
    while points.len() < m && attempts < 500 {
        attempts += 1;
        let di = rng.gen_range(2..disks.len());
        let d = &disks[di];
        let r = rng.gen_range(0.9..0.999f64);
        let a = rng.gen_range(0.0..std::f64::consts::TAU);
        let p = Point::new(d.center.x + r * a.cos(), d.center.y + r * a.sin());
        // in the strip: outside the would-be gadget pair, inside an extra
        if p.dist(&disks[0].center) > 1.003 && p.dist(&disks[1].center) > 1.003
            && disks[2..].iter().any(|x| p.dist(&x.center) <= 0.995) {
            points.push(p);
        }
    }
    Instance::new(disks, points)
}

#[test]
fn diag() {
    let mut comps = 0; let mut singles = 0; let mut fails = 0; let mut maxarcs = 0;
    let mut empty = 0;
    for seed in 0..80u64 {
        let inst = cluster(seed);
        if inst.points.is_empty() { empty += 1; continue; }
        match pipeline_on(&inst, 1.0) {
            Ok(b) => {
                for (_, i) in lower_components(&b) {
                    comps += 1;
                    let na: usize = i.subs.iter().map(|s| s.arcs.len()).sum();
                    maxarcs = maxarcs.max(na);
                    if i.subs.len() == 1 { singles += 1; }
                }
            }
            Err(e) => { if fails < 3 { eprintln!("seed {seed}: {e}"); } fails += 1; }
        }
    }
    eprintln!("comps {comps} singles {singles} fails {fails} maxarcs {maxarcs} empty {empty}");
    panic!("diag");
}
