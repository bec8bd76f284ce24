//! Problem instances, JSON persistence, generators, and the reduction from
//! minimum-weight dominating set in a unit disk graph.

use crate::error::InstanceError;
use crate::geom::{point_in_disk, Disk, DiskId, Point, TOL};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DiskRecord {
    id: DiskId,
    x: f64,
    y: f64,
    w: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PointRecord {
    x: f64,
    y: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct InstanceFile {
    disks: Vec<DiskRecord>,
    points: Vec<PointRecord>,
    #[serde(default)]
    meta: BTreeMap<String, String>,
}

/// A weighted unit disk cover instance: disks, target points, and free-form
/// metadata (seed, generator name, feasibility flag).
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub disks: Vec<Disk>,
    pub points: Vec<Point>,
    pub meta: BTreeMap<String, String>,
}

impl Instance {
    pub fn new(disks: Vec<Disk>, points: Vec<Point>) -> Self {
        Instance { disks, points, meta: BTreeMap::new() }
    }

    /// Validate invariants: finite coordinates, nonnegative weights,
    /// unique dense ids `0..n-1`.
    pub fn validate(&self) -> Result<(), InstanceError> {
        let mut seen = vec![false; self.disks.len()];
        for d in &self.disks {
            if !d.center.is_finite() {
                return Err(InstanceError::Validation(format!(
                    "disk {} has non-finite coordinates",
                    d.id
                )));
            }
            if !d.weight.is_finite() || d.weight < 0.0 {
                return Err(InstanceError::Validation(format!(
                    "disk {} has invalid weight {}",
                    d.id, d.weight
                )));
            }
            let idx = d.id as usize;
            if idx >= self.disks.len() {
                return Err(InstanceError::Validation(format!(
                    "disk id {} out of dense range 0..{}",
                    d.id,
                    self.disks.len()
                )));
            }
            if seen[idx] {
                return Err(InstanceError::Validation(format!("duplicate disk id {}", d.id)));
            }
            seen[idx] = true;
        }
        for (i, p) in self.points.iter().enumerate() {
            if !p.is_finite() {
                return Err(InstanceError::Validation(format!(
                    "point {i} has non-finite coordinates"
                )));
            }
        }
        Ok(())
    }

    /// Canonical form: disks sorted by id. Points keep their input order.
    pub fn canonicalize(&mut self) {
        self.disks.sort_by_key(|d| d.id);
    }

    pub fn to_json(&self) -> String {
        let file = InstanceFile {
            disks: self
                .disks
                .iter()
                .map(|d| DiskRecord { id: d.id, x: d.center.x, y: d.center.y, w: d.weight })
                .collect(),
            points: self.points.iter().map(|p| PointRecord { x: p.x, y: p.y }).collect(),
            meta: self.meta.clone(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("instance serialization");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| InstanceError::Parse(e.to_string()))?;
        let mut inst = Instance {
            disks: file
                .disks
                .iter()
                .map(|r| Disk::new(r.id, r.x, r.y, r.w))
                .collect(),
            points: file.points.iter().map(|r| Point::new(r.x, r.y)).collect(),
            meta: file.meta,
        };
        inst.validate()?;
        inst.canonicalize();
        Ok(inst)
    }

    pub fn load(path: &Path) -> Result<Self, InstanceError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), InstanceError> {
        let mut canon = self.clone();
        canon.canonicalize();
        std::fs::write(path, canon.to_json())?;
        Ok(())
    }

    /// True iff every point is covered by at least one disk.
    pub fn is_coverable(&self) -> bool {
        self.points
            .iter()
            .all(|p| self.disks.iter().any(|d| point_in_disk(p, d, TOL)))
    }

    /// Look a disk up by id. Instances keep disks sorted by id, so this is a
    /// binary search; subinstances with sparse ids are supported.
    pub fn disk_by_id(&self, id: DiskId) -> Option<&Disk> {
        match self.disks.binary_search_by_key(&id, |d| d.id) {
            Ok(i) => Some(&self.disks[i]),
            Err(_) => self.disks.iter().find(|d| d.id == id),
        }
    }

    pub fn total_weight_of(&self, ids: &BTreeSet<DiskId>) -> f64 {
        // canonical summation order: ascending id
        ids.iter().map(|id| self.disk_by_id(*id).expect("known disk id").weight).sum()
    }
}

/// Weight distribution spec for the generator: `uniform:a:b` or `const:c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightSpec {
    Uniform(f64, f64),
    Const(f64),
}

impl WeightSpec {
    pub fn parse(s: &str) -> Result<Self, InstanceError> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["uniform", a, b] => {
                let lo: f64 = a.parse().map_err(|_| bad_spec(s))?;
                let hi: f64 = b.parse().map_err(|_| bad_spec(s))?;
                if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
                    return Err(bad_spec(s));
                }
                Ok(WeightSpec::Uniform(lo, hi))
            }
            ["const", c] => {
                let v: f64 = c.parse().map_err(|_| bad_spec(s))?;
                if !(v.is_finite() && v >= 0.0) {
                    return Err(bad_spec(s));
                }
                Ok(WeightSpec::Const(v))
            }
            _ => Err(bad_spec(s)),
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            WeightSpec::Uniform(a, b) => {
                if b > a {
                    rng.gen_range(a..b)
                } else {
                    a
                }
            }
            WeightSpec::Const(c) => c,
        }
    }
}

fn bad_spec(s: &str) -> InstanceError {
    InstanceError::Validation(format!("bad weight spec {s:?} (expected uniform:a:b or const:c)"))
}

impl std::fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WeightSpec::Uniform(a, b) => write!(f, "uniform:{a}:{b}"),
            WeightSpec::Const(c) => write!(f, "const:{c}"),
        }
    }
}

/// Generate `n` disks and `m` points uniform in `[0, side]^2`, weights drawn
/// per `weights`. Deterministic given `seed`. The meta map records the seed,
/// generator name, and whether every point is coverable.
pub fn generate(n: usize, m: usize, side: f64, seed: u64, weights: WeightSpec) -> Instance {
    assert!(side > 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut disks = Vec::with_capacity(n);
    for id in 0..n {
        let x = rng.gen_range(0.0..side);
        let y = rng.gen_range(0.0..side);
        let w = weights.draw(&mut rng);
        disks.push(Disk::new(id as DiskId, x, y, w));
    }
    let mut points = Vec::with_capacity(m);
    for _ in 0..m {
        let x = rng.gen_range(0.0..side);
        let y = rng.gen_range(0.0..side);
        points.push(Point::new(x, y));
    }
    let mut inst = Instance::new(disks, points);
    inst.meta.insert("generator".into(), "uniform".into());
    inst.meta.insert("seed".into(), seed.to_string());
    inst.meta.insert("side".into(), side.to_string());
    inst.meta.insert("weights".into(), weights.to_string());
    inst.meta.insert("feasible".into(), inst.is_coverable().to_string());
    inst
}

/// Like [`generate`], but every point is sampled uniformly inside a random
/// disk, so the instance is feasible by construction. Used for fixtures and
/// sweeps where rejection sampling over `generate` would be wasteful.
pub fn generate_covered(n: usize, m: usize, side: f64, seed: u64, weights: WeightSpec) -> Instance {
    assert!(n > 0 || m == 0);
    let mut inst = generate(n, 0, side, seed, weights);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    for _ in 0..m {
        let d = &inst.disks[rng.gen_range(0..n)];
        let r = (rng.gen_range(0.0..1.0f64)).sqrt();
        let a = rng.gen_range(0.0..std::f64::consts::TAU);
        inst.points.push(Point::new(d.center.x + r * a.cos(), d.center.y + r * a.sin()));
    }
    inst.meta.insert("generator".into(), "covered".into());
    inst.meta.insert("feasible".into(), "true".into());
    inst
}

/// Reduce a minimum-weight dominating set instance to unit disk cover:
/// one target point and one unit disk, co-located, per vertex.
pub fn from_mwds(vertices: &[(Point, f64)]) -> Instance {
    let disks = vertices
        .iter()
        .enumerate()
        .map(|(i, (p, w))| Disk::new(i as DiskId, p.x, p.y, *w))
        .collect();
    let points = vertices.iter().map(|(p, _)| *p).collect();
    let mut inst = Instance::new(disks, points);
    inst.meta.insert("generator".into(), "mwds".into());
    inst
}

/// Which pipeline stage chose a disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Stage {
    #[serde(rename = "GUESS")]
    Guess,
    #[serde(rename = "GADGET")]
    Gadget,
    #[serde(rename = "CUT")]
    Cut,
    #[serde(rename = "DP")]
    Dp,
    #[serde(rename = "BASELINE")]
    Baseline,
}

/// A chosen disk set with its total weight and per-disk provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub disk_ids: BTreeSet<DiskId>,
    #[serde(rename = "weight")]
    pub total_weight: f64,
    pub trace: BTreeMap<DiskId, Stage>,
}

impl Solution {
    /// Build a solution from ids, recomputing the weight canonically
    /// (ascending id order) from the instance.
    pub fn from_ids(
        instance: &Instance,
        ids: BTreeSet<DiskId>,
        trace: BTreeMap<DiskId, Stage>,
    ) -> Self {
        let total_weight = instance.total_weight_of(&ids);
        Solution { disk_ids: ids, total_weight, trace }
    }

    /// Independent coverage check. Returns the first uncovered point index.
    pub fn verify_cover(&self, instance: &Instance) -> Result<(), usize> {
        for (i, p) in instance.points.iter().enumerate() {
            let ok = self
                .disk_ids
                .iter()
                .any(|id| point_in_disk(p, instance.disk_by_id(*id).expect("known id"), TOL));
            if !ok {
                return Err(i);
            }
        }
        Ok(())
    }

    /// Weight consistency: total equals the recomputed sum to 1e-12 relative.
    pub fn verify_weight(&self, instance: &Instance) -> bool {
        let w = instance.total_weight_of(&self.disk_ids);
        let scale = w.abs().max(1.0);
        (w - self.total_weight).abs() <= 1e-12 * scale
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("solution serialization");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_instance_is_valid() {
        let inst = Instance::new(vec![], vec![]);
        assert!(inst.validate().is_ok());
        let rt = Instance::from_json(&inst.to_json()).unwrap();
        assert_eq!(rt, inst);
    }

    #[test]
    fn negative_weight_rejected() {
        let text = r#"{"disks":[{"id":0,"x":0.0,"y":0.0,"w":-1.0}],"points":[],"meta":{}}"#;
        match Instance::from_json(text) {
            Err(InstanceError::Validation(msg)) => assert!(msg.contains("weight")),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn nan_rejected() {
        let inst = Instance::new(vec![Disk::new(0, f64::NAN, 0.0, 1.0)], vec![]);
        assert!(matches!(inst.validate(), Err(InstanceError::Validation(_))));
    }

    #[test]
    fn duplicate_id_rejected() {
        let inst =
            Instance::new(vec![Disk::new(0, 0.0, 0.0, 1.0), Disk::new(0, 1.0, 0.0, 1.0)], vec![]);
        assert!(matches!(inst.validate(), Err(InstanceError::Validation(_))));
    }

    #[test]
    fn save_load_round_trip_is_canonical() {
        // out-of-order ids: load canonicalizes, then save·load is identity
        let text = r#"{"disks":[{"id":1,"x":0.5,"y":0.25,"w":2.0},{"id":0,"x":0.1,"y":0.2,"w":1.5}],"points":[{"x":0.3,"y":0.4}],"meta":{"k":"v"}}"#;
        let inst = Instance::from_json(text).unwrap();
        assert_eq!(inst.disks[0].id, 0);
        let json = inst.to_json();
        let inst2 = Instance::from_json(&json).unwrap();
        assert_eq!(inst2.to_json(), json);
    }

    #[test]
    fn generator_is_deterministic() {
        let a = generate(50, 100, 4.0, 7, WeightSpec::Uniform(1.0, 10.0));
        let b = generate(50, 100, 4.0, 7, WeightSpec::Uniform(1.0, 10.0));
        assert_eq!(a, b);
        assert_eq!(a.disks.len(), 50);
        assert_eq!(a.points.len(), 100);
    }

    #[test]
    fn generator_empty() {
        let inst = generate(0, 0, 1.0, 0, WeightSpec::Const(1.0));
        assert!(inst.disks.is_empty() && inst.points.is_empty());
        assert_eq!(inst.meta.get("feasible").map(String::as_str), Some("true"));
    }

    #[test]
    fn feasibility_flag_matches_brute_force() {
        for seed in 0..20 {
            let inst = generate(50, 100, 4.0, seed, WeightSpec::Uniform(1.0, 10.0));
            let brute = inst
                .points
                .iter()
                .all(|p| inst.disks.iter().any(|d| point_in_disk(p, d, TOL)));
            assert_eq!(inst.meta["feasible"], brute.to_string());
        }
    }

    #[test]
    fn from_mwds_single_vertex() {
        let inst = from_mwds(&[(Point::new(0.0, 0.0), 3.0)]);
        assert_eq!(inst.disks.len(), 1);
        assert_eq!(inst.points.len(), 1);
        assert!(point_in_disk(&inst.points[0], &inst.disks[0], 0.0));
    }

    #[test]
    fn weight_spec_parsing() {
        assert_eq!(WeightSpec::parse("uniform:1:10").unwrap(), WeightSpec::Uniform(1.0, 10.0));
        assert_eq!(WeightSpec::parse("const:2.5").unwrap(), WeightSpec::Const(2.5));
        assert!(WeightSpec::parse("weird").is_err());
        assert!(WeightSpec::parse("uniform:5:1").is_err());
    }

    #[test]
    fn solution_weight_consistency() {
        let inst = Instance::new(
            vec![Disk::new(0, 0.0, 0.0, 1.25), Disk::new(1, 0.5, 0.0, 2.5)],
            vec![Point::new(0.0, 0.0)],
        );
        let ids: BTreeSet<DiskId> = [0, 1].into_iter().collect();
        let sol = Solution::from_ids(&inst, ids, BTreeMap::new());
        assert!(sol.verify_weight(&inst));
        assert!(sol.verify_cover(&inst).is_ok());
    }
}
