//! `udc` — generate, solve, verify, render, and benchmark weighted unit
//! disk cover instances.
//!
//! Exit codes: 0 ok, 2 usage error, 3 infeasible instance, 4 verification
//! failure, 5 internal invariant violation.

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use udc_core::baselines::{exact_solve, greedy_solve, DEFAULT_NODE_BUDGET};
use udc_core::blocksolver::{ptas_solve, BlockConfig};
use udc_core::error::SolveError;
use udc_core::gadgets::build_grid;
use udc_core::geom::Point;
use udc_core::hbuilder::HBuilder;
use udc_core::instance::{generate, Instance, Solution, WeightSpec};
use udc_core::render::render;
use udc_core::verify::check_all;

#[derive(Parser)]
#[command(name = "udc", version, about = "Minimum-weight unit disk cover solver suite")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Exact,
    Greedy,
    Ptas,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random instance (uniform disks, points, and weights).
    Gen {
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        m: usize,
        #[arg(long, default_value_t = 4.0)]
        side: f64,
        /// Seed; the UDC_SEED environment variable overrides this flag.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Weight spec: `uniform:a:b` or `const:c`.
        #[arg(long, default_value = "uniform:1:10")]
        weights: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Solve an instance and write the solution.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Algo::Ptas)]
        algo: Algo,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long, default_value_t = 3)]
        c: usize,
        #[arg(long, default_value_t = 6)]
        l: u32,
        /// Branch-and-bound node budget for the exact solver.
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Also run the exact oracle and report the ratio.
        #[arg(long)]
        oracle: bool,
        /// Include wall-clock timings in the report (breaks byte-level
        /// reproducibility of the report).
        #[arg(long)]
        timings: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a solution file against its instance.
    Verify {
        instance: PathBuf,
        solution: PathBuf,
        /// Replay the helper pipeline and run every invariant checker.
        #[arg(long)]
        deep: bool,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
    },
    /// Render an instance (and optionally a solution or the pipeline state)
    /// as SVG.
    Render {
        instance: PathBuf,
        #[arg(long)]
        solution: Option<PathBuf>,
        /// Overlay helper disks, baselines, and envelopes of the pipeline.
        #[arg(long)]
        pipeline: bool,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run every algorithm on one instance and tabulate weights.
    Bench {
        instance: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long, default_value_t = 3)]
        c: usize,
        #[arg(long, default_value_t = 6)]
        l: u32,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
    },
}

#[derive(Serialize)]
struct RunReport {
    instance_digest: String,
    algorithm: String,
    weight: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio_vs_oracle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_ms: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ledger_summary: Option<BTreeMap<String, usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    checks_ok: Option<bool>,
}

/// FNV-1a over the canonical instance JSON; stable across runs.
fn digest(instance: &Instance) -> String {
    let mut canon = instance.clone();
    canon.canonicalize();
    let bytes = canon.to_json();
    let mut h: u64 = 0xcbf29ce484222325;
    for b in bytes.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn solve_err_exit(e: &SolveError) -> ExitCode {
    match e {
        SolveError::Infeasible { .. } | SolveError::NoFeasiblePath { .. } => ExitCode::from(3),
        SolveError::CycleDetected { .. }
        | SolveError::SingleMixtureDetected(..)
        | SolveError::LabelConflict { .. }
        | SolveError::StuckState(..) => ExitCode::from(5),
        _ => ExitCode::from(1),
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.cmd {
        Cmd::Gen { n, m, side, seed, weights, output } => {
            let spec = WeightSpec::parse(&weights).map_err(|e| e.to_string())?;
            let seed = match std::env::var("UDC_SEED") {
                Ok(v) => v.parse::<u64>().map_err(|_| format!("bad UDC_SEED {v:?}"))?,
                Err(_) => seed,
            };
            if side <= 0.0 {
                return Err("side must be positive".into());
            }
            let inst = generate(n, m, side, seed, spec);
            inst.save(&output).map_err(|e| e.to_string())?;
            println!("wrote {} disks, {} points to {}", n, m, output.display());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Solve { instance, algo, eps, c, l, budget, threads, oracle, timings, output } => {
            let inst = Instance::load(&instance).map_err(|e| e.to_string())?;
            let started = std::time::Instant::now();
            let result = match algo {
                Algo::Exact => exact_solve(&inst, budget),
                Algo::Greedy => greedy_solve(&inst),
                Algo::Ptas => {
                    let config = BlockConfig {
                        eps,
                        c,
                        node_budget: budget,
                        ..BlockConfig::default()
                    };
                    ptas_solve(&inst, l, &config, threads)
                }
            };
            let sol = match result {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("solve failed: {e}");
                    return Ok(solve_err_exit(&e));
                }
            };
            let wall = started.elapsed().as_millis();
            let ratio = if oracle {
                let ex = exact_solve(&inst, budget).map_err(|e| e.to_string())?;
                Some(sol.total_weight / ex.total_weight.max(f64::MIN_POSITIVE))
            } else {
                None
            };
            let report = RunReport {
                instance_digest: digest(&inst),
                algorithm: match algo {
                    Algo::Exact => "exact".into(),
                    Algo::Greedy => "greedy".into(),
                    Algo::Ptas => format!("ptas(eps={eps},C={c},L={l})"),
                },
                weight: sol.total_weight,
                ratio_vs_oracle: ratio,
                wall_ms: timings.then_some(wall),
                ledger_summary: None,
                checks_ok: None,
            };
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            if let Some(path) = output {
                std::fs::write(&path, sol.to_json()).map_err(|e| e.to_string())?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify { instance, solution, deep, eps } => {
            let inst = Instance::load(&instance).map_err(|e| e.to_string())?;
            let text = std::fs::read_to_string(&solution).map_err(|e| e.to_string())?;
            let sol: Solution = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            if let Err(p) = sol.verify_cover(&inst) {
                println!(
                    "{}",
                    serde_json::json!({
                        "check": "coverage", "ok": false, "uncovered_point": p,
                        "at": [inst.points[p].x, inst.points[p].y],
                    })
                );
                return Ok(ExitCode::from(4));
            }
            if !sol.verify_weight(&inst) {
                println!(
                    "{}",
                    serde_json::json!({
                        "check": "weight", "ok": false,
                        "stated": sol.total_weight,
                        "recomputed": inst.total_weight_of(&sol.disk_ids),
                    })
                );
                return Ok(ExitCode::from(4));
            }
            println!("{}", serde_json::json!({"check": "coverage", "ok": true}));
            println!("{}", serde_json::json!({"check": "weight", "ok": true}));
            if deep {
                // replay the helper pipeline over the full instance and run
                // every invariant checker
                if inst.disks.is_empty() {
                    return Ok(ExitCode::SUCCESS);
                }
                let origin = Point::new(
                    inst.disks.iter().map(|d| d.center.x).fold(f64::INFINITY, f64::min) - 1.0,
                    inst.disks.iter().map(|d| d.center.y).fold(f64::INFINITY, f64::min) - 1.0,
                );
                let span = inst
                    .disks
                    .iter()
                    .map(|d| d.center.x.max(d.center.y))
                    .fold(1.0f64, f64::max)
                    + 3.0;
                let grid = build_grid(origin, span, eps);
                let mut builder = HBuilder::new(
                    inst.disks.clone(),
                    inst.points.clone(),
                    grid,
                    8.0 * build_grid(origin, span, eps).mu,
                );
                match builder.build() {
                    Ok(_) => {}
                    Err(e) => {
                        println!(
                            "{}",
                            serde_json::json!({"check": "pipeline", "ok": false, "error": e.to_string()})
                        );
                        return Ok(solve_err_exit(&e));
                    }
                }
                let report = check_all(&builder);
                for c in &report.checks {
                    println!(
                        "{}",
                        serde_json::json!({"check": c.name, "ok": c.ok, "detail": c.detail})
                    );
                }
                println!(
                    "{}",
                    serde_json::json!({
                        "check": "ledger",
                        "ok": true,
                        "summary": builder.ledger.count_by().into_iter()
                            .map(|(k, v)| (format!("{k:?}"), v)).collect::<BTreeMap<_,_>>(),
                    })
                );
                if !report.all_ok() {
                    return Ok(ExitCode::from(5));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Render { instance, solution, pipeline, eps, output } => {
            let inst = Instance::load(&instance).map_err(|e| e.to_string())?;
            let sol: Option<Solution> = match solution {
                Some(p) => {
                    let text = std::fs::read_to_string(&p).map_err(|e| e.to_string())?;
                    Some(serde_json::from_str(&text).map_err(|e| e.to_string())?)
                }
                None => None,
            };
            let svg = if pipeline && !inst.disks.is_empty() {
                let origin = Point::new(
                    inst.disks.iter().map(|d| d.center.x).fold(f64::INFINITY, f64::min) - 1.0,
                    inst.disks.iter().map(|d| d.center.y).fold(f64::INFINITY, f64::min) - 1.0,
                );
                let span = inst
                    .disks
                    .iter()
                    .map(|d| d.center.x.max(d.center.y))
                    .fold(1.0f64, f64::max)
                    + 3.0;
                let grid = build_grid(origin, span, eps);
                let cap = 8.0 * grid.mu;
                let mut builder =
                    HBuilder::new(inst.disks.clone(), inst.points.clone(), grid, cap);
                match builder.build() {
                    Ok(_) => render(&inst, sol.as_ref(), Some(&builder)),
                    Err(_) => render(&inst, sol.as_ref(), None),
                }
            } else {
                render(&inst, sol.as_ref(), None)
            };
            std::fs::write(&output, svg).map_err(|e| e.to_string())?;
            println!("wrote {}", output.display());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Bench { instance, eps, c, l, budget } => {
            let inst = Instance::load(&instance).map_err(|e| e.to_string())?;
            let mut rows: Vec<(String, Result<Solution, SolveError>, u128)> = Vec::new();
            let t = std::time::Instant::now();
            rows.push(("greedy".into(), greedy_solve(&inst), t.elapsed().as_millis()));
            let t = std::time::Instant::now();
            rows.push(("exact".into(), exact_solve(&inst, budget), t.elapsed().as_millis()));
            let t = std::time::Instant::now();
            let config = BlockConfig { eps, c, node_budget: budget, ..BlockConfig::default() };
            rows.push((
                format!("ptas(eps={eps},C={c},L={l})"),
                ptas_solve(&inst, l, &config, 1),
                t.elapsed().as_millis(),
            ));
            let exact_w = rows
                .iter()
                .find(|(n, r, _)| n == "exact" && r.is_ok())
                .map(|(_, r, _)| r.as_ref().unwrap().total_weight);
            for (name, result, ms) in &rows {
                match result {
                    Ok(s) => {
                        let ratio = exact_w
                            .map(|w| format!("{:.4}", s.total_weight / w))
                            .unwrap_or_else(|| "-".into());
                        println!("{name:28} weight {:>10.4} ratio {ratio}", s.total_weight);
                        eprintln!("{name:28} {ms} ms");
                    }
                    Err(e) => println!("{name:28} failed: {e}"),
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
