//! Error types shared across the solver stack.

use thiserror::Error;

/// Geometry-level failures.
#[derive(Debug, Error)]
pub enum GeomError {
    /// The arrangement has a tangency, coincident centers, or a concurrent
    /// triple that tolerance cannot resolve. Callers jitter and retry.
    #[error("degenerate arrangement: {0}")]
    DegenerateArrangement(String),
}

/// Instance I/O and validation failures.
#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Solver-level failures.
#[derive(Debug, Error)]
pub enum SolveError {
    /// Some point cannot be covered by any disk of the (sub)instance.
    #[error("infeasible: point {point} has no covering disk")]
    Infeasible { point: usize },
    /// Branch-and-bound exceeded its node budget.
    #[error("budget exceeded after {nodes} nodes")]
    BudgetExceeded { nodes: u64 },
    /// The DP state budget was exhausted.
    #[error("state budget exceeded after {states} states")]
    StateBudgetExceeded { states: u64 },
    /// A DP subproblem has a point no available arc can cover
    /// (signals a wrong guess upstream).
    #[error("no feasible path: point {point} uncoverable by available arcs")]
    NoFeasiblePath { point: usize },
    /// A reachable non-final DP state has no applicable transition.
    #[error("stuck DP state: {0}")]
    StuckState(String),
    /// The substructure relation graph contains a cycle. Carries the
    /// polygon diagnostic (node positions of the offending cycle).
    #[error("cycle in relation graph: {nodes:?}")]
    CycleDetected { nodes: Vec<(f64, f64)>, note: String },
    /// A single mixture was detected, which the geometry forbids.
    #[error("single mixture detected between gadgets {0} and {1}")]
    SingleMixtureDetected(usize, usize),
    /// Two foreign substructures claim the same envelope point.
    #[error("label conflict on envelope of substructure {st}: labels {a} and {b}")]
    LabelConflict { st: usize, a: usize, b: usize },
    /// label_cut called on arc sets that are not order-separable.
    #[error("label sets are not order-separable")]
    NotSeparable,
    /// Envelope chain failed to cover its baseline (geometry bug).
    #[error("broken envelope chain: {0}")]
    BrokenChain(String),
    /// Final assembly failed the coverage check (bug trap).
    #[error("infeasible assembly: point {point} left uncovered")]
    InfeasibleAssembly { point: usize },
    #[error(transparent)]
    Geom(#[from] GeomError),
}
