//! Subsystems, the coupled lattice and its flows.

mod flow;
mod graph;
mod koopman;
mod model;
mod state;
mod system;

pub use flow::{
    apply_permutation, apply_timeshifts, equivariance_defect, global_flow, global_step,
    product_metric, sample_flow, Permutation, DEFAULT_DT, MAX_STEP,
};
pub use graph::{CouplingGraph, Edge};
pub use koopman::{koopman_eval, koopman_eval_named, mean_phase_coherence, Observable};
pub use model::{
    circle_distance, node_flow, signed_phase_diff, wrap_phase, MetricKind, ModelKind,
    SubsystemModel, NODE_FLOW_DT,
};
pub use state::GlobalState;
pub use system::{CouplingKind, LatticeSystem};
