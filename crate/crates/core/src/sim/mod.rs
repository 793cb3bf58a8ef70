//! Deterministic, seed-driven edge–cloud execution model.
//!
//! Synthetic workload generation, a hidden outcome oracle whose
//! coefficients live in a separate config from the router's bundle,
//! latency/energy/network accounting, and the end-to-end simulation
//! driver. Every request derives its own random stream from the run seed
//! and its id, so results are independent of evaluation order.

pub mod calrecs;
pub mod cost;
pub mod run;
pub mod synthetic;
pub mod truth;
pub mod workload;

use thiserror::Error;

pub use calrecs::{generate_calibration_records, RecordProtocol};
pub use cost::{
    integrate_energy, simulate_energy, simulate_latency, transfer_ms, EnergyPrior, LatencyPrior,
    PowerTrace, TierCostModel,
};
pub use run::{simulate, simulate_seq, ExecutionRecord, SimContext, SimOptions};
pub use truth::{outcome_probability, true_outcome, TruthConfig, TruthModelEntry};
pub use workload::{generate_workload, AxisSpec, Request, WorkloadSpec};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("bad workload spec: {0}")]
    BadSpec(String),
    #[error("power trace too short: {0} samples, need at least 2")]
    ShortTrace(usize),
    #[error("bad cost model: {0}")]
    BadCostModel(String),
    #[error("bad truth config: {0}")]
    BadTruthConfig(String),
    #[error(transparent)]
    Feature(#[from] crate::features::FeatureError),
    #[error(transparent)]
    Route(#[from] crate::router::RouteError),
    #[error(transparent)]
    Strategy(#[from] crate::strategies::StrategyError),
}
