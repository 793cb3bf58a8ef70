//! Input-aware edge–cloud routing engine for vision–language inference,
//! plus a deterministic simulation and trace-replay harness.
//!
//! The crate is organized around the request lifecycle:
//!
//! * [`features`] — lightweight image-quality and text-complexity signals,
//!   fused into a 10-dimensional request descriptor.
//! * [`pool`] — the heterogeneous model pool (edge + cloud profiles) and
//!   candidate configuration enumeration.
//! * [`router`] — quality prediction, cost estimation, per-request Pareto
//!   frontier, and the edge-preferring decision rule.
//! * [`calibration`] — one-time offline fitting of the open coefficients
//!   under monotonic constraints, emitting a frozen parameter bundle.
//! * [`strategies`] — the routing strategies evaluated by the harness
//!   (edge-only, cloud-only, full router, ablations, static pool, oracle).
//! * [`sim`] — seeded workload generation, a hidden outcome oracle kept
//!   separate from the router's predictor, and latency/energy accounting.
//! * [`bench`] — strategy comparison reports, quintile analysis, bandwidth
//!   sweeps, and replay-trace ingestion.
//! * [`formats`] — versioned JSON/JSONL document schemas shared by the CLI.
//!
//! With the default `parallel` feature the per-request inner loops run on
//! rayon; disabling it yields an identical sequential execution (every
//! request derives its own random stream, so results never depend on
//! scheduling).

pub mod bench;
pub mod calibration;
pub mod features;
pub mod formats;
pub mod pool;
pub mod reference;
pub mod rng;
pub mod router;
pub mod sim;
pub mod strategies;

mod parallel;

pub use calibration::{CalibratedBundle, CalibrationRecord};
pub use features::{ImageQuality, Quintile, RequestDescriptor, TextComplexity};
pub use pool::{Configuration, ModelProfile, NetworkState, PoolConfig, Precision, Tier};
pub use router::{DecisionReason, RouterParams, RoutingDecision, ScoredCandidate};
pub use sim::{ExecutionRecord, TierCostModel, TruthConfig, WorkloadSpec};
pub use strategies::{Strategy, StrategyKind};
