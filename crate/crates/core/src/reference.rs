//! The pinned reference deployment: seeds, workload, calibration, costs.
//!
//! Everything here is deterministic, so the frozen bundle shipped in
//! `configs/` can always be regenerated bit-for-bit with
//! [`reference_bundle`]. The evaluation workload is 2,000 requests on a
//! fixed seed; calibration uses a separate 1,000-record labeled set with
//! the resolution-sweep protocol.

use std::sync::OnceLock;

use crate::calibration::{calibrate, CalibrateOptions, CalibratedBundle};
use crate::pool::{NetworkState, PoolConfig};
use crate::sim::{
    generate_calibration_records, RecordProtocol, SimContext, TierCostModel, TruthConfig,
    WorkloadSpec,
};

/// Seed of the reference evaluation workload.
pub const EVAL_SEED: u64 = 42;
/// Size of the reference evaluation workload.
pub const EVAL_N: usize = 2000;
/// Seed of the calibration record set.
pub const CAL_SEED: u64 = 1042;
/// Size of the calibration record set (per the published protocol).
pub const CAL_N: usize = 1000;
/// Outcome/latency/energy seed of the reference evaluation run.
pub const RUN_SEED: u64 = 7;
/// Bandwidth of the reference evaluation, Mbps.
pub const BANDWIDTH_MBPS: f64 = 100.0;
/// Timestamp recorded in the regenerable reference bundle.
pub const BUNDLE_TIMESTAMP: &str = "reference";

/// The reference evaluation workload spec.
pub fn eval_workload() -> WorkloadSpec {
    WorkloadSpec::reference(EVAL_SEED, EVAL_N)
}

/// The calibration-record workload spec.
pub fn calibration_workload() -> WorkloadSpec {
    WorkloadSpec::reference(CAL_SEED, CAL_N)
}

/// Run the full reference calibration (deterministic; memoized).
pub fn reference_bundle() -> &'static CalibratedBundle {
    static BUNDLE: OnceLock<CalibratedBundle> = OnceLock::new();
    BUNDLE.get_or_init(|| {
        let pool = PoolConfig::reference();
        let truth = TruthConfig::reference();
        let records = generate_calibration_records(
            &calibration_workload(),
            &pool,
            &truth,
            CAL_SEED,
            RecordProtocol::ResolutionSweep,
        )
        .expect("reference record generation succeeds");
        let features: Vec<_> = crate::sim::workload::generate_workload(&eval_workload())
            .expect("reference workload generates")
            .iter()
            .map(|r| r.features)
            .collect();
        let opts = CalibrateOptions {
            seed: CAL_SEED,
            timestamp: Some(BUNDLE_TIMESTAMP.to_string()),
            network: NetworkState::new(BANDWIDTH_MBPS),
            ..Default::default()
        };
        calibrate(&records, &pool, &features, &opts).expect("reference calibration succeeds")
    })
}

/// Simulation context of the reference evaluation.
pub fn reference_context() -> SimContext {
    SimContext::new(
        &PoolConfig::reference(),
        reference_bundle(),
        TruthConfig::reference(),
        TierCostModel::reference(),
        NetworkState::new(BANDWIDTH_MBPS),
    )
}
