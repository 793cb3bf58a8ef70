//! Synthetic calibration records.
//!
//! Draws a labeled record set from the hidden outcome oracle: one outcome
//! per pool model per request. The standard protocol measures every model
//! at its calibration resolution; the resolution-sweep protocol cycles
//! edge models through their supported ladder so the resolution-linked
//! coefficients become identifiable.

use super::truth::{true_outcome, TruthConfig};
use super::workload::{generate_workload, WorkloadSpec};
use super::SimError;
use crate::calibration::{CalibrationRecord, ModelOutcome, CALREC_SCHEMA};
use crate::parallel::map_indexed;
use crate::pool::{PoolConfig, Tier};

/// Which resolutions the labeled outcomes are measured at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordProtocol {
    /// Every model at its calibration resolution.
    Standard,
    /// Edge models cycle their supported ladder across records.
    ResolutionSweep,
}

/// Generate labeled calibration records from the hidden oracle.
pub fn generate_calibration_records(
    spec: &WorkloadSpec,
    pool: &PoolConfig,
    truth: &TruthConfig,
    seed: u64,
    protocol: RecordProtocol,
) -> Result<Vec<CalibrationRecord>, SimError> {
    let requests = generate_workload(spec)?;
    let results: Vec<Result<CalibrationRecord, SimError>> =
        map_indexed(requests.len(), |i| {
            let req = &requests[i];
            let mut outcomes = std::collections::BTreeMap::new();
            for (m, profile) in pool.profiles.iter().enumerate() {
                let resolution = match protocol {
                    RecordProtocol::Standard => profile.r_cal,
                    RecordProtocol::ResolutionSweep if profile.tier == Tier::Edge => {
                        let ladder = &profile.supported_resolutions;
                        ladder[(i + m) % ladder.len()]
                    }
                    RecordProtocol::ResolutionSweep => profile.r_cal,
                };
                let score = true_outcome(
                    truth,
                    &req.features,
                    &profile.id,
                    profile.r_cal,
                    resolution,
                    req.id,
                    seed,
                )?;
                outcomes.insert(profile.id.clone(), ModelOutcome { resolution, score });
            }
            Ok(CalibrationRecord {
                schema: CALREC_SCHEMA.to_string(),
                id: req.id,
                features: req.features,
                outcomes,
            })
        });
    results.into_iter().collect()
}
