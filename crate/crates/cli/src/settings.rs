//! Layered run settings: defaults, then a config file, then `INAR_*`
//! environment variables, then command-line flags. The effective values
//! are echoed into the run manifest.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Scalar knobs shared by the subcommands.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub bandwidth_mbps: f64,
    pub guard_mbps: f64,
    pub delta_min: f64,
    pub seed: u64,
    pub replicates: usize,
    pub target_edge_fraction: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            bandwidth_mbps: 100.0,
            guard_mbps: 15.0,
            delta_min: 0.03,
            seed: inar_core::reference::RUN_SEED,
            replicates: 5,
            target_edge_fraction: 0.36,
        }
    }
}

/// Optional overrides, as read from a settings file or the environment.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingsOverride {
    pub bandwidth_mbps: Option<f64>,
    pub guard_mbps: Option<f64>,
    pub delta_min: Option<f64>,
    pub seed: Option<u64>,
    pub replicates: Option<usize>,
    pub target_edge_fraction: Option<f64>,
}

impl SettingsOverride {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        let parsed: SettingsOverride = if text.trim_start().starts_with('{') {
            serde_json::from_str(&text).map_err(|e| {
                CliError::validation(format!("{}:{}: {e}", path.display(), e.line()))
            })?
        } else {
            toml::from_str(&text)
                .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?
        };
        Ok(parsed)
    }

    pub fn from_env() -> Result<Self, CliError> {
        fn get<T: std::str::FromStr>(name: &str) -> Result<Option<T>, CliError>
        where
            T::Err: std::fmt::Display,
        {
            match std::env::var(name) {
                Ok(raw) => raw
                    .parse::<T>()
                    .map(Some)
                    .map_err(|e| CliError::validation(format!("{name}={raw}: {e}"))),
                Err(_) => Ok(None),
            }
        }
        Ok(Self {
            bandwidth_mbps: get("INAR_BANDWIDTH")?,
            guard_mbps: get("INAR_GUARD_MBPS")?,
            delta_min: get("INAR_DELTA_MIN")?,
            seed: get("INAR_SEED")?,
            replicates: get("INAR_REPLICATES")?,
            target_edge_fraction: get("INAR_TARGET_EDGE_FRACTION")?,
        })
    }
}

/// Flag-level overrides, already parsed by clap.
#[derive(Debug, Clone, Default)]
pub struct FlagOverride {
    pub bandwidth_mbps: Option<f64>,
    pub guard_mbps: Option<f64>,
    pub delta_min: Option<f64>,
    pub seed: Option<u64>,
    pub replicates: Option<usize>,
    pub target_edge_fraction: Option<f64>,
}

/// Resolve the effective settings: defaults < file < env < flags.
pub fn resolve(config_file: Option<&Path>, flags: &FlagOverride) -> Result<Settings, CliError> {
    let mut s = Settings::default();
    let mut apply = |o: &SettingsOverride| {
        if let Some(v) = o.bandwidth_mbps {
            s.bandwidth_mbps = v;
        }
        if let Some(v) = o.guard_mbps {
            s.guard_mbps = v;
        }
        if let Some(v) = o.delta_min {
            s.delta_min = v;
        }
        if let Some(v) = o.seed {
            s.seed = v;
        }
        if let Some(v) = o.replicates {
            s.replicates = v;
        }
        if let Some(v) = o.target_edge_fraction {
            s.target_edge_fraction = v;
        }
    };
    if let Some(path) = config_file {
        apply(&SettingsOverride::from_file(path)?);
    }
    apply(&SettingsOverride::from_env()?);
    apply(&SettingsOverride {
        bandwidth_mbps: flags.bandwidth_mbps,
        guard_mbps: flags.guard_mbps,
        delta_min: flags.delta_min,
        seed: flags.seed,
        replicates: flags.replicates,
        target_edge_fraction: flags.target_edge_fraction,
    });
    if s.bandwidth_mbps < 0.0 || s.guard_mbps < 0.0 {
        return Err(CliError::validation("bandwidth and guard must be nonnegative".into()));
    }
    Ok(s)
}

impl Settings {
    pub fn network(&self) -> inar_core::pool::NetworkState {
        inar_core::pool::NetworkState {
            bandwidth_mbps: self.bandwidth_mbps,
            guard_mbps: self.guard_mbps,
        }
    }
}
