//! Experiment configuration: one TOML document holds every parameter of a
//! Monte-Carlo run, so a results file is fully reproducible from its config
//! and nothing else.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::baselines::BaselineKind;
use crate::energy::{PowerConstants, SegmentSpec, SrCircuitModel};
use crate::error::{Error, Result};
use crate::scenario::ScenarioConfig;
use crate::scheduler::SrRatePolicy;

pub const SCHEMA_VERSION: u32 = 1;

/// Circuit and conversion constants as written in a config file; the
/// per-terminal efficiency vector is expanded at run time once the cloud
/// size of a sweep point is known.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ConstantsSection {
    pub p_rx: f64,
    pub p_e: f64,
    pub p_b: f64,
    pub conversion_efficiency: f64,
    pub noise_var: f64,
    pub sr_circuit: SrCircuitModel,
}

impl Default for ConstantsSection {
    fn default() -> Self {
        // Normalized-unit defaults matched to the default scenario link
        // budget: receive-chain power comparable to the received signal
        // scale, so harvesting moves the needle without dominating it.
        Self {
            p_rx: 1.0,
            p_e: 1.0,
            p_b: 5.0,
            conversion_efficiency: 0.5,
            noise_var: 1.0,
            sr_circuit: SrCircuitModel::PerPeer,
        }
    }
}

impl ConstantsSection {
    /// Expand into the solver's constants for a cloud of `num_mts` terminals.
    pub fn build(&self, num_mts: usize, harvest_enabled: bool) -> Result<PowerConstants> {
        let mut c = PowerConstants::uniform(
            self.p_rx,
            self.p_e,
            self.p_b,
            self.conversion_efficiency,
            num_mts,
            self.noise_var,
        )?;
        c.harvest_enabled = harvest_enabled;
        Ok(c)
    }
}

/// The swept parameter axis: exactly one parameter varies, everything else is
/// pinned by the rest of the config.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "parameter", content = "values", rename_all = "kebab-case")]
pub enum SweepSection {
    /// Short-range over long-range minimum-rate ratio; r_s_min = value · r_l_min.
    RateRatio(Vec<f64>),
    /// Cloud size.
    NumMts(Vec<usize>),
    /// Uniform conversion efficiency.
    ConversionEfficiency(Vec<f64>),
}

impl SweepSection {
    pub fn len(&self) -> usize {
        match self {
            SweepSection::RateRatio(v) => v.len(),
            SweepSection::NumMts(v) => v.len(),
            SweepSection::ConversionEfficiency(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Numeric sweep value at `idx`, as written into result rows.
    pub fn value(&self, idx: usize) -> f64 {
        match self {
            SweepSection::RateRatio(v) => v[idx],
            SweepSection::NumMts(v) => v[idx] as f64,
            SweepSection::ConversionEfficiency(v) => v[idx],
        }
    }

    pub fn parameter_name(&self) -> &'static str {
        match self {
            SweepSection::RateRatio(_) => "rate-ratio",
            SweepSection::NumMts(_) => "num-mts",
            SweepSection::ConversionEfficiency(_) => "conversion-efficiency",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub master_seed: u64,
    pub trials: usize,
    /// Worker threads; 0 means all available. Output bytes never depend on it.
    pub threads: usize,
    /// Master switch for the harvesting path across optimizer and bookkeeping.
    pub swipt_enabled: bool,
    pub schemes: Vec<BaselineKind>,
    /// Power-grid resolution of the exhaustive-search scheme.
    pub es_grid_points: usize,
    /// Whether the intra-cloud multicast runs at its required rate or may
    /// exceed it when that saves energy.
    pub sr_rate_policy: SrRatePolicy,
    /// Where artifacts go when the command line does not say otherwise;
    /// relative paths resolve against the config file's directory.
    pub out_dir: Option<std::path::PathBuf>,
    pub scenario: ScenarioConfig,
    pub constants: ConstantsSection,
    pub segment: SegmentSpec,
    pub sweep: SweepSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            master_seed: 1,
            trials: 300,
            threads: 0,
            swipt_enabled: true,
            schemes: vec![
                BaselineKind::ProposedPs,
                BaselineKind::Rsa,
                BaselineKind::RusRsa,
                BaselineKind::Max,
                BaselineKind::Multicast,
            ],
            es_grid_points: 200,
            sr_rate_policy: SrRatePolicy::default(),
            out_dir: None,
            scenario: ScenarioConfig::default(),
            constants: ConstantsSection::default(),
            segment: SegmentSpec {
                s_t: 1.0,
                r_l_min: 1.0,
                r_s_min: 5.0,
                p_s_max: 100.0,
                p_k_max: 1000.0,
            },
            sweep: SweepSection::RateRatio((1..=10).map(|r| r as f64).collect()),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidConfig(format!(
                "schema_version {} not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.trials < 1 {
            return Err(Error::InvalidConfig("need at least one trial".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::InvalidConfig("need at least one scheme".into()));
        }
        if self.sweep.is_empty() {
            return Err(Error::InvalidConfig(
                "sweep needs at least one value".into(),
            ));
        }
        if self.es_grid_points < 2 {
            return Err(Error::InvalidConfig(
                "es_grid_points must be at least 2".into(),
            ));
        }
        match &self.sweep {
            SweepSection::RateRatio(v) => {
                if v.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
                    return Err(Error::InvalidConfig("rate ratios must be positive".into()));
                }
            }
            SweepSection::NumMts(v) => {
                if v.iter().any(|&k| k < 1) {
                    return Err(Error::InvalidConfig(
                        "cloud sizes must be at least 1".into(),
                    ));
                }
            }
            SweepSection::ConversionEfficiency(v) => {
                if v.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
                    return Err(Error::InvalidConfig(
                        "conversion efficiencies must lie in (0, 1]".into(),
                    ));
                }
            }
        }
        self.scenario.validate()?;
        self.segment.validate()?;
        self.constants.build(self.scenario.num_mts.max(1), true)?;
        Ok(())
    }

    /// Scenario, constants section and segment pinned to one sweep point.
    pub fn at_sweep_point(&self, idx: usize) -> (ScenarioConfig, ConstantsSection, SegmentSpec) {
        let mut scenario = self.scenario.clone();
        let mut constants = self.constants.clone();
        let mut segment = self.segment.clone();
        match &self.sweep {
            SweepSection::RateRatio(v) => segment.r_s_min = v[idx] * segment.r_l_min,
            SweepSection::NumMts(v) => scenario.num_mts = v[idx],
            SweepSection::ConversionEfficiency(v) => constants.conversion_efficiency = v[idx],
        }
        (scenario, constants, segment)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_round_trips_through_toml() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        let text = cfg.to_toml_string();
        let parsed = ExperimentConfig::from_toml_str(&text).unwrap();
        assert_eq!(parsed.trials, cfg.trials);
        assert_eq!(parsed.sweep, cfg.sweep);
        assert_eq!(parsed.segment.r_s_min, cfg.segment.r_s_min);
    }

    #[test]
    fn sweep_specialization() {
        let cfg = ExperimentConfig {
            sweep: SweepSection::RateRatio(vec![2.0, 4.0]),
            ..Default::default()
        };
        let (_, _, seg) = cfg.at_sweep_point(1);
        assert_eq!(seg.r_s_min, 4.0 * cfg.segment.r_l_min);

        let cfg_k = ExperimentConfig {
            sweep: SweepSection::NumMts(vec![2, 5]),
            ..Default::default()
        };
        let (sc, _, _) = cfg_k.at_sweep_point(0);
        assert_eq!(sc.num_mts, 2);

        let cfg_t = ExperimentConfig {
            sweep: SweepSection::ConversionEfficiency(vec![0.25]),
            ..Default::default()
        };
        let (_, consts, _) = cfg_t.at_sweep_point(0);
        assert_eq!(consts.conversion_efficiency, 0.25);
    }

    #[test]
    fn rejects_bad_configs() {
        let cfg = ExperimentConfig {
            trials: 0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());

        let cfg = ExperimentConfig {
            schema_version: 99,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());

        let cfg = ExperimentConfig {
            sweep: SweepSection::RateRatio(vec![]),
            ..Default::default()
        };
        assert!(cfg.validate().is_err());

        assert!(ExperimentConfig::from_toml_str("schema_version = 1\nnot_a_field = 3").is_err());
    }
}
