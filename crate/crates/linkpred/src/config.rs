//! Experiment configuration: a single versioned TOML file declaring the
//! data source, predictors, fusion modes, alpha grid and run settings.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusion::{Aggregate, FriendPredictor, FusionMode};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<DataSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SynthSection>,
    #[serde(default)]
    pub predictors: PredictorsSection,
    #[serde(default)]
    pub fusion: FusionSection,
    #[serde(default)]
    pub run: RunSection,
}

/// Ingest real edge files, then apply the aggregate-degree filter.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub friend_file: PathBuf,
    pub interaction_file: PathBuf,
    /// Unix seconds of the trace start used for windowing.
    pub start: i64,
    /// Unix seconds; the final partial window is discarded.
    pub end: i64,
    #[serde(default = "default_interval_days")]
    pub interval_days: i64,
    #[serde(default = "default_degree_threshold")]
    pub degree_threshold: usize,
}

fn default_interval_days() -> i64 {
    90
}

fn default_degree_threshold() -> usize {
    120
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSection {
    pub nodes: usize,
    pub snapshots: usize,
    pub friendship_growth: usize,
    pub q_friend: f64,
    pub q_nonfriend: f64,
    #[serde(default)]
    pub persistence_boost: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PredictorsSection {
    pub list: Vec<PredictorName>,
    pub lambda: f64,
    pub beta: f64,
    pub max_length: usize,
    pub blocks: usize,
    pub mix: f64,
}

impl Default for PredictorsSection {
    fn default() -> Self {
        PredictorsSection {
            list: vec![
                PredictorName::Ewma,
                PredictorName::TsAa,
                PredictorName::TsKatz,
                PredictorName::Dsbm,
            ],
            lambda: 0.5,
            beta: 0.05,
            max_length: 4,
            blocks: 10,
            mix: 0.5,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictorName {
    Ewma,
    TsAa,
    TsKatz,
    Dsbm,
}

impl PredictorName {
    pub fn label(self) -> &'static str {
        match self {
            PredictorName::Ewma => "ewma",
            PredictorName::TsAa => "ts_aa",
            PredictorName::TsKatz => "ts_katz",
            PredictorName::Dsbm => "dsbm",
        }
    }

    /// Row label in the summary table.
    pub fn display(self) -> &'static str {
        match self {
            PredictorName::Ewma => "EWMA",
            PredictorName::TsAa => "TS-AA",
            PredictorName::TsKatz => "TS-Katz",
            PredictorName::Dsbm => "DSBM",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ewma" => Ok(PredictorName::Ewma),
            "ts_aa" => Ok(PredictorName::TsAa),
            "ts_katz" => Ok(PredictorName::TsKatz),
            "dsbm" => Ok(PredictorName::Dsbm),
            other => Err(Error::InvalidConfig(format!(
                "unknown predictor {other:?}; expected ewma, ts_aa, ts_katz or dsbm"
            ))),
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    None,
    Current,
    PredictedAa,
    PredictedKatz,
}

impl ModeName {
    pub fn to_mode(self) -> FusionMode {
        match self {
            ModeName::None => FusionMode::None,
            ModeName::Current => FusionMode::CurrentFriends,
            ModeName::PredictedAa => FusionMode::PredictedFriends(FriendPredictor::Aa),
            ModeName::PredictedKatz => FusionMode::PredictedFriends(FriendPredictor::Katz),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FusionSection {
    pub modes: Vec<ModeName>,
    pub alpha_grid: Vec<f64>,
}

impl Default for FusionSection {
    fn default() -> Self {
        FusionSection {
            modes: vec![
                ModeName::None,
                ModeName::Current,
                ModeName::PredictedAa,
                ModeName::PredictedKatz,
            ],
            alpha_grid: default_alpha_grid(),
        }
    }
}

/// 0.0, 0.1, ..., 1.0
pub fn default_alpha_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    /// First evaluated prediction time; predictions need at least one
    /// history snapshot.
    pub warmup: usize,
    pub seed: u64,
    pub aggregate: Aggregate,
    pub out_dir: PathBuf,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            warmup: 1,
            seed: 42,
            aggregate: Aggregate::Mean,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: ExperimentConfig = toml::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::InvalidConfig(format!(
                "config version {} is not supported (expected {CONFIG_VERSION})",
                self.version
            )));
        }
        match (&self.data, &self.synthetic) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidConfig(
                    "declare either [data] or [synthetic], not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::InvalidConfig(
                    "declare a data source: [data] or [synthetic]".into(),
                ))
            }
            _ => {}
        }
        if self.predictors.list.is_empty() {
            return Err(Error::InvalidConfig("predictor list is empty".into()));
        }
        if self.fusion.modes.is_empty() {
            return Err(Error::InvalidConfig("fusion mode list is empty".into()));
        }
        if self.fusion.alpha_grid.is_empty() {
            return Err(Error::InvalidConfig("alpha grid is empty".into()));
        }
        for &a in &self.fusion.alpha_grid {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::InvalidConfig(format!(
                    "alpha grid value {a} outside [0,1]"
                )));
            }
        }
        Ok(())
    }

    /// Canonical text form, written next to the results for
    /// auditability. The output directory is where the echo itself
    /// lands, so it is normalized out to keep runs comparable
    /// byte-for-byte.
    pub fn echo(&self) -> String {
        let mut cfg = self.clone();
        cfg.run.out_dir = RunSection::default().out_dir;
        toml::to_string_pretty(&cfg).expect("config serializes")
    }
}
