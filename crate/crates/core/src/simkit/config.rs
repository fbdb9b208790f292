use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::detector::{DetectorConfig, DetectorVariant, RejectionRule};
use crate::error::{Error, Result};
use crate::ldpc::LdpcCode;
use crate::modem::{ConstellationKind, PilotPattern};
use crate::receiver::{IterationSchedule, N0Inflation, ReceiverConfig, ReceiverMode};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub enum CodeSource {
    /// Progressive-edge-growth regular code built from a seed.
    Regular {
        n: usize,
        col_deg: usize,
        row_deg: usize,
        seed: u64,
    },
    /// Parity-check matrix in alist format.
    Alist { path: PathBuf },
}

impl CodeSource {
    pub fn load(&self) -> Result<LdpcCode> {
        match self {
            CodeSource::Regular {
                n,
                col_deg,
                row_deg,
                seed,
            } => LdpcCode::construct_regular(*n, *col_deg, *row_deg, *seed),
            CodeSource::Alist { path } => LdpcCode::load_matrix(path),
        }
    }
}

/// Physical and receiver parameters of one simulated link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub constellation: ConstellationKind,
    pub code: CodeSource,
    pub pilots: PilotPattern,
    pub pilot_seed: u64,
    /// Standard deviation of the phase increments, degrees.
    pub sigma_delta_deg: f64,
    pub receiver: ReceiverConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StopRule {
    pub min_frame_errors: u64,
    pub max_frames: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            min_frame_errors: 100,
            max_frames: 20_000,
        }
    }
}

/// A fully resolved sweep description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Label written to the `scenario` column.
    pub name: String,
    pub scenario: ScenarioConfig,
    pub ebn0_db: Vec<f64>,
    #[serde(default)]
    pub stop: StopRule,
    pub base_seed: u64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ebn0_db.is_empty() {
            return Err(Error::Config("Eb/N0 grid is empty".into()));
        }
        if let Some(x) = self.ebn0_db.iter().find(|x| !x.is_finite()) {
            return Err(Error::Config(format!("Eb/N0 value {x} is not finite")));
        }
        if self.stop.min_frame_errors == 0 || self.stop.max_frames == 0 {
            return Err(Error::Config("stop rule counts must be positive".into()));
        }
        let sd = self.scenario.sigma_delta_deg;
        if !(sd >= 0.0) || !sd.is_finite() {
            return Err(Error::Config(format!("sigma_delta_deg must be >= 0, got {sd}")));
        }
        self.scenario.receiver.validate()
    }

    /// Label for the `variant` column.
    pub fn variant_label(&self) -> &'static str {
        match self.scenario.receiver.mode {
            ReceiverMode::KnownPhase => "Known-Phase",
            ReceiverMode::AllPilots => "All-Pilots",
            ReceiverMode::Detector => self.scenario.receiver.detector.variant.label(),
        }
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form.
    pub fn config_hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Replace the detector with `variant` and its default parameters.
    pub fn with_variant(mut self, variant: DetectorVariant) -> Self {
        let rx = &mut self.scenario.receiver;
        rx.detector = DetectorConfig::for_variant(variant);
        rx.schedule.n_detector = variant.default_inner_iterations();
        self
    }

    /// Parse TOML or JSON (chosen by file extension).
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: RunConfigFile = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
            Some("toml") => {
                toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
            }
            other => {
                return Err(Error::Config(format!(
                    "{}: unsupported config extension {other:?} (use .toml or .json)",
                    path.display()
                )))
            }
        };
        file.resolve()
    }
}

/// On-disk config: either a complete `scenario` or a `preset` to expand,
/// with optional overrides.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub name: Option<String>,
    pub preset: Option<ScenarioPreset>,
    pub variant: Option<DetectorVariant>,
    pub scenario: Option<ScenarioConfig>,
    pub ebn0_db: Option<Vec<f64>>,
    pub stop: Option<StopRule>,
    pub base_seed: Option<u64>,
}

impl RunConfigFile {
    pub fn resolve(self) -> Result<RunConfig> {
        let mut cfg = match (self.preset, self.scenario) {
            (Some(_), Some(_)) => {
                return Err(Error::Config("give either `preset` or `scenario`, not both".into()))
            }
            (None, None) => {
                return Err(Error::Config("config needs a `preset` or a `scenario` table".into()))
            }
            (Some(p), None) => p.config(),
            (None, Some(scenario)) => RunConfig {
                name: self
                    .name
                    .clone()
                    .ok_or_else(|| Error::Config("explicit scenarios need a `name`".into()))?,
                scenario,
                ebn0_db: self
                    .ebn0_db
                    .clone()
                    .ok_or_else(|| Error::Config("explicit scenarios need `ebn0_db`".into()))?,
                stop: StopRule::default(),
                base_seed: self
                    .base_seed
                    .ok_or_else(|| Error::Config("explicit scenarios need `base_seed`".into()))?,
            },
        };
        if let Some(v) = self.variant {
            if cfg.scenario.receiver.mode != ReceiverMode::Detector {
                return Err(Error::Config(
                    "a detector variant cannot be chosen for known-phase or all-pilots runs".into(),
                ));
            }
            cfg = cfg.with_variant(v);
        }
        if let Some(n) = self.name {
            cfg.name = n;
        }
        if let Some(g) = self.ebn0_db {
            cfg.ebn0_db = g;
        }
        if let Some(s) = self.stop {
            cfg.stop = s;
        }
        if let Some(s) = self.base_seed {
            cfg.base_seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Built-in scenarios, scaled to desk-top run times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScenarioPreset {
    /// QPSK, (3,6)-regular n = 4000 code, one pilot every 20 symbols,
    /// 6 degree phase noise, no turbo iterations.
    Fig3Distributed,
    /// QPSK with 90-symbol preamble and postamble and 36-symbol bursts
    /// every 1440 payload symbols, 1 degree phase noise.
    Fig4DvbDistributed,
    /// Only a 45-symbol preamble and postamble, 1 degree phase noise, 1-1-50
    /// iterations with decision-directed rejection.
    Fig5Concentrated,
    /// Coherent decoding of the distributed-pilot scenario.
    KnownPhase,
    /// Genie-aided phase estimation in the distributed-pilot scenario.
    AllPilots,
}

const DESK_CODE: CodeSource = CodeSource::Regular {
    n: 4000,
    col_deg: 3,
    row_deg: 6,
    seed: 1,
};

impl ScenarioPreset {
    pub const ALL: [ScenarioPreset; 5] = [
        ScenarioPreset::Fig3Distributed,
        ScenarioPreset::Fig4DvbDistributed,
        ScenarioPreset::Fig5Concentrated,
        ScenarioPreset::KnownPhase,
        ScenarioPreset::AllPilots,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioPreset::Fig3Distributed => "Fig3Distributed",
            ScenarioPreset::Fig4DvbDistributed => "Fig4DvbDistributed",
            ScenarioPreset::Fig5Concentrated => "Fig5Concentrated",
            ScenarioPreset::KnownPhase => "KnownPhase",
            ScenarioPreset::AllPilots => "AllPilots",
        }
    }

    pub fn config(self) -> RunConfig {
        let distributed = |mode: ReceiverMode, variant: DetectorVariant| {
            let mut receiver = ReceiverConfig::new(
                DetectorConfig::for_variant(variant),
                IterationSchedule::new(variant.default_inner_iterations(), 200, 1),
            );
            receiver.mode = mode;
            ScenarioConfig {
                constellation: ConstellationKind::Qpsk,
                code: DESK_CODE,
                pilots: PilotPattern::Distributed {
                    block_len: 1,
                    gap: 19,
                },
                pilot_seed: 7,
                sigma_delta_deg: 6.0,
                receiver,
            }
        };
        let (scenario, ebn0_db) = match self {
            ScenarioPreset::Fig3Distributed => (
                distributed(ReceiverMode::Detector, DetectorVariant::EpModified),
                vec![2.0, 2.5, 3.0, 3.5, 4.0],
            ),
            ScenarioPreset::KnownPhase => (
                distributed(ReceiverMode::KnownPhase, DetectorVariant::Tp),
                vec![1.0, 1.5, 2.0, 2.5, 3.0],
            ),
            ScenarioPreset::AllPilots => (
                distributed(ReceiverMode::AllPilots, DetectorVariant::Tp),
                vec![1.0, 1.5, 2.0, 2.5, 3.0],
            ),
            ScenarioPreset::Fig4DvbDistributed => {
                let mut detector = DetectorConfig::for_variant(DetectorVariant::EpModified);
                detector.rejection = vec![
                    RejectionRule::new(PI / 12.0, 1),
                    RejectionRule::new(PI / 6.0, 0),
                ];
                let receiver = ReceiverConfig::new(detector, IterationSchedule::new(2, 200, 1));
                (
                    ScenarioConfig {
                        constellation: ConstellationKind::Qpsk,
                        code: DESK_CODE,
                        pilots: PilotPattern::Bursts {
                            preamble: 90,
                            burst_len: 36,
                            burst_gap: 1440,
                            postamble: 90,
                        },
                        pilot_seed: 7,
                        sigma_delta_deg: 1.0,
                        receiver,
                    },
                    vec![1.5, 2.0, 2.5, 3.0, 3.5],
                )
            }
            ScenarioPreset::Fig5Concentrated => {
                let mut detector = DetectorConfig::for_variant(DetectorVariant::EpModified);
                detector.damping = 0.5;
                detector.decision_directed = true;
                let mut receiver = ReceiverConfig::new(detector, IterationSchedule::new(1, 1, 50));
                receiver.n0_inflation = Some(N0Inflation {
                    factor: 1.25,
                    min_ebn0_db: Some(2.0),
                });
                receiver.warm_start = true;
                (
                    ScenarioConfig {
                        constellation: ConstellationKind::Qpsk,
                        code: DESK_CODE,
                        pilots: PilotPattern::PreamblePostambleOnly { len: 45 },
                        pilot_seed: 7,
                        sigma_delta_deg: 1.0,
                        receiver,
                    },
                    vec![1.5, 2.0, 2.5, 3.0, 3.5],
                )
            }
        };
        RunConfig {
            name: self.name().to_string(),
            scenario,
            ebn0_db,
            stop: StopRule::default(),
            base_seed: 1,
        }
    }
}

impl fmt::Display for ScenarioPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn normalize_key(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

impl FromStr for ScenarioPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = normalize_key(s);
        ScenarioPreset::ALL
            .into_iter()
            .find(|p| normalize_key(p.name()) == key)
            .ok_or_else(|| {
                let names: Vec<_> = ScenarioPreset::ALL.iter().map(|p| p.name()).collect();
                Error::Config(format!("unknown preset '{s}' (expected one of {})", names.join(", ")))
            })
    }
}

/// Parse a detector variant name, ignoring case and punctuation.
pub fn parse_variant(s: &str) -> Result<DetectorVariant> {
    let key = normalize_key(s);
    DetectorVariant::ALL
        .into_iter()
        .find(|v| normalize_key(&format!("{v:?}")) == key || normalize_key(v.label()) == key)
        .ok_or_else(|| {
            Error::Config(format!(
                "unknown variant '{s}' (expected Tp, EpNative, EpDamped, EpModified or DpBcjr)"
            ))
        })
}

/// Parse an Eb/N0 grid: `start:step:stop` (inclusive) or a comma list.
pub fn parse_ebn0_grid(s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| -> Result<f64> {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Error::Config(format!("invalid Eb/N0 value '{t}'")))
    };
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!("expected start:step:stop, got '{s}'")));
        }
        let (start, step, stop) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(step > 0.0) || stop < start {
            return Err(Error::Config(format!("empty or unbounded range '{s}'")));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        return Ok((0..count).map(|i| start + step * i as f64).collect());
    }
    let grid = s.split(',').map(num).collect::<Result<Vec<_>>>()?;
    if grid.is_empty() {
        return Err(Error::Config("empty Eb/N0 list".into()));
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for p in ScenarioPreset::ALL {
            p.config().validate().unwrap();
            assert_eq!(p.name().parse::<ScenarioPreset>().unwrap(), p);
        }
        assert_eq!("known-phase".parse::<ScenarioPreset>().unwrap(), ScenarioPreset::KnownPhase);
        assert!("nope".parse::<ScenarioPreset>().is_err());
    }

    #[test]
    fn distributed_ep_modified_defaults() {
        let cfg = ScenarioPreset::Fig3Distributed
            .config()
            .with_variant(DetectorVariant::EpModified);
        let rx = &cfg.scenario.receiver;
        assert_eq!(cfg.scenario.sigma_delta_deg, 6.0);
        assert_eq!(rx.detector.damping, 0.4);
        assert_eq!(rx.detector.rejection, vec![RejectionRule::new(PI / 2.0, 0)]);
        assert_eq!(rx.schedule, IterationSchedule::new(2, 200, 1));
    }

    #[test]
    fn grid_syntax() {
        assert_eq!(parse_ebn0_grid("1:0.5:3").unwrap(), vec![1.0, 1.5, 2.0, 2.5, 3.0]);
        assert_eq!(parse_ebn0_grid("2.5").unwrap(), vec![2.5]);
        assert_eq!(parse_ebn0_grid("1, 4").unwrap(), vec![1.0, 4.0]);
        assert!(parse_ebn0_grid("3:0.5:1").is_err());
        assert!(parse_ebn0_grid("1:0:3").is_err());
        assert!(parse_ebn0_grid("a").is_err());
    }

    #[test]
    fn variants_parse() {
        assert_eq!(parse_variant("EpModified").unwrap(), DetectorVariant::EpModified);
        assert_eq!(parse_variant("ep-mod").unwrap(), DetectorVariant::EpModified);
        assert_eq!(parse_variant("dp-bcjr").unwrap(), DetectorVariant::DpBcjr);
        assert!(parse_variant("xyz").is_err());
    }

    #[test]
    fn json_round_trip_and_hash() {
        let cfg = ScenarioPreset::Fig5Concentrated.config();
        let json = serde_json::to_string_pretty(&cfg).unwrap();
        let file: RunConfigFile = serde_json::from_str(&json).unwrap();
        let back = file.resolve().unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.config_hash(), cfg.config_hash());
        assert_eq!(cfg.config_hash().len(), 16);
        assert_ne!(cfg.config_hash(), ScenarioPreset::KnownPhase.config().config_hash());
    }

    #[test]
    fn toml_preset_with_overrides() {
        let text = r#"
preset = "Fig3Distributed"
variant = "Tp"
ebn0_db = [2.0, 3.0]
base_seed = 9
"#;
        let file: RunConfigFile = toml::from_str(text).unwrap();
        let cfg = file.resolve().unwrap();
        assert_eq!(cfg.ebn0_db, vec![2.0, 3.0]);
        assert_eq!(cfg.base_seed, 9);
        assert_eq!(cfg.scenario.receiver.detector.variant, DetectorVariant::Tp);
        assert!(toml::from_str::<RunConfigFile>("presett = \"KnownPhase\"").is_err());
    }

    #[test]
    fn explicit_scenario_toml_round_trip() {
        let cfg = ScenarioPreset::Fig4DvbDistributed.config();
        let text = toml::to_string(&cfg).unwrap();
        let back = toml::from_str::<RunConfigFile>(&text).unwrap().resolve().unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn conflicting_sources_rejected() {
        let f = RunConfigFile {
            preset: Some(ScenarioPreset::KnownPhase),
            scenario: Some(ScenarioPreset::KnownPhase.config().scenario),
            ..Default::default()
        };
        assert!(f.resolve().is_err());
        assert!(RunConfigFile::default().resolve().is_err());
        let f = RunConfigFile {
            preset: Some(ScenarioPreset::KnownPhase),
            variant: Some(DetectorVariant::Tp),
            ..Default::default()
        };
        assert!(f.resolve().is_err());
    }
}
