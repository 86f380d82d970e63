//! Line-oriented `key = value` experiment configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use opseq::DecaySchedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    LemmaFuzz,
    Sandwich,
    ShiftDemo,
    Classify,
    DominatedProduct,
    IntervalCounterexample,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::LemmaFuzz,
        Experiment::Sandwich,
        Experiment::ShiftDemo,
        Experiment::Classify,
        Experiment::DominatedProduct,
        Experiment::IntervalCounterexample,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::LemmaFuzz => "lemma-fuzz",
            Experiment::Sandwich => "sandwich",
            Experiment::ShiftDemo => "shift-demo",
            Experiment::Classify => "classify",
            Experiment::DominatedProduct => "dominated-product",
            Experiment::IntervalCounterexample => "interval-counterexample",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown experiment {s:?}"))
    }
}

/// A validated experiment configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub dim: usize,
    pub n_max: usize,
    pub seed: u64,
    pub tol: f64,
    pub k: usize,
    pub rate: DecaySchedule,
    pub out: Option<PathBuf>,
    /// Trial count for the fuzz and search experiments.
    pub trials: usize,
    /// Corrupts the generated instance at this index (1-based).
    pub plant_defect: Option<usize>,
}

pub const DEFAULT_DIM: usize = 8;
pub const DEFAULT_N_MAX: usize = 100;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_K: usize = 5;
pub const DEFAULT_TRIALS: usize = 1000;

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            dim: DEFAULT_DIM,
            n_max: DEFAULT_N_MAX,
            seed: DEFAULT_SEED,
            tol: DEFAULT_TOL,
            k: DEFAULT_K,
            rate: DecaySchedule::default(),
            out: None,
            trials: DEFAULT_TRIALS,
            plant_defect: None,
        }
    }

    /// Canonical `key = value` lines, one per field, in a fixed order.
    pub fn echo(&self) -> Vec<String> {
        let mut lines = vec![
            format!("experiment = {}", self.experiment),
            format!("dim = {}", self.dim),
            format!("n_max = {}", self.n_max),
            format!("seed = {}", self.seed),
            format!("tol = {:e}", self.tol),
            format!("k = {}", self.k),
            format!("rate = {}", rate_descriptor(&self.rate)),
            format!("trials = {}", self.trials),
        ];
        if let Some(n) = self.plant_defect {
            lines.push(format!("plant_defect = {n}"));
        }
        lines
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut errors = Vec::new();
        let mut check = |ok: bool, msg: &str| {
            if !ok {
                errors.push(msg.to_string());
            }
        };
        check(self.dim >= 1, "dim must be ≥ 1");
        check(self.n_max >= 1, "n_max must be ≥ 1");
        check(
            self.tol > 0.0 && self.tol.is_finite(),
            "tol must be positive",
        );
        check(self.k >= 1, "k must be ≥ 1");
        check(self.trials >= 1, "trials must be ≥ 1");
        if let Some(n) = self.plant_defect {
            check(
                n >= 1 && n <= self.n_max,
                "plant_defect must lie in 1..=n_max",
            );
        }
        if let Err(e) = self.rate.validate() {
            errors.push(format!("rate: {e}"));
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(ConfigError(errors))
        }
    }
}

pub fn rate_descriptor(rate: &DecaySchedule) -> String {
    match rate {
        DecaySchedule::Harmonic { k } => format!("harmonic {k}"),
        DecaySchedule::Geometric { k, r } => format!("geometric {k} {r}"),
        DecaySchedule::Table(v) => {
            let values: Vec<String> = v.iter().map(f64::to_string).collect();
            format!("table {}", values.join(" "))
        }
    }
}

/// `harmonic K`, `geometric K r` or `table v1 v2 …`; a bare `harmonic`
/// means `K = 1`.
pub fn parse_rate(text: &str) -> Result<DecaySchedule, String> {
    let mut words = text.split_whitespace();
    let kind = words.next().ok_or("empty rate descriptor")?;
    let numbers = words
        .map(|w| {
            w.parse::<f64>()
                .map_err(|_| format!("bad number {w:?} in rate"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let schedule = match (kind, numbers.as_slice()) {
        ("harmonic", []) => DecaySchedule::Harmonic { k: 1.0 },
        ("harmonic", [k]) => DecaySchedule::Harmonic { k: *k },
        ("geometric", [k, r]) => DecaySchedule::Geometric { k: *k, r: *r },
        ("table", values) if !values.is_empty() => DecaySchedule::Table(values.to_vec()),
        _ => return Err(format!("unrecognised rate {text:?}")),
    };
    schedule.validate().map_err(|e| e.to_string())?;
    Ok(schedule)
}

/// Every problem found in a configuration, one message per entry.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid configuration:\n  {}", .0.join("\n  "))]
pub struct ConfigError(pub Vec<String>);

impl ConfigError {
    pub fn messages(&self) -> &[String] {
        &self.0
    }
}

/// Keys as read from a file, before defaults are applied.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PartialConfig {
    pub experiment: Option<Experiment>,
    pub dim: Option<usize>,
    pub n_max: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub k: Option<usize>,
    pub rate: Option<DecaySchedule>,
    pub out: Option<PathBuf>,
    pub trials: Option<usize>,
    pub plant_defect: Option<usize>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("malformed value for {key}: {value:?}"))
}

impl PartialConfig {
    /// Reads `key = value` lines; `#` starts a comment. Every bad line is
    /// reported, not just the first.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = PartialConfig::default();
        let mut errors = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                errors.push(format!("line {line_no}: expected `key = value`"));
                continue;
            };
            let (key, value) = (key.trim(), value.trim());
            if let Err(msg) = cfg.set(key, value) {
                errors.push(format!("line {line_no}: {msg}"));
            }
        }
        if errors.is_empty() {
            Ok(cfg)
        } else {
            Err(ConfigError(errors))
        }
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "experiment" => self.experiment = Some(value.parse()?),
            "dim" => self.dim = Some(parse_value(key, value)?),
            "n_max" => self.n_max = Some(parse_value(key, value)?),
            "seed" => self.seed = Some(parse_value(key, value)?),
            "tol" => self.tol = Some(parse_value(key, value)?),
            "k" => self.k = Some(parse_value(key, value)?),
            "rate" => self.rate = Some(parse_rate(value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "trials" => self.trials = Some(parse_value(key, value)?),
            "plant_defect" => self.plant_defect = Some(parse_value(key, value)?),
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    /// Fills defaults and validates ranges.
    pub fn resolve(self) -> Result<ExperimentConfig, ConfigError> {
        let Some(experiment) = self.experiment else {
            let mut errors = vec!["experiment is required".to_string()];
            // Still report range problems alongside the missing key.
            let probe = PartialConfig {
                experiment: Some(Experiment::Classify),
                ..self
            };
            if let Err(ConfigError(more)) = probe.resolve() {
                errors.extend(more);
            }
            return Err(ConfigError(errors));
        };
        let defaults = ExperimentConfig::new(experiment);
        let cfg = ExperimentConfig {
            experiment,
            dim: self.dim.unwrap_or(defaults.dim),
            n_max: self.n_max.unwrap_or(defaults.n_max),
            seed: self.seed.unwrap_or(defaults.seed),
            tol: self.tol.unwrap_or(defaults.tol),
            k: self.k.unwrap_or(defaults.k),
            rate: self.rate.unwrap_or(defaults.rate),
            out: self.out,
            trials: self.trials.unwrap_or(defaults.trials),
            plant_defect: self.plant_defect,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    PartialConfig::parse(text)?.resolve()
}
