//! Run configuration: strict TOML file, command-line overrides and
//! documented defaults (see `docs/config.md`).

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use qfilter_core::field::FourierField;
use qfilter_core::qdyn::default_steps;
use qfilter_core::xprmt::{log_grid, Format, HeisenbergSpec, ScalingSpec, SweepSpec, ZeroSignalSpec};

pub const SEED_ENV: &str = "QFILTER_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Sweep,
    Scaling,
    Heisenberg,
    Detect,
    Check,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Sweep => "sweep",
            Experiment::Scaling => "scaling",
            Experiment::Heisenberg => "heisenberg",
            Experiment::Detect => "detect",
            Experiment::Check => "check",
        }
    }
}

fn default_signal() -> FourierField {
    FourierField::sinusoid(1.0, 5, [0.0, 0.0, 1.0], 0.1).expect("valid default signal")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub period: f64,
    pub signal: FourierField,
    pub background_support: Vec<u32>,
    pub background_epsilon: f64,
    pub control_harmonics: Vec<u32>,
    pub realizations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        let spec = SweepSpec::default();
        Self {
            period: spec.period,
            signal: spec.signal,
            background_support: spec.background_support,
            background_epsilon: spec.background_epsilon,
            control_harmonics: spec.control_harmonics,
            realizations: spec.realizations,
            steps: None,
            shots: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScalingSection {
    pub period: f64,
    /// Explicit grid; when absent the grid is `eps_count` log-spaced points
    /// from `eps_min` to `eps_max`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilons: Option<Vec<f64>>,
    pub eps_min: f64,
    pub eps_max: f64,
    pub eps_count: usize,
    pub signal_support: Vec<u32>,
    pub background_support: Vec<u32>,
    pub control_harmonic: u32,
    pub trials: usize,
    pub steps: usize,
}

impl Default for ScalingSection {
    fn default() -> Self {
        let spec = ScalingSpec::default();
        Self {
            period: spec.period,
            epsilons: None,
            eps_min: 1e-2,
            eps_max: 0.5,
            eps_count: 20,
            signal_support: spec.signal_support,
            background_support: spec.background_support,
            control_harmonic: spec.control_harmonic,
            trials: spec.trials,
            steps: spec.steps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HeisenbergSection {
    pub period: f64,
    pub n_list: Vec<usize>,
    pub signal: FourierField,
    pub control_harmonic: u32,
    pub background_support: Vec<u32>,
    pub background_epsilon: f64,
    pub steps: usize,
    pub dtheta_rel: f64,
    pub cancellation_trials: usize,
}

impl Default for HeisenbergSection {
    fn default() -> Self {
        let spec = HeisenbergSpec::default();
        Self {
            period: spec.period,
            n_list: spec.n_list,
            signal: spec.signal,
            control_harmonic: spec.control_harmonic,
            background_support: spec.background_support,
            background_epsilon: spec.background_epsilon,
            steps: spec.steps,
            dtheta_rel: spec.dtheta_rel,
            cancellation_trials: spec.cancellation_trials,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectSection {
    pub period: f64,
    pub harmonic: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signal: Option<FourierField>,
    /// Field JSON (`.json`) or uniformly sampled data (`.csv`, columns x,y,z).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signal_file: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub background: Option<FourierField>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub background_file: Option<PathBuf>,
    /// Random background used when neither `background` nor
    /// `background_file` is given.
    pub background_support: Vec<u32>,
    pub background_epsilon: f64,
    /// Highest harmonic fitted to sampled data.
    pub max_harmonic: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
}

impl Default for DetectSection {
    fn default() -> Self {
        Self {
            period: 1.0,
            harmonic: 5,
            signal: None,
            signal_file: None,
            background: None,
            background_file: None,
            background_support: (1..=10).collect(),
            background_epsilon: 0.01,
            max_harmonic: 32,
            steps: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckSection {
    pub period: f64,
    pub trials: usize,
    pub support: Vec<u32>,
    pub background_epsilon: f64,
    pub control_harmonic: u32,
    pub steps: usize,
    pub algebra_n: Vec<usize>,
}

impl Default for CheckSection {
    fn default() -> Self {
        let spec = ZeroSignalSpec::default();
        Self {
            period: spec.period,
            trials: spec.trials,
            support: spec.support,
            background_epsilon: spec.background_epsilon,
            control_harmonic: spec.control_harmonic,
            steps: spec.steps,
            algebra_n: vec![1, 2, 4, 8, 16, 32],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    pub sweep: SweepSection,
    pub scaling: ScalingSection,
    pub heisenberg: HeisenbergSection,
    pub detect: DetectSection,
    pub check: CheckSection,
}

/// Values given on the command line; `None` leaves the file or default.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub steps: Option<usize>,
    pub trials: Option<usize>,
    pub jobs: Option<usize>,
    pub format: Option<Format>,
}

fn absolutize(base: &Path, p: &mut Option<PathBuf>) {
    if let Some(path) = p {
        if path.is_relative() {
            *path = base.join(&*path);
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Reads a config file; relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config file {}", path.display()))?;
        let mut cfg = Self::parse(&text).with_context(|| format!("invalid config file {}", path.display()))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        absolutize(&base, &mut cfg.detect.signal_file);
        absolutize(&base, &mut cfg.detect.background_file);
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// Applies command-line overrides, then the seed environment fallback,
    /// then defaults, so that every top-level key is set.
    pub fn resolve(mut self, experiment: Experiment, cli: &Overrides, env_seed: Option<&str>) -> Result<Self> {
        if let Some(kind) = &self.experiment {
            if kind != experiment.name() {
                bail!("config is for experiment `{kind}` but `{}` was requested", experiment.name());
            }
        }
        self.experiment = Some(experiment.name().to_string());
        let env_seed = match env_seed {
            Some(s) => Some(s.trim().parse::<u64>().with_context(|| format!("{SEED_ENV}=`{s}` is not a u64"))?),
            None => None,
        };
        self.seed = cli.seed.or(self.seed).or(env_seed).or(Some(0));
        self.out = cli.out.clone().or(self.out).or_else(|| Some(PathBuf::from("results")));
        self.jobs = cli.jobs.or(self.jobs).or(Some(0));
        self.format = cli.format.or(self.format).or(Some(Format::Csv));
        self.steps = cli.steps.or(self.steps);
        self.trials = cli.trials.or(self.trials);
        if let Some(steps) = self.steps {
            self.sweep.steps = Some(steps);
            self.scaling.steps = steps;
            self.heisenberg.steps = steps;
            self.detect.steps = Some(steps);
            self.check.steps = steps;
        }
        if let Some(trials) = self.trials {
            self.sweep.realizations = trials;
            self.scaling.trials = trials;
            self.heisenberg.cancellation_trials = trials;
            self.check.trials = trials;
        }
        Ok(self)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn jobs(&self) -> usize {
        self.jobs.unwrap_or(0)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    pub fn out(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("results"))
    }

    pub fn sweep_spec(&self) -> SweepSpec {
        let s = &self.sweep;
        let max_k = s
            .control_harmonics
            .iter()
            .chain(&s.background_support)
            .copied()
            .chain(std::iter::once(s.signal.max_harmonic()))
            .max()
            .unwrap_or(1);
        SweepSpec {
            period: s.period,
            signal: s.signal.clone(),
            background_support: s.background_support.clone(),
            background_epsilon: s.background_epsilon,
            control_harmonics: s.control_harmonics.clone(),
            realizations: s.realizations,
            steps: s.steps.unwrap_or_else(|| default_steps(max_k)),
            shots: s.shots,
            seed: self.seed(),
        }
    }

    pub fn scaling_spec(&self) -> ScalingSpec {
        let s = &self.scaling;
        ScalingSpec {
            period: s.period,
            epsilons: s.epsilons.clone().unwrap_or_else(|| log_grid(s.eps_min, s.eps_max, s.eps_count)),
            signal_support: s.signal_support.clone(),
            background_support: s.background_support.clone(),
            control_harmonic: s.control_harmonic,
            trials: s.trials,
            steps: s.steps,
            seed: self.seed(),
        }
    }

    pub fn heisenberg_spec(&self) -> HeisenbergSpec {
        let h = &self.heisenberg;
        HeisenbergSpec {
            period: h.period,
            n_list: h.n_list.clone(),
            signal: h.signal.clone(),
            control_harmonic: h.control_harmonic,
            background_support: h.background_support.clone(),
            background_epsilon: h.background_epsilon,
            steps: h.steps,
            dtheta_rel: h.dtheta_rel,
            cancellation_trials: h.cancellation_trials,
            seed: self.seed(),
        }
    }

    pub fn zero_signal_spec(&self) -> ZeroSignalSpec {
        let c = &self.check;
        ZeroSignalSpec {
            period: c.period,
            trials: c.trials,
            support: c.support.clone(),
            background_epsilon: c.background_epsilon,
            control_harmonic: c.control_harmonic,
            steps: c.steps,
            seed: self.seed(),
        }
    }

    pub fn detect_signal_default() -> FourierField {
        default_signal()
    }
}
