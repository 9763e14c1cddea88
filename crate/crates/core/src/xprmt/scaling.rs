//! Residual of the first-order estimate against field strength.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::random_field;
use crate::protocol::{exact_response, SensorConfig};
use crate::xprmt::fit::{fit_cubic_quartic, CubicQuarticFit};
use crate::xprmt::runner::{derive_seed, map_trials, role};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSpec {
    pub period: f64,
    pub epsilons: Vec<f64>,
    pub signal_support: Vec<u32>,
    pub background_support: Vec<u32>,
    pub control_harmonic: u32,
    pub trials: usize,
    pub steps: usize,
    pub seed: u64,
}

/// `count` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![lo],
        _ => (0..count).map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64)).collect(),
    }
}

impl Default for ScalingSpec {
    fn default() -> Self {
        Self {
            period: 1.0,
            epsilons: log_grid(1e-2, 0.5, 20),
            signal_support: (1..=7).collect(),
            background_support: (1..=10).collect(),
            control_harmonic: 3,
            trials: 100,
            steps: 4096,
            seed: 0,
        }
    }
}

impl ScalingSpec {
    pub fn validate(&self) -> Result<()> {
        if self.epsilons.is_empty() {
            return Err(Error::InvalidArgument("epsilon grid is empty".into()));
        }
        if self.epsilons.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
            return Err(Error::InvalidArgument("epsilon values must be positive".into()));
        }
        if self.epsilons.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("epsilon values must be strictly ascending".into()));
        }
        if self.trials == 0 || self.steps == 0 {
            return Err(Error::InvalidArgument("trials and steps must be at least 1".into()));
        }
        if self.signal_support.is_empty() || self.background_support.is_empty() {
            return Err(Error::InvalidField("supports must be non-empty".into()));
        }
        if self.control_harmonic == 0 {
            return Err(Error::InvalidArgument("control harmonic must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub epsilon: f64,
    pub trial: usize,
    pub abs_r: f64,
    pub bound: f64,
    #[serde(rename = "I_s")]
    pub i_s: f64,
    #[serde(rename = "I_b")]
    pub i_b: f64,
    pub seed: u64,
    pub eps_s: f64,
    pub eps_b: f64,
    pub omega0: f64,
    pub p_exact: f64,
    pub p_model: f64,
    pub error: String,
}

impl TrialRecord {
    /// Whether the trial lies where the remainder bound is asserted to hold.
    pub fn in_bound_regime(&self) -> bool {
        self.i_s + self.i_b <= 1.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSummary {
    pub epsilon: f64,
    pub mean_abs_r: f64,
    pub max_abs_r: f64,
    /// Largest `|r|/bound` among trials in the bound regime.
    pub max_bound_ratio: f64,
    pub failures: usize,
}

/// Draws `trials` signal/background pairs with `‖s‖ = ‖b‖ = ε` for every
/// grid point. Records are ordered by ε, then trial.
pub fn error_scaling(spec: &ScalingSpec, jobs: usize) -> Result<(Vec<TrialRecord>, Vec<EpsilonSummary>)> {
    spec.validate()?;
    let per = spec.trials;
    let config = SensorConfig::new(spec.control_harmonic, spec.period, spec.steps)?;
    let records = map_trials(spec.epsilons.len() * per, jobs, |idx| {
        let epsilon = spec.epsilons[idx / per];
        let seed = derive_seed(spec.seed, 0, idx as u64);
        let mut rec = TrialRecord {
            epsilon,
            trial: idx % per,
            abs_r: f64::NAN,
            bound: f64::NAN,
            i_s: f64::NAN,
            i_b: f64::NAN,
            seed,
            eps_s: epsilon,
            eps_b: epsilon,
            omega0: config.omega0,
            p_exact: f64::NAN,
            p_model: f64::NAN,
            error: String::new(),
        };
        let run = || -> Result<_> {
            let s = random_field(derive_seed(seed, role::SIGNAL, 0), &spec.signal_support, epsilon, spec.period)?;
            let b = random_field(derive_seed(seed, role::BACKGROUND, 0), &spec.background_support, epsilon, spec.period)?;
            exact_response(&s, &b, &config)
        };
        match run() {
            Ok(r) => {
                rec.abs_r = r.residual.abs();
                rec.bound = r.probability_bound;
                rec.i_s = r.i_s;
                rec.i_b = r.i_b;
                rec.p_exact = r.response;
                rec.p_model = r.first_order;
            }
            Err(e) => rec.error = e.to_string(),
        }
        rec
    });
    let summary = spec
        .epsilons
        .iter()
        .enumerate()
        .map(|(i, &epsilon)| {
            let group = &records[i * per..(i + 1) * per];
            let ok: Vec<&TrialRecord> = group.iter().filter(|r| r.error.is_empty()).collect();
            let mean_abs_r = ok.iter().map(|r| r.abs_r).sum::<f64>() / ok.len() as f64;
            let max_abs_r = ok.iter().map(|r| r.abs_r).fold(f64::NAN, f64::max);
            let max_bound_ratio = ok
                .iter()
                .filter(|r| r.in_bound_regime())
                .map(|r| r.abs_r / r.bound)
                .fold(f64::NAN, f64::max);
            EpsilonSummary { epsilon, mean_abs_r, max_abs_r, max_bound_ratio, failures: group.len() - ok.len() }
        })
        .collect();
    Ok((records, summary))
}

/// `b ε³ + c ε⁴` fit to the per-ε mean residual.
pub fn fit_mean_residual(summary: &[EpsilonSummary]) -> Result<CubicQuarticFit> {
    let points: Vec<(f64, f64)> = summary.iter().filter(|s| s.mean_abs_r.is_finite()).map(|s| (s.epsilon, s.mean_abs_r)).collect();
    fit_cubic_quartic(&points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ScalingSpec {
        ScalingSpec { epsilons: log_grid(0.02, 0.3, 5), trials: 6, steps: 2048, seed: 3, ..ScalingSpec::default() }
    }

    #[test]
    fn grid_endpoints() {
        let g = log_grid(1e-2, 0.5, 20);
        assert_eq!(g.len(), 20);
        assert!((g[0] - 1e-2).abs() < 1e-18 && (g[19] - 0.5).abs() < 1e-15);
        assert!(g.windows(2).all(|w| (w[1] / w[0] - g[1] / g[0]).abs() < 1e-12));
    }

    #[test]
    fn invalid_specs() {
        assert!(ScalingSpec { epsilons: vec![0.1, 0.05], ..small() }.validate().is_err());
        assert!(ScalingSpec { epsilons: vec![-0.1], ..small() }.validate().is_err());
        assert!(ScalingSpec { trials: 0, ..small() }.validate().is_err());
    }

    #[test]
    fn residual_is_bounded_and_shrinks() {
        let (records, summary) = error_scaling(&small(), 0).unwrap();
        assert_eq!(records.len(), 30);
        for r in &records {
            assert!(r.error.is_empty());
            assert!(r.abs_r.is_finite() && r.bound.is_finite() && r.i_s.is_finite());
            if r.in_bound_regime() {
                assert!(r.abs_r <= r.bound, "{r:?}");
            }
        }
        assert!(summary[0].mean_abs_r < 1e-3 * summary[4].mean_abs_r);
    }

    #[test]
    fn thread_count_does_not_change_records() {
        let spec = ScalingSpec { epsilons: vec![0.1, 0.2], trials: 5, steps: 256, ..small() };
        assert_eq!(error_scaling(&spec, 1).unwrap(), error_scaling(&spec, 8).unwrap());
    }
}
