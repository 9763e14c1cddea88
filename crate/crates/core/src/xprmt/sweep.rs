//! Control-frequency sweep over random backgrounds.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{random_field, FourierField};
use crate::protocol::{exact_response, SensorConfig};
use crate::qdyn::default_steps;
use crate::xprmt::runner::{derive_seed, map_trials, role};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub period: f64,
    pub signal: FourierField,
    pub background_support: Vec<u32>,
    pub background_epsilon: f64,
    /// Control frequencies as harmonics of `2π/period`.
    pub control_harmonics: Vec<u32>,
    pub realizations: usize,
    pub steps: usize,
    /// Finite measurement shots per realization; `None` keeps exact
    /// probabilities only.
    pub shots: Option<u64>,
    pub seed: u64,
}

impl Default for SweepSpec {
    /// Signal `0.1 sin(10πt) ẑ`, background on harmonics 1–10 with
    /// `ε_b = 1`, controls at harmonics 1–10, `T = 1`.
    fn default() -> Self {
        Self {
            period: 1.0,
            signal: FourierField::sinusoid(1.0, 5, [0.0, 0.0, 1.0], 0.1).expect("valid default signal"),
            background_support: (1..=10).collect(),
            background_epsilon: 1.0,
            control_harmonics: (1..=10).collect(),
            realizations: 200,
            steps: default_steps(10),
            shots: None,
            seed: 0,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(Error::InvalidArgument("realizations must be at least 1".into()));
        }
        if self.control_harmonics.is_empty() || self.control_harmonics.contains(&0) {
            return Err(Error::InvalidArgument("control harmonics must be non-empty and positive".into()));
        }
        if self.steps == 0 {
            return Err(Error::InvalidArgument("steps must be at least 1".into()));
        }
        if (self.signal.period() - self.period).abs() > 1e-12 * self.period {
            return Err(Error::PeriodMismatch(self.signal.period(), self.period));
        }
        if !(self.background_epsilon >= 0.0) {
            return Err(Error::NegativeEpsilon(self.background_epsilon));
        }
        if self.background_support.is_empty() {
            return Err(Error::InvalidField("background support is empty".into()));
        }
        if self.shots == Some(0) {
            return Err(Error::InvalidArgument("shots must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub omega0: f64,
    pub realization: usize,
    pub seed: u64,
    /// Axis-averaged mean of the two even-parity probabilities.
    pub response: f64,
    pub harmonic: u32,
    /// Axis-averaged total even-parity probability.
    pub summed_response: f64,
    pub first_order: f64,
    pub bound: f64,
    /// Shot-sampled estimate of `response`, if shots are enabled.
    pub sampled: Option<f64>,
    pub error: String,
}

/// One record per (control harmonic, realization), ordered by harmonic then
/// realization. Realization `r` uses the same background at every control
/// frequency.
pub fn frequency_sweep(spec: &SweepSpec, jobs: usize) -> Result<Vec<SweepRecord>> {
    spec.validate()?;
    let per = spec.realizations;
    let records = map_trials(spec.control_harmonics.len() * per, jobs, |idx| {
        let harmonic = spec.control_harmonics[idx / per];
        let realization = idx % per;
        let seed = derive_seed(spec.seed, role::BACKGROUND, realization as u64);
        let omega0 = 2.0 * std::f64::consts::PI * harmonic as f64 / spec.period;
        let mut record = SweepRecord {
            omega0,
            realization,
            seed,
            response: f64::NAN,
            harmonic,
            summed_response: f64::NAN,
            first_order: f64::NAN,
            bound: f64::NAN,
            sampled: None,
            error: String::new(),
        };
        let outcome = random_field(seed, &spec.background_support, spec.background_epsilon, spec.period)
            .and_then(|b| exact_response(&spec.signal, &b, &SensorConfig::new(harmonic, spec.period, spec.steps)?));
        match outcome {
            Ok(r) => {
                record.response = r.response;
                record.summed_response = r.summed_response;
                record.first_order = r.first_order;
                record.bound = r.probability_bound;
                if let Some(shots) = spec.shots {
                    let shot_seed = derive_seed(spec.seed, role::SHOTS, idx as u64);
                    record.sampled = Some(sample_even_fraction(r.summed_response, shots, shot_seed) / 2.0);
                }
            }
            Err(e) => record.error = e.to_string(),
        }
        record
    });
    Ok(records)
}

/// Fraction of even-parity outcomes in `shots` Bernoulli trials.
pub fn sample_even_fraction(p: f64, shots: u64, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = p.clamp(0.0, 1.0);
    let hits = Binomial::new(shots, p).map(|d| d.sample(&mut rng)).unwrap_or(0);
    hits as f64 / shots as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepStat {
    pub harmonic: u32,
    pub omega0: f64,
    pub median: f64,
    pub lower_quartile: f64,
    pub upper_quartile: f64,
    pub max: f64,
    pub failures: usize,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Box-plot statistics of `response` per control harmonic.
pub fn summarize_sweep(records: &[SweepRecord]) -> Vec<SweepStat> {
    let mut harmonics: Vec<u32> = records.iter().map(|r| r.harmonic).collect();
    harmonics.sort_unstable();
    harmonics.dedup();
    harmonics
        .into_iter()
        .map(|k| {
            let group: Vec<&SweepRecord> = records.iter().filter(|r| r.harmonic == k).collect();
            let mut values: Vec<f64> = group.iter().map(|r| r.response).filter(|v| v.is_finite()).collect();
            values.sort_by(f64::total_cmp);
            SweepStat {
                harmonic: k,
                omega0: group[0].omega0,
                median: quantile(&values, 0.5),
                lower_quartile: quantile(&values, 0.25),
                upper_quartile: quantile(&values, 0.75),
                max: values.last().copied().unwrap_or(f64::NAN),
                failures: group.len() - values.len(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> SweepSpec {
        SweepSpec {
            realizations: 6,
            control_harmonics: vec![2, 5],
            steps: 512,
            seed: 9,
            ..SweepSpec::default()
        }
    }

    #[test]
    fn zero_realizations_rejected() {
        let spec = SweepSpec { realizations: 0, ..SweepSpec::default() };
        assert!(frequency_sweep(&spec, 1).is_err());
    }

    #[test]
    fn deterministic_and_thread_independent() {
        let spec = small_spec();
        let a = frequency_sweep(&spec, 1).unwrap();
        let b = frequency_sweep(&spec, 4).unwrap();
        assert_eq!(a.len(), 12);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.response.to_bits(), y.response.to_bits());
            assert_eq!(x.seed, y.seed);
        }
    }

    #[test]
    fn selects_the_signal_frequency() {
        let recs = frequency_sweep(&small_spec(), 0).unwrap();
        let stats = summarize_sweep(&recs);
        let on = stats.iter().find(|s| s.harmonic == 5).unwrap();
        let off = stats.iter().find(|s| s.harmonic == 2).unwrap();
        assert!(on.median > 1e2 * off.median);
        assert!(recs.iter().all(|r| r.error.is_empty() && (r.response - r.first_order).abs() <= r.bound));
    }

    #[test]
    fn shots_sample_near_probability() {
        let spec = SweepSpec { shots: Some(200_000), ..small_spec() };
        for r in frequency_sweep(&spec, 2).unwrap() {
            let sampled = r.sampled.unwrap();
            let sigma = (r.summed_response / 200_000.0).sqrt() / 2.0;
            assert!((sampled - r.response).abs() <= 6.0 * sigma + 1e-12);
        }
    }

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 4.0);
    }
}
