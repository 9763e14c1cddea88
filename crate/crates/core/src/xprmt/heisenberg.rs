//! Scaling of the collective detection probability and its Fisher
//! information with register size.

use serde::{Deserialize, Serialize};

use crate::collective::{cfi, collective_response, collective_unitaries, initial_entangled_state, Stepper};
use crate::error::{Error, Result};
use crate::field::{harmonic_index, random_field, FourierField};
use crate::protocol::ControlAxis;
use crate::xprmt::fit::loglog_slope;
use crate::xprmt::runner::{derive_seed, map_trials, role};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergSpec {
    pub period: f64,
    pub n_list: Vec<usize>,
    pub signal: FourierField,
    pub control_harmonic: u32,
    pub background_support: Vec<u32>,
    pub background_epsilon: f64,
    pub steps: usize,
    /// Finite-difference width relative to `θ`.
    pub dtheta_rel: f64,
    /// Random backgrounds per `N` for the zero-signal cancellation check.
    pub cancellation_trials: usize,
    pub seed: u64,
}

impl Default for HeisenbergSpec {
    fn default() -> Self {
        Self {
            period: 1.0,
            n_list: vec![2, 4, 8, 16, 32],
            signal: FourierField::sinusoid(1.0, 5, [0.0, 0.0, 1.0], 1e-3).expect("valid default signal"),
            control_harmonic: 5,
            background_support: (1..=10).collect(),
            background_epsilon: 1.0,
            steps: 2048,
            dtheta_rel: 1e-3,
            cancellation_trials: 20,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergRow {
    pub n: usize,
    /// `‖s⃗_ω₀‖₂`, the parameter the Fisher information refers to.
    pub theta: f64,
    pub p_m: f64,
    pub cfi: f64,
    /// Weak-signal prediction `N(N+2)T²θ²/18`.
    pub first_order: f64,
    pub min_zero_signal_fidelity: f64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergResult {
    pub rows: Vec<HeisenbergRow>,
    pub p_slope: Option<f64>,
    pub cfi_slope: Option<f64>,
}

fn zero_signal_fidelity(spec: &HeisenbergSpec, n: usize, omega0: f64) -> Result<f64> {
    let zero = FourierField::zero(spec.period);
    let psi0 = initial_entangled_state(n);
    let mut worst = f64::INFINITY;
    for t in 0..spec.cancellation_trials {
        let seed = derive_seed(spec.seed, role::ZERO_SUITE, (n as u64) << 32 | t as u64);
        let b = random_field(seed, &spec.background_support, spec.background_epsilon.max(1e-3), spec.period)?;
        for axis in ControlAxis::ALL {
            let (u1, u2) = collective_unitaries(&zero, &b, omega0, axis, n, spec.steps, Stepper::Lift)?;
            worst = worst.min(psi0.fidelity(&psi0.apply(&u1, &u2)));
        }
    }
    Ok(worst)
}

pub fn heisenberg_study(spec: &HeisenbergSpec, jobs: usize) -> Result<HeisenbergResult> {
    if spec.n_list.is_empty() || spec.n_list.contains(&0) {
        return Err(Error::InvalidArgument("N list must be non-empty with N ≥ 1".into()));
    }
    if spec.control_harmonic == 0 || spec.steps == 0 || !(spec.dtheta_rel > 0.0) {
        return Err(Error::InvalidArgument("need a positive control harmonic, steps and dtheta".into()));
    }
    let k0 = spec.control_harmonic;
    harmonic_index(spec.signal.omega(k0), spec.period)?;
    let theta = spec.signal.weight_at(k0).sqrt();
    if theta == 0.0 {
        return Err(Error::InvalidArgument(format!("signal has no weight at harmonic {k0}")));
    }
    let omega0 = spec.signal.omega(k0);
    let background = random_field(
        derive_seed(spec.seed, role::BACKGROUND, 0),
        &spec.background_support,
        spec.background_epsilon,
        spec.period,
    )?;

    let rows = map_trials(spec.n_list.len(), jobs, |i| {
        let n = spec.n_list[i];
        let mut row = HeisenbergRow {
            n,
            theta,
            p_m: f64::NAN,
            cfi: f64::NAN,
            first_order: (n * (n + 2)) as f64 * (spec.period * theta).powi(2) / 18.0,
            min_zero_signal_fidelity: f64::NAN,
            error: String::new(),
        };
        let p_of = |th: f64| -> Result<f64> {
            let s = spec.signal.with_harmonic_scaled(k0, th / theta);
            Ok(collective_response(&s, &background, omega0, n, spec.steps, &ControlAxis::ALL)?.p_m)
        };
        let run = |row: &mut HeisenbergRow| -> Result<()> {
            row.min_zero_signal_fidelity = zero_signal_fidelity(spec, n, omega0)?;
            row.p_m = p_of(theta)?;
            let failed = std::cell::Cell::new(None);
            let value = cfi(
                |th| {
                    p_of(th).unwrap_or_else(|e| {
                        failed.set(Some(e));
                        f64::NAN
                    })
                },
                theta,
                spec.dtheta_rel * theta,
            );
            if let Some(e) = failed.take() {
                return Err(e);
            }
            row.cfi = value?;
            Ok(())
        };
        if let Err(e) = run(&mut row) {
            row.error = e.to_string();
        }
        row
    });

    let points = |f: fn(&HeisenbergRow) -> f64| -> Vec<(f64, f64)> {
        rows.iter().filter(|r| f(r).is_finite()).map(|r| (r.n as f64, f(r))).collect()
    };
    let p_slope = loglog_slope(&points(|r| r.p_m));
    let cfi_slope = loglog_slope(&points(|r| r.cfi));
    Ok(HeisenbergResult { rows, p_slope, cfi_slope })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> HeisenbergSpec {
        HeisenbergSpec { n_list: vec![1, 2, 4], steps: 512, cancellation_trials: 2, ..HeisenbergSpec::default() }
    }

    #[test]
    fn single_n_has_no_slope() {
        let r = heisenberg_study(&HeisenbergSpec { n_list: vec![1], ..small() }, 1).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.p_slope, None);
        assert_eq!(r.cfi_slope, None);
    }

    #[test]
    fn rows_follow_weak_signal_model() {
        let r = heisenberg_study(&small(), 0).unwrap();
        for row in &r.rows {
            assert!(row.error.is_empty());
            assert!((row.p_m / row.first_order - 1.0).abs() < 0.05, "{row:?}");
            // p ≈ κθ² gives CFI ≈ 4κ = 4p/θ².
            let expected = 4.0 * row.p_m / (row.theta * row.theta);
            assert!((row.cfi / expected - 1.0).abs() < 1e-3, "{row:?}");
            assert!(row.min_zero_signal_fidelity >= 1.0 - 1e-9);
        }
        // For p ∝ N(N+2) on {1,2,4} the log-log slope is fixed by arithmetic.
        let oracle = loglog_slope(&[(1.0, 3.0), (2.0, 8.0), (4.0, 24.0)]).unwrap();
        assert!((r.p_slope.unwrap() - oracle).abs() < 0.02);
    }

    #[test]
    fn signal_without_target_weight_rejected() {
        let spec = HeisenbergSpec { control_harmonic: 3, ..small() };
        assert!(heisenberg_study(&spec, 1).is_err());
    }
}
