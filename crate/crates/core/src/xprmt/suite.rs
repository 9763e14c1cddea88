//! Self-checks: zero-signal invariance and operator algebra.

use serde::{Deserialize, Serialize};

use crate::collective::outcome_projectors;
use crate::error::{Error, Result};
use crate::field::{random_field, FourierField};
use crate::protocol::{exact_response, ControlAxis, SensorConfig};
use crate::qdyn::dense::{hermitian_expm, max_abs_diff, HermitianMatrix};
use crate::qdyn::pauli::{pauli_expm, PauliCoeffs};
use crate::qdyn::spin::{collective_ops, symmetric_power};
use crate::qdyn::CMatrix;
use crate::xprmt::runner::{derive_seed, map_trials, role};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSignalSpec {
    pub period: f64,
    pub trials: usize,
    pub support: Vec<u32>,
    pub background_epsilon: f64,
    pub control_harmonic: u32,
    pub steps: usize,
    pub seed: u64,
}

impl Default for ZeroSignalSpec {
    fn default() -> Self {
        Self {
            period: 1.0,
            trials: 100,
            support: (1..=10).collect(),
            background_epsilon: 1.0,
            control_harmonic: 5,
            steps: 1024,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSignalRecord {
    pub trial: usize,
    pub seed: u64,
    pub max_even_probability: f64,
    pub min_survival: f64,
}

/// Exact response with `s = 0` over random backgrounds and all six axes.
pub fn zero_signal_suite(spec: &ZeroSignalSpec, jobs: usize) -> Result<Vec<ZeroSignalRecord>> {
    if spec.trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let config = SensorConfig::new(spec.control_harmonic, spec.period, spec.steps)?;
    let zero = FourierField::zero(spec.period);
    map_trials(spec.trials, jobs, |t| {
        let seed = derive_seed(spec.seed, role::ZERO_SUITE, t as u64);
        let b = random_field(seed, &spec.support, spec.background_epsilon, spec.period)?;
        let r = exact_response(&zero, &b, &config)?;
        Ok(ZeroSignalRecord {
            trial: t,
            seed,
            max_even_probability: r.max_even_probability(),
            min_survival: r.min_survival(),
        })
    })
    .into_iter()
    .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgebraReport {
    pub commutator: f64,
    pub casimir: f64,
    pub lift: f64,
    pub projectors: f64,
}

impl AlgebraReport {
    pub fn worst(&self) -> f64 {
        self.commutator.max(self.casimir).max(self.lift).max(self.projectors)
    }
}

/// Largest defect of the spin algebra, the SU(2) lift and the outcome
/// projector completeness for each `N` in `ns`.
pub fn algebra_report(ns: &[usize]) -> Result<AlgebraReport> {
    let mut rep = AlgebraReport { commutator: 0.0, casimir: 0.0, lift: 0.0, projectors: 0.0 };
    let i = num_complex::Complex64::new(0.0, 1.0);
    for &n in ns {
        let ops = collective_ops(n);
        let d = ops.dim();
        let s = ops.spin();
        let comm = &ops.sx * &ops.sy - &ops.sy * &ops.sx;
        rep.commutator = rep.commutator.max(max_abs_diff(&comm, &(&ops.sz * i)));
        let cas = &ops.sx * &ops.sx + &ops.sy * &ops.sy + &ops.sz * &ops.sz;
        let expected = CMatrix::identity(d, d) * num_complex::Complex64::from(s * (s + 1.0));
        rep.casimir = rep.casimir.max(max_abs_diff(&cas, &expected));
        let a = [0.37, -0.52, 0.81];
        let h = HermitianMatrix::new(ops.along(a.map(|x| 2.0 * x)))?;
        let lifted = symmetric_power(&pauli_expm(PauliCoeffs::traceless(a), 1.3), n);
        rep.lift = rep.lift.max(max_abs_diff(&lifted, hermitian_expm(&h, 1.3).as_matrix()));
        for axis in ControlAxis::ALL {
            let v = outcome_projectors(axis, n).basis().clone();
            rep.projectors = rep.projectors.max(max_abs_diff(&(v.adjoint() * &v), &CMatrix::identity(d, d)));
        }
    }
    Ok(rep)
}
