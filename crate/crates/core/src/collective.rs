//! Two `N`-qubit registers restricted to their symmetric subspaces: the
//! entangled probe state, collective propagation, outcome projectors,
//! detection probability and classical Fisher information.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FourierField, Vec3};
use crate::protocol::ControlAxis;
use crate::qdyn::dense::{propagate_dense, CMatrix};
use crate::qdyn::pauli::{propagate_samples, Mat2};
use crate::qdyn::spin::{collective_ops, symmetric_power};

/// Amplitudes over `|S,m⟩⊗|S,m′⟩`, register-1 index major; index `i` is
/// `m = S − i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoRegisterState {
    n: usize,
    amps: Vec<C64>,
}

impl TwoRegisterState {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn overlap(&self, other: &TwoRegisterState) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|⟨self|other⟩|`, insensitive to global phase.
    pub fn fidelity(&self, other: &TwoRegisterState) -> f64 {
        self.overlap(other).norm()
    }

    fn as_matrix(&self) -> CMatrix {
        let d = self.dim();
        CMatrix::from_fn(d, d, |i, j| self.amps[i * d + j])
    }

    fn from_matrix(n: usize, m: &CMatrix) -> Self {
        let d = n + 1;
        let mut amps = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                amps.push(m[(i, j)]);
            }
        }
        Self { n, amps }
    }

    /// `(U1 ⊗ U2)|ψ⟩`.
    pub fn apply(&self, u1: &CMatrix, u2: &CMatrix) -> TwoRegisterState {
        let m = u1 * self.as_matrix() * u2.transpose();
        Self::from_matrix(self.n, &m)
    }
}

/// `(1/√d) Σ_m (−1)^{S−m} |S,m⟩|S,−m⟩`.
pub fn initial_entangled_state(n: usize) -> TwoRegisterState {
    assert!(n >= 1, "registers need at least one qubit");
    let d = n + 1;
    let amp = 1.0 / (d as f64).sqrt();
    let mut amps = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        // m = S − i pairs with −m at index d − 1 − i; S − m = i
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        amps[i * d + (d - 1 - i)] = C64::from(sign * amp);
    }
    TwoRegisterState { n, amps }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stepper {
    /// Propagate the single-qubit generator and lift the result onto the
    /// Dicke subspace.
    #[default]
    Lift,
    /// Per-step eigendecomposition of the dense `(N+1)`-dimensional generator.
    Dense,
}

fn add3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Propagators of both registers under `ω₀ n⃗·S⃗ + 2(s⃗+b⃗)·S⃗` and
/// `ω₀ n⃗·S⃗ + 2b⃗·S⃗`.
pub fn collective_unitaries(
    s: &FourierField,
    b: &FourierField,
    omega0: f64,
    axis: ControlAxis,
    n: usize,
    steps: usize,
    stepper: Stepper,
) -> Result<(CMatrix, CMatrix)> {
    let period = s.period();
    if (period - b.period()).abs() > 1e-12 * period {
        return Err(Error::PeriodMismatch(period, b.period()));
    }
    if steps == 0 || n == 0 {
        return Err(Error::InvalidArgument("need n ≥ 1 and steps ≥ 1".into()));
    }
    let dt = period / steps as f64;
    let control = axis.vector().map(|x| 0.5 * omega0 * x);
    match stepper {
        Stepper::Lift => {
            let bg = b.sample_midpoints(steps);
            let total: Vec<Vec3> = s.sample_midpoints(steps).iter().zip(&bg).map(|(x, y)| add3(x, y)).collect();
            let u1 = propagate_samples(control, &total, dt);
            let u2 = propagate_samples(control, &bg, dt);
            if !(u1.is_finite() && u2.is_finite()) {
                return Err(Error::NonFinite);
            }
            Ok((symmetric_power(&u1, n), symmetric_power(&u2, n)))
        }
        Stepper::Dense => {
            let ops = collective_ops(n);
            let generator = |field: Vec3| ops.along(add3(&control, &field).map(|x| 2.0 * x));
            let u1 = propagate_dense(|t| generator(add3(&s.evaluate(t), &b.evaluate(t))), period, steps)?;
            let u2 = propagate_dense(|t| generator(b.evaluate(t)), period, steps)?;
            Ok((u1.into_inner(), u2.into_inner()))
        }
    }
}

pub fn collective_propagate(
    s: &FourierField,
    b: &FourierField,
    omega0: f64,
    axis: ControlAxis,
    n: usize,
    steps: usize,
) -> Result<TwoRegisterState> {
    let (u1, u2) = collective_unitaries(s, b, omega0, axis, n, steps, Stepper::Lift)?;
    Ok(initial_entangled_state(n).apply(&u1, &u2))
}

/// Eigenspace projectors of `S_n⊗I + I⊗S_n`, labelled by the eigenvalue
/// `c = m + m′` (integer, `−N ≤ c ≤ N`).
///
/// Stored implicitly as the eigenbasis `V` of `S_n` (column `i` has
/// eigenvalue `S − i`); `Π(c)` is the sum of `|v_i⟩⟨v_i|⊗|v_j⟩⟨v_j|` over
/// `N − i − j = c`.
#[derive(Debug, Clone)]
pub struct OutcomeProjectorSet {
    axis: ControlAxis,
    n: usize,
    basis: CMatrix,
}

pub fn outcome_projectors(axis: ControlAxis, n: usize) -> OutcomeProjectorSet {
    assert!(n >= 1, "registers need at least one qubit");
    // Columns are the +1 and −1 eigenvectors of n⃗·σ⃗.
    let [plus, minus] = axis.measurement_basis();
    let (up, down) = if axis.sign() > 0.0 { (plus, minus) } else { (minus, plus) };
    let w = Mat2([[up[0], down[0]], [up[1], down[1]]]);
    OutcomeProjectorSet { axis, n, basis: symmetric_power(&w, n) }
}

impl OutcomeProjectorSet {
    pub fn axis(&self) -> ControlAxis {
        self.axis
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn outcomes(&self) -> Vec<i32> {
        let n = self.n as i32;
        (-n..=n).collect()
    }

    fn label(&self, i: usize, j: usize) -> i32 {
        self.n as i32 - i as i32 - j as i32
    }

    /// Amplitudes in the rotated product basis, `(V†⊗V†)|ψ⟩`.
    fn rotated(&self, state: &TwoRegisterState) -> CMatrix {
        let v_dag = self.basis.adjoint();
        &v_dag * state.as_matrix() * v_dag.transpose()
    }

    /// `⟨ψ|Π(c)|ψ⟩` for every `c`, ordered like [`Self::outcomes`].
    pub fn probabilities(&self, state: &TwoRegisterState) -> Vec<(i32, f64)> {
        let rotated = self.rotated(state);
        let d = self.n + 1;
        let mut probs = vec![0.0; 2 * self.n + 1];
        for i in 0..d {
            for j in 0..d {
                probs[(self.label(i, j) + self.n as i32) as usize] += rotated[(i, j)].norm_sqr();
            }
        }
        self.outcomes().into_iter().zip(probs).collect()
    }

    /// `Π(c)|ψ⟩`.
    pub fn apply(&self, c: i32, state: &TwoRegisterState) -> TwoRegisterState {
        let mut rotated = self.rotated(state);
        let d = self.n + 1;
        for i in 0..d {
            for j in 0..d {
                if self.label(i, j) != c {
                    rotated[(i, j)] = C64::new(0.0, 0.0);
                }
            }
        }
        let back = &self.basis * rotated * self.basis.transpose();
        TwoRegisterState::from_matrix(self.n, &back)
    }

    /// Dense `d²×d²` matrix of `Π(c)`; intended for small `N`.
    pub fn to_dense(&self, c: i32) -> CMatrix {
        let d = self.n + 1;
        let mut out = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                if self.label(i, j) != c {
                    continue;
                }
                let vi = self.basis.column(i);
                let vj = self.basis.column(j);
                for a in 0..d {
                    for b in 0..d {
                        let ket = vi[a] * vj[b];
                        for a2 in 0..d {
                            for b2 in 0..d {
                                out[(a * d + b, a2 * d + b2)] += ket * (vi[a2] * vj[b2]).conj();
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Probability of any outcome with `c ≠ 0` when measuring along `axis`.
pub fn detection_probability(state: &TwoRegisterState, axis: ControlAxis) -> f64 {
    outcome_projectors(axis, state.n())
        .probabilities(state)
        .into_iter()
        .filter(|&(c, _)| c != 0)
        .map(|(_, p)| p)
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollectiveResponse {
    pub n: usize,
    pub per_axis: Vec<(ControlAxis, f64)>,
    /// Axis-averaged detection probability `p(M)`.
    pub p_m: f64,
    /// Smallest `|⟨ψ₀|U1⊗U2|ψ₀⟩|` across axes.
    pub min_survival: f64,
}

/// `p(M)` averaged over `axes`, each axis propagated with its own control.
pub fn collective_response(
    s: &FourierField,
    b: &FourierField,
    omega0: f64,
    n: usize,
    steps: usize,
    axes: &[ControlAxis],
) -> Result<CollectiveResponse> {
    if axes.is_empty() {
        return Err(Error::InvalidArgument("at least one control axis is required".into()));
    }
    let psi0 = initial_entangled_state(n);
    let mut per_axis = Vec::with_capacity(axes.len());
    let mut min_survival = f64::INFINITY;
    for &axis in axes {
        let (u1, u2) = collective_unitaries(s, b, omega0, axis, n, steps, Stepper::Lift)?;
        let psi = psi0.apply(&u1, &u2);
        min_survival = min_survival.min(psi0.fidelity(&psi));
        per_axis.push((axis, detection_probability(&psi, axis)));
    }
    let p_m = per_axis.iter().map(|(_, p)| p).sum::<f64>() / per_axis.len() as f64;
    Ok(CollectiveResponse { n, per_axis, p_m, min_survival })
}

/// Classical Fisher information `(∂θ p)²/(p(1−p))` with a central finite
/// difference of width `dtheta`.
pub fn cfi<F>(p: F, theta: f64, dtheta: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(dtheta > 0.0) {
        return Err(Error::InvalidArgument(format!("dtheta must be positive, got {dtheta}")));
    }
    let derivative = (p(theta + dtheta) - p(theta - dtheta)) / (2.0 * dtheta);
    cfi_with_derivative(p(theta), derivative)
}

pub fn cfi_with_derivative(p: f64, derivative: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::UndefinedFisher(p));
    }
    Ok(derivative * derivative / (p * (1.0 - p)))
}
