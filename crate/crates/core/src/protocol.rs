//! The two-qubit sensor: Bell-state preparation, the Hamiltonian pair,
//! even-parity measurement along all six control orientations, exact and
//! first-order responses, and the remainder bounds.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{harmonic_index, FourierField, TrigKind, Vec3};
use crate::qdyn::frame::integrated_rotating_signal;
use crate::qdyn::pauli::{propagate_samples, Mat2, PauliCoeffs};

/// Amplitudes in the order `|00⟩, |01⟩, |10⟩, |11⟩`, qubit 1 first.
pub type TwoQubitState = [C64; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ControlAxis {
    #[serde(rename = "+x")]
    PlusX,
    #[serde(rename = "-x")]
    MinusX,
    #[serde(rename = "+y")]
    PlusY,
    #[serde(rename = "-y")]
    MinusY,
    #[serde(rename = "+z")]
    PlusZ,
    #[serde(rename = "-z")]
    MinusZ,
}

impl ControlAxis {
    pub const ALL: [ControlAxis; 6] = [
        ControlAxis::PlusX,
        ControlAxis::MinusX,
        ControlAxis::PlusY,
        ControlAxis::MinusY,
        ControlAxis::PlusZ,
        ControlAxis::MinusZ,
    ];

    /// Cartesian index: 0 for x, 1 for y, 2 for z.
    pub fn cartesian(self) -> usize {
        match self {
            ControlAxis::PlusX | ControlAxis::MinusX => 0,
            ControlAxis::PlusY | ControlAxis::MinusY => 1,
            ControlAxis::PlusZ | ControlAxis::MinusZ => 2,
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            ControlAxis::PlusX | ControlAxis::PlusY | ControlAxis::PlusZ => 1.0,
            _ => -1.0,
        }
    }

    pub fn vector(self) -> Vec3 {
        let mut v = [0.0; 3];
        v[self.cartesian()] = self.sign();
        v
    }

    pub fn label(self) -> &'static str {
        match self {
            ControlAxis::PlusX => "+x",
            ControlAxis::MinusX => "-x",
            ControlAxis::PlusY => "+y",
            ControlAxis::MinusY => "-y",
            ControlAxis::PlusZ => "+z",
            ControlAxis::MinusZ => "-z",
        }
    }

    /// Single-qubit measurement basis `[|+n⟩, |−n⟩]` for the Cartesian axis;
    /// both orientations share it.
    pub fn measurement_basis(self) -> [[C64; 2]; 2] {
        let h = C64::from(FRAC_1_SQRT_2);
        let i = C64::new(0.0, FRAC_1_SQRT_2);
        match self.cartesian() {
            0 => [[h, h], [h, -h]],
            1 => [[h, i], [h, -i]],
            _ => [[C64::from(1.0), C64::from(0.0)], [C64::from(0.0), C64::from(1.0)]],
        }
    }
}

impl fmt::Display for ControlAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for ControlAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ControlAxis::ALL
            .into_iter()
            .find(|a| a.label() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown control axis `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorConfig {
    pub omega0: f64,
    pub period: f64,
    pub steps: usize,
    pub axes: Vec<ControlAxis>,
}

impl SensorConfig {
    /// All six orientations, control at harmonic `k ≥ 1` of `2π/period`.
    pub fn new(harmonic: u32, period: f64, steps: usize) -> Result<Self> {
        let omega0 = 2.0 * std::f64::consts::PI * harmonic as f64 / period;
        Self { omega0, period, steps, axes: ControlAxis::ALL.to_vec() }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let k = harmonic_index(self.omega0, self.period)?;
        if k == 0 {
            return Err(Error::InvalidArgument("control frequency must be a positive harmonic".into()));
        }
        if self.steps == 0 {
            return Err(Error::InvalidArgument("steps must be at least 1".into()));
        }
        if self.axes.is_empty() {
            return Err(Error::InvalidArgument("at least one control axis is required".into()));
        }
        Ok(self)
    }

    pub fn harmonic(&self) -> u32 {
        harmonic_index(self.omega0, self.period).expect("validated config")
    }
}

pub fn bell_psi_minus() -> TwoQubitState {
    let h = FRAC_1_SQRT_2;
    [C64::from(0.0), C64::from(-h), C64::from(h), C64::from(0.0)]
}

/// `(U1 ⊗ U2)|ψ⟩`.
pub fn apply_product(u1: &Mat2, u2: &Mat2, psi: &TwoQubitState) -> TwoQubitState {
    let mut out = [C64::from(0.0); 4];
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = C64::from(0.0);
            for k in 0..2 {
                for l in 0..2 {
                    acc += u1.0[i][k] * u2.0[j][l] * psi[2 * k + l];
                }
            }
            out[2 * i + j] = acc;
        }
    }
    out
}

pub fn overlap(a: &TwoQubitState, b: &TwoQubitState) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn product_state(a: [C64; 2], b: [C64; 2]) -> TwoQubitState {
    [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
}

/// The two even-parity product states for the axis, e.g. `|++⟩, |−−⟩` for x.
pub fn even_parity_states(axis: ControlAxis) -> [TwoQubitState; 2] {
    let [plus, minus] = axis.measurement_basis();
    [product_state(plus, plus), product_state(minus, minus)]
}

/// Rank-1 projectors onto [`even_parity_states`], as row-major 4×4 arrays.
pub fn even_parity_projectors(axis: ControlAxis) -> [[[C64; 4]; 4]; 2] {
    even_parity_states(axis).map(|v| {
        let mut p = [[C64::from(0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                p[i][j] = v[i] * v[j].conj();
            }
        }
        p
    })
}

/// Probabilities of the four product outcomes along the axis, ordered
/// `(+,+), (+,−), (−,+), (−,−)`.
pub fn outcome_probabilities(psi: &TwoQubitState, axis: ControlAxis) -> [f64; 4] {
    let basis = axis.measurement_basis();
    let mut out = [0.0; 4];
    for a in 0..2 {
        for b in 0..2 {
            out[2 * a + b] = overlap(&product_state(basis[a], basis[b]), psi).norm_sqr();
        }
    }
    out
}

/// `H1(t) = (ω₀/2)n⃗·σ⃗ + (s⃗+b⃗)·σ⃗`, `H2(t) = (ω₀/2)n⃗·σ⃗ + b⃗·σ⃗`.
#[derive(Debug, Clone)]
pub struct HamiltonianPair<'a> {
    signal: &'a FourierField,
    background: &'a FourierField,
    control: Vec3,
}

impl<'a> HamiltonianPair<'a> {
    pub fn h1(&self, t: f64) -> PauliCoeffs {
        let s = self.signal.evaluate(t);
        let b = self.background.evaluate(t);
        PauliCoeffs::traceless([0, 1, 2].map(|i| self.control[i] + s[i] + b[i]))
    }

    pub fn h2(&self, t: f64) -> PauliCoeffs {
        let b = self.background.evaluate(t);
        PauliCoeffs::traceless([0, 1, 2].map(|i| self.control[i] + b[i]))
    }
}

fn check_periods(s: &FourierField, b: &FourierField) -> Result<()> {
    let (ts, tb) = (s.period(), b.period());
    if (ts - tb).abs() > 1e-12 * ts.max(tb) {
        return Err(Error::PeriodMismatch(ts, tb));
    }
    Ok(())
}

pub fn hamiltonian_pair<'a>(
    s: &'a FourierField,
    b: &'a FourierField,
    omega0: f64,
    axis: ControlAxis,
) -> Result<HamiltonianPair<'a>> {
    check_periods(s, b)?;
    let control = axis.vector().map(|x| 0.5 * omega0 * x);
    Ok(HamiltonianPair { signal: s, background: b, control })
}

/// Amplitude-level remainder bound on `‖U1⊗U2 − first-order truncation‖_∞`
/// from the integrated field strengths.
pub fn error_bound(i_s: f64, i_b: f64) -> f64 {
    let a = i_b + i_s;
    let b = i_b;
    a * a + b * b + a * b * b + a * a * b + a * b + a * a * b * b
}

/// Probability-level bound `2√p̄·r̃ + r̃²`.
pub fn probability_bound(p_bar: f64, amplitude_bound: f64) -> f64 {
    2.0 * p_bar.max(0.0).sqrt() * amplitude_bound + amplitude_bound * amplitude_bound
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstOrderResponse {
    /// `T²‖s⃗_{ω₀}‖²/12`.
    pub total: f64,
    /// Orientation-pair averages `p̄_x, p̄_y, p̄_z`.
    pub cartesian: [f64; 3],
    /// Single even-parity outcome probability per orientation, indexed like
    /// [`ControlAxis::ALL`].
    pub orientations: [f64; 6],
}

impl FirstOrderResponse {
    pub fn orientation(&self, axis: ControlAxis) -> f64 {
        self.orientations[ControlAxis::ALL.iter().position(|&a| a == axis).unwrap()]
    }
}

/// Closed-form first-order even-parity probabilities.
///
/// Orientation values are computed in the interaction picture of the lab-frame
/// propagator `e^{−iH₀T}U_I(T)`, whose generator is the signal conjugated by
/// `e^{+iω₀t n⃗·σ⃗/2}`. For control along `n⃗` the single-outcome probability is
/// `½‖v⃗ − (v⃗·n⃗)n⃗‖²` with `v⃗` the integrated generator.
pub fn first_order_response(s: &FourierField, omega0: f64) -> Result<FirstOrderResponse> {
    let period = s.period();
    let k0 = harmonic_index(omega0, period)?;
    if k0 == 0 {
        return Err(Error::InvalidArgument("control frequency must be a positive harmonic".into()));
    }
    let mut orientations = [0.0; 6];
    for (slot, axis) in orientations.iter_mut().zip(ControlAxis::ALL) {
        let n = axis.vector();
        let inverse = n.map(|x| -x);
        let v = integrated_rotating_signal(s, omega0, &inverse)?.vector();
        let along = v[axis.cartesian()];
        let perp2 = v.iter().map(|x| x * x).sum::<f64>() - along * along;
        *slot = 0.5 * perp2;
    }
    let cartesian = [0, 1, 2].map(|mu| 0.5 * (orientations[2 * mu] + orientations[2 * mu + 1]));
    let c = s.coefficient(k0, TrigKind::Cosine);
    let q = s.coefficient(k0, TrigKind::Sine);
    let weight: f64 = c.iter().chain(&q).map(|x| x * x).sum();
    Ok(FirstOrderResponse { total: period * period * weight / 12.0, cartesian, orientations })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisResponse {
    pub axis: ControlAxis,
    /// Product-basis outcome probabilities `(+,+), (+,−), (−,+), (−,−)`.
    pub outcomes: [f64; 4],
    /// The two even-parity outcome probabilities.
    pub even: [f64; 2],
    /// `|⟨Ψ₋|U1⊗U2|Ψ₋⟩|`.
    pub survival: f64,
    pub first_order: f64,
}

impl AxisResponse {
    pub fn even_mean(&self) -> f64 {
        0.5 * (self.even[0] + self.even[1])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseResult {
    pub per_axis: Vec<AxisResponse>,
    /// Axis average of the mean even-parity probability.
    pub response: f64,
    /// Axis average of the summed even-parity probability (`2·response`).
    pub summed_response: f64,
    pub first_order: f64,
    /// `response − first_order`.
    pub residual: f64,
    pub i_s: f64,
    pub i_b: f64,
    pub amplitude_bound: f64,
    pub probability_bound: f64,
}

impl ResponseResult {
    pub fn max_even_probability(&self) -> f64 {
        self.per_axis.iter().flat_map(|a| a.even).fold(0.0, f64::max)
    }

    pub fn min_survival(&self) -> f64 {
        self.per_axis.iter().map(|a| a.survival).fold(f64::INFINITY, f64::min)
    }
}

fn integrated_norm(samples: &[Vec3], dt: f64) -> f64 {
    samples.iter().map(crate::field::norm3).sum::<f64>() * dt
}

/// Exact response by time-ordered propagation of both qubits for every
/// configured orientation.
pub fn exact_response(s: &FourierField, b: &FourierField, config: &SensorConfig) -> Result<ResponseResult> {
    check_periods(s, b)?;
    if (s.period() - config.period).abs() > 1e-12 * config.period {
        return Err(Error::PeriodMismatch(s.period(), config.period));
    }
    let steps = config.steps;
    let dt = config.period / steps as f64;
    let bg = b.sample_midpoints(steps);
    let sig = s.sample_midpoints(steps);
    let total: Vec<Vec3> = sig.iter().zip(&bg).map(|(x, y)| [x[0] + y[0], x[1] + y[1], x[2] + y[2]]).collect();
    let first = first_order_response(s, config.omega0)?;
    let psi0 = bell_psi_minus();

    let mut per_axis = Vec::with_capacity(config.axes.len());
    for &axis in &config.axes {
        let control = axis.vector().map(|x| 0.5 * config.omega0 * x);
        let u1 = propagate_samples(control, &total, dt);
        let u2 = propagate_samples(control, &bg, dt);
        if !(u1.is_finite() && u2.is_finite()) {
            return Err(Error::NonFinite);
        }
        let psi = apply_product(&u1, &u2, &psi0);
        let outcomes = outcome_probabilities(&psi, axis);
        per_axis.push(AxisResponse {
            axis,
            outcomes,
            even: [outcomes[0], outcomes[3]],
            survival: overlap(&psi0, &psi).norm(),
            first_order: first.orientation(axis),
        });
    }
    let count = per_axis.len() as f64;
    let response = per_axis.iter().map(AxisResponse::even_mean).sum::<f64>() / count;
    let first_order = if config.axes.len() == 6 {
        first.total
    } else {
        per_axis.iter().map(|a| a.first_order).sum::<f64>() / count
    };
    let i_s = integrated_norm(&sig, dt);
    let i_b = integrated_norm(&bg, dt);
    let amplitude_bound = error_bound(i_s, i_b);
    Ok(ResponseResult {
        per_axis,
        response,
        summed_response: 2.0 * response,
        first_order,
        residual: response - first_order,
        i_s,
        i_b,
        amplitude_bound,
        probability_bound: probability_bound(first_order, amplitude_bound),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterResponse {
    pub p_exact: f64,
    pub p_model: f64,
}

/// Single qubit under `H(t) = ω₀σx/2 + f(t)σz` with `f` one Cartesian
/// component of `field`: exact `|⟨1|U(T)|0⟩|²` and the model `T²f_{s,ω₀}²/4`.
pub fn single_qubit_filter_response(
    field: &FourierField,
    component: usize,
    omega0: f64,
    steps: usize,
) -> Result<FilterResponse> {
    if component > 2 {
        return Err(Error::InvalidArgument(format!("component index {component} out of range")));
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    let period = field.period();
    let f_s = field.component_coefficient(component, omega0, TrigKind::Sine)?;
    let samples: Vec<Vec3> = field
        .sample_midpoints(steps)
        .into_iter()
        .map(|v| [0.0, 0.0, v[component]])
        .collect();
    let u = propagate_samples([0.5 * omega0, 0.0, 0.0], &samples, period / steps as f64);
    if !u.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(FilterResponse {
        p_exact: u.0[1][0].norm_sqr(),
        p_model: period * period * f_s * f_s / 4.0,
    })
}
