//! Vector-valued periodic classical fields in the real Fourier basis.
//!
//! A [`FourierField`] is a finite sum
//! `f(t) = Σ_k sine_k·sin(ω_k t) + cosine_k·cos(ω_k t)` with `ω_k = 2πk/T`.
//! Frequencies are stored as integer harmonic indices so that periodicity
//! over `T` is exact and serialization never drifts.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

/// Relative tolerance used when mapping an angular frequency onto a harmonic.
const HARMONIC_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrigKind {
    Sine,
    Cosine,
}

/// Maps `omega` to its harmonic index `k` with `omega = 2πk/period`.
pub fn harmonic_index(omega: f64, period: f64) -> Result<u32> {
    let k = omega * period / (2.0 * PI);
    let rounded = k.round();
    if !k.is_finite() || rounded < 0.0 || (k - rounded).abs() > HARMONIC_TOL * rounded.max(1.0) {
        return Err(Error::Incommensurate { omega, period });
    }
    Ok(rounded as u32)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierTerm {
    pub harmonic: u32,
    pub sine: Vec3,
    pub cosine: Vec3,
}

impl FourierTerm {
    pub fn sine(harmonic: u32, sine: Vec3) -> Self {
        Self { harmonic, sine, cosine: [0.0; 3] }
    }

    pub fn cosine(harmonic: u32, cosine: Vec3) -> Self {
        Self { harmonic, sine: [0.0; 3], cosine }
    }

    fn coefficient(&self, kind: TrigKind) -> Vec3 {
        match kind {
            TrigKind::Sine => self.sine,
            TrigKind::Cosine => self.cosine,
        }
    }
}

/// A periodic 3-vector field, terms kept sorted by harmonic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldDef", into = "FieldDef")]
pub struct FourierField {
    period: f64,
    terms: Vec<FourierTerm>,
}

impl FourierField {
    pub fn new(period: f64, mut terms: Vec<FourierTerm>) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidField(format!("period must be positive, got {period}")));
        }
        terms.sort_by_key(|t| t.harmonic);
        for pair in terms.windows(2) {
            if pair[0].harmonic == pair[1].harmonic {
                return Err(Error::InvalidField(format!(
                    "duplicate harmonic {}",
                    pair[0].harmonic
                )));
            }
        }
        for term in &terms {
            if term.sine.iter().chain(&term.cosine).any(|c| !c.is_finite()) {
                return Err(Error::InvalidField(format!(
                    "non-finite coefficient at harmonic {}",
                    term.harmonic
                )));
            }
            if term.harmonic == 0 && term.sine.iter().any(|&c| c != 0.0) {
                return Err(Error::InvalidField(
                    "sine coefficient at zero frequency is meaningless".into(),
                ));
            }
        }
        Ok(Self { period, terms })
    }

    pub fn zero(period: f64) -> Self {
        Self::new(period, Vec::new()).expect("zero field with invalid period")
    }

    /// `amplitude · direction · sin(2πk t / T)`.
    pub fn sinusoid(period: f64, harmonic: u32, direction: Vec3, amplitude: f64) -> Result<Self> {
        let sine = direction.map(|d| d * amplitude);
        Self::new(period, vec![FourierTerm::sine(harmonic, sine)])
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn terms(&self) -> &[FourierTerm] {
        &self.terms
    }

    pub fn base_omega(&self) -> f64 {
        2.0 * PI / self.period
    }

    pub fn omega(&self, harmonic: u32) -> f64 {
        harmonic as f64 * self.base_omega()
    }

    pub fn max_harmonic(&self) -> u32 {
        self.terms.iter().map(|t| t.harmonic).max().unwrap_or(0)
    }

    pub fn support(&self) -> Vec<u32> {
        self.terms.iter().map(|t| t.harmonic).collect()
    }

    pub fn term(&self, harmonic: u32) -> Option<&FourierTerm> {
        self.terms
            .binary_search_by_key(&harmonic, |t| t.harmonic)
            .ok()
            .map(|i| &self.terms[i])
    }

    pub fn evaluate(&self, t: f64) -> Vec3 {
        let w = self.base_omega();
        let mut out = [0.0; 3];
        for term in &self.terms {
            let (s, c) = (term.harmonic as f64 * w * t).sin_cos();
            for (o, (a, b)) in out.iter_mut().zip(term.sine.iter().zip(&term.cosine)) {
                *o += a * s + b * c;
            }
        }
        out
    }

    /// Field values at the midpoints `(j + ½)·T/steps`, `j = 0..steps`.
    pub fn sample_midpoints(&self, steps: usize) -> Vec<Vec3> {
        let dt = self.period / steps as f64;
        (0..steps).map(|j| self.evaluate((j as f64 + 0.5) * dt)).collect()
    }

    /// Exact coefficient lookup by orthogonality. The cosine coefficient at
    /// harmonic 0 is the constant offset.
    pub fn coefficient(&self, harmonic: u32, kind: TrigKind) -> Vec3 {
        self.term(harmonic).map(|t| t.coefficient(kind)).unwrap_or([0.0; 3])
    }

    /// Coefficient of one Cartesian component at angular frequency `omega`.
    pub fn component_coefficient(&self, axis: usize, omega: f64, kind: TrigKind) -> Result<f64> {
        let k = harmonic_index(omega, self.period)?;
        Ok(self.coefficient(k, kind)[axis])
    }

    /// Euclidean norm of the stacked coefficient vector.
    pub fn coefficient_norm(&self) -> f64 {
        self.terms
            .iter()
            .flat_map(|t| t.sine.iter().chain(&t.cosine))
            .map(|c| c * c)
            .sum::<f64>()
            .sqrt()
    }

    /// Root-mean-square function norm `sqrt((1/T)∫‖f(t)‖² dt)`.
    pub fn rms_norm(&self) -> f64 {
        let sq: f64 = self
            .terms
            .iter()
            .map(|t| {
                let c2: f64 = t.cosine.iter().map(|c| c * c).sum();
                let s2: f64 = t.sine.iter().map(|c| c * c).sum();
                if t.harmonic == 0 {
                    c2
                } else {
                    0.5 * (c2 + s2)
                }
            })
            .sum();
        sq.sqrt()
    }

    /// Squared norm of the Fourier weight at one harmonic, `‖sine‖² + ‖cosine‖²`.
    pub fn weight_at(&self, harmonic: u32) -> f64 {
        self.term(harmonic)
            .map(|t| t.sine.iter().chain(&t.cosine).map(|c| c * c).sum())
            .unwrap_or(0.0)
    }

    /// `∫₀ᵀ ‖f(t)‖₂ dt` by composite midpoint quadrature.
    pub fn integrated_strength(&self, steps: usize) -> f64 {
        let dt = self.period / steps as f64;
        self.sample_midpoints(steps).iter().map(norm3).sum::<f64>() * dt
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| FourierTerm {
                harmonic: t.harmonic,
                sine: t.sine.map(|c| c * factor),
                cosine: t.cosine.map(|c| c * factor),
            })
            .collect();
        Self { period: self.period, terms }
    }

    /// Copy with only the coefficients at `harmonic` multiplied by `factor`.
    pub fn with_harmonic_scaled(&self, harmonic: u32, factor: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                if t.harmonic == harmonic {
                    FourierTerm {
                        harmonic,
                        sine: t.sine.map(|c| c * factor),
                        cosine: t.cosine.map(|c| c * factor),
                    }
                } else {
                    *t
                }
            })
            .collect();
        Self { period: self.period, terms }
    }

    /// Projects uniformly spaced samples `f(jT/M)`, `j = 0..M`, onto harmonics
    /// `0..=max_harmonic`. Exact for trigonometric polynomials when
    /// `M > 2·max_harmonic`.
    pub fn from_samples(period: f64, samples: &[Vec3], max_harmonic: u32) -> Result<Self> {
        let m = samples.len();
        if m <= 2 * max_harmonic as usize {
            return Err(Error::InvalidField(format!(
                "{m} samples cannot resolve harmonic {max_harmonic}"
            )));
        }
        let mut terms = Vec::with_capacity(max_harmonic as usize + 1);
        for k in 0..=max_harmonic {
            let mut sine = [0.0; 3];
            let mut cosine = [0.0; 3];
            for (j, v) in samples.iter().enumerate() {
                let phase = 2.0 * PI * (k as u64 * j as u64 % m as u64) as f64 / m as f64;
                let (s, c) = phase.sin_cos();
                for i in 0..3 {
                    sine[i] += v[i] * s;
                    cosine[i] += v[i] * c;
                }
            }
            let scale = if k == 0 || 2 * k as usize == m { 1.0 } else { 2.0 } / m as f64;
            let sine = if k == 0 { [0.0; 3] } else { sine.map(|c| c * scale) };
            terms.push(FourierTerm { harmonic: k, sine, cosine: cosine.map(|c| c * scale) });
        }
        Self::new(period, terms)
    }
}

pub fn norm3(v: &Vec3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// `(2/T)∫₀ᵀ f(t)·trig(ωt) dt` by composite midpoint quadrature with `steps`
/// cells. At `ω = 0` the cosine coefficient is the mean `(1/T)∫f`, matching
/// how [`FourierField`] stores constant offsets.
pub fn fourier_coefficient<F>(f: F, omega: f64, kind: TrigKind, period: f64, steps: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let k = harmonic_index(omega, period)?;
    if steps == 0 {
        return Err(Error::InvalidArgument("quadrature needs at least one step".into()));
    }
    let dt = period / steps as f64;
    let w = 2.0 * PI * k as f64 / period;
    let sum: f64 = (0..steps)
        .map(|j| {
            let t = (j as f64 + 0.5) * dt;
            let trig = match kind {
                TrigKind::Sine => (w * t).sin(),
                TrigKind::Cosine => (w * t).cos(),
            };
            f(t) * trig
        })
        .sum();
    let norm = if k == 0 { 1.0 } else { 2.0 };
    Ok(norm * sum * dt / period)
}

/// Random field on `support` with all coefficients i.i.d. standard normal,
/// rescaled so the stacked coefficient norm equals `epsilon`.
///
/// Each harmonic draws from its own ChaCha stream keyed by the harmonic
/// index, so the result does not depend on the order of `support`.
pub fn random_field(seed: u64, support: &[u32], epsilon: f64, period: f64) -> Result<FourierField> {
    if !(epsilon >= 0.0) {
        return Err(Error::NegativeEpsilon(epsilon));
    }
    if support.is_empty() {
        return Err(Error::InvalidField("random field needs a non-empty support".into()));
    }
    let mut terms = Vec::with_capacity(support.len());
    for &k in support {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
        let cosine = [draw(), draw(), draw()];
        let sine = if k == 0 { [0.0; 3] } else { [draw(), draw(), draw()] };
        terms.push(FourierTerm { harmonic: k, sine, cosine });
    }
    let raw = FourierField::new(period, terms)?;
    let norm = raw.coefficient_norm();
    if epsilon == 0.0 || norm == 0.0 {
        return Ok(raw.scaled(0.0));
    }
    Ok(raw.scaled(epsilon / norm))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDef {
    harmonic: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    omega: Option<f64>,
    #[serde(default)]
    sine: Vec3,
    #[serde(default)]
    cosine: Vec3,
}

/// Wire format: `{period, base_omega, terms: [{harmonic, omega, sine, cosine}]}`.
/// `harmonic` is authoritative; `omega` and `base_omega` are informational
/// and checked for consistency when present.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldDef {
    period: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    base_omega: Option<f64>,
    #[serde(default)]
    terms: Vec<TermDef>,
}

impl TryFrom<FieldDef> for FourierField {
    type Error = Error;

    fn try_from(def: FieldDef) -> Result<Self> {
        let base = 2.0 * PI / def.period;
        if let Some(b) = def.base_omega {
            if (b - base).abs() > HARMONIC_TOL * base.abs().max(1.0) {
                return Err(Error::InvalidField(format!(
                    "base_omega {b} inconsistent with period {}",
                    def.period
                )));
            }
        }
        let mut terms = Vec::with_capacity(def.terms.len());
        for t in def.terms {
            if let Some(w) = t.omega {
                if harmonic_index(w, def.period)? != t.harmonic {
                    return Err(Error::InvalidField(format!(
                        "omega {w} does not match harmonic {}",
                        t.harmonic
                    )));
                }
            }
            terms.push(FourierTerm { harmonic: t.harmonic, sine: t.sine, cosine: t.cosine });
        }
        FourierField::new(def.period, terms)
    }
}

impl From<FourierField> for FieldDef {
    fn from(f: FourierField) -> Self {
        let base = f.base_omega();
        FieldDef {
            period: f.period,
            base_omega: Some(base),
            terms: f
                .terms
                .iter()
                .map(|t| TermDef {
                    harmonic: t.harmonic,
                    omega: Some(t.harmonic as f64 * base),
                    sine: t.sine,
                    cosine: t.cosine,
                })
                .collect(),
        }
    }
}
