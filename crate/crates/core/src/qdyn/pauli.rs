//! Closed-form 2×2 kernels: Pauli decompositions, exponentials and the
//! midpoint time-ordered product.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::field::Vec3;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// `a0·I + ax·σx + ay·σy + az·σz`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PauliCoeffs {
    pub a0: f64,
    pub ax: f64,
    pub ay: f64,
    pub az: f64,
}

impl PauliCoeffs {
    pub fn new(a0: f64, ax: f64, ay: f64, az: f64) -> Self {
        Self { a0, ax, ay, az }
    }

    pub fn traceless(v: Vec3) -> Self {
        Self { a0: 0.0, ax: v[0], ay: v[1], az: v[2] }
    }

    pub fn vector(&self) -> Vec3 {
        [self.ax, self.ay, self.az]
    }

    pub fn is_finite(&self) -> bool {
        self.a0.is_finite() && self.ax.is_finite() && self.ay.is_finite() && self.az.is_finite()
    }

    pub fn matrix(&self) -> Mat2 {
        Mat2([
            [C64::new(self.a0 + self.az, 0.0), C64::new(self.ax, -self.ay)],
            [C64::new(self.ax, self.ay), C64::new(self.a0 - self.az, 0.0)],
        ])
    }
}

impl Add for PauliCoeffs {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a0 + o.a0, self.ax + o.ax, self.ay + o.ay, self.az + o.az)
    }
}

/// Dense 2×2 complex matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);
    pub const ZERO: Mat2 = Mat2([[ZERO, ZERO], [ZERO, ZERO]]);

    pub fn pauli_x() -> Self {
        PauliCoeffs::new(0.0, 1.0, 0.0, 0.0).matrix()
    }

    pub fn pauli_y() -> Self {
        PauliCoeffs::new(0.0, 0.0, 1.0, 0.0).matrix()
    }

    pub fn pauli_z() -> Self {
        PauliCoeffs::new(0.0, 0.0, 0.0, 1.0).matrix()
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Mat2([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    pub fn scale(&self, z: C64) -> Self {
        Mat2(self.0.map(|row| row.map(|x| x * z)))
    }

    pub fn apply(&self, v: [C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        d
    }

    /// `‖U†U − I‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&Mat2::IDENTITY)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Spectral norm.
    pub fn operator_norm(&self) -> f64 {
        let g = self.adjoint() * *self;
        let tr = (g.0[0][0] + g.0[1][1]).re;
        let det = g.det().re;
        let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
        (0.5 * tr + disc).max(0.0).sqrt()
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    #[inline]
    fn mul(self, o: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &o.0;
        Mat2([
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ])
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] += o.0[i][j];
            }
        }
        out
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + o.scale(-ONE)
    }
}

/// `exp(−i (a0·I + a⃗·σ⃗) dt) = e^{−i a0 dt}(cos(|a⃗|dt)·I − i sin(|a⃗|dt)·â·σ⃗)`.
#[inline]
pub fn pauli_expm(h: PauliCoeffs, dt: f64) -> Mat2 {
    let norm = (h.ax * h.ax + h.ay * h.ay + h.az * h.az).sqrt();
    let theta = norm * dt;
    let (s, c) = theta.sin_cos();
    // sin(|a|dt)/|a|, with the |a| → 0 limit dt
    let k = if norm > 0.0 { s / norm } else { dt };
    let (x, y, z) = (h.ax * k, h.ay * k, h.az * k);
    let rot = Mat2([
        [C64::new(c, -z), C64::new(-y, -x)],
        [C64::new(y, -x), C64::new(c, z)],
    ]);
    if h.a0 == 0.0 {
        rot
    } else {
        rot.scale((-I * h.a0 * dt).exp())
    }
}

/// Midpoint-exponential product over precomputed field samples with a fixed
/// traceless offset: `U = Π_{k=steps..1} exp(−i (offset + samples[k])·σ⃗ Δt)`.
pub fn propagate_samples(offset: Vec3, samples: &[Vec3], dt: f64) -> Mat2 {
    let mut u = Mat2::IDENTITY;
    for s in samples {
        let h = PauliCoeffs::traceless([offset[0] + s[0], offset[1] + s[1], offset[2] + s[2]]);
        u = pauli_expm(h, dt) * u;
    }
    u
}

/// Time-ordered propagator of a 2×2 Hamiltonian `h(t)` over `[0, period]`
/// by the second-order midpoint exponential product.
pub fn propagate_timeordered<F>(h: F, period: f64, steps: usize) -> Result<Mat2>
where
    F: Fn(f64) -> PauliCoeffs,
{
    if steps == 0 {
        return Err(Error::InvalidArgument("propagation needs at least one step".into()));
    }
    let dt = period / steps as f64;
    let mut u = Mat2::IDENTITY;
    for k in 0..steps {
        let hk = h((k as f64 + 0.5) * dt);
        if !hk.is_finite() {
            return Err(Error::NonFinite);
        }
        u = pauli_expm(hk, dt) * u;
    }
    if !u.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(u)
}

/// Default resolution: `max(1024, 64·k_max)` where `k_max` is the largest
/// harmonic among control and field supports.
pub fn default_steps(max_harmonic: u32) -> usize {
    1024.max(64 * max_harmonic as usize)
}

/// Step count plus the optional step-halving convergence check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Integrator {
    pub steps: usize,
    #[serde(default)]
    pub richardson_check: bool,
}

impl Integrator {
    pub fn new(steps: usize) -> Self {
        Self { steps, richardson_check: false }
    }

    pub fn for_max_harmonic(max_harmonic: u32) -> Self {
        Self::new(default_steps(max_harmonic))
    }

    /// Propagates with `steps`; when the check is enabled also propagates with
    /// `2·steps` and fails if the results differ by more than 1e-8.
    pub fn propagate<F>(&self, h: F, period: f64) -> Result<Mat2>
    where
        F: Fn(f64) -> PauliCoeffs,
    {
        let u = propagate_timeordered(&h, period, self.steps)?;
        if self.richardson_check {
            let fine = propagate_timeordered(&h, period, 2 * self.steps)?;
            let diff = u.max_abs_diff(&fine);
            if diff > 1e-8 {
                return Err(Error::NotConverged(diff));
            }
        }
        Ok(u)
    }
}
