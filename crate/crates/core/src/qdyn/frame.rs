//! Rotating-frame signal and its closed-form first-order integral.

use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::field::{harmonic_index, FourierField, TrigKind, Vec3};
use crate::qdyn::pauli::{Mat2, PauliCoeffs};

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// `e^{−iθ n⃗·σ⃗/2}(v⃗·σ⃗)e^{+iθ n⃗·σ⃗/2}` as a Pauli vector:
/// `v cosθ + (n×v) sinθ + n(n·v)(1 − cosθ)`.
pub fn rotate_vector(v: &Vec3, n: &Vec3, theta: f64) -> Vec3 {
    let (s, c) = theta.sin_cos();
    let nxv = cross(n, v);
    let nv = dot(n, v);
    [
        v[0] * c + nxv[0] * s + n[0] * nv * (1.0 - c),
        v[1] * c + nxv[1] * s + n[1] * nv * (1.0 - c),
        v[2] * c + nxv[2] * s + n[2] * nv * (1.0 - c),
    ]
}

/// Signal `s⃗(t)·σ⃗` conjugated by the control rotation at angle `ω₀t`.
pub fn rotating_frame_signal(s: &FourierField, omega0: f64, n: &Vec3, t: f64) -> PauliCoeffs {
    PauliCoeffs::traceless(rotate_vector(&s.evaluate(t), n, omega0 * t))
}

/// `∫₀ᵀ` of [`rotating_frame_signal`], evaluated term by term from the
/// Fourier coefficients.
pub fn integrated_rotating_signal(s: &FourierField, omega0: f64, n: &Vec3) -> Result<PauliCoeffs> {
    let period = s.period();
    let k0 = harmonic_index(omega0, period)?;
    let mean = s.coefficient(0, TrigKind::Cosine).map(|c| c * period);
    let (against_cos, against_sin) = if k0 == 0 {
        (mean, [0.0; 3])
    } else {
        (
            s.coefficient(k0, TrigKind::Cosine).map(|c| 0.5 * period * c),
            s.coefficient(k0, TrigKind::Sine).map(|c| 0.5 * period * c),
        )
    };
    let nxs = cross(n, &against_sin);
    let along = dot(n, &mean) - dot(n, &against_cos);
    Ok(PauliCoeffs::traceless([
        against_cos[0] + nxs[0] + n[0] * along,
        against_cos[1] + nxs[1] + n[1] * along,
        against_cos[2] + nxs[2] + n[2] * along,
    ]))
}

/// First-order Dyson term `−i∫₀ᵀ 𝒮(τ)dτ` (anti-Hermitian, not unitary).
pub fn first_order_propagator(s: &FourierField, omega0: f64, n: &Vec3) -> Result<Mat2> {
    let integral = integrated_rotating_signal(s, omega0, n)?;
    Ok(integral.matrix().scale(C64::new(0.0, -1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{random_field, FourierTerm};
    use crate::qdyn::pauli::pauli_expm;
    use std::f64::consts::PI;

    #[test]
    fn at_time_zero_is_plain_signal() {
        let s = random_field(4, &[1, 2, 3], 1.0, 1.0).unwrap();
        let r = rotating_frame_signal(&s, 4.0 * PI, &[0.0, 1.0, 0.0], 0.0);
        let v = s.evaluate(0.0);
        assert_eq!(r.vector(), v);
    }

    #[test]
    fn parallel_component_invariant() {
        let s = FourierField::new(1.0, vec![FourierTerm::sine(3, [0.7, 0.0, 0.0])]).unwrap();
        for t in [0.0, 0.13, 0.5, 0.91] {
            let r = rotating_frame_signal(&s, 2.0 * PI, &[1.0, 0.0, 0.0], t).vector();
            let sx = s.evaluate(t)[0];
            assert!((r[0] - sx).abs() < 1e-15 && r[1].abs() < 1e-15 && r[2].abs() < 1e-15);
        }
    }

    #[test]
    fn matches_direct_conjugation() {
        let s = random_field(11, &[0, 1, 2, 5], 2.0, 1.0).unwrap();
        let omega0 = 6.0 * PI;
        for n in [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.6, 0.0, 0.8]] {
            for t in [0.07, 0.33, 0.81] {
                let rot = pauli_expm(PauliCoeffs::traceless(n.map(|x| 0.5 * x * omega0)), t);
                let direct = rot * PauliCoeffs::traceless(s.evaluate(t)).matrix() * rot.adjoint();
                let formula = rotating_frame_signal(&s, omega0, &n, t).matrix();
                assert!(direct.max_abs_diff(&formula) < 1e-12);
            }
        }
    }

    #[test]
    fn zero_signal_gives_zero_matrix() {
        let m = first_order_propagator(&FourierField::zero(1.0), 2.0 * PI, &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(m, Mat2::ZERO);
    }

    #[test]
    fn off_resonant_perpendicular_signal_vanishes() {
        let s = FourierField::new(
            1.0,
            vec![FourierTerm { harmonic: 2, sine: [0.0, 0.3, -0.2], cosine: [0.0, 0.1, 0.4] }],
        )
        .unwrap();
        let m = first_order_propagator(&s, 6.0 * PI, &[1.0, 0.0, 0.0]).unwrap();
        assert!(m.max_abs_diff(&Mat2::ZERO) < 1e-15);
    }

    #[test]
    fn y_sine_along_x_control() {
        // n = x̂, s = (0, A sin ω₀t, 0): ∫𝒮 = (T/2)(A σy cos-part 0, n×ŷ = ẑ) → (T/2)·A σz
        let a = 0.4;
        let s = FourierField::sinusoid(1.0, 1, [0.0, 1.0, 0.0], a).unwrap();
        let integral = integrated_rotating_signal(&s, 2.0 * PI, &[1.0, 0.0, 0.0]).unwrap();
        assert!((integral.az - 0.5 * a).abs() < 1e-15);
        assert!(integral.ax.abs() < 1e-15 && integral.ay.abs() < 1e-15);
    }
}
