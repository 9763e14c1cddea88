//! Dense Hermitian/unitary matrices and the eigendecomposition step kernel.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::qdyn::pauli::Mat2;

pub type CMatrix = DMatrix<C64>;

const HERMITIAN_TOL: f64 = 1e-12;
const UNITARY_TOL: f64 = 1e-10;

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `‖U†U − I‖_max`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    max_abs_diff(&(u.adjoint() * u), &CMatrix::identity(n, n))
}

impl From<Mat2> for CMatrix {
    fn from(m: Mat2) -> Self {
        CMatrix::from_fn(2, 2, |i, j| m.0[i][j])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidArgument(format!(
                "Hermitian matrix must be square, got {}×{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite);
        }
        let dev = max_abs_diff(&m, &m.adjoint());
        let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if dev > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(CMatrix);

impl UnitaryMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidArgument("unitary matrix must be square".into()));
        }
        if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite);
        }
        let defect = unitarity_defect(&m);
        if defect > UNITARY_TOL {
            return Err(Error::InvalidArgument(format!("matrix is not unitary (defect {defect:e})")));
        }
        Ok(Self(m))
    }

    pub fn identity(d: usize) -> Self {
        Self(CMatrix::identity(d, d))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.0)
    }
}

/// `exp(−i H dt) = V·diag(e^{−iλ_j dt})·V†`.
pub fn hermitian_expm(h: &HermitianMatrix, dt: f64) -> UnitaryMatrix {
    let eig = SymmetricEigen::new(h.0.clone());
    let v = &eig.eigenvectors;
    let phases = eig.eigenvalues.map(|l| C64::new(0.0, -l * dt).exp());
    let mut scaled = v.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    UnitaryMatrix(scaled * v.adjoint())
}

/// Midpoint product `Π_{k=steps..1} exp(−i H(t_{k−½}) Δt)` for dense
/// generators. Each sample is validated as Hermitian.
pub fn propagate_dense<F>(h: F, period: f64, steps: usize) -> Result<UnitaryMatrix>
where
    F: Fn(f64) -> CMatrix,
{
    if steps == 0 {
        return Err(Error::InvalidArgument("propagation needs at least one step".into()));
    }
    let dt = period / steps as f64;
    let mut u: Option<CMatrix> = None;
    for k in 0..steps {
        let hk = HermitianMatrix::new(h((k as f64 + 0.5) * dt))?;
        let step = hermitian_expm(&hk, dt).0;
        u = Some(match u {
            None => step,
            Some(prev) => step * prev,
        });
    }
    let u = u.expect("at least one step");
    if u.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite);
    }
    Ok(UnitaryMatrix(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qdyn::pauli::{pauli_expm, PauliCoeffs};
    use crate::qdyn::spin::collective_ops;
    use std::f64::consts::PI;

    #[test]
    fn zero_generator() {
        let h = HermitianMatrix::new(CMatrix::zeros(3, 3)).unwrap();
        let u = hermitian_expm(&h, 2.0);
        assert!(max_abs_diff(u.as_matrix(), &CMatrix::identity(3, 3)) < 1e-15);
    }

    #[test]
    fn agrees_with_closed_form_pauli() {
        for &(a0, ax, ay, az) in &[(0.0, 0.3, -1.2, 0.5), (0.7, 0.0, 0.0, 2.0), (-0.2, 1.0, 1.0, 1.0)] {
            let p = PauliCoeffs::new(a0, ax, ay, az);
            let h = HermitianMatrix::new(p.matrix().into()).unwrap();
            let dense = hermitian_expm(&h, 0.37);
            let closed: CMatrix = pauli_expm(p, 0.37).into();
            assert!(max_abs_diff(dense.as_matrix(), &closed) < 1e-12);
        }
    }

    #[test]
    fn diagonal_spin_generator() {
        let ops = collective_ops(2);
        let h = HermitianMatrix::new(ops.sz.clone()).unwrap();
        let u = hermitian_expm(&h, PI);
        let expected = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(0.0, -PI).exp(),
            C64::new(1.0, 0.0),
            C64::new(0.0, PI).exp(),
        ]));
        assert!(max_abs_diff(u.as_matrix(), &expected) < 1e-12);
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(HermitianMatrix::new(m.clone()), Err(Error::NotHermitian(_))));
        assert!(matches!(propagate_dense(|_| m.clone(), 1.0, 4), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn unitary_constructor_checks() {
        assert!(UnitaryMatrix::new(CMatrix::identity(4, 4)).is_ok());
        assert!(UnitaryMatrix::new(CMatrix::identity(4, 4) * C64::new(1.1, 0.0)).is_err());
    }

    #[test]
    fn random_hermitian_exponentials_are_unitary() {
        let d = 9;
        let mut seed = 12345u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let a = CMatrix::from_fn(d, d, |_, _| C64::new(next(), next()));
        let h = HermitianMatrix::new((&a + a.adjoint()) * C64::new(3.0, 0.0)).unwrap();
        let u = hermitian_expm(&h, 1.3);
        assert!(u.unitarity_defect() < 1e-12);
    }
}
