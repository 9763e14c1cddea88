//! Collective spin operators on the symmetric (Dicke) subspace of `N` qubits
//! and the lift of single-qubit SU(2) propagators onto it.
//!
//! Basis ordering: index `i` holds `|S, m⟩` with `m = S − i`, so `Sz` is
//! `diag(S, S−1, …, −S)`.

use num_complex::Complex64 as C64;

use crate::qdyn::dense::CMatrix;
use crate::qdyn::pauli::Mat2;

#[derive(Debug, Clone)]
pub struct CollectiveSpinOps {
    pub n: usize,
    pub sx: CMatrix,
    pub sy: CMatrix,
    pub sz: CMatrix,
}

impl CollectiveSpinOps {
    pub fn dim(&self) -> usize {
        self.n + 1
    }

    pub fn spin(&self) -> f64 {
        self.n as f64 / 2.0
    }

    /// `n⃗·S⃗`.
    pub fn along(&self, n: [f64; 3]) -> CMatrix {
        &self.sx * C64::from(n[0]) + &self.sy * C64::from(n[1]) + &self.sz * C64::from(n[2])
    }
}

pub fn collective_ops(n: usize) -> CollectiveSpinOps {
    assert!(n >= 1, "collective spin needs at least one qubit");
    let d = n + 1;
    let s = n as f64 / 2.0;
    let mut sp = CMatrix::zeros(d, d);
    // S+ |m⟩ = √(S(S+1) − m(m+1)) |m+1⟩, and |m+1⟩ sits one index lower.
    for i in 1..d {
        let m = s - i as f64;
        sp[(i - 1, i)] = C64::from((s * (s + 1.0) - m * (m + 1.0)).sqrt());
    }
    let sm = sp.adjoint();
    let sx = (&sp + &sm) * C64::new(0.5, 0.0);
    let sy = (&sp - &sm) * C64::new(0.0, -0.5);
    let sz = CMatrix::from_fn(d, d, |i, j| if i == j { C64::from(s - i as f64) } else { C64::from(0.0) });
    CollectiveSpinOps { n, sx, sy, sz }
}

fn binomial_table(n: usize) -> Vec<Vec<f64>> {
    let mut c = vec![vec![0.0; n + 1]; n + 1];
    for i in 0..=n {
        c[i][0] = 1.0;
        for k in 1..=i {
            c[i][k] = c[i - 1][k - 1] + if k < i { c[i - 1][k] } else { 0.0 };
        }
    }
    c
}

fn powers(z: C64, n: usize) -> Vec<C64> {
    let mut p = Vec::with_capacity(n + 1);
    p.push(C64::new(1.0, 0.0));
    for k in 1..=n {
        p.push(p[k - 1] * z);
    }
    p
}

/// Action of `U^{⊗N}` on the symmetric subspace, as a `(N+1)×(N+1)` matrix.
///
/// For `U = exp(−i a⃗·σ⃗ t)` this equals `exp(−i 2a⃗·S⃗ t)`. `U` must be a 2×2
/// matrix; it is typically in SU(2), in which case the result is the spin-`N/2`
/// representation.
pub fn symmetric_power(u: &Mat2, n: usize) -> CMatrix {
    let [[a, b], [c, d]] = u.0;
    let binom = binomial_table(n);
    let (pa, pb, pc, pd) = (powers(a, n), powers(b, n), powers(c, n), powers(d, n));
    let dim = n + 1;
    let mut out = CMatrix::zeros(dim, dim);
    // Column j (count of up spins) maps x^j y^{n−j} through x → a x + c y,
    // y → b x + d y; row j' collects the x^{j'} y^{n−j'} coefficient.
    for j in 0..=n {
        for jp in 0..=n {
            let lo = jp.saturating_sub(n - j);
            let hi = j.min(jp);
            let mut acc = C64::new(0.0, 0.0);
            for k in lo..=hi {
                let w = binom[j][k] * binom[n - j][jp - k];
                acc += pa[k] * pc[j - k] * pb[jp - k] * pd[n - j + k - jp] * w;
            }
            let norm = (binom[n][j] / binom[n][jp]).sqrt();
            out[(n - jp, n - j)] = acc * norm;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qdyn::dense::{hermitian_expm, max_abs_diff, unitarity_defect, HermitianMatrix};
    use crate::qdyn::pauli::{pauli_expm, PauliCoeffs};

    fn comm(a: &CMatrix, b: &CMatrix) -> CMatrix {
        a * b - b * a
    }

    #[test]
    fn single_qubit_is_half_pauli() {
        let ops = collective_ops(1);
        let half = C64::new(0.5, 0.0);
        assert!(max_abs_diff(&ops.sx, &(CMatrix::from(Mat2::pauli_x()) * half)) < 1e-15);
        assert!(max_abs_diff(&ops.sy, &(CMatrix::from(Mat2::pauli_y()) * half)) < 1e-15);
        assert!(max_abs_diff(&ops.sz, &(CMatrix::from(Mat2::pauli_z()) * half)) < 1e-15);
    }

    #[test]
    fn two_qubit_sz() {
        let ops = collective_ops(2);
        let diag: Vec<f64> = (0..3).map(|i| ops.sz[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 0.0, -1.0]);
    }

    #[test]
    fn algebra_identities() {
        for n in [1, 2, 3, 4, 7, 16, 32] {
            let ops = collective_ops(n);
            let i = C64::new(0.0, 1.0);
            assert!(max_abs_diff(&comm(&ops.sx, &ops.sy), &(&ops.sz * i)) < 1e-10);
            assert!(max_abs_diff(&comm(&ops.sy, &ops.sz), &(&ops.sx * i)) < 1e-10);
            assert!(max_abs_diff(&comm(&ops.sz, &ops.sx), &(&ops.sy * i)) < 1e-10);
            let s = ops.spin();
            let casimir = &ops.sx * &ops.sx + &ops.sy * &ops.sy + &ops.sz * &ops.sz;
            let d = ops.dim();
            assert!(max_abs_diff(&casimir, &(CMatrix::identity(d, d) * C64::from(s * (s + 1.0)))) < 1e-10);
        }
        let ops = collective_ops(4);
        let i = C64::new(0.0, 1.0);
        assert!(max_abs_diff(&comm(&ops.sx, &ops.sy), &(&ops.sz * i)) < 1e-12);
    }

    #[test]
    fn lift_matches_dense_exponential() {
        let a = [0.31, -0.72, 0.45];
        let t = 1.9;
        let u = pauli_expm(PauliCoeffs::traceless(a), t);
        for n in [1, 2, 5, 12, 32] {
            let ops = collective_ops(n);
            let h = HermitianMatrix::new(ops.along(a.map(|x| 2.0 * x))).unwrap();
            let dense = hermitian_expm(&h, t);
            let lifted = symmetric_power(&u, n);
            assert!(max_abs_diff(&lifted, dense.as_matrix()) < 1e-10, "n = {n}");
            assert!(unitarity_defect(&lifted) < 1e-10);
        }
    }

    #[test]
    fn lift_is_multiplicative() {
        let u = pauli_expm(PauliCoeffs::traceless([0.2, 0.9, -0.4]), 0.8);
        let v = pauli_expm(PauliCoeffs::traceless([-1.1, 0.3, 0.6]), 0.5);
        for n in [3, 10] {
            let lhs = symmetric_power(&(u * v), n);
            let rhs = symmetric_power(&u, n) * symmetric_power(&v, n);
            assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
        }
    }
}
