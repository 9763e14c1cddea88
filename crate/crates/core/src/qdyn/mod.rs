//! Numerical linear algebra and time-ordered propagation.
//!
//! Two-level dynamics run on the closed-form [`Mat2`] kernel. Collective
//! dynamics either lift a 2×2 propagator onto the Dicke subspace with
//! [`symmetric_power`] or step a dense generator with [`propagate_dense`].

pub mod dense;
pub mod frame;
pub mod pauli;
pub mod spin;

pub use dense::{hermitian_expm, propagate_dense, CMatrix, HermitianMatrix, UnitaryMatrix};
pub use frame::{first_order_propagator, integrated_rotating_signal, rotate_vector, rotating_frame_signal};
pub use pauli::{default_steps, pauli_expm, propagate_samples, propagate_timeordered, Integrator, Mat2, PauliCoeffs};
pub use spin::{collective_ops, symmetric_power, CollectiveSpinOps};
