//! State representations and the linear-algebra substrate.
//!
//! Two backends share one register layout:
//!
//! * [`DenseState`] is the explicit density matrix, limited to
//!   [`dense_qubit_limit`] qubits. It is the ground truth every structured
//!   result is checked against.
//! * [`EnsembleState`] keeps one tensor-product component per pointer value
//!   and scales to pointer registers far beyond the dense limit.
//!
//! [`DeviationState`] is the readout-friendly rewrite of an ensemble where
//! every ancilla is stored as its deviation from `I/2`.

mod dense;
mod deviation;
mod ensemble;
mod layout;
pub mod linalg;
mod mat2;

pub(crate) use dense::scatter_offsets;
pub use dense::{check_dense_capacity, dense_qubit_limit, DenseState, DEFAULT_DENSE_LIMIT, DENSE_LIMIT_ENV};
pub use deviation::{DeviationComponent, DeviationState, DeviationTag};
pub use ensemble::{Component, EnsembleState};
pub use layout::RegisterLayout;
pub use linalg::CMatrix;
pub use mat2::{Mat2, Pauli};

use crate::error::{QdacError, Result};
use crate::scalar::{xlog2x_neg, Real};

/// Common surface of both backends.
pub trait QuantumState<T: Real>: Clone {
    fn layout(&self) -> &RegisterLayout;
    fn densify(&self) -> Result<DenseState<T>>;
    /// Attaches an ancilla register in `|0…0⟩` matching the L register.
    fn attach_ancillas(&self) -> Result<Self>;
}

impl<T: Real> QuantumState<T> for DenseState<T> {
    fn layout(&self) -> &RegisterLayout {
        DenseState::layout(self)
    }
    fn densify(&self) -> Result<DenseState<T>> {
        Ok(self.clone())
    }
    fn attach_ancillas(&self) -> Result<Self> {
        DenseState::attach_ancillas(self)
    }
}

impl<T: Real> QuantumState<T> for EnsembleState<T> {
    fn layout(&self) -> &RegisterLayout {
        EnsembleState::layout(self)
    }
    fn densify(&self) -> Result<DenseState<T>> {
        EnsembleState::densify(self)
    }
    fn attach_ancillas(&self) -> Result<Self> {
        EnsembleState::attach_ancillas(self)
    }
}

/// Free-function form of [`EnsembleState::densify`].
pub fn densify<T: Real>(s: &EnsembleState<T>) -> Result<DenseState<T>> {
    s.densify()
}

pub fn partial_trace<T: Real>(s: &DenseState<T>, keep: &[usize]) -> Result<DenseState<T>> {
    s.partial_trace(keep)
}

/// Von Neumann entropy in bits, `-Σ λ log2 λ` over eigenvalues above the
/// scalar cutoff.
pub fn von_neumann_entropy<T: Real>(s: &DenseState<T>) -> Result<T> {
    let herm = linalg::hermiticity_error(s.matrix());
    if herm > T::herm_tol() {
        return Err(QdacError::InvariantViolation(format!(
            "entropy of a non-Hermitian matrix (error {herm})"
        )));
    }
    let ev = linalg::hermitian_eigenvalues(s.matrix());
    if let Some(&min) = ev.first() {
        if min < -T::psd_tol() {
            return Err(QdacError::InvariantViolation(format!(
                "entropy of a non-PSD matrix (min eigenvalue {min})"
            )));
        }
    }
    Ok(entropy_of_spectrum(&ev))
}

pub(crate) fn entropy_of_spectrum<T: Real>(ev: &[T]) -> T {
    ev.iter()
        .filter(|&&l| l > T::eig_cutoff())
        .map(|&l| xlog2x_neg(l))
        .sum()
}

/// Entropy of a Hermitian matrix known to be a density matrix.
pub(crate) fn matrix_entropy<T: Real>(m: &CMatrix<T>) -> T {
    entropy_of_spectrum(&linalg::hermitian_eigenvalues(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn entropy_reference_values() {
        let one = RegisterLayout::plain(1);
        let pure = DenseState::<f64>::product(one, &[Mat2::plus()]).unwrap();
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-12);
        let mixed = DenseState::<f64>::product(one, &[Mat2::maximally_mixed()]).unwrap();
        assert!((von_neumann_entropy(&mixed).unwrap() - 1.0).abs() < 1e-14);
        let avg = Mat2::plus().scale(0.5) + Mat2::projector(false).scale(0.5);
        let s = DenseState::<f64>::product(one, &[avg]).unwrap();
        assert!((von_neumann_entropy(&s).unwrap() - 0.600876).abs() < 1e-6);
    }

    #[test]
    fn entropy_rejects_negative_spectrum() {
        let m = ndarray::Array2::from_shape_fn((2, 2), |(i, j)| if i == j { c::<f64>(0.5, 0.0) } else { c(1.0, 0.0) });
        let s = DenseState::from_parts(RegisterLayout::plain(1), m);
        assert!(matches!(von_neumann_entropy(&s), Err(QdacError::InvariantViolation(_))));
    }
}
