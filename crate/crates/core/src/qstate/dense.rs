use ndarray::Array2;
use num_traits::{One, Zero};

use super::layout::RegisterLayout;
use super::linalg::{self, CMatrix};
use super::mat2::Mat2;
use crate::error::{QdacError, Result};
use crate::scalar::{Real, C};

/// Default qubit ceiling for dense matrices.
pub const DEFAULT_DENSE_LIMIT: usize = 12;

/// Environment variable overriding [`DEFAULT_DENSE_LIMIT`].
pub const DENSE_LIMIT_ENV: &str = "QDAC_DENSE_LIMIT";

/// Current dense qubit limit (`QDAC_DENSE_LIMIT` or 12).
pub fn dense_qubit_limit() -> usize {
    std::env::var(DENSE_LIMIT_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_DENSE_LIMIT)
}

pub fn check_dense_capacity(what: &'static str, qubits: usize) -> Result<()> {
    let limit = dense_qubit_limit();
    if qubits > limit {
        Err(QdacError::Capacity { what, qubits, limit })
    } else {
        Ok(())
    }
}

/// Explicit `2^q x 2^q` density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState<T: Real> {
    layout: RegisterLayout,
    matrix: CMatrix<T>,
}

impl<T: Real> DenseState<T> {
    /// Wraps a matrix after checking shape, Hermiticity and unit trace.
    /// Positivity is only checked by [`DenseState::check_invariants`].
    pub fn new(layout: RegisterLayout, matrix: CMatrix<T>) -> Result<Self> {
        check_dense_capacity("dense state", layout.total())?;
        if matrix.dim() != (layout.dim(), layout.dim()) {
            return Err(QdacError::layout(format!(
                "matrix of shape {:?} does not match {} qubits",
                matrix.dim(),
                layout.total()
            )));
        }
        let s = Self { layout, matrix };
        let herm = linalg::hermiticity_error(&s.matrix);
        if herm > T::herm_tol() {
            return Err(QdacError::InvariantViolation(format!(
                "matrix is not Hermitian (error {herm})"
            )));
        }
        let tr = s.trace();
        if (tr - C::one()).norm() > T::herm_tol() {
            return Err(QdacError::InvariantViolation(format!("trace is {tr}, expected 1")));
        }
        Ok(s)
    }

    pub(crate) fn from_parts(layout: RegisterLayout, matrix: CMatrix<T>) -> Self {
        debug_assert_eq!(matrix.dim(), (layout.dim(), layout.dim()));
        Self { layout, matrix }
    }

    /// `|index⟩⟨index|`
    pub fn basis(layout: RegisterLayout, index: usize) -> Result<Self> {
        check_dense_capacity("dense state", layout.total())?;
        if index >= layout.dim() {
            return Err(QdacError::layout(format!("basis index {index} out of range")));
        }
        let mut m = Array2::zeros((layout.dim(), layout.dim()));
        m[(index, index)] = C::one();
        Ok(Self::from_parts(layout, m))
    }

    /// Projector onto a ket; the ket is normalized first.
    pub fn from_ket(layout: RegisterLayout, amplitudes: &[C<T>]) -> Result<Self> {
        check_dense_capacity("dense state", layout.total())?;
        if amplitudes.len() != layout.dim() {
            return Err(QdacError::layout("ket length does not match layout"));
        }
        let norm: T = amplitudes.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
        if norm == T::zero() {
            return Err(QdacError::domain("zero ket"));
        }
        let v: Vec<C<T>> = amplitudes.iter().map(|a| *a / norm).collect();
        let m = Array2::from_shape_fn((v.len(), v.len()), |(i, j)| v[i] * v[j].conj());
        Ok(Self::from_parts(layout, m))
    }

    /// Tensor product of single-qubit density matrices, one per position.
    pub fn product(layout: RegisterLayout, factors: &[Mat2<T>]) -> Result<Self> {
        check_dense_capacity("dense state", layout.total())?;
        if factors.len() != layout.total() {
            return Err(QdacError::layout("one factor per qubit required"));
        }
        let mut m = Array2::from_elem((1, 1), C::one());
        for f in factors {
            let f2 = Array2::from_shape_fn((2, 2), |(i, j)| f.m[i][j]);
            m = linalg::kron(&m, &f2);
        }
        Self::new(layout, m)
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C<T> {
        linalg::trace(&self.matrix)
    }

    pub fn max_abs_diff(&self, other: &DenseState<T>) -> T {
        linalg::max_abs_diff(&self.matrix, &other.matrix)
    }

    /// Same matrix under a different layout of equal size.
    pub fn relabel(&self, layout: RegisterLayout) -> Result<Self> {
        if layout.total() != self.layout.total() {
            return Err(QdacError::layout("relabel must keep the qubit count"));
        }
        Ok(Self::from_parts(layout, self.matrix.clone()))
    }

    /// Full Hermitian / unit-trace / PSD check.
    pub fn check_invariants(&self) -> Result<()> {
        let herm = linalg::hermiticity_error(&self.matrix);
        if herm > T::herm_tol() {
            return Err(QdacError::InvariantViolation(format!("not Hermitian (error {herm})")));
        }
        let tr = self.trace();
        if (tr - C::one()).norm() > T::herm_tol() {
            return Err(QdacError::InvariantViolation(format!("trace {tr} != 1")));
        }
        let min = self.min_eigenvalue();
        if min < -T::psd_tol() {
            return Err(QdacError::InvariantViolation(format!(
                "not positive semidefinite (min eigenvalue {min})"
            )));
        }
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> T {
        linalg::hermitian_eigenvalues(&self.matrix)
            .first()
            .copied()
            .unwrap_or_else(T::zero)
    }

    /// `ρ ⊗ |0…0⟩⟨0…0|` on a fresh ancilla register of width `n_l`.
    pub fn attach_ancillas(&self) -> Result<Self> {
        if self.layout.n_a != 0 {
            return Err(QdacError::layout("ancillas already attached"));
        }
        let layout = RegisterLayout::with_ancillas(self.layout.n_l, self.layout.n_r)?;
        check_dense_capacity("dense state with ancillas", layout.total())?;
        let shift = layout.n_a;
        let mut m = Array2::zeros((layout.dim(), layout.dim()));
        for ((i, j), x) in self.matrix.indexed_iter() {
            if !x.is_zero() {
                m[(i << shift, j << shift)] = *x;
            }
        }
        Ok(Self::from_parts(layout, m))
    }

    /// Standard partial trace; kept qubits stay in position order and the
    /// result carries a [`RegisterLayout::plain`] layout.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(QdacError::ScalarTrace);
        }
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        for &p in &kept {
            self.layout.check_position(p)?;
        }
        let traced: Vec<usize> = (0..self.layout.total()).filter(|p| !kept.contains(p)).collect();
        let keep_off = scatter_offsets(&self.layout, &kept);
        let trace_off = scatter_offsets(&self.layout, &traced);
        let dk = keep_off.len();
        let mut out = Array2::zeros((dk, dk));
        for i in 0..dk {
            for j in 0..dk {
                let mut acc = C::zero();
                for t in &trace_off {
                    acc = acc + self.matrix[(keep_off[i] | t, keep_off[j] | t)];
                }
                out[(i, j)] = acc;
            }
        }
        Ok(Self::from_parts(RegisterLayout::plain(kept.len()), out))
    }

    /// Controlled Hadamard conjugation. Blocks where both the row and the
    /// column satisfy the controls use the exact form `HBH`.
    pub(crate) fn apply_hadamard_in_place(&mut self, pos: usize, controls: &[(usize, bool)]) {
        let t = 1usize << self.layout.bit(pos);
        let (cmask, cval) = control_mask(&self.layout, controls);
        let h = Mat2::hadamard();
        let d = self.dim();
        for i in (0..d).filter(|i| i & t == 0) {
            let ci = i & cmask == cval;
            for j in (0..d).filter(|j| j & t == 0) {
                let cj = j & cmask == cval;
                if !ci && !cj {
                    continue;
                }
                let block = Mat2::new(
                    self.matrix[(i, j)],
                    self.matrix[(i, j | t)],
                    self.matrix[(i | t, j)],
                    self.matrix[(i | t, j | t)],
                );
                let out = match (ci, cj) {
                    (true, true) => block.hadamard_conjugate(),
                    (true, false) => h * block,
                    _ => block * h,
                };
                self.matrix[(i, j)] = out.m[0][0];
                self.matrix[(i, j | t)] = out.m[0][1];
                self.matrix[(i | t, j)] = out.m[1][0];
                self.matrix[(i | t, j | t)] = out.m[1][1];
            }
        }
    }

    /// Applies a single-qubit linear map to every 2x2 block addressed by
    /// `pos`.
    pub(crate) fn apply_local_map_in_place(&mut self, pos: usize, map: impl Fn(&Mat2<T>) -> Mat2<T>) {
        let t = 1usize << self.layout.bit(pos);
        let d = self.dim();
        for i in (0..d).filter(|i| i & t == 0) {
            for j in (0..d).filter(|j| j & t == 0) {
                let block = Mat2::new(
                    self.matrix[(i, j)],
                    self.matrix[(i, j | t)],
                    self.matrix[(i | t, j)],
                    self.matrix[(i | t, j | t)],
                );
                let out = map(&block);
                self.matrix[(i, j)] = out.m[0][0];
                self.matrix[(i, j | t)] = out.m[0][1];
                self.matrix[(i | t, j)] = out.m[1][0];
                self.matrix[(i | t, j | t)] = out.m[1][1];
            }
        }
    }

    /// `P ρ P^T` for the basis permutation `i ↦ perm(i)`.
    pub(crate) fn permute(&self, perm: impl Fn(usize) -> usize) -> Self {
        let d = self.dim();
        let map: Vec<usize> = (0..d).map(&perm).collect();
        let mut m = Array2::zeros((d, d));
        for ((i, j), x) in self.matrix.indexed_iter() {
            if !x.is_zero() {
                m[(map[i], map[j])] = *x;
            }
        }
        Self::from_parts(self.layout, m)
    }
}

fn control_mask(layout: &RegisterLayout, controls: &[(usize, bool)]) -> (usize, usize) {
    controls.iter().fold((0, 0), |(m, v), &(pos, bit)| {
        let b = 1usize << layout.bit(pos);
        (m | b, if bit { v | b } else { v })
    })
}

/// Basis-index offsets obtained by depositing every value of the listed
/// qubits (in order, first = most significant) into their bit positions.
pub(crate) fn scatter_offsets(layout: &RegisterLayout, positions: &[usize]) -> Vec<usize> {
    let w = positions.len();
    (0..(1usize << w))
        .map(|v| {
            positions.iter().enumerate().fold(0usize, |acc, (idx, &p)| {
                let bit = (v >> (w - 1 - idx)) & 1;
                acc | (bit << layout.bit(p))
            })
        })
        .collect()
}
