use std::ops::{Add, Mul};

use num_traits::{One, Zero};

use crate::scalar::{re, Real, C};

/// Single-qubit operator, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2<T> {
    pub m: [[C<T>; 2]; 2],
}

/// Pauli observables used by the readout routines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl<T: Real> Mat2<T> {
    pub fn new(a: C<T>, b: C<T>, c: C<T>, d: C<T>) -> Self {
        Self { m: [[a, b], [c, d]] }
    }

    pub fn real(a: T, b: T, c: T, d: T) -> Self {
        Self::new(re(a), re(b), re(c), re(d))
    }

    pub fn zero() -> Self {
        Self::real(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn identity() -> Self {
        Self::real(T::one(), T::zero(), T::zero(), T::one())
    }

    /// `I/2`
    pub fn maximally_mixed() -> Self {
        Self::identity().scale(T::lit(0.5))
    }

    /// `|b⟩⟨b|`
    pub fn projector(bit: bool) -> Self {
        if bit {
            Self::real(T::zero(), T::zero(), T::zero(), T::one())
        } else {
            Self::real(T::one(), T::zero(), T::zero(), T::zero())
        }
    }

    /// `|+⟩⟨+|`
    pub fn plus() -> Self {
        let h = T::lit(0.5);
        Self::real(h, h, h, h)
    }

    /// Projector onto `|v⟩` for a (not necessarily normalized) ket.
    pub fn ket_projector(v0: C<T>, v1: C<T>) -> Self {
        Self::new(v0 * v0.conj(), v0 * v1.conj(), v1 * v0.conj(), v1 * v1.conj())
    }

    pub fn hadamard() -> Self {
        let s = T::FRAC_1_SQRT_2();
        Self::real(s, s, s, -s)
    }

    pub fn pauli(p: Pauli) -> Self {
        let z = T::zero();
        let o = T::one();
        match p {
            Pauli::X => Self::real(z, o, o, z),
            Pauli::Y => Self::new(re(z), C::new(z, -o), C::new(z, o), re(z)),
            Pauli::Z => Self::real(o, z, z, -o),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = *self;
        for row in out.m.iter_mut() {
            for x in row.iter_mut() {
                *x = *x * s;
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn trace(&self) -> C<T> {
        self.m[0][0] + self.m[1][1]
    }

    /// `U ρ U†`
    pub fn conjugate_by(&self, u: &Mat2<T>) -> Self {
        *u * *self * u.adjoint()
    }

    /// `H ρ H` without the `1/√2` rounding: dyadic entries stay exact.
    pub fn hadamard_conjugate(&self) -> Self {
        let [[a, b], [c, d]] = self.m;
        let h = T::lit(0.5);
        Self::new(
            (a + b + c + d) * h,
            (a - b + c - d) * h,
            (a + b - c - d) * h,
            (a - b - c + d) * h,
        )
    }

    /// `Tr(self · other)`
    pub fn trace_product(&self, other: &Mat2<T>) -> C<T> {
        let (a, b) = (&self.m, &other.m);
        a[0][0] * b[0][0] + a[0][1] * b[1][0] + a[1][0] * b[0][1] + a[1][1] * b[1][1]
    }

    pub fn max_abs_diff(&self, other: &Mat2<T>) -> T {
        let mut d = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.m[i][j] - other.m[i][j]).norm());
            }
        }
        d
    }

    pub fn hermiticity_error(&self) -> T {
        self.max_abs_diff(&self.adjoint())
    }

    /// Smallest eigenvalue of the Hermitian part (closed form).
    pub fn min_eigenvalue(&self) -> T {
        let a = self.m[0][0].re;
        let d = self.m[1][1].re;
        let b = self.m[0][1];
        let mean = (a + d) * T::lit(0.5);
        let half = (a - d) * T::lit(0.5);
        mean - (half * half + b.norm_sqr()).sqrt()
    }

    /// Whether the matrix is a density matrix within the scalar tolerances.
    pub fn is_density(&self) -> bool {
        self.hermiticity_error() <= T::herm_tol()
            && (self.trace() - C::one()).norm() <= T::herm_tol()
            && self.min_eigenvalue() >= -T::psd_tol()
    }

    /// `Some(b)` when the matrix is the computational projector `|b⟩⟨b|`.
    pub fn basis_bit(&self) -> Option<bool> {
        let tol2 = T::herm_tol() * T::herm_tol();
        let [[a, b], [c, d]] = self.m;
        if b.norm_sqr() > tol2 || c.norm_sqr() > tol2 {
            return None;
        }
        let near = |z: C<T>, x: T| (z - C::new(x, T::zero())).norm_sqr() <= tol2;
        if near(a, T::one()) && near(d, T::zero()) {
            Some(false)
        } else if near(a, T::zero()) && near(d, T::one()) {
            Some(true)
        } else {
            None
        }
    }

    pub fn is_diagonal(&self) -> bool {
        self.m[0][1].norm() <= T::herm_tol() && self.m[1][0].norm() <= T::herm_tol()
    }

    pub fn entry(&self, i: usize, j: usize) -> C<T> {
        self.m[i][j]
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Mat2<T>;
    fn mul(self, rhs: Mat2<T>) -> Mat2<T> {
        let (a, b) = (&self.m, &rhs.m);
        let mut out = [[C::zero(); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2 { m: out }
    }
}

impl<T: Real> Add for Mat2<T> {
    type Output = Mat2<T>;
    fn add(self, rhs: Mat2<T>) -> Mat2<T> {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.m[i][j] = out.m[i][j] + rhs.m[i][j];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hadamard_maps_z_to_x() {
        let h = Mat2::<f64>::hadamard();
        let x = Mat2::pauli(Pauli::X);
        let z = Mat2::pauli(Pauli::Z);
        assert!(x.conjugate_by(&h).max_abs_diff(&z) < 1e-15);
        assert!((h * h).max_abs_diff(&Mat2::identity()) < 1e-15);
    }

    #[test]
    fn plus_projector_eigenvalues() {
        let p = Mat2::<f64>::plus();
        assert!(p.min_eigenvalue().abs() < 1e-15);
        assert!(p.is_density());
        assert_eq!(p.basis_bit(), None);
        assert_eq!(Mat2::<f64>::projector(true).basis_bit(), Some(true));
    }
}
