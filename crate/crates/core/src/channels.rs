//! Single-qubit decoherence channels in Kraus form.

use ndarray::Array2;
use num_traits::One;
use serde::Serialize;

use crate::error::{QdacError, Result};
use crate::qstate::{linalg, DenseState, EnsembleState, Mat2, Pauli};
use crate::scalar::{Real, C};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ChannelKind {
    Depolarize,
    Dephase,
    /// Hand-built Kraus set, not necessarily CPTP.
    Custom,
}

/// A single-qubit channel `ρ ↦ Σ K ρ K†`.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel<T: Real> {
    pub kind: ChannelKind,
    pub p: T,
    pub kraus: Vec<Mat2<T>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CptpReport<T> {
    pub trace_preserving: bool,
    pub completely_positive: bool,
    pub max_violation: T,
}

fn check_probability<T: Real>(p: T) -> Result<()> {
    if p.is_nan() || p < T::zero() || p > T::one() {
        Err(QdacError::domain(format!("probability {p} outside [0, 1]")))
    } else {
        Ok(())
    }
}

/// `ρ ↦ (1-p)ρ + p·diag(ρ)`, Kraus set `{√(1-p/2) I, √(p/2) Z}`.
pub fn make_dephase<T: Real>(p: T) -> Result<Channel<T>> {
    check_probability(p)?;
    let half = p * T::lit(0.5);
    Ok(Channel {
        kind: ChannelKind::Dephase,
        p,
        kraus: vec![
            Mat2::identity().scale((T::one() - half).sqrt()),
            Mat2::pauli(Pauli::Z).scale(half.sqrt()),
        ],
    })
}

/// `ρ ↦ (1-p)ρ + p·Tr(ρ)·I/2`, Kraus set
/// `{√(1-3p/4) I, √(p/4) X, √(p/4) Y, √(p/4) Z}`.
pub fn make_depolarize<T: Real>(p: T) -> Result<Channel<T>> {
    check_probability(p)?;
    let quarter = (p * T::lit(0.25)).sqrt();
    Ok(Channel {
        kind: ChannelKind::Depolarize,
        p,
        kraus: vec![
            Mat2::identity().scale((T::one() - T::lit(0.75) * p).sqrt()),
            Mat2::pauli(Pauli::X).scale(quarter),
            Mat2::pauli(Pauli::Y).scale(quarter),
            Mat2::pauli(Pauli::Z).scale(quarter),
        ],
    })
}

impl<T: Real> Channel<T> {
    pub fn from_kraus(kraus: Vec<Mat2<T>>) -> Self {
        Self {
            kind: ChannelKind::Custom,
            p: T::zero(),
            kraus,
        }
    }

    /// Image of a 2x2 operator. The named channels use their closed forms,
    /// which keep dyadic entries exact; custom channels sum the Kraus terms.
    pub fn apply_to(&self, rho: &Mat2<T>) -> Mat2<T> {
        let keep = T::one() - self.p;
        match self.kind {
            ChannelKind::Dephase => {
                let mut out = rho.scale(keep);
                out.m[0][0] = rho.m[0][0];
                out.m[1][1] = rho.m[1][1];
                out
            }
            ChannelKind::Depolarize => {
                let mut out = rho.scale(keep);
                let shift = rho.trace() * (self.p * T::lit(0.5));
                out.m[0][0] = out.m[0][0] + shift;
                out.m[1][1] = out.m[1][1] + shift;
                out
            }
            ChannelKind::Custom => self.kraus_sum(rho),
        }
    }

    /// `Σ K ρ K†` over the stored Kraus operators.
    pub fn kraus_sum(&self, rho: &Mat2<T>) -> Mat2<T> {
        self.kraus.iter().fold(Mat2::zero(), |acc, k| acc + rho.conjugate_by(k))
    }

    /// `Σ K†K`
    pub fn completeness(&self) -> Mat2<T> {
        self.kraus.iter().fold(Mat2::zero(), |acc, k| acc + k.adjoint() * *k)
    }

    /// Choi matrix `Σ_ij |i⟩⟨j| ⊗ Λ(|i⟩⟨j|)`.
    pub fn choi(&self) -> Array2<C<T>> {
        let mut out = Array2::zeros((4, 4));
        for i in 0..2 {
            for j in 0..2 {
                let mut e = Mat2::zero();
                e.m[i][j] = C::one();
                let img = self.apply_to(&e);
                for a in 0..2 {
                    for b in 0..2 {
                        out[(2 * i + a, 2 * j + b)] = img.m[a][b];
                    }
                }
            }
        }
        out
    }
}

/// Kraus completeness and Choi positivity at the scalar tolerances.
pub fn verify_cptp<T: Real>(ch: &Channel<T>) -> CptpReport<T> {
    let tp_err = ch.completeness().max_abs_diff(&Mat2::identity());
    let choi = ch.choi();
    let min_eig = linalg::hermitian_eigenvalues(&choi)[0];
    let herm = linalg::hermiticity_error(&choi);
    let cp_err = herm.max((-min_eig).max(T::zero()));
    CptpReport {
        trace_preserving: tp_err <= T::herm_tol(),
        completely_positive: cp_err <= T::psd_tol(),
        max_violation: tp_err.max(cp_err),
    }
}

/// Channel application on either backend.
pub trait ApplyChannel<T: Real>: Sized {
    fn apply_channel(&self, ch: &Channel<T>, target: usize) -> Result<Self>;
}

impl<T: Real> ApplyChannel<T> for DenseState<T> {
    fn apply_channel(&self, ch: &Channel<T>, target: usize) -> Result<Self> {
        self.layout().check_position(target)?;
        let mut out = self.clone();
        out.apply_local_map_in_place(target, |b| ch.apply_to(b));
        Ok(out)
    }
}

impl<T: Real> ApplyChannel<T> for EnsembleState<T> {
    fn apply_channel(&self, ch: &Channel<T>, target: usize) -> Result<Self> {
        self.layout().check_position(target)?;
        Ok(self.map_factor(target, |f| ch.apply_to(f)))
    }
}

pub fn apply_channel<T: Real, S: ApplyChannel<T>>(ch: &Channel<T>, target: usize, s: &S) -> Result<S> {
    s.apply_channel(ch, target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{Component, RegisterLayout};

    #[test]
    fn dephase_examples() {
        let plus = Mat2::<f64>::plus();
        let full = make_dephase(1.0).unwrap().apply_to(&plus);
        assert!(full.max_abs_diff(&Mat2::maximally_mixed()) < 1e-15);
        let none = make_dephase(0.0).unwrap().apply_to(&plus);
        assert!(none.max_abs_diff(&plus) < 1e-15);
        // (1-p)ρ + p·diag(ρ) at p = 1/2
        let half = make_dephase(0.5).unwrap().apply_to(&plus);
        assert!(half.max_abs_diff(&Mat2::real(0.5, 0.25, 0.25, 0.5)) < 1e-15);
    }

    #[test]
    fn depolarize_examples() {
        let zero = Mat2::<f64>::projector(false);
        let full = make_depolarize(1.0).unwrap().apply_to(&zero);
        assert!(full.max_abs_diff(&Mat2::maximally_mixed()) < 1e-15);
        let plus = Mat2::<f64>::plus();
        assert!(make_depolarize(0.0).unwrap().apply_to(&plus).max_abs_diff(&plus) < 1e-15);
        for n in 1..6i32 {
            for i in 0..n {
                let q = 2f64.powi(i - n + 1);
                let p = 1.0 - q;
                let got = make_depolarize(p).unwrap().apply_to(&zero);
                let want = Mat2::maximally_mixed().scale(p) + zero.scale(q);
                assert!(got.max_abs_diff(&want) < 1e-15);
            }
        }
    }

    #[test]
    fn probability_domain() {
        assert!(make_dephase(-0.1f64).is_err());
        assert!(make_depolarize(1.5f64).is_err());
        assert!(make_dephase(f64::NAN).is_err());
    }

    #[test]
    fn unnormalized_kraus_set_is_flagged() {
        let ch = Channel::from_kraus(vec![Mat2::<f64>::identity(), Mat2::pauli(Pauli::Z)]);
        let r = verify_cptp(&ch);
        assert!(!r.trace_preserving);
        assert!(r.completely_positive);
        assert!((r.max_violation - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dephasing_decoheres_bell_pair() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = C::new(0.0, 0.0);
        let bell = DenseState::from_ket(RegisterLayout::plain(2), &[C::new(s, 0.0), z, z, C::new(s, 0.0)]).unwrap();
        let out = apply_channel(&make_dephase(1.0).unwrap(), 1, &bell).unwrap();
        let mut expect = Array2::zeros((4, 4));
        expect[(0, 0)] = C::new(0.5, 0.0);
        expect[(3, 3)] = C::new(0.5, 0.0);
        assert!(linalg::max_abs_diff(out.matrix(), &expect) < 1e-15);
    }

    #[test]
    fn structured_channel_targets_one_factor() {
        let lay = RegisterLayout::plain(2);
        let e = EnsembleState::new(lay, vec![Component::new(1.0, vec![Mat2::plus(), Mat2::plus()])]).unwrap();
        let out = apply_channel(&make_dephase(1.0).unwrap(), 0, &e).unwrap();
        assert!(out.components()[0].factors[0].max_abs_diff(&Mat2::maximally_mixed()) < 1e-15);
        assert_eq!(out.components()[0].factors[1], Mat2::plus());
        assert!(apply_channel(&make_dephase(1.0).unwrap(), 2, &e).is_err());
    }
}
