use std::sync::Arc;

use ndarray::Array2;
use num_traits::Zero;

use super::dense::{check_dense_capacity, DenseState};
use super::layout::RegisterLayout;
use super::mat2::Mat2;
use crate::error::{QdacError, Result};
use crate::scalar::{re, Real, C};

/// One term of an [`EnsembleState`]: `weight · (⊗ factors)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Component<T: Real> {
    pub weight: T,
    /// Single-qubit density matrices in position order, shared between
    /// clones until one of them is modified.
    pub factors: Arc<Vec<Mat2<T>>>,
}

/// Weighted mixture of tensor-product states.
///
/// Components are never merged or reordered: in the converter pipeline
/// component `k` is the one whose R register holds `|k⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleState<T: Real> {
    layout: RegisterLayout,
    components: Vec<Component<T>>,
}

impl<T: Real> EnsembleState<T> {
    pub fn new(layout: RegisterLayout, components: Vec<Component<T>>) -> Result<Self> {
        let s = Self { layout, components };
        s.check_invariants()?;
        Ok(s)
    }

    pub(crate) fn from_parts(layout: RegisterLayout, components: Vec<Component<T>>) -> Self {
        Self { layout, components }
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn components(&self) -> &[Component<T>] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Weights non-negative and summing to one; every factor a density
    /// matrix.
    pub fn check_invariants(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(QdacError::InvariantViolation("empty ensemble".into()));
        }
        let mut total = T::zero();
        for (idx, c) in self.components.iter().enumerate() {
            if c.weight < T::zero() || !c.weight.is_finite() {
                return Err(QdacError::InvariantViolation(format!(
                    "component {idx} has weight {}",
                    c.weight
                )));
            }
            if c.factors.len() != self.layout.total() {
                return Err(QdacError::layout(format!(
                    "component {idx} has {} factors for {} qubits",
                    c.factors.len(),
                    self.layout.total()
                )));
            }
            if let Some(q) = c.factors.iter().position(|f| !f.is_density()) {
                return Err(QdacError::InvariantViolation(format!(
                    "component {idx}, qubit {q} is not a density matrix"
                )));
            }
            total = total + c.weight;
        }
        if (total - T::one()).abs() > T::herm_tol() {
            return Err(QdacError::InvariantViolation(format!("weights sum to {total}")));
        }
        Ok(())
    }

    /// Replaces the factor at `pos` of every component by `f(old)`.
    pub(crate) fn map_factor(&self, pos: usize, f: impl Fn(&Mat2<T>) -> Mat2<T>) -> Self {
        let components = self
            .components
            .iter()
            .map(|c| {
                let mut c = c.clone();
                let g = f(&c.factors[pos]);
                c.factors_mut()[pos] = g;
                c
            })
            .collect();
        Self::from_parts(self.layout, components)
    }

    pub(crate) fn map_components(&self, f: impl Fn(&Component<T>) -> Result<Component<T>>) -> Result<Self> {
        let components = self.components.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_parts(self.layout, components))
    }

    /// Appends `n_l` ancillas in `|0⟩` to every component.
    pub fn attach_ancillas(&self) -> Result<Self> {
        if self.layout.n_a != 0 {
            return Err(QdacError::layout("ancillas already attached"));
        }
        let layout = RegisterLayout::with_ancillas(self.layout.n_l, self.layout.n_r)?;
        let components = self
            .components
            .iter()
            .map(|c| {
                let mut factors = c.factors.to_vec();
                factors.extend(std::iter::repeat_n(Mat2::projector(false), layout.n_a));
                Component::new(c.weight, factors)
            })
            .collect();
        Ok(Self::from_parts(layout, components))
    }

    /// Explicit density matrix `Σ w · (⊗ factors)`.
    pub fn densify(&self) -> Result<DenseState<T>> {
        check_dense_capacity("densify", self.layout.total())?;
        let d = self.layout.dim();
        let mut m = Array2::<C<T>>::zeros((d, d));
        let mut terms: Vec<(usize, usize, C<T>)> = Vec::new();
        let mut next: Vec<(usize, usize, C<T>)> = Vec::new();
        for comp in &self.components {
            if comp.weight == T::zero() {
                continue;
            }
            terms.clear();
            terms.push((0, 0, re(comp.weight)));
            for f in comp.factors.iter() {
                next.clear();
                for &(r, c, v) in &terms {
                    for a in 0..2 {
                        for b in 0..2 {
                            let x = f.m[a][b];
                            if !x.is_zero() {
                                next.push(((r << 1) | a, (c << 1) | b, v * x));
                            }
                        }
                    }
                }
                std::mem::swap(&mut terms, &mut next);
            }
            for &(r, c, v) in &terms {
                m[(r, c)] = m[(r, c)] + v;
            }
        }
        Ok(DenseState::from_parts(self.layout, m))
    }

    /// Total trace `Σ w_j Π Tr F`.
    pub fn trace(&self) -> C<T> {
        self.components.iter().fold(C::zero(), |acc, c| {
            acc + c.factors.iter().fold(re(c.weight), |p, f| p * f.trace())
        })
    }

    /// Largest entrywise factor or weight difference against a state with
    /// identical component structure.
    pub fn max_structural_diff(&self, other: &Self) -> Option<T> {
        if self.layout != other.layout || self.len() != other.len() {
            return None;
        }
        let mut d = T::zero();
        for (a, b) in self.components.iter().zip(&other.components) {
            d = d.max((a.weight - b.weight).abs());
            for (fa, fb) in a.factors.iter().zip(b.factors.iter()) {
                d = d.max(fa.max_abs_diff(fb));
            }
        }
        Some(d)
    }
}

impl<T: Real> Component<T> {
    pub fn new(weight: T, factors: Vec<Mat2<T>>) -> Self {
        Self {
            weight,
            factors: Arc::new(factors),
        }
    }

    /// Mutable factors, copied first if shared.
    pub fn factors_mut(&mut self) -> &mut [Mat2<T>] {
        Arc::make_mut(&mut self.factors).as_mut_slice()
    }

    /// Product of basis projectors for a basis index of a `q`-qubit layout.
    pub fn basis(weight: T, layout: &RegisterLayout, index: usize) -> Self {
        let factors = (0..layout.total())
            .map(|p| Mat2::projector((index >> layout.bit(p)) & 1 == 1))
            .collect();
        Self::new(weight, factors)
    }

    /// Value of the basis register spanned by `positions` when every
    /// factor there is a computational projector.
    pub fn basis_value(&self, positions: impl Iterator<Item = usize>) -> Option<usize> {
        let mut v = 0usize;
        for p in positions {
            v = (v << 1) | usize::from(self.factors[p].basis_bit()?);
        }
        Some(v)
    }

    pub fn weight_is_one(&self) -> bool {
        (self.weight - T::one()).abs() <= T::herm_tol()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_projector_densifies_to_diag() {
        let e = EnsembleState::<f64>::new(
            RegisterLayout::plain(1),
            vec![Component::new(1.0, vec![Mat2::projector(false)])],
        )
        .unwrap();
        let d = e.densify().unwrap();
        assert_eq!(d.matrix()[(0, 0)].re, 1.0);
        assert_eq!(d.matrix()[(1, 1)].re, 0.0);
    }

    #[test]
    fn even_mixture_of_basis_states_is_maximally_mixed() {
        let e = EnsembleState::<f64>::new(
            RegisterLayout::plain(1),
            vec![
                Component::new(0.5, vec![Mat2::projector(false)]),
                Component::new(0.5, vec![Mat2::projector(true)]),
            ],
        )
        .unwrap();
        let d = e.densify().unwrap();
        let mm = DenseState::product(RegisterLayout::plain(1), &[Mat2::maximally_mixed()]).unwrap();
        assert!(d.max_abs_diff(&mm) < 1e-15);
    }

    #[test]
    fn rejects_bad_weights() {
        let r = EnsembleState::<f64>::new(
            RegisterLayout::plain(1),
            vec![Component::new(0.7, vec![Mat2::projector(false)])],
        );
        assert!(matches!(r, Err(QdacError::InvariantViolation(_))));
        let r = EnsembleState::<f64>::new(
            RegisterLayout::plain(1),
            vec![
                Component::new(1.5, vec![Mat2::projector(false)]),
                Component::new(-0.5, vec![Mat2::projector(true)]),
            ],
        );
        assert!(r.is_err());
    }

    #[test]
    fn basis_value_reads_projectors() {
        let lay = RegisterLayout::plain(3);
        let c = Component::<f64>::basis(1.0, &lay, 0b110);
        assert_eq!(c.basis_value(0..3), Some(0b110));
        assert_eq!(c.basis_value(1..3), Some(0b10));
    }
}
