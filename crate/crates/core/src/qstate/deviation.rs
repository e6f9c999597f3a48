use serde::Serialize;

use super::ensemble::{Component, EnsembleState};
use super::layout::RegisterLayout;
use super::mat2::Mat2;
use crate::error::{QdacError, Result};
use crate::scalar::Real;

/// Per-qubit tag of the deviation representation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum DeviationTag<T> {
    /// Classical L or R qubit `|b⟩⟩ = |b⟩⟨b|`.
    Bit(bool),
    /// Ancilla `c·Z/2 + I/2`; `c = 0` means no deviation from `I/2`.
    Deviation(T),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeviationComponent<T> {
    pub weight: T,
    pub tags: Vec<DeviationTag<T>>,
}

/// Ancilla deviations from `I/2` alongside the classical pointer and data
/// bits.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviationState<T: Real> {
    layout: RegisterLayout,
    components: Vec<DeviationComponent<T>>,
}

impl<T: Real> DeviationState<T> {
    pub fn new(layout: RegisterLayout, components: Vec<DeviationComponent<T>>) -> Result<Self> {
        for c in &components {
            if c.tags.len() != layout.total() {
                return Err(QdacError::layout("one tag per qubit required"));
            }
            for (p, t) in c.tags.iter().enumerate() {
                let is_ancilla = p >= layout.n_l + layout.n_r;
                match t {
                    DeviationTag::Bit(_) if is_ancilla => {
                        return Err(QdacError::Form(format!("ancilla position {p} tagged as a bit")))
                    }
                    DeviationTag::Deviation(_) if !is_ancilla => {
                        return Err(QdacError::Form(format!("data position {p} tagged as a deviation")))
                    }
                    DeviationTag::Deviation(c) if *c < T::zero() || *c > T::one() => {
                        return Err(QdacError::Form(format!("deviation {c} outside [0, 1]")))
                    }
                    _ => {}
                }
            }
        }
        Ok(Self { layout, components })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn components(&self) -> &[DeviationComponent<T>] {
        &self.components
    }

    /// Ancilla coefficients of component `k`, indexed by ancilla bit `i`.
    pub fn coefficients(&self, k: usize) -> Option<Vec<T>> {
        let c = self.components.get(k)?;
        let n_a = self.layout.n_a;
        Some(
            (0..n_a)
                .map(|i| match c.tags[self.layout.a(i)] {
                    DeviationTag::Deviation(x) => x,
                    DeviationTag::Bit(_) => T::zero(),
                })
                .collect(),
        )
    }

    /// Expands every tag back to a density matrix.
    pub fn reconstruct(&self) -> Result<EnsembleState<T>> {
        let half = T::lit(0.5);
        let comps = self
            .components
            .iter()
            .map(|c| {
                let factors = c
                    .tags
                    .iter()
                    .map(|t| match *t {
                        DeviationTag::Bit(b) => Mat2::projector(b),
                        DeviationTag::Deviation(x) => {
                            Mat2::real(half + half * x, T::zero(), T::zero(), half - half * x)
                        }
                    })
                    .collect();
                Component::new(c.weight, factors)
            })
            .collect();
        EnsembleState::new(self.layout, comps)
    }
}
