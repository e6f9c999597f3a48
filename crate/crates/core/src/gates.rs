//! Unitary building blocks of the converter.

use ndarray::Array2;
use num_traits::Zero;

use crate::dac::DacInstance;
use crate::error::{QdacError, Result};
use crate::qstate::{CMatrix, DenseState, EnsembleState, Mat2, RegisterLayout};
use crate::scalar::{Real, C};

/// Gates needed by the pipeline and the readout routines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GateOp {
    /// `H` on one qubit.
    Hadamard { target: usize },
    /// `C₀H = |0⟩⟨0| ⊗ H + |1⟩⟨1| ⊗ I`.
    ZeroControlledHadamard { control: usize, target: usize },
    /// `H` on every ancilla, controlled on the R register holding `|k⟩`.
    BlockHadamard { k: usize },
    /// Oracle `|y⟩^L |k⟩^R ↦ |y ⊕ f(k)⟩^L |k⟩^R` for a truth table `f`.
    Oracle { table: Vec<u64> },
}

/// The XOR oracle of an instance.
pub fn build_cf(inst: &DacInstance) -> GateOp {
    GateOp::Oracle {
        table: inst.table().to_vec(),
    }
}

impl GateOp {
    fn validate(&self, layout: &RegisterLayout) -> Result<()> {
        match self {
            GateOp::Hadamard { target } => layout.check_position(*target),
            GateOp::ZeroControlledHadamard { control, target } => {
                layout.check_position(*control)?;
                layout.check_position(*target)?;
                if control == target {
                    return Err(QdacError::layout("control and target coincide"));
                }
                Ok(())
            }
            GateOp::BlockHadamard { k } => {
                if layout.n_a == 0 {
                    return Err(QdacError::layout("block Hadamard needs an ancilla register"));
                }
                if *k >> layout.n_r != 0 {
                    return Err(QdacError::domain(format!("pointer {k} exceeds R register")));
                }
                Ok(())
            }
            GateOp::Oracle { table } => {
                if table.len() != 1usize << layout.n_r {
                    return Err(QdacError::layout(format!(
                        "oracle table has {} entries for a {}-qubit R register",
                        table.len(),
                        layout.n_r
                    )));
                }
                if layout.n_l < 64 && table.iter().any(|&v| v >> layout.n_l != 0) {
                    return Err(QdacError::layout("oracle value wider than L register"));
                }
                Ok(())
            }
        }
    }

    /// Applies the gate to a ket in place.
    pub fn apply_to_ket<T: Real>(&self, layout: &RegisterLayout, ket: &mut [C<T>]) -> Result<()> {
        self.validate(layout)?;
        let h = Mat2::<T>::hadamard();
        let one_qubit = |ket: &mut [C<T>], pos: usize, cond: &dyn Fn(usize) -> bool| {
            let t = 1usize << layout.bit(pos);
            for i in 0..ket.len() {
                if i & t == 0 && cond(i) {
                    let (a, b) = (ket[i], ket[i | t]);
                    ket[i] = h.m[0][0] * a + h.m[0][1] * b;
                    ket[i | t] = h.m[1][0] * a + h.m[1][1] * b;
                }
            }
        };
        match self {
            GateOp::Hadamard { target } => one_qubit(ket, *target, &|_| true),
            GateOp::ZeroControlledHadamard { control, target } => {
                let c = 1usize << layout.bit(*control);
                one_qubit(ket, *target, &|i| i & c == 0)
            }
            GateOp::BlockHadamard { k } => {
                for i in 0..layout.n_a {
                    one_qubit(ket, layout.a(i), &|idx| layout.r_value(idx) == *k);
                }
            }
            GateOp::Oracle { table } => {
                let old = ket.to_vec();
                for (idx, amp) in old.into_iter().enumerate() {
                    ket[oracle_image(layout, table, idx)] = amp;
                }
            }
        }
        Ok(())
    }

    /// Dense unitary matrix of the gate on a layout (columns are images of
    /// basis kets).
    pub fn unitary<T: Real>(&self, layout: &RegisterLayout) -> Result<CMatrix<T>> {
        crate::qstate::check_dense_capacity("gate matrix", layout.total())?;
        let d = layout.dim();
        let mut u = Array2::zeros((d, d));
        let mut ket = vec![C::zero(); d];
        for j in 0..d {
            ket.iter_mut().for_each(|x| *x = C::zero());
            ket[j] = C::new(T::one(), T::zero());
            self.apply_to_ket(layout, &mut ket)?;
            for i in 0..d {
                u[(i, j)] = ket[i];
            }
        }
        Ok(u)
    }
}

fn oracle_image(layout: &RegisterLayout, table: &[u64], idx: usize) -> usize {
    let y = layout.l_value(idx);
    let k = layout.r_value(idx);
    layout.compose(y ^ table[k], k, layout.a_value(idx))
}

/// Unitary application on either backend.
pub trait ApplyGate<T: Real>: Sized {
    fn apply_unitary(&self, g: &GateOp) -> Result<Self>;
}

impl<T: Real> ApplyGate<T> for DenseState<T> {
    fn apply_unitary(&self, g: &GateOp) -> Result<Self> {
        let layout = *self.layout();
        g.validate(&layout)?;
        match g {
            GateOp::Hadamard { target } => {
                let mut out = self.clone();
                out.apply_hadamard_in_place(*target, &[]);
                Ok(out)
            }
            GateOp::ZeroControlledHadamard { control, target } => {
                let mut out = self.clone();
                out.apply_hadamard_in_place(*target, &[(*control, false)]);
                Ok(out)
            }
            GateOp::BlockHadamard { k } => {
                let controls: Vec<(usize, bool)> = (0..layout.n_r).map(|j| (layout.r(j), (k >> j) & 1 == 1)).collect();
                let mut out = self.clone();
                for i in 0..layout.n_a {
                    out.apply_hadamard_in_place(layout.a(i), &controls);
                }
                Ok(out)
            }
            GateOp::Oracle { table } => Ok(self.permute(|idx| oracle_image(&layout, table, idx))),
        }
    }
}

fn structured_bit<T: Real>(f: &Mat2<T>, pos: usize, why: &str) -> Result<bool> {
    f.basis_bit().ok_or_else(|| {
        QdacError::BackendCapability(format!(
            "{why}: qubit {pos} is not a computational-basis projector; densify first"
        ))
    })
}

impl<T: Real> ApplyGate<T> for EnsembleState<T> {
    fn apply_unitary(&self, g: &GateOp) -> Result<Self> {
        let layout = *self.layout();
        g.validate(&layout)?;
        match g {
            GateOp::Hadamard { target } => Ok(self.map_factor(*target, Mat2::hadamard_conjugate)),
            GateOp::ZeroControlledHadamard { control, target } => self.map_components(|c| {
                let mut c = c.clone();
                if !structured_bit(&c.factors[*control], *control, "C0H control")? {
                    let h = c.factors[*target].hadamard_conjugate();
                    c.factors_mut()[*target] = h;
                }
                Ok(c)
            }),
            GateOp::BlockHadamard { k } => self.map_components(|c| {
                let mut c = c.clone();
                // a basis factor that disagrees with `k` makes the component
                // orthogonal to |k⟩; later factors are then irrelevant
                let mut matches = true;
                for j in (0..layout.n_r).rev() {
                    let pos = layout.r(j);
                    if structured_bit(&c.factors[pos], pos, "block Hadamard")? != ((k >> j) & 1 == 1) {
                        matches = false;
                        break;
                    }
                }
                if matches {
                    for pos in layout.a_positions() {
                        let h = c.factors[pos].hadamard_conjugate();
                        c.factors_mut()[pos] = h;
                    }
                }
                Ok(c)
            }),
            GateOp::Oracle { table } => self.map_components(|c| {
                let mut c = c.clone();
                let mut y = 0u64;
                for pos in layout.l_positions() {
                    y = (y << 1) | u64::from(structured_bit(&c.factors[pos], pos, "oracle data")?);
                }
                let mut k = 0usize;
                for pos in layout.r_positions() {
                    k = (k << 1) | usize::from(structured_bit(&c.factors[pos], pos, "oracle pointer")?);
                }
                let out = y ^ table[k];
                for i in 0..layout.n_l {
                    c.factors_mut()[layout.l(i)] = Mat2::projector((out >> i) & 1 == 1);
                }
                Ok(c)
            }),
        }
    }
}

pub fn apply_unitary<T: Real, S: ApplyGate<T>>(g: &GateOp, s: &S) -> Result<S> {
    s.apply_unitary(g)
}

/// `|k⟩^R`-controlled `H^{⊗n}` on the ancilla register.
pub fn controlled_block_hadamard<T: Real, S: ApplyGate<T>>(k: usize, s: &S) -> Result<S> {
    s.apply_unitary(&GateOp::BlockHadamard { k })
}
