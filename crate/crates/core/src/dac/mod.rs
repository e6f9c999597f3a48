//! The decoherence-based converter pipeline.
//!
//! 1. [`prepare_initial`] encodes the truth table, either as the pure
//!    superposition `2^{-m/2} Σ |f(k)⟩|k⟩` or as the classical mixture
//!    `2^{-m} Σ |f(k)⟩⟨f(k)| ⊗ |k⟩⟨k|`.
//! 2. [`subroutine_s1`] attaches `n` ancillas, applies `C₀H` between each
//!    data bit and its ancilla and fully dephases R and every pair. Ancilla
//!    `a_i` ends in `I/2` when `f_i(k) = 0` and in `|0⟩⟨0|` when
//!    `f_i(k) = 1`.
//! 3. [`run_dac`] depolarizes `a_i` with `p_i = 1 - 2^{i-n+1}`, leaving a
//!    `|0⟩⟨0|` weight `q_i = 2^{i-n+1}` exactly on the set bits.

mod instance;

pub use instance::{unit_sample, DacInstance, MAX_DATA_BITS, MAX_POINTER_BITS};

use serde::Serialize;

use crate::channels::{make_dephase, make_depolarize, ApplyChannel};
use crate::error::{QdacError, Result};
use crate::gates::{build_cf, ApplyGate, GateOp};
use crate::qstate::{
    check_dense_capacity, linalg, Component, DenseState, DeviationComponent, DeviationState, DeviationTag,
    EnsembleState, Mat2, QuantumState, RegisterLayout,
};
use crate::scalar::Real;

/// Start the pipeline from the pure superposition or the classical mixture.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Pure,
    Mixed,
}

/// Output of [`prepare_initial`].
#[derive(Clone, Debug, PartialEq)]
pub enum PreparedState<T: Real> {
    Pure(DenseState<T>),
    Mixed(EnsembleState<T>),
}

/// Depolarizing strength on ancilla `a_i`: `p + q = 1`, `q = 2^{i-n+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AncillaParams<T> {
    pub i: usize,
    pub p: T,
    pub q: T,
}

/// Final state of the converter together with its deviation rewrite.
#[derive(Clone, Debug, PartialEq)]
pub struct DacOutput<T: Real> {
    pub state: EnsembleState<T>,
    pub deviation: DeviationState<T>,
    pub params: Vec<AncillaParams<T>>,
}

impl<T: Real> DacOutput<T> {
    pub fn layout(&self) -> &RegisterLayout {
        self.state.layout()
    }

    /// Pointer width `m`.
    pub fn m(&self) -> usize {
        self.layout().n_r
    }

    /// Data width `n`.
    pub fn n(&self) -> usize {
        self.layout().n_l
    }
}

/// Backends able to run the whole pipeline.
pub trait Backend<T: Real>: QuantumState<T> + ApplyGate<T> + ApplyChannel<T> {}
impl<T: Real, S: QuantumState<T> + ApplyGate<T> + ApplyChannel<T>> Backend<T> for S {}

/// `q_i = 2^{i-n+1}` and `p_i = 1 - q_i` for every ancilla.
pub fn ancilla_params<T: Real>(n: usize) -> Vec<AncillaParams<T>> {
    (0..n)
        .map(|i| {
            let q = 2f64.powi(i as i32 - n as i32 + 1);
            AncillaParams {
                i,
                p: T::lit(1.0 - q),
                q: T::lit(q),
            }
        })
        .collect()
}

/// Step 1: the encoded input.
pub fn prepare_initial<T: Real>(inst: &DacInstance, mode: Mode) -> Result<PreparedState<T>> {
    let layout = RegisterLayout::data(inst.n(), inst.m())?;
    let cf = build_cf(inst);
    match mode {
        Mode::Pure => {
            check_dense_capacity("pure initial state", layout.total())?;
            let mut s = DenseState::basis(layout, 0)?;
            for j in 0..layout.n_r {
                s = s.apply_unitary(&GateOp::Hadamard { target: layout.r(j) })?;
            }
            Ok(PreparedState::Pure(s.apply_unitary(&cf)?))
        }
        Mode::Mixed => {
            let w = T::lit(1.0 / inst.pointers() as f64);
            let comps = (0..inst.pointers())
                .map(|k| Component::basis(w, &layout, layout.compose(0, k, 0)))
                .collect();
            let s = EnsembleState::new(layout, comps)?;
            Ok(PreparedState::Mixed(s.apply_unitary(&cf)?))
        }
    }
}

/// Dense classical mixture `2^{-m} Σ |f(k)⟩⟨f(k)| ⊗ |k⟩⟨k|`, built by the
/// oracle acting on `|0⟩⟨0| ⊗ (I/2)^{⊗m}`.
pub fn prepare_mixed_dense<T: Real>(inst: &DacInstance) -> Result<DenseState<T>> {
    let layout = RegisterLayout::data(inst.n(), inst.m())?;
    let mut factors = vec![Mat2::projector(false); layout.n_l];
    factors.extend(std::iter::repeat_n(Mat2::maximally_mixed(), layout.n_r));
    DenseState::product(layout, &factors)?.apply_unitary(&build_cf(inst))
}

/// Steps (i)–(iv) of the subroutine on any backend.
pub fn s1_steps<T: Real, S: Backend<T>>(s: &S) -> Result<S> {
    let s = s.attach_ancillas()?;
    let layout = *s.layout();
    let dephase = make_dephase(T::one())?;
    let mut s = s;
    for i in 0..layout.n_l {
        s = s.apply_unitary(&GateOp::ZeroControlledHadamard {
            control: layout.l(i),
            target: layout.a(i),
        })?;
    }
    for j in 0..layout.n_r {
        s = s.apply_channel(&dephase, layout.r(j))?;
    }
    for i in 0..layout.n_l {
        s = s.apply_channel(&dephase, layout.l(i))?;
        s = s.apply_channel(&dephase, layout.a(i))?;
    }
    Ok(s)
}

/// Step 3 on any backend.
pub fn depolarize_ancillas<T: Real, S: Backend<T>>(s: &S) -> Result<S> {
    let layout = *s.layout();
    let mut s = s.clone();
    for par in ancilla_params::<T>(layout.n_a) {
        s = s.apply_channel(&make_depolarize(par.p)?, layout.a(par.i))?;
    }
    Ok(s)
}

/// Step 2: the subroutine, returning the structured form of `ρ_1`.
///
/// Pure inputs are processed densely; the dephasing of R restores a
/// mixture of products, which is then read back into components.
pub fn subroutine_s1<T: Real>(s: &PreparedState<T>) -> Result<EnsembleState<T>> {
    match s {
        PreparedState::Mixed(e) => s1_steps(e),
        PreparedState::Pure(d) => {
            let l = d.layout();
            check_dense_capacity("pure-mode subroutine", l.total() + l.n_l)?;
            decompose(&s1_steps(d)?)
        }
    }
}

/// Full pipeline: `ρ_2` plus its deviation form.
pub fn run_dac<T: Real>(inst: &DacInstance, mode: Mode) -> Result<DacOutput<T>> {
    let prepared = prepare_initial::<T>(inst, mode)?;
    let rho1 = subroutine_s1(&prepared)?;
    let state = depolarize_ancillas(&rho1)?;
    let params = ancilla_params(inst.n());
    let deviation = to_deviation(&state, &params)?;
    Ok(DacOutput {
        state,
        deviation,
        params,
    })
}

/// The whole pipeline on the dense backend only; the oracle for the
/// structured path.
pub fn run_dac_dense<T: Real>(inst: &DacInstance, mode: Mode) -> Result<DenseState<T>> {
    check_dense_capacity("dense pipeline", inst.m() + 2 * inst.n())?;
    let start = match mode {
        Mode::Pure => match prepare_initial::<T>(inst, Mode::Pure)? {
            PreparedState::Pure(d) => d,
            PreparedState::Mixed(_) => unreachable!("pure preparation is dense"),
        },
        Mode::Mixed => prepare_mixed_dense(inst)?,
    };
    depolarize_ancillas(&s1_steps(&start)?)
}

/// Reads a dense state that is diagonal on L⊗R and a product on A back into
/// one component per occupied L⊗R basis state, ordered by pointer `k`.
pub fn decompose<T: Real>(d: &DenseState<T>) -> Result<EnsembleState<T>> {
    let layout = *d.layout();
    if layout.n_a == 0 {
        return Err(QdacError::Form("decompose needs an ancilla register".into()));
    }
    let m = d.matrix();
    let tol = T::herm_tol();
    let dim = layout.dim();
    for i in 0..dim {
        for j in 0..dim {
            if (i >> layout.n_a) != (j >> layout.n_a) && m[(i, j)].norm() > tol {
                return Err(QdacError::Form(format!(
                    "coherence between L/R basis states at ({i}, {j})"
                )));
            }
        }
    }
    let da = 1usize << layout.n_a;
    let a_layout = RegisterLayout::plain(layout.n_a);
    let mut comps = Vec::new();
    for k in 0..(1usize << layout.n_r) {
        for y in 0..(1u64 << layout.n_l) {
            let base = layout.compose(y, k, 0);
            let w: T = (0..da).map(|a| m[(base + a, base + a)].re).sum();
            if w <= tol {
                continue;
            }
            let block = ndarray::Array2::from_shape_fn((da, da), |(a, b)| m[(base + a, base + b)] / w);
            let block = DenseState::from_parts(a_layout, block);
            let mut factors: Vec<Mat2<T>> = Vec::with_capacity(layout.total());
            for i in (0..layout.n_l).rev() {
                factors.push(Mat2::projector((y >> i) & 1 == 1));
            }
            for j in (0..layout.n_r).rev() {
                factors.push(Mat2::projector((k >> j) & 1 == 1));
            }
            let mut marginals = Vec::with_capacity(layout.n_a);
            for pos in 0..layout.n_a {
                let r = block.partial_trace(&[pos])?;
                let mm = r.matrix();
                marginals.push(Mat2::new(mm[(0, 0)], mm[(0, 1)], mm[(1, 0)], mm[(1, 1)]));
            }
            let product = DenseState::product(a_layout, &marginals)?;
            let err = linalg::max_abs_diff(product.matrix(), block.matrix());
            if err > T::psd_tol() {
                return Err(QdacError::Form(format!(
                    "ancilla block for k = {k} is not a product state (error {err})"
                )));
            }
            factors.extend(marginals);
            comps.push(Component::new(w, factors));
        }
    }
    EnsembleState::new(layout, comps)
}

/// Rewrites `ρ_2` with every ancilla as `c·Z/2 + I/2`.
///
/// Coefficients within tolerance of `0` or of the ancilla's `q_i` are
/// snapped to those exact dyadic values.
pub fn to_deviation<T: Real>(state: &EnsembleState<T>, params: &[AncillaParams<T>]) -> Result<DeviationState<T>> {
    let layout = *state.layout();
    if layout.n_a == 0 || params.len() != layout.n_a {
        return Err(QdacError::Form(
            "deviation form needs one parameter pair per ancilla".into(),
        ));
    }
    let tol = T::herm_tol();
    let comps = state
        .components()
        .iter()
        .enumerate()
        .map(|(idx, c)| {
            let mut tags = Vec::with_capacity(layout.total());
            for pos in 0..layout.n_l + layout.n_r {
                let bit = c.factors[pos]
                    .basis_bit()
                    .ok_or_else(|| QdacError::Form(format!("component {idx}: qubit {pos} is not a basis projector")))?;
                tags.push(DeviationTag::Bit(bit));
            }
            for pos in layout.a_positions() {
                let f = &c.factors[pos];
                if !f.is_diagonal() {
                    return Err(QdacError::Form(format!(
                        "component {idx}: ancilla {pos} has coherences"
                    )));
                }
                let mut coef = f.m[0][0].re - f.m[1][1].re;
                let q = params[layout.bit(pos)].q;
                if coef.abs() <= tol {
                    coef = T::zero();
                } else if (coef - q).abs() <= tol {
                    coef = q;
                }
                if coef < -tol || coef > T::one() + tol {
                    return Err(QdacError::Form(format!(
                        "component {idx}: ancilla {pos} deviation {coef} outside [0, 1]"
                    )));
                }
                tags.push(DeviationTag::Deviation(coef.max(T::zero()).min(T::one())));
            }
            Ok(DeviationComponent { weight: c.weight, tags })
        })
        .collect::<Result<Vec<_>>>()?;
    DeviationState::new(layout, comps)
}
