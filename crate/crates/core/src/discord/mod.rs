//! Entropic correlation measures of the mid-subroutine state.
//!
//! The state of interest is
//! `ρ̃ = 2^{-m} Σ_k |f(k)⟩⟨f(k)| ⊗ |k⟩⟨k| ⊗ |a(k)⟩⟨a(k)|`, where ancilla `a_i`
//! holds `|+⟩` when `f_i(k) = 0` and `|0⟩` when `f_i(k) = 1`. It is
//! separable, yet measuring the ancilla side disturbs it: the discord with
//! the ancillas as the measured side is nonzero whenever `f` is not
//! constant, while the discord with LR measured vanishes.
//!
//! All measurements are rank-one projective (von Neumann).

pub mod minimize;

use std::f64::consts::{FRAC_PI_2, PI};

use ndarray::Array2;
use num_traits::Zero;
use serde::Serialize;

use crate::dac::DacInstance;
use crate::error::{QdacError, Result};
use crate::qstate::{
    check_dense_capacity, linalg, matrix_entropy, scatter_offsets, CMatrix, Component, DenseState, EnsembleState, Mat2,
    RegisterLayout,
};
use crate::scalar::{binary_entropy, xlog2x_neg, Real, C};

use minimize::{golden_section, grid_then_golden};

/// Grid resolution of the θ search.
pub const THETA_GRID_POINTS: usize = 10_000;
/// Bracket width at which the golden-section refinement stops.
pub const THETA_TOLERANCE: f64 = 1e-10;
/// Post-measurement branches below this probability are dropped.
pub const BRANCH_CUTOFF: f64 = 1e-14;

/// A cut of the register into a measured side A and its complement B.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BipartiteSplit {
    side_a: Vec<usize>,
    side_b: Vec<usize>,
    label: String,
}

impl BipartiteSplit {
    /// `side_a` lists qubit positions; its order fixes the basis order of
    /// the measured side (first entry most significant).
    pub fn new(total: usize, side_a: Vec<usize>, label: impl Into<String>) -> Result<Self> {
        if side_a.is_empty() || side_a.len() >= total {
            return Err(QdacError::layout("both sides of a split must be nonempty"));
        }
        let mut seen = vec![false; total];
        for &p in &side_a {
            if p >= total || std::mem::replace(&mut seen[p], true) {
                return Err(QdacError::layout(format!("invalid or repeated position {p} in split")));
            }
        }
        let side_b = (0..total).filter(|&p| !seen[p]).collect();
        Ok(Self {
            side_a,
            side_b,
            label: label.into(),
        })
    }

    /// Ancilla register measured, LR unmeasured.
    pub fn ancillas_measured(layout: &RegisterLayout) -> Result<Self> {
        if layout.n_a == 0 {
            return Err(QdacError::layout("layout has no ancilla register"));
        }
        Self::new(layout.total(), layout.a_positions().collect(), "A")
    }

    /// LR measured, ancillas unmeasured.
    pub fn data_measured(layout: &RegisterLayout) -> Result<Self> {
        if layout.n_a == 0 {
            return Err(QdacError::layout("layout has no ancilla register"));
        }
        Self::new(layout.total(), (0..layout.n_l + layout.n_r).collect(), "LR")
    }

    pub fn side_a(&self) -> &[usize] {
        &self.side_a
    }

    pub fn side_b(&self) -> &[usize] {
        &self.side_b
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    fn check(&self, layout: &RegisterLayout) -> Result<()> {
        if self.side_a.len() + self.side_b.len() != layout.total() {
            return Err(QdacError::layout("split does not match the state's qubit count"));
        }
        Ok(())
    }
}

/// Measurement angles of a single-qubit projector `cos θ|0⟩ + e^{iφ} sin θ|1⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeasurementAngles<T> {
    pub theta: T,
    pub phi: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscordReport<T> {
    #[serde(rename = "S_A")]
    pub s_a: T,
    #[serde(rename = "S_B")]
    pub s_b: T,
    #[serde(rename = "S_AB")]
    pub s_ab: T,
    pub conditional_min: T,
    /// `None` when the optimal measurement is the computational basis.
    pub minimizer: Option<MeasurementAngles<T>>,
    pub discord: T,
    pub measured_side: String,
}

impl<T: Real> DiscordReport<T> {
    fn assemble(
        s_a: T,
        s_b: T,
        s_ab: T,
        conditional_min: T,
        minimizer: Option<MeasurementAngles<T>>,
        side: &str,
    ) -> Self {
        Self {
            s_a,
            s_b,
            s_ab,
            conditional_min,
            minimizer,
            discord: s_a - s_ab + conditional_min,
            measured_side: side.to_string(),
        }
    }
}

/// `ρ̃` for an instance, as a dense state on the `(n, m, n)` layout.
pub fn rho_tilde<T: Real>(inst: &DacInstance) -> Result<DenseState<T>> {
    let layout = RegisterLayout::with_ancillas(inst.n(), inst.m())?;
    check_dense_capacity("mid-subroutine state", layout.total())?;
    let w = T::lit(1.0 / inst.pointers() as f64);
    let comps = (0..inst.pointers())
        .map(|k| {
            let mut c = Component::basis(w, &layout, layout.compose(inst.value(k), k, 0));
            for i in 0..inst.n() {
                if !inst.bit(k, i) {
                    c.factors_mut()[layout.a(i)] = Mat2::plus();
                }
            }
            c
        })
        .collect();
    EnsembleState::new(layout, comps)?.densify()
}

/// Transpose on the subsystem `side`; Hermitian but not necessarily PSD.
pub fn partial_transpose<T: Real>(rho: &DenseState<T>, side: &[usize]) -> Result<CMatrix<T>> {
    let layout = rho.layout();
    let mut mask = 0usize;
    for &p in side {
        layout.check_position(p)?;
        mask |= 1usize << layout.bit(p);
    }
    let m = rho.matrix();
    Ok(Array2::from_shape_fn(m.dim(), |(i, j)| {
        m[((i & !mask) | (j & mask), (j & !mask) | (i & mask))]
    }))
}

fn reduced_entropy<T: Real>(rho: &DenseState<T>, keep: &[usize]) -> Result<T> {
    Ok(matrix_entropy(rho.partial_trace(keep)?.matrix()))
}

/// `S(A) + S(B) - S(AB)`.
pub fn mutual_information<T: Real>(rho: &DenseState<T>, split: &BipartiteSplit) -> Result<T> {
    split.check(rho.layout())?;
    Ok(reduced_entropy(rho, split.side_a())? + reduced_entropy(rho, split.side_b())? - matrix_entropy(rho.matrix()))
}

/// `Σ_j p_j S(σ_j)` for a complete orthonormal set of kets on side A.
///
/// `σ_j` is the unmeasured side's state after outcome `j`; kets are indexed
/// in the order of [`BipartiteSplit::side_a`].
pub fn conditional_entropy<T: Real>(rho: &DenseState<T>, split: &BipartiteSplit, kets: &[Vec<C<T>>]) -> Result<T> {
    let layout = *rho.layout();
    split.check(&layout)?;
    let da = 1usize << split.side_a().len();
    check_measurement(kets, da)?;
    let off_a = scatter_offsets(&layout, split.side_a());
    let off_b = scatter_offsets(&layout, split.side_b());
    let db = off_b.len();
    let m = rho.matrix();
    let cutoff = T::lit(BRANCH_CUTOFF);
    let mut total = T::zero();
    for v in kets {
        let support: Vec<(usize, C<T>)> = v.iter().copied().enumerate().filter(|(_, x)| !x.is_zero()).collect();
        let mut sigma = Array2::<C<T>>::zeros((db, db));
        for (b, ob) in off_b.iter().enumerate() {
            for (bp, obp) in off_b.iter().enumerate() {
                let mut acc = C::new(T::zero(), T::zero());
                for &(a, va) in &support {
                    for &(ap, vap) in &support {
                        acc = acc + va.conj() * m[(off_a[a] | ob, off_a[ap] | obp)] * vap;
                    }
                }
                sigma[(b, bp)] = acc;
            }
        }
        let p = linalg::trace(&sigma).re;
        if p < cutoff {
            continue;
        }
        sigma.mapv_inplace(|x| x / p);
        total = total + p * matrix_entropy(&sigma);
    }
    Ok(total)
}

fn check_measurement<T: Real>(kets: &[Vec<C<T>>], dim: usize) -> Result<()> {
    if kets.len() != dim {
        return Err(QdacError::Measurement(format!(
            "{} projectors for a {dim}-dimensional side; a complete rank-one set is required",
            kets.len()
        )));
    }
    if let Some(v) = kets.iter().find(|v| v.len() != dim) {
        return Err(QdacError::Measurement(format!(
            "projector ket of length {} for dimension {dim}",
            v.len()
        )));
    }
    let tol = T::psd_tol();
    for (i, u) in kets.iter().enumerate() {
        for (j, v) in kets.iter().enumerate().skip(i) {
            let dot = u
                .iter()
                .zip(v)
                .fold(C::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y);
            let want = if i == j { T::one() } else { T::zero() };
            if (dot.re - want).abs() > tol || dot.im.abs() > tol {
                return Err(QdacError::Measurement(format!(
                    "projectors {i} and {j} are not orthonormal (overlap {dot})"
                )));
            }
        }
    }
    Ok(())
}

/// Single-qubit measurement basis `{cos θ|0⟩ + e^{iφ} sin θ|1⟩, sin θ|0⟩ - e^{iφ} cos θ|1⟩}`.
pub fn qubit_basis<T: Real>(theta: T, phi: T) -> [[C<T>; 2]; 2] {
    let (s, c) = theta.sin_cos();
    let e = C::from_polar(T::one(), phi);
    [[C::new(c, T::zero()), e * s], [C::new(s, T::zero()), -e * c]]
}

/// The θ-family on an `n`-qubit ancilla register: the top ancilla in
/// [`qubit_basis`] with `φ = 0`, every other ancilla in the `X` basis.
/// The branch where all other ancillas read `+` is the pair used in the
/// closed form; the remaining branches complete the set.
pub fn theta_family_kets<T: Real>(n: usize, theta: T) -> Vec<Vec<C<T>>> {
    let top = qubit_basis(theta, T::zero());
    let h = T::FRAC_1_SQRT_2();
    let x_basis = [[h, h], [h, -h]];
    let rest = n - 1;
    let mut kets = Vec::with_capacity(1 << n);
    for x in 0..(1usize << rest) {
        for t in &top {
            let mut v = vec![C::new(T::zero(), T::zero()); 1 << n];
            for (idx, slot) in v.iter_mut().enumerate() {
                // idx bit rest is the top ancilla; lower bits are the others
                let mut amp = t[idx >> rest];
                for j in 0..rest {
                    let outcome = (x >> j) & 1;
                    let bit = (idx >> j) & 1;
                    amp = amp * x_basis[outcome][bit];
                }
                *slot = amp;
            }
            kets.push(v);
        }
    }
    kets
}

/// Computational-basis kets of a `q`-qubit side.
pub fn computational_kets<T: Real>(q: usize) -> Vec<Vec<C<T>>> {
    let d = 1usize << q;
    (0..d)
        .map(|i| {
            let mut v = vec![C::new(T::zero(), T::zero()); d];
            v[i] = C::new(T::one(), T::zero());
            v
        })
        .collect()
}

/// Conditional entropy of the clock-function `ρ̃` under the θ-family:
/// `m - H(p₁) + ½H((cos θ + sin θ)²/2) + ½H(cos² θ)`,
/// `p₁ = ½[(cos θ + sin θ)²/2 + cos² θ]`.
pub fn clock_conditional_entropy<T: Real>(m: usize, theta: T) -> T {
    let (s, c) = theta.sin_cos();
    let half = T::lit(0.5);
    let plus_branch = (c + s) * (c + s) * half;
    let zero_branch = c * c;
    let p1 = half * (plus_branch + zero_branch);
    T::lit(m as f64) - binary_entropy(p1) + half * binary_entropy(plus_branch) + half * binary_entropy(zero_branch)
}

/// Entropy of `(|+⟩⟨+| + |0⟩⟨0|)/2`, from its eigenvalues `½ ± √2/4`.
pub fn plus_zero_mixture_entropy<T: Real>() -> T {
    let d = T::SQRT_2() * T::lit(0.25);
    let half = T::lit(0.5);
    xlog2x_neg(half + d) + xlog2x_neg(half - d)
}

fn check_clock_shape(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(QdacError::domain("clock function needs m >= 1 and n >= 1"));
    }
    Ok(())
}

/// Ancilla-side discord of the clock-function state, minimizing the closed
/// form over `θ ∈ [0, π/2]` (grid, then golden section).
pub fn discord_theta_family<T: Real>(m: usize, n: usize) -> Result<DiscordReport<T>> {
    check_clock_shape(m, n)?;
    let f = |theta: T| clock_conditional_entropy(m, theta);
    let (theta, cond) = grid_then_golden(
        &f,
        T::zero(),
        T::lit(FRAC_PI_2),
        THETA_GRID_POINTS,
        T::lit(THETA_TOLERANCE),
    );
    let s_lr = T::lit(m as f64);
    Ok(DiscordReport::assemble(
        plus_zero_mixture_entropy(),
        s_lr,
        s_lr,
        cond,
        Some(MeasurementAngles { theta, phi: T::zero() }),
        "A",
    ))
}

/// Numeric θ-family conditional entropy on a dense `ρ̃` (ancillas measured).
pub fn theta_family_conditional_entropy<T: Real>(rho: &DenseState<T>, theta: T) -> Result<T> {
    let split = BipartiteSplit::ancillas_measured(rho.layout())?;
    conditional_entropy(rho, &split, &theta_family_kets(rho.layout().n_a, theta))
}

/// LR-side discord evaluated with computational-basis projectors on LR.
/// This is an upper bound in general and exact when it is zero.
pub fn discord_lr<T: Real>(rho: &DenseState<T>) -> Result<DiscordReport<T>> {
    let split = BipartiteSplit::data_measured(rho.layout())?;
    let s_lr = reduced_entropy(rho, split.side_a())?;
    let s_anc = reduced_entropy(rho, split.side_b())?;
    let s_all = matrix_entropy(rho.matrix());
    let cond = conditional_entropy(rho, &split, &computational_kets(split.side_a().len()))?;
    Ok(DiscordReport::assemble(s_lr, s_anc, s_all, cond, None, split.label()))
}

/// Search grid for [`discord_bruteforce`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BruteforceGrid {
    pub theta_points: usize,
    /// `1` restricts the search to real measurement kets (`φ = 0`).
    pub phi_points: usize,
    pub refinement_rounds: usize,
}

impl Default for BruteforceGrid {
    fn default() -> Self {
        Self {
            theta_points: 64,
            phi_points: 64,
            refinement_rounds: 4,
        }
    }
}

/// Discord with a single measured qubit, minimizing over every rank-one
/// projective measurement `(θ, φ)`.
pub fn discord_bruteforce<T: Real>(
    rho: &DenseState<T>,
    split: &BipartiteSplit,
    grid: BruteforceGrid,
) -> Result<DiscordReport<T>> {
    split.check(rho.layout())?;
    if split.side_a().len() != 1 {
        return Err(QdacError::Capacity {
            what: "brute-force measured side",
            qubits: split.side_a().len(),
            limit: 1,
        });
    }
    if grid.theta_points < 2 || grid.phi_points == 0 {
        return Err(QdacError::domain(
            "brute-force grid needs >= 2 theta and >= 1 phi points",
        ));
    }
    let objective = |theta: T, phi: T| -> T {
        let [u, v] = qubit_basis(theta, phi);
        conditional_entropy(rho, split, &[u.to_vec(), v.to_vec()]).unwrap_or_else(|_| T::infinity())
    };
    let theta_hi = T::lit(FRAC_PI_2);
    let t_step = theta_hi / T::lit((grid.theta_points - 1) as f64);
    let p_step = T::lit(2.0 * PI / grid.phi_points as f64);
    let mut best = (T::zero(), T::zero(), T::infinity());
    for i in 0..grid.theta_points {
        let theta = t_step * T::lit(i as f64);
        for j in 0..grid.phi_points {
            let phi = p_step * T::lit(j as f64);
            let val = objective(theta, phi);
            if val < best.2 {
                best = (theta, phi, val);
            }
        }
    }
    let tol = T::lit(THETA_TOLERANCE);
    for _ in 0..grid.refinement_rounds {
        let (t0, p0, _) = best;
        let (t1, v1) = golden_section(
            &|t| objective(t, p0),
            (t0 - t_step).max(T::zero()),
            (t0 + t_step).min(theta_hi),
            tol,
        );
        if v1 < best.2 {
            best = (t1, p0, v1);
        }
        if grid.phi_points > 1 {
            let (t0, p0, _) = best;
            let (p1, v2) = golden_section(&|p| objective(t0, p), p0 - p_step, p0 + p_step, tol);
            if v2 < best.2 {
                let two_pi = T::lit(2.0 * PI);
                best = (t0, p1 - two_pi * (p1 / two_pi).floor(), v2);
            }
        }
    }
    let s_a = reduced_entropy(rho, split.side_a())?;
    let s_b = reduced_entropy(rho, split.side_b())?;
    let s_ab = matrix_entropy(rho.matrix());
    Ok(DiscordReport::assemble(
        s_a,
        s_b,
        s_ab,
        best.2,
        Some(MeasurementAngles {
            theta: best.0,
            phi: best.1,
        }),
        split.label(),
    ))
}

/// One row of a θ sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThetaSample<T> {
    pub theta: T,
    pub closed_form_value: T,
    pub numeric_value: T,
}

/// Closed form and dense numeric conditional entropy of the clock state
/// on `points` evenly spaced angles in `[0, π/2]`.
pub fn theta_sweep<T: Real>(m: usize, n: usize, points: usize) -> Result<Vec<ThetaSample<T>>> {
    check_clock_shape(m, n)?;
    if points < 2 {
        return Err(QdacError::domain("a sweep needs at least two points"));
    }
    let rho = rho_tilde::<T>(&DacInstance::clock(m, n)?)?;
    let step = FRAC_PI_2 / (points - 1) as f64;
    (0..points)
        .map(|i| {
            let theta = T::lit(step * i as f64);
            Ok(ThetaSample {
                theta,
                closed_form_value: clock_conditional_entropy(m, theta),
                numeric_value: theta_family_conditional_entropy(&rho, theta)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::von_neumann_entropy;

    #[test]
    fn entropy_of_plus_zero_mixture() {
        let e: f64 = plus_zero_mixture_entropy();
        assert!((e - 0.600876).abs() < 1e-6);
        let s = DenseState::product(
            RegisterLayout::plain(1),
            &[Mat2::plus().scale(0.5) + Mat2::projector(false).scale(0.5)],
        )
        .unwrap();
        assert!((von_neumann_entropy(&s).unwrap() - e).abs() < 1e-13);
    }

    #[test]
    fn theta_family_report() {
        for m in 1..=3 {
            let r = discord_theta_family::<f64>(m, 1).unwrap();
            assert!((r.conditional_min - (m as f64 - 0.399124)).abs() < 1e-5);
            assert!((r.discord - 0.201752).abs() < 1e-5);
            let theta = r.minimizer.unwrap().theta;
            assert!((theta - 3.0 * std::f64::consts::PI / 8.0).abs() < 1e-6, "{theta}");
        }
    }

    #[test]
    fn theta_kets_are_complete() {
        for n in 1..=3 {
            let kets = theta_family_kets::<f64>(n, 0.37);
            check_measurement(&kets, 1 << n).unwrap();
        }
    }

    #[test]
    fn incomplete_measurement_is_rejected() {
        let rho = rho_tilde::<f64>(&DacInstance::clock(1, 2).unwrap()).unwrap();
        let split = BipartiteSplit::ancillas_measured(rho.layout()).unwrap();
        let kets = theta_family_kets::<f64>(2, 0.3);
        let err = conditional_entropy(&rho, &split, &kets[..2]).unwrap_err();
        assert!(matches!(err, QdacError::Measurement(_)));
        let mut skew = kets.clone();
        skew[0][0] *= 1.1;
        assert!(matches!(
            conditional_entropy(&rho, &split, &skew),
            Err(QdacError::Measurement(_))
        ));
    }

    #[test]
    fn closed_form_matches_numeric_small() {
        let rho = rho_tilde::<f64>(&DacInstance::clock(1, 1).unwrap()).unwrap();
        for &theta in &[0.0, 0.4, 1.1780972450961724, 1.5] {
            let num = theta_family_conditional_entropy(&rho, theta).unwrap();
            assert!((num - clock_conditional_entropy(1, theta)).abs() < 1e-12, "{theta}");
        }
    }

    #[test]
    fn lr_discord_vanishes() {
        let rho = rho_tilde::<f64>(&DacInstance::clock(2, 2).unwrap()).unwrap();
        let r = discord_lr(&rho).unwrap();
        assert!(r.discord.abs() < 1e-12);
        assert!((r.s_a - 2.0).abs() < 1e-12);
    }

    #[test]
    fn bell_partial_transpose_is_npt() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = C::new(0.0, 0.0);
        let bell = DenseState::from_ket(RegisterLayout::plain(2), &[C::new(s, 0.0), z, z, C::new(s, 0.0)]).unwrap();
        let pt = partial_transpose(&bell, &[1]).unwrap();
        let ev = linalg::hermitian_eigenvalues(&pt);
        assert!((ev[0] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn bruteforce_needs_single_qubit_side() {
        let rho = rho_tilde::<f64>(&DacInstance::clock(1, 2).unwrap()).unwrap();
        let split = BipartiteSplit::ancillas_measured(rho.layout()).unwrap();
        let err = discord_bruteforce(&rho, &split, BruteforceGrid::default()).unwrap_err();
        assert!(matches!(err, QdacError::Capacity { .. }));
    }

    #[test]
    fn split_validation() {
        assert!(BipartiteSplit::new(3, vec![], "x").is_err());
        assert!(BipartiteSplit::new(3, vec![0, 1, 2], "x").is_err());
        assert!(BipartiteSplit::new(3, vec![0, 0], "x").is_err());
        assert!(BipartiteSplit::new(3, vec![3], "x").is_err());
        let s = BipartiteSplit::new(3, vec![2, 0], "x").unwrap();
        assert_eq!(s.side_b(), &[1]);
    }
}
