//! Ensemble-averaged readout of the converter output and the noise
//! accumulation model.
//!
//! Every readout is a trace against an observable; states are borrowed
//! immutably, so fetching never disturbs the state it reads.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::dac::{DacInstance, DacOutput};
use crate::error::{QdacError, Result};
use crate::gates::{controlled_block_hadamard, ApplyGate};
use crate::qstate::{DenseState, EnsembleState, Mat2, Pauli, QuantumState};
use crate::scalar::{Real, C};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Project onto `|k⟩`, then read `Σ Z_i`.
    Projective,
    /// Block Hadamard on component `k`, read `Σ X_i`, undo the block.
    ControlledHadamard,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FetchResult<T> {
    /// Pointers covered by the projection; one entry for a single fetch.
    pub pointers: Vec<usize>,
    /// Unnormalized signal `Tr[P ρ P · O]`.
    pub amplitude: T,
    pub route: Route,
}

/// Trace of a state against `P_K ⊗ Σ_i σ_i`, where `P_K` projects the R
/// register onto a pointer set and `σ_i` acts on ancilla bit `i`.
pub trait Observe<T: Real>: QuantumState<T> {
    /// `pointers = None` means the identity on R.
    fn ancilla_expectation(&self, pointers: Option<&BTreeSet<usize>>, pauli: Pauli, ancillas: &[usize]) -> T;
}

impl<T: Real> Observe<T> for DenseState<T> {
    fn ancilla_expectation(&self, pointers: Option<&BTreeSet<usize>>, pauli: Pauli, ancillas: &[usize]) -> T {
        let layout = *self.layout();
        let m = self.matrix();
        let sigma = Mat2::<T>::pauli(pauli);
        let mut acc = C::new(T::zero(), T::zero());
        for idx in 0..layout.dim() {
            if pointers.is_some_and(|ks| !ks.contains(&layout.r_value(idx))) {
                continue;
            }
            for &i in ancillas {
                let t = 1usize << layout.bit(layout.a(i));
                let b = usize::from(idx & t != 0);
                // Tr[ρ O] = Σ_{r,c} ρ[c, r] O[r, c]
                for bc in 0..2 {
                    let o = sigma.m[b][bc];
                    if o.re != T::zero() || o.im != T::zero() {
                        let col = (idx & !t) | (bc * t);
                        acc = acc + m[(col, idx)] * o;
                    }
                }
            }
        }
        acc.re
    }
}

impl<T: Real> Observe<T> for EnsembleState<T> {
    fn ancilla_expectation(&self, pointers: Option<&BTreeSet<usize>>, pauli: Pauli, ancillas: &[usize]) -> T {
        let layout = *self.layout();
        let sigma = Mat2::<T>::pauli(pauli);
        let a_pos: Vec<usize> = ancillas.iter().map(|&i| layout.a(i)).collect();
        let mut total = T::zero();
        for comp in self.components() {
            if comp.weight == T::zero() {
                continue;
            }
            let r_weight = match pointers {
                None => layout
                    .r_positions()
                    .map(|p| comp.factors[p].trace().re)
                    .fold(T::one(), |a, b| a * b),
                // small sets: Σ_k Π_j ⟨k_j|F_j|k_j⟩, stopping at the first zero
                Some(ks) if ks.len() <= layout.n_r.max(1) => ks
                    .iter()
                    .map(|&k| {
                        let mut w = T::one();
                        for j in (0..layout.n_r).rev() {
                            let b = (k >> j) & 1;
                            w = w * comp.factors[layout.r(j)].m[b][b].re;
                            if w == T::zero() {
                                break;
                            }
                        }
                        w
                    })
                    .fold(T::zero(), |a, b| a + b),
                Some(ks) => match comp.basis_value(layout.r_positions()) {
                    Some(k) => T::from(u8::from(ks.contains(&k))).unwrap_or_else(T::zero),
                    None => ks
                        .iter()
                        .map(|&k| {
                            (0..layout.n_r)
                                .map(|j| {
                                    let b = (k >> j) & 1;
                                    comp.factors[layout.r(j)].m[b][b].re
                                })
                                .fold(T::one(), |a, b| a * b)
                        })
                        .sum(),
                },
            };
            if r_weight == T::zero() {
                continue;
            }
            let l_weight = layout
                .l_positions()
                .map(|p| comp.factors[p].trace().re)
                .fold(T::one(), |a, b| a * b);
            // Σ_{p ∈ a_pos} Tr(F_p σ) Π_{q ≠ p} Tr F_q in one pass: `obs` holds
            // the sum over the processed prefix, `prod` its trace product
            let (mut obs, mut prod) = (T::zero(), T::one());
            for q in layout.a_positions() {
                let t = comp.factors[q].trace().re;
                obs = obs * t;
                if a_pos.contains(&q) {
                    obs = obs + comp.factors[q].trace_product(&sigma).re * prod;
                }
                prod = prod * t;
            }
            total = total + comp.weight * r_weight * l_weight * obs;
        }
        total
    }
}

fn check_pointer(layout_r: usize, k: usize) -> Result<()> {
    if layout_r < usize::BITS as usize && k >> layout_r != 0 {
        Err(QdacError::domain(format!(
            "pointer {k} outside a {layout_r}-bit register"
        )))
    } else {
        Ok(())
    }
}

fn all_ancillas<T: Real, S: QuantumState<T>>(s: &S) -> Result<Vec<usize>> {
    let n_a = s.layout().n_a;
    if n_a == 0 {
        return Err(QdacError::layout("readout needs an ancilla register"));
    }
    Ok((0..n_a).collect())
}

/// Projective route: `Tr[(P_k ρ P_k)(I ⊗ Σ Z_i)]`.
pub fn fetch_signal_1<T: Real, S: Observe<T>>(state: &S, k: usize) -> Result<FetchResult<T>> {
    check_pointer(state.layout().n_r, k)?;
    let anc = all_ancillas(state)?;
    let ks = BTreeSet::from([k]);
    Ok(FetchResult {
        pointers: vec![k],
        amplitude: state.ancilla_expectation(Some(&ks), Pauli::Z, &anc),
        route: Route::Projective,
    })
}

/// Controlled-Hadamard route. Returns the reading and the state after the
/// recovery step, which equals the input.
pub fn fetch_signal_2<T: Real, S: Observe<T> + ApplyGate<T>>(state: &S, k: usize) -> Result<(FetchResult<T>, S)> {
    check_pointer(state.layout().n_r, k)?;
    let anc = all_ancillas(state)?;
    let rotated = controlled_block_hadamard(k, state)?;
    let amplitude = rotated.ancilla_expectation(None, Pauli::X, &anc);
    let recovered = controlled_block_hadamard(k, &rotated)?;
    Ok((
        FetchResult {
            pointers: vec![k],
            amplitude,
            route: Route::ControlledHadamard,
        },
        recovered,
    ))
}

/// Rank-`r` projection onto a pointer set, then `Σ Z_i`.
pub fn fetch_mixed<T: Real, S: Observe<T>>(state: &S, ks: &[usize]) -> Result<FetchResult<T>> {
    if ks.is_empty() {
        return Err(QdacError::domain("empty pointer set"));
    }
    let n_r = state.layout().n_r;
    for &k in ks {
        check_pointer(n_r, k)?;
    }
    let set: BTreeSet<usize> = ks.iter().copied().collect();
    let anc = all_ancillas(state)?;
    Ok(FetchResult {
        pointers: set.iter().copied().collect(),
        amplitude: state.ancilla_expectation(Some(&set), Pauli::Z, &anc),
        route: Route::Projective,
    })
}

/// `Tr[ρ (I ⊗ Σ Z_i)]`, or only the top ancilla `Z_{n-1}` when `msb_only`.
/// The full reading is zero exactly when the truth table is zero.
pub fn any_nonzero_signal<T: Real, S: Observe<T>>(state: &S, msb_only: bool) -> Result<T> {
    let anc = all_ancillas(state)?;
    let anc = if msb_only { vec![anc.len() - 1] } else { anc };
    Ok(state.ancilla_expectation(None, Pauli::Z, &anc))
}

/// Closed-form reading `2^{-m} Σ_i 2^{i-n+1} f_i(k) = f(k) / 2^{m+n-1}`.
pub fn expected_amplitude<T: Real>(inst: &DacInstance, k: usize) -> T {
    let scale = 2f64.powi(-((inst.m() + inst.n() - 1) as i32));
    T::lit(inst.value(k) as f64 * scale)
}

impl<T: Real> DacOutput<T> {
    pub fn fetch_signal_1(&self, k: usize) -> Result<FetchResult<T>> {
        fetch_signal_1(&self.state, k)
    }

    pub fn fetch_signal_2(&self, k: usize) -> Result<FetchResult<T>> {
        fetch_signal_2(&self.state, k).map(|(r, _)| r)
    }

    pub fn fetch_mixed(&self, ks: &[usize]) -> Result<FetchResult<T>> {
        fetch_mixed(&self.state, ks)
    }

    pub fn any_nonzero_signal(&self, msb_only: bool) -> Result<T> {
        any_nonzero_signal(&self.state, msb_only)
    }
}

/// I.i.d. zero-mean Gaussian noise added to each of `acquisitions` reads.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoiseModel {
    pub sigma: f64,
    pub seed: u64,
    pub acquisitions: usize,
    /// Optional truncation `|ε| ≤ bound`, realized by rejection sampling.
    pub bound: Option<f64>,
}

impl NoiseModel {
    pub fn new(sigma: f64, seed: u64, acquisitions: usize) -> Result<Self> {
        let m = Self {
            sigma,
            seed,
            acquisitions,
            bound: None,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn with_bound(mut self, bound: f64) -> Result<Self> {
        self.bound = Some(bound);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(QdacError::domain(format!(
                "noise sigma {} must be finite and >= 0",
                self.sigma
            )));
        }
        if self.acquisitions == 0 {
            return Err(QdacError::domain("at least one acquisition required"));
        }
        if let Some(b) = self.bound {
            if !(b.is_finite() && b >= 0.0) {
                return Err(QdacError::domain(format!("noise bound {b} must be finite and >= 0")));
            }
        }
        Ok(())
    }

    /// Same model for replicate `r`; seeds are split as `seed + r`.
    pub fn replicate(&self, r: u64) -> Self {
        Self {
            seed: self.seed.wrapping_add(r),
            ..*self
        }
    }

    /// Seeded sampler for this model.
    pub fn sampler(&self) -> Result<NoiseSampler> {
        self.validate()?;
        Ok(NoiseSampler {
            rng: ChaCha8Rng::seed_from_u64(self.seed),
            normal: Normal::new(0.0, self.sigma).map_err(|e| QdacError::domain(e.to_string()))?,
            bound: self.bound,
        })
    }
}

/// Deterministic stream of noise draws.
#[derive(Clone, Debug)]
pub struct NoiseSampler {
    rng: ChaCha8Rng,
    normal: Normal<f64>,
    bound: Option<f64>,
}

impl NoiseSampler {
    pub fn draw(&mut self) -> f64 {
        match self.bound {
            Some(0.0) => 0.0,
            Some(b) => loop {
                let x = self.normal.sample(&mut self.rng);
                if x.abs() <= b {
                    break x;
                }
            },
            None => self.normal.sample(&mut self.rng),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AccumulationReport {
    pub acquisitions: usize,
    pub mean: f64,
    /// Sample standard deviation of the mean (0 for a single acquisition).
    pub std: f64,
    /// Noiseless figure `L·|a| / (σ√L)`; infinite when `σ = 0`.
    pub snr: f64,
    /// `sgn(a)·Σ x_j / (σ√L)` from the drawn samples, an unbiased estimate
    /// of `snr`; infinite when `σ = 0`.
    pub measured_snr: f64,
}

/// Sums `L` noisy reads of `true_amplitude`.
pub fn simulate_accumulation(true_amplitude: f64, noise: &NoiseModel) -> Result<AccumulationReport> {
    let mut sampler = noise.sampler()?;
    let l = noise.acquisitions;
    let xs: Vec<f64> = (0..l).map(|_| true_amplitude + sampler.draw()).collect();
    let sum: f64 = xs.iter().sum();
    let mean = sum / l as f64;
    let std = if l > 1 {
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (l - 1) as f64;
        (var / l as f64).sqrt()
    } else {
        0.0
    };
    let noise_scale = noise.sigma * (l as f64).sqrt();
    let (snr, measured_snr) = if noise.sigma == 0.0 {
        (f64::INFINITY, f64::INFINITY)
    } else {
        (
            l as f64 * true_amplitude.abs() / noise_scale,
            true_amplitude.signum() * sum / noise_scale,
        )
    };
    Ok(AccumulationReport {
        acquisitions: l,
        mean,
        std,
        snr,
        measured_snr,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub acquisitions: usize,
    /// Replicate mean of the measured SNR.
    pub snr: f64,
    pub theoretical_snr: f64,
}

/// Measured SNR averaged over `replicates` seeds for every `L` in `ls`.
/// Replicate `r` of every point uses seed `seed + r`.
pub fn noise_sweep(
    true_amplitude: f64,
    sigma: f64,
    seed: u64,
    ls: &[usize],
    replicates: usize,
) -> Result<Vec<SweepPoint>> {
    if replicates == 0 {
        return Err(QdacError::domain("at least one replicate required"));
    }
    ls.iter()
        .map(|&l| {
            let base = NoiseModel::new(sigma, seed, l)?;
            let mut acc = 0.0;
            let mut theory = 0.0;
            for r in 0..replicates {
                let rep = simulate_accumulation(true_amplitude, &base.replicate(r as u64))?;
                acc += rep.measured_snr;
                theory = rep.snr;
            }
            Ok(SweepPoint {
                acquisitions: l,
                snr: acc / replicates as f64,
                theoretical_snr: theory,
            })
        })
        .collect()
}
