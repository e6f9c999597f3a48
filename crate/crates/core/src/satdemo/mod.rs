//! Satisfiability through the converter.
//!
//! A CNF `φ` over `m` variables becomes the truth table
//! `f(k) = φ(k)·2^{n-1}`. Reading the top ancilla of the converter output
//! then reveals whether any assignment satisfies `φ`, once the analog
//! signal clears the accumulated noise floor. The unitary counterpart
//! samples pointers from amplitudes `|f̂(k)|² ∝ f(k) + ε`.
//!
//! Everything here runs in `f64`.

mod cnf;

pub use cnf::CnfFormula;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dac::{run_dac, DacInstance, Mode, MAX_DATA_BITS, MAX_POINTER_BITS};
use crate::error::{QdacError, Result};
use crate::fetch::{any_nonzero_signal, NoiseModel};

/// Device parameters of the analog readout.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SatDemoConfig {
    pub m: usize,
    /// Bound on the noise of each output.
    pub epsilon_th: f64,
    /// Smallest nonzero output amplitude.
    pub v_lsb: f64,
    /// Gap constant.
    pub c: f64,
    /// Smallest width with `2^{n-1} v_lsb > 2^m (epsilon_th + c)`.
    pub n: usize,
}

impl SatDemoConfig {
    pub fn new(m: usize, epsilon_th: f64, v_lsb: f64, c: f64) -> Result<Self> {
        if m == 0 || m > MAX_POINTER_BITS {
            return Err(QdacError::domain(format!("m must lie in 1..={MAX_POINTER_BITS}")));
        }
        for (name, x) in [("epsilon_th", epsilon_th), ("v_lsb", v_lsb), ("c", c)] {
            if !(x.is_finite() && x > 0.0) {
                return Err(QdacError::domain(format!("{name} = {x} must be positive")));
            }
        }
        let floor = 2f64.powi(m as i32) * (epsilon_th + c);
        let n = (1..=MAX_DATA_BITS)
            .find(|&n| 2f64.powi(n as i32 - 1) * v_lsb > floor)
            .ok_or_else(|| QdacError::domain(format!("no n <= {MAX_DATA_BITS} clears the noise floor")))?;
        Ok(Self {
            m,
            epsilon_th,
            v_lsb,
            c,
            n,
        })
    }

    /// Total noise bound of the mixture, `2^m ε_th`.
    pub fn noise_floor(&self) -> f64 {
        2f64.powi(self.m as i32) * self.epsilon_th
    }
}

/// `f(k) = φ(k)·2^{n-1}`.
pub fn cnf_to_instance(cnf: &CnfFormula, n: usize) -> Result<DacInstance> {
    if n == 0 || n > MAX_DATA_BITS {
        return Err(QdacError::domain(format!("n must lie in 1..={MAX_DATA_BITS}")));
    }
    let top = 1u64 << (n - 1);
    DacInstance::from_fn(cnf.num_vars(), n, |k| if cnf.evaluate(k) { top } else { 0 })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SatDecision {
    pub satisfiable: bool,
    /// Noiseless signal over the noise floor, `signal / (2^m ε_th)`.
    pub snr: f64,
    /// Top-ancilla reading: fraction of satisfying assignments.
    pub msb_reading: f64,
    /// Noiseless analog signal `#sat · 2^{n-1} v_lsb`.
    pub signal: f64,
    /// Signal plus truncated noise, averaged over the acquisitions.
    pub accumulated: f64,
    pub threshold: f64,
    pub n: usize,
}

/// Runs the converter on the CNF's table, reads the top ancilla, adds
/// per-output noise truncated at `±ε_th` and compares the acquisition
/// average with `2^m ε_th`.
pub fn decide_sat_via_dac(cnf: &CnfFormula, cfg: &SatDemoConfig, noise: &NoiseModel) -> Result<SatDecision> {
    if cnf.num_vars() != cfg.m {
        return Err(QdacError::domain(format!(
            "formula has {} variables, config expects {}",
            cnf.num_vars(),
            cfg.m
        )));
    }
    let inst = cnf_to_instance(cnf, cfg.n)?;
    let out = run_dac::<f64>(&inst, Mode::Mixed)?;
    let msb_reading = any_nonzero_signal(&out.state, true)?;
    let outputs = inst.pointers();
    let signal = msb_reading * outputs as f64 * 2f64.powi(cfg.n as i32 - 1) * cfg.v_lsb;
    let mut sampler = noise.with_bound(cfg.epsilon_th)?.sampler()?;
    let mut sum = 0.0;
    for _ in 0..noise.acquisitions {
        let noise_total: f64 = (0..outputs).map(|_| sampler.draw()).sum();
        sum += signal + noise_total;
    }
    let accumulated = sum / noise.acquisitions as f64;
    let threshold = cfg.noise_floor();
    Ok(SatDecision {
        satisfiable: accumulated > threshold,
        snr: signal / threshold,
        msb_reading,
        signal,
        accumulated,
        threshold,
        n: cfg.n,
    })
}

/// Amplitudes of `Σ_k f̂(k)|f(k)⟩|k⟩`, real and nonnegative, indexed by `k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VhatState {
    pub amplitudes: Vec<f64>,
    pub epsilon: f64,
}

impl VhatState {
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a * a).collect()
    }
}

/// Default bias `2^{-(m+1)}`.
pub fn default_epsilon(m: usize) -> f64 {
    2f64.powi(-(m as i32 + 1))
}

/// `|f̂(k)|² = (f(k) + ε) / Σ_j (f(j) + ε)`, requiring `0 < ε < 2^{-m}`.
pub fn build_vhat_state(inst: &DacInstance, epsilon: f64) -> Result<VhatState> {
    let upper = 2f64.powi(-(inst.m() as i32));
    if !(epsilon > 0.0 && epsilon < upper) {
        return Err(QdacError::domain(format!(
            "epsilon {epsilon} outside (0, 2^-{})",
            inst.m()
        )));
    }
    let weights: Vec<f64> = inst.table().iter().map(|&v| v as f64 + epsilon).collect();
    let total: f64 = weights.iter().sum();
    Ok(VhatState {
        amplitudes: weights.iter().map(|w| (w / total).sqrt()).collect(),
        epsilon,
    })
}

/// `μ = (2^m - 1) / 2^{m+n-1}`; satisfiable formulas give `p_s > 1/(1+μ)`.
pub fn unsatisfied_weight_bound(m: usize, n: usize) -> f64 {
    (2f64.powi(m as i32) - 1.0) / 2f64.powi((m + n - 1) as i32)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointerSample {
    /// Fraction of shots whose pointer satisfies the formula.
    pub p_s_hat: f64,
    /// Whether any shot satisfied the formula.
    pub decision: bool,
    /// Exact `Σ_{φ(k)=1} |f̂(k)|²`.
    pub p_s_exact: f64,
    pub mu: f64,
    /// Shot counts per pointer.
    pub counts: Vec<u64>,
}

/// Measures the R register of the `V̂` state `shots` times and checks each
/// outcome against the formula.
pub fn sample_prop2(cnf: &CnfFormula, n: usize, epsilon: f64, shots: usize, seed: u64) -> Result<PointerSample> {
    if n < 2 {
        return Err(QdacError::domain("the sampling argument needs n >= 2"));
    }
    if shots == 0 {
        return Err(QdacError::domain("at least one shot required"));
    }
    let inst = cnf_to_instance(cnf, n)?;
    let probs = build_vhat_state(&inst, epsilon)?.probabilities();
    let dist = WeightedIndex::new(&probs).map_err(|e| QdacError::domain(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        counts[dist.sample(&mut rng)] += 1;
    }
    let hits: u64 = counts
        .iter()
        .enumerate()
        .filter(|&(k, _)| cnf.evaluate(k))
        .map(|(_, &c)| c)
        .sum();
    let p_s_exact = probs
        .iter()
        .enumerate()
        .filter(|&(k, _)| cnf.evaluate(k))
        .map(|(_, p)| p)
        .sum();
    Ok(PointerSample {
        p_s_hat: hits as f64 / shots as f64,
        decision: hits > 0,
        p_s_exact,
        mu: unsatisfied_weight_bound(cnf.num_vars(), n),
        counts,
    })
}
