//! Acceptance criteria 1 to 10. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::f64::consts::FRAC_PI_2;
use std::time::{Duration, Instant};

use qdac_core::channels::{make_dephase, make_depolarize, verify_cptp};
use qdac_core::dac::{run_dac, run_dac_dense, DacInstance, Mode};
use qdac_core::discord::{
    clock_conditional_entropy, discord_lr, discord_theta_family, partial_transpose, rho_tilde,
    theta_family_conditional_entropy, BipartiteSplit,
};
use qdac_core::fetch::{fetch_signal_1, fetch_signal_2, noise_sweep, NoiseModel};
use qdac_core::qstate::{linalg, DenseState, Mat2, RegisterLayout};
use qdac_core::satdemo::{decide_sat_via_dac, sample_prop2, CnfFormula, SatDemoConfig};
use qdac_core::scalar::c;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// `(1/2^m) Σ_i 2^{i-n+1} [bit i of f(k) is set]`, summed bit by bit.
fn bitwise_amplitude(m: usize, n: usize, f: u64) -> f64 {
    let sum: f64 = (0..n)
        .filter(|&i| (f >> i) & 1 == 1)
        .map(|i| 2f64.powi(i as i32 - n as i32 + 1))
        .sum();
    sum / 2f64.powi(m as i32)
}

fn random_instance(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DacInstance {
    let table = (0..1usize << m).map(|_| rng.random_range(0..1u64 << n)).collect();
    DacInstance::new(m, n, table).unwrap()
}

fn within_time(start: Instant, limit: Duration, detail: String) -> Outcome {
    let took = start.elapsed();
    if took < limit {
        Ok(format!("{detail}, {took:.2?}"))
    } else {
        Err(format!("{detail}, but took {took:.2?} (limit {limit:?})"))
    }
}

fn exactness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut reads = 0;
    for _ in 0..100 {
        let m = rng.random_range(1..=10);
        let n = rng.random_range(1..=6);
        let inst = random_instance(&mut rng, m, n);
        let out = run_dac::<f64>(&inst, Mode::Mixed).map_err(|e| e.to_string())?;
        for k in 0..inst.pointers() {
            let want = bitwise_amplitude(m, n, inst.value(k));
            let r1 = out.fetch_signal_1(k).map_err(|e| e.to_string())?.amplitude;
            let r2 = out.fetch_signal_2(k).map_err(|e| e.to_string())?.amplitude;
            worst = worst.max((r1 - want).abs()).max((r2 - want).abs());
            reads += 2;
        }
    }
    if worst > 1e-12 {
        return Err(format!("max error {worst:e} over {reads} reads"));
    }
    within_time(
        start,
        Duration::from_secs(10),
        format!("max error {worst:e} over {reads} reads"),
    )
}

fn worked_example() -> Outcome {
    let inst = DacInstance::new(1, 3, vec![0b000, 0b101]).unwrap();
    let out = run_dac::<f64>(&inst, Mode::Mixed).map_err(|e| e.to_string())?;
    let s1 = fetch_signal_1(&out.state, 1).unwrap().amplitude * 2.0;
    let (r2, recovered) = fetch_signal_2(&out.state, 1).unwrap();
    let s2 = r2.amplitude * 2.0;
    let before = out.state.densify().unwrap();
    let recovery = before.max_abs_diff(&recovered.densify().unwrap());
    let dense = run_dac_dense::<f64>(&inst, Mode::Mixed).unwrap();
    let (d2, dense_back) = fetch_signal_2(&dense, 1).unwrap();
    let d1 = fetch_signal_1(&dense, 1).unwrap().amplitude * 2.0;
    let dense_recovery = dense.max_abs_diff(&dense_back);
    let err = [s1, s2, d1, d2.amplitude * 2.0]
        .iter()
        .map(|x| (x - 1.25).abs())
        .fold(0.0, f64::max);
    let detail = format!("signals {s1}, {s2}; recovery error {:e}", recovery.max(dense_recovery));
    if err <= 1e-12 && recovery <= 1e-12 && dense_recovery <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn backend_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for n in 1..=4usize {
        for m in 1..=(10 - 2 * n) {
            let top = (1u64 << n) - 1;
            let mut instances = vec![
                DacInstance::new(m, n, vec![0; 1 << m]).unwrap(),
                DacInstance::new(m, n, vec![top; 1 << m]).unwrap(),
                DacInstance::from_fn(m, n, |k| k as u64 & top).unwrap(),
            ];
            instances.extend((0..2).map(|_| random_instance(&mut rng, m, n)));
            for inst in &instances {
                let mut densified = Vec::new();
                for mode in [Mode::Pure, Mode::Mixed] {
                    let structured = run_dac::<f64>(inst, mode)
                        .map_err(|e| e.to_string())?
                        .state
                        .densify()
                        .unwrap();
                    let dense = run_dac_dense::<f64>(inst, mode).map_err(|e| e.to_string())?;
                    worst = worst.max(structured.max_abs_diff(&dense));
                    densified.push(structured);
                    cases += 1;
                }
                worst = worst.max(densified[0].max_abs_diff(&densified[1]));
            }
        }
    }
    let detail = format!("max entrywise difference {worst:e} over {cases} runs");
    if worst <= 1e-10 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn cptp_suite() -> Outcome {
    let mut worst = 0.0f64;
    let mut unital = 0.0f64;
    let half = Mat2::<f64>::maximally_mixed();
    for p in [0.0, 0.25, 0.5, 0.75, 1.0] {
        for ch in [make_dephase(p).unwrap(), make_depolarize(p).unwrap()] {
            let r = verify_cptp(&ch);
            if !(r.trace_preserving && r.completely_positive) {
                return Err(format!("{:?}({p}) not CPTP: {r:?}", ch.kind));
            }
            worst = worst.max(r.max_violation);
            unital = unital.max(ch.apply_to(&half).max_abs_diff(&half));
        }
    }
    let detail = format!("max violation {worst:e}, unitality error {unital:e}");
    if worst <= 1e-12 && unital <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn discord_numbers() -> Outcome {
    let start = Instant::now();
    let mut errs = [0.0f64; 4];
    for m in 1..=3 {
        for n in 1..=2 {
            let r = discord_theta_family::<f64>(m, n).map_err(|e| e.to_string())?;
            errs[0] = errs[0].max((r.conditional_min - (m as f64 - 0.399124)).abs());
            errs[1] = errs[1].max((r.s_a - 0.600876).abs());
            errs[2] = errs[2].max((r.discord - 0.201752).abs());
            let rho = rho_tilde::<f64>(&DacInstance::clock(m, n).unwrap()).unwrap();
            errs[3] = errs[3].max(discord_lr(&rho).map_err(|e| e.to_string())?.discord.abs());
        }
    }
    let detail = format!(
        "errors: conditional {:e}, S_A {:e}, D_A {:e}, D_LR {:e}",
        errs[0], errs[1], errs[2], errs[3]
    );
    if errs[0] > 1e-5 || errs[1] > 1e-6 || errs[2] > 1e-5 || errs[3] > 1e-9 {
        return Err(detail);
    }
    within_time(start, Duration::from_secs(30), detail)
}

fn closed_form_vs_numeric() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for m in 1..=2 {
        for n in 1..=2 {
            let rho = rho_tilde::<f64>(&DacInstance::clock(m, n).unwrap()).unwrap();
            for _ in 0..50 {
                let theta = rng.random_range(0.0..FRAC_PI_2);
                let numeric = theta_family_conditional_entropy(&rho, theta).map_err(|e| e.to_string())?;
                worst = worst.max((numeric - clock_conditional_entropy(m, theta)).abs());
            }
        }
    }
    let detail = format!("max difference {worst:e} over 200 angles");
    if worst <= 1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn partial_transpose_checks() -> Outcome {
    let mut worst = 0.0f64;
    for (m, n) in [(1, 1), (2, 1), (1, 2), (3, 2)] {
        let rho = rho_tilde::<f64>(&DacInstance::clock(m, n).unwrap()).unwrap();
        let layout = *rho.layout();
        for split in [
            BipartiteSplit::ancillas_measured(&layout),
            BipartiteSplit::data_measured(&layout),
        ] {
            let split = split.unwrap();
            let pt = partial_transpose(&rho, split.side_a()).unwrap();
            worst = worst.max(linalg::max_abs_diff(&pt, rho.matrix()));
        }
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bell = DenseState::<f64>::from_ket(
        RegisterLayout::plain(2),
        &[c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)],
    )
    .unwrap();
    let min = linalg::hermitian_eigenvalues(&partial_transpose(&bell, &[0]).unwrap())[0];
    let detail = format!("invariance error {worst:e}, Bell minimum eigenvalue {min}");
    if worst <= 1e-12 && (min + 0.5).abs() <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Every nonempty clause over `m` variables without repeated variables.
fn all_clauses(m: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for code in 1..3usize.pow(m as u32) {
        let mut clause = Vec::new();
        let mut x = code;
        for v in 1..=m as i64 {
            match x % 3 {
                1 => clause.push(v),
                2 => clause.push(-v),
                _ => {}
            }
            x /= 3;
        }
        out.push(clause);
    }
    out
}

/// Every clause subset for `m ≤ 2`, every formula of at most two clauses
/// for `m ≤ 4`.
fn small_family() -> Vec<CnfFormula> {
    let mut family = Vec::new();
    for m in 1..=4 {
        let clauses = all_clauses(m);
        if m <= 2 {
            for mask in 0..1u32 << clauses.len() {
                let pick = (0..clauses.len())
                    .filter(|&i| mask >> i & 1 == 1)
                    .map(|i| clauses[i].clone());
                family.push(CnfFormula::new(m, pick.collect()).unwrap());
            }
        } else {
            for i in 0..clauses.len() {
                for j in i..clauses.len() {
                    let pick = vec![clauses[i].clone(), clauses[j].clone()];
                    family.push(CnfFormula::new(m, pick).unwrap());
                }
            }
        }
    }
    family
}

fn sat_demo() -> Outcome {
    let noise = NoiseModel::new(0.05, 8, 16).unwrap();
    let mut formulas = small_family();
    let exhaustive = formulas.len();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..200 {
        let m = 5 + i % 2;
        let clauses = rng.random_range(m..=8 * m);
        formulas.push(CnfFormula::random(m, 3, clauses, i as u64).unwrap());
    }
    let mut sat_count = 0;
    for f in &formulas {
        let cfg = SatDemoConfig::new(f.num_vars(), 0.1, 0.1, 0.05).unwrap();
        let d = decide_sat_via_dac(f, &cfg, &noise).map_err(|e| e.to_string())?;
        let truth = f.brute_force_satisfiable();
        if d.satisfiable != truth {
            return Err(format!(
                "decision {} for {:?}, brute force {truth}",
                d.satisfiable,
                f.clauses()
            ));
        }
        sat_count += usize::from(truth);
    }

    let shots = 1000;
    let slack = 3.0 * ((2.0 / 3.0) * (1.0 / 3.0) / shots as f64).sqrt();
    let mut min_hat = 1.0f64;
    for (i, f) in formulas
        .iter()
        .filter(|f| f.brute_force_satisfiable())
        .step_by(25)
        .enumerate()
    {
        let eps = qdac_core::satdemo::default_epsilon(f.num_vars());
        let s = sample_prop2(f, 2, eps, shots, i as u64).unwrap();
        if s.p_s_exact < 1.0 / (1.0 + s.mu) || !s.decision {
            return Err(format!(
                "exact p_s {} below 1/(1+mu) for {:?}",
                s.p_s_exact,
                f.clauses()
            ));
        }
        min_hat = min_hat.min(s.p_s_hat);
    }
    if min_hat <= 2.0 / 3.0 - slack {
        return Err(format!("empirical p_s {min_hat} below 2/3 - 3 sigma"));
    }

    let mut min_p = 1.0f64;
    for (m, seed) in [(2, 0u64), (3, 1), (4, 2), (5, 3)] {
        let unsat = CnfFormula::new(m, vec![vec![1], vec![-1]]).unwrap();
        let s = sample_prop2(&unsat, 3, qdac_core::satdemo::default_epsilon(m), 10_000, seed).unwrap();
        if s.decision || s.p_s_exact != 0.0 {
            return Err(format!("unsatisfiable m = {m} reported a hit"));
        }
        let expected = 10_000.0 / (1u64 << m) as f64;
        let chi2: f64 = s.counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        let dof = ((1u64 << m) - 1) as f64;
        min_p = min_p.min(1.0 - ChiSquared::new(dof).unwrap().cdf(chi2));
    }
    let detail = format!(
        "{} formulas ({exhaustive} exhaustive, {sat_count} satisfiable), min p_s {min_hat}, min chi-square p {min_p:.3}",
        formulas.len()
    );
    if min_p > 0.01 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn snr_law() -> Outcome {
    let start = Instant::now();
    let ls: Vec<usize> = (1..=6).map(|j| 1usize << (2 * j)).collect();
    let points = noise_sweep(0.25, 0.05, 9, &ls, 100).map_err(|e| e.to_string())?;
    let ratios: Vec<f64> = points.windows(2).map(|w| w[1].snr / w[0].snr).collect();
    let detail = format!(
        "ratios {:?}",
        ratios.iter().map(|r| (r * 1000.0).round() / 1000.0).collect::<Vec<_>>()
    );
    if ratios.iter().any(|r| !(1.8..=2.2).contains(r)) {
        return Err(detail);
    }
    within_time(start, Duration::from_secs(10), detail)
}

fn nondemolition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let inst = random_instance(&mut rng, 3, 3);
    let out = run_dac::<f64>(&inst, Mode::Mixed).unwrap();
    let before = out.state.densify().unwrap();
    let mut structured = out.state.clone();
    let mut dense = run_dac_dense::<f64>(&inst, Mode::Mixed).unwrap();
    let dense_before = dense.clone();
    for _ in 0..100 {
        let k = rng.random_range(0..inst.pointers());
        if rng.random_bool(0.5) {
            fetch_signal_1(&structured, k).unwrap();
            fetch_signal_1(&dense, k).unwrap();
        } else {
            structured = fetch_signal_2(&structured, k).unwrap().1;
            dense = fetch_signal_2(&dense, k).unwrap().1;
        }
    }
    let drift = before
        .max_abs_diff(&structured.densify().unwrap())
        .max(dense_before.max_abs_diff(&dense));
    let detail = format!("drift after 100 reads {drift:e}");
    if drift <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("readout exactness on 100 random instances", exactness),
        ("worked example reads 1.25", worked_example),
        ("structured and dense pipelines agree", backend_equivalence),
        ("dephasing and depolarizing are CPTP and unital", cptp_suite),
        ("clock-state discord numbers", discord_numbers),
        (
            "closed-form conditional entropy matches numeric",
            closed_form_vs_numeric,
        ),
        (
            "partial-transpose invariance and Bell control",
            partial_transpose_checks,
        ),
        ("SAT decisions and sampling statistics", sat_demo),
        ("SNR doubles per 4x acquisitions", snr_law),
        ("repeated reads leave the state unchanged", nondemolition),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}
