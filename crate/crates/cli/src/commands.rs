use std::path::Path;

use qdac_core::dac::{self, AncillaParams, DacInstance, Mode};
use qdac_core::discord::{self, DiscordReport};
use qdac_core::fetch::{self, noise_sweep as sweep, FetchResult, NoiseModel, Observe};
use qdac_core::gates::ApplyGate;
use qdac_core::qstate::{DeviationState, DeviationTag};
use qdac_core::satdemo::{self, CnfFormula, SatDemoConfig};
use serde::Serialize;
use serde_json::json;

use crate::output::{read_text, write_csv, write_json};
use crate::{
    BackendArg, CliError, CliResult, DiscordArgs, FetchArgs, Format, ModeArg, NoiseSweepArgs, PipelineArgs, RouteArg,
    RunDacArgs, SatArgs, SideArg,
};

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Pure => Mode::Pure,
            ModeArg::Mixed => Mode::Mixed,
        }
    }
}

fn load_instance(path: &Path) -> CliResult<DacInstance> {
    Ok(DacInstance::parse_truth_table(&read_text(path)?)?)
}

/// The structured pipeline, or the dense oracle read back into the same
/// output form.
fn pipeline(inst: &DacInstance, args: &PipelineArgs) -> CliResult<dac::DacOutput<f64>> {
    let mode = args.mode.into();
    match args.backend {
        BackendArg::Structured | BackendArg::Auto => Ok(dac::run_dac::<f64>(inst, mode)?),
        BackendArg::Dense => {
            let dense = dac::run_dac_dense::<f64>(inst, mode)?;
            let state = dac::decompose(&dense)?;
            let params = dac::ancilla_params(inst.n());
            let deviation = dac::to_deviation(&state, &params)?;
            Ok(dac::DacOutput {
                state,
                deviation,
                params,
            })
        }
    }
}

#[derive(Serialize)]
struct ComponentSummary {
    k: usize,
    f_k: u64,
    weight: f64,
    /// Ancilla deviations indexed by bit.
    coefficients: Vec<f64>,
}

fn summarize(dev: &DeviationState<f64>, inst: &DacInstance) -> Vec<ComponentSummary> {
    let layout = *dev.layout();
    dev.components()
        .iter()
        .enumerate()
        .map(|(idx, c)| {
            let k = layout.r_positions().fold(0usize, |acc, p| {
                acc << 1 | usize::from(matches!(c.tags[p], DeviationTag::Bit(true)))
            });
            ComponentSummary {
                k,
                f_k: inst.value(k),
                weight: c.weight,
                coefficients: dev.coefficients(idx).unwrap_or_default(),
            }
        })
        .collect()
}

pub fn run_dac(args: &RunDacArgs) -> CliResult<()> {
    let inst = load_instance(&args.pipeline.input)?;
    let out = pipeline(&inst, &args.pipeline)?;
    let params: &[AncillaParams<f64>] = &out.params;
    let components = summarize(&out.deviation, &inst);
    write_json(
        args.output.as_deref(),
        json!({
            "m": inst.m(),
            "n": inst.n(),
            "qubits": out.layout().total(),
            "mode": Mode::from(args.pipeline.mode),
            "backend": format!("{:?}", args.pipeline.backend).to_lowercase(),
            "params": params,
            "component_count": components.len(),
            "components": components,
        }),
    )
}

#[derive(Serialize)]
struct FetchRow {
    k: String,
    f_k: String,
    amplitude_route1: Option<f64>,
    amplitude_route2: Option<f64>,
    expected: f64,
    delta: Option<f64>,
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

/// Route-2 reading of a pointer set: the sum of the per-pointer readings.
fn fetch_rows<S: Observe<f64> + ApplyGate<f64>>(
    state: &S,
    inst: &DacInstance,
    sets: &[Vec<usize>],
    route: RouteArg,
) -> CliResult<Vec<FetchRow>> {
    sets.iter()
        .map(|ks| {
            let r1 = match route {
                RouteArg::Hadamard => None,
                _ => Some(fetch::fetch_mixed(state, ks)?),
            };
            let r2 = match route {
                RouteArg::Projective => None,
                _ => Some(
                    ks.iter()
                        .map(|&k| fetch::fetch_signal_2(state, k).map(|(r, _)| r.amplitude))
                        .sum::<qdac_core::Result<f64>>()?,
                ),
            };
            let a1 = r1.as_ref().map(|r: &FetchResult<f64>| r.amplitude);
            Ok(FetchRow {
                k: join(ks),
                f_k: join(&ks.iter().map(|&k| inst.value(k)).collect::<Vec<_>>()),
                amplitude_route1: a1,
                amplitude_route2: r2,
                expected: ks.iter().map(|&k| fetch::expected_amplitude::<f64>(inst, k)).sum(),
                delta: a1.zip(r2).map(|(x, y)| (x - y).abs()),
            })
        })
        .collect()
}

pub fn fetch(args: &FetchArgs) -> CliResult<()> {
    let inst = load_instance(&args.pipeline.input)?;
    let sel = &args.selection;
    let sets: Vec<Vec<usize>> = if let Some(k) = sel.k {
        vec![vec![k]]
    } else if let Some(ks) = &sel.mix {
        let mut ks = ks.clone();
        ks.sort_unstable();
        ks.dedup();
        vec![ks]
    } else {
        (0..inst.pointers()).map(|k| vec![k]).collect()
    };
    let rows = match args.pipeline.backend {
        BackendArg::Dense => {
            let state = dac::run_dac_dense::<f64>(&inst, args.pipeline.mode.into())?;
            fetch_rows(&state, &inst, &sets, args.route)?
        }
        _ => fetch_rows(&pipeline(&inst, &args.pipeline)?.state, &inst, &sets, args.route)?,
    };
    match args.format {
        Format::Json => write_json(args.output.as_deref(), json!({ "rows": rows })),
        Format::Csv => {
            let mut header = vec!["k", "f_k"];
            match args.route {
                RouteArg::Projective => header.push("amplitude_route1"),
                RouteArg::Hadamard => header.push("amplitude_route2"),
                RouteArg::Both => header.extend(["amplitude_route1", "amplitude_route2"]),
            }
            header.push("expected");
            if args.route == RouteArg::Both {
                header.push("delta");
            }
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut rec = vec![r.k.clone(), r.f_k.clone()];
                    rec.extend(r.amplitude_route1.map(|x| x.to_string()));
                    rec.extend(r.amplitude_route2.map(|x| x.to_string()));
                    rec.push(r.expected.to_string());
                    rec.extend(r.delta.map(|x| x.to_string()));
                    rec
                })
                .collect();
            write_csv(args.output.as_deref(), &header, &table)
        }
    }
}

pub fn discord(args: &DiscordArgs) -> CliResult<()> {
    if args.sweep_theta {
        let samples = discord::theta_sweep::<f64>(args.m, args.n, args.points)?;
        let rows: Vec<Vec<String>> = samples
            .iter()
            .map(|s| {
                vec![
                    s.theta.to_string(),
                    s.closed_form_value.to_string(),
                    s.numeric_value.to_string(),
                ]
            })
            .collect();
        return write_csv(
            args.output.as_deref(),
            &["theta", "closed_form_value", "numeric_value"],
            &rows,
        );
    }
    let report: DiscordReport<f64> = match args.side {
        SideArg::A => discord::discord_theta_family(args.m, args.n)?,
        SideArg::Lr => {
            let rho = discord::rho_tilde::<f64>(&DacInstance::clock(args.m, args.n)?)?;
            discord::discord_lr(&rho)?
        }
    };
    let mut body = serde_json::to_value(&report).map_err(|e| CliError::Usage(e.to_string()))?;
    body["m"] = args.m.into();
    body["n"] = args.n.into();
    write_json(args.output.as_deref(), body)
}

pub fn sat(args: &SatArgs) -> CliResult<()> {
    let cnf = CnfFormula::parse_dimacs(&read_text(&args.input)?)?;
    let cfg = SatDemoConfig::new(cnf.num_vars(), args.epsilon_th, args.v_lsb, args.c)?;
    let noise = NoiseModel::new(args.sigma, args.seed, args.acquisitions)?;
    let decision = satdemo::decide_sat_via_dac(&cnf, &cfg, &noise)?;
    let sampling = if args.shots > 0 {
        let eps = satdemo::default_epsilon(cnf.num_vars());
        let s = satdemo::sample_prop2(&cnf, cfg.n.max(2), eps, args.shots, args.seed)?;
        Some(json!({
            "shots": args.shots,
            "epsilon": eps,
            "p_s_hat": s.p_s_hat,
            "p_s_exact": s.p_s_exact,
            "mu": s.mu,
            "decision": s.decision,
        }))
    } else {
        None
    };
    write_json(
        args.output.as_deref(),
        json!({
            "num_vars": cnf.num_vars(),
            "num_clauses": cnf.clauses().len(),
            "config": cfg,
            "noise": noise,
            "decision": decision,
            "satisfiable": decision.satisfiable,
            "sampling": sampling,
        }),
    )
}

pub fn noise_sweep(args: &NoiseSweepArgs) -> CliResult<()> {
    if args.factor < 2 {
        return Err(CliError::Usage("--factor must be at least 2".into()));
    }
    if args.l_min == 0 || args.l_min > args.l_max {
        return Err(CliError::Usage("need 1 <= --l-min <= --l-max".into()));
    }
    let amplitude = args.amplitude.unwrap_or_else(|| 2f64.powi(-(args.m as i32)));
    let ls: Vec<usize> = std::iter::successors(Some(args.l_min), |&l| l.checked_mul(args.factor))
        .take_while(|&l| l <= args.l_max)
        .collect();
    let points = sweep(amplitude, args.sigma, args.seed, &ls, args.replicates)?;
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| vec![p.acquisitions.to_string(), p.snr.to_string()])
        .collect();
    write_csv(args.output.as_deref(), &["L", "snr"], &rows)
}
