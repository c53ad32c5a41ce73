//! `qnc`: validate, evaluate, normalize, compile, simulate and report on
//! network coding instances.
//!
//! Exit codes: 0 success, 1 requirement or fidelity failure, 2 usage,
//! 3 parse error, 4 validation failure, 5 size guard, 6 anything else.

use clap::{Parser, Subcommand, ValueEnum};
use qnc_core::bundled;
use qnc_core::compile::{compile, QuantumProtocol};
use qnc_core::eval::{check_requirement, EvalError, TruthTable};
use qnc_core::netgraph::{normalize_to_d3, D3Network, Instance, Letter, NetworkFile, NormalizeError};
use qnc_core::par::Execution;
use qnc_core::qmath::{ket_from_angles, DensityMatrix2};
use qnc_core::rational::{self, Rational};
use qnc_core::sim::{
    fidelity_report, float_json, simulate_analytic, simulate_montecarlo, simulate_oracle, ReportOptions, SimError,
    SourceInput,
};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "qnc",
    version,
    about = "Quantum network coding from classical codes over four letters"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a network file and report every violation.
    Validate(Common),
    /// Exhaustive truth table as CSV, plus the requirement verdict.
    Eval(Common),
    /// Rewrite into a degree-3 network file.
    Normalize(Common),
    /// Shrinking factors and ops per node.
    Compile(Common),
    /// Simulate one input tuple.
    Simulate(SimArgs),
    /// Per-sink fidelity table; exits 0 iff every sink beats 1/2.
    Report(SimArgs),
}

#[derive(clap::Args, Debug)]
struct Common {
    /// Network JSON, a compile artifact, or `bundled:NAME`.
    input: String,
    /// Write the artifact here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
struct SimArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value_t = Mode::Analytic)]
    mode: Mode,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// One entry per source in declaration order: a tetra label such as
    /// `01`, or Bloch angles `THETA:PHI`. Defaults to `00` everywhere.
    #[arg(long, value_delimiter = ',')]
    inputs: Option<Vec<String>>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Analytic,
    Oracle,
    Montecarlo,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

const FAILED: u8 = 1;
const USAGE: u8 = 2;
const PARSE: u8 = 3;
const INVALID: u8 = 4;
const TOO_LARGE: u8 = 5;
const OTHER: u8 = 6;

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        let code = match e {
            SimError::TooLarge { .. } => TOO_LARGE,
            SimError::InputArity { .. } | SimError::NoTrials | SimError::InexactInput { .. } => USAGE,
            _ => OTHER,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        Failure::new(TOO_LARGE, e.to_string())
    }
}

impl From<NormalizeError> for Failure {
    fn from(e: NormalizeError) -> Self {
        let code = match e {
            NormalizeError::Invalid(_) => INVALID,
            _ => OTHER,
        };
        Failure::new(code, e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("QNC_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Validate(c) => validate(&c),
        Command::Eval(c) => eval(&c),
        Command::Normalize(c) => normalize(&c),
        Command::Compile(c) => compile_cmd(&c),
        Command::Simulate(a) => simulate(&a),
        Command::Report(a) => report(&a),
    }
}

/// Raw JSON of a file or bundled instance.
fn read_source(input: &str) -> Result<String, Failure> {
    if let Some(name) = input.strip_prefix("bundled:") {
        let names: Vec<&str> = bundled::ALL.iter().map(|(n, _)| *n).collect();
        return bundled::ALL
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, json)| json.to_string())
            .ok_or_else(|| {
                Failure::new(
                    USAGE,
                    format!("no bundled instance {name:?}; have {}", names.join(", ")),
                )
            });
    }
    std::fs::read_to_string(input).map_err(|e| Failure::new(OTHER, format!("cannot read {input}: {e}")))
}

/// Network file from either a plain network or a compile artifact.
fn read_network(input: &str) -> Result<NetworkFile, Failure> {
    let text = read_source(input)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Failure::new(PARSE, format!("{input}: {e}")))?;
    let net = match value.get("network") {
        Some(inner) if value.get("protocol").is_some() => inner.clone(),
        _ => value,
    };
    serde_json::from_value(net).map_err(|e| Failure::new(PARSE, format!("{input}: {e}")))
}

fn read_instance(input: &str) -> Result<Instance, Failure> {
    Instance::from_file(read_network(input)?)
        .map_err(|report| Failure::new(INVALID, format!("{input} is not a valid network:\n{report}")))
}

/// The instance as a D3 network, normalizing only when it is not one already.
fn read_d3(input: &str) -> Result<D3Network, Failure> {
    let inst = read_instance(input)?;
    match D3Network::from_instance(&inst) {
        Ok(d3) => Ok(d3),
        Err(e) => {
            log::info!("normalizing {input}: {e}");
            Ok(normalize_to_d3(&inst)?.0)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Failure::new(OTHER, format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(out: Option<&Path>, value: &Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    text.push('\n');
    emit(out, &text)
}

fn validate(c: &Common) -> Outcome {
    let inst = read_instance(&c.input)?;
    let kind = if D3Network::from_instance(&inst).is_ok() {
        "degree-3 network"
    } else {
        "network"
    };
    println!(
        "ok: {kind} with {} nodes, {} edges, {} sources, {} sinks",
        inst.network.nodes.len(),
        inst.network.edges.len(),
        inst.sources.len(),
        inst.sinks.len()
    );
    Ok(0)
}

fn eval(c: &Common) -> Outcome {
    let inst = read_instance(&c.input)?;
    let table = TruthTable::build(&inst, Execution::default())?;
    emit(c.out.as_deref(), &table.to_csv())?;
    let check = check_requirement(&inst, Execution::default())?;
    match check.counterexample {
        None => {
            eprintln!("requirement satisfied on all {} inputs", table.rows.len());
            Ok(0)
        }
        Some((input, got)) => {
            let show = |ls: &[Letter]| ls.iter().map(Letter::to_string).collect::<Vec<_>>().join(",");
            eprintln!("requirement fails: inputs {} deliver {}", show(&input), show(&got));
            Ok(FAILED)
        }
    }
}

fn normalize(c: &Common) -> Outcome {
    let inst = read_instance(&c.input)?;
    let (d3, corr) = normalize_to_d3(&inst)?;
    for (orig, ids) in &corr {
        log::debug!("{orig} -> {}", ids.join(" "));
    }
    emit(c.out.as_deref(), &d3.to_file().to_json())?;
    Ok(0)
}

fn compile_artifact(d3: &D3Network, qp: &QuantumProtocol) -> Value {
    let network: Value = serde_json::to_value(d3.to_file()).expect("network file serializes");
    let sinks: Vec<Value> = d3
        .sinks
        .iter()
        .zip(&qp.sink_alphas)
        .map(|(&t, a)| json!({ "sink": d3.nodes[t].id, "alpha": rational::format(a) }))
        .collect();
    json!({ "network": network, "protocol": qp.to_json(), "sinks": sinks })
}

fn compile_cmd(c: &Common) -> Outcome {
    let d3 = read_d3(&c.input)?;
    let qp = compile(&d3);
    for d in qp.diagnostics.iter().filter(|d| !d.consistent()) {
        log::debug!("two-to-one node {}: own-shrink reading has no tetra form", d.node);
    }
    emit_json(c.out.as_deref(), &compile_artifact(&d3, &qp))?;
    Ok(0)
}

fn parse_inputs(entries: Option<&[String]>, sources: usize) -> Result<Vec<SourceInput>, Failure> {
    let Some(entries) = entries else {
        return Ok(vec![SourceInput::Label(Letter::ZERO); sources]);
    };
    if entries.len() != sources {
        return Err(Failure::new(
            USAGE,
            format!(
                "--inputs has {} entries but the network has {sources} sources",
                entries.len()
            ),
        ));
    }
    entries
        .iter()
        .map(|s| {
            let s = s.trim();
            if let Some((theta, phi)) = s.split_once(':') {
                let parse = |x: &str| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|e| Failure::new(USAGE, format!("bad angle {x:?} in {s:?}: {e}")))
                };
                Ok(SourceInput::Pure(ket_from_angles(parse(theta)?, parse(phi)?)))
            } else {
                s.parse::<Letter>()
                    .map(SourceInput::Label)
                    .map_err(|e| Failure::new(USAGE, format!("bad input {s:?}: {e}")))
            }
        })
        .collect()
}

fn input_json(x: &SourceInput) -> Value {
    match x {
        SourceInput::Label(l) => json!(l.to_string()),
        other => bloch_json(
            &other
                .target()
                .map_or_else(DensityMatrix2::maximally_mixed, |k| DensityMatrix2::from_pure(&k)),
        ),
    }
}

fn bloch_json(rho: &DensityMatrix2) -> Value {
    Value::Array(rho.bloch().iter().map(|&x| float_json(x)).collect())
}

fn rational_law(w: &[Rational; 4]) -> Value {
    Value::Array(w.iter().map(|x| json!(rational::format(x))).collect())
}

fn float_law(w: &[f64; 4]) -> Value {
    Value::Array(w.iter().map(|&x| float_json(x)).collect())
}

fn simulate(a: &SimArgs) -> Outcome {
    let d3 = read_d3(&a.common.input)?;
    let qp = compile(&d3);
    let inputs = parse_inputs(a.inputs.as_deref(), d3.sources.len())?;
    let edge_ends = |e: usize| {
        let (u, v) = d3.edges[e];
        (d3.nodes[u].id.as_str(), d3.nodes[v].id.as_str())
    };
    let mut out = json!({
        "mode": format!("{:?}", a.mode).to_lowercase(),
        "inputs": inputs.iter().map(input_json).collect::<Vec<_>>(),
    });
    match a.mode {
        Mode::Analytic => {
            let labels: Vec<Letter> = inputs
                .iter()
                .map(|x| match x {
                    SourceInput::Label(l) => Ok(*l),
                    _ => Err(Failure::new(
                        USAGE,
                        "analytic mode takes tetra labels; use oracle or montecarlo",
                    )),
                })
                .collect::<Result<_, _>>()?;
            let states = simulate_analytic(&qp, &labels)?;
            let edges: Vec<Value> = states
                .iter()
                .enumerate()
                .map(|(e, s)| {
                    let (from, to) = edge_ends(e);
                    json!({ "from": from, "to": to, "label": s.label.to_string(), "alpha": rational::format(&s.alpha) })
                })
                .collect();
            out["edges"] = Value::Array(edges);
        }
        Mode::Oracle => {
            let exact: Option<Vec<[Rational; 4]>> = inputs.iter().map(SourceInput::exact_law).collect();
            let (edges, sinks): (Vec<Value>, Vec<Value>) = match exact {
                Some(laws) => {
                    let res = simulate_oracle::<Rational>(&qp, &laws)?;
                    let states = res.sink_states();
                    (
                        res.edge_marginals.iter().map(rational_law).collect(),
                        states.iter().map(bloch_json).collect(),
                    )
                }
                None => {
                    let laws: Vec<[f64; 4]> = inputs.iter().map(SourceInput::law).collect();
                    let res = simulate_oracle::<f64>(&qp, &laws)?;
                    let states = res.sink_states();
                    (
                        res.edge_marginals.iter().map(float_law).collect(),
                        states.iter().map(bloch_json).collect(),
                    )
                }
            };
            out["edges"] = Value::Array(
                edges
                    .into_iter()
                    .enumerate()
                    .map(|(e, law)| {
                        let (from, to) = edge_ends(e);
                        json!({ "from": from, "to": to, "law": law })
                    })
                    .collect(),
            );
            out["sinks"] = Value::Array(
                d3.sinks
                    .iter()
                    .zip(sinks)
                    .map(|(&t, bloch)| json!({ "sink": d3.nodes[t].id, "bloch": bloch }))
                    .collect(),
            );
        }
        Mode::Montecarlo => {
            let res = simulate_montecarlo(&qp, &inputs, a.trials, a.seed, Execution::default())?;
            out["trials"] = json!(a.trials);
            out["seed"] = json!(a.seed);
            out["sinks"] = Value::Array(
                d3.sinks
                    .iter()
                    .enumerate()
                    .map(|(j, &t)| {
                        let (mean, stderr) =
                            res.fidelity[j].map_or((Value::Null, Value::Null), |(m, e)| (float_json(m), float_json(e)));
                        json!({
                            "sink": d3.nodes[t].id,
                            "counts": res.counts[j],
                            "frequencies": float_law(&res.frequencies(j)),
                            "fidelity": mean,
                            "stderr": stderr,
                        })
                    })
                    .collect(),
            );
        }
    }
    emit_json(a.common.out.as_deref(), &out)?;
    Ok(0)
}

fn report(a: &SimArgs) -> Outcome {
    let d3 = read_d3(&a.common.input)?;
    let qp = compile(&d3);
    let inputs = parse_inputs(a.inputs.as_deref(), d3.sources.len())?;
    let opts = ReportOptions {
        oracle: a.mode == Mode::Oracle,
        montecarlo: (a.mode == Mode::Montecarlo).then_some((a.trials, a.seed)),
        exec: Execution::default(),
    };
    let rep = fidelity_report(&qp, &inputs, &opts)?;
    print!("{}", rep.to_table());
    if let Some(path) = &a.common.out {
        emit_json(Some(path), &rep.to_json())?;
    }
    Ok(if rep.all_pass() { 0 } else { FAILED })
}
