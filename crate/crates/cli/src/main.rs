//! `cohbound`: coherence profiles, bound evaluation, audits and campaigns.
//!
//! Exit status: 0 on success, 1 when an audit or campaign finds a violated
//! record, 2 on invalid input.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cohbound::bounds::{
    self, evaluate, optimize_bound, partition_and_feasibility, BoundParams, Variant,
};
use cohbound::coherence::{coherence_profile, CoherenceProfile};
use cohbound::ensembles::paper_example_state;
use cohbound::harness::{
    audit_state, fig1_sweep, verify_superadditivity, verify_theorems, AuditRecord, CampaignSpec,
    Ensemble, TheoremGrid, Verdict,
};
use cohbound::qmatrix::DensityMatrix;
use cohbound::statefile::{read_state_file, write_pure};
use cohbound::Error;
use serde_json::json;

const MAX_QUBITS_VAR: &str = "COHBOUND_MAX_QUBITS";
const DEFAULT_MAX_QUBITS: usize = 10;

#[derive(Parser)]
#[command(
    name = "cohbound",
    version,
    about = "l1-norm coherence bounds for multiqubit states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print C_l1 of a state and its coherence profile.
    Coherence {
        state: PathBuf,
        #[command(flatten)]
        order: OrderArg,
        /// Print JSON with full precision instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Evaluate one bound variant at one parameter point.
    Bound {
        state: PathBuf,
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        variant: Option<Variant>,
        #[command(flatten)]
        order: OrderArg,
    },
    /// Maximise the tiered bound over partition index and x.
    Optimize {
        state: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[command(flatten)]
        order: OrderArg,
    },
    /// Chain residuals and every bound variant with its verdict.
    Audit {
        state: PathBuf,
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        order: OrderArg,
        /// Also write the records as CSV to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Closed-form curves for the example state as CSV.
    Fig1 {
        #[arg(long)]
        alpha_min: f64,
        #[arg(long)]
        alpha_max: f64,
        #[arg(long)]
        step: f64,
    },
    /// Run superadditivity and theorem campaigns over a random ensemble.
    Verify(VerifyArgs),
    /// Write the three-qubit example state to a file.
    Example {
        #[arg(default_value = "example.state")]
        path: PathBuf,
    },
}

#[derive(Args)]
struct OrderArg {
    /// Party ordering as one-based qubit labels, e.g. 3-1-2.
    #[arg(long, value_parser = parse_ordering)]
    ordering: Option<Ordering>,
}

#[derive(Clone)]
struct Ordering(Vec<usize>);

#[derive(Args)]
struct PointArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, requires = "delta", conflicts_with = "x")]
    k: Option<f64>,
    #[arg(long, requires = "k", conflicts_with = "x")]
    delta: Option<f64>,
    /// x = k^delta directly.
    #[arg(long)]
    x: Option<f64>,
    /// One-based partition index.
    #[arg(long)]
    m: Option<usize>,
}

impl PointArgs {
    fn k_delta(&self) -> Result<(f64, f64), Error> {
        match (self.k, self.delta, self.x) {
            (Some(k), Some(d), None) => Ok((k, d)),
            (None, None, Some(x)) => Ok((x, 1.0)),
            _ => Err(Error::Input("give either --k and --delta, or --x".into())),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EnsembleArg {
    Pure,
    Ginibre,
    Product,
    Graded,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    ensemble: EnsembleArg,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    samples: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_delimiter = ',', required = true)]
    alphas: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    betas: Vec<f64>,
    #[arg(long)]
    all_orderings: bool,
    /// Ginibre rank (default full rank).
    #[arg(long)]
    rank: Option<usize>,
    /// Damping factor for the graded ensemble.
    #[arg(long, default_value_t = 0.3)]
    decay: f64,
    /// Write the report JSON here instead of stdout.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write every audit record as CSV here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn parse_ordering(s: &str) -> Result<Ordering, String> {
    s.split('-')
        .map(|p| match p.trim().parse::<usize>() {
            Ok(v) if v >= 1 => Ok(v - 1),
            _ => Err(format!("bad party label '{p}'")),
        })
        .collect::<Result<_, _>>()
        .map(Ordering)
}

fn max_qubits() -> Result<usize, Error> {
    match std::env::var(MAX_QUBITS_VAR) {
        Err(_) => Ok(DEFAULT_MAX_QUBITS),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(Error::Input(format!(
                "{MAX_QUBITS_VAR} must be a positive integer, got '{v}'"
            ))),
        },
    }
}

fn load(path: &Path) -> Result<DensityMatrix, Error> {
    Ok(read_state_file(path, max_qubits()?)?.to_density())
}

fn ordering_for(rho: &DensityMatrix, order: &OrderArg) -> Vec<usize> {
    order
        .ordering
        .clone()
        .map(|o| o.0)
        .unwrap_or_else(|| (0..rho.n_qubits()).collect())
}

/// Short human-readable form: at most 12 decimals, trailing zeros dropped.
fn short(v: f64) -> String {
    if !v.is_finite() {
        return if v > 0.0 {
            "inf".into()
        } else {
            format!("{v}")
        };
    }
    let s = format!("{v:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn tuple(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| short(*v)).collect();
    format!("({})", parts.join(", "))
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn one_based(ordering: &[usize]) -> String {
    let labels: Vec<String> = ordering.iter().map(|q| (q + 1).to_string()).collect();
    labels.join("-")
}

const AUDIT_HEADER: [&str; 11] = [
    "state_id", "ordering", "variant", "alpha", "beta", "x", "m", "claimed", "actual", "residual",
    "verdict",
];

fn write_records<W: Write>(
    out: W,
    records: &[AuditRecord],
) -> Result<(), Box<dyn std::error::Error>> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(AUDIT_HEADER)?;
    for r in records {
        w.write_record([
            r.state_id.clone(),
            one_based(&r.ordering),
            r.variant.to_string(),
            r.alpha.to_string(),
            r.beta.to_string(),
            opt(r.x),
            r.m.map(|m| m.to_string()).unwrap_or_default(),
            opt(r.claimed),
            r.actual.to_string(),
            opt(r.residual),
            r.verdict.as_str().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn print_profile(p: &CoherenceProfile) {
    println!("ordering = {}", one_based(&p.ordering));
    println!("full = {}", short(p.full));
    println!("C = {}", tuple(&p.marginals));
    println!("T = {}", tuple(&p.tails));
}

type CmdResult = Result<ExitCode, Box<dyn std::error::Error>>;

fn cmd_coherence(state: &Path, order: &OrderArg, as_json: bool) -> CmdResult {
    let rho = load(state)?;
    if rho.n_qubits() < 2 {
        let c = cohbound::coherence::c_l1(&rho)?;
        if as_json {
            println!("{}", json!({ "full": c }));
        } else {
            println!("full = {}", short(c));
        }
        return Ok(ExitCode::SUCCESS);
    }
    let profile = coherence_profile(&rho, &ordering_for(&rho, order))?;
    if as_json {
        println!("{}", serde_json::to_string_pretty(&profile)?);
    } else {
        print_profile(&profile);
    }
    Ok(ExitCode::SUCCESS)
}

fn default_variant(beta: f64) -> Variant {
    if beta == 1.0 {
        Variant::Thm1
    } else {
        Variant::Thm3
    }
}

fn cmd_bound(
    state: &Path,
    point: &PointArgs,
    variant: Option<Variant>,
    order: &OrderArg,
) -> CmdResult {
    let rho = load(state)?;
    let profile = coherence_profile(&rho, &ordering_for(&rho, order))?;
    let (k, delta) = point.k_delta()?;
    let variant = variant.unwrap_or_else(|| default_variant(point.beta));
    let beta = if variant.uses_beta() { point.beta } else { 1.0 };
    let x = BoundParams::new(point.alpha, beta, k, delta, 1)?.x;
    let m = match point.m {
        Some(m) => m,
        None => partition_and_feasibility(&profile, beta)?
            .iter()
            .position(|iv| iv.feasible && iv.contains(x))
            .map_or(1, |i| i + 1),
    };
    let params = BoundParams::new(point.alpha, beta, k, delta, m)?;
    let value = evaluate(variant, &profile, &params)?;
    println!("{variant} = {}", short(value.value));
    let p = value.params;
    println!(
        "alpha = {}, beta = {}, k = {}, delta = {}, x = {}, m = {}",
        short(p.alpha),
        short(p.beta),
        short(p.k),
        short(p.delta),
        short(p.x),
        p.m
    );
    println!(
        "actual = {}",
        short(bounds::actual_value(variant, &profile, &params))
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_optimize(state: &Path, alpha: f64, beta: f64, order: &OrderArg) -> CmdResult {
    let rho = load(state)?;
    let profile = coherence_profile(&rho, &ordering_for(&rho, order))?;
    let opt = optimize_bound(&profile, alpha, beta)?;
    for (i, iv) in opt.intervals.iter().enumerate() {
        let status = if iv.feasible {
            "feasible"
        } else {
            "infeasible"
        };
        println!("m = {}: x in {iv} ({status})", i + 1);
    }
    match opt.best {
        Some(b) => {
            println!("best {} = {}", b.variant, short(b.value));
            println!("x = {}, m = {}", short(b.params.x), b.params.m);
            Ok(ExitCode::SUCCESS)
        }
        None => {
            println!("no admissible partition index");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_audit(
    state: &Path,
    point: &PointArgs,
    order: &OrderArg,
    csv_path: Option<&Path>,
) -> CmdResult {
    let rho = load(state)?;
    let ordering = ordering_for(&rho, order);
    let (k, delta) = point.k_delta()?;
    let id = state.display().to_string();
    let audit = audit_state(
        &id,
        &rho,
        &ordering,
        point.alpha,
        point.beta,
        k,
        delta,
        point.m,
    )?;
    print_profile(&audit.profile);
    for (i, iv) in audit.intervals.iter().enumerate() {
        let status = if iv.feasible {
            "feasible"
        } else {
            "infeasible"
        };
        println!("m = {}: x in {iv} ({status})", i + 1);
    }
    match &audit.chain {
        Some(steps) => {
            println!("chain (m = {}):", audit.m);
            for s in steps {
                println!(
                    "  {}: {} >= {} residual {}",
                    s.label,
                    short(s.lhs),
                    short(s.rhs),
                    short(s.residual)
                );
            }
        }
        None => println!("chain: parameters not admissible for m = {}", audit.m),
    }
    println!();
    write_records(std::io::stdout().lock(), &audit.records)?;
    if let Some(path) = csv_path {
        write_records(std::fs::File::create(path)?, &audit.records)?;
    }
    let violated = audit.records.iter().any(|r| r.verdict == Verdict::Violated);
    Ok(if violated {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_fig1(alpha_min: f64, alpha_max: f64, step: f64) -> CmdResult {
    let rows = fig1_sweep(alpha_min, alpha_max, step)?;
    let mut w = csv::Writer::from_writer(std::io::stdout().lock());
    w.write_record(["alpha", "y1", "y2", "actual_pow", "thm1_proof_consistent"])?;
    for r in rows {
        w.write_record([
            r.alpha.to_string(),
            r.y1.to_string(),
            r.y2.to_string(),
            r.actual_pow.to_string(),
            r.thm1_proof_consistent.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(a: &VerifyArgs) -> CmdResult {
    let cap = max_qubits()?;
    if a.n > cap {
        return Err(Error::Input(format!("n = {} exceeds {MAX_QUBITS_VAR} = {cap}", a.n)).into());
    }
    if a.rank.is_some() && !matches!(a.ensemble, EnsembleArg::Ginibre) {
        return Err(Error::Input("--rank only applies to the ginibre ensemble".into()).into());
    }
    let ensemble = match a.ensemble {
        EnsembleArg::Pure => Ensemble::Pure,
        EnsembleArg::Ginibre => Ensemble::Ginibre { rank: a.rank },
        EnsembleArg::Product => Ensemble::Product,
        EnsembleArg::Graded => Ensemble::Graded { decay: a.decay },
    };
    let spec = CampaignSpec {
        ensemble,
        n: a.n,
        samples: a.samples,
        seed: a.seed,
    };
    let keep = a.csv.is_some();
    let superadditivity = verify_superadditivity(&spec, keep)?;
    let theorems = if a.n >= 3 {
        let grid = TheoremGrid {
            alphas: a.alphas.clone(),
            betas: a.betas.clone(),
            all_orderings: a.all_orderings,
        };
        Some(verify_theorems(&spec, &grid, keep)?)
    } else {
        None
    };
    let violation = superadditivity.report.any_violation()
        || theorems.as_ref().is_some_and(|t| t.report.any_violation());

    let report = json!({
        "ensemble": ensemble.name(),
        "n": a.n,
        "samples": a.samples,
        "seed": a.seed,
        "alphas": a.alphas,
        "betas": a.betas,
        "all_orderings": a.all_orderings,
        "superadditivity": superadditivity.report,
        "theorems": theorems.as_ref().map(|t| &t.report),
        "any_violation": violation,
    });
    let text = serde_json::to_string_pretty(&report)? + "\n";
    match &a.json {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    if let Some(path) = &a.csv {
        let mut records = superadditivity.records;
        if let Some(t) = theorems {
            records.extend(t.records);
        }
        write_records(std::fs::File::create(path)?, &records)?;
    }
    Ok(if violation {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_example(path: &Path) -> CmdResult {
    std::fs::write(path, write_pure(&paper_example_state()))?;
    println!("wrote {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> CmdResult {
    match &cli.command {
        Command::Coherence { state, order, json } => cmd_coherence(state, order, *json),
        Command::Bound {
            state,
            point,
            variant,
            order,
        } => cmd_bound(state, point, *variant, order),
        Command::Optimize {
            state,
            alpha,
            beta,
            order,
        } => cmd_optimize(state, *alpha, *beta, order),
        Command::Audit {
            state,
            point,
            order,
            csv,
        } => cmd_audit(state, point, order, csv.as_deref()),
        Command::Fig1 {
            alpha_min,
            alpha_max,
            step,
        } => cmd_fig1(*alpha_min, *alpha_max, *step),
        Command::Verify(args) => cmd_verify(args),
        Command::Example { path } => cmd_example(path),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            match e.downcast_ref::<Error>() {
                Some(Error::Precondition {
                    variant,
                    detail,
                    interval,
                }) => {
                    eprintln!("error: {variant} is not admissible: {detail}");
                    if let Some(iv) = interval {
                        eprintln!("admissible x interval: {iv} (feasible: {})", iv.feasible);
                    }
                }
                _ => eprintln!("error: {e}"),
            }
            ExitCode::from(2)
        }
    }
}
