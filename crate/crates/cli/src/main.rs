use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use loo_witness::criteria::{ConcurrenceBound, CriterionScores};
use loo_witness::io::{basis_to_json, format_state, read_state};
use loo_witness::loo::canonical_basis_for;
use loo_witness::oracle::{sampled_max_trace, OracleReport};
use loo_witness::qstate::{make_state, StateParams};
use loo_witness::scan::{run_scan, BasisPair, Family, ScanSpec, ScoreKind, ThresholdOutcome, DEFAULT_STEP, DEFAULT_TOL};
use loo_witness::witness::{certify, correlation_matrix, covariance_matrix, WitnessKind};
use loo_witness::{DensityMatrix, ExecMode};

const EXIT_INVALID: u8 = 1;
const EXIT_NO_THRESHOLD: u8 = 2;

#[derive(Parser)]
#[command(name = "loowit", version, about = "Optimal LOO entanglement witnesses, criteria and concurrence bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a named state to a file (or stdout).
    Gen(GenArgs),
    /// Evaluate every criterion, the optimal witnesses and concurrence bounds.
    Analyze(AnalyzeArgs),
    /// Scan a one-parameter family and bisect the detection threshold.
    Scan(ScanArgs),
    /// Random-search check of the closed-form optima for μ and τ.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct GenArgs {
    /// bell, singlet, product, noisy_singlet, upb, upb_noise, werner,
    /// isotropic, maximally_entangled, maximally_mixed
    name: String,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Linear,
    Nonlinear,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    state: PathBuf,
    /// Write the machine-readable report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the machine-readable report instead of the text summary.
    #[arg(long)]
    json: bool,
    /// Include the optimizing bases in the machine-readable report.
    #[arg(long)]
    emit_bases: bool,
    /// Which optimum the emitted bases belong to.
    #[arg(long, value_enum, default_value = "nonlinear")]
    kind: KindArg,
}

#[derive(Args)]
struct ScanArgs {
    /// upb_noise, noisy_singlet or mixture
    #[arg(long)]
    family: String,
    /// Target state of a `mixture` family (weight p).
    #[arg(long)]
    state: Option<PathBuf>,
    /// Noise state of a `mixture` family (weight 1 - p); maximally mixed if omitted.
    #[arg(long)]
    noise: Option<PathBuf>,
    /// ppt, realign, linear_opt, nonlinear_opt, bound_ppt, bound_realign,
    /// bound_lmax, bound_combined, linear_fixed or nonlinear_fixed
    #[arg(long)]
    criterion: String,
    /// Basis pair for linear_fixed / nonlinear_fixed: pauli, pauli_flip_y,
    /// negated_pauli, gell_mann, gell_mann_transpose.
    #[arg(long)]
    bases: Option<String>,
    #[arg(long, default_value_t = 0.0)]
    p_start: f64,
    #[arg(long, default_value_t = 1.0)]
    p_stop: f64,
    #[arg(long, default_value_t = DEFAULT_STEP)]
    step: f64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// CSV destination; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Evaluate grid points on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    state: PathBuf,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum Outcome {
    Done,
    NoThreshold,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Scan(args) => cmd_scan(args),
        Command::Oracle(args) => cmd_oracle(args),
    };
    match result {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::NoThreshold) => ExitCode::from(EXIT_NO_THRESHOLD),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_valid_state(path: &Path) -> Result<DensityMatrix> {
    let rho = read_state(path).with_context(|| format!("cannot read state {}", path.display()))?;
    Ok(rho.validated()?)
}

fn cmd_gen(args: GenArgs) -> Result<Outcome> {
    let rho = make_state(&args.name, StateParams { p: args.p, dim: args.dim })?;
    write_or_print(args.out.as_deref(), &format_state(&rho))?;
    Ok(Outcome::Done)
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<Outcome> {
    let rho = load_valid_state(&args.state)?;
    let scores = CriterionScores::compute(&rho)?;
    let verdicts = scores.verdicts();
    let kind = match args.kind {
        KindArg::Linear => WitnessKind::Linear,
        KindArg::Nonlinear => WitnessKind::Nonlinear,
    };
    let ga = canonical_basis_for(rho.dim_a());
    let gb = canonical_basis_for(rho.dim_b());
    let cert = certify(&rho, &ga, &gb, kind)?;
    let dim_min = rho.dim_a().min(rho.dim_b());
    let bounds = (dim_min >= 2).then(|| ConcurrenceBound::from_scores(dim_min, &scores)).transpose()?;

    let mut report = json!({
        "dims": [rho.dim_a(), rho.dim_b()],
        "verdicts": verdicts.iter().map(|v| json!({
            "criterion": v.criterion.name(),
            "detected": v.detected,
            "score": v.score,
            "threshold_form": v.threshold_form,
        })).collect::<Vec<_>>(),
        "linear_min": cert.linear_min,
        "nonlinear_min": cert.nonlinear_min,
        "l_max": cert.l_max,
        "purity_a": cert.purity_a,
        "purity_b": cert.purity_b,
        "concurrence_bounds": bounds.map(|b| json!({
            "dim_min": b.dim_min,
            "bound_ppt": b.bound_ppt,
            "bound_realign": b.bound_realign,
            "bound_lmax": b.bound_lmax,
            "bound_combined": b.bound_combined,
        })),
    });
    if args.emit_bases {
        report["optimal_bases"] = json!({
            "kind": match kind { WitnessKind::Linear => "linear", WitnessKind::Nonlinear => "nonlinear" },
            "basis_a": basis_to_json(&cert.optimal_basis_a),
            "basis_b": basis_to_json(&cert.optimal_basis_b),
        });
    }
    let report_text = serde_json::to_string_pretty(&report)? + "\n";
    if let Some(path) = &args.out {
        std::fs::write(path, &report_text).with_context(|| format!("cannot write {}", path.display()))?;
    }
    if args.json {
        print!("{report_text}");
        return Ok(Outcome::Done);
    }

    println!("state: {}x{} ({})", rho.dim_a(), rho.dim_b(), args.state.display());
    println!("criteria (score > 0 certifies entanglement):");
    for v in &verdicts {
        let mark = if v.detected { "DETECTED" } else { "-" };
        println!("  {:<14} {:>+.10} {:<9} {}", v.criterion.name(), v.score, mark, v.threshold_form);
    }
    println!("optimal linear witness min:    {:+.10}", cert.linear_min);
    println!("optimal nonlinear witness min: {:+.10}", cert.nonlinear_min);
    println!("L_max:                         {:.10}", cert.l_max);
    println!("reduced purities:              A {:.10}  B {:.10}", cert.purity_a, cert.purity_b);
    match bounds {
        Some(b) => {
            println!("I-concurrence lower bounds (m = {}):", b.dim_min);
            println!("  bound_ppt      {:.10}", b.bound_ppt);
            println!("  bound_realign  {:.10}", b.bound_realign);
            println!("  bound_lmax     {:.10}", b.bound_lmax);
            println!("  bound_combined {:.10}", b.bound_combined);
        }
        None => println!("I-concurrence lower bounds: n/a (a subsystem has dimension 1)"),
    }
    Ok(Outcome::Done)
}

fn cmd_scan(args: ScanArgs) -> Result<Outcome> {
    let family = match args.family.as_str() {
        "upb_noise" => Family::UpbNoise,
        "noisy_singlet" => Family::NoisySinglet,
        "mixture" => {
            let Some(target) = &args.state else { bail!("family 'mixture' needs --state") };
            let target = load_valid_state(target)?;
            let noise = match &args.noise {
                Some(path) => load_valid_state(path)?,
                None => DensityMatrix::maximally_mixed(target.dim_a(), target.dim_b()),
            };
            Family::Mixture { target, noise }
        }
        other => bail!("unknown family '{other}' (expected upb_noise, noisy_singlet or mixture)"),
    };
    let pair = match &args.bases {
        Some(name) => Some(name.parse::<BasisPair>()?),
        None => match family {
            Family::NoisySinglet => Some(BasisPair::NegatedPauli),
            _ => Some(BasisPair::GellMannTranspose),
        },
    };
    let score = ScoreKind::parse(&args.criterion, pair)?;
    let spec = ScanSpec { family, start: args.p_start, stop: args.p_stop, step: args.step, score, bisection_tol: args.tol };
    let mode = if args.sequential { ExecMode::Sequential } else { ExecMode::default() };
    let result = run_scan(&spec, mode)?;

    write_or_print(args.out.as_deref(), &result.to_csv())?;
    let summary = format!("{} / {}: {}", spec.family.name(), result.score, result.outcome);
    if args.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(match result.outcome {
        ThresholdOutcome::NotFound => Outcome::NoThreshold,
        _ => Outcome::Done,
    })
}

fn print_report(label: &str, r: &OracleReport) {
    println!(
        "{label}: analytic {:.15e} best_sampled {:.15e} gap {:.6e} samples {} seed {}",
        r.analytic_value, r.best_sampled, r.gap, r.samples, r.seed
    );
}

fn cmd_oracle(args: OracleArgs) -> Result<Outcome> {
    let rho = load_valid_state(&args.state)?;
    let ga = canonical_basis_for(rho.dim_a());
    let gb = canonical_basis_for(rho.dim_b());
    let mu = correlation_matrix(&rho, &ga, &gb)?;
    let tau = covariance_matrix(&rho, &ga, &gb)?;
    let mode = ExecMode::default();
    let r_mu = sampled_max_trace(&mu.matrix, args.samples, args.seed, mode)?;
    let r_tau = sampled_max_trace(&tau.matrix, args.samples, args.seed, mode)?;
    print_report("mu", &r_mu);
    print_report("tau", &r_tau);
    let ok = r_mu.gap >= -1e-9 && r_tau.gap >= -1e-9;
    println!("closed form never beaten: {}", if ok { "yes" } else { "NO" });
    if !ok {
        bail!("sampling exceeded a closed-form optimum");
    }
    Ok(Outcome::Done)
}
