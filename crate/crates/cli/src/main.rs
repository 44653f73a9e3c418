mod input;

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pqubo::annealer::{beta_range, AnnealError};
use pqubo::bench::{self, EmitOptions, ExperimentSpec, Family, ModeSpec};
use pqubo::formula::{entails, PreprocessResult, PreprocessStatus};
use pqubo::qubo::to_spins;
use pqubo::verify::{verdict_for_bits, Verdict};
use pqubo::{
    best_of, default_weights, encode, iterate_shrink, preprocess, sample, BetaSchedule, EncodeMode, Encoding,
    ModelDocument, OracleBudget, PartialAssignment, SaConfig, SampleResult, SparsityScope, Weights,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use input::{LoadOutcome, Loaded};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_NO_SOLUTION: u8 = 2;

#[derive(Parser)]
#[command(
    name = "pqubo",
    version,
    about = "Short partial satisfying assignments via QUBO encodings"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find a short implicant of a formula.
    Solve(SolveArgs),
    /// Shrink a given total model to a short implicant contained in it.
    Shrink(ShrinkArgs),
    /// Find a short implicant measured over visible variables only.
    Project(SolveArgs),
    /// Write the QUBO (or Ising) model without solving it.
    Encode(EncodeArgs),
    /// Run a benchmark batch and write records.jsonl and summary.csv.
    Bench(BenchArgs),
    /// Check a spin vector or partial assignment against the encoding.
    Verify(VerifyArgs),
}

#[derive(Args, Clone, Serialize)]
struct WeightArgs {
    /// Sparsity weight.
    #[arg(long)]
    gamma: Option<f64>,
    /// Clause penalty weight.
    #[arg(long)]
    lambda: Option<f64>,
    /// Consistency penalty weight.
    #[arg(long = "big-m")]
    big_m: Option<f64>,
}

#[derive(Args, Clone)]
struct ProjectionArgs {
    /// Visible variables, e.g. `1-4,7`. Enables projected sparsity.
    #[arg(long, value_name = "VARS", conflicts_with = "fraction")]
    visible: Option<String>,
    /// Make a random share of the variables visible.
    #[arg(long)]
    fraction: Option<f64>,
    /// Seed for `--fraction`.
    #[arg(long, default_value_t = 0)]
    projection_seed: u64,
}

#[derive(Args, Clone)]
struct SaArgs {
    /// Restarts in the initial sampling run.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Restarts per refinement round.
    #[arg(long, default_value_t = 100)]
    round_samples: usize,
    /// Temperature steps per restart (each proposes one flip per free spin).
    #[arg(long, default_value_t = 64)]
    sweeps: usize,
    #[arg(long, env = "PQUBO_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, requires = "beta_max")]
    beta_min: Option<f64>,
    #[arg(long, requires = "beta_min")]
    beta_max: Option<f64>,
    /// Keep the best state seen along each restart.
    #[arg(long)]
    keep_best: bool,
    /// Refine iteratively by freezing polarities.
    #[arg(long)]
    iter: bool,
    #[arg(long, default_value_t = 10)]
    max_rounds: usize,
    /// Node budget for the exact minimum-implicant check.
    #[arg(long, default_value_t = 5_000_000)]
    oracle_budget: u64,
}

impl SaArgs {
    fn configs(&self) -> (SaConfig, SaConfig) {
        let schedule = match (self.beta_min, self.beta_max) {
            (Some(beta_min), Some(beta_max)) => BetaSchedule::Geometric { beta_min, beta_max },
            _ => BetaSchedule::Auto,
        };
        let initial = SaConfig {
            num_samples: self.samples,
            sweeps_per_sample: self.sweeps,
            schedule,
            seed: self.seed,
            restarts_keep_best: self.keep_best,
        };
        let round = SaConfig {
            num_samples: self.round_samples,
            ..initial.clone()
        };
        (initial, round)
    }
}

#[derive(Args)]
struct SolveArgs {
    /// DIMACS CNF file, or an expression file with extension `.bexpr`.
    input: PathBuf,
    #[command(flatten)]
    projection: ProjectionArgs,
    #[command(flatten)]
    weights: WeightArgs,
    #[command(flatten)]
    sa: SaArgs,
    /// Write the report here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ShrinkArgs {
    input: PathBuf,
    /// Total model as signed literals, one per line.
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    projection: ProjectionArgs,
    #[command(flatten)]
    weights: WeightArgs,
    #[command(flatten)]
    sa: SaArgs,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    QuboJson,
    Dimacs,
}

#[derive(Args)]
struct EncodeArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::QuboJson)]
    format: Format,
    /// Convert to Ising form before writing.
    #[arg(long)]
    ising: bool,
    /// Encode the shrink model of this total assignment.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Skip unit propagation and clause cleanup.
    #[arg(long)]
    no_preprocess: bool,
    #[command(flatten)]
    projection: ProjectionArgs,
    #[command(flatten)]
    weights: WeightArgs,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum FamilyArg {
    Random3sat,
    Noncnf,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::Random3sat)]
    family: FamilyArg,
    /// Problem sizes; defaults to 8,12,...,48 for 3-SAT and 12,16,20 otherwise.
    #[arg(long, value_delimiter = ',')]
    ns: Vec<usize>,
    #[arg(long, default_value_t = 1.5)]
    density: f64,
    #[arg(long, default_value_t = 10)]
    instances: usize,
    #[arg(long, default_value_t = 3)]
    depth: u32,
    #[arg(long, default_value_t = 6)]
    fanin: usize,
    /// Modes as task/scope/strategy labels, or `all`.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "full/standard/basic,full/standard/iter"
    )]
    modes: Vec<String>,
    #[arg(long, default_value_t = 0.75)]
    projection_fraction: f64,
    #[command(flatten)]
    sa: SaArgs,
    #[arg(long, default_value = "bench-out")]
    out: PathBuf,
    /// Include wall-clock times in records.jsonl.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct VerifyArgs {
    input: PathBuf,
    /// Spin vector as 0/1 characters.
    #[arg(long, conflicts_with = "assignment", required_unless_present = "assignment")]
    bits: Option<PathBuf>,
    /// Partial assignment as signed literals, e.g. "1 -3".
    #[arg(long, allow_hyphen_values = true)]
    assignment: Option<String>,
    #[arg(long)]
    model: Option<PathBuf>,
    #[command(flatten)]
    projection: ProjectionArgs,
    #[command(flatten)]
    weights: WeightArgs,
    #[arg(long, default_value_t = 5_000_000)]
    oracle_budget: u64,
}

#[derive(Serialize)]
struct WeightsOut {
    gamma: f64,
    lambda: f64,
    big_m: f64,
    overridden: bool,
}

#[derive(Serialize)]
struct EffectiveConfig {
    task: &'static str,
    scope: &'static str,
    visible: Option<Vec<u32>>,
    weights: WeightsOut,
    strategy: &'static str,
    sa_initial: SaConfig,
    sa_round: Option<SaConfig>,
    beta_range: (f64, f64),
    max_rounds: Option<usize>,
    oracle_budget: u64,
}

#[derive(Serialize)]
struct FormulaInfo {
    num_vars: usize,
    num_clauses: usize,
    original_vars: Option<usize>,
    forced: Vec<i64>,
    eliminated: Vec<u32>,
    status: String,
}

#[derive(Serialize)]
struct RoundInfo {
    frozen: Vec<u32>,
    size: Option<usize>,
    energy: f64,
    accepted: bool,
}

#[derive(Serialize)]
struct ResultInfo {
    /// Decoded literals plus those forced by preprocessing.
    literals: Vec<i64>,
    /// Literals over original variables (expression inputs).
    visible_literals: Option<Vec<i64>>,
    size: usize,
    scoped_size: usize,
    energy: f64,
    feasible_energy_bound: f64,
    verdict: Verdict,
    inconsistent_vars: Vec<u32>,
    subset_of_model: Option<bool>,
    rounds: Option<Vec<RoundInfo>>,
    converged: Option<bool>,
    bits: String,
}

#[derive(Serialize)]
struct Report {
    command: &'static str,
    input: String,
    status: &'static str,
    config: Option<EffectiveConfig>,
    formula: Option<FormulaInfo>,
    result: Option<ResultInfo>,
    warnings: Vec<String>,
    note: Option<String>,
}

impl Report {
    fn unsat(command: &'static str, input: &Path, note: String) -> Self {
        Report {
            command,
            input: input.display().to_string(),
            status: "unsat",
            config: None,
            formula: None,
            result: None,
            warnings: Vec::new(),
            note: Some(note),
        }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, format!("{text}\n")).with_context(|| format!("cannot write {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}")?;
            Ok(())
        }
    }
}

fn emit_report(report: &Report, output: Option<&Path>) -> Result<()> {
    write_output(output, &serde_json::to_string_pretty(report)?)
}

fn load_or_unsat(command: &'static str, path: &Path, output: Option<&Path>) -> Result<Option<Loaded>> {
    match input::load(path)? {
        LoadOutcome::Ok(l) => Ok(Some(l)),
        LoadOutcome::TriviallyUnsat(msg) => {
            eprintln!("UNSAT: {msg}");
            emit_report(&Report::unsat(command, path, format!("UNSAT: {msg}")), output)?;
            Ok(None)
        }
    }
}

fn preprocess_or_unsat(
    command: &'static str,
    path: &Path,
    loaded: &Loaded,
    output: Option<&Path>,
) -> Result<Option<PreprocessResult>> {
    let pre = preprocess(&loaded.cnf);
    if pre.status == PreprocessStatus::UnsatDetected {
        let note = "UNSAT: unit propagation derived a conflict".to_string();
        eprintln!("{note}");
        emit_report(&Report::unsat(command, path, note), output)?;
        return Ok(None);
    }
    Ok(Some(pre))
}

/// Resolves the visible set. `default_original` makes expression inputs
/// default to their original variables and CNF inputs to a 75% sample.
fn resolve_visible(args: &ProjectionArgs, loaded: &Loaded, force: bool) -> Result<Option<BTreeSet<u32>>> {
    let n = loaded.cnf.num_vars;
    if let Some(list) = &args.visible {
        let p = input::parse_var_list(list)?;
        if let Some(v) = p.iter().find(|&&v| v as usize > n) {
            bail!("visible variable {v} exceeds the formula's {n} variables");
        }
        return Ok(Some(p));
    }
    let fraction = match (args.fraction, force, &loaded.original) {
        (Some(f), _, _) => f,
        (None, true, Some(orig)) => return Ok(Some(orig.clone())),
        (None, true, None) => 0.75,
        (None, false, _) => return Ok(None),
    };
    if !(fraction > 0.0 && fraction <= 1.0) {
        bail!("--fraction must lie in (0, 1]");
    }
    let k = ((fraction * n as f64).round() as usize).clamp(1, n.max(1));
    let mut rng = ChaCha8Rng::seed_from_u64(args.projection_seed);
    Ok(Some(
        rand::seq::index::sample(&mut rng, n, k.min(n))
            .into_iter()
            .map(|i| i as u32 + 1)
            .collect(),
    ))
}

fn resolve_weights(args: &WeightArgs, b: usize) -> Result<(Weights<f64>, bool)> {
    let mut w = default_weights::<f64>(b.max(1));
    let mut overridden = false;
    for (slot, value, name) in [
        (&mut w.gamma, args.gamma, "gamma"),
        (&mut w.lambda, args.lambda, "lambda"),
        (&mut w.big_m, args.big_m, "big-m"),
    ] {
        if let Some(v) = value {
            if !(v > 0.0 && v.is_finite()) {
                bail!("--{name} must be a positive finite number");
            }
            *slot = v;
            overridden = true;
        }
    }
    Ok((w, overridden))
}

fn build_encoding(
    loaded: &Loaded,
    pre: &PreprocessResult,
    visible: Option<BTreeSet<u32>>,
    eta: Option<PartialAssignment>,
    weights: &WeightArgs,
) -> Result<(Encoding<f64>, bool)> {
    let f = &pre.formula;
    let b = visible.as_ref().map_or(f.num_vars, |p| p.len());
    let (w, overridden) = resolve_weights(weights, b)?;
    let mut mode = match eta {
        Some(eta) => {
            if !entails(&eta, &loaded.cnf) {
                bail!("the given model does not satisfy the formula");
            }
            EncodeMode::shrink(eta)
        }
        None => EncodeMode::full(),
    };
    if let Some(p) = visible {
        mode = mode.with_scope(SparsityScope::Projected(p));
    }
    let enc = encode(f, w, mode).context("cannot build the encoding")?;
    for msg in &enc.warnings {
        eprintln!("warning: {msg}");
    }
    Ok((enc, overridden))
}

fn dimacs_lits(mu: &PartialAssignment) -> Vec<i64> {
    mu.literals().into_iter().map(|l| l.to_dimacs()).collect()
}

fn bits_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn formula_info(loaded: &Loaded, pre: &PreprocessResult) -> FormulaInfo {
    FormulaInfo {
        num_vars: pre.formula.num_vars,
        num_clauses: pre.formula.clauses.len(),
        original_vars: loaded.original.as_ref().map(|o| o.len()),
        forced: pre.forced.iter().map(|l| l.to_dimacs()).collect(),
        eliminated: pre.eliminated.iter().copied().collect(),
        status: format!("{:?}", pre.status),
    }
}

fn result_info(
    best: &SampleResult<f64>,
    enc: &Encoding<f64>,
    pre: &PreprocessResult,
    loaded: &Loaded,
    eta: Option<&PartialAssignment>,
    budget: OracleBudget,
) -> ResultInfo {
    let verdict = verdict_for_bits(&best.bits, enc, budget);
    let full = best.decoded.as_ref().and_then(|mu| pre.reattach(mu));
    let literals = full.as_ref().map(dimacs_lits).unwrap_or_default();
    ResultInfo {
        visible_literals: loaded
            .original
            .as_ref()
            .map(|o| full.as_ref().map(|mu| dimacs_lits(&mu.restrict(o))).unwrap_or_default()),
        size: full.as_ref().map_or(best.size, |mu| mu.size()),
        scoped_size: best.decoded.as_ref().map_or(best.size, |mu| enc.scoped_size(mu)),
        literals,
        energy: best.energy,
        feasible_energy_bound: enc.feasible_energy_bound,
        verdict,
        inconsistent_vars: best.inconsistent_vars.clone(),
        subset_of_model: eta.map(|eta| full.as_ref().is_some_and(|mu| mu.is_subassignment_of(eta))),
        rounds: None,
        converged: None,
        bits: bits_string(&best.bits),
    }
}

#[allow(clippy::too_many_arguments)]
fn run_solve(
    command: &'static str,
    input_path: &Path,
    projection: &ProjectionArgs,
    force_projection: bool,
    model: Option<&Path>,
    weights: &WeightArgs,
    sa: &SaArgs,
    output: Option<&Path>,
) -> Result<u8> {
    let Some(loaded) = load_or_unsat(command, input_path, output)? else {
        return Ok(EXIT_NO_SOLUTION);
    };
    let eta = match model {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            Some(input::total_model(&input::parse_literals(&text)?, &loaded)?)
        }
        None => None,
    };
    let Some(pre) = preprocess_or_unsat(command, input_path, &loaded, output)? else {
        return Ok(EXIT_NO_SOLUTION);
    };
    let visible = resolve_visible(projection, &loaded, force_projection)?;
    let (enc, overridden) = build_encoding(&loaded, &pre, visible.clone(), eta.clone(), weights)?;
    let (cfg_initial, cfg_round) = sa.configs();
    let budget = OracleBudget(sa.oracle_budget);
    let map_anneal = |e: AnnealError| anyhow::anyhow!(e);

    let (mut info, rounds, converged) = if sa.iter {
        let trace = iterate_shrink(&enc, &cfg_initial, &cfg_round, sa.max_rounds).map_err(map_anneal)?;
        let rounds = trace
            .rounds
            .iter()
            .map(|r| RoundInfo {
                frozen: r.frozen.iter().copied().collect(),
                size: r.best.decoded.as_ref().map(|mu| enc.scoped_size(mu)),
                energy: r.best.energy,
                accepted: r.accepted,
            })
            .collect();
        (
            result_info(trace.result(), &enc, &pre, &loaded, eta.as_ref(), budget),
            Some(rounds),
            Some(trace.converged),
        )
    } else {
        let pool = sample(&enc, &cfg_initial).map_err(map_anneal)?;
        let best = best_of(&pool).map_err(map_anneal)?;
        (result_info(best, &enc, &pre, &loaded, eta.as_ref(), budget), None, None)
    };
    info.rounds = rounds;
    info.converged = converged;

    let satisfying = info.verdict.satisfying;
    let w = &enc.weights;
    let report = Report {
        command,
        input: input_path.display().to_string(),
        status: if satisfying {
            "satisfying"
        } else {
            "no_satisfying_decode"
        },
        config: Some(EffectiveConfig {
            task: if eta.is_some() { "shrink" } else { "full" },
            scope: if visible.is_some() { "projected" } else { "standard" },
            visible: visible.map(|p| p.into_iter().collect()),
            weights: WeightsOut {
                gamma: w.gamma,
                lambda: w.lambda,
                big_m: w.big_m,
                overridden,
            },
            strategy: if sa.iter { "iter" } else { "basic" },
            beta_range: beta_range(&enc, &cfg_initial),
            sa_round: sa.iter.then_some(cfg_round),
            sa_initial: cfg_initial,
            max_rounds: sa.iter.then_some(sa.max_rounds),
            oracle_budget: sa.oracle_budget,
        }),
        formula: Some(formula_info(&loaded, &pre)),
        result: Some(info),
        warnings: enc.warnings.clone(),
        note: None,
    };
    emit_report(&report, output)?;
    Ok(if satisfying { EXIT_OK } else { EXIT_NO_SOLUTION })
}

#[derive(Serialize)]
struct EncodeOut<'a> {
    model: ModelDocument<f64>,
    feasible_energy_bound: f64,
    weights: &'a Weights<f64>,
    forced: Vec<i64>,
    warnings: &'a [String],
}

fn run_encode(args: &EncodeArgs) -> Result<u8> {
    let output = args.output.as_deref();
    let Some(loaded) = load_or_unsat("encode", &args.input, output)? else {
        return Ok(EXIT_NO_SOLUTION);
    };
    if let Format::Dimacs = args.format {
        if args.ising {
            bail!("--ising only applies to --format qubo-json");
        }
        let f = if args.no_preprocess {
            loaded.cnf.clone()
        } else {
            preprocess(&loaded.cnf).formula
        };
        write_output(output, f.to_dimacs().trim_end())?;
        return Ok(EXIT_OK);
    }
    let pre = if args.no_preprocess {
        PreprocessResult {
            formula: loaded.cnf.clone(),
            forced: Vec::new(),
            eliminated: BTreeSet::new(),
            status: PreprocessStatus::Reduced,
        }
    } else {
        match preprocess_or_unsat("encode", &args.input, &loaded, output)? {
            Some(p) => p,
            None => return Ok(EXIT_NO_SOLUTION),
        }
    };
    let eta = match &args.model {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            Some(input::total_model(&input::parse_literals(&text)?, &loaded)?)
        }
        None => None,
    };
    let visible = resolve_visible(&args.projection, &loaded, false)?;
    let (enc, _) = build_encoding(&loaded, &pre, visible, eta, &args.weights)?;
    let doc = if args.ising {
        let ising = enc.model.to_ising();
        spot_check(&enc, &ising);
        ModelDocument::from_ising(&ising, Some(&enc.registry))
    } else {
        ModelDocument::from_qubo(&enc.model, Some(&enc.registry))
    };
    let out = EncodeOut {
        model: doc,
        feasible_energy_bound: enc.feasible_energy_bound,
        weights: &enc.weights,
        forced: pre.forced.iter().map(|l| l.to_dimacs()).collect(),
        warnings: &enc.warnings,
    };
    write_output(output, &serde_json::to_string_pretty(&out)?)?;
    Ok(EXIT_OK)
}

/// Compares QUBO and Ising energies on a few vectors that respect the
/// fixed spins and reports the largest difference on stderr.
fn spot_check(enc: &Encoding<f64>, ising: &pqubo::IsingModel<f64>) {
    let dim = enc.model.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut worst: f64 = 0.0;
    let trials = 8;
    for t in 0..trials {
        let mut x: Vec<bool> = match t {
            0 => vec![false; dim],
            1 => vec![true; dim],
            _ => (0..dim).map(|_| rng.gen()).collect(),
        };
        for (&i, &v) in enc.model.fixed() {
            x[i] = v;
        }
        let q = enc.model.energy_unchecked(&x);
        match ising.energy(&to_spins(&x)) {
            Ok(e) => worst = worst.max((q - e).abs()),
            Err(err) => {
                eprintln!("ising spot-check failed: {err}");
                return;
            }
        }
    }
    eprintln!("ising spot-check: {trials} vectors, max |E_qubo - E_ising| = {worst:e}");
}

fn parse_mode(label: &str) -> Result<Vec<ModeSpec>> {
    if label == "all" {
        return Ok(ModeSpec::all());
    }
    ModeSpec::all()
        .into_iter()
        .find(|m| m.label() == label)
        .map(|m| vec![m])
        .with_context(|| format!("unknown mode {label:?}; expected task/scope/strategy, e.g. full/standard/basic"))
}

#[derive(Serialize)]
struct BenchOut {
    records: PathBuf,
    summary: PathBuf,
    spec: ExperimentSpec,
    rows: Vec<bench::SummaryRow>,
}

fn run_bench(args: &BenchArgs) -> Result<u8> {
    let mut modes = Vec::new();
    for label in &args.modes {
        for m in parse_mode(label.trim())? {
            if !modes.contains(&m) {
                modes.push(m);
            }
        }
    }
    let family = match args.family {
        FamilyArg::Random3sat => Family::Random3Sat {
            ns: if args.ns.is_empty() {
                (8..=48).step_by(4).collect()
            } else {
                args.ns.clone()
            },
            density: args.density,
            instances: args.instances,
        },
        FamilyArg::Noncnf => Family::NonCnf {
            ns: if args.ns.is_empty() {
                vec![12, 16, 20]
            } else {
                args.ns.clone()
            },
            depth: args.depth,
            fanin: args.fanin,
            instances: args.instances,
        },
    };
    let (sa_initial, sa_round) = args.sa.configs();
    let spec = ExperimentSpec {
        family,
        modes,
        sa_initial,
        sa_round,
        seed: args.sa.seed,
        max_rounds: args.sa.max_rounds,
        projection_fraction: args.projection_fraction,
        oracle_budget: OracleBudget(args.sa.oracle_budget),
    };
    let records = bench::run_experiment(&spec)?;
    let (records_path, summary) = bench::emit(
        &records,
        &args.out,
        EmitOptions {
            include_timing: args.timing,
        },
    )?;
    let rows = bench::summarize(&records);
    let out = BenchOut {
        records: records_path,
        summary,
        spec,
        rows,
    };
    write_output(None, &serde_json::to_string_pretty(&out)?)?;
    Ok(EXIT_OK)
}

fn parse_bits(text: &str) -> Result<Vec<bool>> {
    text.chars()
        .filter(|c| !c.is_whitespace() && !matches!(c, ',' | '[' | ']'))
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => bail!("unexpected character {other:?} in spin vector"),
        })
        .collect()
}

#[derive(Serialize)]
struct VerifyOut {
    status: &'static str,
    energy: f64,
    feasible_energy_bound: f64,
    decoded: Option<Vec<i64>>,
    verdict: Verdict,
}

fn run_verify(args: &VerifyArgs) -> Result<u8> {
    let Some(loaded) = load_or_unsat("verify", &args.input, None)? else {
        return Ok(EXIT_NO_SOLUTION);
    };
    let Some(pre) = preprocess_or_unsat("verify", &args.input, &loaded, None)? else {
        return Ok(EXIT_NO_SOLUTION);
    };
    let eta = match &args.model {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            Some(input::total_model(&input::parse_literals(&text)?, &loaded)?)
        }
        None => None,
    };
    let visible = resolve_visible(&args.projection, &loaded, false)?;
    let (enc, _) = build_encoding(&loaded, &pre, visible, eta, &args.weights)?;
    let bits = match (&args.bits, &args.assignment) {
        (Some(p), _) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            let bits = parse_bits(&text)?;
            if bits.len() != enc.model.dim() {
                bail!(
                    "spin vector has {} entries, the model has {}",
                    bits.len(),
                    enc.model.dim()
                );
            }
            bits
        }
        (None, Some(a)) => {
            let lits = input::parse_literals(a)?;
            let n = enc.num_vars();
            if let Some(l) = lits.iter().find(|l| l.var as usize > n) {
                bail!("assignment mentions variable {} but the formula has {n}", l.var);
            }
            let mu = PartialAssignment::from_literals(n, &lits).context("assignment sets a variable both ways")?;
            enc.complete_aux(&enc.polarity_bits(&mu))
        }
        (None, None) => unreachable!("clap requires one of them"),
    };
    let v = verdict_for_bits(&bits, &enc, OracleBudget(args.oracle_budget));
    let out = VerifyOut {
        status: if v.satisfying {
            "satisfying"
        } else {
            "no_satisfying_decode"
        },
        energy: enc.model.energy_unchecked(&bits),
        feasible_energy_bound: enc.feasible_energy_bound,
        decoded: pqubo::decode(&bits, &enc.registry).ok().map(|mu| dimacs_lits(&mu)),
        verdict: v,
    };
    write_output(None, &serde_json::to_string_pretty(&out)?)?;
    Ok(if v.satisfying { EXIT_OK } else { EXIT_NO_SOLUTION })
}

fn run(cli: Cli) -> Result<u8> {
    match &cli.cmd {
        Command::Solve(a) => run_solve(
            "solve",
            &a.input,
            &a.projection,
            false,
            None,
            &a.weights,
            &a.sa,
            a.output.as_deref(),
        ),
        Command::Project(a) => run_solve(
            "project",
            &a.input,
            &a.projection,
            true,
            None,
            &a.weights,
            &a.sa,
            a.output.as_deref(),
        ),
        Command::Shrink(a) => run_solve(
            "shrink",
            &a.input,
            &a.projection,
            false,
            Some(&a.model),
            &a.weights,
            &a.sa,
            a.output.as_deref(),
        ),
        Command::Encode(a) => run_encode(a),
        Command::Bench(a) => run_bench(a),
        Command::Verify(a) => run_verify(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
