//! Random instance generation, experiment batches and result files.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annealer::{best_of, iterate_shrink, sample, SaConfig, SampleResult};
use crate::circuit::{plaisted_greenbaum, random_satisfiable_nested, NestedConfig};
use crate::encoder::{default_weights, encode, EncodeMode, SparsityScope};
use crate::formula::{first_model, preprocess, CnfFormula, Literal, PartialAssignment, PreprocessStatus};
use crate::verify::{verdict, OracleBudget, Verdict};

/// SplitMix64 finalizer, used to derive independent sub-seeds.
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Satisfiable random 3-SAT with `round(density * n)` distinct clauses over
/// three distinct variables each. Unsatisfiable draws are replaced by the
/// draw from the next sub-seed.
pub fn gen_random_3sat(n: usize, density: f64, seed: u64) -> CnfFormula {
    assert!(n >= 4, "random 3-SAT needs at least 4 variables");
    assert!(density > 0.0, "density must be positive");
    let m = (density * n as f64).round() as usize;
    let distinct = n * (n - 1) * (n - 2) / 6 * 8;
    assert!(m <= distinct, "{m} distinct clauses requested, only {distinct} exist");
    for sub in 0u64.. {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(sub);
        let mut seen = BTreeSet::new();
        let mut clauses = Vec::with_capacity(m);
        while clauses.len() < m {
            let mut vars: Vec<u32> = sample_indices(&mut rng, n, 3)
                .into_iter()
                .map(|i| i as u32 + 1)
                .collect();
            vars.sort_unstable();
            let clause: Vec<Literal> = vars.into_iter().map(|v| Literal::new(v, rng.gen_bool(0.5))).collect();
            if seen.insert(clause.clone()) {
                clauses.push(clause);
            }
        }
        let f = CnfFormula { num_vars: n, clauses };
        if first_model(&f).is_some() {
            return f;
        }
    }
    unreachable!()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    Random3Sat {
        ns: Vec<usize>,
        density: f64,
        instances: usize,
    },
    /// Nested AND/OR expressions converted with Plaisted–Greenbaum.
    NonCnf {
        ns: Vec<usize>,
        depth: u32,
        fanin: usize,
        instances: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Full,
    Shrink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScopeKind {
    Standard,
    Projected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Basic,
    Iter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeSpec {
    pub task: TaskKind,
    pub scope: ScopeKind,
    pub strategy: Strategy,
}

impl ModeSpec {
    pub fn new(task: TaskKind, scope: ScopeKind, strategy: Strategy) -> Self {
        ModeSpec { task, scope, strategy }
    }

    /// All eight combinations.
    pub fn all() -> Vec<ModeSpec> {
        let mut out = Vec::new();
        for task in [TaskKind::Full, TaskKind::Shrink] {
            for scope in [ScopeKind::Standard, ScopeKind::Projected] {
                for strategy in [Strategy::Basic, Strategy::Iter] {
                    out.push(ModeSpec::new(task, scope, strategy));
                }
            }
        }
        out
    }

    pub fn label(&self) -> String {
        let t = match self.task {
            TaskKind::Full => "full",
            TaskKind::Shrink => "shrink",
        };
        let s = match self.scope {
            ScopeKind::Standard => "standard",
            ScopeKind::Projected => "projected",
        };
        let g = match self.strategy {
            Strategy::Basic => "basic",
            Strategy::Iter => "iter",
        };
        format!("{t}/{s}/{g}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub family: Family,
    pub modes: Vec<ModeSpec>,
    pub sa_initial: SaConfig,
    pub sa_round: SaConfig,
    pub seed: u64,
    pub max_rounds: usize,
    /// Share of variables made visible for projected 3-SAT runs.
    pub projection_fraction: f64,
    pub oracle_budget: OracleBudget,
}

impl ExperimentSpec {
    pub fn new(family: Family, modes: Vec<ModeSpec>, seed: u64) -> Self {
        ExperimentSpec {
            family,
            modes,
            sa_initial: SaConfig::default(),
            sa_round: SaConfig::refinement_default(),
            seed,
            max_rounds: 10,
            projection_fraction: 0.75,
            oracle_budget: OracleBudget::default(),
        }
    }

    fn validate(&self) -> Result<(), BenchError> {
        let (ns, instances) = match &self.family {
            Family::Random3Sat { ns, density, instances } => {
                if density.is_nan() || *density <= 0.0 {
                    return Err(BenchError::BadSpec(format!("density must be positive, got {density}")));
                }
                if let Some(n) = ns.iter().find(|&&n| n < 4) {
                    return Err(BenchError::BadSpec(format!("random 3-SAT needs n >= 4, got {n}")));
                }
                (ns, *instances)
            }
            Family::NonCnf {
                ns,
                depth,
                fanin,
                instances,
            } => {
                if *depth == 0 || *fanin < 2 || ns.contains(&0) {
                    return Err(BenchError::BadSpec(
                        "non-CNF needs depth >= 1, fanin >= 2, n >= 1".into(),
                    ));
                }
                (ns, *instances)
            }
        };
        if instances == 0 || ns.is_empty() {
            return Err(BenchError::BadSpec("need at least one n and one instance".into()));
        }
        if self.modes.is_empty() {
            return Err(BenchError::BadSpec("no modes selected".into()));
        }
        if !(self.projection_fraction > 0.0 && self.projection_fraction <= 1.0) {
            return Err(BenchError::BadSpec("projection fraction must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid experiment: {0}")]
    BadSpec(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InstanceId {
    pub family: String,
    pub n: usize,
    pub index: usize,
    pub seed: u64,
}

/// A generated benchmark formula with its visible variable set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub id: InstanceId,
    pub formula: CnfFormula,
    /// Random 75% subset for 3-SAT; original variables for non-CNF.
    pub visible: BTreeSet<u32>,
}

pub fn build_instances(spec: &ExperimentSpec) -> Vec<Instance> {
    let mut out = Vec::new();
    match &spec.family {
        Family::Random3Sat { ns, density, instances } => {
            for &n in ns {
                for index in 0..*instances {
                    let seed = mix_seed(spec.seed, (n as u64) << 32 | index as u64);
                    let formula = gen_random_3sat(n, *density, seed);
                    let k = ((spec.projection_fraction * n as f64).round() as usize).clamp(1, n);
                    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x5052_4f4a));
                    let visible = sample_indices(&mut rng, n, k)
                        .into_iter()
                        .map(|i| i as u32 + 1)
                        .collect();
                    out.push(Instance {
                        id: InstanceId {
                            family: "random3sat".into(),
                            n,
                            index,
                            seed,
                        },
                        formula,
                        visible,
                    });
                }
            }
        }
        Family::NonCnf {
            ns,
            depth,
            fanin,
            instances,
        } => {
            for &n in ns {
                for index in 0..*instances {
                    let base = mix_seed(spec.seed, (n as u64) << 32 | index as u64);
                    let (expr, seed) =
                        random_satisfiable_nested(n as u32, *depth, *fanin, base, NestedConfig::default());
                    let conv = plaisted_greenbaum(&expr);
                    out.push(Instance {
                        id: InstanceId {
                            family: "noncnf".into(),
                            n,
                            index,
                            seed,
                        },
                        formula: conv.cnf,
                        visible: (1..=n as u32).collect(),
                    });
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: InstanceId,
    pub mode: ModeSpec,
    /// Number of variables in the encoded formula, auxiliaries included.
    pub num_vars: usize,
    /// Variables that pay sparsity: all of them, or the visible set.
    pub scope_size: usize,
    pub best: Option<SampleResult<f64>>,
    pub verdict: Option<Verdict>,
    /// Size of the decoded assignment over the sparsity scope.
    pub scoped_size: Option<usize>,
    /// Scoped size after re-adding literals forced by unit propagation.
    pub scoped_size_with_forced: Option<usize>,
    pub rounds_used: usize,
    pub converged: Option<bool>,
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_ms: Option<f64>,
}

impl RunRecord {
    /// `|mu| / n` or `|pi| / |P|`.
    pub fn assigned_ratio(&self) -> Option<f64> {
        self.scoped_size.map(|s| s as f64 / self.scope_size.max(1) as f64)
    }
}

fn run_one(inst: &Instance, mode: ModeSpec, spec: &ExperimentSpec) -> Result<RunRecord, String> {
    let pre = preprocess(&inst.formula);
    if pre.status == PreprocessStatus::UnsatDetected {
        return Err("formula is unsatisfiable".into());
    }
    let f = &pre.formula;
    let n = f.num_vars;
    let (scope, b) = match mode.scope {
        ScopeKind::Standard => (SparsityScope::Standard, n),
        ScopeKind::Projected => (SparsityScope::Projected(inst.visible.clone()), inst.visible.len()),
    };
    let mut enc_mode = match mode.task {
        TaskKind::Full => EncodeMode::full(),
        TaskKind::Shrink => {
            let model = first_model(&inst.formula).ok_or("no total model found")?;
            EncodeMode::shrink(PartialAssignment::from_total(&model))
        }
    };
    enc_mode = enc_mode.with_scope(scope);
    let enc = encode::<f64>(f, default_weights(b), enc_mode).map_err(|e| e.to_string())?;
    let (best, rounds_used, converged) = match mode.strategy {
        Strategy::Basic => {
            let pool = sample(&enc, &spec.sa_initial).map_err(|e| e.to_string())?;
            (best_of(&pool).map_err(|e| e.to_string())?.clone(), 0, None)
        }
        Strategy::Iter => {
            let trace =
                iterate_shrink(&enc, &spec.sa_initial, &spec.sa_round, spec.max_rounds).map_err(|e| e.to_string())?;
            (trace.result().clone(), trace.refinement_rounds(), Some(trace.converged))
        }
    };
    let v = verdict(&best, &enc, spec.oracle_budget);
    let scoped_size = best.decoded.as_ref().map(|mu| enc.scoped_size(mu));
    let scoped_size_with_forced = best
        .decoded
        .as_ref()
        .and_then(|mu| pre.reattach(mu))
        .map(|mu| enc.scoped_size(&mu));
    Ok(RunRecord {
        instance: inst.id.clone(),
        mode,
        num_vars: n,
        scope_size: b,
        best: Some(best),
        verdict: Some(v),
        scoped_size,
        scoped_size_with_forced,
        rounds_used,
        converged,
        error: None,
        wall_time_ms: None,
    })
}

/// Runs every instance under every mode, in (n, instance, mode) order.
/// Failures are kept as records with `error` set.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<RunRecord>, BenchError> {
    spec.validate()?;
    let mut records = Vec::new();
    for inst in build_instances(spec) {
        for &mode in &spec.modes {
            let start = Instant::now();
            let mut rec = run_one(&inst, mode, spec).unwrap_or_else(|e| RunRecord {
                instance: inst.id.clone(),
                mode,
                num_vars: inst.formula.num_vars,
                scope_size: 0,
                best: None,
                verdict: None,
                scoped_size: None,
                scoped_size_with_forced: None,
                rounds_used: 0,
                converged: None,
                error: Some(e),
                wall_time_ms: None,
            });
            rec.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            records.push(rec);
        }
    }
    Ok(records)
}

/// One row of `summary.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub family: String,
    pub n: usize,
    pub mode: String,
    pub runs: usize,
    pub failures: usize,
    pub satisfying_rate: f64,
    pub below_bound_rate: f64,
    pub mean_ratio: f64,
    pub std_ratio: f64,
    pub minimal_rate: f64,
    pub minimum_rate: f64,
    /// Runs whose minimum check was cut off by the oracle budget.
    pub minimum_unknown: usize,
    pub mean_rounds: f64,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64;
    (m, var.sqrt())
}

/// Aggregates by (family, n, mode) in first-seen order.
pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut keys: Vec<(String, usize, ModeSpec)> = Vec::new();
    for r in records {
        let k = (r.instance.family.clone(), r.instance.n, r.mode);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(family, n, mode)| {
            let group: Vec<&RunRecord> = records
                .iter()
                .filter(|r| r.instance.family == family && r.instance.n == n && r.mode == mode)
                .collect();
            let runs = group.len();
            let rate =
                |pred: &dyn Fn(&RunRecord) -> bool| group.iter().filter(|r| pred(r)).count() as f64 / runs as f64;
            let ratios: Vec<f64> = group
                .iter()
                .filter(|r| r.verdict.is_some_and(|v| v.satisfying))
                .filter_map(|r| r.assigned_ratio())
                .collect();
            let (mean_ratio, std_ratio) = mean_std(&ratios);
            let rounds: Vec<f64> = group.iter().map(|r| r.rounds_used as f64).collect();
            SummaryRow {
                family,
                n,
                mode: mode.label(),
                runs,
                failures: group.iter().filter(|r| r.error.is_some()).count(),
                satisfying_rate: rate(&|r| r.verdict.is_some_and(|v| v.satisfying)),
                below_bound_rate: rate(&|r| r.verdict.is_some_and(|v| v.energy_below_bound)),
                mean_ratio,
                std_ratio,
                minimal_rate: rate(&|r| r.verdict.is_some_and(|v| v.minimal == Some(true))),
                minimum_rate: rate(&|r| r.verdict.is_some_and(|v| v.minimum == Some(true))),
                minimum_unknown: group
                    .iter()
                    .filter(|r| r.verdict.is_some_and(|v| v.satisfying && v.minimum.is_none()))
                    .count(),
                mean_rounds: mean_std(&rounds).0,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EmitOptions {
    /// Keep wall-clock times in `records.jsonl`. Off by default so reruns
    /// produce identical files.
    pub include_timing: bool,
}

/// Writes `records.jsonl` and `summary.csv` into `dir`, returning their paths.
pub fn emit(records: &[RunRecord], dir: &Path, opts: EmitOptions) -> Result<(PathBuf, PathBuf), BenchError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| BenchError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let jsonl = dir.join("records.jsonl");
    let mut w = BufWriter::new(File::create(&jsonl).map_err(io_err(&jsonl))?);
    for r in records {
        let mut r = r.clone();
        if !opts.include_timing {
            r.wall_time_ms = None;
        }
        let line = serde_json::to_string(&r).expect("records serialize");
        writeln!(w, "{line}").map_err(io_err(&jsonl))?;
    }
    w.flush().map_err(io_err(&jsonl))?;

    let csv_path = dir.join("summary.csv");
    let csv_err = |source| BenchError::Csv {
        path: csv_path.clone(),
        source,
    };
    let mut cw = csv::Writer::from_path(&csv_path).map_err(csv_err)?;
    for row in summarize(records) {
        cw.serialize(row).map_err(csv_err)?;
    }
    cw.flush().map_err(io_err(&csv_path))?;
    Ok((jsonl, csv_path))
}
