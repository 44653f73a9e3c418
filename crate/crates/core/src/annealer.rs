//! Single-flip simulated annealing over an encoded QUBO, and the iterative
//! shrink refinement built on it.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoder::{EncodeError, Encoding};
use crate::formula::{entails, PartialAssignment};
use crate::qubo::QuboModel;
use crate::scalar::Scalar;
use crate::verify::decode;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BetaSchedule {
    /// Derived from the model's coefficient range.
    Auto,
    Geometric {
        beta_min: f64,
        beta_max: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaConfig {
    pub num_samples: usize,
    /// Temperature steps per restart; each step proposes one flip per free spin.
    pub sweeps_per_sample: usize,
    pub schedule: BetaSchedule,
    pub seed: u64,
    /// Return the lowest-energy state seen instead of the final state.
    pub restarts_keep_best: bool,
}

impl Default for SaConfig {
    fn default() -> Self {
        SaConfig {
            num_samples: 1000,
            sweeps_per_sample: 64,
            schedule: BetaSchedule::Auto,
            seed: 0,
            restarts_keep_best: false,
        }
    }
}

impl SaConfig {
    /// Configuration used for each refinement round.
    pub fn refinement_default() -> Self {
        SaConfig {
            num_samples: 100,
            ..SaConfig::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, num_samples: usize) -> Self {
        self.num_samples = num_samples;
        self
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnnealError {
    #[error("no samples to choose from")]
    EmptyPool,
    #[error("invalid annealing configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Encode(#[from] EncodeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleFlags {
    pub consistent: bool,
    pub satisfying: bool,
    pub below_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleResult<T> {
    /// Restart index within its batch.
    pub index: usize,
    pub bits: Vec<bool>,
    /// Exact energy under the encoding's scalar type.
    pub energy: T,
    pub decoded: Option<PartialAssignment>,
    pub inconsistent_vars: Vec<u32>,
    /// Variables with at least one active polarity spin.
    pub size: usize,
    pub flags: SampleFlags,
}

impl<T: Scalar> SampleResult<T> {
    pub fn from_bits(index: usize, bits: Vec<bool>, enc: &Encoding<T>) -> Self {
        let energy = enc.model.energy_unchecked(&bits);
        let reg = &enc.registry;
        let size = (1..=reg.num_vars() as u32)
            .filter(|&v| bits[reg.pos(v)] || bits[reg.neg(v)])
            .count();
        let (decoded, inconsistent_vars) = match decode(&bits, reg) {
            Ok(mu) => (Some(mu), Vec::new()),
            Err(r) => (None, r.vars),
        };
        let satisfying = decoded.as_ref().is_some_and(|mu| entails(mu, &enc.formula));
        SampleResult {
            index,
            flags: SampleFlags {
                consistent: decoded.is_some(),
                satisfying,
                below_bound: energy <= enc.feasible_energy_bound,
            },
            bits,
            energy,
            decoded,
            inconsistent_vars,
            size,
        }
    }
}

/// Dense f64 view of the free part of a model.
struct Compiled {
    linear: Vec<f64>,
    adj: Vec<Vec<(usize, f64)>>,
    free: Vec<usize>,
    fixed: Vec<Option<bool>>,
}

impl Compiled {
    fn new<T: Scalar>(model: &QuboModel<T>) -> Self {
        let folded = model.fold_fixed();
        let dim = folded.dim();
        let mut linear = vec![0.0; dim];
        for (&i, c) in folded.linear() {
            linear[i] += c.to_f64_lossy();
        }
        let mut adj = vec![Vec::new(); dim];
        for (&(i, j), c) in folded.quadratic() {
            let c = c.to_f64_lossy();
            adj[i].push((j, c));
            adj[j].push((i, c));
        }
        let mut fixed = vec![None; dim];
        for (&i, &v) in model.fixed() {
            fixed[i] = Some(v);
        }
        let free = (0..dim).filter(|&i| fixed[i].is_none()).collect();
        Compiled {
            linear,
            adj,
            free,
            fixed,
        }
    }

    /// `beta_min` accepts the largest possible uphill move with probability
    /// 1/2; `beta_max` accepts the smallest nonzero one with probability 1e-6.
    fn auto_betas(&self) -> (f64, f64) {
        let mut max_delta: f64 = 0.0;
        let mut min_delta = f64::INFINITY;
        for &i in &self.free {
            let mut span = self.linear[i].abs();
            if self.linear[i] != 0.0 {
                min_delta = min_delta.min(self.linear[i].abs());
            }
            for &(j, c) in &self.adj[i] {
                if self.fixed[j].is_none() {
                    span += c.abs();
                    if c != 0.0 {
                        min_delta = min_delta.min(c.abs());
                    }
                }
            }
            max_delta = max_delta.max(span);
        }
        if max_delta == 0.0 {
            return (1.0, 1.0);
        }
        let beta_min = std::f64::consts::LN_2 / max_delta;
        let beta_max = (1e6f64).ln() / min_delta;
        (beta_min, beta_max.max(beta_min))
    }

    fn fields(&self, x: &[bool]) -> Vec<f64> {
        let mut f = self.linear.clone();
        for (i, nb) in self.adj.iter().enumerate() {
            for &(j, c) in nb {
                if x[j] {
                    f[i] += c;
                }
            }
        }
        f
    }

    fn flip(&self, x: &mut [bool], fields: &mut [f64], i: usize) {
        x[i] = !x[i];
        let sign = if x[i] { 1.0 } else { -1.0 };
        for &(j, c) in &self.adj[i] {
            fields[j] += sign * c;
        }
    }

    fn delta(x: &[bool], fields: &[f64], i: usize) -> f64 {
        if x[i] {
            -fields[i]
        } else {
            fields[i]
        }
    }

    fn run(&self, betas: &[f64], rng: &mut ChaCha8Rng, restarts_keep_best: bool) -> Vec<bool> {
        let dim = self.linear.len();
        let mut x: Vec<bool> = (0..dim).map(|i| self.fixed[i].unwrap_or(false)).collect();
        for &i in &self.free {
            x[i] = rng.gen::<bool>();
        }
        let mut fields = self.fields(&x);
        let mut energy = 0.0;
        let mut best = (0.0, x.clone());
        if self.free.is_empty() {
            return x;
        }
        for &beta in betas {
            for _ in 0..self.free.len() {
                let i = self.free[rng.gen_range(0..self.free.len())];
                let d = Self::delta(&x, &fields, i);
                if d <= 0.0 || rng.gen::<f64>() < (-beta * d).exp() {
                    self.flip(&mut x, &mut fields, i);
                    energy += d;
                }
            }
            if restarts_keep_best && energy < best.0 {
                best = (energy, x.clone());
            }
        }
        // Zero-temperature descent to the nearest local minimum.
        loop {
            let mut improved = false;
            for &i in &self.free {
                let d = Self::delta(&x, &fields, i);
                if d < -1e-9 {
                    self.flip(&mut x, &mut fields, i);
                    energy += d;
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        if restarts_keep_best && best.0 < energy {
            best.1
        } else {
            x
        }
    }
}

fn geometric(beta_min: f64, beta_max: f64, steps: usize) -> Vec<f64> {
    if steps <= 1 {
        return vec![beta_max; steps];
    }
    let ratio = (beta_max / beta_min).powf(1.0 / (steps - 1) as f64);
    (0..steps).map(|k| beta_min * ratio.powi(k as i32)).collect()
}

fn check_config(cfg: &SaConfig) -> Result<(), AnnealError> {
    if cfg.num_samples == 0 {
        return Err(AnnealError::BadConfig("num_samples must be positive".into()));
    }
    if let BetaSchedule::Geometric { beta_min, beta_max } = cfg.schedule {
        if !(beta_min > 0.0 && beta_max >= beta_min && beta_max.is_finite()) {
            return Err(AnnealError::BadConfig(format!(
                "need 0 < beta_min <= beta_max, got {beta_min}, {beta_max}"
            )));
        }
    }
    Ok(())
}

/// Inverse temperatures used for `enc` under `cfg`.
pub fn beta_range<T: Scalar>(enc: &Encoding<T>, cfg: &SaConfig) -> (f64, f64) {
    match cfg.schedule {
        BetaSchedule::Auto => Compiled::new(&enc.model).auto_betas(),
        BetaSchedule::Geometric { beta_min, beta_max } => (beta_min, beta_max),
    }
}

/// Runs `cfg.num_samples` independent restarts. Restart `r` draws from
/// stream `r` of a ChaCha8 generator seeded with `cfg.seed`, so results do
/// not depend on thread scheduling.
pub fn sample<T: Scalar>(enc: &Encoding<T>, cfg: &SaConfig) -> Result<Vec<SampleResult<T>>, AnnealError> {
    check_config(cfg)?;
    let compiled = Compiled::new(&enc.model);
    let (lo, hi) = match cfg.schedule {
        BetaSchedule::Auto => compiled.auto_betas(),
        BetaSchedule::Geometric { beta_min, beta_max } => (beta_min, beta_max),
    };
    let betas = geometric(lo, hi, cfg.sweeps_per_sample);
    Ok((0..cfg.num_samples)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(r as u64);
            let bits = compiled.run(&betas, &mut rng, cfg.restarts_keep_best);
            SampleResult::from_bits(r, bits, enc)
        })
        .collect())
}

/// Lowest energy, then fewest assigned variables, then lowest index.
pub fn best_of<T: Scalar>(samples: &[SampleResult<T>]) -> Result<&SampleResult<T>, AnnealError> {
    samples
        .iter()
        .min_by(|a, b| {
            a.energy
                .partial_cmp(&b.energy)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.size.cmp(&b.size))
                .then(a.index.cmp(&b.index))
        })
        .ok_or(AnnealError::EmptyPool)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefineRound<T> {
    /// Scoped variables frozen to `(0,0)` for this round; empty for round 0.
    pub frozen: BTreeSet<u32>,
    pub best: SampleResult<T>,
    /// Whether this round's best replaced the incumbent.
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefineTrace<T> {
    /// Round 0 is the initial sample; later rounds are refinements.
    pub rounds: Vec<RefineRound<T>>,
    /// Stopped because a round produced no strict shrink.
    pub converged: bool,
}

impl<T: Scalar> RefineTrace<T> {
    /// Best accepted result.
    pub fn result(&self) -> &SampleResult<T> {
        &self
            .rounds
            .iter()
            .rev()
            .find(|r| r.accepted)
            .expect("round 0 is always accepted")
            .best
    }

    /// Refinement rounds run after the initial sample.
    pub fn refinement_rounds(&self) -> usize {
        self.rounds.len() - 1
    }

    /// Scoped sizes of the accepted results, in order.
    pub fn accepted_sizes(&self, enc: &Encoding<T>) -> Vec<usize> {
        self.rounds
            .iter()
            .filter(|r| r.accepted)
            .filter_map(|r| r.best.decoded.as_ref().map(|mu| enc.scoped_size(mu)))
            .collect()
    }
}

fn round_seed(seed: u64, round: usize) -> u64 {
    seed ^ (round as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Samples once, then repeatedly re-anneals restricted to sub-assignments
/// of the incumbent on the scoped variables. A round is accepted only if
/// its best decodes to a satisfying assignment that is strictly smaller.
pub fn iterate_shrink<T: Scalar>(
    enc: &Encoding<T>,
    initial: &SaConfig,
    round: &SaConfig,
    max_rounds: usize,
) -> Result<RefineTrace<T>, AnnealError> {
    let first = best_of(&sample(enc, initial)?)?.clone();
    let mut rounds = vec![RefineRound {
        frozen: BTreeSet::new(),
        best: first.clone(),
        accepted: true,
    }];
    if !first.flags.satisfying {
        return Ok(RefineTrace {
            rounds,
            converged: false,
        });
    }
    let scope: BTreeSet<u32> = enc.scope_vars().into_iter().collect();
    let mut incumbent = first;
    for r in 1..=max_rounds {
        let mu = incumbent.decoded.clone().expect("incumbent is satisfying");
        let restricted = enc.restrict_to_subassignments(&mu, &scope)?;
        let frozen: BTreeSet<u32> = scope.difference(&mu.assigned_vars()).copied().collect();
        let cfg = round.clone().with_seed(round_seed(round.seed, r));
        let cand = best_of(&sample(&restricted, &cfg)?)?.clone();
        let shrinks = cand.flags.satisfying
            && cand
                .decoded
                .as_ref()
                .is_some_and(|c| enc.scoped_size(c) < enc.scoped_size(&mu));
        rounds.push(RefineRound {
            frozen,
            best: cand.clone(),
            accepted: shrinks,
        });
        if !shrinks {
            return Ok(RefineTrace {
                rounds,
                converged: true,
            });
        }
        incumbent = cand;
    }
    Ok(RefineTrace {
        rounds,
        converged: false,
    })
}
