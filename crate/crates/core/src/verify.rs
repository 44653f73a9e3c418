//! Decoding spin vectors and certifying the decoded assignments.
//!
//! Exact oracles here search over clause covers: an implicant of a CNF must
//! make at least one literal of every clause true, so branching on the
//! literals of the first uncovered clause enumerates every inclusion-minimal
//! cover. Iterating the search with a growing size bound yields the
//! minimum size first.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annealer::SampleResult;
use crate::encoder::{Encoding, SparsityScope, Task};
use crate::formula::{entails, is_minimal_implicant, CnfFormula, Literal, PartialAssignment, Value};
use crate::qubo::SpinRegistry;
use crate::scalar::Scalar;

/// Variables whose two polarity spins are both active.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InconsistencyReport {
    pub vars: Vec<u32>,
}

/// Reads `(p_v, n_v)` pairs: `(1,0)` true, `(0,1)` false, `(0,0)` unassigned.
pub fn decode(bits: &[bool], registry: &SpinRegistry) -> Result<PartialAssignment, InconsistencyReport> {
    assert!(
        bits.len() >= registry.polarity_len(),
        "spin vector shorter than the polarity block"
    );
    let n = registry.num_vars();
    let mut mu = PartialAssignment::unassigned(n);
    let mut bad = Vec::new();
    for v in 1..=n as u32 {
        match (bits[registry.pos(v)], bits[registry.neg(v)]) {
            (true, false) => mu.set(v, Value::True),
            (false, true) => mu.set(v, Value::False),
            (false, false) => {}
            (true, true) => bad.push(v),
        }
    }
    if bad.is_empty() {
        Ok(mu)
    } else {
        Err(InconsistencyReport { vars: bad })
    }
}

/// Upper bound on search nodes for the exact oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleBudget(pub u64);

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget(5_000_000)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("search budget exhausted")]
    Exhausted,
    #[error("formula has no implicant (unsatisfiable)")]
    Unsatisfiable,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("projected assignment mentions variable {0} outside the visible set")]
    NotVisible(u32),
    #[error("variable {0} is neither visible nor hidden")]
    Uncovered(u32),
    #[error("enumeration over {0} variables exceeds the limit of 20")]
    TooLarge(usize),
    #[error("search budget exhausted")]
    Exhausted,
}

struct CoverSearch<'a> {
    clauses: &'a [Vec<Literal>],
    /// Literals the search may add, indexed by `2 * (var - 1) + !positive`.
    allowed: Vec<bool>,
    /// Variables whose assignment counts towards the size.
    counted: Vec<bool>,
    forbidden: Vec<bool>,
    nodes: u64,
    budget: u64,
}

fn lit_slot(l: Literal) -> usize {
    2 * (l.var as usize - 1) + usize::from(!l.positive)
}

impl<'a> CoverSearch<'a> {
    fn new(
        f: &'a CnfFormula,
        allowed: impl Fn(Literal) -> bool,
        counted: impl Fn(u32) -> bool,
        budget: OracleBudget,
    ) -> Self {
        let n = f.num_vars;
        let mut allowed_v = vec![false; 2 * n];
        for v in 1..=n as u32 {
            for lit in [Literal::pos(v), Literal::neg(v)] {
                allowed_v[lit_slot(lit)] = allowed(lit);
            }
        }
        CoverSearch {
            clauses: &f.clauses,
            allowed: allowed_v,
            counted: (1..=n as u32).map(counted).collect(),
            forbidden: vec![false; 2 * n],
            nodes: 0,
            budget: budget.0,
        }
    }

    /// DFS for a cover extending `mu` whose counted size stays `<= limit`.
    fn search(&mut self, mu: &mut PartialAssignment, size: usize, limit: usize) -> Result<bool, OracleError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(OracleError::Exhausted);
        }
        let Some(clause) = self.clauses.iter().find(|c| !c.iter().any(|&l| mu.is_true(l))) else {
            return Ok(true);
        };
        let mut tried = Vec::new();
        let mut found = false;
        for &lit in clause {
            let slot = lit_slot(lit);
            if !self.allowed[slot] || self.forbidden[slot] || mu.get(lit.var) != Value::Unassigned {
                continue;
            }
            let cost = usize::from(self.counted[lit.var as usize - 1]);
            if size + cost > limit {
                continue;
            }
            mu.set(lit.var, lit.value());
            let hit = self.search(mu, size + cost, limit);
            if matches!(hit, Ok(true)) {
                found = true;
                break;
            }
            mu.unassign(lit.var);
            if let Err(e) = hit {
                for s in tried {
                    self.forbidden[s] = false;
                }
                return Err(e);
            }
            // Covers containing `lit` were all explored in that branch.
            self.forbidden[slot] = true;
            tried.push(slot);
        }
        for s in tried {
            self.forbidden[s] = false;
        }
        Ok(found)
    }

    /// Smallest counted size over covers extending `base`, trying limits
    /// `0..=max_limit`.
    fn minimum(&mut self, base: &PartialAssignment, max_limit: usize) -> Result<PartialAssignment, OracleError> {
        for limit in 0..=max_limit {
            let mut mu = base.clone();
            if self.search(&mut mu, 0, limit)? {
                return Ok(mu);
            }
        }
        Err(OracleError::Unsatisfiable)
    }
}

/// Exact minimum implicant size by size-increasing search; returns the
/// first witness found at the minimum size.
pub fn minimum_implicant_oracle(
    f: &CnfFormula,
    budget: OracleBudget,
) -> Result<(usize, PartialAssignment), OracleError> {
    let mut search = CoverSearch::new(f, |_| true, |_| true, budget);
    let mu = search.minimum(&PartialAssignment::unassigned(f.num_vars), f.num_vars)?;
    Ok((mu.size(), mu))
}

/// Minimum size over all `3^n` partial assignments. Cross-check for small `n`.
pub fn minimum_implicant_by_enumeration(f: &CnfFormula) -> Option<usize> {
    let n = f.num_vars;
    assert!(n <= 16, "enumeration over 3^{n} assignments refused");
    let total = 3usize.pow(n as u32);
    let mut best: Option<usize> = None;
    let mut mu = PartialAssignment::unassigned(n);
    for code in 0..total {
        let mut c = code;
        for v in 1..=n as u32 {
            mu.set(
                v,
                match c % 3 {
                    0 => Value::Unassigned,
                    1 => Value::True,
                    _ => Value::False,
                },
            );
            c /= 3;
        }
        if best.is_none_or(|b| mu.size() < b) && entails(&mu, f) {
            best = Some(mu.size());
        }
    }
    best
}

/// Minimum implicant contained in `eta` on the variables of `scope`;
/// variables outside `scope` are free and uncounted.
pub fn minimum_within(
    f: &CnfFormula,
    eta: &PartialAssignment,
    scope: &BTreeSet<u32>,
    budget: OracleBudget,
) -> Result<(usize, PartialAssignment), OracleError> {
    let mut search = CoverSearch::new(
        f,
        |l| !scope.contains(&l.var) || eta.is_true(l),
        |v| scope.contains(&v),
        budget,
    );
    let mu = search.minimum(&PartialAssignment::unassigned(f.num_vars), scope.len())?;
    let size = scope.iter().filter(|&&v| mu.get(v) != Value::Unassigned).count();
    Ok((size, mu))
}

/// Minimum `|pi|` over projected assignments on `visible` that admit a
/// single hidden completion covering every clause.
pub fn projected_minimum(
    f: &CnfFormula,
    visible: &BTreeSet<u32>,
    budget: OracleBudget,
) -> Result<(usize, PartialAssignment), OracleError> {
    let mut search = CoverSearch::new(f, |_| true, |v| visible.contains(&v), budget);
    let mu = search.minimum(&PartialAssignment::unassigned(f.num_vars), visible.len())?;
    Ok((mu.restrict(visible).size(), mu.restrict(visible)))
}

/// Searches a hidden completion `sigma` such that `pi + sigma` covers every
/// clause. Returns the completed assignment.
pub fn uniform_witness(
    pi: &PartialAssignment,
    f: &CnfFormula,
    hidden: &BTreeSet<u32>,
    budget: OracleBudget,
) -> Result<Option<PartialAssignment>, OracleError> {
    let mut search = CoverSearch::new(f, |l| hidden.contains(&l.var), |_| false, budget);
    let mut mu = pi.resized(f.num_vars);
    if search.search(&mut mu, 0, 0)? {
        Ok(Some(mu))
    } else {
        Ok(None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProjectionSemantics {
    /// One hidden assignment works for every completion of the visible part.
    UniformWitness,
    /// Every visible completion has some hidden completion.
    ForallExists,
}

pub fn projected_implicant_check(
    pi: &PartialAssignment,
    f: &CnfFormula,
    visible: &BTreeSet<u32>,
    hidden: &BTreeSet<u32>,
    mode: ProjectionSemantics,
    budget: OracleBudget,
) -> Result<bool, VerifyError> {
    if let Some(v) = pi.assigned_vars().into_iter().find(|v| !visible.contains(v)) {
        return Err(VerifyError::NotVisible(v));
    }
    if let Some(v) = f
        .occurring_vars()
        .into_iter()
        .find(|v| !visible.contains(v) && !hidden.contains(v))
    {
        return Err(VerifyError::Uncovered(v));
    }
    match mode {
        ProjectionSemantics::UniformWitness => uniform_witness(pi, f, hidden, budget)
            .map(|w| w.is_some())
            .map_err(|_| VerifyError::Exhausted),
        ProjectionSemantics::ForallExists => {
            let total = visible.len() + hidden.len();
            if total > 20 {
                return Err(VerifyError::TooLarge(total));
            }
            let open: Vec<u32> = visible
                .iter()
                .copied()
                .filter(|&v| pi.get(v) == Value::Unassigned)
                .collect();
            let hid: Vec<u32> = hidden.iter().copied().collect();
            let n = f.num_vars;
            let mut values: Vec<bool> = (1..=n as u32).map(|v| pi.get(v) == Value::True).collect();
            for rho in 0u64..1 << open.len() {
                for (b, &v) in open.iter().enumerate() {
                    values[v as usize - 1] = rho >> b & 1 == 1;
                }
                let witnessed = (0u64..1 << hid.len()).any(|sigma| {
                    for (b, &v) in hid.iter().enumerate() {
                        values[v as usize - 1] = sigma >> b & 1 == 1;
                    }
                    f.eval_total(&values)
                });
                if !witnessed {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Post-check of one decoded sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub consistent: bool,
    pub satisfying: bool,
    /// Inclusion-minimal (prime); projected-prime in projected mode.
    pub minimal: Option<bool>,
    /// Minimum cardinality; relative to sub-assignments of the shrink model
    /// in shrink mode. `None` when the oracle budget ran out.
    pub minimum: Option<bool>,
    pub energy_below_bound: bool,
}

pub fn verdict<T: Scalar>(result: &SampleResult<T>, enc: &Encoding<T>, budget: OracleBudget) -> Verdict {
    verdict_for_bits(&result.bits, enc, budget)
}

/// Recomputes every check from the raw spin vector.
pub fn verdict_for_bits<T: Scalar>(bits: &[bool], enc: &Encoding<T>, budget: OracleBudget) -> Verdict {
    let energy_below_bound = enc
        .model
        .energy(bits)
        .map(|e| e <= enc.feasible_energy_bound)
        .unwrap_or(false);
    let decoded = decode(bits, &enc.registry);
    let consistent = decoded.is_ok();
    let f = &enc.formula;
    let mu = match decoded {
        Ok(mu) if entails(&mu, f) => mu,
        _ => {
            return Verdict {
                consistent,
                satisfying: false,
                minimal: None,
                minimum: None,
                energy_below_bound,
            }
        }
    };
    let (minimal, minimum) = match &enc.mode.scope {
        SparsityScope::Standard => {
            let minimal = is_minimal_implicant(&mu, f).ok();
            let best = match &enc.mode.task {
                Task::Full => minimum_implicant_oracle(f, budget).map(|(s, _)| s),
                Task::Shrink(eta) => {
                    let all: BTreeSet<u32> = (1..=f.num_vars as u32).collect();
                    minimum_within(f, eta, &all, budget).map(|(s, _)| s)
                }
            };
            (minimal, best.ok().map(|s| s == mu.size()))
        }
        SparsityScope::Projected(visible) => {
            let hidden: BTreeSet<u32> = (1..=f.num_vars as u32).filter(|v| !visible.contains(v)).collect();
            let pi = mu.restrict(visible);
            let minimal = projected_prime(&pi, f, &hidden, budget);
            let best = match &enc.mode.task {
                Task::Full => projected_minimum(f, visible, budget).map(|(s, _)| s),
                Task::Shrink(eta) => minimum_within(f, eta, visible, budget).map(|(s, _)| s),
            };
            (minimal, best.ok().map(|s| s == pi.size()))
        }
    };
    // A minimum-size result is necessarily minimal.
    let minimal = if minimum == Some(true) { Some(true) } else { minimal };
    Verdict {
        consistent,
        satisfying: true,
        minimal,
        minimum,
        energy_below_bound,
    }
}

/// No visible literal of `pi` can be dropped while a uniform hidden witness
/// still exists.
fn projected_prime(
    pi: &PartialAssignment,
    f: &CnfFormula,
    hidden: &BTreeSet<u32>,
    budget: OracleBudget,
) -> Option<bool> {
    for lit in pi.literals() {
        let mut smaller = pi.clone();
        smaller.unassign(lit.var);
        match uniform_witness(&smaller, f, hidden, budget) {
            Ok(Some(_)) => return Some(false),
            Ok(None) => {}
            Err(_) => return None,
        }
    }
    Some(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::{default_weights, encode, EncodeMode};

    fn cnf(n: usize, clauses: &[&[i64]]) -> CnfFormula {
        let owned: Vec<Vec<i64>> = clauses.iter().map(|c| c.to_vec()).collect();
        CnfFormula::from_dimacs_clauses(n, &owned).unwrap()
    }

    fn set(vs: &[u32]) -> BTreeSet<u32> {
        vs.iter().copied().collect()
    }

    #[test]
    fn decode_examples() {
        let reg = SpinRegistry::for_vars(3);
        let mu = decode(&[true, false, false, true, true, false], &reg).unwrap();
        assert_eq!(mu.to_string(), "{1 -2 3}");
        assert_eq!(decode(&[false; 6], &reg).unwrap().size(), 0);
        assert_eq!(
            decode(&[true, true, false, false, false, false], &reg),
            Err(InconsistencyReport { vars: vec![1] })
        );
    }

    #[test]
    fn oracle_examples() {
        let f = cnf(3, &[&[1, -2, 3]]);
        assert_eq!(minimum_implicant_oracle(&f, OracleBudget::default()).unwrap().0, 1);
        let units = cnf(2, &[&[1], &[2]]);
        let (size, w) = minimum_implicant_oracle(&units, OracleBudget::default()).unwrap();
        assert_eq!(size, 2);
        assert_eq!(w.to_string(), "{1 2}");
        let unsat = cnf(1, &[&[1], &[-1]]);
        assert_eq!(
            minimum_implicant_oracle(&unsat, OracleBudget::default()),
            Err(OracleError::Unsatisfiable)
        );
        let hard = cnf(4, &[&[1, 2], &[3, 4], &[-1, -3]]);
        assert_eq!(
            minimum_implicant_oracle(&hard, OracleBudget(1)),
            Err(OracleError::Exhausted)
        );
        assert_eq!(
            minimum_implicant_oracle(&cnf(2, &[]), OracleBudget::default())
                .unwrap()
                .0,
            0
        );
    }

    #[test]
    fn minimum_within_shrink_model() {
        let f = cnf(3, &[&[1, 2], &[-1, 3], &[2, 3]]);
        let eta = PartialAssignment::from_total(&[true, true, true]);
        // {2, 3} covers everything; {1, ...} needs 3 for clause 2 and so on.
        let (size, w) = minimum_within(&f, &eta, &set(&[1, 2, 3]), OracleBudget::default()).unwrap();
        assert_eq!(size, 2);
        assert!(w.is_subassignment_of(&eta));
    }

    #[test]
    fn xor_separation() {
        let f = cnf(2, &[&[1, 2], &[-1, -2]]);
        let pi = PartialAssignment::unassigned(2);
        let (p, h) = (set(&[1]), set(&[2]));
        let b = OracleBudget::default();
        assert_eq!(
            projected_implicant_check(&pi, &f, &p, &h, ProjectionSemantics::ForallExists, b),
            Ok(true)
        );
        assert_eq!(
            projected_implicant_check(&pi, &f, &p, &h, ProjectionSemantics::UniformWitness, b),
            Ok(false)
        );
        let total = PartialAssignment::from_literals(2, &[Literal::pos(1)]).unwrap();
        for mode in [ProjectionSemantics::ForallExists, ProjectionSemantics::UniformWitness] {
            assert_eq!(projected_implicant_check(&total, &f, &p, &h, mode, b), Ok(true));
        }
        assert_eq!(projected_minimum(&f, &p, b).unwrap().0, 1);
    }

    #[test]
    fn projected_check_errors() {
        let f = cnf(3, &[&[1, 2, 3]]);
        let pi = PartialAssignment::from_literals(3, &[Literal::pos(2)]).unwrap();
        let b = OracleBudget::default();
        assert_eq!(
            projected_implicant_check(
                &pi,
                &f,
                &set(&[1]),
                &set(&[2, 3]),
                ProjectionSemantics::UniformWitness,
                b
            ),
            Err(VerifyError::NotVisible(2))
        );
        assert_eq!(
            projected_implicant_check(
                &PartialAssignment::unassigned(3),
                &f,
                &set(&[1]),
                &set(&[2]),
                ProjectionSemantics::UniformWitness,
                b
            ),
            Err(VerifyError::Uncovered(3))
        );
        let big = CnfFormula {
            num_vars: 21,
            clauses: vec![],
        };
        let all: BTreeSet<u32> = (1..=21).collect();
        assert_eq!(
            projected_implicant_check(
                &PartialAssignment::unassigned(21),
                &big,
                &all,
                &BTreeSet::new(),
                ProjectionSemantics::ForallExists,
                b
            ),
            Err(VerifyError::TooLarge(21))
        );
    }

    #[test]
    fn verdicts_on_worked_example() {
        let f = cnf(3, &[&[1, -2, 3]]);
        let enc = encode::<f64>(&f, default_weights(3), EncodeMode::full()).unwrap();
        let b = OracleBudget::default();
        let case4 = enc.complete_aux(&[true, false, false, false, false, false]);
        assert_eq!(
            verdict_for_bits(&case4, &enc, b),
            Verdict {
                consistent: true,
                satisfying: true,
                minimal: Some(true),
                minimum: Some(true),
                energy_below_bound: true
            }
        );
        let case1 = enc.complete_aux(&[true, true, false, false, false, false]);
        let v = verdict_for_bits(&case1, &enc, b);
        assert!(!v.consistent && !v.energy_below_bound && !v.satisfying);
        assert_eq!(v.minimal, None);
        let case3 = enc.complete_aux(&[true, false, false, true, true, false]);
        let v = verdict_for_bits(&case3, &enc, b);
        assert!(v.satisfying && v.energy_below_bound);
        assert_eq!((v.minimal, v.minimum), (Some(false), Some(false)));
    }
}
