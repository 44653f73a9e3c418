//! Dual-polarity QUBO encoding of CNF formulas.
//!
//! Each variable `v` owns two polarity spins `(p_v, n_v)`:
//! `(1,0)` = true, `(0,1)` = false, `(0,0)` = unassigned, `(1,1)` = inconsistent.
//! The objective is
//!
//! ```text
//! E = sum_v M p_v n_v  +  sum_k E_clause(k)  +  gamma * sum_{v in scope} (p_v + n_v)
//! ```
//!
//! where a clause over polarity spins `s_1..s_k` is penalized through a chain
//! of auxiliary AND spins `c_1 = (1-s_1)(1-s_2)`, `c_j = c_{j-1} (1-s_{j+1})`,
//! each enforced by `lambda (xy - 2xz - 2yz + 3z)`, closed by
//! `lambda c_{k-2} (1 - s_k)`. Two-literal clauses use `lambda (1-a)(1-b)`
//! directly. Restricted variants (shrinking, refinement rounds) hard-fix
//! polarity spins in the same model.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{entails, CnfFormula, Literal, PartialAssignment, Value};
use crate::qubo::{QuboError, QuboModel, SpinRegistry};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights<T> {
    pub gamma: T,
    pub lambda: T,
    pub big_m: T,
}

/// `gamma = 1`, `lambda = big_m = n + 1`.
pub fn default_weights<T: Scalar>(n: usize) -> Weights<T> {
    let bound = <T as Scalar>::from_usize(n + 1);
    Weights {
        gamma: T::one(),
        lambda: bound,
        big_m: bound,
    }
}

impl<T: Scalar> Weights<T> {
    /// `lambda > b * gamma` and `big_m > b * gamma`, which make every state
    /// with energy at most `b * gamma` consistent and satisfying.
    pub fn regime_holds(&self, b: usize) -> bool {
        let limit = <T as Scalar>::from_usize(b) * self.gamma;
        self.gamma > T::zero() && self.lambda > limit && self.big_m > limit
    }

    pub fn scaled(&self, factor: T) -> Weights<T> {
        Weights {
            gamma: self.gamma * factor,
            lambda: self.lambda * factor,
            big_m: self.big_m * factor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Task {
    Full,
    /// Only literals of this total model may be kept.
    Shrink(PartialAssignment),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SparsityScope {
    Standard,
    /// Only these (visible) variables pay sparsity.
    Projected(BTreeSet<u32>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodeMode {
    pub task: Task,
    pub scope: SparsityScope,
}

impl EncodeMode {
    pub fn full() -> Self {
        EncodeMode {
            task: Task::Full,
            scope: SparsityScope::Standard,
        }
    }

    pub fn shrink(eta: PartialAssignment) -> Self {
        EncodeMode {
            task: Task::Shrink(eta),
            scope: SparsityScope::Standard,
        }
    }

    pub fn projected(visible: BTreeSet<u32>) -> Self {
        EncodeMode {
            task: Task::Full,
            scope: SparsityScope::Projected(visible),
        }
    }

    pub fn with_scope(mut self, scope: SparsityScope) -> Self {
        self.scope = scope;
        self
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncodeError {
    #[error("shrink model must assign every one of the {num_vars} variables")]
    ShrinkNotTotal { num_vars: usize },
    #[error("shrink model does not satisfy the formula")]
    ShrinkNotSatisfying,
    #[error("projected variable {0} is not a formula variable")]
    ProjectionOutOfRange(u32),
    #[error("variable {0} is not a formula variable")]
    UnknownVar(u32),
}

/// Spins touched by one clause's penalty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseGadget {
    /// Polarity spin for each literal, in clause order.
    pub literal_spins: Vec<usize>,
    /// Chain auxiliaries `c_1..c_{k-2}` (empty for k <= 2).
    pub aux: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Encoding<T> {
    pub model: QuboModel<T>,
    pub registry: SpinRegistry,
    pub weights: Weights<T>,
    pub mode: EncodeMode,
    /// `B * gamma` with `B = n` (standard) or `|P|` (projected).
    pub feasible_energy_bound: T,
    pub formula: CnfFormula,
    pub gadgets: Vec<ClauseGadget>,
    pub warnings: Vec<String>,
}

/// `constant + coef * x_spin` (or just `constant`).
#[derive(Debug, Clone, Copy)]
struct Affine<T> {
    constant: T,
    coef: T,
    spin: Option<usize>,
}

impl<T: Scalar> Affine<T> {
    fn spin(i: usize) -> Self {
        Affine {
            constant: T::zero(),
            coef: T::one(),
            spin: Some(i),
        }
    }

    /// `1 - x_i`
    fn complement(i: usize) -> Self {
        Affine {
            constant: T::one(),
            coef: -T::one(),
            spin: Some(i),
        }
    }
}

fn add_affine<T: Scalar>(m: &mut QuboModel<T>, w: T, a: Affine<T>) {
    m.add_offset(w * a.constant);
    if let Some(i) = a.spin {
        m.add_linear(i, w * a.coef);
    }
}

/// Adds `w * a * b`.
fn add_product<T: Scalar>(m: &mut QuboModel<T>, w: T, a: Affine<T>, b: Affine<T>) {
    m.add_offset(w * a.constant * b.constant);
    if let Some(j) = b.spin {
        m.add_linear(j, w * a.constant * b.coef);
    }
    if let Some(i) = a.spin {
        m.add_linear(i, w * a.coef * b.constant);
    }
    if let (Some(i), Some(j)) = (a.spin, b.spin) {
        m.add_quadratic(i, j, w * a.coef * b.coef);
    }
}

/// `lambda (xy - 2xz - 2yz + 3z)`: zero iff `z = xy`.
fn add_and_penalty<T: Scalar>(m: &mut QuboModel<T>, lambda: T, x: Affine<T>, y: Affine<T>, z: usize) {
    let two = T::two();
    let zs = Affine::spin(z);
    add_product(m, lambda, x, y);
    add_product(m, -two * lambda, x, zs);
    add_product(m, -two * lambda, y, zs);
    m.add_linear(z, (two + T::one()) * lambda);
}

/// The AND penalty as placed in a clause gadget: `c` tracks
/// `(1 - a)(1 - b)` for literal spins `a = 0`, `b = 1` and auxiliary `c = 2`.
pub fn and_gadget<T: Scalar>(lambda: T) -> QuboModel<T> {
    let mut m = QuboModel::new(3);
    add_and_penalty(&mut m, lambda, Affine::complement(0), Affine::complement(1), 2);
    m
}

/// The closing term `lambda * c * (1 - d)` over spins `c = 0`, `d = 1`.
pub fn sat_gadget<T: Scalar>(lambda: T) -> QuboModel<T> {
    let mut m = QuboModel::new(2);
    add_product(&mut m, lambda, Affine::spin(0), Affine::complement(1));
    m
}

impl<T: Scalar> Encoding<T> {
    pub fn num_vars(&self) -> usize {
        self.formula.num_vars
    }

    /// Variables that pay sparsity, in id order.
    pub fn scope_vars(&self) -> Vec<u32> {
        match &self.mode.scope {
            SparsityScope::Standard => (1..=self.num_vars() as u32).collect(),
            SparsityScope::Projected(p) => p.iter().copied().collect(),
        }
    }

    pub fn is_projected(&self) -> bool {
        matches!(self.mode.scope, SparsityScope::Projected(_))
    }

    /// Size of an assignment as measured by this encoding's sparsity scope.
    pub fn scoped_size(&self, mu: &PartialAssignment) -> usize {
        match &self.mode.scope {
            SparsityScope::Standard => mu.size(),
            SparsityScope::Projected(p) => p.iter().filter(|&&v| mu.get(v) != Value::Unassigned).count(),
        }
    }

    /// Sets every auxiliary to the value of the AND it tracks. For each
    /// clause this attains the minimum over its auxiliaries: `0` when some
    /// literal spin is 1, `lambda` otherwise.
    pub fn complete_aux(&self, polarity_bits: &[bool]) -> Vec<bool> {
        let mut x = vec![false; self.model.dim()];
        x[..polarity_bits.len()].copy_from_slice(polarity_bits);
        for g in &self.gadgets {
            if g.aux.is_empty() {
                continue;
            }
            let s = &g.literal_spins;
            let mut c = !x[s[0]] && !x[s[1]];
            x[g.aux[0]] = c;
            for (j, &aux) in g.aux.iter().enumerate().skip(1) {
                c = c && !x[s[j + 1]];
                x[aux] = c;
            }
        }
        x
    }

    /// Exact minimum energy over all auxiliary completions of the given
    /// polarity spins (length `2n`).
    pub fn min_over_aux(&self, polarity_bits: &[bool]) -> Result<T, QuboError> {
        let expected = self.registry.polarity_len();
        if polarity_bits.len() != expected {
            return Err(QuboError::LengthMismatch {
                expected,
                got: polarity_bits.len(),
            });
        }
        self.model.energy(&self.complete_aux(polarity_bits))
    }

    /// Polarity spins encoding `mu` (`(1,0)` true, `(0,1)` false, `(0,0)` unassigned).
    pub fn polarity_bits(&self, mu: &PartialAssignment) -> Vec<bool> {
        let mut bits = vec![false; self.registry.polarity_len()];
        for lit in mu.literals() {
            if (lit.var as usize) > self.num_vars() {
                continue;
            }
            let idx = if lit.positive {
                self.registry.pos(lit.var)
            } else {
                self.registry.neg(lit.var)
            };
            bits[idx] = true;
        }
        bits
    }

    fn check_var(&self, v: u32) -> Result<(), EncodeError> {
        if v == 0 || v as usize > self.num_vars() {
            Err(EncodeError::UnknownVar(v))
        } else {
            Ok(())
        }
    }

    /// Freezes the named variables as don't-cares: both polarity spins are
    /// hard-fixed to 0.
    pub fn restrict_for_refinement(&self, keep_unassigned: &BTreeSet<u32>) -> Result<Encoding<T>, EncodeError> {
        let mut out = self.clone();
        for &v in keep_unassigned {
            self.check_var(v)?;
            out.model.fix(self.registry.pos(v), false);
            out.model.fix(self.registry.neg(v), false);
        }
        Ok(out)
    }

    /// Restricts the search to sub-assignments of `mu` on `vars`:
    /// unassigned variables are frozen to `(0,0)` and the polarity opposite
    /// to each assigned literal is fixed to 0.
    pub fn restrict_to_subassignments(
        &self,
        mu: &PartialAssignment,
        vars: &BTreeSet<u32>,
    ) -> Result<Encoding<T>, EncodeError> {
        let frozen: BTreeSet<u32> = vars
            .iter()
            .copied()
            .filter(|&v| mu.get(v) == Value::Unassigned)
            .collect();
        let mut out = self.restrict_for_refinement(&frozen)?;
        for &v in vars {
            match mu.get(v) {
                Value::True => out.model.fix(self.registry.neg(v), false),
                Value::False => out.model.fix(self.registry.pos(v), false),
                Value::Unassigned => {}
            }
        }
        Ok(out)
    }
}

/// Builds the QUBO for `f` under `weights` and `mode`.
///
/// The formula is expected to be preprocessed; unit, empty, tautological or
/// duplicate-literal clauses are still encoded but produce warnings.
pub fn encode<T: Scalar>(f: &CnfFormula, weights: Weights<T>, mode: EncodeMode) -> Result<Encoding<T>, EncodeError> {
    let n = f.num_vars;
    let mut warnings = Vec::new();

    if let SparsityScope::Projected(p) = &mode.scope {
        if let Some(&bad) = p.iter().find(|&&v| v == 0 || v as usize > n) {
            return Err(EncodeError::ProjectionOutOfRange(bad));
        }
    }
    if let Task::Shrink(eta) = &mode.task {
        if eta.num_vars() != n || !eta.is_total() {
            return Err(EncodeError::ShrinkNotTotal { num_vars: n });
        }
        if !entails(eta, f) {
            return Err(EncodeError::ShrinkNotSatisfying);
        }
    }

    let mut registry = SpinRegistry::for_vars(n);
    let mut gadgets = Vec::with_capacity(f.clauses.len());
    for (k, clause) in f.clauses.iter().enumerate() {
        let literal_spins = clause
            .iter()
            .map(|l| {
                if l.positive {
                    registry.pos(l.var)
                } else {
                    registry.neg(l.var)
                }
            })
            .collect();
        let aux = (1..=clause.len().saturating_sub(2))
            .map(|stage| registry.add_aux(k, stage))
            .collect();
        gadgets.push(ClauseGadget { literal_spins, aux });
    }

    let mut model = QuboModel::new(registry.len());
    for v in 1..=n as u32 {
        model.add_quadratic(registry.pos(v), registry.neg(v), weights.big_m);
    }

    let lambda = weights.lambda;
    for (k, (clause, g)) in f.clauses.iter().zip(&gadgets).enumerate() {
        note_clause_issues(k, clause, &mut warnings);
        let s = &g.literal_spins;
        match s.len() {
            0 => model.add_offset(lambda),
            1 => add_affine(&mut model, lambda, Affine::complement(s[0])),
            2 => add_product(&mut model, lambda, Affine::complement(s[0]), Affine::complement(s[1])),
            len => {
                add_and_penalty(
                    &mut model,
                    lambda,
                    Affine::complement(s[0]),
                    Affine::complement(s[1]),
                    g.aux[0],
                );
                for j in 1..g.aux.len() {
                    add_and_penalty(
                        &mut model,
                        lambda,
                        Affine::spin(g.aux[j - 1]),
                        Affine::complement(s[j + 1]),
                        g.aux[j],
                    );
                }
                add_product(
                    &mut model,
                    lambda,
                    Affine::spin(g.aux[len - 3]),
                    Affine::complement(s[len - 1]),
                );
            }
        }
    }

    let scope: Vec<u32> = match &mode.scope {
        SparsityScope::Standard => (1..=n as u32).collect(),
        SparsityScope::Projected(p) => p.iter().copied().collect(),
    };
    for &v in &scope {
        model.add_linear(registry.pos(v), weights.gamma);
        model.add_linear(registry.neg(v), weights.gamma);
    }

    if let Task::Shrink(eta) = &mode.task {
        for &v in &scope {
            match eta.get(v) {
                Value::True => model.fix(registry.neg(v), false),
                Value::False => model.fix(registry.pos(v), false),
                Value::Unassigned => unreachable!("checked total"),
            }
        }
    }

    if !weights.regime_holds(scope.len()) {
        warnings.push(format!(
            "weights violate lambda > B*gamma and M > B*gamma for B = {}; low-energy states are not guaranteed to be consistent and satisfying",
            scope.len()
        ));
    }

    Ok(Encoding {
        feasible_energy_bound: <T as Scalar>::from_usize(scope.len()) * weights.gamma,
        model,
        registry,
        weights,
        mode,
        formula: f.clone(),
        gadgets,
        warnings,
    })
}

fn note_clause_issues(k: usize, clause: &[Literal], warnings: &mut Vec<String>) {
    if clause.is_empty() {
        warnings.push(format!("clause {k} is empty; the formula is unsatisfiable"));
        return;
    }
    if clause.len() == 1 {
        warnings.push(format!("clause {k} is a unit clause; run preprocessing first"));
    }
    let set: BTreeSet<Literal> = clause.iter().copied().collect();
    if set.len() != clause.len() {
        warnings.push(format!("clause {k} repeats a literal"));
    }
    if set.iter().any(|l| set.contains(&l.negated())) {
        warnings.push(format!("clause {k} is a tautology"));
    }
}
