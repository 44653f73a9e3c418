//! Non-CNF Boolean expressions and their CNF conversions.
//!
//! Both conversions number auxiliary gate variables after the original ones
//! (`max_var + 1, max_var + 2, ...`), allocating a gate's variable before its
//! children's, so the visible/hidden split is an id threshold.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{CnfFormula, Literal, PartialAssignment, Value};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BoolExpr {
    Var(u32),
    Not(Box<BoolExpr>),
    And(Vec<BoolExpr>),
    Or(Vec<BoolExpr>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExprError {
    #[error("variable id 0 is not allowed")]
    ZeroVar,
    #[error("gate with {0} children, at least 2 required")]
    TooFewChildren(usize),
}

impl BoolExpr {
    pub fn var(id: u32) -> Self {
        BoolExpr::Var(id)
    }

    pub fn lit(lit: Literal) -> Self {
        if lit.positive {
            BoolExpr::Var(lit.var)
        } else {
            BoolExpr::Var(lit.var).negate()
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn negate(self) -> Self {
        BoolExpr::Not(Box::new(self))
    }

    pub fn validate(&self) -> Result<(), ExprError> {
        match self {
            BoolExpr::Var(0) => Err(ExprError::ZeroVar),
            BoolExpr::Var(_) => Ok(()),
            BoolExpr::Not(c) => c.validate(),
            BoolExpr::And(cs) | BoolExpr::Or(cs) => {
                if cs.len() < 2 {
                    return Err(ExprError::TooFewChildren(cs.len()));
                }
                cs.iter().try_for_each(BoolExpr::validate)
            }
        }
    }

    pub fn max_var(&self) -> u32 {
        match self {
            BoolExpr::Var(v) => *v,
            BoolExpr::Not(c) => c.max_var(),
            BoolExpr::And(cs) | BoolExpr::Or(cs) => cs.iter().map(BoolExpr::max_var).max().unwrap_or(0),
        }
    }

    pub fn vars(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<u32>) {
        match self {
            BoolExpr::Var(v) => {
                out.insert(*v);
            }
            BoolExpr::Not(c) => c.collect_vars(out),
            BoolExpr::And(cs) | BoolExpr::Or(cs) => cs.iter().for_each(|c| c.collect_vars(out)),
        }
    }

    /// Literal view of `x` or `not x`.
    pub fn as_literal(&self) -> Option<Literal> {
        match self {
            BoolExpr::Var(v) => Some(Literal::pos(*v)),
            BoolExpr::Not(c) => match c.as_ref() {
                BoolExpr::Var(v) => Some(Literal::neg(*v)),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn is_nnf(&self) -> bool {
        match self {
            BoolExpr::Var(_) => true,
            BoolExpr::Not(c) => matches!(c.as_ref(), BoolExpr::Var(_)),
            BoolExpr::And(cs) | BoolExpr::Or(cs) => cs.iter().all(BoolExpr::is_nnf),
        }
    }

    /// Number of And/Or nodes.
    pub fn gate_count(&self) -> usize {
        match self {
            BoolExpr::Var(_) => 0,
            BoolExpr::Not(c) => c.gate_count(),
            BoolExpr::And(cs) | BoolExpr::Or(cs) => 1 + cs.iter().map(BoolExpr::gate_count).sum::<usize>(),
        }
    }

    /// Evaluates under a total assignment indexed by `var - 1`.
    pub fn eval(&self, values: &[bool]) -> bool {
        match self {
            BoolExpr::Var(v) => values[*v as usize - 1],
            BoolExpr::Not(c) => !c.eval(values),
            BoolExpr::And(cs) => cs.iter().all(|c| c.eval(values)),
            BoolExpr::Or(cs) => cs.iter().any(|c| c.eval(values)),
        }
    }

    /// Kleene three-valued evaluation; `None` is undetermined.
    pub fn eval_partial(&self, mu: &PartialAssignment) -> Option<bool> {
        match self {
            BoolExpr::Var(v) => match mu.get(*v) {
                Value::True => Some(true),
                Value::False => Some(false),
                Value::Unassigned => None,
            },
            BoolExpr::Not(c) => c.eval_partial(mu).map(|b| !b),
            BoolExpr::And(cs) => {
                let mut unknown = false;
                for c in cs {
                    match c.eval_partial(mu) {
                        Some(false) => return Some(false),
                        None => unknown = true,
                        Some(true) => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(true)
                }
            }
            BoolExpr::Or(cs) => {
                let mut unknown = false;
                for c in cs {
                    match c.eval_partial(mu) {
                        Some(true) => return Some(true),
                        None => unknown = true,
                        Some(false) => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(false)
                }
            }
        }
    }

    /// `true` if every total extension of `mu` over `1..=num_vars` satisfies
    /// the expression (semantic entailment, by enumeration).
    pub fn entailed_by(&self, mu: &PartialAssignment, num_vars: usize) -> bool {
        let free: Vec<u32> = (1..=num_vars as u32)
            .filter(|&v| mu.get(v) == Value::Unassigned)
            .collect();
        let mut values: Vec<bool> = (1..=num_vars as u32).map(|v| mu.get(v) == Value::True).collect();
        (0u64..1 << free.len()).all(|mask| {
            for (bit, &v) in free.iter().enumerate() {
                values[v as usize - 1] = mask >> bit & 1 == 1;
            }
            self.eval(&values)
        })
    }
}

impl fmt::Display for BoolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoolExpr::Var(v) => write!(f, "x{v}"),
            BoolExpr::Not(c) => write!(f, "(not {c})"),
            BoolExpr::And(cs) | BoolExpr::Or(cs) => {
                let op = if matches!(self, BoolExpr::And(_)) { "and" } else { "or" };
                write!(f, "({op}")?;
                for c in cs {
                    write!(f, " {c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseExprError {
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unexpected token `{0}`")]
    UnexpectedToken(String),
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("trailing input after expression")]
    TrailingInput,
    #[error(transparent)]
    Invalid(#[from] ExprError),
}

impl FromStr for BoolExpr {
    type Err = ParseExprError;

    /// Parses the prefix form printed by `Display`, e.g.
    /// `(or (and x1 x2) (not x3))`. Lines starting with `;` are comments.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let cleaned: String = s
            .lines()
            .filter(|l| !l.trim_start().starts_with(';'))
            .collect::<Vec<_>>()
            .join("\n");
        let spaced = cleaned.replace('(', " ( ").replace(')', " ) ");
        let tokens: Vec<&str> = spaced.split_whitespace().collect();
        let mut pos = 0;
        let expr = parse_tokens(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(ParseExprError::TrailingInput);
        }
        expr.validate()?;
        Ok(expr)
    }
}

fn parse_tokens(tokens: &[&str], pos: &mut usize) -> Result<BoolExpr, ParseExprError> {
    let tok = *tokens.get(*pos).ok_or(ParseExprError::UnexpectedEnd)?;
    *pos += 1;
    if tok == "(" {
        let op = *tokens.get(*pos).ok_or(ParseExprError::UnexpectedEnd)?;
        *pos += 1;
        let mut children = Vec::new();
        loop {
            match tokens.get(*pos) {
                None => return Err(ParseExprError::UnexpectedEnd),
                Some(&")") => {
                    *pos += 1;
                    break;
                }
                Some(_) => children.push(parse_tokens(tokens, pos)?),
            }
        }
        return match op {
            "not" if children.len() == 1 => Ok(children.pop().unwrap().negate()),
            "not" => Err(ParseExprError::UnexpectedToken(format!("not/{}", children.len()))),
            "and" => Ok(BoolExpr::And(children)),
            "or" => Ok(BoolExpr::Or(children)),
            other => Err(ParseExprError::UnknownOperator(other.to_string())),
        };
    }
    match tok.strip_prefix('x').and_then(|d| d.parse::<u32>().ok()) {
        Some(v) => Ok(BoolExpr::Var(v)),
        None => Err(ParseExprError::UnexpectedToken(tok.to_string())),
    }
}

/// Pushes negations down to the variables.
pub fn to_nnf(e: &BoolExpr) -> BoolExpr {
    nnf(e, false)
}

fn nnf(e: &BoolExpr, negated: bool) -> BoolExpr {
    match e {
        BoolExpr::Var(v) => {
            if negated {
                BoolExpr::Var(*v).negate()
            } else {
                BoolExpr::Var(*v)
            }
        }
        BoolExpr::Not(c) => nnf(c, !negated),
        BoolExpr::And(cs) => {
            let kids = cs.iter().map(|c| nnf(c, negated)).collect();
            if negated {
                BoolExpr::Or(kids)
            } else {
                BoolExpr::And(kids)
            }
        }
        BoolExpr::Or(cs) => {
            let kids = cs.iter().map(|c| nnf(c, negated)).collect();
            if negated {
                BoolExpr::And(kids)
            } else {
                BoolExpr::Or(kids)
            }
        }
    }
}

/// A CNF produced from an expression, with its visible (original) and hidden
/// (gate) variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfConversion {
    pub cnf: CnfFormula,
    pub visible: BTreeSet<u32>,
    pub hidden: BTreeSet<u32>,
    /// Gate variable -> the subformula it names.
    pub definitions: BTreeMap<u32, BoolExpr>,
}

impl CnfConversion {
    pub fn hidden_fraction(&self) -> f64 {
        let total = self.visible.len() + self.hidden.len();
        if total == 0 {
            0.0
        } else {
            self.hidden.len() as f64 / total as f64
        }
    }
}

struct GateBuilder {
    next: u32,
    clauses: Vec<Vec<Literal>>,
    definitions: BTreeMap<u32, BoolExpr>,
    bidirectional: bool,
}

impl GateBuilder {
    fn new(num_visible: u32, bidirectional: bool) -> Self {
        GateBuilder {
            next: num_visible + 1,
            clauses: Vec::new(),
            definitions: BTreeMap::new(),
            bidirectional,
        }
    }

    fn literal_for(&mut self, e: &BoolExpr) -> Literal {
        if let Some(lit) = e.as_literal() {
            return lit;
        }
        match e {
            // Only reachable in the bidirectional (Tseitin) case.
            BoolExpr::Not(c) => self.literal_for(c).negated(),
            BoolExpr::And(cs) | BoolExpr::Or(cs) => {
                let t = self.next;
                self.next += 1;
                self.definitions.insert(t, e.clone());
                let gate = Literal::pos(t);
                let kids: Vec<Literal> = cs.iter().map(|c| self.literal_for(c)).collect();
                if matches!(e, BoolExpr::And(_)) {
                    for &k in &kids {
                        self.clauses.push(vec![gate.negated(), k]);
                    }
                    if self.bidirectional {
                        let mut back = vec![gate];
                        back.extend(kids.iter().map(|k| k.negated()));
                        self.clauses.push(back);
                    }
                } else {
                    let mut fwd = vec![gate.negated()];
                    fwd.extend(kids.iter().copied());
                    self.clauses.push(fwd);
                    if self.bidirectional {
                        for &k in &kids {
                            self.clauses.push(vec![gate, k.negated()]);
                        }
                    }
                }
                gate
            }
            BoolExpr::Var(_) => unreachable!("literals handled above"),
        }
    }

    fn finish(mut self, root: &BoolExpr, num_visible: u32) -> CnfConversion {
        let top = self.literal_for(root);
        self.clauses.push(vec![top]);
        let num_vars = (self.next - 1) as usize;
        CnfConversion {
            cnf: CnfFormula {
                num_vars,
                clauses: self.clauses,
            },
            visible: (1..=num_visible).collect(),
            hidden: (num_visible + 1..self.next).collect(),
            definitions: self.definitions,
        }
    }
}

/// Polarity-aware conversion: each gate variable only implies its
/// definition (`t -> def`). The input is converted to NNF first if needed.
pub fn plaisted_greenbaum(e: &BoolExpr) -> CnfConversion {
    let owned;
    let e = if e.is_nnf() {
        e
    } else {
        owned = to_nnf(e);
        &owned
    };
    let n = e.max_var();
    GateBuilder::new(n, false).finish(e, n)
}

/// Full equivalence-preserving gate definitions (`t <-> def`).
pub fn tseitin(e: &BoolExpr) -> CnfConversion {
    let n = e.max_var();
    GateBuilder::new(n, true).finish(e, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateOp {
    And,
    Or,
}

/// Shape parameters for [`random_nested_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NestedConfig {
    pub root_op: GateOp,
    pub negation_prob: f64,
}

impl Default for NestedConfig {
    fn default() -> Self {
        NestedConfig {
            root_op: GateOp::Or,
            negation_prob: 0.5,
        }
    }
}

/// Random expression with `depth` alternating gate levels of arity `fanin`
/// over literal leaves. Already in NNF.
pub fn random_nested(n_vars: u32, depth: u32, fanin: usize, seed: u64) -> BoolExpr {
    random_nested_with(n_vars, depth, fanin, seed, NestedConfig::default())
}

pub fn random_nested_with(n_vars: u32, depth: u32, fanin: usize, seed: u64, cfg: NestedConfig) -> BoolExpr {
    assert!(n_vars >= 1 && depth >= 1 && fanin >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    build_level(&mut rng, n_vars, depth, fanin, cfg.root_op, cfg.negation_prob)
}

fn build_level(rng: &mut ChaCha8Rng, n_vars: u32, depth: u32, fanin: usize, op: GateOp, neg_p: f64) -> BoolExpr {
    let children: Vec<BoolExpr> = (0..fanin)
        .map(|_| {
            if depth == 1 {
                let var = rng.gen_range(1..=n_vars);
                BoolExpr::lit(Literal::new(var, !rng.gen_bool(neg_p)))
            } else {
                let next = match op {
                    GateOp::And => GateOp::Or,
                    GateOp::Or => GateOp::And,
                };
                build_level(rng, n_vars, depth - 1, fanin, next, neg_p)
            }
        })
        .collect();
    match op {
        GateOp::And => BoolExpr::And(children),
        GateOp::Or => BoolExpr::Or(children),
    }
}

/// Satisfiability over `1..=num_vars` by backtracking with three-valued
/// pruning. Returns a model if one exists.
pub fn find_model(e: &BoolExpr, num_vars: usize) -> Option<Vec<bool>> {
    let mut mu = PartialAssignment::unassigned(num_vars);
    if search_model(e, &mut mu, 1, num_vars as u32) {
        Some((1..=num_vars as u32).map(|v| mu.get(v) == Value::True).collect())
    } else {
        None
    }
}

fn search_model(e: &BoolExpr, mu: &mut PartialAssignment, next: u32, n: u32) -> bool {
    match e.eval_partial(mu) {
        Some(true) => {
            for v in next..=n {
                mu.set(v, Value::False);
            }
            true
        }
        Some(false) => false,
        None if next > n => false,
        None => {
            for value in [Value::False, Value::True] {
                mu.set(next, value);
                if search_model(e, mu, next + 1, n) {
                    return true;
                }
            }
            mu.unassign(next);
            false
        }
    }
}

/// Like [`random_nested_with`] but skips unsatisfiable draws by moving to
/// the next seed. Returns the expression and the seed that produced it.
pub fn random_satisfiable_nested(
    n_vars: u32,
    depth: u32,
    fanin: usize,
    seed: u64,
    cfg: NestedConfig,
) -> (BoolExpr, u64) {
    let mut s = seed;
    loop {
        let e = random_nested_with(n_vars, depth, fanin, s, cfg);
        if find_model(&e, n_vars as usize).is_some() {
            return (e, s);
        }
        s = s.wrapping_add(1);
    }
}
