//! CNF formulas, DIMACS I/O, preprocessing and three-valued assignments.
//!
//! Variables are identified by their DIMACS ids (`1..=num_vars`). A clause is
//! covered by a partial assignment when one of its literals is assigned true;
//! for tautology-free CNF that syntactic check coincides with semantic
//! entailment, which is what every implicant test in the crate relies on.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub var: u32,
    pub positive: bool,
}

impl Literal {
    pub fn new(var: u32, positive: bool) -> Self {
        assert!(var >= 1, "variable ids start at 1");
        Literal { var, positive }
    }

    pub fn pos(var: u32) -> Self {
        Literal::new(var, true)
    }

    pub fn neg(var: u32) -> Self {
        Literal::new(var, false)
    }

    /// Builds a literal from a signed DIMACS integer. Returns `None` for 0.
    pub fn from_dimacs(lit: i64) -> Option<Self> {
        if lit == 0 || lit.unsigned_abs() > u64::from(u32::MAX) {
            return None;
        }
        Some(Literal::new(lit.unsigned_abs() as u32, lit > 0))
    }

    pub fn to_dimacs(self) -> i64 {
        if self.positive {
            i64::from(self.var)
        } else {
            -i64::from(self.var)
        }
    }

    pub fn negated(self) -> Self {
        Literal {
            var: self.var,
            positive: !self.positive,
        }
    }

    /// The truth value this literal requires of its variable.
    pub fn value(self) -> Value {
        if self.positive {
            Value::True
        } else {
            Value::False
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

pub type Clause = Vec<Literal>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Clause>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("literal {lit} exceeds the declared variable count {num_vars}")]
    VarOutOfRange { lit: i64, num_vars: usize },
    #[error("clause {index} is empty")]
    EmptyClause { index: usize },
}

impl CnfFormula {
    /// Builds a formula from signed DIMACS literals, validating ids.
    pub fn from_dimacs_clauses(num_vars: usize, clauses: &[Vec<i64>]) -> Result<Self, FormulaError> {
        let mut out = Vec::with_capacity(clauses.len());
        for (index, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(FormulaError::EmptyClause { index });
            }
            let mut lits = Vec::with_capacity(clause.len());
            for &lit in clause {
                match Literal::from_dimacs(lit) {
                    Some(l) if (l.var as usize) <= num_vars => lits.push(l),
                    _ => return Err(FormulaError::VarOutOfRange { lit, num_vars }),
                }
            }
            out.push(lits);
        }
        Ok(CnfFormula { num_vars, clauses: out })
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// Variables that occur in at least one clause.
    pub fn occurring_vars(&self) -> BTreeSet<u32> {
        self.clauses.iter().flatten().map(|l| l.var).collect()
    }

    /// Evaluates the formula under a total assignment (`values[v - 1]`).
    pub fn eval_total(&self, values: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| values[l.var as usize - 1] == l.positive))
    }

    /// Serializes to DIMACS CNF text.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            for lit in clause {
                out.push_str(&lit.to_dimacs().to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("missing `p cnf` header")]
    MissingHeader,
    #[error("line {line}: malformed header")]
    BadHeader { line: usize },
    #[error("line {line}: clause data before the `p cnf` header")]
    DataBeforeHeader { line: usize },
    #[error("line {line}: invalid token `{token}`")]
    BadToken { line: usize, token: String },
    #[error("line {line}: variable {var} exceeds header count {num_vars}")]
    VarOutOfRange { line: usize, var: u64, num_vars: usize },
    #[error("line {line}: empty clause, formula is trivially unsatisfiable")]
    EmptyClause { line: usize },
    #[error("header declares {declared} clauses but {found} were read")]
    ClauseCountMismatch { declared: usize, found: usize },
}

impl DimacsError {
    /// An empty clause is a well-formed file whose formula is UNSAT.
    pub fn is_trivially_unsat(&self) -> bool {
        matches!(self, DimacsError::EmptyClause { .. })
    }
}

/// Parses DIMACS CNF text. `c` comment lines are accepted anywhere and a
/// `%` line ends the input (SATLIB convention). A trailing clause without
/// its terminating 0 is accepted.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, DimacsError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Clause> = Vec::new();
    let mut current: Clause = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(DimacsError::BadHeader { line: line_no });
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(DimacsError::BadHeader { line: line_no });
            }
            let n = parts[2]
                .parse::<usize>()
                .map_err(|_| DimacsError::BadHeader { line: line_no })?;
            let m = parts[3]
                .parse::<usize>()
                .map_err(|_| DimacsError::BadHeader { line: line_no })?;
            header = Some((n, m));
            continue;
        }
        let (num_vars, _) = header.ok_or(DimacsError::DataBeforeHeader { line: line_no })?;
        for token in line.split_whitespace() {
            let lit: i64 = token.parse().map_err(|_| DimacsError::BadToken {
                line: line_no,
                token: token.to_string(),
            })?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(DimacsError::EmptyClause { line: line_no });
                }
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            let var = lit.unsigned_abs();
            if var > num_vars as u64 {
                return Err(DimacsError::VarOutOfRange {
                    line: line_no,
                    var,
                    num_vars,
                });
            }
            current.push(Literal::new(var as u32, lit > 0));
        }
    }
    let (num_vars, declared) = header.ok_or(DimacsError::MissingHeader)?;
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != declared {
        return Err(DimacsError::ClauseCountMismatch {
            declared,
            found: clauses.len(),
        });
    }
    Ok(CnfFormula { num_vars, clauses })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Value {
    True,
    False,
    Unassigned,
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        if b {
            Value::True
        } else {
            Value::False
        }
    }
}

/// A three-valued map over variables `1..=num_vars`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialAssignment {
    values: Vec<Value>,
}

impl PartialAssignment {
    pub fn unassigned(num_vars: usize) -> Self {
        PartialAssignment {
            values: vec![Value::Unassigned; num_vars],
        }
    }

    /// Total assignment from booleans indexed by `var - 1`.
    pub fn from_total(values: &[bool]) -> Self {
        PartialAssignment {
            values: values
                .iter()
                .map(|&b| if b { Value::True } else { Value::False })
                .collect(),
        }
    }

    /// Builds an assignment from literals. Returns `None` if two literals
    /// clash or a variable is out of range.
    pub fn from_literals(num_vars: usize, lits: &[Literal]) -> Option<Self> {
        let mut mu = PartialAssignment::unassigned(num_vars);
        for &lit in lits {
            let idx = lit.var as usize;
            if idx == 0 || idx > num_vars {
                return None;
            }
            match mu.values[idx - 1] {
                Value::Unassigned => mu.values[idx - 1] = lit.value(),
                v if v == lit.value() => {}
                _ => return None,
            }
        }
        Some(mu)
    }

    pub fn num_vars(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, var: u32) -> Value {
        self.values
            .get((var as usize).wrapping_sub(1))
            .copied()
            .unwrap_or(Value::Unassigned)
    }

    pub fn set(&mut self, var: u32, value: Value) {
        let idx = var as usize;
        assert!(idx >= 1 && idx <= self.values.len(), "variable {var} out of range");
        self.values[idx - 1] = value;
    }

    pub fn unassign(&mut self, var: u32) {
        self.set(var, Value::Unassigned);
    }

    /// Number of assigned variables.
    pub fn size(&self) -> usize {
        self.values.iter().filter(|v| **v != Value::Unassigned).count()
    }

    pub fn is_total(&self) -> bool {
        self.values.iter().all(|v| *v != Value::Unassigned)
    }

    pub fn is_true(&self, lit: Literal) -> bool {
        self.get(lit.var) == lit.value()
    }

    pub fn literals(&self) -> Vec<Literal> {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| match v {
                Value::True => Some(Literal::pos(i as u32 + 1)),
                Value::False => Some(Literal::neg(i as u32 + 1)),
                Value::Unassigned => None,
            })
            .collect()
    }

    pub fn assigned_vars(&self) -> BTreeSet<u32> {
        self.literals().into_iter().map(|l| l.var).collect()
    }

    /// Keeps only the variables in `vars`.
    pub fn restrict(&self, vars: &BTreeSet<u32>) -> PartialAssignment {
        let mut out = self.clone();
        for (i, v) in out.values.iter_mut().enumerate() {
            if !vars.contains(&(i as u32 + 1)) {
                *v = Value::Unassigned;
            }
        }
        out
    }

    /// `true` if every literal of `self` also appears in `other`.
    pub fn is_subassignment_of(&self, other: &PartialAssignment) -> bool {
        self.literals().into_iter().all(|l| other.is_true(l))
    }

    /// Grows the variable range to `num_vars`, leaving new entries unassigned.
    pub fn resized(&self, num_vars: usize) -> PartialAssignment {
        let mut values = self.values.clone();
        values.resize(num_vars, Value::Unassigned);
        PartialAssignment { values }
    }
}

impl fmt::Display for PartialAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lits: Vec<String> = self.literals().iter().map(|l| l.to_string()).collect();
        write!(f, "{{{}}}", lits.join(" "))
    }
}

/// JSON form: `{"num_vars": n, "literals": [1, -2, ...]}`.
#[derive(Serialize, Deserialize)]
struct AssignmentRepr {
    num_vars: usize,
    literals: Vec<i64>,
}

impl Serialize for PartialAssignment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        AssignmentRepr {
            num_vars: self.num_vars(),
            literals: self.literals().iter().map(|l| l.to_dimacs()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PartialAssignment {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = AssignmentRepr::deserialize(d)?;
        let lits: Option<Vec<Literal>> = repr.literals.iter().map(|&l| Literal::from_dimacs(l)).collect();
        lits.and_then(|lits| PartialAssignment::from_literals(repr.num_vars, &lits))
            .ok_or_else(|| serde::de::Error::custom("inconsistent or out-of-range literals"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PreprocessStatus {
    Reduced,
    UnsatDetected,
    TriviallySat,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessResult {
    /// Reduced formula over the original id space.
    pub formula: CnfFormula,
    /// Literals fixed by unit propagation, in derivation order.
    pub forced: Vec<Literal>,
    pub eliminated: BTreeSet<u32>,
    pub status: PreprocessStatus,
}

impl PreprocessResult {
    /// Re-attaches the forced literals to an assignment over the reduced
    /// formula. Returns `None` if `mu` contradicts a forced literal.
    pub fn reattach(&self, mu: &PartialAssignment) -> Option<PartialAssignment> {
        let mut lits = mu.literals();
        lits.extend(self.forced.iter().copied());
        PartialAssignment::from_literals(self.formula.num_vars.max(mu.num_vars()), &lits)
    }
}

/// Removes duplicate literals and tautologies, then propagates unit
/// clauses to a fixpoint.
pub fn preprocess(f: &CnfFormula) -> PreprocessResult {
    let mut clauses: Vec<Clause> = Vec::with_capacity(f.clauses.len());
    for clause in &f.clauses {
        let mut seen = BTreeSet::new();
        let mut lits = Vec::with_capacity(clause.len());
        let mut tautology = false;
        for &lit in clause {
            if seen.contains(&lit.negated()) {
                tautology = true;
                break;
            }
            if seen.insert(lit) {
                lits.push(lit);
            }
        }
        if !tautology {
            clauses.push(lits);
        }
    }

    let mut assigned: BTreeMap<u32, bool> = BTreeMap::new();
    let mut forced = Vec::new();
    let mut conflict = clauses.iter().any(|c| c.is_empty());
    let mut changed = true;
    while changed && !conflict {
        changed = false;
        for clause in &clauses {
            let mut open = None;
            let mut open_count = 0;
            let mut satisfied = false;
            for &lit in clause {
                match assigned.get(&lit.var) {
                    Some(&v) if v == lit.positive => {
                        satisfied = true;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        open_count += 1;
                        open = Some(lit);
                    }
                }
            }
            if satisfied {
                continue;
            }
            match (open_count, open) {
                (0, _) => {
                    conflict = true;
                    break;
                }
                (1, Some(lit)) => {
                    assigned.insert(lit.var, lit.positive);
                    forced.push(lit);
                    changed = true;
                }
                _ => {}
            }
        }
    }

    let reduced: Vec<Clause> = clauses
        .into_iter()
        .filter(|c| !c.iter().any(|l| assigned.get(&l.var) == Some(&l.positive)))
        .map(|c| {
            c.into_iter()
                .filter(|l| !assigned.contains_key(&l.var))
                .collect::<Clause>()
        })
        .collect();

    let status = if conflict {
        PreprocessStatus::UnsatDetected
    } else if reduced.is_empty() {
        PreprocessStatus::TriviallySat
    } else {
        PreprocessStatus::Reduced
    };
    PreprocessResult {
        formula: CnfFormula {
            num_vars: f.num_vars,
            clauses: reduced,
        },
        eliminated: forced.iter().map(|l| l.var).collect(),
        forced,
        status,
    }
}

/// CNF implicant test: every clause contains a literal made true by `mu`.
pub fn entails(mu: &PartialAssignment, f: &CnfFormula) -> bool {
    f.clauses.iter().all(|c| c.iter().any(|&l| mu.is_true(l)))
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("assignment is not an implicant of the formula")]
pub struct NotAnImplicant;

/// `true` if no single assigned variable can be dropped while keeping
/// `mu` an implicant.
pub fn is_minimal_implicant(mu: &PartialAssignment, f: &CnfFormula) -> Result<bool, NotAnImplicant> {
    if !entails(mu, f) {
        return Err(NotAnImplicant);
    }
    // A literal is redundant iff every clause it covers has another cover.
    let mut cover_count = vec![0usize; f.clauses.len()];
    for (k, clause) in f.clauses.iter().enumerate() {
        cover_count[k] = clause.iter().filter(|&&l| mu.is_true(l)).count();
    }
    for lit in mu.literals() {
        let droppable = f
            .clauses
            .iter()
            .zip(&cover_count)
            .all(|(c, &count)| !c.contains(&lit) || count >= 2);
        if droppable {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Finds a model by chronological backtracking (variables in id order,
/// `false` tried first), so the result is the lexicographically first model.
/// Returns `None` if the formula is unsatisfiable.
pub fn first_model(f: &CnfFormula) -> Option<Vec<bool>> {
    let n = f.num_vars;
    // watch lists by variable: clauses in which the variable's literal is the last to be decided
    let mut last_var_clauses: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for (k, clause) in f.clauses.iter().enumerate() {
        {
            let v = clause.iter().map(|l| l.var).max()?;
            last_var_clauses[v as usize].push(k)
        }
    }
    let mut values = vec![false; n];
    let mut choice = vec![0u8; n + 1];
    let mut depth = 1usize;
    // iterative DFS; choice[d] counts values tried for variable d
    loop {
        if depth > n {
            return Some(values);
        }
        if choice[depth] == 2 {
            choice[depth] = 0;
            if depth == 1 {
                return None;
            }
            depth -= 1;
            continue;
        }
        values[depth - 1] = choice[depth] == 1;
        choice[depth] += 1;
        let ok = last_var_clauses[depth]
            .iter()
            .all(|&k| f.clauses[k].iter().any(|l| values[l.var as usize - 1] == l.positive));
        if ok {
            depth += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cnf(n: usize, clauses: &[&[i64]]) -> CnfFormula {
        let owned: Vec<Vec<i64>> = clauses.iter().map(|c| c.to_vec()).collect();
        CnfFormula::from_dimacs_clauses(n, &owned).unwrap()
    }

    fn assign(n: usize, lits: &[i64]) -> PartialAssignment {
        let lits: Vec<Literal> = lits.iter().map(|&l| Literal::from_dimacs(l).unwrap()).collect();
        PartialAssignment::from_literals(n, &lits).unwrap()
    }

    #[test]
    fn parse_single_clause() {
        let f = parse_dimacs("p cnf 3 1\n1 -2 3 0").unwrap();
        assert_eq!(f, cnf(3, &[&[1, -2, 3]]));
    }

    #[test]
    fn parse_empty_formula() {
        let f = parse_dimacs("p cnf 2 0").unwrap();
        assert_eq!(f.num_vars, 2);
        assert!(f.clauses.is_empty());
    }

    #[test]
    fn parse_comments_and_multiline_clauses() {
        let text = "c head\np cnf 4 2\n1 -2\nc mid\n 3 0 -4\n2 0\n";
        let f = parse_dimacs(text).unwrap();
        assert_eq!(f, cnf(4, &[&[1, -2, 3], &[-4, 2]]));
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_dimacs("1 2 0"), Err(DimacsError::DataBeforeHeader { line: 1 }));
        assert_eq!(parse_dimacs(""), Err(DimacsError::MissingHeader));
        assert_eq!(
            parse_dimacs("p cnf 2 1\n1 3 0"),
            Err(DimacsError::VarOutOfRange {
                line: 2,
                var: 3,
                num_vars: 2
            })
        );
        let err = parse_dimacs("p cnf 2 2\n1 2 0\n0\n").unwrap_err();
        assert_eq!(err, DimacsError::EmptyClause { line: 3 });
        assert!(err.is_trivially_unsat());
        assert!(matches!(
            parse_dimacs("p cnf 2 1\n1 x 0"),
            Err(DimacsError::BadToken { line: 2, .. })
        ));
        assert_eq!(
            parse_dimacs("p cnf 2 2\n1 2 0"),
            Err(DimacsError::ClauseCountMismatch { declared: 2, found: 1 })
        );
        assert!(matches!(
            parse_dimacs("p dnf 2 1\n1 0"),
            Err(DimacsError::BadHeader { .. })
        ));
    }

    #[test]
    fn tautology_removed() {
        let f = parse_dimacs("p cnf 2 1\n1 -1 0").unwrap();
        let pre = preprocess(&f);
        assert!(pre.formula.clauses.is_empty());
        assert!(pre.forced.is_empty());
        assert_eq!(pre.status, PreprocessStatus::TriviallySat);
    }

    #[test]
    fn unit_propagation_satisfies() {
        let pre = preprocess(&cnf(2, &[&[1], &[1, 2]]));
        assert_eq!(pre.forced, vec![Literal::pos(1)]);
        assert!(pre.formula.clauses.is_empty());
        assert_eq!(pre.status, PreprocessStatus::TriviallySat);
    }

    #[test]
    fn reduced_formula_untouched() {
        let f = cnf(3, &[&[1, -2, 3]]);
        let pre = preprocess(&f);
        assert_eq!(pre.formula, f);
        assert!(pre.forced.is_empty());
        assert_eq!(pre.status, PreprocessStatus::Reduced);
    }

    #[test]
    fn unit_conflict() {
        let pre = preprocess(&cnf(1, &[&[1], &[-1]]));
        assert_eq!(pre.status, PreprocessStatus::UnsatDetected);
    }

    #[test]
    fn propagation_chain_and_duplicates() {
        let pre = preprocess(&cnf(4, &[&[1, 1], &[-1, 2], &[-2, 3, 4], &[3, 3, -4, 4]]));
        assert_eq!(pre.forced, vec![Literal::pos(1), Literal::pos(2)]);
        assert_eq!(pre.formula.clauses, vec![vec![Literal::pos(3), Literal::pos(4)]]);
        assert_eq!(pre.status, PreprocessStatus::Reduced);
        assert_eq!(pre.eliminated, [1, 2].into_iter().collect());
    }

    #[test]
    fn entails_examples() {
        let f = cnf(3, &[&[1, -2, 3]]);
        assert!(entails(&assign(3, &[1]), &f));
        assert!(!entails(&PartialAssignment::unassigned(3), &f));
        assert!(entails(&assign(3, &[1, -2, 3]), &f));
        assert!(!entails(&assign(3, &[2, -3]), &f));
    }

    #[test]
    fn minimality_examples() {
        let f = cnf(3, &[&[1, -2, 3]]);
        assert_eq!(is_minimal_implicant(&assign(3, &[1]), &f), Ok(true));
        assert_eq!(is_minimal_implicant(&assign(3, &[1, 3]), &f), Ok(false));
        assert_eq!(
            is_minimal_implicant(&PartialAssignment::unassigned(3), &f),
            Err(NotAnImplicant)
        );
    }

    #[test]
    fn assignment_helpers() {
        let mu = assign(4, &[1, -3]);
        assert_eq!(mu.size(), 2);
        assert_eq!(mu.to_string(), "{1 -3}");
        assert!(PartialAssignment::from_literals(2, &[Literal::pos(1), Literal::neg(1)]).is_none());
        let only1 = mu.restrict(&[1].into_iter().collect());
        assert_eq!(only1.literals(), vec![Literal::pos(1)]);
        assert!(only1.is_subassignment_of(&mu));
        assert!(!mu.is_subassignment_of(&only1));
        let json = serde_json::to_string(&mu).unwrap();
        assert_eq!(json, r#"{"num_vars":4,"literals":[1,-3]}"#);
        let back: PartialAssignment = serde_json::from_str(&json).unwrap();
        assert_eq!(back, mu);
    }

    #[test]
    fn first_model_is_lexicographic() {
        let f = cnf(3, &[&[1, 2], &[-1, 3], &[2, 3]]);
        // 000 fails (1 2), 001 fails (1 2), 010 ok
        assert_eq!(first_model(&f), Some(vec![false, true, false]));
        assert_eq!(first_model(&cnf(1, &[&[1], &[-1]])), None);
        assert_eq!(first_model(&cnf(2, &[])), Some(vec![false, false]));
    }
}
