use std::collections::BTreeSet;
use std::path::Path;

use anyhow::{bail, Context, Result};
use pqubo::circuit::CnfConversion;
use pqubo::formula::DimacsError;
use pqubo::{parse_dimacs, plaisted_greenbaum, BoolExpr, CnfFormula, Literal, PartialAssignment};

/// A formula ready for encoding, plus what is known about its origin.
pub struct Loaded {
    pub cnf: CnfFormula,
    /// Original variables for expression inputs.
    pub original: Option<BTreeSet<u32>>,
    pub conversion: Option<CnfConversion>,
}

pub enum LoadOutcome {
    Ok(Loaded),
    /// The input contains an empty clause.
    TriviallyUnsat(String),
}

pub fn load(path: &Path) -> Result<LoadOutcome> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "bexpr") {
        let expr: BoolExpr = text
            .parse()
            .with_context(|| format!("cannot parse expression in {}", path.display()))?;
        let conv = plaisted_greenbaum(&expr);
        return Ok(LoadOutcome::Ok(Loaded {
            cnf: conv.cnf.clone(),
            original: Some(conv.visible.clone()),
            conversion: Some(conv),
        }));
    }
    match parse_dimacs(&text) {
        Ok(cnf) => Ok(LoadOutcome::Ok(Loaded {
            cnf,
            original: None,
            conversion: None,
        })),
        Err(e @ DimacsError::EmptyClause { .. }) => Ok(LoadOutcome::TriviallyUnsat(e.to_string())),
        Err(e) => Err(e).with_context(|| format!("cannot parse DIMACS in {}", path.display())),
    }
}

/// Parses `1,3,5` or `1-4,7`.
pub fn parse_var_list(s: &str) -> Result<BTreeSet<u32>> {
    let mut out = BTreeSet::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once('-') {
            let (a, b): (u32, u32) = (a.trim().parse()?, b.trim().parse()?);
            if a == 0 || b < a {
                bail!("bad variable range {part:?}");
            }
            out.extend(a..=b);
        } else {
            let v: u32 = part.parse().with_context(|| format!("bad variable {part:?}"))?;
            if v == 0 {
                bail!("variable ids start at 1");
            }
            out.insert(v);
        }
    }
    Ok(out)
}

/// Reads signed DIMACS literals separated by whitespace. Lines starting
/// with `c` are comments, a leading `v` or `s` token is skipped and `0`
/// terminators are ignored.
pub fn parse_literals(text: &str) -> Result<Vec<Literal>> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.starts_with('c') || line.starts_with('s') {
            continue;
        }
        for tok in line.split_whitespace() {
            if tok == "v" {
                continue;
            }
            let x: i64 = tok.parse().with_context(|| format!("bad literal {tok:?}"))?;
            if x != 0 {
                out.push(Literal::from_dimacs(x).context("literal out of range")?);
            }
        }
    }
    Ok(out)
}

/// Builds a total model over the CNF's variables. For expression inputs a
/// model over the original variables is extended with the gate values.
pub fn total_model(lits: &[Literal], loaded: &Loaded) -> Result<PartialAssignment> {
    let n = loaded.cnf.num_vars;
    if let Some(v) = lits.iter().find(|l| l.var as usize > n) {
        bail!("model mentions variable {} but the formula has {n}", v.var);
    }
    let mut eta = PartialAssignment::from_literals(n, lits).context("model assigns a variable both ways")?;
    if let Some(conv) = &loaded.conversion {
        let values: Vec<bool> = (1..=conv.visible.len() as u32)
            .map(|v| eta.get(v) == pqubo::Value::True)
            .collect();
        let originals_total = conv.visible.iter().all(|&v| eta.get(v) != pqubo::Value::Unassigned);
        if originals_total {
            for (&t, def) in &conv.definitions {
                if eta.get(t) == pqubo::Value::Unassigned {
                    eta.set(t, def.eval(&values).into());
                }
            }
        }
    }
    if !eta.is_total() {
        let missing: Vec<u32> = (1..=n as u32)
            .filter(|&v| eta.get(v) == pqubo::Value::Unassigned)
            .collect();
        bail!("model is not total; unassigned variables: {missing:?}");
    }
    Ok(eta)
}
