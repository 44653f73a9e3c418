//! Independent oracles shared by the integration tests. They rely only on
//! the spin layout (`p_v` at `2(v-1)`, `n_v` at `2(v-1)+1`, auxiliaries
//! after) and on the raw model coefficients.

#![allow(dead_code)]

use std::collections::BTreeMap;

use pqubo::formula::CnfFormula;
use pqubo::qubo::{QuboModel, SpinRegistry, SpinRole};

pub fn cnf(n: usize, clauses: &[&[i64]]) -> CnfFormula {
    let owned: Vec<Vec<i64>> = clauses.iter().map(|c| c.to_vec()).collect();
    CnfFormula::from_dimacs_clauses(n, &owned).unwrap()
}

/// `None` if some variable has both polarity spins on.
pub fn decode_independent(bits: &[bool], n: usize) -> Option<Vec<Option<bool>>> {
    (0..n)
        .map(|i| match (bits[2 * i], bits[2 * i + 1]) {
            (true, true) => None,
            (true, false) => Some(Some(true)),
            (false, true) => Some(Some(false)),
            (false, false) => Some(None),
        })
        .collect()
}

/// Every clause has a literal made true by `mu`.
pub fn covers(mu: &[Option<bool>], f: &CnfFormula) -> bool {
    f.clauses
        .iter()
        .all(|c| c.iter().any(|l| mu[l.var as usize - 1] == Some(l.positive)))
}

/// Minimum implicant size over all `3^n` partial assignments.
pub fn brute_min_implicant(f: &CnfFormula) -> Option<usize> {
    let n = f.num_vars;
    let mut best = None;
    let mut mu = vec![None; n];
    for code in 0..3usize.pow(n as u32) {
        let mut c = code;
        let mut size = 0;
        for slot in mu.iter_mut() {
            *slot = [None, Some(true), Some(false)][c % 3];
            size += usize::from(c % 3 != 0);
            c /= 3;
        }
        if best.is_none_or(|b| size < b) && covers(&mu, f) {
            best = Some(size);
        }
    }
    best
}

pub fn all_models(f: &CnfFormula) -> Vec<Vec<bool>> {
    let n = f.num_vars;
    (0u64..1 << n)
        .map(|m| (0..n).map(|i| m >> i & 1 == 1).collect::<Vec<bool>>())
        .filter(|v| f.eval_total(v))
        .collect()
}

pub struct Scan {
    pub min: f64,
    /// Polarity patterns attaining `min` after minimizing over auxiliaries.
    pub ground: Vec<Vec<bool>>,
    pub patterns: u64,
    /// Patterns for which the callback returned true.
    pub low: u64,
}

/// Linear and quadratic terms touching one clause's auxiliaries.
type GroupTerms = (Vec<(usize, f64)>, Vec<(usize, usize, f64)>);

struct Group {
    pol: Vec<usize>,
    table: Vec<f64>,
}

/// Enumerates every assignment of the free polarity spins and, for each,
/// the exact minimum over all auxiliary spins. Auxiliaries are grouped by
/// the clause they belong to; the scan asserts that no term couples two
/// groups, so the minimum over all auxiliaries is the sum of per-group
/// minima, each computed by brute force from the raw coefficients.
pub fn scan_polarity_space(
    model: &QuboModel<f64>,
    registry: &SpinRegistry,
    mut on_pattern: impl FnMut(u64, f64, &[bool]) -> bool,
) -> Scan {
    let pdim = registry.polarity_len();
    let dim = model.dim();
    let group_of = |i: usize| -> Option<usize> {
        match registry.role(i) {
            Some(SpinRole::Aux { clause, .. }) => Some(clause),
            _ => None,
        }
    };
    for &i in model.fixed().keys() {
        assert!(i < pdim, "auxiliary spins are never fixed");
    }

    let mut pol_lin = vec![0.0; pdim];
    let mut pol_adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); pdim];
    let mut group_terms: BTreeMap<usize, GroupTerms> = BTreeMap::new();
    for (&i, &c) in model.linear() {
        match group_of(i) {
            None => pol_lin[i] += c,
            Some(g) => group_terms.entry(g).or_default().0.push((i, c)),
        }
    }
    for (&(i, j), &c) in model.quadratic() {
        match (group_of(i), group_of(j)) {
            (None, None) => {
                pol_adj[i].push((j, c));
                pol_adj[j].push((i, c));
            }
            (Some(g), None) | (None, Some(g)) => group_terms.entry(g).or_default().1.push((i, j, c)),
            (Some(g), Some(h)) => {
                assert_eq!(g, h, "auxiliaries of different clauses interact");
                group_terms.entry(g).or_default().1.push((i, j, c));
            }
        }
    }

    let mut groups = Vec::new();
    for (_, (lin, quad)) in group_terms {
        let mut pol: Vec<usize> = quad
            .iter()
            .flat_map(|&(i, j, _)| [i, j])
            .filter(|&i| i < pdim)
            .collect();
        pol.sort_unstable();
        pol.dedup();
        let mut aux: Vec<usize> = lin
            .iter()
            .map(|&(i, _)| i)
            .chain(quad.iter().flat_map(|&(i, j, _)| [i, j]))
            .filter(|&i| i >= pdim)
            .collect();
        aux.sort_unstable();
        aux.dedup();
        let mut x = vec![false; dim];
        let table = (0u32..1 << pol.len())
            .map(|pm| {
                for (b, &s) in pol.iter().enumerate() {
                    x[s] = pm >> b & 1 == 1;
                }
                (0u32..1 << aux.len())
                    .map(|am| {
                        for (b, &s) in aux.iter().enumerate() {
                            x[s] = am >> b & 1 == 1;
                        }
                        lin.iter().map(|&(i, c)| if x[i] { c } else { 0.0 }).sum::<f64>()
                            + quad
                                .iter()
                                .map(|&(i, j, c)| if x[i] && x[j] { c } else { 0.0 })
                                .sum::<f64>()
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        groups.push(Group { pol, table });
    }
    let mut groups_of_spin: Vec<Vec<(usize, usize)>> = vec![Vec::new(); pdim];
    for (g, grp) in groups.iter().enumerate() {
        for (b, &s) in grp.pol.iter().enumerate() {
            groups_of_spin[s].push((g, b));
        }
    }

    let mut bits = vec![false; pdim];
    for (&i, &v) in model.fixed() {
        bits[i] = v;
    }
    let free: Vec<usize> = (0..pdim).filter(|i| !model.fixed().contains_key(i)).collect();
    assert!(free.len() <= 40);

    let mut e_pol: f64 = (0..pdim).filter(|&i| bits[i]).map(|i| pol_lin[i]).sum::<f64>()
        + (0..pdim)
            .filter(|&i| bits[i])
            .flat_map(|i| {
                pol_adj[i]
                    .iter()
                    .filter(move |&&(j, _)| j > i)
                    .map(move |&(j, c)| (j, c))
            })
            .filter(|&(j, _)| bits[j])
            .map(|(_, c)| c)
            .sum::<f64>();
    let mut codes: Vec<usize> = groups
        .iter()
        .map(|g| g.pol.iter().enumerate().map(|(b, &s)| usize::from(bits[s]) << b).sum())
        .collect();
    let mut e_aux: f64 = groups.iter().zip(&codes).map(|(g, &c)| g.table[c]).sum();

    let mut scan = Scan {
        min: f64::INFINITY,
        ground: Vec::new(),
        patterns: 0,
        low: 0,
    };
    let total_patterns = 1u64 << free.len();
    for step in 0..total_patterns {
        if step > 0 {
            let s = free[step.trailing_zeros() as usize];
            let field = pol_lin[s]
                + pol_adj[s]
                    .iter()
                    .filter(|&&(j, _)| bits[j])
                    .map(|&(_, c)| c)
                    .sum::<f64>();
            bits[s] = !bits[s];
            e_pol += if bits[s] { field } else { -field };
            for &(g, b) in &groups_of_spin[s] {
                e_aux -= groups[g].table[codes[g]];
                codes[g] ^= 1 << b;
                e_aux += groups[g].table[codes[g]];
            }
        }
        let total = model.offset() + e_pol + e_aux;
        scan.patterns += 1;
        if total < scan.min - 1e-9 {
            scan.min = total;
            scan.ground.clear();
        }
        if (total - scan.min).abs() <= 1e-9 {
            scan.ground.push(bits.clone());
        }
        let gray = step ^ (step >> 1);
        if on_pattern(gray, total, &bits) {
            scan.low += 1;
        }
    }
    scan
}
