//! Sparse QUBO / Ising models, the spin registry, and conversions.

use std::collections::{BTreeMap, HashMap};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// What a spin stands for.
///
/// `Aux` spins belong to clause `clause` (0-based position in the encoded
/// formula) and chain stage `stage` (1-based, `1..=len - 2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpinRole {
    Pos { var: u32 },
    Neg { var: u32 },
    Aux { clause: usize, stage: usize },
}

/// Bijection between dense spin indices and [`SpinRole`]s.
///
/// Polarity spins come first: `Pos(i)` at `2(i - 1)` and `Neg(i)` at
/// `2(i - 1) + 1`; auxiliaries follow in insertion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinRegistry {
    roles: Vec<SpinRole>,
    index: HashMap<SpinRole, usize>,
    num_vars: usize,
}

impl SpinRegistry {
    pub fn for_vars(num_vars: usize) -> Self {
        let mut reg = SpinRegistry {
            roles: Vec::with_capacity(2 * num_vars),
            index: HashMap::with_capacity(2 * num_vars),
            num_vars,
        };
        for v in 1..=num_vars as u32 {
            reg.insert(SpinRole::Pos { var: v });
            reg.insert(SpinRole::Neg { var: v });
        }
        reg
    }

    /// Rebuilds a registry from a role list (e.g. read from JSON).
    pub fn from_roles(roles: Vec<SpinRole>) -> Option<Self> {
        let num_vars = roles.iter().filter(|r| matches!(r, SpinRole::Pos { .. })).count();
        let reg = SpinRegistry::for_vars(num_vars);
        if roles.len() < 2 * num_vars || roles[..2 * num_vars] != reg.roles[..] {
            return None;
        }
        let mut reg = reg;
        for &role in &roles[2 * num_vars..] {
            if !matches!(role, SpinRole::Aux { .. }) || reg.index.contains_key(&role) {
                return None;
            }
            reg.insert(role);
        }
        Some(reg)
    }

    fn insert(&mut self, role: SpinRole) -> usize {
        let idx = self.roles.len();
        let prev = self.index.insert(role, idx);
        assert!(prev.is_none(), "duplicate spin role {role:?}");
        self.roles.push(role);
        idx
    }

    pub fn add_aux(&mut self, clause: usize, stage: usize) -> usize {
        self.insert(SpinRole::Aux { clause, stage })
    }

    pub fn len(&self) -> usize {
        self.roles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roles.is_empty()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn roles(&self) -> &[SpinRole] {
        &self.roles
    }

    pub fn role(&self, idx: usize) -> Option<SpinRole> {
        self.roles.get(idx).copied()
    }

    pub fn index_of(&self, role: SpinRole) -> Option<usize> {
        self.index.get(&role).copied()
    }

    pub fn pos(&self, var: u32) -> usize {
        debug_assert!(var >= 1 && var as usize <= self.num_vars);
        2 * (var as usize - 1)
    }

    pub fn neg(&self, var: u32) -> usize {
        self.pos(var) + 1
    }

    /// Number of polarity spins (`2n`).
    pub fn polarity_len(&self) -> usize {
        2 * self.num_vars
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QuboError {
    #[error("vector has length {got}, model dimension is {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("spin {index} is fixed to {fixed} but the vector has {got}")]
    FixedSpinContradiction { index: usize, fixed: u8, got: u8 },
    #[error("spin index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("coefficient for {what} is not finite")]
    NonFinite { what: String },
    #[error("invalid role list in model document")]
    BadRoles,
    #[error("document arrays have mismatched lengths")]
    RaggedArrays,
}

/// Quadratic pseudo-Boolean function
/// `offset + sum_i linear[i] x_i + sum_{i<j} quadratic[(i, j)] x_i x_j`
/// over `x` in `{0,1}^dim`, with optional hard-fixed spins.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboModel<T> {
    dim: usize,
    linear: BTreeMap<usize, T>,
    quadratic: BTreeMap<(usize, usize), T>,
    offset: T,
    fixed: BTreeMap<usize, bool>,
}

impl<T: Scalar> QuboModel<T> {
    pub fn new(dim: usize) -> Self {
        QuboModel {
            dim,
            linear: BTreeMap::new(),
            quadratic: BTreeMap::new(),
            offset: T::zero(),
            fixed: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    pub fn linear(&self) -> &BTreeMap<usize, T> {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), T> {
        &self.quadratic
    }

    pub fn fixed(&self) -> &BTreeMap<usize, bool> {
        &self.fixed
    }

    pub fn is_fixed(&self, idx: usize) -> bool {
        self.fixed.contains_key(&idx)
    }

    /// Grows the index space (new spins have no terms).
    pub fn grow_to(&mut self, dim: usize) {
        self.dim = self.dim.max(dim);
    }

    pub fn add_offset(&mut self, c: T) {
        self.offset = self.offset + c;
    }

    pub fn add_linear(&mut self, i: usize, c: T) {
        assert!(i < self.dim, "spin {i} out of range");
        let e = self.linear.entry(i).or_insert_with(T::zero);
        *e = *e + c;
    }

    /// Adds `c x_i x_j`; `i == j` folds into the linear term since `x^2 = x`.
    pub fn add_quadratic(&mut self, i: usize, j: usize, c: T) {
        if i == j {
            return self.add_linear(i, c);
        }
        assert!(i < self.dim && j < self.dim, "spin ({i}, {j}) out of range");
        let key = if i < j { (i, j) } else { (j, i) };
        let e = self.quadratic.entry(key).or_insert_with(T::zero);
        *e = *e + c;
    }

    /// Hard-fixes spin `i`. The model's terms are left untouched until
    /// [`fold_fixed`](Self::fold_fixed).
    pub fn fix(&mut self, i: usize, value: bool) {
        assert!(i < self.dim, "spin {i} out of range");
        self.fixed.insert(i, value);
    }

    /// Checks that every coefficient is finite.
    pub fn validate(&self) -> Result<(), QuboError> {
        if !self.offset.is_finite_value() {
            return Err(QuboError::NonFinite { what: "offset".into() });
        }
        for (i, c) in &self.linear {
            if !c.is_finite_value() {
                return Err(QuboError::NonFinite {
                    what: format!("linear {i}"),
                });
            }
        }
        for ((i, j), c) in &self.quadratic {
            if !c.is_finite_value() {
                return Err(QuboError::NonFinite {
                    what: format!("quadratic ({i}, {j})"),
                });
            }
        }
        Ok(())
    }

    pub fn check_vector(&self, x: &[bool]) -> Result<(), QuboError> {
        if x.len() != self.dim {
            return Err(QuboError::LengthMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        for (&i, &v) in &self.fixed {
            if x[i] != v {
                return Err(QuboError::FixedSpinContradiction {
                    index: i,
                    fixed: v as u8,
                    got: x[i] as u8,
                });
            }
        }
        Ok(())
    }

    pub fn energy(&self, x: &[bool]) -> Result<T, QuboError> {
        self.check_vector(x)?;
        Ok(self.energy_unchecked(x))
    }

    /// Energy without length or fixed-spin validation.
    pub fn energy_unchecked(&self, x: &[bool]) -> T {
        let mut e = self.offset;
        for (&i, &c) in &self.linear {
            if x[i] {
                e = e + c;
            }
        }
        for (&(i, j), &c) in &self.quadratic {
            if x[i] && x[j] {
                e = e + c;
            }
        }
        e
    }

    /// Substitutes fixed spins into the polynomial. The fixed map is kept so
    /// samplers still skip those spins, but no term references them.
    pub fn fold_fixed(&self) -> QuboModel<T> {
        let mut out = QuboModel {
            dim: self.dim,
            linear: BTreeMap::new(),
            quadratic: BTreeMap::new(),
            offset: self.offset,
            fixed: self.fixed.clone(),
        };
        for (&i, &c) in &self.linear {
            match self.fixed.get(&i) {
                Some(true) => out.offset = out.offset + c,
                Some(false) => {}
                None => out.add_linear(i, c),
            }
        }
        for (&(i, j), &c) in &self.quadratic {
            match (self.fixed.get(&i), self.fixed.get(&j)) {
                (None, None) => out.add_quadratic(i, j, c),
                (Some(false), _) | (_, Some(false)) => {}
                (Some(true), Some(true)) => out.offset = out.offset + c,
                (Some(true), None) => out.add_linear(j, c),
                (None, Some(true)) => out.add_linear(i, c),
            }
        }
        out
    }

    /// Multiplies every coefficient (and the offset) by `factor`.
    pub fn scaled(&self, factor: T) -> QuboModel<T> {
        QuboModel {
            dim: self.dim,
            linear: self.linear.iter().map(|(&k, &c)| (k, c * factor)).collect(),
            quadratic: self.quadratic.iter().map(|(&k, &c)| (k, c * factor)).collect(),
            offset: self.offset * factor,
            fixed: self.fixed.clone(),
        }
    }

    /// Converts coefficients to another scalar type through `f64`.
    pub fn cast<U: Scalar>(&self) -> QuboModel<U> {
        let conv = |c: T| U::from_f64(c.to_f64_lossy()).expect("finite coefficient");
        QuboModel {
            dim: self.dim,
            linear: self.linear.iter().map(|(&k, &c)| (k, conv(c))).collect(),
            quadratic: self.quadratic.iter().map(|(&k, &c)| (k, conv(c))).collect(),
            offset: conv(self.offset),
            fixed: self.fixed.clone(),
        }
    }

    /// Dense upper-triangular matrix with linear terms on the diagonal, so
    /// that `energy(x) = offset + x^T Q x`.
    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut q = vec![vec![T::zero(); self.dim]; self.dim];
        for (&i, &c) in &self.linear {
            q[i][i] = c;
        }
        for (&(i, j), &c) in &self.quadratic {
            q[i][j] = c;
        }
        q
    }

    /// Ising form under `z = 2x - 1`. Fixed spins are folded first and
    /// carried over as fixed `+1` / `-1` spins.
    pub fn to_ising(&self) -> IsingModel<T> {
        let folded = self.fold_fixed();
        let two = T::two();
        let four = two * two;
        let mut h: BTreeMap<usize, T> = BTreeMap::new();
        let mut j: BTreeMap<(usize, usize), T> = BTreeMap::new();
        let mut offset = folded.offset;
        for (&i, &q) in &folded.linear {
            let e = h.entry(i).or_insert_with(T::zero);
            *e = *e + q / two;
            offset = offset + q / two;
        }
        for (&(a, b), &q) in &folded.quadratic {
            let quarter = q / four;
            j.insert((a, b), quarter);
            for idx in [a, b] {
                let e = h.entry(idx).or_insert_with(T::zero);
                *e = *e + quarter;
            }
            offset = offset + quarter;
        }
        IsingModel {
            dim: folded.dim,
            h,
            j,
            offset,
            fixed: folded
                .fixed
                .iter()
                .map(|(&i, &v)| (i, if v { 1 } else { -1 }))
                .collect(),
        }
    }
}

/// `offset + sum_i h_i z_i + sum_{i<j} J_ij z_i z_j` over `z` in `{-1,+1}^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel<T> {
    pub dim: usize,
    pub h: BTreeMap<usize, T>,
    pub j: BTreeMap<(usize, usize), T>,
    pub offset: T,
    pub fixed: BTreeMap<usize, i8>,
}

impl<T: Scalar> IsingModel<T> {
    pub fn energy(&self, z: &[i8]) -> Result<T, QuboError> {
        if z.len() != self.dim {
            return Err(QuboError::LengthMismatch {
                expected: self.dim,
                got: z.len(),
            });
        }
        for (&i, &v) in &self.fixed {
            if z[i] != v {
                return Err(QuboError::FixedSpinContradiction {
                    index: i,
                    fixed: (v > 0) as u8,
                    got: (z[i] > 0) as u8,
                });
            }
        }
        let spin = |s: i8| if s > 0 { T::one() } else { -T::one() };
        let mut e = self.offset;
        for (&i, &c) in &self.h {
            e = e + c * spin(z[i]);
        }
        for (&(a, b), &c) in &self.j {
            e = e + c * spin(z[a]) * spin(z[b]);
        }
        Ok(e)
    }
}

/// Maps a binary vector to Ising spins.
pub fn to_spins(x: &[bool]) -> Vec<i8> {
    x.iter().map(|&b| if b { 1 } else { -1 }).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearEntries<T> {
    pub index: Vec<usize>,
    pub coeff: Vec<T>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuadraticEntries<T> {
    pub row: Vec<usize>,
    pub col: Vec<usize>,
    pub coeff: Vec<T>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixedEntries {
    pub index: Vec<usize>,
    pub value: Vec<u8>,
}

/// Interchange document for a QUBO (`kind = "qubo"`) or Ising
/// (`kind = "ising"`) model. Ising documents store `h` in `linear`, `J` in
/// `quadratic` and fixed spin values as `0` (-1) / `1` (+1).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelDocument<T> {
    pub kind: String,
    pub dim: usize,
    pub offset: T,
    pub linear: LinearEntries<T>,
    pub quadratic: QuadraticEntries<T>,
    pub fixed: FixedEntries,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roles: Option<Vec<SpinRole>>,
}

fn fixed_entries<V: Copy>(fixed: &BTreeMap<usize, V>, to_u8: impl Fn(V) -> u8) -> FixedEntries {
    FixedEntries {
        index: fixed.keys().copied().collect(),
        value: fixed.values().map(|&v| to_u8(v)).collect(),
    }
}

impl<T: Scalar + Serialize + DeserializeOwned> ModelDocument<T> {
    pub fn from_qubo(m: &QuboModel<T>, registry: Option<&SpinRegistry>) -> Self {
        ModelDocument {
            kind: "qubo".into(),
            dim: m.dim,
            offset: m.offset,
            linear: LinearEntries {
                index: m.linear.keys().copied().collect(),
                coeff: m.linear.values().copied().collect(),
            },
            quadratic: QuadraticEntries {
                row: m.quadratic.keys().map(|k| k.0).collect(),
                col: m.quadratic.keys().map(|k| k.1).collect(),
                coeff: m.quadratic.values().copied().collect(),
            },
            fixed: fixed_entries(&m.fixed, |v| v as u8),
            roles: registry.map(|r| r.roles().to_vec()),
        }
    }

    pub fn from_ising(m: &IsingModel<T>, registry: Option<&SpinRegistry>) -> Self {
        ModelDocument {
            kind: "ising".into(),
            dim: m.dim,
            offset: m.offset,
            linear: LinearEntries {
                index: m.h.keys().copied().collect(),
                coeff: m.h.values().copied().collect(),
            },
            quadratic: QuadraticEntries {
                row: m.j.keys().map(|k| k.0).collect(),
                col: m.j.keys().map(|k| k.1).collect(),
                coeff: m.j.values().copied().collect(),
            },
            fixed: fixed_entries(&m.fixed, |v| (v > 0) as u8),
            roles: registry.map(|r| r.roles().to_vec()),
        }
    }

    fn check_shape(&self) -> Result<(), QuboError> {
        let q = &self.quadratic;
        if self.linear.index.len() != self.linear.coeff.len()
            || q.row.len() != q.col.len()
            || q.row.len() != q.coeff.len()
            || self.fixed.index.len() != self.fixed.value.len()
        {
            return Err(QuboError::RaggedArrays);
        }
        let all = self
            .linear
            .index
            .iter()
            .chain(&q.row)
            .chain(&q.col)
            .chain(&self.fixed.index);
        for &i in all {
            if i >= self.dim {
                return Err(QuboError::IndexOutOfRange {
                    index: i,
                    dim: self.dim,
                });
            }
        }
        Ok(())
    }

    /// Rebuilds the QUBO model (and registry, if roles are present).
    pub fn to_qubo(&self) -> Result<(QuboModel<T>, Option<SpinRegistry>), QuboError> {
        self.check_shape()?;
        let mut m = QuboModel::new(self.dim);
        m.offset = self.offset;
        for (&i, &c) in self.linear.index.iter().zip(&self.linear.coeff) {
            m.add_linear(i, c);
        }
        let q = &self.quadratic;
        for ((&i, &j), &c) in q.row.iter().zip(&q.col).zip(&q.coeff) {
            m.add_quadratic(i, j, c);
        }
        for (&i, &v) in self.fixed.index.iter().zip(&self.fixed.value) {
            m.fix(i, v != 0);
        }
        m.validate()?;
        let registry = match &self.roles {
            None => None,
            Some(roles) => Some(SpinRegistry::from_roles(roles.clone()).ok_or(QuboError::BadRoles)?),
        };
        Ok((m, registry))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_model(rng: &mut ChaCha8Rng, dim: usize) -> QuboModel<f64> {
        let mut m = QuboModel::new(dim);
        m.add_offset(rng.gen_range(-3.0..3.0));
        for i in 0..dim {
            if rng.gen_bool(0.7) {
                m.add_linear(i, rng.gen_range(-5.0..5.0));
            }
            for j in i + 1..dim {
                if rng.gen_bool(0.4) {
                    m.add_quadratic(i, j, rng.gen_range(-5.0..5.0));
                }
            }
        }
        m
    }

    /// Naive double loop over the dense matrix.
    fn dense_energy(m: &QuboModel<f64>, x: &[bool]) -> f64 {
        let q = m.to_dense();
        let mut e = m.offset();
        for i in 0..x.len() {
            for j in 0..x.len() {
                e += q[i][j] * (x[i] as u8 as f64) * (x[j] as u8 as f64);
            }
        }
        e
    }

    fn bits(mask: u32, dim: usize) -> Vec<bool> {
        (0..dim).map(|i| mask >> i & 1 == 1).collect()
    }

    #[test]
    fn zero_vector_is_offset() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_model(&mut rng, 6);
        assert_eq!(m.energy(&[false; 6]).unwrap(), m.offset());
    }

    #[test]
    fn energy_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let dim = rng.gen_range(1..9);
            let m = random_model(&mut rng, dim);
            for mask in 0..1u32 << dim {
                let x = bits(mask, dim);
                assert!((m.energy(&x).unwrap() - dense_energy(&m, &x)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn energy_errors() {
        let mut m = QuboModel::<f64>::new(3);
        m.fix(1, true);
        assert_eq!(
            m.energy(&[false, true]),
            Err(QuboError::LengthMismatch { expected: 3, got: 2 })
        );
        assert_eq!(
            m.energy(&[false, false, false]),
            Err(QuboError::FixedSpinContradiction {
                index: 1,
                fixed: 1,
                got: 0
            })
        );
    }

    #[test]
    fn diagonal_quadratic_becomes_linear() {
        let mut m = QuboModel::<f64>::new(2);
        m.add_quadratic(1, 1, 3.0);
        m.add_quadratic(1, 0, 2.0);
        assert_eq!(m.linear()[&1], 3.0);
        assert_eq!(m.quadratic()[&(0, 1)], 2.0);
    }

    #[test]
    fn fold_fixed_zero_and_one() {
        let mut m = QuboModel::<f64>::new(3);
        m.add_offset(1.0);
        m.add_linear(0, 2.0);
        m.add_linear(2, 5.0);
        m.add_quadratic(0, 2, 7.0);
        m.add_quadratic(1, 2, -4.0);

        let mut zero = m.clone();
        zero.fix(2, false);
        let f = zero.fold_fixed();
        assert_eq!(f.offset(), 1.0);
        assert!(!f.linear().contains_key(&2));
        assert!(f.quadratic().is_empty());

        let mut one = m.clone();
        one.fix(2, true);
        let f = one.fold_fixed();
        assert_eq!(f.offset(), 6.0);
        assert_eq!(f.linear()[&0], 9.0);
        assert_eq!(f.linear()[&1], -4.0);
        assert!(f.quadratic().is_empty());
        assert_eq!(f.fold_fixed(), f);
    }

    #[test]
    fn fold_fixed_matches_direct_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let dim = 10;
            let mut m = random_model(&mut rng, dim);
            for i in 0..dim {
                if rng.gen_bool(0.3) {
                    m.fix(i, rng.gen_bool(0.5));
                }
            }
            let f = m.fold_fixed();
            for _ in 0..100 {
                let mut x: Vec<bool> = (0..dim).map(|_| rng.gen_bool(0.5)).collect();
                for (&i, &v) in m.fixed() {
                    x[i] = v;
                }
                assert!((m.energy(&x).unwrap() - f.energy(&x).unwrap()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn ising_single_terms() {
        let mut m = QuboModel::<Rational>::new(2);
        m.add_linear(0, Rational::from_integer(3));
        let is = m.to_ising();
        assert_eq!(is.h[&0], Rational::new(3, 2));
        assert_eq!(is.offset, Rational::new(3, 2));

        let mut m = QuboModel::<Rational>::new(2);
        m.add_quadratic(0, 1, Rational::from_integer(5));
        let is = m.to_ising();
        assert_eq!(is.j[&(0, 1)], Rational::new(5, 4));
        assert_eq!(is.h[&0], Rational::new(5, 4));
        assert_eq!(is.h[&1], Rational::new(5, 4));
        assert_eq!(is.offset, Rational::new(5, 4));
    }

    #[test]
    fn ising_energy_equality_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let dim = rng.gen_range(1..=10);
            let m = random_model(&mut rng, dim);
            let is = m.to_ising();
            for mask in 0..1u32 << dim {
                let x = bits(mask, dim);
                let diff = is.energy(&to_spins(&x)).unwrap() - m.energy(&x).unwrap();
                assert!(diff.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn ising_keeps_fixed_spins() {
        let mut m = QuboModel::<f64>::new(3);
        m.add_quadratic(0, 1, 2.0);
        m.add_linear(2, 1.0);
        m.fix(1, true);
        let is = m.to_ising();
        assert_eq!(is.fixed[&1], 1);
        for mask in 0..8u32 {
            let x = bits(mask, 3);
            if !x[1] {
                assert!(is.energy(&to_spins(&x)).is_err());
                continue;
            }
            assert!((is.energy(&to_spins(&x)).unwrap() - m.energy(&x).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn energy_linear_in_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_model(&mut rng, 7);
        let x: Vec<bool> = (0..7).map(|_| rng.gen_bool(0.5)).collect();
        let base = m.energy(&x).unwrap();
        let mut bumped = m.clone();
        bumped.add_quadratic(2, 5, 1.5);
        let expect = base + if x[2] && x[5] { 1.5 } else { 0.0 };
        assert!((bumped.energy(&x).unwrap() - expect).abs() < 1e-12);
        let doubled = m.scaled(2.0);
        assert!((doubled.energy(&x).unwrap() - 2.0 * base).abs() < 1e-9);
    }

    #[test]
    fn document_round_trip() {
        let mut reg = SpinRegistry::for_vars(2);
        reg.add_aux(0, 1);
        let mut m = QuboModel::<f64>::new(reg.len());
        m.add_linear(0, 1.0);
        m.add_quadratic(1, 4, -2.5);
        m.add_offset(3.0);
        m.fix(3, false);
        let doc = ModelDocument::from_qubo(&m, Some(&reg));
        let json = serde_json::to_string(&doc).unwrap();
        let back: ModelDocument<f64> = serde_json::from_str(&json).unwrap();
        let (m2, reg2) = back.to_qubo().unwrap();
        assert_eq!(m2, m);
        assert_eq!(reg2.unwrap(), reg);
        assert!(json.contains(r#""kind":"aux","clause":0,"stage":1"#));
    }

    #[test]
    fn document_rejects_bad_input() {
        let m = QuboModel::<f64>::new(2);
        let mut doc = ModelDocument::from_qubo(&m, None);
        doc.linear.index.push(5);
        doc.linear.coeff.push(1.0);
        assert_eq!(
            doc.to_qubo().unwrap_err(),
            QuboError::IndexOutOfRange { index: 5, dim: 2 }
        );
        doc.linear.coeff.push(1.0);
        assert_eq!(doc.to_qubo().unwrap_err(), QuboError::RaggedArrays);
    }

    #[test]
    fn registry_layout() {
        let mut reg = SpinRegistry::for_vars(3);
        assert_eq!(reg.pos(2), 2);
        assert_eq!(reg.neg(2), 3);
        let a = reg.add_aux(4, 1);
        assert_eq!(a, 6);
        assert_eq!(reg.role(a), Some(SpinRole::Aux { clause: 4, stage: 1 }));
        assert_eq!(reg.index_of(SpinRole::Neg { var: 3 }), Some(5));
        assert!(SpinRegistry::from_roles(vec![SpinRole::Neg { var: 1 }]).is_none());
    }
}
