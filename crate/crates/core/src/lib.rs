//! Encoding Boolean formulas as QUBO objectives whose ground states are
//! short partial satisfying assignments.
//!
//! Each variable gets two polarity spins `(p, n)`: `(1,0)` true, `(0,1)`
//! false, `(0,0)` unassigned. Clause gadgets penalize falsified clauses,
//! a consistency term forbids `(1,1)`, and a sparsity term rewards leaving
//! variables unassigned. The model types are generic over [`Scalar`], with
//! aliases below for the common choices.

pub mod annealer;
pub mod bench;
pub mod circuit;
pub mod encoder;
pub mod formula;
pub mod qubo;
pub mod scalar;
pub mod verify;

pub use annealer::{best_of, iterate_shrink, sample, BetaSchedule, RefineTrace, SaConfig, SampleResult};
pub use circuit::{plaisted_greenbaum, tseitin, BoolExpr, CnfConversion};
pub use encoder::{default_weights, encode, EncodeMode, Encoding, SparsityScope, Task, Weights};
pub use formula::{parse_dimacs, preprocess, CnfFormula, Literal, PartialAssignment, Value};
pub use qubo::{IsingModel, ModelDocument, QuboModel, SpinRegistry, SpinRole};
pub use scalar::{Rational, Scalar};
pub use verify::{decode, verdict, OracleBudget, Verdict};

pub type QuboModelF64 = QuboModel<f64>;
pub type QuboModelF32 = QuboModel<f32>;
pub type QuboModelExact = QuboModel<Rational>;
pub type IsingModelF64 = IsingModel<f64>;
pub type IsingModelExact = IsingModel<Rational>;
pub type EncodingF64 = Encoding<f64>;
pub type EncodingF32 = Encoding<f32>;
pub type EncodingExact = Encoding<Rational>;
pub type WeightsF64 = Weights<f64>;
pub type WeightsExact = Weights<Rational>;
pub type SampleResultF64 = SampleResult<f64>;
