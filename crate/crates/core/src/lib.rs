//! Exact counting for non-negative weighted constraint satisfaction problems.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: domains, weighted languages, instances and marginals.
//! - [`exactmat`]: rectangularity and block-rank-1 tests on exact matrices.
//! - [`oracle`]: brute-force partition functions, relations, marginal and
//!   existential matrices, projections, `~_i` classes and balance tests.
//! - [`vecrep`]: vector representations of functions and instances.
//! - [`counter`]: the structured counting algorithm built on witness functions.
//! - [`dichotomy`]: Mal'tsev search, the 6th power structure, automorphism
//!   search and the tractability classifier.
//! - [`reductions`]: replication, unweighted-to-weighted counting, the
//!   graph-homomorphism gadget and the prefix constructions.
//! - [`corpus`]: named fixtures and seeded random generators.
//!
//! Domain elements, variables and coordinates are zero-based throughout the
//! library. Split sizes (`a`, `b`, `c` in the balance tests) are counts of
//! leading coordinates, so they read the same as in the usual notation.

pub mod corpus;
pub mod counter;
pub mod dichotomy;
mod disjoint_set;
pub mod error;
pub mod exactmat;
pub mod model;
pub mod oracle;
pub mod reductions;
pub mod vecrep;
pub mod weight;

pub use counter::{Counter, TFunctions};
pub use dichotomy::{classify, ClassifyConfig, Reason, Verdict};
pub use error::{Error, Result};
pub use exactmat::{BlockDecomposition, NotRectangular, RankWitness, RationalMatrix};
pub use model::{Application, Domain, FunctionTable, Instance, Language, RelationTable, Tuple};
pub use oracle::{BalanceVerdict, Oracle};
pub use reductions::Graph;
pub use vecrep::VectorRepresentation;
pub use weight::Weight;
