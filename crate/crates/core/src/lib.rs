//! Projective-cofactor decomposition of Boolean functions.
//!
//! The crate is organised bottom-up:
//!
//! - [`engine`]: canonical decision diagrams (`Manager`, `BoolFunc`, `Point`).
//! - [`cnf`]: DIMACS CNF input and output.
//! - [`oracle`]: exhaustive truth tables used as independent ground truth.
//! - [`cofactor`]: cofactor intervals and expansions.
//! - [`projection`]: projections of the cube fixing one ON-set and landing
//!   in another function's OFF-set.
//! - [`solver`]: projective cofactors and the factor-by-factor solver.

pub mod cnf;
pub mod cofactor;
pub mod engine;
pub mod oracle;
pub mod projection;
pub mod solver;

pub use cnf::{emit_dimacs, parse_dimacs, Clause, CnfFormula, DimacsError, Literal};
pub use engine::{BoolFunc, EngineError, Manager, Point, VarId};
pub use projection::{Projection, ProjectionError};
pub use solver::{solve, FactorOrder, SolveConfig, SolveError, SolveResult, Status};
