//! Exact arithmetic toolkit for Erdős matrices: bistochastic matrices `A` with
//! `‖A‖²_F = maxTr(A)`.
//!
//! Everything is computed over the rationals. Floating point never enters a
//! verdict.

pub mod assignment;
pub mod birkhoff;
pub mod canonical;
pub mod enumerate;
pub mod gram;
pub mod linalg;
pub mod perm;
pub mod rational;
pub mod sample;
pub mod surd;
pub mod textfmt;

pub use assignment::{delta, frob_sq, is_erdos, maxtr, ErdosVerdict, MaxTraceCertificate, MaxTraceMethod};
pub use birkhoff::{decompose, reduce_affine, reduce_linear, ConvexDecomposition, Term};
pub use canonical::{canonical_form, set_canonical_key};
pub use enumerate::{enumerate_erdos, EnumerationConfig, EnumerationReport, ErdosClass};
pub use gram::{build_gram, pipeline, solve_candidate, GramSystem, PipelineOutcome};
pub use linalg::{BistochasticMatrix, RationalMatrix};
pub use perm::Permutation;
pub use rational::Rational;
pub use surd::{delta2_of_p, omega2, Surd};
