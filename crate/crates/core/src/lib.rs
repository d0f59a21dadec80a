//! Exact computational engine for Iwahori-Hecke algebras of finite Coxeter
//! systems and the Laurent-polynomial invariants of ciliated surfaces they
//! define, with four mutually cross-checking evaluation pipelines
//! (triangulation state sum, polygon trace, Casimir trace, Schur-element
//! formula) and the positivity/symmetry analyzers.

pub mod center;
pub mod coxeter;
pub mod hecke;
pub mod laurent;
pub mod numfield;
pub mod ratfun;
pub mod schur;
pub mod surfaces;

pub use laurent::{CoeffReport, Laurent, LaurentError, LaurentPoly, QPoly, QView};
