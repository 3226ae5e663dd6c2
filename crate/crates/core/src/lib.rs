//! Executable machinery for partial non-principal ultrafilters on a
//! decidable universe.
//!
//! The universe is the class of ultimately periodic subsets of ℕ, where
//! equality, inclusion and infinitude are all decidable.  On top of it the
//! crate provides:
//!
//! - [`upset`]: canonical ultimately periodic sets with a full Boolean
//!   algebra and element selection;
//! - [`algebra`]: finitely generated set algebras with explicit atom
//!   decompositions;
//! - [`pfilter`]: partial non-principal ultrafilters as branch choices over
//!   an algebra, with extension, partition selection and axiom verification;
//! - [`mu`]: bounded search, the filter-based search functional and the
//!   canonical choice functional;
//! - [`ultralimit`]: ultralimits of eventually periodic sequences via nested
//!   dyadic level sets, with witness subsequences and explicit Cauchy rates;
//! - [`termlang`]: a typed term language with a parser, typechecker,
//!   evaluator against pluggable oracles, and a collector for the set
//!   expressions fed to the ultrafilter constant;
//! - [`eliminate`]: the staged pipeline replacing the ultrafilter constant
//!   of a term by a constructed partial ultrafilter, with a full trace.

pub mod algebra;
pub mod config;
pub mod eliminate;
pub mod error;
pub mod mu;
pub mod pfilter;
pub mod rat;
pub mod termlang;
pub mod ultralimit;
pub mod upset;

pub use algebra::{Algebra, AtomMask, Word};
pub use config::{Config, TieBreak};
pub use eliminate::{eliminate, verify_uqf, FilterTrace, StageRecord, UqfReport};
pub use error::{Error, Result};
pub use mu::{k_prime, mu_search, mu_via_filter, SearchableFn};
pub use pfilter::{AxiomReport, IndexFilterReport, PartialFilter};
pub use termlang::{
    collect_usites, eval, eval_applied, parse_term, typecheck, FinType, Oracles, Prim, SetExpr,
    Term, UOracle, Value,
};
pub use ultralimit::{level_sets, subsequence_witness, ultralimit, DyadicTrace, Interval, UPSeq};
pub use upset::UPSet;
