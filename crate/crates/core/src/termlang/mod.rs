//! A typed term language over the naturals with the ultrafilter, choice,
//! and search constants.
//!
//! The pieces: abstract syntax and types ([`ast`]), a parser for the
//! parenthesized applicative syntax ([`parse`]), a typechecker with degree
//! computation ([`types`]), call-by-value evaluation against pluggable
//! oracles ([`eval`]), the restricted set-expression sublanguage with exact
//! conversion to ultimately periodic sets ([`setexpr`], [`upfun`]), and the
//! collector for ultrafilter application sites ([`sites`]).

pub mod ast;
pub mod eval;
pub mod parse;
pub mod setexpr;
pub mod sites;
pub mod types;
pub mod upfun;

pub use ast::{FinType, Prim, Term};
pub use eval::{
    eval, eval_applied, eval_closed_nat, setexpr_to_upset, setexpr_to_upset_resolved, Oracles,
    QueryLog, UOracle, Value,
};
pub use parse::{parse_term, parse_type};
pub use setexpr::SetExpr;
pub use sites::collect_usites;
pub use types::{typecheck, typecheck_in};
pub use upfun::UpFun;
