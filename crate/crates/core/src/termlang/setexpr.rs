//! The restricted set-expression sublanguage fed to the ultrafilter.
//!
//! A [`SetExpr`] is a type-1 function term with one distinguished numeral
//! variable `j`, restricted to numerals, `j`, addition, truncated
//! subtraction, multiplication with a constant side, reduction modulo a
//! constant, comparisons, boolean connectives, `min`/`max`, the conditional,
//! and closed subterms (which evaluate to numerals; closed subterms may
//! contain the oracle constants and are resolved through them).  Under the
//! convention that value 0 means membership, every such expression denotes
//! an ultimately periodic set, produced exactly via [`UpFun`].

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::upset::UPSet;

use super::ast::{FinType, Prim, Term};
use super::parse::parse_term;
use super::types::typecheck_in;
use super::upfun::UpFun;

/// Canonical name of the distinguished variable.
pub const SET_VAR: &str = "j";

/// A validated set expression: the body of `lam j:0. body`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetExpr {
    body: Term,
}

impl SetExpr {
    /// Builds a set expression from a closed function term of type `0 -> 0`,
    /// either a lambda or a combinator-style function (which is
    /// eta-expanded).  The body is renamed to the canonical variable and
    /// validated against the grammar.
    pub fn from_fn_term(term: &Term) -> Result<SetExpr> {
        let free = term.free_vars();
        if !free.is_empty() {
            return Err(Error::NonUpArgument(format!(
                "set argument `{term}` has free variables {free:?}"
            )));
        }
        let mut ctx = Vec::new();
        let ty = typecheck_in(term, &mut ctx)?;
        if ty != FinType::one() {
            return Err(Error::NonUpArgument(format!(
                "set argument `{term}` has type {ty}, expected 0 -> 0"
            )));
        }
        let body = match term {
            Term::Lam(var, _, body) => body.rename_free(var, SET_VAR),
            other => Term::app(other.clone(), Term::var(SET_VAR)),
        };
        validate(&body)?;
        Ok(SetExpr { body })
    }

    /// Parses `text` as a function term and validates it.
    pub fn parse(text: &str) -> Result<SetExpr> {
        SetExpr::from_fn_term(&parse_term(text)?)
    }

    pub fn body(&self) -> &Term {
        &self.body
    }

    /// The function term `lam j:0. body`.
    pub fn as_lambda(&self) -> Term {
        Term::lam(SET_VAR, FinType::Nat, self.body.clone())
    }

    /// Converts the expression to the exact set `{ j : body(j) = 0 }`.
    ///
    /// `resolve_closed` is called on every maximal closed subterm (these may
    /// contain oracle constants) and must return its numeral value.
    pub fn to_upset_with(
        &self,
        resolve_closed: &mut dyn FnMut(&Term) -> Result<u64>,
    ) -> Result<UPSet> {
        build(&self.body, resolve_closed)?.zero_set()
    }
}

/// Grammar check: every subterm is closed (a hole producing a numeral), the
/// variable, a numeral, or an application of an arithmetic primitive with
/// the constant-side restrictions on `mul` and `mod`.
fn validate(term: &Term) -> Result<()> {
    if term.is_closed() {
        return Ok(());
    }
    match term {
        Term::Var(v) if v == SET_VAR => Ok(()),
        Term::App(..) => {
            let (head, args) = spine(term);
            let Term::Prim(prim) = head else {
                return Err(Error::NonUpArgument(format!(
                    "`{term}` is outside the set-expression grammar"
                )));
            };
            if args.len() != prim.arity() {
                return Err(Error::NonUpArgument(format!(
                    "`{term}` applies {} to {} arguments",
                    prim.name(),
                    args.len()
                )));
            }
            match prim {
                Prim::Mul => {
                    if !args[0].is_closed() && !args[1].is_closed() {
                        return Err(Error::NonUpArgument(format!(
                            "`{term}` multiplies two open expressions"
                        )));
                    }
                }
                Prim::Mod => {
                    if !args[1].is_closed() {
                        return Err(Error::NonUpArgument(format!(
                            "`{term}` reduces modulo an open expression"
                        )));
                    }
                }
                _ => {}
            }
            for arg in args {
                validate(arg)?;
            }
            Ok(())
        }
        other => Err(Error::NonUpArgument(format!(
            "`{other}` is outside the set-expression grammar"
        ))),
    }
}

/// Application spine: `f a b c` becomes `(f, [a, b, c])`.
fn spine(term: &Term) -> (&Term, Vec<&Term>) {
    let mut args = Vec::new();
    let mut head = term;
    while let Term::App(f, a) = head {
        args.push(&**a);
        head = f;
    }
    args.reverse();
    (head, args)
}

fn build(term: &Term, resolve: &mut dyn FnMut(&Term) -> Result<u64>) -> Result<UpFun> {
    if term.is_closed() {
        return Ok(UpFun::constant(resolve(term)?));
    }
    match term {
        Term::Var(v) if v == SET_VAR => Ok(UpFun::identity()),
        Term::App(..) => {
            let (head, args) = spine(term);
            let Term::Prim(prim) = head else {
                return Err(Error::NonUpArgument(format!("`{term}` cannot be built")));
            };
            match prim {
                Prim::Succ => build(args[0], resolve)?.add(&UpFun::constant(1)),
                Prim::Add => {
                    let a = build(args[0], resolve)?;
                    let b = build(args[1], resolve)?;
                    a.add(&b)
                }
                Prim::Monus => {
                    let a = build(args[0], resolve)?;
                    let b = build(args[1], resolve)?;
                    a.monus(&b)
                }
                Prim::Mul => {
                    if args[1].is_closed() {
                        let c = resolve(args[1])?;
                        build(args[0], resolve)?.scale(c)
                    } else {
                        let c = resolve(args[0])?;
                        build(args[1], resolve)?.scale(c)
                    }
                }
                Prim::Mod => {
                    let m = resolve(args[1])?;
                    build(args[0], resolve)?.mod_const(m)
                }
                Prim::Min => {
                    let a = build(args[0], resolve)?;
                    let b = build(args[1], resolve)?;
                    a.min(&b)
                }
                Prim::Max => {
                    let a = build(args[0], resolve)?;
                    let b = build(args[1], resolve)?;
                    a.max(&b)
                }
                // comparisons and connectives, with 0 as truth
                Prim::Eq => {
                    let a = build(args[0], resolve)?;
                    let b = build(args[1], resolve)?;
                    a.monus(&b)?.add(&b.monus(&a)?)?.sign()
                }
                Prim::Lt => {
                    let a = build(args[0], resolve)?;
                    let b = build(args[1], resolve)?;
                    UpFun::constant(1).monus(&b.monus(&a)?.sign()?)
                }
                Prim::Le => {
                    let a = build(args[0], resolve)?;
                    let b = build(args[1], resolve)?;
                    let b_plus_1 = b.add(&UpFun::constant(1))?;
                    UpFun::constant(1).monus(&b_plus_1.monus(&a)?.sign()?)
                }
                Prim::And => {
                    let a = build(args[0], resolve)?;
                    let b = build(args[1], resolve)?;
                    a.sign()?.add(&b.sign()?)?.sign()
                }
                Prim::Or => {
                    let a = build(args[0], resolve)?;
                    let b = build(args[1], resolve)?;
                    a.sign()?.min(&b.sign()?)
                }
                Prim::Not => {
                    let a = build(args[0], resolve)?;
                    UpFun::constant(1).monus(&a.sign()?)
                }
                Prim::Ifz => {
                    let c = build(args[0], resolve)?;
                    let t = build(args[1], resolve)?;
                    let e = build(args[2], resolve)?;
                    UpFun::ifz(&c, &t, &e)
                }
            }
        }
        other => Err(Error::NonUpArgument(format!("`{other}` cannot be built"))),
    }
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_lambda())
    }
}

impl Serialize for SetExpr {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SetExpr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        SetExpr::parse(&text).map_err(|e| D::Error::custom(e.to_string()))
    }
}
