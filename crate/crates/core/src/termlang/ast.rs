//! Abstract syntax and types of the term language.
//!
//! Types are built from the base type `0` of naturals by the function-space
//! constructor; `1` abbreviates `0 -> 0` and `2` abbreviates `(0 -> 0) -> 0`.
//! Terms are a lambda calculus over numerals with the primitive recursor,
//! first-order arithmetic primitives, and the three oracle constants: the
//! ultrafilter `U`, the choice functional `K`, and the search functional
//! `mu`.

use std::fmt;

use crate::error::{Error, Result};

/// A finite type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FinType {
    /// The type of natural numbers.
    Nat,
    /// `Arrow(arg, res)`: functions from `arg` to `res`.
    Arrow(Box<FinType>, Box<FinType>),
}

impl FinType {
    pub fn arrow(arg: FinType, res: FinType) -> FinType {
        FinType::Arrow(Box::new(arg), Box::new(res))
    }

    /// Type `1` = `0 -> 0`.
    pub fn one() -> FinType {
        FinType::arrow(FinType::Nat, FinType::Nat)
    }

    /// Type `2` = `(0 -> 0) -> 0`.
    pub fn two() -> FinType {
        FinType::arrow(FinType::one(), FinType::Nat)
    }

    /// deg(0) = 0, deg(res(arg)) = max(deg res, deg arg + 1).
    pub fn degree(&self) -> u32 {
        match self {
            FinType::Nat => 0,
            FinType::Arrow(arg, res) => res.degree().max(arg.degree() + 1),
        }
    }
}

impl fmt::Display for FinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FinType::Nat => write!(f, "0"),
            FinType::Arrow(arg, res) => {
                match **arg {
                    FinType::Nat => write!(f, "0")?,
                    _ => write!(f, "({arg})")?,
                }
                write!(f, " -> {res}")
            }
        }
    }
}

/// First-order primitives.  All of them take and return naturals; the
/// boolean-valued ones follow the convention that 0 means true.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Prim {
    /// Successor.
    Succ,
    Add,
    /// Truncated subtraction.
    Monus,
    Mul,
    /// `mod x 0 = x`, keeping the operation total.
    Mod,
    Eq,
    Lt,
    Le,
    And,
    Or,
    Not,
    Min,
    Max,
    /// `ifz c a b`: `a` when `c = 0`, else `b`.
    Ifz,
}

impl Prim {
    pub fn name(self) -> &'static str {
        match self {
            Prim::Succ => "S",
            Prim::Add => "add",
            Prim::Monus => "sub",
            Prim::Mul => "mul",
            Prim::Mod => "mod",
            Prim::Eq => "eq",
            Prim::Lt => "lt",
            Prim::Le => "le",
            Prim::And => "and",
            Prim::Or => "or",
            Prim::Not => "not",
            Prim::Min => "min",
            Prim::Max => "max",
            Prim::Ifz => "if",
        }
    }

    pub fn from_name(name: &str) -> Option<Prim> {
        Some(match name {
            "S" => Prim::Succ,
            "add" => Prim::Add,
            "sub" => Prim::Monus,
            "mul" => Prim::Mul,
            "mod" => Prim::Mod,
            "eq" => Prim::Eq,
            "lt" => Prim::Lt,
            "le" => Prim::Le,
            "and" => Prim::And,
            "or" => Prim::Or,
            "not" => Prim::Not,
            "min" => Prim::Min,
            "max" => Prim::Max,
            "if" => Prim::Ifz,
            _ => return None,
        })
    }

    pub fn arity(self) -> usize {
        match self {
            Prim::Succ | Prim::Not => 1,
            Prim::Ifz => 3,
            _ => 2,
        }
    }

    pub fn ty(self) -> FinType {
        let mut t = FinType::Nat;
        for _ in 0..self.arity() {
            t = FinType::arrow(FinType::Nat, t);
        }
        t
    }

    /// Total semantics on naturals; overflow is reported, not wrapped.
    pub fn apply(self, args: &[u64]) -> Result<u64> {
        debug_assert_eq!(args.len(), self.arity());
        let truth = |b: bool| if b { 0 } else { 1 };
        Ok(match self {
            Prim::Succ => args[0].checked_add(1).ok_or(Error::Overflow("S"))?,
            Prim::Add => args[0].checked_add(args[1]).ok_or(Error::Overflow("add"))?,
            Prim::Monus => args[0].saturating_sub(args[1]),
            Prim::Mul => args[0].checked_mul(args[1]).ok_or(Error::Overflow("mul"))?,
            Prim::Mod => {
                if args[1] == 0 {
                    args[0]
                } else {
                    args[0] % args[1]
                }
            }
            Prim::Eq => truth(args[0] == args[1]),
            Prim::Lt => truth(args[0] < args[1]),
            Prim::Le => truth(args[0] <= args[1]),
            Prim::And => truth(args[0] == 0 && args[1] == 0),
            Prim::Or => truth(args[0] == 0 || args[1] == 0),
            Prim::Not => truth(args[0] != 0),
            Prim::Min => args[0].min(args[1]),
            Prim::Max => args[0].max(args[1]),
            Prim::Ifz => {
                if args[0] == 0 {
                    args[1]
                } else {
                    args[2]
                }
            }
        })
    }
}

/// A term of the language.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Num(u64),
    Prim(Prim),
    /// The recursor: `rec 0 y z = 0`, `rec (x+1) y z = z (rec x y z) x`.
    Rec,
    /// The ultrafilter constant, type `(0 -> 0) -> 0`.
    U,
    /// The choice constant, type `0 -> (0 -> 0) -> 0`.
    K,
    /// The search constant, type `(0 -> 0) -> 0`.
    Mu,
    Lam(String, FinType, Box<Term>),
    App(Box<Term>, Box<Term>),
}

impl Term {
    pub fn lam(var: impl Into<String>, ty: FinType, body: Term) -> Term {
        Term::Lam(var.into(), ty, Box::new(body))
    }

    pub fn app(f: Term, arg: Term) -> Term {
        Term::App(Box::new(f), Box::new(arg))
    }

    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    /// Free variables, in order of first occurrence.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        match self {
            Term::Var(name) => {
                if !bound.iter().any(|b| b == name) && !out.iter().any(|o| o == name) {
                    out.push(name.clone());
                }
            }
            Term::Lam(var, _, body) => {
                bound.push(var.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            Term::App(f, a) => {
                f.collect_free(bound, out);
                a.collect_free(bound, out);
            }
            _ => {}
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Substitutes a closed term for a free variable, respecting shadowing.
    pub fn subst(&self, name: &str, replacement: &Term) -> Term {
        debug_assert!(replacement.is_closed(), "substitution must be closed");
        match self {
            Term::Var(v) if v == name => replacement.clone(),
            Term::Lam(var, ty, body) if var != name => {
                Term::lam(var.clone(), ty.clone(), body.subst(name, replacement))
            }
            Term::App(f, a) => Term::app(f.subst(name, replacement), a.subst(name, replacement)),
            other => other.clone(),
        }
    }

    /// Renames a free variable, respecting shadowing.
    pub fn rename_free(&self, from: &str, to: &str) -> Term {
        match self {
            Term::Var(v) if v == from => Term::var(to),
            Term::Lam(var, ty, body) if var != from => {
                Term::lam(var.clone(), ty.clone(), body.rename_free(from, to))
            }
            Term::App(f, a) => Term::app(f.rename_free(from, to), a.rename_free(from, to)),
            other => other.clone(),
        }
    }

    /// True when `name` occurs as a bound variable anywhere in the term.
    pub fn binds(&self, name: &str) -> bool {
        match self {
            Term::Lam(var, _, body) => var == name || body.binds(name),
            Term::App(f, a) => f.binds(name) || a.binds(name),
            _ => false,
        }
    }

    fn needs_parens_as_arg(&self) -> bool {
        matches!(self, Term::App(..) | Term::Lam(..))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(name) => write!(f, "{name}"),
            Term::Num(n) => write!(f, "{n}"),
            Term::Prim(p) => write!(f, "{}", p.name()),
            Term::Rec => write!(f, "rec"),
            Term::U => write!(f, "U"),
            Term::K => write!(f, "K"),
            Term::Mu => write!(f, "mu"),
            Term::Lam(var, ty, body) => write!(f, "lam {var}:{ty}. {body}"),
            Term::App(fun, arg) => {
                match **fun {
                    Term::Lam(..) => write!(f, "({fun})")?,
                    _ => write!(f, "{fun}")?,
                }
                if arg.needs_parens_as_arg() {
                    write!(f, " ({arg})")
                } else {
                    write!(f, " {arg}")
                }
            }
        }
    }
}
