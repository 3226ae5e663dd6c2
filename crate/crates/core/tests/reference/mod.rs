//! A naive substitution-based interpreter and a random term generator.
//!
//! This interpreter is deliberately independent of the library's evaluator:
//! it performs textbook capture-free substitution on closed value terms and
//! unfolds the recursor through its defining equations as syntax, with its
//! own arithmetic.

use rand::rngs::StdRng;
use rand::Rng;

use upfilter::termlang::{FinType, Prim, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RefError {
    Overflow,
    OutOfGas,
    Stuck(String),
}

pub fn eval(term: &Term) -> Result<u64, RefError> {
    let mut gas: u64 = 10_000_000;
    match reduce(term, &mut gas)? {
        Term::Num(n) => Ok(n),
        other => Err(RefError::Stuck(format!("non-numeral value {other}"))),
    }
}

fn reduce(term: &Term, gas: &mut u64) -> Result<Term, RefError> {
    if *gas == 0 {
        return Err(RefError::OutOfGas);
    }
    *gas -= 1;
    match term {
        Term::Num(_) | Term::Lam(..) | Term::Prim(_) | Term::Rec => Ok(term.clone()),
        Term::Var(v) => Err(RefError::Stuck(format!("free variable {v}"))),
        Term::U | Term::K | Term::Mu => {
            Err(RefError::Stuck("oracle constant in an oracle-free term".into()))
        }
        Term::App(f, a) => {
            let fun = reduce(f, gas)?;
            let arg = reduce(a, gas)?;
            apply(fun, arg, gas)
        }
    }
}

fn apply(fun: Term, arg: Term, gas: &mut u64) -> Result<Term, RefError> {
    if let Term::Lam(param, _, body) = &fun {
        return reduce(&body.subst(param, &arg), gas);
    }
    let applied = Term::app(fun, arg);
    // reduce saturated primitive and recursor spines
    let (head, args) = spine(&applied);
    match head {
        Term::Prim(p) if args.len() == p.arity() => {
            let mut nats = Vec::with_capacity(args.len());
            for a in &args {
                match a {
                    Term::Num(n) => nats.push(*n),
                    other => return Err(RefError::Stuck(format!("prim argument {other}"))),
                }
            }
            prim_semantics(*p, &nats).map(Term::Num)
        }
        Term::Rec if args.len() == 3 => {
            let Term::Num(x) = &args[0] else {
                return Err(RefError::Stuck("recursor depth is not a numeral".into()));
            };
            if *x == 0 {
                return Ok(Term::Num(0));
            }
            let previous = Term::apps(
                Term::Rec,
                [Term::Num(x - 1), args[1].clone(), args[2].clone()],
            );
            let unfolded = Term::apps(args[2].clone(), [previous, Term::Num(x - 1)]);
            reduce(&unfolded, gas)
        }
        _ => Ok(applied),
    }
}

fn spine(term: &Term) -> (&Term, Vec<Term>) {
    let mut args = Vec::new();
    let mut head = term;
    while let Term::App(f, a) = head {
        args.push((**a).clone());
        head = f;
    }
    args.reverse();
    (head, args)
}

/// Independent arithmetic: the truth convention is 0.
fn prim_semantics(p: Prim, args: &[u64]) -> Result<u64, RefError> {
    let t = |b: bool| if b { 0 } else { 1 };
    Ok(match p {
        Prim::Succ => args[0].checked_add(1).ok_or(RefError::Overflow)?,
        Prim::Add => args[0].checked_add(args[1]).ok_or(RefError::Overflow)?,
        Prim::Monus => {
            if args[0] >= args[1] {
                args[0] - args[1]
            } else {
                0
            }
        }
        Prim::Mul => args[0].checked_mul(args[1]).ok_or(RefError::Overflow)?,
        Prim::Mod => {
            if args[1] == 0 {
                args[0]
            } else {
                args[0] % args[1]
            }
        }
        Prim::Eq => t(args[0] == args[1]),
        Prim::Lt => t(args[0] < args[1]),
        Prim::Le => t(args[0] <= args[1]),
        Prim::And => t(args[0] == 0 && args[1] == 0),
        Prim::Or => t(args[0] == 0 || args[1] == 0),
        Prim::Not => t(args[0] != 0),
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

const PRIMS: &[Prim] = &[
    Prim::Succ,
    Prim::Add,
    Prim::Monus,
    Prim::Mul,
    Prim::Mod,
    Prim::Eq,
    Prim::Lt,
    Prim::Le,
    Prim::And,
    Prim::Or,
    Prim::Not,
    Prim::Min,
    Prim::Max,
    Prim::Ifz,
];

/// A random closed, oracle-free term of type 0 (degree ≤ 1 subterms).
pub fn random_closed_term(rng: &mut StdRng) -> Term {
    let mut ctx = Vec::new();
    gen_nat(rng, 4, &mut ctx)
}

/// A random closed step function of type 0 -> 0 -> 0 for the recursor.
pub fn random_step_function(rng: &mut StdRng) -> Term {
    let mut ctx = vec![
        ("p".to_string(), FinType::Nat),
        ("i".to_string(), FinType::Nat),
    ];
    let body = gen_nat(rng, 2, &mut ctx);
    Term::lam(
        "p",
        FinType::Nat,
        Term::lam("i", FinType::Nat, body),
    )
}

fn gen_nat(rng: &mut StdRng, depth: u32, ctx: &mut Vec<(String, FinType)>) -> Term {
    let nat_vars: Vec<String> = ctx
        .iter()
        .filter(|(_, t)| *t == FinType::Nat)
        .map(|(v, _)| v.clone())
        .collect();
    if depth == 0 || rng.gen_bool(0.25) {
        if !nat_vars.is_empty() && rng.gen_bool(0.5) {
            return Term::var(nat_vars[rng.gen_range(0..nat_vars.len())].clone());
        }
        return Term::Num(rng.gen_range(0..=20));
    }
    match rng.gen_range(0..10u32) {
        0..=4 => {
            let p = PRIMS[rng.gen_range(0..PRIMS.len())];
            let args = (0..p.arity()).map(|_| gen_nat(rng, depth - 1, ctx));
            Term::apps(Term::Prim(p), args.collect::<Vec<_>>())
        }
        5 | 6 => {
            // beta redex with a fresh numeral variable
            let var = format!("v{}", ctx.len());
            ctx.push((var.clone(), FinType::Nat));
            let body = gen_nat(rng, depth - 1, ctx);
            ctx.pop();
            let arg = gen_nat(rng, depth - 1, ctx);
            Term::app(Term::lam(var, FinType::Nat, body), arg)
        }
        7 => {
            // a function value applied: (lam f:1. f arg) (lam x:0. body)
            let fvar = format!("f{}", ctx.len());
            let xvar = format!("x{}", ctx.len() + 1);
            ctx.push((xvar.clone(), FinType::Nat));
            let body = gen_nat(rng, depth - 1, ctx);
            ctx.pop();
            let arg = gen_nat(rng, depth - 1, ctx);
            let applied = Term::app(Term::var(fvar.clone()), arg);
            Term::app(
                Term::lam(fvar, FinType::one(), applied),
                Term::lam(xvar, FinType::Nat, body),
            )
        }
        _ => {
            // bounded recursion with a literal depth
            let x = rng.gen_range(0..=6u64);
            let y = gen_nat(rng, depth - 1, ctx);
            let pvar = format!("p{}", ctx.len());
            let ivar = format!("i{}", ctx.len() + 1);
            ctx.push((pvar.clone(), FinType::Nat));
            ctx.push((ivar.clone(), FinType::Nat));
            let step_body = gen_nat(rng, depth - 1, ctx);
            ctx.pop();
            ctx.pop();
            let step = Term::lam(pvar, FinType::Nat, Term::lam(ivar, FinType::Nat, step_body));
            Term::apps(Term::Rec, [Term::Num(x), y, step])
        }
    }
}
