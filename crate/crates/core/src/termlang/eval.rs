//! Call-by-value evaluation against pluggable oracles.
//!
//! Applications of the ultrafilter constant reify their argument back into a
//! set expression, convert it to an exact set (value 0 meaning membership,
//! so different characteristic functions of the same set collapse), and
//! query the oracle.  The choice constant resolves through the canonical
//! choice functional, and the search constant uses the exact zero set when
//! the argument is a set expression, falling back to bounded search.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::rc::Rc;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::mu::{k_prime, DEFAULT_MU_BOUND};
use crate::pfilter::PartialFilter;
use crate::upset::UPSet;

use super::ast::{FinType, Prim, Term};
use super::setexpr::SetExpr;

/// Oracle queries made during an evaluation, for traces.
#[derive(Debug, Clone, Default)]
pub struct QueryLog {
    /// Ultrafilter queries: the set and its verdict (0 = member).
    pub u: Vec<(UPSet, u64)>,
    /// Choice queries: bound, set, and result.
    pub k: Vec<(u64, UPSet, u64)>,
}

/// Source of verdicts for the ultrafilter constant.
#[derive(Debug, Clone)]
pub enum UOracle {
    /// Membership in a partial filter; sets outside its algebra error.
    Filter(PartialFilter),
    /// Total oracle: a set is in the filter iff it contains the core.
    Core(UPSet),
    /// Staged verdicts keyed by canonical set expression.
    BySite(BTreeMap<SetExpr, u64>),
}

/// The oracle bundle for evaluation.  The choice constant is always the
/// canonical least-element-above functional; the search constant uses the
/// exact zero-set route when possible and bounded search otherwise.
#[derive(Debug, Clone)]
pub struct Oracles {
    pub u: Option<UOracle>,
    /// Fallback bound for the search constant on non-set-expression
    /// arguments.
    pub mu_bound: u64,
    /// When set, every ultrafilter and choice query is recorded.
    pub log: Option<Rc<RefCell<QueryLog>>>,
}

impl Oracles {
    pub fn none() -> Oracles {
        Oracles {
            u: None,
            mu_bound: DEFAULT_MU_BOUND,
            log: None,
        }
    }

    pub fn with_filter(filter: PartialFilter) -> Oracles {
        Oracles {
            u: Some(UOracle::Filter(filter)),
            mu_bound: DEFAULT_MU_BOUND,
            log: None,
        }
    }

    pub fn with_core(core: UPSet) -> Oracles {
        Oracles {
            u: Some(UOracle::Core(core)),
            mu_bound: DEFAULT_MU_BOUND,
            log: None,
        }
    }

    pub fn by_site(verdicts: BTreeMap<SetExpr, u64>) -> Oracles {
        Oracles {
            u: Some(UOracle::BySite(verdicts)),
            mu_bound: DEFAULT_MU_BOUND,
            log: None,
        }
    }

    pub fn logged(mut self, log: Rc<RefCell<QueryLog>>) -> Oracles {
        self.log = Some(log);
        self
    }
}

#[derive(Debug, Clone)]
pub enum Value {
    Nat(u64),
    Fun(FunValue),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Head {
    Prim(Prim),
    Rec,
    U,
    K,
    Mu,
}

impl Head {
    fn arity(self) -> usize {
        match self {
            Head::Prim(p) => p.arity(),
            Head::Rec => 3,
            Head::U | Head::Mu => 1,
            Head::K => 2,
        }
    }

    fn term(self) -> Term {
        match self {
            Head::Prim(p) => Term::Prim(p),
            Head::Rec => Term::Rec,
            Head::U => Term::U,
            Head::K => Term::K,
            Head::Mu => Term::Mu,
        }
    }
}

#[derive(Debug, Clone)]
pub enum FunValue {
    Closure {
        param: String,
        param_ty: FinType,
        body: Rc<Term>,
        env: Env,
    },
    Partial {
        head: Head,
        args: Vec<Value>,
    },
}

impl Value {
    pub fn as_nat(&self) -> Result<u64> {
        match self {
            Value::Nat(n) => Ok(*n),
            Value::Fun(_) => Err(Error::TypeMismatch {
                expected: "0".into(),
                found: "a function value".into(),
            }),
        }
    }

    /// Reads a value back into a closed term.
    pub fn reify(&self) -> Term {
        match self {
            Value::Nat(n) => Term::Num(*n),
            Value::Fun(FunValue::Partial { head, args }) => {
                Term::apps(head.term(), args.iter().map(Value::reify))
            }
            Value::Fun(FunValue::Closure {
                param,
                param_ty,
                body,
                env,
            }) => {
                let mut out: Term = (**body).clone();
                for name in body.free_vars() {
                    if &name == param {
                        continue;
                    }
                    let bound = env.lookup(&name).expect("closed program").reify();
                    out = out.subst(&name, &bound);
                }
                Term::lam(param.clone(), param_ty.clone(), out)
            }
        }
    }
}

/// Persistent environment.
#[derive(Debug, Clone, Default)]
pub struct Env(Option<Rc<EnvNode>>);

#[derive(Debug)]
struct EnvNode {
    name: String,
    value: Value,
    next: Env,
}

impl Env {
    pub fn empty() -> Env {
        Env(None)
    }

    fn push(&self, name: String, value: Value) -> Env {
        Env(Some(Rc::new(EnvNode {
            name,
            value,
            next: self.clone(),
        })))
    }

    fn lookup(&self, name: &str) -> Option<&Value> {
        let mut node = self.0.as_deref();
        while let Some(n) = node {
            if n.name == name {
                return Some(&n.value);
            }
            node = n.next.0.as_deref();
        }
        None
    }
}

struct EvalCtx<'a> {
    oracles: &'a Oracles,
    config: &'a Config,
    fuel: u64,
}

impl EvalCtx<'_> {
    fn tick(&mut self) -> Result<()> {
        if self.fuel == 0 {
            return Err(Error::FuelExhausted {
                budget: self.config.fuel,
            });
        }
        self.fuel -= 1;
        Ok(())
    }
}

/// Evaluates a closed term.
pub fn eval(term: &Term, oracles: &Oracles, config: &Config) -> Result<Value> {
    let mut ctx = EvalCtx {
        oracles,
        config,
        fuel: config.fuel,
    };
    eval_env(term, &Env::empty(), &mut ctx)
}

/// Evaluates a closed term of type 0 to its numeral value.
pub fn eval_closed_nat(term: &Term, oracles: &Oracles, config: &Config) -> Result<u64> {
    eval(term, oracles, config)?.as_nat()
}

/// Applies a closed term to numeral arguments and evaluates to a numeral.
pub fn eval_applied(
    term: &Term,
    args: &[u64],
    oracles: &Oracles,
    config: &Config,
) -> Result<u64> {
    let applied = Term::apps(term.clone(), args.iter().map(|&n| Term::Num(n)));
    eval_closed_nat(&applied, oracles, config)
}

fn eval_env(term: &Term, env: &Env, ctx: &mut EvalCtx) -> Result<Value> {
    ctx.tick()?;
    match term {
        Term::Num(n) => Ok(Value::Nat(*n)),
        Term::Var(name) => env
            .lookup(name)
            .cloned()
            .ok_or_else(|| Error::UnboundVariable(name.clone())),
        Term::Prim(p) => Ok(Value::Fun(FunValue::Partial {
            head: Head::Prim(*p),
            args: Vec::new(),
        })),
        Term::Rec => Ok(Value::Fun(FunValue::Partial {
            head: Head::Rec,
            args: Vec::new(),
        })),
        Term::U => Ok(Value::Fun(FunValue::Partial {
            head: Head::U,
            args: Vec::new(),
        })),
        Term::K => Ok(Value::Fun(FunValue::Partial {
            head: Head::K,
            args: Vec::new(),
        })),
        Term::Mu => Ok(Value::Fun(FunValue::Partial {
            head: Head::Mu,
            args: Vec::new(),
        })),
        Term::Lam(param, ty, body) => Ok(Value::Fun(FunValue::Closure {
            param: param.clone(),
            param_ty: ty.clone(),
            body: Rc::new((**body).clone()),
            env: env.clone(),
        })),
        Term::App(f, a) => {
            let fun = eval_env(f, env, ctx)?;
            let arg = eval_env(a, env, ctx)?;
            apply(fun, arg, ctx)
        }
    }
}

fn apply(fun: Value, arg: Value, ctx: &mut EvalCtx) -> Result<Value> {
    ctx.tick()?;
    match fun {
        Value::Nat(_) => Err(Error::TypeMismatch {
            expected: "a function".into(),
            found: "a numeral".into(),
        }),
        Value::Fun(FunValue::Closure {
            param, body, env, ..
        }) => eval_env(&body, &env.push(param, arg), ctx),
        Value::Fun(FunValue::Partial { head, mut args }) => {
            args.push(arg);
            if args.len() < head.arity() {
                return Ok(Value::Fun(FunValue::Partial { head, args }));
            }
            reduce(head, args, ctx)
        }
    }
}

fn reduce(head: Head, args: Vec<Value>, ctx: &mut EvalCtx) -> Result<Value> {
    match head {
        Head::Prim(prim) => {
            let nats: Vec<u64> = args.iter().map(Value::as_nat).collect::<Result<_>>()?;
            Ok(Value::Nat(prim.apply(&nats)?))
        }
        Head::Rec => {
            // rec 0 y z = 0; rec (x+1) y z = z (rec x y z) x
            let x = args[0].as_nat()?;
            let step = args[2].clone();
            let mut acc = Value::Nat(0);
            for i in 0..x {
                acc = apply(apply(step.clone(), acc, ctx)?, Value::Nat(i), ctx)?;
            }
            Ok(acc)
        }
        Head::U => {
            let expr = SetExpr::from_fn_term(&args[0].reify())?;
            query_u(&expr, ctx).map(Value::Nat)
        }
        Head::K => {
            let n = args[0].as_nat()?;
            let expr = SetExpr::from_fn_term(&args[1].reify())?;
            let set = expr_to_upset(&expr, ctx)?;
            let result = k_prime(n, &set);
            if let Some(log) = &ctx.oracles.log {
                log.borrow_mut().k.push((n, set, result));
            }
            Ok(Value::Nat(result))
        }
        Head::Mu => {
            match SetExpr::from_fn_term(&args[0].reify()) {
                Ok(expr) => {
                    let zeros = expr_to_upset(&expr, ctx)?;
                    Ok(Value::Nat(zeros.min_element().unwrap_or(0)))
                }
                // not a set expression: bounded search on the value itself
                Err(Error::NonUpArgument(_)) => {
                    let f = &args[0];
                    for x in 0..ctx.oracles.mu_bound {
                        if apply(f.clone(), Value::Nat(x), ctx)?.as_nat()? == 0 {
                            return Ok(Value::Nat(x));
                        }
                    }
                    Ok(Value::Nat(0))
                }
                Err(other) => Err(other),
            }
        }
    }
}

/// Verdict of the ultrafilter oracle on a set expression: 0 for membership.
fn query_u(expr: &SetExpr, ctx: &mut EvalCtx) -> Result<u64> {
    let (set, verdict) = match &ctx.oracles.u {
        None => return Err(Error::OracleUnavailable("the ultrafilter constant")),
        Some(UOracle::BySite(verdicts)) => {
            return verdicts
                .get(expr)
                .copied()
                .ok_or(Error::OracleUnavailable("an unresolved ultrafilter site"))
        }
        Some(UOracle::Filter(filter)) => {
            let set = expr_to_upset(expr, ctx)?;
            let verdict = if filter.contains(&set)? { 0 } else { 1 };
            (set, verdict)
        }
        Some(UOracle::Core(core)) => {
            let set = expr_to_upset(expr, ctx)?;
            let verdict = if core.subset(&set) { 0 } else { 1 };
            (set, verdict)
        }
    };
    if let Some(log) = &ctx.oracles.log {
        log.borrow_mut().u.push((set, verdict));
    }
    Ok(verdict)
}

/// Converts a set expression to its exact set, resolving closed subterms
/// (including nested oracle applications) through this evaluator.
fn expr_to_upset(expr: &SetExpr, ctx: &mut EvalCtx) -> Result<UPSet> {
    let oracles = ctx.oracles;
    let config = ctx.config;
    expr.to_upset_with(&mut |closed: &Term| {
        // fresh fuel per closed subterm; nesting depth is bounded by the
        // syntax tree
        eval_closed_nat(closed, oracles, config)
    })
}

/// Public form of the set-expression conversion: inner oracle applications
/// are resolved through the bundle.  With a `BySite` oracle this is the
/// staged resolution used by the elimination pipeline.
pub fn setexpr_to_upset(expr: &SetExpr, oracles: &Oracles, config: &Config) -> Result<UPSet> {
    let mut ctx = EvalCtx {
        oracles,
        config,
        fuel: config.fuel,
    };
    expr_to_upset(expr, &mut ctx)
}

/// Staged resolution against a verdict map, the shape used by the
/// elimination pipeline for one site at a time.
pub fn setexpr_to_upset_resolved(
    expr: &SetExpr,
    resolved: &BTreeMap<SetExpr, u64>,
    config: &Config,
) -> Result<UPSet> {
    setexpr_to_upset(expr, &Oracles::by_site(resolved.clone()), config)
}
