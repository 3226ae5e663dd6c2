//! Type checking and degree computation.

use crate::error::{Error, Result};

use super::ast::{FinType, Term};

/// Infers the type of a term in the given context (innermost binding last).
pub fn typecheck_in(term: &Term, ctx: &mut Vec<(String, FinType)>) -> Result<FinType> {
    match term {
        Term::Var(name) => ctx
            .iter()
            .rev()
            .find(|(v, _)| v == name)
            .map(|(_, t)| t.clone())
            .ok_or_else(|| Error::UnboundVariable(name.clone())),
        Term::Num(_) => Ok(FinType::Nat),
        Term::Prim(p) => Ok(p.ty()),
        // rec x y z with x, y : 0 and z : 0 -> 0 -> 0
        Term::Rec => Ok(FinType::arrow(
            FinType::Nat,
            FinType::arrow(
                FinType::Nat,
                FinType::arrow(
                    FinType::arrow(FinType::Nat, FinType::one()),
                    FinType::Nat,
                ),
            ),
        )),
        Term::U | Term::Mu => Ok(FinType::two()),
        Term::K => Ok(FinType::arrow(FinType::Nat, FinType::two())),
        Term::Lam(var, ty, body) => {
            ctx.push((var.clone(), ty.clone()));
            let body_ty = typecheck_in(body, ctx);
            ctx.pop();
            Ok(FinType::arrow(ty.clone(), body_ty?))
        }
        Term::App(fun, arg) => {
            let fun_ty = typecheck_in(fun, ctx)?;
            let arg_ty = typecheck_in(arg, ctx)?;
            match fun_ty {
                FinType::Arrow(expected, res) => {
                    if *expected == arg_ty {
                        Ok(*res)
                    } else {
                        Err(Error::TypeMismatch {
                            expected: expected.to_string(),
                            found: format!("{arg_ty} in argument `{arg}`"),
                        })
                    }
                }
                other => Err(Error::TypeMismatch {
                    expected: "a function type".into(),
                    found: format!("{other} in `{fun}`"),
                }),
            }
        }
    }
}

/// Infers the type of a closed term.
pub fn typecheck(term: &Term) -> Result<FinType> {
    typecheck_in(term, &mut Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::termlang::parse::parse_term;

    #[test]
    fn identity_has_type_one_degree_one() {
        let t = parse_term("lam x:0. x").unwrap();
        let ty = typecheck(&t).unwrap();
        assert_eq!(ty, FinType::one());
        assert_eq!(ty.degree(), 1);
        assert_eq!(ty.to_string(), "0 -> 0");
    }

    #[test]
    fn ultrafilter_constant_is_type_two() {
        let ty = typecheck(&Term::U).unwrap();
        assert_eq!(ty, FinType::two());
        assert_eq!(ty.degree(), 2);
    }

    #[test]
    fn numeral_applied_to_numeral_is_rejected() {
        let t = parse_term("(0 0)").unwrap();
        assert!(matches!(
            typecheck(&t),
            Err(Error::TypeMismatch { .. })
        ));
    }

    #[test]
    fn argument_mismatch_reports_expected_and_actual() {
        let t = parse_term("S (lam x:0. x)").unwrap();
        let err = typecheck(&t).unwrap_err();
        match err {
            Error::TypeMismatch { expected, found } => {
                assert_eq!(expected, "0");
                assert!(found.contains("0 -> 0"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn recursor_fully_applied_is_nat() {
        let t = parse_term("rec 3 0 (lam p:0. lam i:0. S p)").unwrap();
        assert_eq!(typecheck(&t).unwrap(), FinType::Nat);
    }

    #[test]
    fn unbound_variable_is_reported() {
        let t = parse_term("add x 1").unwrap();
        assert_eq!(typecheck(&t), Err(Error::UnboundVariable("x".into())));
    }

    #[test]
    fn degrees() {
        assert_eq!(FinType::Nat.degree(), 0);
        assert_eq!(FinType::one().degree(), 1);
        assert_eq!(FinType::two().degree(), 2);
        // K : 0 -> (0 -> 0) -> 0 has degree 2
        assert_eq!(typecheck(&Term::K).unwrap().degree(), 2);
    }
}
