//! Collection of the set expressions the ultrafilter constant is applied
//! to, in subterm order.

use crate::error::{Error, Result};

use super::ast::Term;
use super::setexpr::SetExpr;

/// Returns all distinct set expressions appearing as arguments of the
/// ultrafilter constant, ordered so that a site occurring inside another
/// site is listed first.  Every occurrence of the constant must be a direct
/// application to a set expression.
pub fn collect_usites(term: &Term) -> Result<Vec<SetExpr>> {
    let mut out = Vec::new();
    walk(term, &mut out)?;
    Ok(out)
}

fn walk(term: &Term, out: &mut Vec<SetExpr>) -> Result<()> {
    match term {
        Term::App(f, a) if **f == Term::U => {
            // inner sites first: the argument is traversed before the site
            // itself is recorded
            walk(a, out)?;
            let site = SetExpr::from_fn_term(a)?;
            if !out.contains(&site) {
                out.push(site);
            }
            Ok(())
        }
        Term::App(f, a) => {
            walk(f, out)?;
            walk(a, out)
        }
        Term::Lam(_, _, body) => walk(body, out),
        Term::U => Err(Error::NonUpArgument(
            "the ultrafilter constant must be applied directly to a set expression".into(),
        )),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::termlang::parse::parse_term;

    fn sites(text: &str) -> Vec<String> {
        collect_usites(&parse_term(text).unwrap())
            .unwrap()
            .iter()
            .map(|e| e.body().to_string())
            .collect()
    }

    #[test]
    fn single_site() {
        let found = sites("if (eq (U (lam j:0. mod j 2)) 0) 10 20");
        assert_eq!(found, vec!["mod j 2"]);
    }

    #[test]
    fn nested_site_is_listed_first() {
        let found = sites(
            "U (lam j:0. if (eq (U (lam i:0. mod i 2)) 0) (mod j 3) (mod j 5))",
        );
        assert_eq!(found.len(), 2);
        assert_eq!(found[0], "mod i 2".replace('i', "j"));
        assert!(found[1].contains("mod j 3"));
    }

    #[test]
    fn duplicate_sites_are_listed_once() {
        let found = sites("add (U (lam j:0. mod j 2)) (U (lam n:0. mod n 2))");
        assert_eq!(found, vec!["mod j 2"]);
    }

    #[test]
    fn unapplied_constant_is_rejected() {
        let err = collect_usites(&parse_term("(lam u:2. u (lam j:0. mod j 2)) U").unwrap())
            .unwrap_err();
        assert!(matches!(err, Error::NonUpArgument(_)));
    }

    #[test]
    fn sites_inside_closed_holes_are_collected() {
        let found = sites(
            "U (lam j:0. mod (add j (K 3 (lam y:0. if (eq (U (lam i:0. mod i 2)) 0) (mod y 2) 1))) 2)",
        );
        assert_eq!(found.len(), 2);
        assert_eq!(found[0], "mod j 2"); // the inner site, canonically renamed
    }

    #[test]
    fn ordering_respects_the_subterm_relation() {
        // the inner site of the second summand is the first site up to
        // renaming, so three occurrences collapse to two sites
        let text = "add (U (lam j:0. mod j 3)) (U (lam j:0. if (eq (U (lam i:0. mod i 3)) 0) (mod j 2) 1))";
        let found = collect_usites(&parse_term(text).unwrap()).unwrap();
        assert_eq!(found.len(), 2);
        // for every pair, a site whose application occurs inside another
        // site's body comes first
        for (i, inner) in found.iter().enumerate() {
            for outer in &found[i + 1..] {
                assert!(!contains_expr(inner.body(), outer));
            }
        }
    }

    fn contains_expr(haystack: &Term, needle: &SetExpr) -> bool {
        if let Term::App(f, a) = haystack {
            if **f == Term::U {
                if let Ok(e) = SetExpr::from_fn_term(a) {
                    if &e == needle {
                        return true;
                    }
                }
            }
            return contains_expr(f, needle) || contains_expr(a, needle);
        }
        if let Term::Lam(_, _, body) = haystack {
            return contains_expr(body, needle);
        }
        false
    }
}
