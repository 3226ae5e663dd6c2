//! Bounded search, the filter-based search functional, and the canonical
//! choice functional.
//!
//! `mu_search` is the explicit bounded search operator.  `mu_via_filter`
//! derives the same answers through a partial ultrafilter: from a certified
//! zero set it builds the set of points strictly above the first zero,
//! extends the filter by it and reads the existence of a zero off the
//! membership verdict.  `k_prime` returns the least element of a set above a
//! bound, with 0 in the empty case.

use std::fmt;
use std::sync::Arc;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::pfilter::PartialFilter;
use crate::upset::UPSet;

/// Default search bound used when a function carries no certificate.
pub const DEFAULT_MU_BOUND: u64 = 1 << 16;

/// A total function ℕ → ℕ, optionally with a claimed zero set.
#[derive(Clone)]
pub struct SearchableFn {
    evaluator: Arc<dyn Fn(u64) -> u64 + Send + Sync>,
    certificate: Option<UPSet>,
}

impl fmt::Debug for SearchableFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SearchableFn(certificate: {:?})", self.certificate)
    }
}

impl SearchableFn {
    pub fn new(evaluator: impl Fn(u64) -> u64 + Send + Sync + 'static) -> Self {
        SearchableFn {
            evaluator: Arc::new(evaluator),
            certificate: None,
        }
    }

    pub fn with_certificate(
        evaluator: impl Fn(u64) -> u64 + Send + Sync + 'static,
        certificate: UPSet,
    ) -> Self {
        SearchableFn {
            evaluator: Arc::new(evaluator),
            certificate: Some(certificate),
        }
    }

    /// The 0/1 indicator of a set, certified by construction: value 0 on
    /// members, 1 elsewhere.
    pub fn from_zero_set(zeros: &UPSet) -> Self {
        let z = zeros.clone();
        SearchableFn {
            evaluator: Arc::new(move |x| if z.member(x) { 0 } else { 1 }),
            certificate: Some(zeros.clone()),
        }
    }

    pub fn eval(&self, x: u64) -> u64 {
        (self.evaluator)(x)
    }

    pub fn certificate(&self) -> Option<&UPSet> {
        self.certificate.as_ref()
    }

    /// Samples the certificate over two full periods past its threshold.
    /// Sampling cannot prove the certificate but refutes wrong ones.
    pub fn check_certificate(&self) -> Result<&UPSet> {
        let cert = self.certificate.as_ref().ok_or(Error::CertificateMissing)?;
        let bound = cert.threshold() + 2 * cert.period();
        for x in 0..bound {
            let claimed = cert.member(x);
            let value = self.eval(x);
            if claimed != (value == 0) {
                return Err(Error::CertificateMismatch {
                    input: x,
                    claimed_member: claimed,
                    value,
                });
            }
        }
        Ok(cert)
    }
}

/// Least `x < bound` with `f(x) = 0`, if any.  Absence means "no zero below
/// the bound", not "no zero".
pub fn mu_search(f: &SearchableFn, bound: u64) -> Option<u64> {
    (0..bound).find(|&x| f.eval(x) == 0)
}

/// Decides `∃x f(x) = 0` through the filter and returns the least witness.
///
/// The set of points strictly above the first zero is cofinite when a zero
/// exists and empty otherwise, so its membership verdict in any extension of
/// the filter is forced either way.  The returned filter has that set in its
/// algebra.
pub fn mu_via_filter(
    f: &SearchableFn,
    filter: &PartialFilter,
    config: &Config,
) -> Result<(Option<u64>, PartialFilter)> {
    let cert = f.check_certificate()?;
    let above_first_zero = match cert.min_element() {
        Some(m) => UPSet::tail_from(m + 1),
        None => UPSet::empty(),
    };
    let extended = filter.extend(std::slice::from_ref(&above_first_zero), config)?;
    if extended.contains(&above_first_zero)? {
        // A zero exists below threshold + period of the certificate.
        let bound = cert.threshold() + cert.period();
        let witness = (0..bound)
            .find(|&x| f.eval(x) == 0)
            .ok_or_else(|| Error::Internal("certified zero not found below the bound".into()))?;
        Ok((Some(witness), extended))
    } else {
        Ok((None, extended))
    }
}

/// Least element of `x` strictly above `n`, or 0 when none exists.
pub fn k_prime(n: u64, x: &UPSet) -> u64 {
    x.least_above(n).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn evens() -> UPSet {
        UPSet::from_residues(2, [0]).unwrap()
    }

    fn odds() -> UPSet {
        UPSet::from_residues(2, [1]).unwrap()
    }

    #[test]
    fn mu_search_examples() {
        let f = SearchableFn::new(|x| x.abs_diff(5));
        assert_eq!(mu_search(&f, 100), Some(5));
        let one = SearchableFn::new(|_| 1);
        assert_eq!(mu_search(&one, 1000), None);
        let g = SearchableFn::new(|x| if x % 7 == 3 { 0 } else { 1 });
        assert_eq!(mu_search(&g, 100), Some(3));
    }

    #[test]
    fn mu_via_filter_with_periodic_zero_set() {
        let zeros = UPSet::residue_class(3, 7).unwrap();
        let f = SearchableFn::from_zero_set(&zeros);
        let (result, filter) =
            mu_via_filter(&f, &PartialFilter::trivial(), &Config::default()).unwrap();
        assert_eq!(result, Some(3));
        // the constructed set {x ≥ 4} is cofinite hence in the filter
        assert_eq!(filter.contains(&UPSet::tail_from(4)).unwrap(), true);
    }

    #[test]
    fn mu_via_filter_empty_zero_set() {
        let f = SearchableFn::from_zero_set(&UPSet::empty());
        let (result, filter) =
            mu_via_filter(&f, &PartialFilter::trivial(), &Config::default()).unwrap();
        assert_eq!(result, None);
        assert_eq!(filter.contains(&UPSet::empty()).unwrap(), false);
    }

    #[test]
    fn mu_via_filter_singleton_zero_set() {
        let f = SearchableFn::from_zero_set(&UPSet::finite([5]));
        let (result, _) =
            mu_via_filter(&f, &PartialFilter::trivial(), &Config::default()).unwrap();
        assert_eq!(result, Some(5));
    }

    #[test]
    fn certificate_mismatch_detected() {
        let f = SearchableFn::with_certificate(|_| 1, evens());
        let err = f.check_certificate().unwrap_err();
        assert!(matches!(err, Error::CertificateMismatch { input: 0, .. }));
        assert_eq!(
            mu_via_filter(&f, &PartialFilter::trivial(), &Config::default()).unwrap_err(),
            err
        );
    }

    #[test]
    fn certificate_missing() {
        let f = SearchableFn::new(|_| 1);
        assert!(matches!(
            f.check_certificate(),
            Err(Error::CertificateMissing)
        ));
    }

    #[test]
    fn k_prime_examples() {
        assert_eq!(k_prime(3, &evens()), 4);
        assert_eq!(k_prime(10, &UPSet::empty()), 0);
        assert_eq!(k_prime(0, &odds()), 1);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_upset() -> impl Strategy<Value = UPSet> {
            (1u64..=12, 0u64..=16, any::<u16>(), any::<u16>()).prop_map(|(p, t, rb, eb)| {
                let residues = (0..p).filter(|&r| (rb >> r) & 1 == 1);
                let exceptions = (0..t).filter(|&e| (eb >> e) & 1 == 1);
                UPSet::from_parts(exceptions, t, p, residues).unwrap()
            })
        }

        proptest! {
            #[test]
            fn filter_route_agrees_with_search(zeros in arb_upset()) {
                let f = SearchableFn::from_zero_set(&zeros);
                let bound = zeros.threshold() + 2 * zeros.period();
                let direct = mu_search(&f, bound);
                let (via, _) =
                    mu_via_filter(&f, &PartialFilter::trivial(), &Config::default()).unwrap();
                prop_assert_eq!(via, direct);
            }

            #[test]
            fn k_prime_lands_above_and_inside(zeros in arb_upset(), n in 0u64..200) {
                prop_assume!(zeros.is_infinite());
                let k = k_prime(n, &zeros);
                prop_assert!(k > n);
                prop_assert!(zeros.member(k));
            }

            #[test]
            fn above_first_zero_is_upward_closed(zeros in arb_upset()) {
                let x_f = match zeros.min_element() {
                    Some(m) => UPSet::tail_from(m + 1),
                    None => UPSet::empty(),
                };
                if let Some(first) = x_f.min_element() {
                    for n in first..first + 50 {
                        prop_assert!(x_f.member(n));
                    }
                }
            }
        }
    }
}
