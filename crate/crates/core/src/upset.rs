//! Ultimately periodic subsets of ℕ in canonical form.
//!
//! A [`UPSet`] stores membership below a threshold explicitly and membership
//! at or above the threshold as a set of residues modulo a period.  All
//! constructors canonicalize: the period is the minimal period of the residue
//! word and the threshold is the least point from which the periodic rule
//! already describes the set.  Two values denote the same subset of ℕ if and
//! only if they are field-identical, which makes equality, inclusion and
//! infinitude decidable.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Cap on the period of a constructed set (after lcm of the operands).
pub const PERIOD_CAP: u64 = 1_000_000;

/// Cap on thresholds produced by derived constructions (set expressions).
pub const THRESHOLD_CAP: u64 = 1_000_000;

/// An ultimately periodic subset of ℕ.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UPSet {
    exceptions: BTreeSet<u64>,
    threshold: u64,
    period: u64,
    residues: BTreeSet<u64>,
}

impl UPSet {
    /// Builds a set from raw parts and canonicalizes it.
    ///
    /// `exceptions` lists the members below `threshold`; for `n >= threshold`
    /// membership is `(n % period) ∈ residues`.
    pub fn from_parts(
        exceptions: impl IntoIterator<Item = u64>,
        threshold: u64,
        period: u64,
        residues: impl IntoIterator<Item = u64>,
    ) -> Result<Self> {
        if period == 0 {
            return Err(Error::InvalidSet("period must be at least 1".into()));
        }
        if period > PERIOD_CAP {
            return Err(Error::PeriodOverflow {
                period: period as u128,
                cap: PERIOD_CAP,
            });
        }
        let exceptions: BTreeSet<u64> = exceptions.into_iter().collect();
        let residues: BTreeSet<u64> = residues.into_iter().collect();
        if let Some(&e) = exceptions.iter().find(|&&e| e >= threshold) {
            return Err(Error::InvalidSet(format!(
                "exception {e} is not below the threshold {threshold}"
            )));
        }
        if let Some(&r) = residues.iter().find(|&&r| r >= period) {
            return Err(Error::InvalidSet(format!(
                "residue {r} is not below the period {period}"
            )));
        }
        let mut set = UPSet {
            exceptions,
            threshold,
            period,
            residues,
        };
        set.canonicalize();
        Ok(set)
    }

    /// The empty set.
    pub fn empty() -> Self {
        UPSet {
            exceptions: BTreeSet::new(),
            threshold: 0,
            period: 1,
            residues: BTreeSet::new(),
        }
    }

    /// All of ℕ.
    pub fn universe() -> Self {
        UPSet {
            exceptions: BTreeSet::new(),
            threshold: 0,
            period: 1,
            residues: [0].into_iter().collect(),
        }
    }

    /// The finite set with exactly the given elements.
    pub fn finite(elements: impl IntoIterator<Item = u64>) -> Self {
        let exceptions: BTreeSet<u64> = elements.into_iter().collect();
        let threshold = exceptions.iter().next_back().map_or(0, |&m| m + 1);
        let mut set = UPSet {
            exceptions,
            threshold,
            period: 1,
            residues: BTreeSet::new(),
        };
        set.canonicalize();
        set
    }

    /// `{ n : n ≡ r (mod m) }`.
    pub fn residue_class(r: u64, m: u64) -> Result<Self> {
        UPSet::from_parts([], 0, m, [r % m.max(1)])
    }

    /// `{ n : n mod m ∈ residues }`.
    pub fn from_residues(m: u64, residues: impl IntoIterator<Item = u64>) -> Result<Self> {
        UPSet::from_parts([], 0, m, residues)
    }

    /// `{ n : n ≥ start }`.
    pub fn tail_from(start: u64) -> Self {
        let mut set = UPSet {
            exceptions: BTreeSet::new(),
            threshold: start,
            period: 1,
            residues: [0].into_iter().collect(),
        };
        set.canonicalize();
        set
    }

    pub fn exceptions(&self) -> &BTreeSet<u64> {
        &self.exceptions
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn residues(&self) -> &BTreeSet<u64> {
        &self.residues
    }

    fn canonicalize(&mut self) {
        // Minimal period: smallest divisor d of the period such that residue
        // membership depends only on the class modulo d.
        if self.residues.is_empty() {
            self.period = 1;
        } else {
            let p = self.period;
            for d in divisors(p) {
                if (0..p).all(|r| self.residues.contains(&r) == self.residues.contains(&(r % d))) {
                    self.residues.retain(|&r| r < d);
                    self.period = d;
                    break;
                }
            }
        }
        // Minimal threshold: absorb the top exceptions that already agree
        // with the periodic rule.
        while self.threshold > 0 {
            let n = self.threshold - 1;
            let periodic = self.residues.contains(&(n % self.period));
            let listed = self.exceptions.contains(&n);
            if periodic == listed {
                self.exceptions.remove(&n);
                self.threshold = n;
            } else {
                break;
            }
        }
    }

    pub fn member(&self, n: u64) -> bool {
        if n < self.threshold {
            self.exceptions.contains(&n)
        } else {
            self.residues.contains(&(n % self.period))
        }
    }

    pub fn is_empty(&self) -> bool {
        self.exceptions.is_empty() && self.residues.is_empty()
    }

    /// In canonical form a set is infinite exactly when it has residues.
    pub fn is_infinite(&self) -> bool {
        !self.residues.is_empty()
    }

    /// Number of elements, if finite.
    pub fn cardinality(&self) -> Option<u64> {
        if self.is_infinite() {
            None
        } else {
            Some(self.exceptions.len() as u64)
        }
    }

    pub fn complement(&self) -> UPSet {
        let mut set = UPSet {
            exceptions: (0..self.threshold)
                .filter(|&n| !self.exceptions.contains(&n))
                .collect(),
            threshold: self.threshold,
            period: self.period,
            residues: (0..self.period)
                .filter(|r| !self.residues.contains(r))
                .collect(),
        };
        set.canonicalize();
        set
    }

    fn combine(&self, other: &UPSet, op: impl Fn(bool, bool) -> bool) -> Result<UPSet> {
        let period = (self.period as u128).lcm(&(other.period as u128));
        if period > PERIOD_CAP as u128 {
            return Err(Error::PeriodOverflow {
                period,
                cap: PERIOD_CAP,
            });
        }
        let period = period as u64;
        let threshold = self.threshold.max(other.threshold);
        let mut set = UPSet {
            exceptions: (0..threshold)
                .filter(|&n| op(self.member(n), other.member(n)))
                .collect(),
            threshold,
            period,
            residues: (0..period)
                .filter(|&r| {
                    op(
                        self.residues.contains(&(r % self.period)),
                        other.residues.contains(&(r % other.period)),
                    )
                })
                .collect(),
        };
        set.canonicalize();
        Ok(set)
    }

    pub fn intersect(&self, other: &UPSet) -> Result<UPSet> {
        self.combine(other, |a, b| a && b)
    }

    pub fn union(&self, other: &UPSet) -> Result<UPSet> {
        self.combine(other, |a, b| a || b)
    }

    /// Set difference `self ∖ other`.
    pub fn minus(&self, other: &UPSet) -> Result<UPSet> {
        self.combine(other, |a, b| a && !b)
    }

    /// Decides `self ⊆ other` without materializing an intersection, so it
    /// never overflows the period cap.
    pub fn subset(&self, other: &UPSet) -> bool {
        let threshold = self.threshold.max(other.threshold);
        if (0..threshold).any(|n| self.member(n) && !other.member(n)) {
            return false;
        }
        // Tails: the class { n ≡ r (mod p_self), n ≥ threshold } meets the
        // classes r' ≡ r (mod gcd) of the other period.
        let g = self.period.gcd(&other.period);
        for &r in &self.residues {
            let mut rp = r % g;
            while rp < other.period {
                if !other.residues.contains(&rp) {
                    return false;
                }
                rp += g;
            }
        }
        true
    }

    /// Decides `self ∩ other = ∅` without materializing an intersection.
    pub fn disjoint(&self, other: &UPSet) -> bool {
        let threshold = self.threshold.max(other.threshold);
        if (0..threshold).any(|n| self.member(n) && other.member(n)) {
            return false;
        }
        let g = self.period.gcd(&other.period);
        for &r in &self.residues {
            let mut rp = r % g;
            while rp < other.period {
                if other.residues.contains(&rp) {
                    return false;
                }
                rp += g;
            }
        }
        true
    }

    /// Least element, if any.
    pub fn min_element(&self) -> Option<u64> {
        let from_exceptions = self.exceptions.iter().next().copied();
        let from_tail = self
            .residues
            .iter()
            .map(|&r| first_at_least(self.threshold, r, self.period))
            .min();
        match (from_exceptions, from_tail) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    /// The `(k+1)`-st smallest member (0-based `k`).
    pub fn kth_element(&self, k: u64) -> Result<u64> {
        let exc_count = self.exceptions.len() as u64;
        if k < exc_count {
            return Ok(*self.exceptions.iter().nth(k as usize).expect("in range"));
        }
        if self.residues.is_empty() {
            return Err(Error::NotEnoughElements {
                index: k,
                cardinality: exc_count,
            });
        }
        let m = k - exc_count;
        let window: Vec<u64> = (self.threshold..self.threshold + self.period)
            .filter(|&n| self.residues.contains(&(n % self.period)))
            .collect();
        let q = m / window.len() as u64;
        let r = (m % window.len() as u64) as usize;
        q.checked_mul(self.period)
            .and_then(|offset| window[r].checked_add(offset))
            .ok_or(Error::Overflow("kth_element"))
    }

    /// Least member strictly above `n`, if any.
    pub fn least_above(&self, n: u64) -> Option<u64> {
        let start = n.checked_add(1)?;
        let from_exceptions = self.exceptions.range(start..).next().copied();
        let tail_start = start.max(self.threshold);
        let from_tail = self
            .residues
            .iter()
            .map(|&r| first_at_least(tail_start, r, self.period))
            .min();
        match (from_exceptions, from_tail) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    /// A bound below which pointwise agreement decides equality of the two
    /// sets: `max(thresholds) + lcm(periods)`.
    pub fn decision_bound(&self, other: &UPSet) -> u128 {
        self.threshold.max(other.threshold) as u128
            + (self.period as u128).lcm(&(other.period as u128))
    }
}

/// Least `x ≥ start` with `x ≡ r (mod p)`.
fn first_at_least(start: u64, r: u64, p: u64) -> u64 {
    let rem = start % p;
    start + (r + p - rem) % p
}

/// Divisors of `n` in ascending order.
fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

impl fmt::Debug for UPSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "UPSet({:?}, t={}, p={}, res={:?})",
            self.exceptions, self.threshold, self.period, self.residues
        )
    }
}

impl fmt::Display for UPSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "{{}}");
        }
        let mut parts = Vec::new();
        if !self.exceptions.is_empty() {
            let elems: Vec<String> = self.exceptions.iter().map(|e| e.to_string()).collect();
            parts.push(format!("{{{}}}", elems.join(",")));
        }
        if !self.residues.is_empty() {
            let res: Vec<String> = self.residues.iter().map(|r| r.to_string()).collect();
            parts.push(format!(
                "{{n ≥ {} : n mod {} ∈ {{{}}}}}",
                self.threshold,
                self.period,
                res.join(",")
            ));
        }
        write!(f, "{}", parts.join(" ∪ "))
    }
}

#[derive(Serialize, Deserialize)]
struct RawUpSet {
    #[serde(default)]
    exceptions: Vec<u64>,
    #[serde(default)]
    threshold: u64,
    period: u64,
    #[serde(default)]
    residues: Vec<u64>,
}

impl Serialize for UPSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RawUpSet {
            exceptions: self.exceptions.iter().copied().collect(),
            threshold: self.threshold,
            period: self.period,
            residues: self.residues.iter().copied().collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for UPSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawUpSet::deserialize(deserializer)?;
        UPSet::from_parts(raw.exceptions, raw.threshold, raw.period, raw.residues)
            .map_err(|e| D::Error::custom(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn evens() -> UPSet {
        UPSet::from_residues(2, [0]).unwrap()
    }

    pub(crate) fn odds() -> UPSet {
        UPSet::from_residues(2, [1]).unwrap()
    }

    fn mult(m: u64) -> UPSet {
        UPSet::from_residues(m, [0]).unwrap()
    }

    /// Brute-force membership table on `[0, bound)`.
    fn table(s: &UPSet, bound: u64) -> Vec<bool> {
        (0..bound).map(|n| s.member(n)).collect()
    }

    #[test]
    fn member_examples() {
        assert!(evens().member(4));
        assert!(!evens().member(7));
        assert!(UPSet::finite([1, 2, 3]).member(3));
        assert!(!UPSet::finite([1, 2, 3]).member(4));
    }

    #[test]
    fn complement_examples() {
        assert_eq!(evens().complement(), odds());
        assert_eq!(UPSet::universe().complement(), UPSet::empty());
        // complement of multiples of 3 agrees with residues {1,2} mod 3
        let c = mult(3).complement();
        let expected = UPSet::from_residues(3, [1, 2]).unwrap();
        assert_eq!(c, expected);
        for n in 0..200 {
            assert_eq!(c.member(n), !mult(3).member(n));
        }
    }

    #[test]
    fn intersect_union_examples() {
        let i = evens().intersect(&mult(3)).unwrap();
        assert_eq!(i, mult(6));
        for n in 0..200 {
            assert_eq!(i.member(n), evens().member(n) && mult(3).member(n));
        }
        let s = UPSet::from_parts([1, 4], 6, 3, [2]).unwrap();
        assert_eq!(s.intersect(&UPSet::universe()).unwrap(), s);
        assert_eq!(evens().union(&odds()).unwrap(), UPSet::universe());
    }

    #[test]
    fn equality_collapses_representations() {
        let a = UPSet::from_residues(2, [0]).unwrap();
        let b = UPSet::from_residues(4, [0, 2]).unwrap();
        assert_eq!(a, b);
        let c = UPSet::from_parts([0, 2, 4], 5, 2, [1]).unwrap();
        // {0,2,4} ∪ {n ≥ 5 odd}: not reducible below threshold 5
        assert_eq!(c.threshold(), 5);
    }

    #[test]
    fn infinitude_and_subset() {
        assert!(!UPSet::finite([1, 2, 3]).is_infinite());
        assert!(evens().is_infinite());
        assert!(mult(6).subset(&evens()));
        assert!(!evens().subset(&mult(6)));
        for n in 0..200u64 {
            if mult(6).member(n) {
                assert!(evens().member(n));
            }
        }
    }

    #[test]
    fn kth_and_least_above() {
        assert_eq!(evens().kth_element(3).unwrap(), 6);
        assert_eq!(evens().least_above(3), Some(4));
        assert_eq!(UPSet::empty().least_above(10), None);
        assert_eq!(odds().least_above(0), Some(1));
        let fin = UPSet::finite([2, 5]);
        assert_eq!(fin.kth_element(1).unwrap(), 5);
        assert_eq!(
            fin.kth_element(2),
            Err(Error::NotEnoughElements {
                index: 2,
                cardinality: 2
            })
        );
    }

    #[test]
    fn tail_and_min() {
        let t = UPSet::tail_from(5);
        assert!(!t.member(4));
        assert!(t.member(5));
        assert_eq!(t.min_element(), Some(5));
        assert_eq!(UPSet::empty().min_element(), None);
        assert_eq!(UPSet::from_parts([3], 4, 7, [2]).unwrap().min_element(), Some(3));
    }

    #[test]
    fn rejects_malformed_parts() {
        assert!(UPSet::from_parts([], 0, 0, []).is_err());
        assert!(UPSet::from_parts([5], 3, 2, []).is_err());
        assert!(UPSet::from_parts([], 0, 2, [2]).is_err());
    }

    #[test]
    fn period_cap_enforced() {
        let a = UPSet::from_residues(999_983, [1]).unwrap(); // prime close to the cap
        let b = UPSet::from_residues(2, [1]).unwrap();
        assert!(matches!(
            a.intersect(&b),
            Err(Error::PeriodOverflow { .. })
        ));
        // subset and disjoint stay total
        let _ = a.subset(&b);
        let _ = a.disjoint(&b);
    }

    #[test]
    fn serde_round_trip_canonicalizes() {
        let json = r#"{"exceptions": [], "threshold": 0, "period": 4, "residues": [0, 2]}"#;
        let s: UPSet = serde_json::from_str(json).unwrap();
        assert_eq!(s, evens());
        let back = serde_json::to_string(&s).unwrap();
        let s2: UPSet = serde_json::from_str(&back).unwrap();
        assert_eq!(s, s2);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        prop_compose! {
            pub(crate) fn arb_upset()(
                period in 1u64..=24,
                threshold in 0u64..=32,
                resbits in proptest::collection::vec(any::<bool>(), 24),
                excbits in proptest::collection::vec(any::<bool>(), 32),
            ) -> UPSet {
                let residues = (0..period).filter(|&r| resbits[r as usize]);
                let exceptions = (0..threshold).filter(|&e| excbits[e as usize]);
                UPSet::from_parts(exceptions, threshold, period, residues).unwrap()
            }
        }

        const BOUND: u64 = 256;

        proptest! {
            #[test]
            fn boolean_laws_match_bitvectors(a in arb_upset(), b in arb_upset(), c in arb_upset()) {
                let ta = table(&a, BOUND);
                let tb = table(&b, BOUND);
                let i = a.intersect(&b).unwrap();
                let u = a.union(&b).unwrap();
                for n in 0..BOUND as usize {
                    prop_assert_eq!(i.member(n as u64), ta[n] && tb[n]);
                    prop_assert_eq!(u.member(n as u64), ta[n] || tb[n]);
                }
                // De Morgan, double complement, distributivity
                prop_assert_eq!(a.intersect(&b).unwrap().complement(),
                                a.complement().union(&b.complement()).unwrap());
                prop_assert_eq!(a.union(&b).unwrap().complement(),
                                a.complement().intersect(&b.complement()).unwrap());
                prop_assert_eq!(a.complement().complement(), a.clone());
                prop_assert_eq!(a.intersect(&b).unwrap(), b.intersect(&a).unwrap());
                prop_assert_eq!(
                    a.intersect(&b.union(&c).unwrap()).unwrap(),
                    a.intersect(&b).unwrap().union(&a.intersect(&c).unwrap()).unwrap()
                );
                prop_assert_eq!(
                    a.union(&b).unwrap().union(&c).unwrap(),
                    a.union(&b.union(&c).unwrap()).unwrap()
                );
            }

            #[test]
            fn canonicalization_is_idempotent(a in arb_upset()) {
                let again = UPSet::from_parts(
                    a.exceptions().iter().copied(),
                    a.threshold(),
                    a.period(),
                    a.residues().iter().copied(),
                ).unwrap();
                prop_assert_eq!(&again, &a);
            }

            #[test]
            fn equality_is_pointwise_agreement(a in arb_upset(), b in arb_upset()) {
                let bound = a.decision_bound(&b) as u64;
                let pointwise = (0..bound).all(|n| a.member(n) == b.member(n));
                prop_assert_eq!(a == b, pointwise);
            }

            #[test]
            fn subset_matches_brute_force(a in arb_upset(), b in arb_upset()) {
                let bound = a.decision_bound(&b) as u64;
                let brute = (0..bound).all(|n| !a.member(n) || b.member(n));
                prop_assert_eq!(a.subset(&b), brute);
                let empty_meet = a.intersect(&b.complement()).unwrap().is_empty();
                prop_assert_eq!(a.subset(&b), empty_meet);
            }

            #[test]
            fn disjoint_matches_brute_force(a in arb_upset(), b in arb_upset()) {
                let bound = a.decision_bound(&b) as u64;
                let brute = (0..bound).all(|n| !(a.member(n) && b.member(n)));
                prop_assert_eq!(a.disjoint(&b), brute);
            }

            #[test]
            fn infinitude_is_element_above_bound(a in arb_upset()) {
                let bound = a.threshold() + a.period();
                prop_assert_eq!(a.is_infinite(), a.least_above(bound).is_some());
            }

            #[test]
            fn kth_element_scans(a in arb_upset(), k in 0u64..40) {
                let scan = (0..10_000u64).filter(|&n| a.member(n)).nth(k as usize);
                match a.kth_element(k) {
                    Ok(v) => prop_assert_eq!(Some(v), scan),
                    Err(_) => prop_assert_eq!(scan, None),
                }
            }

            #[test]
            fn least_above_scans(a in arb_upset(), n in 0u64..300) {
                let scan = ((n + 1)..10_000u64).find(|&m| a.member(m));
                let via = a.least_above(n);
                if a.is_infinite() {
                    prop_assert_eq!(via, scan);
                } else {
                    prop_assert_eq!(via, a.exceptions().range((n+1)..).next().copied());
                }
            }
        }
    }
}
