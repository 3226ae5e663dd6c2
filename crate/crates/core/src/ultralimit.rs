//! Ultralimits of eventually periodic sequences via nested dyadic level
//! sets.
//!
//! For a sequence with values in [0,1], the level sets at precision `k` are
//! the preimages of the half-open dyadic cells `[i/2^k, (i+1)/2^k)` for
//! `i ∈ {0, …, 2^k}`; the top cell captures the value 1 exactly.  They form
//! a finite partition of ℕ, so a partial ultrafilter selects exactly one
//! cell per level, the selected level sets are nested, and the k-th element
//! of the level-k set yields a witness subsequence with Cauchy rate 2^-k
//! (up to cell adjacency, a factor of 2).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::pfilter::PartialFilter;
use crate::rat::{serde_rational, serde_rational_vec};
use crate::upset::UPSet;

/// An eventually periodic sequence of rationals in [0,1].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSeq", into = "RawSeq")]
pub struct UPSeq {
    prefix: Vec<BigRational>,
    cycle: Vec<BigRational>,
}

#[derive(Serialize, Deserialize)]
struct RawSeq {
    #[serde(default, with = "serde_rational_vec")]
    prefix: Vec<BigRational>,
    #[serde(with = "serde_rational_vec")]
    cycle: Vec<BigRational>,
}

impl TryFrom<RawSeq> for UPSeq {
    type Error = Error;

    fn try_from(raw: RawSeq) -> Result<UPSeq> {
        UPSeq::new(raw.prefix, raw.cycle)
    }
}

impl From<UPSeq> for RawSeq {
    fn from(seq: UPSeq) -> RawSeq {
        RawSeq {
            prefix: seq.prefix,
            cycle: seq.cycle,
        }
    }
}

impl UPSeq {
    pub fn new(prefix: Vec<BigRational>, cycle: Vec<BigRational>) -> Result<UPSeq> {
        if cycle.is_empty() {
            return Err(Error::InvalidSequence("cycle must be nonempty".into()));
        }
        for v in prefix.iter().chain(&cycle) {
            if v.is_negative() || v > &BigRational::one() {
                return Err(Error::InvalidSequence(format!(
                    "value {v} is outside [0,1]"
                )));
            }
        }
        Ok(UPSeq { prefix, cycle })
    }

    pub fn constant(value: BigRational) -> Result<UPSeq> {
        UPSeq::new(Vec::new(), vec![value])
    }

    pub fn prefix(&self) -> &[BigRational] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[BigRational] {
        &self.cycle
    }

    pub fn value(&self, n: u64) -> &BigRational {
        let len = self.prefix.len() as u64;
        if n < len {
            &self.prefix[n as usize]
        } else {
            &self.cycle[((n - len) % self.cycle.len() as u64) as usize]
        }
    }

    /// Distinct values of the sequence, ascending.
    pub fn distinct_values(&self) -> Vec<BigRational> {
        let mut values: Vec<BigRational> = self.prefix.iter().chain(&self.cycle).cloned().collect();
        values.sort();
        values.dedup();
        values
    }

    /// Values attained infinitely often: exactly the cycle values.
    pub fn cluster_values(&self) -> Vec<BigRational> {
        let mut values: Vec<BigRational> = self.cycle.clone();
        values.sort();
        values.dedup();
        values
    }

    /// The positions where the sequence attains exactly `value`.
    pub fn value_class(&self, value: &BigRational) -> UPSet {
        self.positions_where(|v| v == value)
    }

    fn positions_where(&self, pred: impl Fn(&BigRational) -> bool) -> UPSet {
        let len = self.prefix.len() as u64;
        let cycle_len = self.cycle.len() as u64;
        let exceptions = (0..len).filter(|&n| pred(self.value(n)));
        // residues are classes of n mod cycle_len for n ≥ len
        let residues = (0..cycle_len).filter(|&r| {
            let n = len + (r + cycle_len - len % cycle_len) % cycle_len;
            pred(self.value(n))
        });
        UPSet::from_parts(exceptions, len, cycle_len, residues)
            .expect("sequence classes are well-formed")
    }
}

/// The dyadic cell index of a value at precision `k`: `floor(v · 2^k)`.
/// Values in [0,1] land in `{0, …, 2^k}`, the top index exactly at 1.
fn cell_index(value: &BigRational, k: u32) -> u64 {
    let scaled = value * BigRational::from_integer(BigInt::one() << k);
    scaled.floor().to_integer().to_u64().expect("cell index fits")
}

fn cell_bounds(index: u64, k: u32) -> (BigRational, BigRational) {
    let denom = BigInt::one() << k;
    (
        BigRational::new(BigInt::from(index), denom.clone()),
        BigRational::new(BigInt::from(index + 1), denom),
    )
}

/// The level sets `A_{i,k}` for `i ∈ {0, …, 2^k}`, pairwise disjoint with
/// union ℕ.  Intended for small `k`; the ultralimit iteration itself only
/// materializes nonempty cells.
pub fn level_sets(seq: &UPSeq, k: u32, config: &Config) -> Result<Vec<UPSet>> {
    if k > config.k_max {
        return Err(Error::PrecisionCap {
            requested: k,
            cap: config.k_max,
        });
    }
    Ok((0..=(1u64 << k))
        .map(|i| seq.positions_where(|v| cell_index(v, k) == i))
        .collect())
}

/// A half-open dyadic interval `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "serde_rational")]
    pub lo: BigRational,
    #[serde(with = "serde_rational")]
    pub hi: BigRational,
}

impl Interval {
    pub fn contains(&self, v: &BigRational) -> bool {
        v >= &self.lo && v < &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }
}

/// One level of the dyadic selection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelRecord {
    pub level: u32,
    /// Chosen cell index f(k).
    pub chosen_cell: u64,
    pub cell: Interval,
    /// The selected level set A_{f(k),k}.
    pub level_set: UPSet,
    /// Witness index g(k): the k-th element of the selected level set.
    pub witness_index: u64,
    #[serde(with = "serde_rational")]
    pub witness_value: BigRational,
    /// Filter after this level's selection.
    pub filter: PartialFilter,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DyadicTrace {
    pub levels: Vec<LevelRecord>,
}

/// Computes the ultralimit of `seq` with respect to `filter` at dyadic
/// precision `k`.
///
/// The filter is first extended by the sequence's value classes (ascending
/// by value), after which every level's partition selection is decided
/// inside the algebra and adds no generators.  Returns the level-k cell
/// containing the ultralimit, the trace with nesting verified, and the
/// extended filter.
pub fn ultralimit(
    seq: &UPSeq,
    k: u32,
    filter: &PartialFilter,
    config: &Config,
) -> Result<(Interval, DyadicTrace, PartialFilter)> {
    if k > config.k_max {
        return Err(Error::PrecisionCap {
            requested: k,
            cap: config.k_max,
        });
    }
    let values = seq.distinct_values();
    let classes: Vec<UPSet> = values.iter().map(|v| seq.value_class(v)).collect();
    let mut filter = filter.extend(&classes, config)?;

    let mut levels: Vec<LevelRecord> = Vec::with_capacity(k as usize + 1);
    for level in 0..=k {
        // Nonempty cells at this level, ascending by cell index; together
        // they are the level-set partition with empty cells dropped.
        let mut cells: Vec<(u64, UPSet)> = Vec::new();
        for (value, class) in values.iter().zip(&classes) {
            let index = cell_index(value, level);
            match cells.last_mut() {
                Some((last, set)) if *last == index => {
                    *set = set.union(class)?;
                }
                _ => cells.push((index, class.clone())),
            }
        }
        let parts: Vec<UPSet> = cells.iter().map(|(_, s)| s.clone()).collect();
        let (selected, extended) = filter.select_from_partition(&parts, config)?;
        filter = extended;
        let (chosen_cell, level_set) = (cells[selected].0, cells[selected].1.clone());

        if let Some(previous) = levels.last() {
            if !level_set.subset(&previous.level_set) {
                return Err(Error::Internal(format!(
                    "level {level} set is not nested in level {}",
                    previous.level
                )));
            }
        }

        let witness_index = level_set.kth_element(level as u64)?;
        let witness_value = seq.value(witness_index).clone();
        let (lo, hi) = cell_bounds(chosen_cell, level);
        levels.push(LevelRecord {
            level,
            chosen_cell,
            cell: Interval { lo, hi },
            level_set,
            witness_index,
            witness_value,
            filter: filter.clone(),
        });
    }
    let interval = levels.last().expect("at least one level").cell.clone();
    Ok((interval, DyadicTrace { levels }, filter))
}

/// The witness subsequence `(g(k), x_{g(k)})` of a trace, with each value
/// checked to lie in its level's cell.
pub fn subsequence_witness(trace: &DyadicTrace, seq: &UPSeq) -> Result<Vec<(u64, BigRational)>> {
    let mut out = Vec::with_capacity(trace.levels.len());
    for record in &trace.levels {
        let value = seq.value(record.witness_index).clone();
        if !record.cell.contains(&value) {
            return Err(Error::Internal(format!(
                "witness value {value} escapes the level-{} cell",
                record.level
            )));
        }
        out.push((record.witness_index, value));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn evens() -> UPSet {
        UPSet::from_residues(2, [0]).unwrap()
    }

    fn cfg() -> Config {
        Config::default()
    }

    fn alternating() -> UPSeq {
        UPSeq::new(vec![], vec![rat(0, 1), rat(1, 1)]).unwrap()
    }

    #[test]
    fn rejects_values_outside_unit_interval() {
        assert!(UPSeq::new(vec![], vec![rat(3, 2)]).is_err());
        assert!(UPSeq::new(vec![], vec![]).is_err());
        assert!(UPSeq::new(vec![rat(-1, 2)], vec![rat(0, 1)]).is_err());
    }

    #[test]
    fn level_sets_alternating() {
        let sets = level_sets(&alternating(), 1, &cfg()).unwrap();
        assert_eq!(sets.len(), 3);
        assert_eq!(sets[0], evens());
        assert_eq!(sets[1], UPSet::empty());
        assert_eq!(sets[2], evens().complement());
    }

    #[test]
    fn level_sets_constant_third() {
        let seq = UPSeq::constant(rat(1, 3)).unwrap();
        let sets = level_sets(&seq, 1, &cfg()).unwrap();
        assert_eq!(sets[0], UPSet::universe());
        assert_eq!(sets[1], UPSet::empty());
        assert_eq!(sets[2], UPSet::empty());
    }

    #[test]
    fn level_sets_three_values_are_residue_classes() {
        let seq = UPSeq::new(vec![], vec![rat(0, 1), rat(1, 2), rat(1, 1)]).unwrap();
        let sets = level_sets(&seq, 1, &cfg()).unwrap();
        assert_eq!(sets[0], UPSet::residue_class(0, 3).unwrap());
        assert_eq!(sets[1], UPSet::residue_class(1, 3).unwrap());
        assert_eq!(sets[2], UPSet::residue_class(2, 3).unwrap());
    }

    #[test]
    fn ultralimit_alternating_with_evens_core() {
        let filter = PartialFilter::trivial().extend(&[evens()], &cfg()).unwrap();
        for k in 0..=12u32 {
            let (interval, trace, _) = ultralimit(&alternating(), k, &filter, &cfg()).unwrap();
            assert!(interval.contains(&rat(0, 1)), "k={k}");
            assert_eq!(
                interval.width(),
                BigRational::new(1.into(), BigInt::from(1) << k)
            );
            for record in &trace.levels {
                assert_eq!(record.chosen_cell, 0);
                assert_eq!(record.witness_index, 2 * record.level as u64);
                assert_eq!(record.witness_value, rat(0, 1));
            }
        }
    }

    #[test]
    fn ultralimit_eventually_constant_is_forced() {
        let seq = UPSeq::new(vec![rat(1, 1), rat(1, 2)], vec![rat(1, 3)]).unwrap();
        for tiebreak in [crate::config::TieBreak::Bit0, crate::config::TieBreak::ComplementFirst] {
            let config = Config { tiebreak, ..cfg() };
            let (interval, _, _) =
                ultralimit(&seq, 8, &PartialFilter::trivial(), &config).unwrap();
            assert!(interval.contains(&rat(1, 3)));
        }
    }

    #[test]
    fn ultralimit_follows_the_filter_core() {
        let seq = UPSeq::new(vec![], vec![rat(0, 1), rat(1, 2), rat(1, 1)]).unwrap();
        let core = UPSet::residue_class(1, 3).unwrap();
        let filter = PartialFilter::trivial().extend(&[core], &cfg()).unwrap();
        let (interval, trace, _) = ultralimit(&seq, 6, &filter, &cfg()).unwrap();
        assert!(interval.contains(&rat(1, 2)));
        let witness = subsequence_witness(&trace, &seq).unwrap();
        // cells separate the three values from level 1 on
        for (level, (_, value)) in witness.iter().enumerate() {
            if level >= 1 {
                assert_eq!(value, &rat(1, 2));
            }
        }
    }

    #[test]
    fn witness_of_constant_sequence_is_constant() {
        let seq = UPSeq::constant(rat(2, 7)).unwrap();
        let (_, trace, _) = ultralimit(&seq, 10, &PartialFilter::trivial(), &cfg()).unwrap();
        let witness = subsequence_witness(&trace, &seq).unwrap();
        assert_eq!(witness.len(), 11);
        for (_, value) in witness {
            assert_eq!(value, rat(2, 7));
        }
    }

    #[test]
    fn nesting_holds_level_by_level() {
        let seq = UPSeq::new(
            vec![rat(1, 2)],
            vec![rat(1, 4), rat(3, 4), rat(1, 4), rat(0, 1)],
        )
        .unwrap();
        let (_, trace, _) = ultralimit(&seq, 9, &PartialFilter::trivial(), &cfg()).unwrap();
        for i in 0..trace.levels.len() {
            for j in (i + 1)..trace.levels.len() {
                assert!(trace.levels[j].level_set.subset(&trace.levels[i].level_set));
            }
        }
    }

    #[test]
    fn precision_cap_enforced() {
        let err = ultralimit(&alternating(), 25, &PartialFilter::trivial(), &cfg()).unwrap_err();
        assert_eq!(err, Error::PrecisionCap { requested: 25, cap: 24 });
    }

    #[test]
    fn top_cell_captures_value_one() {
        let seq = UPSeq::constant(rat(1, 1)).unwrap();
        let sets = level_sets(&seq, 3, &cfg()).unwrap();
        assert_eq!(sets[8], UPSet::universe());
        let (interval, _, _) = ultralimit(&seq, 5, &PartialFilter::trivial(), &cfg()).unwrap();
        assert!(interval.contains(&rat(1, 1)));
    }

    #[test]
    fn serde_seq_round_trip() {
        let json = r#"{"prefix": ["1", "1/2"], "cycle": ["1/3"]}"#;
        let seq: UPSeq = serde_json::from_str(json).unwrap();
        assert_eq!(seq.value(0), &rat(1, 1));
        assert_eq!(seq.value(5), &rat(1, 3));
        let back = serde_json::to_string(&seq).unwrap();
        let again: UPSeq = serde_json::from_str(&back).unwrap();
        assert_eq!(seq, again);
    }
}
