//! Partial non-principal ultrafilters on finitely generated algebras.
//!
//! A [`PartialFilter`] is a branch choice over the generators of an
//! [`Algebra`]: bit 0 keeps the generator, bit 1 its complement.  The core is
//! the atom selected by the branch, and a set of the algebra belongs to the
//! filter exactly when it contains the core.  On a finitely generated algebra
//! this is the unique ultrafilter extending the branch choices, and it makes
//! every axiom check quantifier-free.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{Algebra, AtomMask, Word};
use crate::config::{Config, TieBreak};
use crate::error::{Error, Result};
use crate::upset::UPSet;

/// Above this many atom-unions the axiom checker samples instead of
/// enumerating.
const FULL_ENUMERATION_LIMIT: u32 = 10;

/// Number of atom-unions sampled per clause when enumeration is infeasible.
const SAMPLE_SIZE: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialFilter {
    algebra: Algebra,
    branch: Word,
    core: UPSet,
}

impl PartialFilter {
    /// The partial ultrafilter on the trivial algebra {∅, ℕ}.
    pub fn trivial() -> PartialFilter {
        PartialFilter {
            algebra: Algebra::trivial(),
            branch: Word::empty(),
            core: UPSet::universe(),
        }
    }

    /// Builds a filter from an algebra and a branch word, requiring the
    /// selected atom to be infinite.
    pub fn new(algebra: Algebra, branch: Word) -> Result<PartialFilter> {
        if branch.len() != algebra.generators().len() {
            return Err(Error::InvalidFilter(format!(
                "branch word has length {}, algebra has {} generators",
                branch.len(),
                algebra.generators().len()
            )));
        }
        let core = algebra.atom(branch).clone();
        if !core.is_infinite() {
            return Err(Error::InvalidFilter(
                "the selected atom is not infinite".into(),
            ));
        }
        Ok(PartialFilter {
            algebra,
            branch,
            core,
        })
    }

    /// Builds a filter without checking that the core is infinite.
    ///
    /// Intended for loading externally produced filters so that
    /// [`PartialFilter::verify_axioms`] can report on them; operations that
    /// rely on a valid core reject such filters explicitly.
    pub fn from_branch_unchecked(algebra: Algebra, branch: Word) -> PartialFilter {
        assert_eq!(
            branch.len(),
            algebra.generators().len(),
            "branch word length must match the generator count"
        );
        let core = algebra.atom(branch).clone();
        PartialFilter {
            algebra,
            branch,
            core,
        }
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn branch(&self) -> Word {
        self.branch
    }

    /// The atom selected by the branch; every filter member contains it.
    pub fn core(&self) -> &UPSet {
        &self.core
    }

    /// Membership in the filter.  Errors with `NotInAlgebra` when the set is
    /// outside the span, mirroring the filter being partial.
    pub fn contains(&self, s: &UPSet) -> Result<bool> {
        if !self.algebra.contains_set(s) {
            return Err(Error::NotInAlgebra { index: None });
        }
        Ok(self.core.subset(s))
    }

    /// Extends the filter by new generators, choosing a branch bit per
    /// generator.  When both refinements of the core are infinite the
    /// configured tie-break decides; otherwise the infinite one is forced.
    ///
    /// Generators already in the span add no new sets and are skipped, so the
    /// atom map does not grow for them.  Every membership decided before the
    /// extension is unchanged afterwards.
    pub fn extend(&self, new_generators: &[UPSet], config: &Config) -> Result<PartialFilter> {
        if !self.core.is_infinite() {
            return Err(Error::InvalidFilter(
                "cannot extend a filter whose core is not infinite".into(),
            ));
        }
        let mut algebra = self.algebra.clone();
        let mut branch = self.branch;
        let mut core = self.core.clone();
        for g in new_generators {
            if algebra.contains_set(g) {
                continue;
            }
            if algebra.generators().len() + 1 > config.generator_cap {
                return Err(Error::GeneratorCap {
                    requested: algebra.generators().len() + 1,
                    cap: config.generator_cap,
                });
            }
            let inside = core.intersect(g)?;
            let outside = core.minus(g)?;
            // An infinite core splits into two parts, at least one infinite.
            let bit = match config.tiebreak {
                TieBreak::Bit0 => {
                    if inside.is_infinite() {
                        0
                    } else {
                        1
                    }
                }
                TieBreak::ComplementFirst => {
                    if outside.is_infinite() {
                        1
                    } else {
                        0
                    }
                }
            };
            core = if bit == 0 { inside } else { outside };
            debug_assert!(core.is_infinite());
            algebra = algebra.refine(g.clone())?;
            branch = branch.push(bit);
            debug_assert_eq!(algebra.atom(branch), &core);
        }
        Ok(PartialFilter {
            algebra,
            branch,
            core,
        })
    }

    /// Extends the filter so that all parts of the partition are in the
    /// algebra and returns the unique index whose part belongs to the
    /// extended filter.
    pub fn select_from_partition(
        &self,
        parts: &[UPSet],
        config: &Config,
    ) -> Result<(usize, PartialFilter)> {
        check_partition(parts)?;
        let extended = self.extend(parts, config)?;
        let mut selected = Vec::new();
        for (i, part) in parts.iter().enumerate() {
            if extended.contains(part)? {
                selected.push(i);
            }
        }
        match selected.as_slice() {
            [unique] => Ok((*unique, extended)),
            other => Err(Error::Internal(format!(
                "partition selection must be unique, found indices {other:?}"
            ))),
        }
    }

    /// Checks the relativized ultrafilter clauses over atom-unions of the
    /// algebra.  With at most 2^10 atom-unions the enumeration is exhaustive;
    /// above that, unions are sampled with the seed from the config.
    ///
    /// Membership of an atom-union is decided structurally: a nonempty core
    /// atom lies in a union of atoms exactly when its own atom is selected,
    /// and an empty core lies in every union.  A bounded number of verdicts
    /// is re-derived with real set operations to cross-check the two routes.
    pub fn verify_axioms(&self, config: &Config) -> AxiomReport {
        let atom_count = self.algebra.atom_count();
        let exhaustive = atom_count as u32 <= FULL_ENUMERATION_LIMIT;
        let masks: Vec<AtomMask> = if exhaustive {
            (0..(1usize << atom_count))
                .map(|bits| {
                    let mut mask = AtomMask::empty(atom_count);
                    for i in 0..atom_count {
                        if (bits >> i) & 1 == 1 {
                            mask.set(i);
                        }
                    }
                    mask
                })
                .collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let mut set = BTreeSet::new();
            set.insert(AtomMask::empty(atom_count));
            set.insert(AtomMask::full(atom_count));
            set.insert(AtomMask::singleton(atom_count, self.branch.index()));
            set.insert(AtomMask::singleton(atom_count, self.branch.index()).not());
            while set.len() < SAMPLE_SIZE {
                let mut mask = AtomMask::empty(atom_count);
                for i in 0..atom_count {
                    if rng.gen::<bool>() {
                        mask.set(i);
                    }
                }
                set.insert(mask);
            }
            set.into_iter().collect()
        };

        let mut report = AxiomReport {
            pass: true,
            atom_unions_checked: masks.len(),
            pairs_checked: 0,
            exhaustive,
            violation: None,
        };

        let core_empty = self.core.is_empty();
        let branch_index = self.branch.index();
        let verdict = |mask: &AtomMask| core_empty || mask.get(branch_index);

        let mut infinite_atoms = AtomMask::empty(atom_count);
        for (word, atom) in self.algebra.atoms() {
            if atom.is_infinite() {
                infinite_atoms.set(word.index());
            }
        }
        let infinite = |mask: &AtomMask| !mask.and(&infinite_atoms).is_empty();

        // Cross-check the structural verdicts against real set operations.
        let spot_checks = if exhaustive { masks.len() } else { 32 };
        for mask in masks.iter().take(spot_checks) {
            let union = match self.algebra.union_of_atoms(mask) {
                Ok(u) => u,
                Err(e) => return report.fail(0, format!("union failed: {e}")),
            };
            if self.core.subset(&union) != verdict(mask) {
                return report.fail(
                    0,
                    format!("structural verdict disagrees with subset check on {mask:?}"),
                );
            }
            if union.is_infinite() != infinite(mask) {
                return report.fail(
                    0,
                    format!("structural infinitude disagrees with the set on {mask:?}"),
                );
            }
        }

        // Clause 1 (complement dichotomy) and clause 4 (non-principality).
        for mask in &masks {
            let in_f = verdict(mask);
            let comp_in_f = verdict(&mask.not());
            if !in_f && !comp_in_f {
                return report.fail(1, format!("neither {mask:?} nor its complement is in F"));
            }
            if in_f && comp_in_f {
                return report.fail(1, format!("both {mask:?} and its complement are in F"));
            }
            if in_f && !infinite(mask) {
                return report.fail(4, format!("{mask:?} is in F but denotes a finite set"));
            }
        }

        // Clauses 2 and 3 over pairs.
        for s in &masks {
            for t in &masks {
                report.pairs_checked += 1;
                let meet = s.and(t);
                let s_in = verdict(s);
                let t_in = verdict(t);
                let meet_in = verdict(&meet);
                if meet_in && !t_in {
                    return report.fail(2, format!("{meet:?} ∈ F but {t:?} ∉ F"));
                }
                if s_in && t_in && !meet_in {
                    return report.fail(3, format!("{s:?},{t:?} ∈ F but their meet is not"));
                }
            }
        }
        report
    }

    /// Index-set export: the indices of the enumerated sets that belong to
    /// the filter, with the four index-level clauses checked over the
    /// enumeration.
    pub fn index_filter(&self, enumeration: &[UPSet]) -> Result<IndexFilterReport> {
        let mut members = BTreeSet::new();
        for (i, s) in enumeration.iter().enumerate() {
            if !self.algebra.contains_set(s) {
                return Err(Error::NotInAlgebra { index: Some(i) });
            }
            if self.core.subset(s) {
                members.insert(i);
            }
        }
        let mut violations = Vec::new();
        let n = enumeration.len();
        for i in 0..n {
            for j in 0..n {
                if enumeration[i] == enumeration[j].complement()
                    && !members.contains(&i)
                    && !members.contains(&j)
                {
                    violations.push(format!(
                        "complement pair ({i},{j}) has neither index in the filter"
                    ));
                }
                if enumeration[i].subset(&enumeration[j])
                    && members.contains(&i)
                    && !members.contains(&j)
                {
                    violations.push(format!("{i} ⊆ {j} with {i} in the filter but not {j}"));
                }
            }
        }
        for &i in &members {
            for &j in &members {
                for k in 0..n {
                    if enumeration[k] == enumeration[i].intersect(&enumeration[j])?
                        && !members.contains(&k)
                    {
                        violations.push(format!(
                            "intersection of {i} and {j} is listed at {k} but not in the filter"
                        ));
                    }
                }
            }
            if !enumeration[i].is_infinite() {
                violations.push(format!("{i} is in the filter but denotes a finite set"));
            }
        }
        Ok(IndexFilterReport {
            pass: violations.is_empty(),
            indices: members,
            violations,
        })
    }
}

/// Verifies that `parts` are pairwise disjoint and cover ℕ; on failure finds
/// a witness lying in zero or at least two parts.
fn check_partition(parts: &[UPSet]) -> Result<()> {
    for i in 0..parts.len() {
        for j in (i + 1)..parts.len() {
            if !parts[i].disjoint(&parts[j]) {
                let witness = parts[i]
                    .intersect(&parts[j])?
                    .min_element()
                    .expect("non-disjoint sets have a common element");
                let containing = parts
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| p.member(witness))
                    .map(|(k, _)| k)
                    .collect();
                return Err(Error::NotAPartition {
                    witness,
                    containing,
                });
            }
        }
    }
    let mut acc = UPSet::empty();
    for part in parts {
        acc = acc.union(part)?;
    }
    if acc != UPSet::universe() {
        let witness = acc
            .complement()
            .min_element()
            .expect("a proper subset of ℕ has a complement element");
        return Err(Error::NotAPartition {
            witness,
            containing: Vec::new(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub pass: bool,
    pub atom_unions_checked: usize,
    pub pairs_checked: usize,
    pub exhaustive: bool,
    pub violation: Option<AxiomViolation>,
}

impl AxiomReport {
    fn fail(mut self, clause: u8, description: String) -> AxiomReport {
        self.pass = false;
        self.violation = Some(AxiomViolation {
            clause,
            description,
        });
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomViolation {
    /// 1 complement dichotomy, 2 upward closure, 3 intersection closure,
    /// 4 non-principality; 0 marks an operational failure.
    pub clause: u8,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexFilterReport {
    pub pass: bool,
    pub indices: BTreeSet<usize>,
    pub violations: Vec<String>,
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pass {
            write!(
                f,
                "pass ({} atom-unions, {} pairs, {})",
                self.atom_unions_checked,
                self.pairs_checked,
                if self.exhaustive {
                    "exhaustive"
                } else {
                    "sampled"
                }
            )
        } else {
            let v = self.violation.as_ref().expect("failing report has a violation");
            write!(f, "FAIL clause {}: {}", v.clause, v.description)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RawFilter {
    generators: Vec<UPSet>,
    branch: String,
}

impl Serialize for PartialFilter {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RawFilter {
            generators: self.algebra.generators().to_vec(),
            branch: self.branch.to_string(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PartialFilter {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawFilter::deserialize(deserializer)?;
        let branch: Word = raw.branch.parse().map_err(|e: Error| D::Error::custom(e.to_string()))?;
        if branch.len() != raw.generators.len() {
            return Err(D::Error::custom(format!(
                "branch word has length {}, but there are {} generators",
                branch.len(),
                raw.generators.len()
            )));
        }
        let algebra = Algebra::span(raw.generators).map_err(|e| D::Error::custom(e.to_string()))?;
        Ok(PartialFilter::from_branch_unchecked(algebra, branch))
    }
}
