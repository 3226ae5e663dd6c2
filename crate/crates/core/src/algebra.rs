//! Finitely generated Boolean algebras of ultimately periodic sets.
//!
//! An [`Algebra`] keeps its generator list together with the full atom
//! decomposition: for every word `x ∈ {0,1}^n` the atom is the intersection,
//! over the generators, of the generator (bit 0) or its complement (bit 1).
//! Atoms partition ℕ; empty atoms are kept so word indexing stays total.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::upset::UPSet;

/// Default cap on the number of generators (2^16 atoms).
pub const DEFAULT_GENERATOR_CAP: usize = 16;

/// Hard representation limit for branch words.
pub const MAX_GENERATORS: usize = 48;

/// A word over {0,1}, indexing one atom of an algebra.
///
/// Bit `i` (least significant first) refers to generator `i`; bit 0 selects
/// the generator itself, bit 1 its complement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word {
    bits: u64,
    len: usize,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn new(bits: u64, len: usize) -> Self {
        assert!(len <= MAX_GENERATORS, "word too long");
        assert!(len == 64 || bits < (1u64 << len), "bits out of range");
        Word { bits, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bit for generator `i`: 0 = unnegated, 1 = complemented.
    pub fn bit(&self, i: usize) -> u8 {
        ((self.bits >> i) & 1) as u8
    }

    pub fn index(&self) -> usize {
        self.bits as usize
    }

    /// Appends a bit for a newly added generator.
    pub fn push(&self, bit: u8) -> Word {
        Word {
            bits: self.bits | ((bit as u64 & 1) << self.len),
            len: self.len + 1,
        }
    }

    pub fn from_index(index: usize, len: usize) -> Word {
        Word::new(index as u64, len)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", self.bit(i))?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        if s.len() > MAX_GENERATORS {
            return Err(Error::InvalidFilter(format!(
                "branch word longer than {MAX_GENERATORS}"
            )));
        }
        let mut bits = 0u64;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << i,
                other => {
                    return Err(Error::InvalidFilter(format!(
                        "branch word may contain only 0 and 1, found {other:?}"
                    )))
                }
            }
        }
        Ok(Word { bits, len: s.len() })
    }
}

/// A finitely generated algebra with its atom decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Algebra {
    generators: Vec<UPSet>,
    atoms: Vec<UPSet>,
}

impl Algebra {
    /// The algebra spanned by the given generators, with the default
    /// generator cap.
    pub fn span(generators: Vec<UPSet>) -> Result<Algebra> {
        Algebra::span_capped(generators, DEFAULT_GENERATOR_CAP)
    }

    pub fn span_capped(generators: Vec<UPSet>, cap: usize) -> Result<Algebra> {
        if generators.len() > cap.min(MAX_GENERATORS) {
            return Err(Error::GeneratorCap {
                requested: generators.len(),
                cap: cap.min(MAX_GENERATORS),
            });
        }
        let mut algebra = Algebra {
            generators: Vec::new(),
            atoms: vec![UPSet::universe()],
        };
        for g in generators {
            algebra = algebra.refine(g)?;
        }
        Ok(algebra)
    }

    /// The trivial algebra {∅, ℕ}: no generators, single atom ℕ.
    pub fn trivial() -> Algebra {
        Algebra {
            generators: Vec::new(),
            atoms: vec![UPSet::universe()],
        }
    }

    /// Adds one generator, splitting every atom into the part inside the
    /// generator (new bit 0) and the part inside its complement (new bit 1).
    pub fn refine(&self, generator: UPSet) -> Result<Algebra> {
        if self.generators.len() + 1 > MAX_GENERATORS {
            return Err(Error::GeneratorCap {
                requested: self.generators.len() + 1,
                cap: MAX_GENERATORS,
            });
        }
        let complement = generator.complement();
        let mut atoms = Vec::with_capacity(self.atoms.len() * 2);
        for atom in &self.atoms {
            atoms.push(atom.intersect(&generator)?);
        }
        for atom in &self.atoms {
            atoms.push(atom.intersect(&complement)?);
        }
        let mut generators = self.generators.clone();
        generators.push(generator);
        Ok(Algebra { generators, atoms })
    }

    pub fn generators(&self) -> &[UPSet] {
        &self.generators
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom(&self, word: Word) -> &UPSet {
        assert_eq!(word.len(), self.generators.len(), "word length mismatch");
        &self.atoms[word.index()]
    }

    pub fn atoms(&self) -> impl Iterator<Item = (Word, &UPSet)> {
        let len = self.generators.len();
        self.atoms
            .iter()
            .enumerate()
            .map(move |(i, a)| (Word::from_index(i, len), a))
    }

    /// Index of the unique atom containing `n`.
    pub fn atom_index_of(&self, n: u64) -> usize {
        let mut index = 0usize;
        for (i, g) in self.generators.iter().enumerate() {
            if !g.member(n) {
                index |= 1 << i;
            }
        }
        index
    }

    /// A threshold and period from which every atom is periodic.
    fn envelope(&self) -> Result<(u64, u64)> {
        let mut threshold = 0u64;
        let mut period: u128 = 1;
        for atom in &self.atoms {
            threshold = threshold.max(atom.threshold());
            period = period.lcm(&(atom.period() as u128));
        }
        if period > crate::upset::PERIOD_CAP as u128 {
            return Err(Error::PeriodOverflow {
                period,
                cap: crate::upset::PERIOD_CAP,
            });
        }
        Ok((threshold, period as u64))
    }

    /// Union of the atoms selected by `mask`, built in one pass over a
    /// threshold-plus-period window instead of folding pairwise unions.
    pub fn union_of_atoms(&self, mask: &AtomMask) -> Result<UPSet> {
        let (threshold, period) = self.envelope()?;
        let member = |n: u64| mask.get(self.atom_index_of(n));
        let exceptions = (0..threshold).filter(|&n| member(n));
        let offset = (period - threshold % period) % period;
        let residues = (0..period).filter(|&r| member(threshold + (r + offset) % period));
        UPSet::from_parts(exceptions, threshold, period, residues)
    }

    /// True iff `s` equals a union of atoms, i.e. lies in the algebra.
    pub fn contains_set(&self, s: &UPSet) -> bool {
        self.atoms
            .iter()
            .all(|atom| atom.subset(s) || atom.disjoint(s))
    }

    /// The mask of atoms whose union is `s`, when `s` is in the algebra.
    pub fn mask_of(&self, s: &UPSet) -> Option<AtomMask> {
        let mut mask = AtomMask::empty(self.atoms.len());
        for (i, atom) in self.atoms.iter().enumerate() {
            if atom.is_empty() {
                continue;
            }
            if atom.subset(s) {
                mask.set(i);
            } else if !atom.disjoint(s) {
                return None;
            }
        }
        Some(mask)
    }

    /// Checks that every `n < bound` lies in exactly one atom, and that the
    /// atoms are symbolically pairwise disjoint and cover ℕ.
    pub fn verify_partition(&self, bound: u64) -> PartitionReport {
        for n in 0..bound {
            let count = self.atoms.iter().filter(|a| a.member(n)).count();
            if count != 1 {
                return PartitionReport {
                    pass: false,
                    bound,
                    failure: Some(PartitionFailure::Pointwise { n, count }),
                };
            }
        }
        for i in 0..self.atoms.len() {
            for j in (i + 1)..self.atoms.len() {
                if !self.atoms[i].disjoint(&self.atoms[j]) {
                    return PartitionReport {
                        pass: false,
                        bound,
                        failure: Some(PartitionFailure::Overlap {
                            first: Word::from_index(i, self.generators.len()).to_string(),
                            second: Word::from_index(j, self.generators.len()).to_string(),
                        }),
                    };
                }
            }
        }
        let covers = self
            .union_of_atoms(&AtomMask::full(self.atoms.len()))
            .map(|u| u == UPSet::universe())
            .unwrap_or(false);
        if !covers {
            return PartitionReport {
                pass: false,
                bound,
                failure: Some(PartitionFailure::NotCovering),
            };
        }
        PartitionReport {
            pass: true,
            bound,
            failure: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionReport {
    pub pass: bool,
    pub bound: u64,
    pub failure: Option<PartitionFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum PartitionFailure {
    /// `n` lies in `count` atoms instead of exactly one.
    Pointwise { n: u64, count: usize },
    Overlap { first: String, second: String },
    NotCovering,
}

/// A subset of the atoms of an algebra, as a bit set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AtomMask {
    blocks: Vec<u64>,
    len: usize,
}

impl AtomMask {
    pub fn empty(len: usize) -> AtomMask {
        AtomMask {
            blocks: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn full(len: usize) -> AtomMask {
        let mut mask = AtomMask::empty(len);
        for i in 0..len {
            mask.set(i);
        }
        mask
    }

    pub fn singleton(len: usize, i: usize) -> AtomMask {
        let mut mask = AtomMask::empty(len);
        mask.set(i);
        mask
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    pub fn set(&mut self, i: usize) {
        assert!(i < self.len);
        self.blocks[i / 64] |= 1 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        (self.blocks[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn and(&self, other: &AtomMask) -> AtomMask {
        assert_eq!(self.len, other.len);
        AtomMask {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a & b)
                .collect(),
            len: self.len,
        }
    }

    pub fn not(&self) -> AtomMask {
        let mut blocks: Vec<u64> = self.blocks.iter().map(|b| !b).collect();
        let tail = self.len % 64;
        if tail != 0 {
            if let Some(last) = blocks.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        AtomMask {
            blocks,
            len: self.len,
        }
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }
}
