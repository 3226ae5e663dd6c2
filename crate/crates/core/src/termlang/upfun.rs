//! Exact representations of the number-valued functions definable by set
//! expressions.
//!
//! Every function built from the variable, constants, addition, truncated
//! subtraction, scaling, and reduction modulo a constant is eventually
//! affine on each residue class: past a threshold its value on the class
//! `j ≡ r` grows by a fixed increment per period step.  [`UpFun`] stores the
//! prefix values, the per-class bases at the threshold, and the per-class
//! increments, and closes the class under the operations above plus the
//! conditional.  The zero set of such a function is ultimately periodic and
//! is produced exactly.

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::upset::{UPSet, PERIOD_CAP, THRESHOLD_CAP};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpFun {
    threshold: u64,
    period: u64,
    /// Values at `j < threshold`.
    prefix: Vec<u64>,
    /// Value at `j = threshold + r` for `r < period`.
    base: Vec<u64>,
    /// Increment per period step on the class of `threshold + r`.
    slope: Vec<u64>,
}

fn check_caps(threshold: u64, period: u128) -> Result<()> {
    if period > PERIOD_CAP as u128 {
        return Err(Error::PeriodOverflow {
            period,
            cap: PERIOD_CAP,
        });
    }
    if threshold > THRESHOLD_CAP {
        return Err(Error::PeriodOverflow {
            period: threshold as u128,
            cap: THRESHOLD_CAP,
        });
    }
    Ok(())
}

impl UpFun {
    pub fn constant(n: u64) -> UpFun {
        UpFun {
            threshold: 0,
            period: 1,
            prefix: Vec::new(),
            base: vec![n],
            slope: vec![0],
        }
    }

    pub fn identity() -> UpFun {
        UpFun {
            threshold: 0,
            period: 1,
            prefix: Vec::new(),
            base: vec![0],
            slope: vec![1],
        }
    }

    pub fn value(&self, j: u64) -> Result<u64> {
        if j < self.threshold {
            return Ok(self.prefix[j as usize]);
        }
        let d = j - self.threshold;
        let r = (d % self.period) as usize;
        let q = d / self.period;
        self.slope[r]
            .checked_mul(q)
            .and_then(|drift| self.base[r].checked_add(drift))
            .ok_or(Error::Overflow("set expression value"))
    }

    /// Rebases to a larger threshold and a period multiple; the represented
    /// function is unchanged.
    fn realign(&self, threshold: u64, period: u64) -> Result<UpFun> {
        debug_assert!(threshold >= self.threshold);
        debug_assert_eq!(period % self.period, 0);
        check_caps(threshold, period as u128)?;
        let factor = period / self.period;
        let mut prefix = Vec::with_capacity(threshold as usize);
        for j in 0..threshold {
            prefix.push(self.value(j)?);
        }
        let mut base = Vec::with_capacity(period as usize);
        let mut slope = Vec::with_capacity(period as usize);
        for r in 0..period {
            base.push(self.value(threshold + r)?);
            let old_class = ((threshold + r - self.threshold) % self.period) as usize;
            slope.push(
                self.slope[old_class]
                    .checked_mul(factor)
                    .ok_or(Error::Overflow("slope realignment"))?,
            );
        }
        Ok(UpFun {
            threshold,
            period,
            prefix,
            base,
            slope,
        })
    }

    fn aligned_with(&self, other: &UpFun) -> Result<(UpFun, UpFun)> {
        let threshold = self.threshold.max(other.threshold);
        let period = (self.period as u128).lcm(&(other.period as u128));
        check_caps(threshold, period)?;
        Ok((
            self.realign(threshold, period as u64)?,
            other.realign(threshold, period as u64)?,
        ))
    }

    fn zip_values(
        a: &UpFun,
        b: &UpFun,
        f: impl Fn(u64, u64) -> Result<u64>,
    ) -> Result<(Vec<u64>, Vec<u64>)> {
        let prefix = a
            .prefix
            .iter()
            .zip(&b.prefix)
            .map(|(&x, &y)| f(x, y))
            .collect::<Result<_>>()?;
        let base = a
            .base
            .iter()
            .zip(&b.base)
            .map(|(&x, &y)| f(x, y))
            .collect::<Result<_>>()?;
        Ok((prefix, base))
    }

    pub fn add(&self, other: &UpFun) -> Result<UpFun> {
        let (a, b) = self.aligned_with(other)?;
        let checked = |x: u64, y: u64| x.checked_add(y).ok_or(Error::Overflow("add"));
        let (prefix, base) = UpFun::zip_values(&a, &b, checked)?;
        let slope = a
            .slope
            .iter()
            .zip(&b.slope)
            .map(|(&x, &y)| checked(x, y))
            .collect::<Result<_>>()?;
        Ok(UpFun {
            threshold: a.threshold,
            period: a.period,
            prefix,
            base,
            slope,
        })
    }

    pub fn scale(&self, c: u64) -> Result<UpFun> {
        let checked = |x: u64| x.checked_mul(c).ok_or(Error::Overflow("mul"));
        Ok(UpFun {
            threshold: self.threshold,
            period: self.period,
            prefix: self.prefix.iter().map(|&x| checked(x)).collect::<Result<_>>()?,
            base: self.base.iter().map(|&x| checked(x)).collect::<Result<_>>()?,
            slope: self.slope.iter().map(|&x| checked(x)).collect::<Result<_>>()?,
        })
    }

    /// Truncated subtraction.  Classes where the slopes differ may need a
    /// larger threshold before one side dominates for good; the needed shift
    /// is computed exactly per class.
    pub fn monus(&self, other: &UpFun) -> Result<UpFun> {
        let (a, b) = self.aligned_with(other)?;
        let mut shift: u64 = 0;
        for r in 0..a.period as usize {
            let (ba, sa) = (a.base[r] as u128, a.slope[r] as u128);
            let (bb, sb) = (b.base[r] as u128, b.slope[r] as u128);
            let needed = if sa > sb && ba < bb {
                (bb - ba).div_ceil(sa - sb)
            } else if sa < sb && ba > bb {
                (ba - bb).div_ceil(sb - sa)
            } else {
                0
            };
            shift = shift.max(u64::try_from(needed).map_err(|_| Error::Overflow("monus"))?);
        }
        let threshold = a
            .threshold
            .checked_add(shift.checked_mul(a.period).ok_or(Error::Overflow("monus"))?)
            .ok_or(Error::Overflow("monus"))?;
        check_caps(threshold, a.period as u128)?;
        let a = a.realign(threshold, a.period)?;
        let b = b.realign(threshold, b.period)?;
        let (prefix, base) = UpFun::zip_values(&a, &b, |x, y| Ok(x.saturating_sub(y)))?;
        // After the shift, a class either dominates with slope sa - sb or is
        // constant (equal slopes) or identically clipped to zero (sa < sb).
        let slope = a
            .slope
            .iter()
            .zip(&b.slope)
            .map(|(&sa, &sb)| sa.saturating_sub(sb))
            .collect();
        Ok(UpFun {
            threshold: a.threshold,
            period: a.period,
            prefix,
            base,
            slope,
        })
    }

    /// Reduction modulo a constant; `m = 0` leaves the value unchanged.
    pub fn mod_const(&self, m: u64) -> Result<UpFun> {
        if m == 0 {
            return Ok(self.clone());
        }
        let mut k_period: u64 = 1;
        for &s in &self.slope {
            let step = m / s.gcd(&m);
            k_period = (k_period as u128)
                .lcm(&(step as u128))
                .try_into()
                .map_err(|_| Error::Overflow("mod"))?;
        }
        let period = (self.period as u128) * (k_period as u128);
        check_caps(self.threshold, period)?;
        let wide = self.realign(self.threshold, period as u64)?;
        Ok(UpFun {
            threshold: wide.threshold,
            period: wide.period,
            prefix: wide.prefix.iter().map(|&x| x % m).collect(),
            base: wide.base.iter().map(|&x| x % m).collect(),
            // each widened class drifts by a multiple of m per step
            slope: vec![0; wide.period as usize],
        })
    }

    pub fn min(&self, other: &UpFun) -> Result<UpFun> {
        self.monus(&self.monus(other)?)
    }

    pub fn max(&self, other: &UpFun) -> Result<UpFun> {
        self.add(&other.monus(self)?)
    }

    /// `min(value, 1)`: the 0/1 collapse used for truth values.
    pub fn sign(&self) -> Result<UpFun> {
        self.min(&UpFun::constant(1))
    }

    /// Conditional on "condition = 0".
    pub fn ifz(cond: &UpFun, then: &UpFun, els: &UpFun) -> Result<UpFun> {
        let threshold = cond.threshold.max(then.threshold).max(els.threshold);
        let period = (cond.period as u128)
            .lcm(&(then.period as u128))
            .lcm(&(els.period as u128));
        check_caps(threshold, period)?;
        let mut c = cond.realign(threshold, period as u64)?;
        let mut t = then.realign(threshold, period as u64)?;
        let mut e = els.realign(threshold, period as u64)?;
        // A strictly increasing class may be zero at its very first point;
        // one extra period moves that point into the prefix.
        if (0..c.period as usize).any(|r| c.slope[r] > 0 && c.base[r] == 0) {
            let threshold = threshold
                .checked_add(c.period)
                .ok_or(Error::Overflow("if"))?;
            check_caps(threshold, c.period as u128)?;
            c = c.realign(threshold, c.period)?;
            t = t.realign(threshold, t.period)?;
            e = e.realign(threshold, e.period)?;
        }
        let mut prefix = Vec::with_capacity(c.threshold as usize);
        for j in 0..c.threshold {
            let v = if c.value(j)? == 0 { t.value(j)? } else { e.value(j)? };
            prefix.push(v);
        }
        let mut base = Vec::with_capacity(c.period as usize);
        let mut slope = Vec::with_capacity(c.period as usize);
        for r in 0..c.period as usize {
            let take_then = c.slope[r] == 0 && c.base[r] == 0;
            if take_then {
                base.push(t.base[r]);
                slope.push(t.slope[r]);
            } else {
                base.push(e.base[r]);
                slope.push(e.slope[r]);
            }
        }
        Ok(UpFun {
            threshold: c.threshold,
            period: c.period,
            prefix,
            base,
            slope,
        })
    }

    /// The set `{ j : value(j) = 0 }`, exactly.
    pub fn zero_set(&self) -> Result<UPSet> {
        // Zeros of strictly increasing classes occur only at the first point
        // of the class, inside [threshold, threshold + period).
        let cut = self
            .threshold
            .checked_add(self.period)
            .ok_or(Error::Overflow("zero set"))?;
        let mut exceptions = Vec::new();
        for j in 0..cut {
            if self.value(j)? == 0 {
                exceptions.push(j);
            }
        }
        let residues = (0..self.period as usize)
            .filter(|&r| self.slope[r] == 0 && self.base[r] == 0)
            .map(|r| (self.threshold + r as u64) % self.period);
        UPSet::from_parts(exceptions, cut, self.period, residues)
    }
}
