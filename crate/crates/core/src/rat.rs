//! Exact rational values and their text form.
//!
//! Rationals are written as `"p/q"`, as plain integers, or as finite
//! decimals; serialization always uses the reduced `"p/q"` (or integer)
//! form so output is stable.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Parses `"p/q"`, an integer, or a finite decimal such as `"0.375"`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let bad = |msg: &str| Error::InvalidSequence(format!("cannot parse rational {text:?}: {msg}"));
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad("bad numerator"))?;
        let den: BigInt = den.trim().parse().map_err(|_| bad("bad denominator"))?;
        if den.is_zero() {
            return Err(bad("zero denominator"));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int, frac)) = text.split_once('.') {
        let int_part: BigInt = if int.is_empty() {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| bad("bad integer part"))?
        };
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad("bad fractional part"));
        }
        let digits: BigInt = frac.parse().map_err(|_| bad("bad fractional part"))?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let magnitude = BigRational::new(int_part.abs() * &scale + digits, scale);
        let negative = int.starts_with('-');
        return Ok(if negative { -magnitude } else { magnitude });
    }
    let n: BigInt = text.parse().map_err(|_| bad("not an integer"))?;
    Ok(BigRational::from_integer(n))
}

pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Serde adapter: rationals as strings.
pub mod serde_rational {
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        value: &BigRational,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<BigRational, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_rational(&text).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// Serde adapter for vectors of rationals.
pub mod serde_rational_vec {
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        values: &[BigRational],
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(values.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Vec<BigRational>, D::Error> {
        let texts = Vec::<String>::deserialize(deserializer)?;
        texts
            .iter()
            .map(|t| parse_rational(t).map_err(|e| D::Error::custom(e.to_string())))
            .collect()
    }
}
