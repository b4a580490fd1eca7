//! Fixed-point decimals that are always rounded toward negative infinity,
//! so a reported value never exceeds the exact quantity it stands for.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::Rational;

/// `units / 10^digits`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FloorDecimal {
    units: BigInt,
    digits: u32,
}

pub fn pow10(digits: u32) -> BigInt {
    num_traits::pow(BigInt::from(10u32), digits as usize)
}

impl FloorDecimal {
    /// Largest decimal with `digits` fractional digits that is `<= value`.
    pub fn floor_of(value: &Rational, digits: u32) -> Self {
        let scaled = value.numer() * pow10(digits);
        FloorDecimal {
            units: scaled.div_floor(value.denom()),
            digits,
        }
    }

    /// Largest decimal with `digits` fractional digits that is `<= value^(1/n)`.
    /// `value` must be nonnegative.
    pub fn floor_root(value: &Rational, n: u32, digits: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("root index must be positive".into()));
        }
        if value.is_negative() {
            return Err(Error::Domain(format!("root of negative value {value}")));
        }
        // floor((v * 10^(d n))^(1/n)) = floor(floor(v * 10^(d n))^(1/n))
        let scaled = (value.numer() * pow10(digits * n)).div_floor(value.denom());
        let root = scaled
            .to_biguint()
            .expect("nonnegative")
            .nth_root(n);
        Ok(FloorDecimal {
            units: BigInt::from(root),
            digits,
        })
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if int.is_empty() && frac.is_empty() {
            return Err(Error::Parse(format!("empty decimal '{s}'")));
        }
        let all: String = format!("{int}{frac}");
        if !all.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("bad decimal '{s}'")));
        }
        let mag = all
            .parse::<BigUint>()
            .map_err(|e| Error::Parse(format!("bad decimal '{s}': {e}")))?;
        let mut units = BigInt::from(mag);
        if neg {
            units = -units;
        }
        Ok(FloorDecimal {
            units,
            digits: frac.len() as u32,
        })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn units(&self) -> &BigInt {
        &self.units
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.units.clone(), pow10(self.digits))
    }

    pub fn to_f64(&self) -> f64 {
        self.to_rational().to_f64().unwrap_or(f64::NAN)
    }

    /// Drops fractional digits, rounding down.
    pub fn truncate_to(&self, digits: u32) -> Self {
        if digits >= self.digits {
            return FloorDecimal {
                units: &self.units * pow10(digits - self.digits),
                digits,
            };
        }
        FloorDecimal {
            units: self.units.div_floor(&pow10(self.digits - digits)),
            digits,
        }
    }
}

impl fmt::Display for FloorDecimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mag = self.units.abs().to_string();
        let sign = if self.units.is_negative() { "-" } else { "" };
        let d = self.digits as usize;
        if d == 0 {
            return write!(f, "{sign}{mag}");
        }
        let padded = if mag.len() <= d {
            format!("{}{}", "0".repeat(d + 1 - mag.len()), mag)
        } else {
            mag
        };
        let (int, frac) = padded.split_at(padded.len() - d);
        write!(f, "{sign}{int}.{frac}")
    }
}

impl Serialize for FloorDecimal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Smallest decimal with `digits` fractional digits that is `>= value`, rendered.
pub fn ceil_string(value: &Rational, digits: u32) -> String {
    let scaled = value.numer() * pow10(digits);
    FloorDecimal {
        units: scaled.div_ceil(value.denom()),
        digits,
    }
    .to_string()
}

/// Renders `num/den` even when the denominator is one.
pub fn rational_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: BigInt = n
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational '{s}'")))?;
    let d: BigInt = d
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational '{s}'")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in '{s}'")));
    }
    Ok(Rational::new(n, d))
}
