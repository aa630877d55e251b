//! Exact rational time values.
//!
//! Durations, deadlines and delays are rationals over `i128`. Externally they
//! are written either as `"p/q"`, as an integer, or as a finite decimal.

use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

/// Parses `"p/q"`, `"n"`, or a decimal such as `"2.75"` / `"-0.5"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("invalid rational `{text}`"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: i128 = p.trim().parse().map_err(|_| bad())?;
        let q: i128 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(Error::Parse(format!("zero denominator in `{text}`")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 30 {
            return Err(bad());
        }
        let whole: i128 = if int_digits.is_empty() {
            0
        } else {
            int_digits.parse().map_err(|_| bad())?
        };
        let scale = 10i128.pow(frac.len() as u32);
        let frac: i128 = frac.parse().map_err(|_| bad())?;
        let magnitude = Rational::new(whole * scale + frac, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    s.parse::<i128>().map(Rational::from_integer).map_err(|_| bad())
}

/// Renders an integer as `p`, a terminating value as an exact decimal, and
/// anything else as `p/q`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    let (mut q, mut twos, mut fives) = (*r.denom(), 0u32, 0u32);
    while q % 2 == 0 {
        q /= 2;
        twos += 1;
    }
    while q % 5 == 0 {
        q /= 5;
        fives += 1;
    }
    let digits = twos.max(fives);
    if q != 1 || digits > 30 {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let scale = 10i128.pow(digits);
    let Some(scaled) = r.numer().checked_mul(scale / r.denom()) else {
        return format!("{}/{}", r.numer(), r.denom());
    };
    let sign = if scaled < 0 { "-" } else { "" };
    let a = scaled.unsigned_abs();
    let s = scale as u128;
    format!("{sign}{}.{:0width$}", a / s, a % s, width = digits as usize)
}

/// Renders an integer as `p` and anything else as `p/q`.
pub fn format_fraction(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Renders a rational as a decimal approximation for human-facing tables.
pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn is_positive(r: &Rational) -> bool {
    r.is_positive()
}

pub fn is_nonnegative(r: &Rational) -> bool {
    !r.is_negative()
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n as i128)
}

/// Serde adapter storing a rational as `"p/q"` text (see [`format_fraction`]).
pub mod serde_str {
    use super::{format_fraction, parse_rational, Rational};
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_fraction(r))
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Text(String),
        Int(i64),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Text(t) => parse_rational(&t).map_err(de::Error::custom),
            Raw::Int(n) => Ok(Rational::from_integer(n as i128)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), Rational::new(3, 4));
        assert_eq!(parse_rational("6/8").unwrap(), Rational::new(3, 4));
        assert_eq!(parse_rational("17").unwrap(), int(17));
        assert_eq!(parse_rational("2.75").unwrap(), Rational::new(11, 4));
        assert_eq!(parse_rational("-0.5").unwrap(), Rational::new(-1, 2));
        assert_eq!(parse_rational(" 1 / 3 ").unwrap(), Rational::new(1, 3));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "1/0", "abc", "1.", "1.2.3", "/2"] {
            assert!(parse_rational(s).is_err(), "{s}");
        }
    }

    #[test]
    fn format_parse_round_trip() {
        for p in -40..=40 {
            for q in 1..=40 {
                let r = Rational::new(p, q);
                assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
            }
        }
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(format_rational(&Rational::new(10, 4)), "2.5");
        assert_eq!(format_rational(&Rational::new(-1, 8)), "-0.125");
        assert_eq!(format_rational(&Rational::new(1, 3)), "1/3");
        assert_eq!(format_rational(&Rational::new(7, 6)), "7/6");
        assert_eq!(format_rational(&int(-3)), "-3");
        assert_eq!(format_rational(&zero()), "0");
    }

    #[test]
    fn fractions_for_serialization() {
        assert_eq!(format_fraction(&Rational::new(11, 5)), "11/5");
        assert_eq!(format_fraction(&int(4)), "4");
        let json = serde_json::to_string(&crate::format::Q(Rational::new(-1, 8))).unwrap();
        assert_eq!(json, "\"-1/8\"");
    }
}
