//! Exact rational helpers shared by the solvers.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::{Error, Result};

pub type Rational = Ratio<i128>;

/// Largest magnitude allowed for an integer-scaled quantity handed to the
/// flow solver. Costs times flows are accumulated in `i128`.
const SCALED_LIMIT: i128 = 1 << 52;

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n as i128)
}

/// Least common multiple of the denominators of `values` (1 for an empty input).
pub fn common_denominator<'a, I>(values: I) -> Result<i128>
where
    I: IntoIterator<Item = &'a Rational>,
{
    let mut acc: i128 = 1;
    for v in values {
        let d = *v.denom();
        let g = acc.gcd(&d);
        acc = (acc / g)
            .checked_mul(d)
            .ok_or(Error::Overflow("denominators"))?;
    }
    Ok(acc)
}

/// Multiply every value by `denom` and return the resulting integers.
///
/// Fails if some value does not become integral or exceeds the solver range.
pub fn scale(values: &[Rational], denom: i128, what: &'static str) -> Result<Vec<i64>> {
    values
        .iter()
        .map(|v| {
            let s = v * Rational::from_integer(denom);
            if !s.is_integer() || s.numer().abs() > SCALED_LIMIT {
                return Err(Error::Overflow(what));
            }
            Ok(*s.numer() as i64)
        })
        .collect()
}

pub fn scale_one(value: &Rational, denom: i128, what: &'static str) -> Result<i64> {
    Ok(scale(std::slice::from_ref(value), denom, what)?[0])
}

/// Parse a decimal literal (`3`, `-0.25`, `1.5e-3`, or a fraction `2/3`)
/// into an exact rational.
pub fn parse_decimal(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a decimal number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n.trim().parse().map_err(|_| bad())?;
        let d: i128 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole
        .chars()
        .chain(frac.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let mut numer: i128 = if digits.is_empty() {
        0
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let shift = exp - frac.len() as i32;
    if shift.unsigned_abs() > 30 {
        return Err(bad());
    }
    let pow = 10i128.pow(shift.unsigned_abs());
    if neg {
        numer = -numer;
    }
    let r = if shift >= 0 {
        Rational::from_integer(numer.checked_mul(pow).ok_or_else(bad)?)
    } else {
        Rational::new(numer, pow)
    };
    Ok(r)
}

/// Sum of absolute values.
pub fn l1_norm(values: &[Rational]) -> Rational {
    values.iter().fold(Rational::zero(), |acc, v| acc + v.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_decimal("0.1").unwrap(), Rational::new(1, 10));
        assert_eq!(parse_decimal("-2.50").unwrap(), Rational::new(-5, 2));
        assert_eq!(parse_decimal("3").unwrap(), int(3));
        assert_eq!(parse_decimal("1.5e-3").unwrap(), Rational::new(3, 2000));
        assert_eq!(parse_decimal("2e2").unwrap(), int(200));
        assert_eq!(parse_decimal("2/6").unwrap(), Rational::new(1, 3));
        assert_eq!(parse_decimal(".5").unwrap(), Rational::new(1, 2));
        assert!(parse_decimal("abc").is_err());
        assert!(parse_decimal("1/0").is_err());
        assert!(parse_decimal("").is_err());
    }

    #[test]
    fn lcm_of_denominators() {
        let v = [Rational::new(1, 4), Rational::new(1, 6), int(2)];
        assert_eq!(common_denominator(&v).unwrap(), 12);
        assert_eq!(scale(&v, 12, "t").unwrap(), vec![3, 2, 24]);
        assert!(scale(&v, 5, "t").is_err());
    }
}
