//! Exact rational helpers. All payoffs, probabilities and LP data are
//! [`Rational`] values; floats appear only in rendered output.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"int"` or `"int/int"`, surrounding whitespace allowed.
pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

/// Least common multiple of the denominators of `values`.
pub fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Renders `value` in decimal with `digits` significant digits.
pub fn to_decimal(value: &Rational, digits: usize) -> String {
    let digits = digits.max(1);
    match value.to_f64() {
        Some(f) if f == 0.0 => "0".to_string(),
        Some(f) if f.is_finite() => {
            let magnitude = f.abs().log10().floor() as i64;
            let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
            let s = format!("{:.*}", decimals, f);
            if s.contains('.') {
                s.trim_end_matches('0').trim_end_matches('.').to_string()
            } else {
                s
            }
        }
        _ => value.to_string(),
    }
}

pub fn abs(value: &Rational) -> Rational {
    value.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!(parse("7"), Some(int(7)));
        assert_eq!(parse(" -3/6 "), Some(frac(-1, 2)));
        assert_eq!(parse("4/-8"), Some(frac(-1, 2)));
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse("1.5"), None);
        assert_eq!(parse(""), None);
    }

    #[test]
    fn lowest_terms_positive_denominator() {
        let r = frac(6, -9);
        assert_eq!(r.numer(), &BigInt::from(-2));
        assert_eq!(r.denom(), &BigInt::from(3));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&frac(52, 9), 6), "5.77778");
        assert_eq!(to_decimal(&frac(85, 6), 4), "14.17");
        assert_eq!(to_decimal(&int(3), 6), "3");
        assert_eq!(to_decimal(&frac(-1, 3), 3), "-0.333");
    }

    #[test]
    fn lcm_of_denominators() {
        let v = [frac(1, 9), frac(1, 3), frac(5, 9)];
        assert_eq!(denominator_lcm(&v), BigInt::from(9));
    }
}
