//! Rational scalar type and small helpers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Coefficient field: arbitrary-precision rationals.
pub type Q = BigRational;

/// Shorthand for an integer rational.
pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Shorthand for the rational `n / d`.
pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses a rational from `"p"` or `"p/q"` text.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Q::new(n, d))
            }
        }
        None => {
            let n: BigInt = s.parse().ok()?;
            Some(Q::from_integer(n))
        }
    }
}

/// Formats a rational in lowest terms with positive denominator,
/// omitting the denominator when it is 1.
pub fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else if x.denom().is_negative() {
        // BigRational keeps denominators positive, but be explicit.
        format!("{}/{}", -x.numer(), -x.denom())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_roundtrip() {
        for s in ["0", "1", "-3", "2/3", "-5/7", "13/4"] {
            let x = parse_q(s).unwrap();
            assert_eq!(format_q(&x), s);
        }
        assert_eq!(format_q(&parse_q("2/4").unwrap()), "1/2");
        assert_eq!(format_q(&parse_q("3/-6").unwrap()), "-1/2");
        assert!(parse_q("1/0").is_none());
        assert!(parse_q("x").is_none());
    }
}
