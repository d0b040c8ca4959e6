//! Exact-rational helpers and float conversions used on the evaluation path.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Parse `p/q` or a bare integer `p` into an exact rational.
///
/// Decimal notation is rejected: thresholds such as `floor(alpha * 2^n)`
/// must not depend on binary float rounding.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = p
        .parse()
        .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
    let q: BigInt = q
        .parse()
        .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
    if q.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(p, q))
}

/// Canonical `p/q` form (`p` alone for integers).
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("rational out of f64 range")
}

fn log2_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 53 {
        return x.to_f64().unwrap().log2();
    }
    let shift = bits - 53;
    let mantissa = (x >> shift).to_f64().unwrap();
    shift as f64 + mantissa.log2()
}

/// `log2(num / den)` without materialising either operand as a float.
///
/// The absolute error stays near machine epsilon even when both operands
/// have thousands of bits. Returns `-inf` for a zero numerator.
pub fn log2_ratio(num: &BigUint, den: &BigUint) -> f64 {
    assert!(!den.is_zero(), "log2_ratio: zero denominator");
    if num.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (nb, db) = (num.bits(), den.bits());
    if nb <= 53 && db <= 53 {
        return (num.to_f64().unwrap() / den.to_f64().unwrap()).log2();
    }
    // Keep the integer parts apart so large exponents cancel exactly.
    let int_part = nb as f64 - db as f64;
    int_part + (log2_biguint(num) - nb as f64) - (log2_biguint(den) - db as f64)
}

/// `log2` of a non-negative rational; `-inf` at zero.
pub fn log2_rational(r: &BigRational) -> f64 {
    debug_assert!(!r.is_negative());
    log2_ratio(r.numer().magnitude(), r.denom().magnitude())
}

pub fn to_biguint(x: &BigInt) -> BigUint {
    match x.sign() {
        Sign::Minus => panic!("negative value where a count was expected"),
        _ => x.magnitude().clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions() {
        assert_eq!(parse_rational("3/8").unwrap(), rational(3, 8));
        assert_eq!(parse_rational(" 2 ").unwrap(), rational(2, 1));
        assert_eq!(parse_rational("2/4").unwrap(), rational(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.25").is_err());
        assert!(parse_rational("a/b").is_err());
        assert_eq!(format_rational(&rational(6, 8)), "3/4");
        assert_eq!(format_rational(&rational(4, 2)), "2");
    }

    #[test]
    fn log2_ratio_handles_huge_operands() {
        let big = BigUint::one() << 5000u32;
        let three_big = &big * 3u32;
        let v = log2_ratio(&big, &three_big);
        assert!((v + 3f64.log2()).abs() < 1e-12);
        assert_eq!(log2_ratio(&BigUint::zero(), &big), f64::NEG_INFINITY);
        assert!((log2_ratio(&BigUint::from(3u32), &BigUint::from(8u32)) - (3.0f64 / 8.0).log2()).abs() < 1e-15);
    }

    #[test]
    fn rational_to_float() {
        assert_eq!(rational_to_f64(&rational(1, 4)), 0.25);
        assert!((rational_to_f64(&rational(-5, 16)) + 0.3125).abs() < 1e-15);
    }
}
