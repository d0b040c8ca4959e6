//! Binary entropy, cross entropy and binomial tail counts.
//!
//! Entropies are carried as dyadic intervals `[lo, hi] * 2^-FRAC_BITS`
//! computed with directed rounding, so that inequalities against exact
//! integer counts can be decided rigorously. Counts are arbitrary-precision
//! integers; probabilities are exact rationals.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numeric::{format_rational, rational};

/// Fractional bits of every [`DyadicInterval`].
pub const FRAC_BITS: u32 = 96;
const WORK_BITS: u32 = FRAC_BITS + 64;

/// A probability stored as an exact rational in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Probability(BigRational);

impl Probability {
    pub fn new(value: BigRational) -> Result<Self> {
        if value.is_negative() || value > BigRational::one() {
            return Err(Error::Domain(format!(
                "probability {} outside [0, 1]",
                format_rational(&value)
            )));
        }
        Ok(Probability(value))
    }

    pub fn from_ratio(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::Domain("zero denominator".into()));
        }
        Self::new(rational(p, q))
    }

    pub fn zero() -> Self {
        Probability(BigRational::zero())
    }

    pub fn one() -> Self {
        Probability(BigRational::one())
    }

    pub fn half() -> Self {
        Probability(rational(1, 2))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn complement(&self) -> Self {
        Probability(BigRational::one() - &self.0)
    }

    pub fn to_f64(&self) -> f64 {
        crate::numeric::rational_to_f64(&self.0)
    }

    /// `floor(value * 2^n)`, the integral form of an `alpha * 2^n` budget.
    pub fn floor_scaled(&self, n: u32) -> usize {
        let scaled = &self.0 * BigRational::from_integer(BigInt::one() << n);
        scaled
            .floor()
            .to_integer()
            .to_usize()
            .expect("scaled probability fits in usize")
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

/// A real number enclosed in `[lo, hi] * 2^-FRAC_BITS`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicInterval {
    lo: BigInt,
    hi: BigInt,
}

impl DyadicInterval {
    pub fn exact_integer(v: i64) -> Self {
        let x = BigInt::from(v) << FRAC_BITS;
        DyadicInterval { lo: x.clone(), hi: x }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        let scaled = r * BigRational::from_integer(BigInt::one() << FRAC_BITS);
        DyadicInterval {
            lo: scaled.floor().to_integer(),
            hi: scaled.ceil().to_integer(),
        }
    }

    /// `log2(x)` for a positive rational `x`.
    pub fn log2(x: &BigRational) -> Result<Self> {
        if !x.is_positive() {
            return Err(Error::Domain("log2 of a non-positive value".into()));
        }
        let num = log2_integer(x.numer().magnitude());
        let den = log2_integer(x.denom().magnitude());
        Ok(num.sub(&den))
    }

    /// `log2(n)` for a positive integer.
    pub fn log2_count(n: &BigUint) -> Result<Self> {
        if n.is_zero() {
            return Err(Error::Domain("log2 of zero".into()));
        }
        Ok(log2_integer(n))
    }

    pub fn add(&self, other: &Self) -> Self {
        DyadicInterval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        DyadicInterval {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    pub fn neg(&self) -> Self {
        DyadicInterval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    /// Multiply by a non-negative rational, rounding outward.
    pub fn scale(&self, r: &BigRational) -> Self {
        assert!(!r.is_negative(), "scale factor must be non-negative");
        let (p, q) = (r.numer(), r.denom());
        DyadicInterval {
            lo: (&self.lo * p).div_floor(q),
            hi: (&self.hi * p).div_ceil(q),
        }
    }

    fn clamp(mut self, lo: i64, hi: i64) -> Self {
        let lo = BigInt::from(lo) << FRAC_BITS;
        let hi = BigInt::from(hi) << FRAC_BITS;
        if self.lo < lo {
            self.lo = lo.clone();
        }
        if self.hi > hi {
            self.hi = hi.clone();
        }
        if self.hi < self.lo {
            self.hi = self.lo.clone();
        }
        self
    }

    pub fn lower(&self) -> f64 {
        fixed_to_f64(&self.lo)
    }

    pub fn upper(&self) -> f64 {
        fixed_to_f64(&self.hi)
    }

    pub fn midpoint(&self) -> f64 {
        fixed_to_f64(&(&self.lo + &self.hi)) / 2.0
    }

    pub fn width(&self) -> f64 {
        fixed_to_f64(&(&self.hi - &self.lo))
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    /// `Some(ordering)` when the enclosures decide the comparison, `None`
    /// when they overlap without being the same exact point.
    pub fn compare(&self, other: &Self) -> Option<Ordering> {
        if self.is_exact() && other.is_exact() {
            return Some(self.lo.cmp(&other.lo));
        }
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    /// True only if every point of `self` is `<=` every point of `other`.
    pub fn certainly_le(&self, other: &Self) -> bool {
        self.hi <= other.lo
    }
}

fn fixed_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap() / 2f64.powi(FRAC_BITS as i32)
}

/// Binary logarithm of a positive integer by repeated squaring of the
/// normalised mantissa, once with floor and once with ceiling rounding.
fn log2_integer(n: &BigUint) -> DyadicInterval {
    let e = n.bits() - 1;
    let one = BigUint::one() << WORK_BITS;
    let two = &one << 1u32;
    let (m_lo, mut m_hi) = if e <= WORK_BITS as u64 {
        let m = n << (WORK_BITS as u64 - e);
        (m.clone(), m)
    } else {
        let shift = e - WORK_BITS as u64;
        let lo = n >> shift;
        let exact = (&lo << shift) == *n;
        let hi = if exact { lo.clone() } else { &lo + 1u32 };
        (lo, hi)
    };
    let mut e_hi = e;
    if m_hi >= two {
        m_hi = one.clone();
        e_hi += 1;
    }
    let exact = m_lo == one && m_hi == one && e_hi == e;
    let frac_lo = mantissa_log2_bits(m_lo, false);
    let frac_hi = mantissa_log2_bits(m_hi, true);
    let lo = (BigInt::from(e) << FRAC_BITS) + BigInt::from(frac_lo);
    let mut hi = (BigInt::from(e_hi) << FRAC_BITS) + BigInt::from(frac_hi);
    if !exact {
        // Truncation to FRAC_BITS bits.
        hi += 1;
    }
    DyadicInterval { lo, hi }
}

fn mantissa_log2_bits(mut m: BigUint, round_up: bool) -> BigUint {
    let one = BigUint::one() << WORK_BITS;
    let two = &one << 1u32;
    let mut bits = BigUint::zero();
    for _ in 0..FRAC_BITS {
        let sq = &m * &m;
        m = if round_up {
            let (q, r) = sq.div_rem(&one);
            if r.is_zero() {
                q
            } else {
                q + 1u32
            }
        } else {
            sq >> WORK_BITS
        };
        bits <<= 1u32;
        if m >= two {
            bits += 1u32;
            m = if round_up && m.is_odd() {
                (m >> 1u32) + 1u32
            } else {
                m >> 1u32
            };
        }
    }
    bits
}

/// An entropy value in bits, enclosed to within `2^-90`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntropyValue(DyadicInterval);

impl EntropyValue {
    pub fn value(&self) -> f64 {
        self.0.midpoint()
    }

    pub fn interval(&self) -> &DyadicInterval {
        &self.0
    }
}

impl fmt::Display for EntropyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.12}", self.value())
    }
}

/// Shannon binary entropy `H(alpha)`, with `H(0) = H(1) = 0`.
pub fn shannon_entropy(alpha: &Probability) -> EntropyValue {
    let a = alpha.value();
    if a.is_zero() || a.is_one() {
        return EntropyValue(DyadicInterval::exact_integer(0));
    }
    let b = BigRational::one() - a;
    let la = DyadicInterval::log2(a).expect("alpha > 0");
    let lb = DyadicInterval::log2(&b).expect("1 - alpha > 0");
    let h = la.neg().scale(a).add(&lb.neg().scale(&b));
    EntropyValue(h.clamp(0, 1))
}

/// `h_alpha(x) = alpha log 1/x + (1 - alpha) log 1/(1 - x)` for `0 < x < 1`.
pub fn cross_entropy_h(alpha: &Probability, x: &Probability) -> Result<EntropyValue> {
    let xv = x.value();
    if xv.is_zero() || xv.is_one() {
        return Err(Error::Domain(format!(
            "cross entropy needs 0 < x < 1, got {x}"
        )));
    }
    let a = alpha.value();
    let b = BigRational::one() - a;
    let lx = DyadicInterval::log2(xv)?;
    let ly = DyadicInterval::log2(&(BigRational::one() - xv))?;
    Ok(EntropyValue(lx.neg().scale(a).add(&ly.neg().scale(&b))))
}

/// The unique `gamma` in `[0, 1/2]` with `H(gamma) = beta`, located by
/// bisection over dyadic rationals `k / 2^51`.
pub fn inverse_entropy(beta: &Probability) -> Probability {
    let target = beta.value();
    if target.is_zero() {
        return Probability::zero();
    }
    if target.is_one() {
        return Probability::half();
    }
    let target_f = beta.to_f64();
    // Midpoints k / 2^51 are exact in f64, so the bracket stays dyadic.
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..50 {
        let mid = (lo + hi) / 2.0;
        if entropy_f64(mid) < target_f {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let exact = |g: f64| Probability(BigRational::from_float(g).expect("finite"));
    let err = |g: &Probability| (shannon_entropy(g).value() - target_f).abs();
    let (lo, hi) = (exact(lo), exact(hi));
    if err(&lo) <= err(&hi) {
        lo
    } else {
        hi
    }
}

fn entropy_f64(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// Largest dyadic `delta = 2^-k` (`k >= 1`) with
/// `h_alpha(alpha + delta) <= H(alpha) + epsilon` and `alpha + delta < 1/2`.
pub fn choose_delta(alpha: &Probability, epsilon: &BigRational) -> Result<Probability> {
    let half = rational(1, 2);
    if *alpha.value() >= half {
        return Err(Error::Domain(format!("choose_delta needs alpha < 1/2, got {alpha}")));
    }
    if !epsilon.is_positive() {
        return Err(Error::Domain("choose_delta needs epsilon > 0".into()));
    }
    let limit = shannon_entropy(alpha)
        .interval()
        .add(&DyadicInterval::from_rational(epsilon));
    let mut delta = half.clone();
    for _ in 1..=FRAC_BITS {
        let x = alpha.value() + &delta;
        if x < half {
            let h = cross_entropy_h(alpha, &Probability(x))?;
            if h.interval().certainly_le(&limit) {
                return Ok(Probability(delta));
            }
        }
        delta /= BigRational::from_integer(2.into());
    }
    Err(Error::Precondition(
        "no dyadic delta found within working precision".into(),
    ))
}

/// Exact `sum_{j <= k} C(total, j)`.
pub fn binomial_tail_count(total: u64, k: u64) -> Result<BigUint> {
    if k > total {
        return Err(Error::Domain(format!("tail index {k} exceeds {total}")));
    }
    let mut term = BigUint::one();
    let mut sum = BigUint::one();
    for j in 0..k {
        term = term * (total - j) / (j + 1);
        sum += &term;
    }
    Ok(sum)
}

/// Decides `count <= 2^exponent` rigorously; `None` if the enclosure of
/// `log2(count)` overlaps the exponent's enclosure.
pub fn count_le_pow2(count: &BigUint, exponent: &DyadicInterval) -> Option<bool> {
    if count.is_zero() {
        return Some(true);
    }
    let l = DyadicInterval::log2_count(count).expect("positive count");
    match l.compare(exponent) {
        Some(Ordering::Greater) => Some(false),
        Some(_) => Some(true),
        None => None,
    }
}

/// `binomial_tail_count(total, k) <= 2^(H(k/total) * total)` for `k <= total/2`.
pub fn tail_within_entropy_bound(total: u64, k: u64) -> Result<bool> {
    if 2 * k > total {
        return Err(Error::Domain(format!("tail bound needs k <= total/2, got {k}/{total}")));
    }
    let tail = binomial_tail_count(total, k)?;
    let ratio = Probability::new(rational(k as i64, total as i64))?;
    let exponent = shannon_entropy(&ratio)
        .interval()
        .scale(&BigRational::from_integer(total.into()));
    count_le_pow2(&tail, &exponent).ok_or_else(|| {
        Error::Precondition(format!("tail bound undecided at {k}/{total}"))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(a: i64, b: i64) -> Probability {
        Probability::from_ratio(a, b).unwrap()
    }

    // Reference values computed with 40-digit mpmath evaluations of the
    // closed forms.
    const H_QUARTER: f64 = 0.811_278_124_459_132_9;
    const H_QUARTER_AT_3_8: f64 = 0.862_313_303_654_189_2;
    const H_QUARTER_AT_5_16: f64 = 0.824_944_262_300_186_5;
    const INV_H_HALF: f64 = 0.110_027_864_438_359_55;

    #[test]
    fn entropy_examples() {
        assert_eq!(shannon_entropy(&p(1, 2)).value(), 1.0);
        assert!(shannon_entropy(&p(1, 2)).interval().is_exact());
        assert_eq!(shannon_entropy(&Probability::zero()).value(), 0.0);
        assert_eq!(shannon_entropy(&Probability::one()).value(), 0.0);
        let h = shannon_entropy(&p(1, 4));
        assert!((h.value() - H_QUARTER).abs() < 2f64.powi(-40));
        assert!(h.interval().width() < 2f64.powi(-80));
        assert!(Probability::from_ratio(5, 4).is_err());
        assert!(Probability::from_ratio(-1, 4).is_err());
    }

    #[test]
    fn cross_entropy_examples() {
        let a = p(1, 4);
        let at_alpha = cross_entropy_h(&a, &a).unwrap();
        assert!((at_alpha.value() - H_QUARTER).abs() < 1e-15);
        assert!((cross_entropy_h(&a, &p(3, 8)).unwrap().value() - H_QUARTER_AT_3_8).abs() < 1e-15);
        assert!((cross_entropy_h(&a, &p(5, 16)).unwrap().value() - H_QUARTER_AT_5_16).abs() < 1e-15);
        let x = p(1, 8);
        let v = cross_entropy_h(&p(1, 2), &x).unwrap().value();
        assert!((v - (8f64.log2() + (8.0f64 / 7.0).log2()) / 2.0).abs() < 1e-15);
        assert!(cross_entropy_h(&a, &Probability::zero()).is_err());
        assert!(cross_entropy_h(&a, &Probability::one()).is_err());
    }

    #[test]
    fn inverse_entropy_examples() {
        assert_eq!(inverse_entropy(&Probability::one()), Probability::half());
        assert_eq!(inverse_entropy(&Probability::zero()), Probability::zero());
        let g = inverse_entropy(&p(1, 2));
        assert!((g.to_f64() - INV_H_HALF).abs() < 1e-10);
        assert!((shannon_entropy(&g).value() - 0.5).abs() <= 1e-9);
    }

    #[test]
    fn choose_delta_examples() {
        let a = p(1, 4);
        assert_eq!(choose_delta(&a, &rational(1, 20)).unwrap(), p(1, 16));
        assert_eq!(choose_delta(&a, &rational(1, 2)).unwrap(), p(1, 8));
        let d = choose_delta(&p(49, 100), &rational(1, 1_000_000)).unwrap();
        assert!(rational(49, 100) + d.value() < rational(1, 2));
        assert!(choose_delta(&p(1, 2), &rational(1, 10)).is_err());
        assert!(choose_delta(&a, &BigRational::zero()).is_err());
    }

    #[test]
    fn binomial_tail_examples() {
        assert_eq!(binomial_tail_count(8, 2).unwrap(), BigUint::from(37u32));
        assert_eq!(binomial_tail_count(8, 0).unwrap(), BigUint::one());
        assert_eq!(binomial_tail_count(13, 13).unwrap(), BigUint::one() << 13u32);
        assert!(binomial_tail_count(3, 4).is_err());
    }

    #[test]
    fn tail_bound_exhaustive_small() {
        for total in 1..=20u64 {
            for k in 0..=total / 2 {
                assert!(tail_within_entropy_bound(total, k).unwrap(), "N={total} k={k}");
            }
        }
    }

    #[test]
    fn log2_is_exact_on_powers_of_two() {
        let l = DyadicInterval::log2_count(&(BigUint::one() << 300u32)).unwrap();
        assert!(l.is_exact());
        assert_eq!(l.midpoint(), 300.0);
        let l = DyadicInterval::log2(&rational(1, 1024)).unwrap();
        assert!(l.is_exact());
        assert_eq!(l.midpoint(), -10.0);
        let l3 = DyadicInterval::log2_count(&BigUint::from(3u32)).unwrap();
        assert!(l3.lower() <= 3f64.log2() && 3f64.log2() <= l3.upper());
    }

    #[test]
    fn count_vs_power_of_two() {
        let exp = DyadicInterval::exact_integer(5);
        assert_eq!(count_le_pow2(&BigUint::from(32u32), &exp), Some(true));
        assert_eq!(count_le_pow2(&BigUint::from(33u32), &exp), Some(false));
        assert_eq!(count_le_pow2(&BigUint::from(31u32), &exp), Some(true));
    }

    proptest! {
        #[test]
        fn entropy_is_symmetric(num in 1i64..10_000, den_extra in 1i64..10_000) {
            let a = p(num, num + den_extra);
            let d = shannon_entropy(&a).value() - shannon_entropy(&a.complement()).value();
            prop_assert!(d.abs() <= 2f64.powi(-39));
        }

        #[test]
        fn cross_entropy_minimised_at_alpha(a in 1i64..500, x in 1i64..1000) {
            let alpha = p(a, 1000);
            let xp = p(x, 1000);
            prop_assume!(alpha != xp);
            let h = shannon_entropy(&alpha).value();
            prop_assert!(cross_entropy_h(&alpha, &xp).unwrap().value() > h - 2f64.powi(-39));
        }

        #[test]
        fn inverse_entropy_round_trips(num in 0i64..=1000) {
            let beta = p(num, 1000);
            let g = inverse_entropy(&beta);
            prop_assert!(*g.value() <= rational(1, 2));
            prop_assert!((shannon_entropy(&g).value() - beta.to_f64()).abs() <= 1e-9);
        }
    }
}
