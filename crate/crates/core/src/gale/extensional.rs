use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::bits::{format_bits, node_index, Bits};
use crate::error::{Error, Result};
use crate::numeric::{log2_rational, rational_to_f64};

use super::{check_fraction, fraction_for, BetCursor, BettingStrategy, Rate};

pub const MAX_FREEZE_DEPTH: usize = 16;

/// Exact martingale table `m` on all strings of length `<= depth`, paired
/// with a rate. The gale it denotes is `d(w) = 2^((s-1)|w|) m(w)`, so the
/// s-gale identity reduces to `m(w0) + m(w1) = 2 m(w)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionalGale {
    rate: Rate,
    depth: usize,
    table: Vec<Option<BigRational>>,
}

/// `martingale * 2^exponent`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaleValue {
    pub martingale: BigRational,
    pub exponent: BigRational,
}

impl GaleValue {
    /// Sum of two values sharing an exponent.
    pub fn add_same_exponent(&self, other: &GaleValue) -> Option<GaleValue> {
        (self.exponent == other.exponent).then(|| GaleValue {
            martingale: &self.martingale + &other.martingale,
            exponent: self.exponent.clone(),
        })
    }

    pub fn times_pow2(&self, e: &BigRational) -> GaleValue {
        GaleValue {
            martingale: self.martingale.clone(),
            exponent: &self.exponent + e,
        }
    }

    /// Exact equality of the denoted reals, for values whose exponents
    /// differ by an integer.
    pub fn denotes_same(&self, other: &GaleValue) -> bool {
        let diff = &self.exponent - &other.exponent;
        if !diff.is_integer() {
            return self.martingale.is_zero() && other.martingale.is_zero();
        }
        let k: i64 = diff
            .to_integer()
            .try_into()
            .expect("exponent difference fits in i64");
        let scale = BigRational::from_integer(num_bigint::BigInt::one() << k.unsigned_abs());
        if k >= 0 {
            &self.martingale * scale == other.martingale
        } else {
            self.martingale.clone() == &other.martingale * scale
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `m(lambda) != 1`.
    Root,
    /// `m(w0) + m(w1) != 2 m(w)` at the given `w`.
    Additivity(Bits),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub nodes_checked: usize,
    pub violation: Option<Violation>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

impl ExtensionalGale {
    /// Empty table; fill it with [`ExtensionalGale::set`].
    pub fn empty(rate: Rate, depth: usize) -> Result<Self> {
        if depth > 24 {
            return Err(Error::budget("extensional gale depth", 24, depth));
        }
        Ok(ExtensionalGale {
            rate,
            depth,
            table: vec![None; (1usize << (depth + 1)) - 1],
        })
    }

    /// Table filled by `f(w)` for every `|w| <= depth`.
    pub fn from_fn(rate: Rate, depth: usize, mut f: impl FnMut(&[bool]) -> BigRational) -> Result<Self> {
        let mut g = Self::empty(rate, depth)?;
        let mut w = Vec::with_capacity(depth);
        fill(&mut g, &mut w, &mut f);
        Ok(g)
    }

    pub fn rate(&self) -> &Rate {
        &self.rate
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn set(&mut self, w: &[bool], m: BigRational) -> Result<()> {
        if w.len() > self.depth {
            return Err(Error::budget("extensional gale depth", self.depth, w.len()));
        }
        self.table[node_index(w)] = Some(m);
        Ok(())
    }

    pub fn martingale(&self, w: &[bool]) -> Result<&BigRational> {
        if w.len() > self.depth {
            return Err(Error::budget("extensional gale depth", self.depth, w.len()));
        }
        self.table[node_index(w)]
            .as_ref()
            .ok_or_else(|| Error::IncompleteGale {
                prefix: format_bits(w),
            })
    }

    /// `d(w)` in `(m, exponent)` form.
    pub fn gale_value(&self, w: &[bool]) -> Result<GaleValue> {
        let m = self.martingale(w)?.clone();
        let exponent = (self.rate.value() - BigRational::one())
            * BigRational::from_integer((w.len() as i64).into());
        Ok(GaleValue {
            martingale: m,
            exponent,
        })
    }

    pub fn log2_capital(&self, w: &[bool]) -> Result<f64> {
        let v = self.gale_value(w)?;
        Ok(rational_to_f64(&v.exponent) + log2_rational(&v.martingale))
    }

    /// Exhaustive exact check of `m(lambda) = 1` and
    /// `m(w0) + m(w1) = 2 m(w)` for `|w| < depth`, in order of increasing
    /// length then lexicographic order.
    pub fn verify_martingale_identity(&self) -> Result<IdentityReport> {
        let total = self.table.len();
        if let Some(i) = self.table.iter().position(Option::is_none) {
            return Err(Error::IncompleteGale {
                prefix: format_bits(&prefix_of_node(i)),
            });
        }
        let get = |i: usize| self.table[i].as_ref().unwrap();
        if !get(0).is_one() {
            return Ok(IdentityReport {
                nodes_checked: 1,
                violation: Some(Violation::Root),
            });
        }
        let two = BigRational::from_integer(2.into());
        let internal = (total - 1) / 2;
        for i in 0..internal {
            let sum = get(2 * i + 1) + get(2 * i + 2);
            if sum != get(i) * &two {
                return Ok(IdentityReport {
                    nodes_checked: i + 1,
                    violation: Some(Violation::Additivity(prefix_of_node(i))),
                });
            }
        }
        Ok(IdentityReport {
            nodes_checked: internal,
            violation: None,
        })
    }
}

fn fill(g: &mut ExtensionalGale, w: &mut Vec<bool>, f: &mut impl FnMut(&[bool]) -> BigRational) {
    let v = f(w);
    g.table[node_index(w)] = Some(v);
    if w.len() < g.depth {
        for b in [false, true] {
            w.push(b);
            fill(g, w, f);
            w.pop();
        }
    }
}

fn prefix_of_node(i: usize) -> Bits {
    let len = (usize::BITS - 1 - (i + 1).leading_zeros()) as usize;
    let code = (i + 1 - (1usize << len)) as u64;
    crate::bits::block_from_code(code, len)
}

/// Tabulate a strategy exactly: `m(wb) = 2 pi_b(w) m(w)`, `m(lambda) = 1`.
pub fn freeze(strategy: &dyn BettingStrategy, depth: usize) -> Result<ExtensionalGale> {
    if depth > MAX_FREEZE_DEPTH {
        return Err(Error::budget("freeze depth", MAX_FREEZE_DEPTH, depth));
    }
    let mut g = ExtensionalGale::empty(strategy.rate().clone(), depth)?;
    let mut w = Vec::with_capacity(depth);
    let cursor = strategy.cursor();
    freeze_from(&mut g, &mut w, BigRational::one(), cursor.as_ref())?;
    Ok(g)
}

fn freeze_from(
    g: &mut ExtensionalGale,
    w: &mut Vec<bool>,
    m: BigRational,
    cursor: &dyn BetCursor,
) -> Result<()> {
    let depth = g.depth;
    if w.len() == depth || m.is_zero() {
        // Zero capital stays zero below this node.
        fill_subtree(g, w, &m);
        return Ok(());
    }
    let mut probe = cursor.fork();
    let pi_one = probe.fraction_one()?;
    check_fraction(&pi_one)?;
    g.table[node_index(w)] = Some(m.clone());
    let two = BigRational::from_integer(2.into());
    for b in [false, true] {
        let child_m = &m * &two * fraction_for(&pi_one, b);
        let mut child = cursor.fork();
        w.push(b);
        if child_m.is_zero() {
            fill_subtree(g, w, &child_m);
        } else {
            child.advance(b)?;
            freeze_from(g, w, child_m, child.as_ref())?;
        }
        w.pop();
    }
    Ok(())
}

fn fill_subtree(g: &mut ExtensionalGale, w: &mut Vec<bool>, m: &BigRational) {
    g.table[node_index(w)] = Some(m.clone());
    if w.len() < g.depth {
        for b in [false, true] {
            w.push(b);
            fill_subtree(g, w, m);
            w.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::all_blocks;
    use crate::gale::{evaluate, ConstantStrategy, FnStrategy};
    use crate::numeric::rational;

    fn rate(p: i64, q: i64) -> Rate {
        Rate::from_ratio(p, q).unwrap()
    }

    #[test]
    fn uniform_table_passes() {
        let g = ExtensionalGale::from_fn(rate(1, 1), 5, |_| BigRational::one()).unwrap();
        let r = g.verify_martingale_identity().unwrap();
        assert!(r.passed());
        assert_eq!(r.nodes_checked, 31);
    }

    #[test]
    fn all_on_zero_table_passes() {
        let g = ExtensionalGale::from_fn(rate(1, 1), 4, |w| match w.first() {
            None => BigRational::one(),
            Some(false) => rational(2, 1),
            Some(true) => BigRational::zero(),
        })
        .unwrap();
        assert!(g.verify_martingale_identity().unwrap().passed());
    }

    #[test]
    fn perturbed_leaf_fails_at_parent() {
        let mut g = ExtensionalGale::from_fn(rate(1, 1), 3, |_| BigRational::one()).unwrap();
        g.set(&[true, false, true], rational(2, 1)).unwrap();
        let r = g.verify_martingale_identity().unwrap();
        assert_eq!(r.violation, Some(Violation::Additivity(vec![true, false])));
    }

    #[test]
    fn bad_root_reported() {
        let g = ExtensionalGale::from_fn(rate(1, 1), 2, |_| rational(2, 1)).unwrap();
        assert_eq!(g.verify_martingale_identity().unwrap().violation, Some(Violation::Root));
    }

    #[test]
    fn missing_entry_is_an_error() {
        let mut g = ExtensionalGale::empty(rate(1, 1), 2).unwrap();
        g.set(&[], BigRational::one()).unwrap();
        assert!(matches!(
            g.verify_martingale_identity(),
            Err(Error::IncompleteGale { .. })
        ));
    }

    #[test]
    fn freeze_examples() {
        let fair = ConstantStrategy::fair(rate(1, 2));
        let g = freeze(&fair, 6).unwrap();
        for w in all_blocks(6) {
            assert!(g.martingale(&w).unwrap().is_one());
        }
        let all_on_one = ConstantStrategy::new(rate(1, 1), rational(1, 1)).unwrap();
        let g = freeze(&all_on_one, 3).unwrap();
        assert_eq!(*g.martingale(&[true]).unwrap(), rational(2, 1));
        assert_eq!(*g.martingale(&[false]).unwrap(), BigRational::zero());
        assert_eq!(*g.martingale(&[true, true, true]).unwrap(), rational(8, 1));
        assert!(g.verify_martingale_identity().unwrap().passed());
        assert!(freeze(&fair, MAX_FREEZE_DEPTH + 1).is_err());
    }

    #[test]
    fn gale_identity_in_value_form() {
        let s = FnStrategy::new(rate(2, 3), |w: &[bool]| rational(1 + w.len() as i64 % 3, 5));
        let g = freeze(&s, 6).unwrap();
        let two_s = rate(2, 3).value().clone();
        for len in 0..6 {
            for w in all_blocks(len) {
                let mut w0 = w.clone();
                w0.push(false);
                let mut w1 = w.clone();
                w1.push(true);
                let sum = g.gale_value(&w0).unwrap().add_same_exponent(&g.gale_value(&w1).unwrap()).unwrap();
                assert!(sum.denotes_same(&g.gale_value(&w).unwrap().times_pow2(&two_s)));
            }
        }
    }

    #[test]
    fn frozen_capital_matches_evaluation() {
        let s = FnStrategy::new(rate(3, 4), |w: &[bool]| {
            rational(1 + (w.iter().filter(|&&b| b).count() as i64 % 4), 6)
        });
        let g = freeze(&s, 8).unwrap();
        for w in all_blocks(8) {
            let t = evaluate(&s, &w).unwrap();
            for k in 0..=8 {
                let exact = g.log2_capital(&w[..k]).unwrap();
                assert!((exact - t.at(k).unwrap().0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn node_prefix_round_trip() {
        for len in 0..6 {
            for w in all_blocks(len) {
                assert_eq!(prefix_of_node(node_index(&w)), w);
            }
        }
    }
}
