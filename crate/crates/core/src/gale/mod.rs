//! s-gales as betting strategies.
//!
//! A [`BettingStrategy`] fixes a rate `s` and, for every prefix `w`, the
//! share `pi_1(w)` of capital staked on the next bit being 1. The induced
//! gale is `d(lambda) = 1`, `d(wb) = 2^s * pi_b(w) * d(w)`, which satisfies
//! `d(w) = 2^-s [d(w0) + d(w1)]` by construction.
//!
//! Strategies hand out [`BetCursor`]s that walk a prefix bit by bit, so that
//! constructions with per-block state (learner histories, completion counts)
//! do not recompute from scratch at every position.

mod extensional;
mod trace;

pub use extensional::{freeze, ExtensionalGale, GaleValue, IdentityReport, Violation, MAX_FREEZE_DEPTH};
pub use trace::{
    boundary_slopes, evaluate, evaluate_with_budget, growth_exponent, CapitalTrace, LogCapital,
    TraceSample, DEFAULT_EVAL_BUDGET,
};

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::numeric::{format_rational, rational_to_f64};

/// Gale rate `s >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rate(BigRational);

impl Rate {
    pub fn new(s: BigRational) -> Result<Self> {
        if s.is_negative() {
            return Err(Error::Domain(format!("rate {} is negative", format_rational(&s))));
        }
        Ok(Rate(s))
    }

    pub fn from_ratio(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::Domain("zero denominator".into()));
        }
        Self::new(crate::numeric::rational(p, q))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.0)
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

/// Incremental view of a strategy along one prefix.
pub trait BetCursor: Send {
    /// Share of capital staked on the next bit being 1.
    fn fraction_one(&mut self) -> Result<BigRational>;

    /// Consume the realised next bit.
    fn advance(&mut self, bit: bool) -> Result<()>;

    /// Independent copy positioned at the same prefix.
    fn fork(&self) -> Box<dyn BetCursor + '_>;
}

pub trait BettingStrategy: Sync {
    fn rate(&self) -> &Rate;

    /// Cursor positioned at the empty prefix.
    fn cursor(&self) -> Box<dyn BetCursor + '_>;

    /// `pi_1(prefix)`, by replaying a fresh cursor.
    fn fraction_at(&self, prefix: &[bool]) -> Result<BigRational> {
        let mut c = self.cursor();
        for &b in prefix {
            c.advance(b)?;
        }
        c.fraction_one()
    }
}

/// Share on `bit` given the share on 1.
pub fn fraction_for(pi_one: &BigRational, bit: bool) -> BigRational {
    if bit {
        pi_one.clone()
    } else {
        BigRational::one() - pi_one
    }
}

pub(crate) fn check_fraction(pi_one: &BigRational) -> Result<()> {
    if pi_one.is_negative() || *pi_one > BigRational::one() {
        return Err(Error::Contract(format!(
            "betting fraction {} outside [0, 1]",
            format_rational(pi_one)
        )));
    }
    Ok(())
}

/// Bets the same share on 1 at every prefix.
#[derive(Clone, Debug)]
pub struct ConstantStrategy {
    rate: Rate,
    pi_one: BigRational,
}

impl ConstantStrategy {
    pub fn new(rate: Rate, pi_one: BigRational) -> Result<Self> {
        check_fraction(&pi_one)?;
        Ok(ConstantStrategy { rate, pi_one })
    }

    /// `pi_1 = 1/2` everywhere.
    pub fn fair(rate: Rate) -> Self {
        ConstantStrategy {
            rate,
            pi_one: crate::numeric::rational(1, 2),
        }
    }
}

struct ConstantCursor<'a>(&'a BigRational);

impl BetCursor for ConstantCursor<'_> {
    fn fraction_one(&mut self) -> Result<BigRational> {
        Ok(self.0.clone())
    }

    fn advance(&mut self, _bit: bool) -> Result<()> {
        Ok(())
    }

    fn fork(&self) -> Box<dyn BetCursor + '_> {
        Box::new(ConstantCursor(self.0))
    }
}

impl BettingStrategy for ConstantStrategy {
    fn rate(&self) -> &Rate {
        &self.rate
    }

    fn cursor(&self) -> Box<dyn BetCursor + '_> {
        Box::new(ConstantCursor(&self.pi_one))
    }
}

/// A strategy that is defined by a per-prefix closure; handy in tests and
/// for one-off adversaries.
pub struct FnStrategy<F> {
    rate: Rate,
    bet: F,
}

impl<F> FnStrategy<F>
where
    F: Fn(&[bool]) -> BigRational + Sync + Send,
{
    pub fn new(rate: Rate, bet: F) -> Self {
        FnStrategy { rate, bet }
    }
}

struct FnCursor<'a, F> {
    bet: &'a F,
    prefix: Vec<bool>,
}

impl<F> BetCursor for FnCursor<'_, F>
where
    F: Fn(&[bool]) -> BigRational + Sync + Send,
{
    fn fraction_one(&mut self) -> Result<BigRational> {
        Ok((self.bet)(&self.prefix))
    }

    fn advance(&mut self, bit: bool) -> Result<()> {
        self.prefix.push(bit);
        Ok(())
    }

    fn fork(&self) -> Box<dyn BetCursor + '_> {
        Box::new(FnCursor {
            bet: self.bet,
            prefix: self.prefix.clone(),
        })
    }
}

impl<F> BettingStrategy for FnStrategy<F>
where
    F: Fn(&[bool]) -> BigRational + Sync + Send,
{
    fn rate(&self) -> &Rate {
        &self.rate
    }

    fn cursor(&self) -> Box<dyn BetCursor + '_> {
        Box::new(FnCursor {
            bet: &self.bet,
            prefix: Vec::new(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational;

    #[test]
    fn rate_rejects_negative() {
        assert!(Rate::from_ratio(-1, 2).is_err());
        assert_eq!(Rate::from_ratio(3, 4).unwrap().to_f64(), 0.75);
    }

    #[test]
    fn constant_strategy_rejects_bad_fraction() {
        let r = Rate::from_ratio(1, 1).unwrap();
        assert!(ConstantStrategy::new(r.clone(), rational(3, 2)).is_err());
        assert!(ConstantStrategy::new(r, rational(-1, 2)).is_err());
    }

    #[test]
    fn fraction_at_replays_prefix() {
        let s = FnStrategy::new(Rate::from_ratio(1, 1).unwrap(), |w: &[bool]| {
            rational(w.len() as i64, 10)
        });
        assert_eq!(s.fraction_at(&[true, false, true]).unwrap(), rational(3, 10));
    }
}
