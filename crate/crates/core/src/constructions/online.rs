use num_rational::BigRational;
use num_traits::One;

use crate::bits::{block_len, locate};
use crate::entropy::Probability;
use crate::error::{Error, Result};
use crate::gale::{BetCursor, BettingStrategy, Rate};
use crate::learners::OnlineLearner;
use crate::numeric::{format_rational, log2_rational, rational};

/// Gale that stakes `1 - (alpha + delta)` on the learner's prediction for
/// the next example of the current block and `alpha + delta` against it.
#[derive(Clone, Debug)]
pub struct OnlineGale<L> {
    learner: L,
    rate: Rate,
    against: BigRational,
}

pub fn online_to_gale<L: OnlineLearner>(
    learner: L,
    alpha: &Probability,
    delta: &Probability,
    s: Rate,
) -> Result<OnlineGale<L>> {
    let against = alpha.value() + delta.value();
    if against >= rational(1, 2) {
        return Err(Error::Precondition(format!(
            "alpha + delta = {} must be below 1/2",
            format_rational(&against)
        )));
    }
    Ok(OnlineGale {
        learner,
        rate: s,
        against,
    })
}

impl<L> OnlineGale<L> {
    /// `alpha + delta`, the share staked against the prediction.
    pub fn stake_against(&self) -> &BigRational {
        &self.against
    }

    pub fn learner(&self) -> &L {
        &self.learner
    }
}

struct OnlineCursor<'a, L> {
    gale: &'a OnlineGale<L>,
    n: u32,
    history: Vec<bool>,
}

impl<L: OnlineLearner> BetCursor for OnlineCursor<'_, L> {
    fn fraction_one(&mut self) -> Result<BigRational> {
        // A learner with no consistent hypothesis left (off-class prefix)
        // falls back to predicting 0 so the gale stays total.
        let predicted = match self.gale.learner.predict(self.n, &self.history) {
            Ok(b) => b,
            Err(Error::InconsistentHistory { .. }) => false,
            Err(e) => return Err(e),
        };
        Ok(if predicted {
            BigRational::one() - &self.gale.against
        } else {
            self.gale.against.clone()
        })
    }

    fn advance(&mut self, bit: bool) -> Result<()> {
        self.history.push(bit);
        if self.history.len() == block_len(self.n) {
            self.history.clear();
            self.n += 1;
        }
        Ok(())
    }

    fn fork(&self) -> Box<dyn BetCursor + '_> {
        Box::new(OnlineCursor {
            gale: self.gale,
            n: self.n,
            history: self.history.clone(),
        })
    }
}

impl<L: OnlineLearner> BettingStrategy for OnlineGale<L> {
    fn rate(&self) -> &Rate {
        &self.rate
    }

    fn cursor(&self) -> Box<dyn BetCursor + '_> {
        Box::new(OnlineCursor {
            gale: self,
            n: 0,
            history: Vec::new(),
        })
    }
}

/// Mistakes of the learner on one complete block of a prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockMistakes {
    pub n: u32,
    pub mistakes: usize,
    /// `floor(alpha 2^n)`.
    pub allowed: usize,
}

impl BlockMistakes {
    pub fn within_bound(&self) -> bool {
        self.mistakes <= self.allowed
    }
}

/// Sequential mistakes per complete block of `prefix`, flagged against the
/// `floor(alpha 2^n)` bound the construction relies on.
pub fn block_mistakes(
    learner: &dyn OnlineLearner,
    alpha: &Probability,
    prefix: &[bool],
) -> Result<Vec<BlockMistakes>> {
    let complete = if prefix.is_empty() { 0 } else { locate(prefix.len()).0 };
    let mut out = Vec::new();
    let mut start = 0;
    for n in 0..complete {
        let block = &prefix[start..start + block_len(n)];
        out.push(BlockMistakes {
            n,
            mistakes: crate::learners::count_mistakes(learner, block)?,
            allowed: alpha.floor_scaled(n),
        });
        start += block_len(n);
    }
    Ok(out)
}

/// `k log2(p) + (2^n - k) log2(1 - p) + s 2^n` for a block with `k`
/// mistakes, `p = alpha + delta`.
pub fn online_block_log_factor(n: u32, mistakes: usize, against: &BigRational, s: &Rate) -> f64 {
    let len = block_len(n) as f64;
    let k = mistakes as f64;
    let lp = log2_rational(against);
    let lq = log2_rational(&(BigRational::one() - against));
    let hit = if mistakes == 0 { 0.0 } else { k * lp };
    let miss = if mistakes == block_len(n) { 0.0 } else { (len - k) * lq };
    hit + miss + s.to_f64() * len
}
