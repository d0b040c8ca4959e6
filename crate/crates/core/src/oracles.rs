//! Brute-force references: the conditional-counting gale, class counts,
//! exhaustive good-set censuses and worst-case equivalence-query counts.
//! Nothing here shares counting code with [`crate::constructions`].

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;

use crate::bits::{all_blocks, block_len, format_bits, Bits};
use crate::classes::{CompletionTracker, ConceptClass};
use crate::entropy::Probability;
use crate::error::{Error, Result};
use crate::gale::{BetCursor, BettingStrategy, Rate};
use crate::learners::{error_rate, EqLearner, MembershipOracle, MqLearner, PacLearner};
use crate::numeric::{log2_ratio, rational};

/// Bets the conditional share of admissible completions:
/// `pi_b(v) = #{blocks extending vb} / #{blocks extending v}` inside block
/// `n <= n_max`, fair after that and wherever no completion exists.
pub struct CountingGale<'a> {
    class: &'a dyn ConceptClass,
    rate: Rate,
    n_max: u32,
}

pub fn counting_gale(class: &dyn ConceptClass, s: Rate, n_max: u32) -> CountingGale<'_> {
    CountingGale {
        class,
        rate: s,
        n_max,
    }
}

struct CountingCursor<'a> {
    gale: &'a CountingGale<'a>,
    n: u32,
    offset: usize,
    tracker: Option<Box<dyn CompletionTracker>>,
}

impl CountingCursor<'_> {
    fn tracker(&mut self) -> Result<Option<&mut Box<dyn CompletionTracker>>> {
        if self.n > self.gale.n_max {
            return Ok(None);
        }
        if self.tracker.is_none() {
            self.tracker = Some(self.gale.class.completion_tracker(self.n)?);
        }
        Ok(self.tracker.as_mut())
    }
}

impl BetCursor for CountingCursor<'_> {
    fn fraction_one(&mut self) -> Result<BigRational> {
        let Some(t) = self.tracker()? else {
            return Ok(rational(1, 2));
        };
        let total = t.completions();
        if total.is_zero() {
            return Ok(rational(1, 2));
        }
        // Left unreduced: these counts run to thousands of bits and the
        // fraction is only compared and logged.
        Ok(BigRational::new_raw(t.completions_with(true).into(), total.into()))
    }

    fn advance(&mut self, bit: bool) -> Result<()> {
        if let Some(t) = self.tracker()? {
            t.push(bit);
        }
        self.offset += 1;
        if self.offset == block_len(self.n) {
            self.n += 1;
            self.offset = 0;
            self.tracker = None;
        }
        Ok(())
    }

    fn fork(&self) -> Box<dyn BetCursor + '_> {
        Box::new(CountingCursor {
            gale: self.gale,
            n: self.n,
            offset: self.offset,
            tracker: self.tracker.as_ref().map(|t| t.boxed_clone()),
        })
    }
}

impl BettingStrategy for CountingGale<'_> {
    fn rate(&self) -> &Rate {
        &self.rate
    }

    fn cursor(&self) -> Box<dyn BetCursor + '_> {
        Box::new(CountingCursor {
            gale: self,
            n: 0,
            offset: 0,
            tracker: None,
        })
    }
}

/// Number of admissible blocks at length `n`, by enumeration.
pub fn class_count(class: &dyn ConceptClass, n: u32) -> Result<BigUint> {
    Ok(BigUint::from(class.enumerate_blocks(n)?.len()))
}

/// `log2 #blocks / 2^n`, counting through the class's completion tracker
/// (no enumeration, so large `n` is fine for classes with a closed form).
pub fn counting_dimension_estimate(class: &dyn ConceptClass, n: u32) -> Result<f64> {
    let count = class.completion_tracker(n)?.completions();
    if count.is_zero() {
        return Err(Error::EmptyClass { n });
    }
    Ok(log2_ratio(&count, &BigUint::from(1u32)) / block_len(n) as f64)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockCensus {
    pub n: u32,
    pub blocks: Vec<Bits>,
    pub count: BigUint,
}

/// Rows listing members are written only up to this count.
pub const CENSUS_LISTING_LIMIT: usize = 256;

impl BlockCensus {
    pub fn from_blocks(n: u32, blocks: Vec<Bits>) -> Self {
        let count = BigUint::from(blocks.len());
        BlockCensus { n, blocks, count }
    }

    /// `n,count,member_bits`; one row per member when there are at most
    /// [`CENSUS_LISTING_LIMIT`], else one row with an empty member column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,count,member_bits\n");
        if self.blocks.len() <= CENSUS_LISTING_LIMIT && !self.blocks.is_empty() {
            for b in &self.blocks {
                out.push_str(&format!("{},{},{}\n", self.n, self.count, format_bits(b)));
            }
        } else {
            out.push_str(&format!("{},{},\n", self.n, self.count));
        }
        out
    }
}

pub enum GoodSetMode<'a> {
    /// Good: the learner's hypothesis from `examples` labelled by the block
    /// is within `epsilon` of the block.
    Pac {
        learner: &'a dyn PacLearner,
        examples: &'a [usize],
        epsilon: &'a Probability,
        delta: &'a Probability,
    },
    /// Good: the learner outputs the block exactly within `queries`
    /// membership queries.
    Mq {
        learner: &'a dyn MqLearner,
        queries: usize,
    },
}

/// Largest `n` for the exhaustive censuses, per mode.
pub const PAC_CENSUS_BUDGET: u32 = 3;
pub const MQ_CENSUS_BUDGET: u32 = 4;

pub fn exhaustive_good_set(mode: &GoodSetMode<'_>, n: u32) -> Result<BlockCensus> {
    let len = block_len(n);
    let mut good = Vec::new();
    match mode {
        GoodSetMode::Pac {
            learner,
            examples,
            epsilon,
            delta,
        } => {
            if n > PAC_CENSUS_BUDGET {
                return Err(Error::budget("pac census n", PAC_CENSUS_BUDGET as usize, n as usize));
            }
            for w in all_blocks(len) {
                let sample: Vec<(usize, bool)> = examples.iter().map(|&i| (i, w[i])).collect();
                let h = learner.learn(n, epsilon, delta, &sample)?;
                if error_rate(&h, &w)? <= *epsilon.value() {
                    good.push(w);
                }
            }
        }
        GoodSetMode::Mq { learner, queries } => {
            if n > MQ_CENSUS_BUDGET {
                return Err(Error::budget("mq census n", MQ_CENSUS_BUDGET as usize, n as usize));
            }
            for w in all_blocks(len) {
                let mut oracle = MembershipOracle::new(&w, *queries);
                match learner.learn(n, &mut oracle) {
                    Ok(h) if h == w => good.push(w),
                    Ok(_) | Err(Error::Budget { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(BlockCensus::from_blocks(n, good))
}

/// Most equivalence queries `eq` can need on `target`, over every choice of
/// counterexample the oracle could make. Runs with more than `max_queries`
/// queries are reported as a budget error.
pub fn worst_case_eq_queries(eq: &dyn EqLearner, n: u32, target: &[bool], max_queries: usize) -> Result<usize> {
    if target.len() != block_len(n) {
        return Err(Error::Domain(format!("target has length {} at n = {n}", target.len())));
    }
    let mut choices = Vec::new();
    explore(eq, n, target, max_queries, &mut choices)
}

fn explore(eq: &dyn EqLearner, n: u32, target: &[bool], max: usize, choices: &mut Vec<usize>) -> Result<usize> {
    if choices.len() >= max {
        return Err(Error::budget("equivalence queries", max, choices.len() + 1));
    }
    let mut session = eq.start(n)?;
    for &c in choices.iter() {
        session.counterexample(c)?;
    }
    let h = session.hypothesis().to_vec();
    drop(session);
    let wrong: Vec<usize> = (0..target.len()).filter(|&i| h[i] != target[i]).collect();
    if wrong.is_empty() {
        return Ok(choices.len() + 1);
    }
    let mut worst = 0;
    for pos in wrong {
        choices.push(pos);
        worst = worst.max(explore(eq, n, target, max, choices)?);
        choices.pop();
    }
    Ok(worst)
}
