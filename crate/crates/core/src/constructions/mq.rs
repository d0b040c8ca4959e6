//! Gale from a membership-query learner: block `w` is good when the
//! learner, answering its queries from `w`, outputs exactly `w` within
//! `q(n)` queries. The block measure is uniform on the good blocks.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::product::{BlockMeasure, ProductGale};
use super::CountBudget;
use crate::bits::{block_from_code, block_len};
use crate::entropy::count_le_pow2;
use crate::entropy::DyadicInterval;
use crate::error::{Error, Result};
use crate::gale::Rate;
use crate::learners::{run_mq, MqLearner};

/// Largest `n` for which all `2^(2^n)` oracles are enumerated.
pub const MQ_BUDGET: u32 = 4;

#[derive(Clone, Debug)]
pub struct MqBlockReport {
    pub n: u32,
    pub queries: usize,
    /// Codes of the good blocks, ascending.
    pub good: Vec<u64>,
    /// `#good <= 2^q(n)`.
    pub count_within: bool,
    /// No block was good; the measure is uniform.
    pub fallback: bool,
    pub measure: BlockMeasure,
}

#[derive(Clone, Debug)]
pub struct MqGale {
    pub blocks: Vec<MqBlockReport>,
    pub gale: ProductGale,
}

/// Good blocks of `learner` at length `n` with `queries` membership queries.
pub(crate) fn mq_good_blocks(learner: &dyn MqLearner, n: u32, queries: usize) -> Result<Vec<u64>> {
    let len = block_len(n);
    let verdicts = (0..1u64 << len)
        .into_par_iter()
        .map(|code| {
            let w = block_from_code(code, len);
            match run_mq(learner, n, &w, queries) {
                Ok(run) => Ok(run.hypothesis == w),
                Err(Error::Budget { .. }) => Ok(false),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(verdicts
        .into_iter()
        .enumerate()
        .filter(|(_, good)| *good)
        .map(|(c, _)| c as u64)
        .collect())
}

pub fn mq_to_gale(learner: &dyn MqLearner, q: &CountBudget, s: Rate, n_max: u32) -> Result<MqGale> {
    if n_max > MQ_BUDGET {
        return Err(Error::budget("mq enumeration n", MQ_BUDGET as usize, n_max as usize));
    }
    let mut blocks = Vec::new();
    for n in 0..=n_max {
        let queries = q.at(n)?;
        let good = mq_good_blocks(learner, n, queries)?;
        let leaves = 1usize << block_len(n);
        let fallback = good.is_empty();
        let measure = if fallback {
            BlockMeasure::uniform(n)
        } else {
            let mut weights = vec![BigRational::zero(); leaves];
            for &c in &good {
                weights[c as usize] = BigRational::one();
            }
            BlockMeasure::from_leaf_weights(n, weights)?
        };
        let count_within =
            count_le_pow2(&BigUint::from(good.len()), &DyadicInterval::exact_integer(queries as i64)) == Some(true);
        blocks.push(MqBlockReport {
            n,
            queries,
            good,
            count_within,
            fallback,
            measure,
        });
    }
    let gale = ProductGale::new(s, blocks.iter().map(|b| b.measure.clone()).collect())?;
    Ok(MqGale { blocks, gale })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::{parse_bits, Bits};
    use crate::classes::{padded_class, ConceptClass};
    use crate::entropy::Probability;
    use crate::learners::{padded_mq_learner, ExhaustiveMqLearner, MembershipOracle};
    use crate::numeric::rational;

    fn quarter() -> Probability {
        Probability::from_ratio(1, 4).unwrap()
    }

    #[test]
    fn padded_quarter_at_three() {
        let l = padded_mq_learner(quarter()).unwrap();
        let g = mq_to_gale(&l, &CountBudget::FloorScaled(quarter()), Rate::from_ratio(1, 2).unwrap(), 3).unwrap();
        let b = &g.blocks[3];
        assert_eq!(b.good.len(), 4);
        assert!(b.count_within);
        let class = padded_class(quarter()).unwrap();
        for m in class.enumerate_blocks(3).unwrap() {
            assert_eq!(b.measure.leaf(&m).unwrap(), &rational(1, 4));
        }
        for b in &g.blocks {
            assert!(b.measure.as_martingale().unwrap().verify_martingale_identity().unwrap().passed());
        }
    }

    #[test]
    fn constant_learner_at_zero() {
        struct Zero;
        impl MqLearner for Zero {
            fn learn(&self, n: u32, _: &mut MembershipOracle<'_>) -> Result<Bits> {
                Ok(vec![false; block_len(n)])
            }
        }
        let g = mq_to_gale(&Zero, &CountBudget::Table(vec![0]), Rate::from_ratio(1, 1).unwrap(), 0).unwrap();
        let m = &g.blocks[0].measure;
        assert_eq!(g.blocks[0].good, vec![0]);
        assert_eq!(m.leaf(&parse_bits("0").unwrap()).unwrap(), &BigRational::one());
        assert_eq!(m.leaf(&parse_bits("1").unwrap()).unwrap(), &BigRational::zero());
    }

    #[test]
    fn starved_learner_falls_back() {
        let g = mq_to_gale(&ExhaustiveMqLearner, &CountBudget::Table(vec![0, 1]), Rate::from_ratio(1, 1).unwrap(), 1)
            .unwrap();
        assert!(g.blocks[1].fallback);
        assert_eq!(g.blocks[1].measure, BlockMeasure::uniform(1));
        assert!(g.blocks[0].fallback);
    }

    #[test]
    fn budget_enforced() {
        assert!(matches!(
            mq_to_gale(&ExhaustiveMqLearner, &CountBudget::Length, Rate::from_ratio(1, 1).unwrap(), 5),
            Err(Error::Budget { .. })
        ));
    }
}
