//! Gale from a PAC learner. For each example set `Q` of size at most
//! `xi(n)`, a block `w` is good when the learner, fed `Q` labelled by `w`,
//! returns a hypothesis within error `epsilon` of `w`. The block measure
//! averages, over all such `Q`, the uniform distribution on good blocks.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::product::{BlockMeasure, ProductGale};
use super::CountBudget;
use crate::bits::{all_blocks, block_code, block_from_code, block_len, Bits};
use crate::classes::ConceptClass;
use crate::entropy::{binomial_tail_count, count_le_pow2, shannon_entropy, DyadicInterval, Probability};
use crate::error::{Error, Result};
use crate::gale::Rate;
use crate::learners::{error_rate, LabeledExample, PacLearner};

/// Largest `n` for which every example set and every block is enumerated.
pub const PAC_BUDGET: u32 = 3;

/// All subsets of `{0..2^n}` with at most `max_size` elements, by size then
/// lexicographically.
pub fn query_sets(n: u32, max_size: usize) -> Vec<Vec<usize>> {
    let len = block_len(n);
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_size.min(len) {
        let mut next = Vec::new();
        for set in &layer {
            let from = set.last().map_or(0, |&x| x + 1);
            for x in from..len {
                let mut s = set.clone();
                s.push(x);
                next.push(s);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn labelled(q: &[usize], w: &[bool]) -> Vec<LabeledExample> {
    q.iter().map(|&i| (i, w[i])).collect()
}

/// Codes of the blocks that are good for `learner` with respect to `q`.
fn good_blocks(
    learner: &dyn PacLearner,
    n: u32,
    epsilon: &Probability,
    delta: &Probability,
    q: &[usize],
) -> Result<Vec<u64>> {
    let mut good = Vec::new();
    for w in all_blocks(block_len(n)) {
        let h = learner.learn(n, epsilon, delta, &labelled(q, &w))?;
        if &error_rate(&h, &w)? <= epsilon.value() {
            good.push(block_code(&w));
        }
    }
    Ok(good)
}

#[derive(Clone, Debug)]
pub struct PacBlockReport {
    pub n: u32,
    pub xi: usize,
    pub query_sets: Vec<Vec<usize>>,
    /// Good block codes per example set, aligned with `query_sets`.
    pub good: Vec<Vec<u64>>,
    /// Example sets whose good set is empty (uniform fallback).
    pub empty_sets: usize,
    pub measure: BlockMeasure,
}

impl PacBlockReport {
    /// Fraction of example sets with respect to which `block` is good.
    pub fn good_fraction(&self, block: &[bool]) -> BigRational {
        let code = block_code(block);
        let hits = self.good.iter().filter(|g| g.binary_search(&code).is_ok()).count();
        BigRational::new(hits.into(), self.query_sets.len().into())
    }
}

#[derive(Clone, Debug)]
pub struct PacGale {
    pub epsilon: Probability,
    pub delta: Probability,
    pub blocks: Vec<PacBlockReport>,
    pub gale: ProductGale,
}

pub fn pac_to_gale(
    learner: &dyn PacLearner,
    epsilon: &Probability,
    delta: &Probability,
    xi: &CountBudget,
    s: Rate,
    n_max: u32,
) -> Result<PacGale> {
    if n_max > PAC_BUDGET {
        return Err(Error::budget("pac enumeration n", PAC_BUDGET as usize, n_max as usize));
    }
    let mut blocks = Vec::new();
    for n in 0..=n_max {
        let size = xi.at(n)?;
        let sets = query_sets(n, size);
        let good = sets
            .par_iter()
            .map(|q| good_blocks(learner, n, epsilon, delta, q))
            .collect::<Result<Vec<_>>>()?;
        let leaves = 1usize << block_len(n);
        let mut weights = vec![BigRational::zero(); leaves];
        let mut empty_sets = 0;
        for g in &good {
            if g.is_empty() {
                empty_sets += 1;
                continue;
            }
            let share = BigRational::new(BigUint::one().into(), g.len().into());
            for &c in g {
                weights[c as usize] += &share;
            }
        }
        if empty_sets > 0 {
            let share = BigRational::new(empty_sets.into(), leaves.into());
            for w in &mut weights {
                *w += &share;
            }
        }
        // Average over example sets.
        let count = BigRational::from_integer(sets.len().into());
        for w in &mut weights {
            *w /= &count;
        }
        let measure = BlockMeasure::from_leaf_weights(n, weights)?;
        blocks.push(PacBlockReport {
            n,
            xi: size,
            query_sets: sets,
            good,
            empty_sets,
            measure,
        });
    }
    let gale = ProductGale::new(s, blocks.iter().map(|b| b.measure.clone()).collect())?;
    Ok(PacGale {
        epsilon: epsilon.clone(),
        delta: delta.clone(),
        blocks,
        gale,
    })
}

/// Per-target view of one block of a [`PacGale`].
#[derive(Clone, Debug)]
pub struct PacTargetReport {
    pub n: u32,
    pub block: Bits,
    pub good_fraction: BigRational,
    pub measure: BigRational,
    /// `measure >= good_fraction / 2^(H(epsilon) 2^n + xi(n))`, certified.
    pub chain_holds: bool,
}

impl PacGale {
    pub fn target_reports(&self, class: &dyn ConceptClass) -> Result<Vec<PacTargetReport>> {
        let h = shannon_entropy(&self.epsilon);
        let mut out = Vec::new();
        for b in &self.blocks {
            let len = block_len(b.n);
            let budget = h
                .interval()
                .scale(&BigRational::from_integer(len.into()))
                .add(&DyadicInterval::exact_integer(b.xi as i64));
            for block in class.enumerate_blocks(b.n)? {
                let good_fraction = b.good_fraction(&block);
                let measure = b.measure.leaf(&block)?.clone();
                let chain_holds = if good_fraction.is_zero() {
                    true
                } else if measure.is_zero() {
                    false
                } else {
                    let lhs = DyadicInterval::log2(&good_fraction)?;
                    let rhs = DyadicInterval::log2(&measure)?.add(&budget);
                    lhs.certainly_le(&rhs)
                };
                out.push(PacTargetReport {
                    n: b.n,
                    block,
                    good_fraction,
                    measure,
                    chain_holds,
                });
            }
        }
        Ok(out)
    }
}

/// `#{w : error_rate(h, w) <= epsilon}` by enumeration.
pub fn approx_count(h: &[bool], epsilon: &Probability) -> Result<BigUint> {
    let mut count = 0u64;
    for w in all_blocks(h.len()) {
        if &error_rate(h, &w)? <= epsilon.value() {
            count += 1;
        }
    }
    Ok(count.into())
}

/// Exhaustive check of the two counting bounds behind the PAC gale at one
/// length: good sets are at most `2^(H(epsilon) 2^n + xi)`, and every
/// epsilon-ball has exactly the binomial-tail size, at most
/// `2^(H(epsilon) 2^n)`.
#[derive(Clone, Debug)]
pub struct GoodSetBounds {
    pub n: u32,
    pub xi: usize,
    pub query_sets: usize,
    pub largest_good_set: usize,
    /// Log2 of the good-set bound, as an enclosure.
    pub good_bound_log2: DyadicInterval,
    pub good_sets_within: bool,
    pub ball_size: BigUint,
    pub balls_match_tail: bool,
    pub ball_within: bool,
}

impl GoodSetBounds {
    pub fn passed(&self) -> bool {
        self.good_sets_within && self.balls_match_tail && self.ball_within
    }
}

pub fn good_set_bounds(
    learner: &dyn PacLearner,
    epsilon: &Probability,
    delta: &Probability,
    xi: usize,
    n: u32,
) -> Result<GoodSetBounds> {
    if n > PAC_BUDGET {
        return Err(Error::budget("pac enumeration n", PAC_BUDGET as usize, n as usize));
    }
    let len = block_len(n);
    let sets = query_sets(n, xi);
    let good = sets
        .par_iter()
        .map(|q| good_blocks(learner, n, epsilon, delta, q))
        .collect::<Result<Vec<_>>>()?;
    let ball_log2 = shannon_entropy(epsilon)
        .interval()
        .scale(&BigRational::from_integer(len.into()));
    let good_bound_log2 = ball_log2.add(&DyadicInterval::exact_integer(xi as i64));
    let good_sets_within = good
        .iter()
        .all(|g| count_le_pow2(&BigUint::from(g.len()), &good_bound_log2) == Some(true));
    let k = epsilon.floor_scaled(n) as u64;
    let ball_size = binomial_tail_count(len as u64, k)?;
    let balls = (0..1u64 << len)
        .into_par_iter()
        .map(|c| approx_count(&block_from_code(c, len), epsilon))
        .collect::<Result<Vec<_>>>()?;
    Ok(GoodSetBounds {
        n,
        xi,
        query_sets: sets.len(),
        largest_good_set: good.iter().map(Vec::len).max().unwrap_or(0),
        good_bound_log2,
        good_sets_within,
        balls_match_tail: balls.iter().all(|b| *b == ball_size),
        ball_within: count_le_pow2(&ball_size, &ball_log2) == Some(true),
        ball_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::density_class;
    use crate::learners::erm_pac_learner;
    use crate::numeric::rational;

    fn prob(p: i64, q: i64) -> Probability {
        Probability::from_ratio(p, q).unwrap()
    }

    #[test]
    fn query_set_counts() {
        assert_eq!(query_sets(3, 3).len(), 93);
        assert_eq!(query_sets(2, 2).len(), 11);
        assert_eq!(query_sets(0, 5), vec![Vec::<usize>::new(), vec![0]]);
        assert_eq!(query_sets(1, 1), vec![vec![], vec![0], vec![1]]);
    }

    #[test]
    fn tables_are_martingales() {
        let class = density_class(prob(1, 4)).unwrap();
        let erm = erm_pac_learner(&class, 3).unwrap();
        let g = pac_to_gale(&erm, &prob(1, 4), &prob(1, 10), &CountBudget::Length, Rate::from_ratio(1, 1).unwrap(), 2)
            .unwrap();
        for b in &g.blocks {
            assert_eq!(b.measure.value(&[]).unwrap(), &BigRational::one());
            assert!(b.measure.as_martingale().unwrap().verify_martingale_identity().unwrap().passed());
        }
        assert!(g.target_reports(&class).unwrap().iter().all(|r| r.chain_holds));
    }

    #[test]
    fn leaf_value_for_always_good_block() {
        // epsilon = 1 makes every block good for every example set.
        let class = density_class(prob(1, 2)).unwrap();
        let erm = erm_pac_learner(&class, 2).unwrap();
        let g = pac_to_gale(&erm, &prob(1, 1), &prob(1, 10), &CountBudget::Length, Rate::from_ratio(1, 1).unwrap(), 2)
            .unwrap();
        let b = &g.blocks[2];
        let q = b.query_sets.len() as i64;
        let want: BigRational = b.good.iter().map(|g| rational(1, q * g.len() as i64)).sum();
        assert_eq!(b.measure.leaf(&[true, true, true, true]).unwrap(), &want);
        assert_eq!(want, rational(1, 16));
    }

    #[test]
    fn empty_good_sets_fall_back_to_uniform() {
        struct Constant;
        impl PacLearner for Constant {
            fn learn(&self, n: u32, _: &Probability, _: &Probability, sample: &[LabeledExample]) -> Result<Bits> {
                // The constant block opposite to the first label: never
                // exact on a nonempty example set.
                let flip = sample.first().is_some_and(|&(_, l)| !l);
                Ok(vec![flip; block_len(n)])
            }
        }
        let g = pac_to_gale(&Constant, &prob(0, 1), &prob(1, 2), &CountBudget::Table(vec![1, 1]), Rate::from_ratio(1, 1).unwrap(), 1)
            .unwrap();
        assert!(g.blocks[1].empty_sets > 0);
        assert!(g.blocks[1].measure.as_martingale().unwrap().verify_martingale_identity().unwrap().passed());
        assert_eq!(g.blocks[1].measure.value(&[]).unwrap(), &BigRational::one());
    }

    #[test]
    fn good_set_bounds_small() {
        let class = density_class(prob(1, 4)).unwrap();
        let erm = erm_pac_learner(&class, 2).unwrap();
        let r = good_set_bounds(&erm, &prob(1, 4), &prob(1, 10), 2, 2).unwrap();
        assert_eq!(r.query_sets, 11);
        assert_eq!(r.ball_size, BigUint::from(5u32));
        assert!(r.passed());
    }

    #[test]
    fn pac_budget_enforced() {
        let class = density_class(prob(1, 4)).unwrap();
        let erm = erm_pac_learner(&class, 3).unwrap();
        assert!(matches!(
            pac_to_gale(&erm, &prob(1, 4), &prob(1, 10), &CountBudget::Length, Rate::from_ratio(1, 1).unwrap(), 4),
            Err(Error::Budget { .. })
        ));
    }
}
