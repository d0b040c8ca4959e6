//! Learners for the online, membership-query, equivalence-query and PAC
//! models, restricted to the block representation of concepts.
//!
//! Online learners see the examples of block `n` in lexicographic order;
//! the history is the block prefix of correct labels seen so far.

use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::bits::{block_len, Bits};
use crate::classes::{ConceptClass, PaddedClass};
use crate::entropy::Probability;
use crate::error::{Error, Result};

pub trait OnlineLearner: Send + Sync {
    /// Prediction for example `history.len()` of block `n`.
    fn predict(&self, n: u32, history: &[bool]) -> Result<bool>;
}

impl<T: OnlineLearner + ?Sized> OnlineLearner for &T {
    fn predict(&self, n: u32, history: &[bool]) -> Result<bool> {
        (**self).predict(n, history)
    }
}

impl<T: OnlineLearner + ?Sized> OnlineLearner for Box<T> {
    fn predict(&self, n: u32, history: &[bool]) -> Result<bool> {
        (**self).predict(n, history)
    }
}

/// Predicts 0 on every example.
#[derive(Clone, Copy, Debug, Default)]
pub struct PredictZero;

pub fn predict_zero_learner() -> PredictZero {
    PredictZero
}

impl OnlineLearner for PredictZero {
    fn predict(&self, _n: u32, _history: &[bool]) -> Result<bool> {
        Ok(false)
    }
}

/// `n` with `2^n = len`, if `len` is a power of two.
pub fn block_level(len: usize) -> Result<u32> {
    if len.is_power_of_two() {
        Ok(len.trailing_zeros())
    } else {
        Err(Error::Domain(format!("block length {len} is not a power of two")))
    }
}

fn enumerate_levels(class: &dyn ConceptClass, n_max: u32) -> Result<BTreeMap<u32, Vec<Bits>>> {
    (0..=n_max)
        .map(|n| class.enumerate_blocks(n).map(|bs| (n, bs)))
        .collect()
}

fn level(blocks: &BTreeMap<u32, Vec<Bits>>, n: u32) -> Result<&[Bits]> {
    let max = blocks.keys().next_back().copied().unwrap_or(0);
    blocks
        .get(&n)
        .map(Vec::as_slice)
        .ok_or_else(|| Error::budget("learner level n", max as usize, n as usize))
}

/// Majority vote over the enumerated class members consistent with the
/// history; ties predict 0.
#[derive(Clone, Debug)]
pub struct HalvingLearner {
    blocks: BTreeMap<u32, Vec<Bits>>,
}

pub fn halving_learner(class: &dyn ConceptClass, n_max: u32) -> Result<HalvingLearner> {
    Ok(HalvingLearner {
        blocks: enumerate_levels(class, n_max)?,
    })
}

impl OnlineLearner for HalvingLearner {
    fn predict(&self, n: u32, history: &[bool]) -> Result<bool> {
        let k = history.len();
        let (mut zeros, mut ones) = (0usize, 0usize);
        for b in level(&self.blocks, n)?.iter().filter(|b| b.starts_with(history)) {
            if b[k] {
                ones += 1;
            } else {
                zeros += 1;
            }
        }
        if zeros + ones == 0 {
            return Err(Error::InconsistentHistory { n });
        }
        Ok(ones > zeros)
    }
}

/// Sequential mistakes on `block` presented in lexicographic order.
pub fn count_mistakes(learner: &dyn OnlineLearner, block: &[bool]) -> Result<usize> {
    let n = block_level(block.len())?;
    let mut mistakes = 0;
    for k in 0..block.len() {
        if learner.predict(n, &block[..k])? != block[k] {
            mistakes += 1;
        }
    }
    Ok(mistakes)
}

/// Answer of an equivalence oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EqAnswer {
    Yes,
    /// A position where hypothesis and target disagree.
    Counterexample(usize),
}

/// State of one equivalence-query learning run.
pub trait EqSession {
    fn hypothesis(&self) -> &[bool];
    /// Refine after a counterexample at `pos`; its label is the complement
    /// of the current hypothesis there.
    fn counterexample(&mut self, pos: usize) -> Result<()>;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EqRun {
    pub hypothesis: Bits,
    /// Equivalence queries asked, including the final one answered `Yes`.
    pub queries: usize,
    pub log: Vec<(Bits, EqAnswer)>,
}

pub trait EqLearner: Send + Sync {
    fn start(&self, n: u32) -> Result<Box<dyn EqSession + '_>>;

    /// Query until the oracle says `Yes`, asking at most `max_queries`.
    fn run(
        &self,
        n: u32,
        oracle: &mut dyn FnMut(&[bool]) -> EqAnswer,
        max_queries: usize,
    ) -> Result<EqRun> {
        let mut session = self.start(n)?;
        let mut log = Vec::new();
        loop {
            if log.len() == max_queries {
                return Err(Error::budget("equivalence queries", max_queries, max_queries + 1));
            }
            let h = session.hypothesis().to_vec();
            let answer = oracle(&h);
            log.push((h.clone(), answer));
            match answer {
                EqAnswer::Yes => {
                    return Ok(EqRun {
                        hypothesis: h,
                        queries: log.len(),
                        log,
                    })
                }
                EqAnswer::Counterexample(pos) => session.counterexample(pos)?,
            }
        }
    }
}

impl<T: EqLearner + ?Sized> EqLearner for &T {
    fn start(&self, n: u32) -> Result<Box<dyn EqSession + '_>> {
        (**self).start(n)
    }
}

/// Equivalence oracle for `target` that returns the least disagreeing
/// position.
pub fn least_counterexample_oracle(target: &[bool]) -> impl FnMut(&[bool]) -> EqAnswer + '_ {
    move |h: &[bool]| match h.iter().zip(target).position(|(a, b)| a != b) {
        Some(pos) => EqAnswer::Counterexample(pos),
        None => EqAnswer::Yes,
    }
}

/// Starts from the all-zero hypothesis and flips every counterexample bit.
#[derive(Clone, Copy, Debug, Default)]
pub struct FlipEqLearner;

struct FlipSession(Bits);

impl EqSession for FlipSession {
    fn hypothesis(&self) -> &[bool] {
        &self.0
    }

    fn counterexample(&mut self, pos: usize) -> Result<()> {
        let bit = self
            .0
            .get_mut(pos)
            .ok_or_else(|| Error::Domain(format!("counterexample {pos} outside block")))?;
        *bit = !*bit;
        Ok(())
    }
}

impl EqLearner for FlipEqLearner {
    fn start(&self, n: u32) -> Result<Box<dyn EqSession + '_>> {
        Ok(Box::new(FlipSession(vec![false; block_len(n)])))
    }
}

/// Proposes the lexicographically least class member consistent with every
/// counterexample received so far.
#[derive(Clone, Debug)]
pub struct ConsistentEqLearner {
    blocks: BTreeMap<u32, Vec<Bits>>,
}

pub fn consistent_eq_learner(class: &dyn ConceptClass, n_max: u32) -> Result<ConsistentEqLearner> {
    Ok(ConsistentEqLearner {
        blocks: enumerate_levels(class, n_max)?,
    })
}

struct ConsistentSession<'a> {
    n: u32,
    members: &'a [Bits],
    labels: Vec<(usize, bool)>,
    current: Bits,
}

impl ConsistentSession<'_> {
    fn refresh(&mut self) -> Result<()> {
        let labels = &self.labels;
        self.current = self
            .members
            .iter()
            .find(|b| labels.iter().all(|&(p, l)| b[p] == l))
            .cloned()
            .ok_or(Error::InconsistentHistory { n: self.n })?;
        Ok(())
    }
}

impl EqSession for ConsistentSession<'_> {
    fn hypothesis(&self) -> &[bool] {
        &self.current
    }

    fn counterexample(&mut self, pos: usize) -> Result<()> {
        if pos >= self.current.len() {
            return Err(Error::Domain(format!("counterexample {pos} outside block")));
        }
        self.labels.push((pos, !self.current[pos]));
        self.refresh()
    }
}

impl EqLearner for ConsistentEqLearner {
    fn start(&self, n: u32) -> Result<Box<dyn EqSession + '_>> {
        let mut s = ConsistentSession {
            n,
            members: level(&self.blocks, n)?,
            labels: Vec::new(),
            current: Vec::new(),
        };
        s.refresh()?;
        Ok(Box::new(s))
    }
}

/// Online learner obtained from an equivalence-query learner: predict with
/// the current hypothesis and hand every realised mistake back as a
/// counterexample.
#[derive(Clone, Debug)]
pub struct EqToOnline<E> {
    eq: E,
    max_queries: usize,
}

pub fn eq_to_online<E: EqLearner>(eq: E, max_queries: usize) -> EqToOnline<E> {
    EqToOnline { eq, max_queries }
}

impl<E: EqLearner> OnlineLearner for EqToOnline<E> {
    fn predict(&self, n: u32, history: &[bool]) -> Result<bool> {
        let len = block_len(n);
        if history.len() >= len {
            return Err(Error::Domain("history covers the whole block".into()));
        }
        let mut session = self.eq.start(n)?;
        let mut asked = 1;
        for (k, &label) in history.iter().enumerate() {
            if session.hypothesis()[k] != label {
                asked += 1;
                if asked > self.max_queries {
                    return Err(Error::budget("equivalence queries", self.max_queries, asked));
                }
                session.counterexample(k)?;
            }
        }
        Ok(session.hypothesis()[history.len()])
    }
}

/// Membership oracle for a target block with a query budget.
#[derive(Debug)]
pub struct MembershipOracle<'a> {
    target: &'a [bool],
    budget: usize,
    asked: Vec<usize>,
}

impl<'a> MembershipOracle<'a> {
    pub fn new(target: &'a [bool], budget: usize) -> Self {
        MembershipOracle {
            target,
            budget,
            asked: Vec::new(),
        }
    }

    pub fn ask(&mut self, pos: usize) -> Result<bool> {
        if self.asked.len() == self.budget {
            return Err(Error::budget("membership queries", self.budget, self.budget + 1));
        }
        let bit = *self
            .target
            .get(pos)
            .ok_or_else(|| Error::Domain(format!("query {pos} outside block")))?;
        self.asked.push(pos);
        Ok(bit)
    }

    pub fn queries_used(&self) -> usize {
        self.asked.len()
    }

    pub fn queried_positions(&self) -> &[usize] {
        &self.asked
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MqRun {
    pub hypothesis: Bits,
    pub queries_used: usize,
}

pub trait MqLearner: Send + Sync {
    /// Hypothesis block of length `2^n`, built from oracle answers only.
    fn learn(&self, n: u32, oracle: &mut MembershipOracle<'_>) -> Result<Bits>;
}

impl<T: MqLearner + ?Sized> MqLearner for &T {
    fn learn(&self, n: u32, oracle: &mut MembershipOracle<'_>) -> Result<Bits> {
        (**self).learn(n, oracle)
    }
}

/// Run `learner` against `target` with `budget` queries. Exceeding the
/// budget is reported as [`Error::Budget`].
pub fn run_mq(learner: &dyn MqLearner, n: u32, target: &[bool], budget: usize) -> Result<MqRun> {
    if target.len() != block_len(n) {
        return Err(Error::Domain(format!("target has length {} at n = {n}", target.len())));
    }
    let mut oracle = MembershipOracle::new(target, budget);
    let hypothesis = learner.learn(n, &mut oracle)?;
    Ok(MqRun {
        hypothesis,
        queries_used: oracle.queries_used(),
    })
}

/// Queries the free prefix of the block and pads with zeros.
#[derive(Clone, Debug)]
pub struct PaddedMqLearner {
    class: PaddedClass,
}

pub fn padded_mq_learner(alpha: Probability) -> Result<PaddedMqLearner> {
    Ok(PaddedMqLearner {
        class: crate::classes::padded_class(alpha)?,
    })
}

impl MqLearner for PaddedMqLearner {
    fn learn(&self, n: u32, oracle: &mut MembershipOracle<'_>) -> Result<Bits> {
        let mut h = vec![false; block_len(n)];
        for (i, bit) in h.iter_mut().enumerate().take(self.class.free_count(n)) {
            *bit = oracle.ask(i)?;
        }
        Ok(h)
    }
}

/// Queries every position.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExhaustiveMqLearner;

impl MqLearner for ExhaustiveMqLearner {
    fn learn(&self, n: u32, oracle: &mut MembershipOracle<'_>) -> Result<Bits> {
        (0..block_len(n)).map(|i| oracle.ask(i)).collect()
    }
}

/// A labelled example: position inside the block and its label.
pub type LabeledExample = (usize, bool);

pub trait PacLearner: Send + Sync {
    fn learn(
        &self,
        n: u32,
        epsilon: &Probability,
        delta: &Probability,
        sample: &[LabeledExample],
    ) -> Result<Bits>;
}

impl<T: PacLearner + ?Sized> PacLearner for &T {
    fn learn(&self, n: u32, epsilon: &Probability, delta: &Probability, sample: &[LabeledExample]) -> Result<Bits> {
        (**self).learn(n, epsilon, delta, sample)
    }
}

/// Empirical risk minimiser over an enumerated class: the least member
/// consistent with the sample, else the least member with the fewest
/// disagreements. The sample is treated as a set.
#[derive(Clone, Debug)]
pub struct ErmLearner {
    blocks: BTreeMap<u32, Vec<Bits>>,
}

pub fn erm_pac_learner(class: &dyn ConceptClass, n_max: u32) -> Result<ErmLearner> {
    Ok(ErmLearner {
        blocks: enumerate_levels(class, n_max)?,
    })
}

impl PacLearner for ErmLearner {
    fn learn(
        &self,
        n: u32,
        _epsilon: &Probability,
        _delta: &Probability,
        sample: &[LabeledExample],
    ) -> Result<Bits> {
        let mut set = sample.to_vec();
        set.sort_unstable();
        set.dedup();
        let members = level(&self.blocks, n)?;
        members
            .iter()
            .map(|b| (set.iter().filter(|&&(p, l)| b.get(p) != Some(&l)).count(), b))
            .min_by_key(|&(miss, _)| miss)
            .map(|(_, b)| b.clone())
            .ok_or(Error::EmptyClass { n })
    }
}

/// Fraction of positions where `h` and `c` differ (uniform distribution).
pub fn error_rate(h: &[bool], c: &[bool]) -> Result<BigRational> {
    if h.len() != c.len() || h.is_empty() {
        return Err(Error::Domain(format!(
            "hypothesis length {} vs target length {}",
            h.len(),
            c.len()
        )));
    }
    let diff = h.iter().zip(c).filter(|(a, b)| a != b).count();
    Ok(crate::numeric::rational(diff as i64, h.len() as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::{all_blocks, parse_bits, popcount};
    use crate::classes::{density_class, padded_class, ExplicitClass};
    use crate::numeric::rational;
    use proptest::prelude::*;

    fn prob(p: i64, q: i64) -> Probability {
        Probability::from_ratio(p, q).unwrap()
    }

    fn bits(s: &str) -> Bits {
        parse_bits(s).unwrap()
    }

    #[test]
    fn predict_zero_mistakes_are_ones() {
        let z = predict_zero_learner();
        assert!(!z.predict(3, &bits("101")).unwrap());
        assert_eq!(count_mistakes(&z, &bits("00000000")).unwrap(), 0);
        assert_eq!(count_mistakes(&z, &bits("01010100")).unwrap(), 3);
        let c = density_class(prob(1, 4)).unwrap();
        for b in c.enumerate_blocks(3).unwrap() {
            assert!(count_mistakes(&z, &b).unwrap() <= 2);
        }
        assert!(count_mistakes(&z, &bits("010")).is_err());
    }

    #[test]
    fn halving_on_singleton_is_perfect() {
        let target = bits("0110");
        let c = ExplicitClass::new("one").with_blocks(2, vec![target.clone()]).unwrap();
        let h = halving_learner(&c, 2).unwrap();
        assert_eq!(count_mistakes(&h, &target).unwrap(), 0);
        assert!(matches!(
            count_mistakes(&h, &bits("1111")),
            Err(Error::InconsistentHistory { n: 2 })
        ));
    }

    #[test]
    fn halving_mistakes_within_log_of_class_size() {
        // Classes of 2^k blocks: all settings of k chosen positions.
        for n in 0..=3u32 {
            let len = block_len(n);
            for k in 0..=len.min(4) {
                let blocks: Vec<Bits> = all_blocks(len).filter(|b| popcount(&b[k..]) == 0).collect();
                let c = ExplicitClass::new("cube").with_blocks(n, blocks.clone()).unwrap();
                let h = halving_learner(&c, n).unwrap();
                for b in &blocks {
                    assert!(count_mistakes(&h, b).unwrap() <= k);
                }
            }
        }
        let c = density_class(prob(1, 4)).unwrap();
        let h = halving_learner(&c, 3).unwrap();
        let members = c.enumerate_blocks(3).unwrap();
        assert_eq!(members.len(), 37);
        for b in &members {
            assert!(count_mistakes(&h, b).unwrap() <= 5);
        }
    }

    #[test]
    fn eq_learner_guessing_target_makes_no_mistakes() {
        let target = bits("10010110");
        let c = ExplicitClass::new("one").with_blocks(3, vec![target.clone()]).unwrap();
        let eq = consistent_eq_learner(&c, 3).unwrap();
        let run = eq.run(3, &mut least_counterexample_oracle(&target), 10).unwrap();
        assert_eq!(run.queries, 1);
        let online = eq_to_online(&eq, 10);
        assert_eq!(count_mistakes(&online, &target).unwrap(), 0);
    }

    #[test]
    fn flip_reduction_on_padded_half() {
        let c = padded_class(prob(1, 2)).unwrap();
        let online = eq_to_online(FlipEqLearner, 16);
        for b in c.enumerate_blocks(2).unwrap() {
            let run = FlipEqLearner.run(2, &mut least_counterexample_oracle(&b), 16).unwrap();
            let m = count_mistakes(&online, &b).unwrap();
            assert!(m <= 2);
            assert!(m <= run.queries);
            assert_eq!(run.hypothesis, b);
        }
    }

    #[test]
    fn eq_budget_is_enforced() {
        let target = bits("1111");
        let err = FlipEqLearner.run(2, &mut least_counterexample_oracle(&target), 3).unwrap_err();
        assert!(matches!(err, Error::Budget { .. }));
        let online = eq_to_online(FlipEqLearner, 2);
        assert!(matches!(count_mistakes(&online, &target), Err(Error::Budget { .. })));
    }

    #[test]
    fn padded_mq_examples() {
        let l = padded_mq_learner(prob(1, 4)).unwrap();
        let c = padded_class(prob(1, 4)).unwrap();
        for b in c.enumerate_blocks(3).unwrap() {
            let run = run_mq(&l, 3, &b, 2).unwrap();
            assert_eq!(run.hypothesis, b);
            assert_eq!(run.queries_used, 2);
        }
        let half = padded_mq_learner(prob(1, 2)).unwrap();
        let run = run_mq(&half, 0, &bits("1"), 0).unwrap();
        assert_eq!(run.hypothesis, bits("0"));
        assert_eq!(run.queries_used, 0);
        let run = run_mq(&l, 3, &bits("10000001"), 2).unwrap();
        assert_eq!(run.hypothesis, bits("10000000"));
    }

    #[test]
    fn padded_mq_recovers_every_member() {
        for (p, q) in [(1, 4), (1, 2), (3, 4)] {
            let l = padded_mq_learner(prob(p, q)).unwrap();
            let c = padded_class(prob(p, q)).unwrap();
            for n in 0..=4 {
                let budget = c.free_count(n);
                for b in c.enumerate_blocks(n).unwrap() {
                    let run = run_mq(&l, n, &b, budget).unwrap();
                    assert_eq!(run.hypothesis, b);
                    assert_eq!(run.queries_used, budget);
                }
            }
        }
    }

    #[test]
    fn mq_budget_exhaustion() {
        let err = run_mq(&ExhaustiveMqLearner, 2, &bits("0101"), 3).unwrap_err();
        assert!(matches!(err, Error::Budget { .. }));
        assert!(run_mq(&ExhaustiveMqLearner, 2, &bits("010"), 4).is_err());
    }

    #[test]
    fn erm_examples() {
        let c = density_class(prob(1, 4)).unwrap();
        let erm = erm_pac_learner(&c, 3).unwrap();
        let (e, d) = (prob(1, 4), prob(1, 10));
        let member = bits("00100100");
        let full: Vec<_> = member.iter().copied().enumerate().collect();
        assert_eq!(erm.learn(3, &e, &d, &full).unwrap(), member);
        assert_eq!(erm.learn(3, &e, &d, &[]).unwrap(), bits("00000000"));
        assert_eq!(erm.learn(2, &e, &d, &[(0, true)]).unwrap(), bits("1000"));
        // Inconsistent with the class: fewest disagreements wins.
        assert_eq!(erm.learn(2, &e, &d, &[(0, true), (1, true), (2, true)]).unwrap(), bits("0010"));
        let empty = ExplicitClass::new("empty").with_blocks(0, vec![]).unwrap();
        let erm0 = erm_pac_learner(&empty, 0).unwrap();
        assert!(matches!(erm0.learn(0, &e, &d, &[]), Err(Error::EmptyClass { n: 0 })));
    }

    #[test]
    fn error_rate_examples() {
        let c = bits("01101001");
        assert_eq!(error_rate(&c, &c).unwrap(), rational(0, 1));
        let flipped: Bits = c.iter().map(|b| !b).collect();
        assert_eq!(error_rate(&flipped, &c).unwrap(), rational(1, 1));
        assert_eq!(error_rate(&bits("11101001"), &c).unwrap(), rational(1, 8));
        assert!(error_rate(&bits("0"), &c).is_err());
    }

    proptest! {
        #[test]
        fn erm_ignores_order_and_duplicates(
            picks in proptest::collection::vec((0usize..8, any::<bool>()), 0..6),
            dup in 0usize..6,
            seed in any::<u64>(),
        ) {
            let c = density_class(prob(3, 8)).unwrap();
            let erm = erm_pac_learner(&c, 3).unwrap();
            let (e, d) = (prob(1, 4), prob(1, 10));
            let base = erm.learn(3, &e, &d, &picks).unwrap();
            let mut shuffled = picks.clone();
            if !picks.is_empty() {
                shuffled.push(picks[dup % picks.len()]);
            }
            let k = shuffled.len().max(1);
            shuffled.rotate_left((seed as usize) % k);
            shuffled.reverse();
            prop_assert_eq!(base, erm.learn(3, &e, &d, &shuffled).unwrap());
        }
    }
}
