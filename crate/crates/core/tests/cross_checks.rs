use learndim_core::bits::{block_code, boundary_len};
use learndim_core::classes::{density_class, padded_class, sample_language, ConceptClass, SampleMode};
use learndim_core::constructions::{mq_to_gale, online_to_gale, pac_to_gale, padded_gale, CountBudget};
use learndim_core::entropy::Probability;
use learndim_core::gale::{evaluate, BettingStrategy, Rate};
use learndim_core::learners::{erm_pac_learner, padded_mq_learner, predict_zero_learner};
use learndim_core::oracles::{counting_gale, exhaustive_good_set, GoodSetMode};
use proptest::prelude::*;

fn prob(p: i64, q: i64) -> Probability {
    Probability::from_ratio(p, q).unwrap()
}

fn rate(p: i64, q: i64) -> Rate {
    Rate::from_ratio(p, q).unwrap()
}

#[test]
fn counting_martingale_pays_block_sizes() {
    let class = density_class(prob(1, 4)).unwrap();
    let g = counting_gale(&class, rate(1, 1), 4);
    let lang = sample_language(&class, 4, 7, SampleMode::Uniform).unwrap();
    let t = evaluate(&g, lang.bits()).unwrap();
    let mut expected = 0.0;
    for n in 0..=4u32 {
        let members = class.enumerate_blocks(n).unwrap().len() as f64;
        expected += (1u64 << n) as f64 - members.log2();
        let got = t.at(boundary_len(n)).unwrap().0;
        assert!((got - expected).abs() < 1e-9, "n={n}: {got} vs {expected}");
    }
}

#[test]
fn pac_good_sets_match_census_across_epsilons() {
    let class = density_class(prob(1, 4)).unwrap();
    let erm = erm_pac_learner(&class, 2).unwrap();
    let delta = prob(1, 5);
    for eps in [prob(1, 8), prob(1, 4), prob(1, 2)] {
        let g = pac_to_gale(&erm, &eps, &delta, &CountBudget::Length, rate(1, 1), 2).unwrap();
        for b in &g.blocks {
            for (q, good) in b.query_sets.iter().zip(&b.good) {
                let mode = GoodSetMode::Pac {
                    learner: &erm,
                    examples: q,
                    epsilon: &eps,
                    delta: &delta,
                };
                let census = exhaustive_good_set(&mode, b.n).unwrap();
                let codes: Vec<u64> = census.blocks.iter().map(|w| block_code(w)).collect();
                assert_eq!(&codes, good, "eps {eps} n {} examples {q:?}", b.n);
            }
        }
    }
}

#[test]
fn mq_good_sets_match_census() {
    let alpha = prob(1, 2);
    let l = padded_mq_learner(alpha.clone()).unwrap();
    let g = mq_to_gale(&l, &CountBudget::FloorScaled(alpha.clone()), rate(1, 1), 3).unwrap();
    let class = padded_class(alpha).unwrap();
    for b in &g.blocks {
        let census = exhaustive_good_set(&GoodSetMode::Mq { learner: &l, queries: b.queries }, b.n).unwrap();
        let codes: Vec<u64> = census.blocks.iter().map(|w| block_code(w)).collect();
        assert_eq!(codes, b.good);
        assert_eq!(census.blocks, class.enumerate_blocks(b.n).unwrap());
    }
}

fn gales() -> Vec<Box<dyn BettingStrategy>> {
    let quarter = prob(1, 4);
    let l = padded_mq_learner(quarter.clone()).unwrap();
    vec![
        Box::new(padded_gale(prob(1, 2), rate(3, 5)).unwrap()),
        Box::new(online_to_gale(predict_zero_learner(), &quarter, &prob(1, 16), rate(9, 10)).unwrap()),
        Box::new(mq_to_gale(&l, &CountBudget::FloorScaled(quarter), rate(1, 2), 3).unwrap().gale),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gale_condition_along_random_prefixes(w in proptest::collection::vec(any::<bool>(), 0..20)) {
        for g in gales() {
            let s = g.rate().to_f64();
            let here = evaluate(g.as_ref(), &w).unwrap().final_capital().0;
            let mut w0 = w.clone();
            w0.push(false);
            let mut w1 = w.clone();
            w1.push(true);
            let c0 = evaluate(g.as_ref(), &w0).unwrap().final_capital().0;
            let c1 = evaluate(g.as_ref(), &w1).unwrap().final_capital().0;
            if here == f64::NEG_INFINITY {
                prop_assert!(c0 == f64::NEG_INFINITY && c1 == f64::NEG_INFINITY);
            } else {
                let sum = (c0 - here - s).exp2() + (c1 - here - s).exp2();
                prop_assert!((sum - 1.0).abs() < 1e-9, "children sum {}", sum);
            }
        }
    }
}
