//! Verification suites: exact identities, exhaustive counting checks and
//! the desk-scale growth checks. Each suite yields one line per check.

use learndim_core::bits::{all_blocks, block_code, boundary_len};
use learndim_core::classes::{density_class, padded_class, sample_language, ConceptClass, SampleMode};
use learndim_core::constructions::{
    good_set_bounds, mq_to_gale, online_to_gale, pac_to_gale, padded_gale, CountBudget,
};
use learndim_core::entropy::{choose_delta, inverse_entropy, shannon_entropy, Probability};
use learndim_core::gale::{evaluate, freeze, growth_exponent, BettingStrategy, Rate};
use learndim_core::learners::{
    consistent_eq_learner, count_mistakes, eq_to_online, erm_pac_learner, halving_learner,
    padded_mq_learner, predict_zero_learner, EqLearner, FlipEqLearner,
};
use learndim_core::numeric::rational;
use learndim_core::oracles::{counting_gale, exhaustive_good_set, worst_case_eq_queries, GoodSetMode};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;

use crate::commands::run_diagonalize;
use crate::config::{grid_from_step, ExperimentConfig};
use crate::exit::{CliError, CliResult};
use crate::growth::{dyadic_above, run_growth, BOUND_SLACK};
use crate::output::Table;
use crate::scan::run_dimension_scan;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

pub const SUITES: [&str; 11] = [
    "martingale-identities",
    "good-set-bounds",
    "diagonalization",
    "online-chain",
    "scan",
    "pac-structure",
    "mq-exact",
    "padded",
    "eq-reduction",
    "freeze-agreement",
    "determinism",
];

/// Depth to which every construction is tabulated.
pub const FREEZE_DEPTH: usize = 12;

pub fn run_verify(suite: &str) -> CliResult<Vec<Check>> {
    if suite == "all" {
        let mut out = Vec::new();
        for s in SUITES {
            out.extend(run_verify(s)?);
        }
        return Ok(out);
    }
    let mut log = Log::new(
        SUITES
            .into_iter()
            .find(|s| *s == suite)
            .ok_or_else(|| CliError::usage(format!("unknown suite {suite:?}; known: all, {}", SUITES.join(", "))))?,
    );
    match suite {
        "martingale-identities" => martingale_identities(&mut log)?,
        "good-set-bounds" => good_set_bound_checks(&mut log)?,
        "diagonalization" => diagonalization(&mut log)?,
        "online-chain" => online_chain(&mut log)?,
        "scan" => scan(&mut log)?,
        "pac-structure" => pac_structure(&mut log)?,
        "mq-exact" => mq_exact(&mut log)?,
        "padded" => padded(&mut log)?,
        "eq-reduction" => eq_reduction(&mut log)?,
        "freeze-agreement" => freeze_agreement(&mut log)?,
        "determinism" => determinism(&mut log)?,
        _ => unreachable!(),
    }
    Ok(log.checks)
}

pub fn checks_table(checks: &[Check]) -> Table {
    let mut t = Table::new(&["suite", "check", "passed", "detail"]);
    for c in checks {
        t.push(vec![
            c.suite.into(),
            c.name.replace(',', ";").into(),
            c.passed.into(),
            c.detail.replace(',', ";").into(),
        ]);
    }
    t
}

struct Log {
    suite: &'static str,
    checks: Vec<Check>,
}

impl Log {
    fn new(suite: &'static str) -> Self {
        Log {
            suite,
            checks: Vec::new(),
        }
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            suite: self.suite,
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }
}

fn prob(p: i64, q: i64) -> Probability {
    Probability::from_ratio(p, q).expect("valid probability")
}

fn rate(p: i64, q: i64) -> Rate {
    Rate::from_ratio(p, q).expect("valid rate")
}

/// `s` certainly at least `H(1/4) + 1/10`, dyadic with 20 fractional bits.
pub fn online_rate() -> Rate {
    let h = shannon_entropy(&prob(1, 4));
    Rate::new(dyadic_above(h.interval(), 20) + rational(1, 10)).expect("positive")
}

/// Every construction at desk-scale parameters, as `(label, strategy)`.
fn with_constructions(mut f: impl FnMut(&str, &dyn BettingStrategy) -> CliResult<()>) -> CliResult<()> {
    let quarter = prob(1, 4);
    let density = density_class(quarter.clone())?;
    let dense38 = density_class(prob(3, 8))?;
    let online = online_to_gale(predict_zero_learner(), &quarter, &prob(1, 16), online_rate())?;
    f("online/predict-zero", &online)?;
    let halving = online_to_gale(halving_learner(&dense38, 3)?, &prob(3, 8), &prob(1, 16), rate(1, 1))?;
    f("online/halving", &halving)?;
    let eq = online_to_gale(eq_to_online(FlipEqLearner, 1 << 10), &quarter, &prob(1, 16), rate(1, 1))?;
    f("online/eq-flip", &eq)?;
    let erm = erm_pac_learner(&density, 3)?;
    let pac = pac_to_gale(&erm, &quarter, &prob(1, 10), &CountBudget::Length, rate(1, 1), 3)?;
    f("pac/erm", &pac.gale)?;
    let mq_learner = padded_mq_learner(quarter.clone())?;
    let mq = mq_to_gale(&mq_learner, &CountBudget::FloorScaled(quarter.clone()), rate(1, 2), 4)?;
    f("mq/padded", &mq.gale)?;
    f("padded", &padded_gale(prob(1, 2), rate(3, 5))?)?;
    f("counting/density", &counting_gale(&density, rate(1, 1), 4))?;
    Ok(())
}

fn martingale_identities(log: &mut Log) -> CliResult<()> {
    with_constructions(|label, g| {
        let r = freeze(g, FREEZE_DEPTH)?.verify_martingale_identity()?;
        log.check(
            format!("{label} frozen to depth {FREEZE_DEPTH}"),
            r.passed(),
            format!("{} nodes checked", r.nodes_checked),
        );
        Ok(())
    })?;
    let quarter = prob(1, 4);
    let erm = erm_pac_learner(&density_class(quarter.clone())?, 3)?;
    let pac = pac_to_gale(&erm, &quarter, &prob(1, 10), &CountBudget::Length, rate(1, 1), 3)?;
    for b in &pac.blocks {
        let r = b.measure.as_martingale()?.verify_martingale_identity()?;
        log.check(format!("pac block table n={}", b.n), r.passed(), format!("{} nodes", r.nodes_checked));
    }
    let l = padded_mq_learner(quarter.clone())?;
    let mq = mq_to_gale(&l, &CountBudget::FloorScaled(quarter), rate(1, 2), 4)?;
    for b in &mq.blocks {
        let r = b.measure.as_martingale()?.verify_martingale_identity()?;
        log.check(format!("mq block table n={}", b.n), r.passed(), format!("{} nodes", r.nodes_checked));
    }
    Ok(())
}

fn good_set_bound_checks(log: &mut Log) -> CliResult<()> {
    let quarter = prob(1, 4);
    let erm = erm_pac_learner(&density_class(quarter.clone())?, 3)?;
    let r = good_set_bounds(&erm, &quarter, &prob(1, 10), 3, 3)?;
    log.check("example sets at n=3 with xi=3", r.query_sets == 93, format!("{} sets", r.query_sets));
    log.check(
        "good sets within 2^(H(1/4)*8)*2^3",
        r.good_sets_within,
        format!("largest {} <= 2^{:.4}", r.largest_good_set, r.good_bound_log2.upper()),
    );
    log.check(
        "every epsilon-ball has the binomial tail size",
        r.balls_match_tail && r.ball_size == BigUint::from(37u32),
        format!("{} for all 256 hypotheses", r.ball_size),
    );
    log.check(
        "ball within 2^(H(1/4)*8)",
        r.ball_within,
        format!("{} <= 2^{:.4}", r.ball_size, 8.0 * shannon_entropy(&quarter).value()),
    );
    Ok(())
}

fn diagonalization(log: &mut Log) -> CliResult<()> {
    let cfg = ExperimentConfig {
        alpha: Some("1/2".into()),
        s: Some("2/5".into()),
        nmax: Some(12),
        ..Default::default()
    };
    let r = run_diagonalize(&cfg, "padded")?;
    log.check("output is a padded-class member", r.member, format!("{} bits", r.language.len()));
    log.check(
        "running max of log2 capital <= 1",
        r.running_max <= 1.0,
        format!("running max {:.6}", r.running_max),
    );
    log.check("per-step gains within s-1 (free) and s (padded)", r.steps_within, "");
    let fair = run_diagonalize(&cfg, "fair")?;
    log.check(
        "fair gale: every free bit ties to 0",
        fair.language.bits().iter().all(|b| !b),
        "",
    );
    Ok(())
}

fn online_chain(log: &mut Log) -> CliResult<()> {
    let alpha = prob(1, 4);
    let delta = choose_delta(&alpha, &rational(1, 20))?;
    log.check("chosen delta is 1/16", delta.value() == &rational(1, 16), format!("delta = {delta}"));
    let s = online_rate();
    let g = online_to_gale(predict_zero_learner(), &alpha, &delta, s.clone())?;
    let class = density_class(alpha)?;
    let mut worst = f64::INFINITY;
    let mut ok = true;
    for seed in 0..20 {
        let lang = sample_language(&class, 12, seed, SampleMode::Extremal)?;
        let t = evaluate(&g, lang.bits())?;
        for n in 0..=12 {
            let l = boundary_len(n);
            let excess = t.at(l).expect("boundary").0 - 0.05 * l as f64;
            worst = worst.min(excess);
            ok &= excess >= -BOUND_SLACK;
        }
    }
    log.check(
        "log2 capital >= 0.05 (2^(n+1)-1) on 20 extremal members; n <= 12",
        ok,
        format!("s = {s}; smallest excess {worst:.6}"),
    );
    Ok(())
}

fn scan(log: &mut Log) -> CliResult<()> {
    let grid = grid_from_step("1/50")?;
    let quarter = density_class(prob(1, 4))?;
    let r = run_dimension_scan(&quarter, &grid, 12, 0, 3, SampleMode::Uniform)?;
    let th = r.threshold_f64();
    log.check(
        "density(1/4) threshold within 0.02 of H(1/4)",
        th.is_some_and(|t| (t - shannon_entropy(&prob(1, 4)).value()).abs() <= 0.02),
        format!("threshold {th:?}"),
    );
    let gamma = inverse_entropy(&prob(1, 2));
    let low = density_class(gamma.clone())?;
    let r = run_dimension_scan(&low, &grid, 12, 0, 3, SampleMode::Uniform)?;
    let th = r.threshold_f64();
    log.check(
        "density(H^-1(1/2)) threshold within 0.02 of 1/2",
        th.is_some_and(|t| (t - 0.5).abs() <= 0.02),
        format!("gamma {:.8}; threshold {th:?}", gamma.to_f64()),
    );
    Ok(())
}

fn pac_structure(log: &mut Log) -> CliResult<()> {
    let quarter = prob(1, 4);
    let delta = prob(1, 10);
    let class = density_class(quarter.clone())?;
    let erm = erm_pac_learner(&class, 3)?;
    let g = pac_to_gale(&erm, &quarter, &delta, &CountBudget::Length, rate(1, 1), 3)?;
    for b in &g.blocks {
        let root = b.measure.value(&[])?.is_one();
        let r = b.measure.as_martingale()?.verify_martingale_identity()?;
        log.check(format!("n={} table: d(root)=1 and additivity", b.n), root && r.passed(), "");
        let mut same = true;
        for (q, good) in b.query_sets.iter().zip(&b.good) {
            let census = exhaustive_good_set(
                &GoodSetMode::Pac {
                    learner: &erm,
                    examples: q,
                    epsilon: &quarter,
                    delta: &delta,
                },
                b.n,
            )?;
            let codes: Vec<u64> = census.blocks.iter().map(|w| block_code(w)).collect();
            same &= &codes == good;
        }
        log.check(
            format!("n={} good sets match the exhaustive census", b.n),
            same,
            format!("{} example sets", b.query_sets.len()),
        );
    }
    let reports = g.target_reports(&class)?;
    let min_fraction = reports.iter().map(|r| r.good_fraction.clone()).min().unwrap_or_else(BigRational::one);
    log.check(
        "capital chain d_n(L) >= good_fraction / 2^(H(eps) 2^n + xi(n)) for every member",
        reports.iter().all(|r| r.chain_holds),
        format!(
            "{} members; smallest good fraction {}",
            reports.len(),
            learndim_core::numeric::format_rational(&min_fraction)
        ),
    );
    Ok(())
}

fn mq_exact(log: &mut Log) -> CliResult<()> {
    let quarter = prob(1, 4);
    let class = padded_class(quarter.clone())?;
    let l = padded_mq_learner(quarter.clone())?;
    let q = CountBudget::FloorScaled(quarter);
    let g = mq_to_gale(&l, &q, rate(1, 2), 4)?;
    for b in &g.blocks {
        log.check(
            format!("n={} good count within 2^q(n)", b.n),
            b.count_within && !b.fallback,
            format!("{} <= 2^{}", b.good.len(), b.queries),
        );
        let census = exhaustive_good_set(&GoodSetMode::Mq { learner: &l, queries: b.queries }, b.n)?;
        let codes: Vec<u64> = census.blocks.iter().map(|w| block_code(w)).collect();
        log.check(format!("n={} good set matches the census", b.n), codes == b.good, "");
        let count = BigRational::from_integer(b.good.len().into());
        let mut exact = true;
        for m in class.enumerate_blocks(b.n)? {
            exact &= (b.measure.leaf(&m)? * &count).is_one();
        }
        log.check(format!("n={} d_n(member) * #good = 1", b.n), exact, "");
    }
    let per_level: Vec<Vec<Vec<bool>>> = (0..=4).map(|n| class.enumerate_blocks(n)).collect::<Result<_, _>>()?;
    let mut members = 0;
    let mut ok = true;
    let mut prefix = Vec::new();
    chain_members(&per_level, 0, &mut prefix, &mut |w| {
        members += 1;
        let t = evaluate(&g.gale, w)?;
        for n in 0..=4u32 {
            let l = boundary_len(n);
            let bound = 0.5 * l as f64 - q.cumulative(n)? as f64;
            ok &= t.at(l).expect("boundary").0 >= bound - BOUND_SLACK;
        }
        Ok(())
    })?;
    log.check(
        "boundary log2 capital >= s(2^(n+1)-1) - sum q(i) on every member",
        ok && members == 128,
        format!("{members} members; bound at n=4 is {}", 0.5 * 31.0 - q.cumulative(4)? as f64),
    );
    Ok(())
}

/// Visit every concatenation of one block per level.
fn chain_members(
    levels: &[Vec<Vec<bool>>],
    n: usize,
    prefix: &mut Vec<bool>,
    f: &mut dyn FnMut(&[bool]) -> CliResult<()>,
) -> CliResult<()> {
    if n == levels.len() {
        return f(prefix);
    }
    for b in &levels[n] {
        let keep = prefix.len();
        prefix.extend(b);
        chain_members(levels, n + 1, prefix, f)?;
        prefix.truncate(keep);
    }
    Ok(())
}

fn padded(log: &mut Log) -> CliResult<()> {
    let half = prob(1, 2);
    let g = padded_gale(half.clone(), rate(3, 5))?;
    let class = padded_class(half)?;
    let mut slopes = Vec::new();
    for seed in 0..20 {
        let lang = sample_language(&class, 12, seed, SampleMode::Uniform)?;
        slopes.push(growth_exponent(&evaluate(&g, lang.bits())?)?);
    }
    let (lo, hi) = slopes
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    log.check(
        "padded(1/2; 3/5) boundary slope at n=12 within 0.1 +- 0.02",
        slopes.iter().all(|x| (x - 0.1).abs() <= 0.02),
        format!("20 members; slopes in [{lo:.6}; {hi:.6}]"),
    );
    Ok(())
}

fn eq_reduction(log: &mut Log) -> CliResult<()> {
    let classes: Vec<(&str, Box<dyn ConceptClass>)> = vec![
        ("padded(1/2)", Box::new(padded_class(prob(1, 2))?)),
        ("density(1/4)", Box::new(density_class(prob(1, 4))?)),
    ];
    for (label, class) in &classes {
        let consistent = consistent_eq_learner(class.as_ref(), 3)?;
        let learners: [(&str, &dyn EqLearner); 2] = [("flip", &FlipEqLearner), ("consistent", &consistent)];
        for (name, eq) in learners {
            let online = eq_to_online(eq, 64);
            let mut ok = true;
            let mut targets = 0;
            for n in 0..=3 {
                for target in class.enumerate_blocks(n)? {
                    targets += 1;
                    let mistakes = count_mistakes(&online, &target)?;
                    let queries = worst_case_eq_queries(eq, n, &target, 64)?;
                    ok &= mistakes <= queries;
                }
            }
            log.check(
                format!("{label} {name}: mistakes <= queries"),
                ok,
                format!("{targets} targets; n <= 3"),
            );
        }
    }
    Ok(())
}

fn freeze_agreement(log: &mut Log) -> CliResult<()> {
    with_constructions(|label, g| {
        let table = freeze(g, FREEZE_DEPTH)?;
        let mut worst = 0.0f64;
        let mut ok = true;
        for w in all_blocks(FREEZE_DEPTH) {
            let exact = table.log2_capital(&w)?;
            let fast = evaluate(g, &w)?.final_capital().0;
            if exact == f64::NEG_INFINITY || fast == f64::NEG_INFINITY {
                ok &= exact == fast;
            } else {
                worst = worst.max((exact - fast).abs());
            }
        }
        log.check(
            format!("{label}: freeze and evaluate agree on all {} prefixes", 1 << FREEZE_DEPTH),
            ok && worst <= 1e-6,
            format!("max gap {worst:.3e}"),
        );
        Ok(())
    })
}

fn determinism(log: &mut Log) -> CliResult<()> {
    let cfg = ExperimentConfig {
        construction: Some("online".into()),
        alpha: Some("1/4".into()),
        s: Some("233/256".into()),
        epsilon: Some("1/20".into()),
        seed: Some(11),
        ..Default::default()
    };
    let a = run_growth(&cfg)?.table.to_csv();
    let b = run_growth(&cfg)?.table.to_csv();
    log.check("growth CSV byte-identical across runs", a == b, format!("{} bytes", a.len()));
    let class = padded_class(prob(1, 2))?;
    let x = sample_language(&class, 12, 5, SampleMode::Uniform)?;
    let y = sample_language(&class, 12, 5, SampleMode::Uniform)?;
    log.check("sampled language identical for equal seeds", x == y, "");
    let grid = grid_from_step("1/10")?;
    let dens = density_class(prob(1, 4))?;
    let p = run_dimension_scan(&dens, &grid, 8, 2, 2, SampleMode::Uniform)?.table.to_csv();
    let q = run_dimension_scan(&dens, &grid, 8, 2, 2, SampleMode::Uniform)?.table.to_csv();
    log.check("scan CSV byte-identical across runs", p == q, "");
    Ok(())
}
