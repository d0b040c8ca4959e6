use learndim_core::bits::boundary_len;
use learndim_core::classes::{sample_language, ConceptClass};
use learndim_core::constructions::{
    block_mistakes, mq_to_gale, online_to_gale, pac_to_gale, padded_gale, promises_lower_bound,
    theoretical_bound, BoundParams, ConstructionId,
};
use learndim_core::entropy::{choose_delta, cross_entropy_h, DyadicInterval, Probability};
use learndim_core::gale::{evaluate, BettingStrategy, CapitalTrace};
use num_rational::BigRational;
use serde_json::json;

use crate::config::{mq_learner, online_learner, pac_learner, ExperimentConfig, EVALUATION_NMAX};
use crate::exit::{CliError, CliResult};
use crate::output::Table;

/// Float slack when comparing evaluated capital with a closed form.
pub const BOUND_SLACK: f64 = 1e-6;

#[derive(Debug)]
pub struct GrowthReport {
    pub table: Table,
    /// Whether the construction guarantees the bound for this run.
    pub promised: bool,
    /// Boundaries where a promised bound failed.
    pub violations: Vec<u32>,
    pub advisories: Vec<String>,
}

impl GrowthReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

struct Setup {
    strategy: Box<dyn BettingStrategy + 'static>,
    params: BoundParams,
    promised: bool,
    advisories: Vec<String>,
}

/// Evaluate the configured construction along one sampled class member and
/// compare with the closed-form bound at every block boundary.
pub fn run_growth(cfg: &ExperimentConfig) -> CliResult<GrowthReport> {
    let id = cfg.construction()?;
    let class = cfg.class()?;
    let n_max = cfg.nmax(match id {
        ConstructionId::Pac | ConstructionId::PacDensity => 3,
        ConstructionId::Mq | ConstructionId::MqDensity => 4,
        _ => EVALUATION_NMAX,
    });
    if n_max > EVALUATION_NMAX {
        return Err(learndim_core::Error::Budget {
            what: "evaluation n_max",
            limit: EVALUATION_NMAX as usize,
            requested: n_max as usize,
        }
        .into());
    }
    let lang = sample_language(class.as_ref(), n_max, cfg.seed(), cfg.sample_mode()?)?;
    let setup = build(id, cfg, class.as_ref(), n_max, lang.bits())?;
    let trace = evaluate(setup.strategy.as_ref(), lang.bits())?;
    report(id, &setup, &trace, n_max, cfg)
}

fn build(
    id: ConstructionId,
    cfg: &ExperimentConfig,
    class: &dyn ConceptClass,
    n_max: u32,
    prefix: &[bool],
) -> CliResult<Setup> {
    let alpha = cfg.class_alpha()?;
    let s = cfg.rate()?;
    let mut params = BoundParams::new(s.clone());
    params.alpha = Some(alpha.clone());
    let mut advisories = Vec::new();
    let strategy: Box<dyn BettingStrategy> = match id {
        ConstructionId::Online => {
            let epsilon = cfg.require_probability("epsilon")?;
            let delta = match cfg.probability("delta")? {
                Some(d) => d,
                None => choose_delta(&alpha, epsilon.value())?,
            };
            let learner = online_learner(&cfg.learner_name("predict-zero"), class, n_max)?;
            for b in block_mistakes(learner.as_ref(), &alpha, prefix)? {
                if !b.within_bound() {
                    advisories.push(format!(
                        "learner made {} mistakes in block {} (allowed {})",
                        b.mistakes, b.n, b.allowed
                    ));
                }
            }
            let stake = Probability::new(alpha.value() + delta.value())?;
            let h = cross_entropy_h(&alpha, &stake)?;
            let margin = DyadicInterval::from_rational(s.value()).sub(h.interval());
            if !DyadicInterval::from_rational(epsilon.value()).certainly_le(&margin) {
                advisories.push(format!(
                    "s - h_alpha(alpha + delta) = {:.6} is below epsilon; no bound promised",
                    margin.midpoint()
                ));
            }
            params.epsilon = Some(epsilon);
            params.delta = Some(delta.clone());
            Box::new(online_to_gale(learner, &alpha, &delta, s)?)
        }
        ConstructionId::Pac | ConstructionId::PacDensity => {
            let epsilon = cfg.require_probability("epsilon")?;
            let delta = cfg.require_probability("delta")?;
            let xi = cfg.budget("n")?;
            let learner = pac_learner(&cfg.learner_name("erm"), class, n_max)?;
            let g = pac_to_gale(learner.as_ref(), &epsilon, &delta, &xi, s, n_max)?;
            let keep = delta.complement();
            for b in &g.blocks {
                let n = b.n as usize;
                let block = &prefix[boundary_len(b.n) - (1 << n)..boundary_len(b.n)];
                if b.good_fraction(block) < *keep.value() {
                    advisories.push(format!("good fraction in block {} is below 1 - delta", b.n));
                }
            }
            params.epsilon = Some(epsilon);
            params.delta = Some(delta);
            params.examples = Some(xi);
            Box::new(g.gale)
        }
        ConstructionId::Mq | ConstructionId::MqDensity => {
            let q = cfg.budget("floor(alpha*2^n)")?;
            let learner = mq_learner(&cfg.learner_name("padded-mq"), &alpha)?;
            let g = mq_to_gale(learner.as_ref(), &q, s, n_max)?;
            for b in &g.blocks {
                if b.fallback {
                    advisories.push(format!("no good block at n = {}; uniform fallback", b.n));
                }
            }
            params.queries = Some(q);
            Box::new(g.gale)
        }
        ConstructionId::Padded => Box::new(padded_gale(alpha, s)?),
    };
    let mut promised = promises_lower_bound(id, &params) && advisories.is_empty();
    if id == ConstructionId::Padded && !promises_lower_bound(id, &params) {
        advisories.push("s < alpha: capital shrinks, no lower bound promised".into());
        promised = false;
    }
    Ok(Setup {
        strategy,
        params,
        promised,
        advisories,
    })
}

fn report(
    id: ConstructionId,
    setup: &Setup,
    trace: &CapitalTrace,
    n_max: u32,
    cfg: &ExperimentConfig,
) -> CliResult<GrowthReport> {
    let mut table = Table::new(&["n", "prefix_len", "log2_capital", "theoretical_bound", "slope"]);
    let mut violations = Vec::new();
    for n in 0..=n_max {
        let len = boundary_len(n);
        let cap = trace
            .at(len)
            .ok_or_else(|| CliError::failure(format!("trace ends before boundary {n}")))?
            .0;
        let bound = theoretical_bound(id, &setup.params, n)?;
        if setup.promised && cap < bound - BOUND_SLACK {
            violations.push(n);
        }
        table.push(vec![n.into(), len.into(), cap.into(), bound.into(), (cap / len as f64).into()]);
    }
    table.meta.insert("construction".into(), json!(id.as_str()));
    table.meta.insert("seed".into(), json!(cfg.seed()));
    table.meta.insert("promised".into(), json!(setup.promised));
    table.meta.insert("advisories".into(), json!(setup.advisories));
    table.meta.insert("violations".into(), json!(violations));
    Ok(GrowthReport {
        table,
        promised: setup.promised,
        violations,
        advisories: setup.advisories.clone(),
    })
}

/// Smallest `k / 2^bits` certainly at or above every point of `x`.
pub fn dyadic_above(x: &DyadicInterval, bits: u32) -> BigRational {
    let den = BigRational::from_integer((1i64 << bits).into());
    let mut k = (x.upper() * (1u64 << bits) as f64).floor() as i64;
    loop {
        let r = BigRational::from_integer(k.into()) / &den;
        if x.certainly_le(&DyadicInterval::from_rational(&r)) {
            return r;
        }
        k += 1;
    }
}
