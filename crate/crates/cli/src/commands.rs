//! The `diagonalize` and `census` subcommands.

use learndim_core::bits::{block_len, boundary_len};
use learndim_core::classes::{padded_class, LanguagePrefix};
use learndim_core::constructions::{diagonalize_against, padded_gale, step_ceiling_holds};
use learndim_core::gale::{evaluate, BettingStrategy, ConstantStrategy};
use learndim_core::oracles::{counting_gale, exhaustive_good_set, BlockCensus, GoodSetMode};
use serde_json::json;

use crate::config::{mq_learner, pac_learner, ExperimentConfig, EVALUATION_NMAX};
use crate::exit::{CliError, CliResult};
use crate::output::Table;

#[derive(Debug)]
pub struct DiagonalReport {
    pub language: LanguagePrefix,
    /// Boundary rows `n,prefix_len,log2_capital,running_max`.
    pub table: Table,
    pub member: bool,
    pub steps_within: bool,
    pub running_max: f64,
}

impl DiagonalReport {
    pub fn passed(&self) -> bool {
        self.member && self.steps_within
    }
}

/// Diagonalise against `against` (`padded`, `fair` or `counting`) at rate
/// `s`, producing a member of the padded class.
pub fn run_diagonalize(cfg: &ExperimentConfig, against: &str) -> CliResult<DiagonalReport> {
    let alpha = cfg.class_alpha()?;
    let s = cfg.rate()?;
    let n_max = cfg.nmax(EVALUATION_NMAX);
    let class = padded_class(alpha.clone())?;
    let counting;
    let padded;
    let fair;
    let strategy: &dyn BettingStrategy = match against {
        "padded" => {
            padded = padded_gale(alpha.clone(), s.clone())?;
            &padded
        }
        "fair" => {
            fair = ConstantStrategy::fair(s.clone());
            &fair
        }
        "counting" => {
            counting = counting_gale(&class, s.clone(), n_max);
            &counting
        }
        other => return Err(CliError::usage(format!("unknown gale {other:?} (padded, fair, counting)"))),
    };
    let language = diagonalize_against(strategy, &alpha, n_max)?;
    let trace = evaluate(strategy, language.bits())?;
    let mut table = Table::new(&["n", "prefix_len", "log2_capital", "running_max"]);
    for n in 0..=n_max {
        let len = boundary_len(n);
        table.push(vec![
            n.into(),
            len.into(),
            trace.at(len).expect("boundary").0.into(),
            trace.max_up_to(len).0.into(),
        ]);
    }
    let member = language.belongs_to(&class);
    let steps_within = step_ceiling_holds(&trace, &alpha, s.to_f64(), 1e-9);
    let running_max = trace.running_max().0;
    table.meta.insert("against".into(), json!(against));
    table.meta.insert("member".into(), json!(member));
    table.meta.insert("steps_within".into(), json!(steps_within));
    table.meta.insert("running_max".into(), json!(running_max));
    Ok(DiagonalReport {
        language,
        table,
        member,
        steps_within,
        running_max,
    })
}

/// `class`: the class's blocks at `n`. `mq`/`pac`: exhaustive good sets.
pub fn run_census(cfg: &ExperimentConfig, mode: &str, n: u32, examples: &[usize]) -> CliResult<BlockCensus> {
    let class = cfg.class()?;
    match mode {
        "class" => Ok(BlockCensus::from_blocks(n, class.enumerate_blocks(n)?)),
        "mq" => {
            let alpha = cfg.class_alpha()?;
            let learner = mq_learner(&cfg.learner_name("padded-mq"), &alpha)?;
            let queries = cfg.budget("floor(alpha*2^n)")?.at(n)?;
            Ok(exhaustive_good_set(
                &GoodSetMode::Mq {
                    learner: learner.as_ref(),
                    queries,
                },
                n,
            )?)
        }
        "pac" => {
            let epsilon = cfg.require_probability("epsilon")?;
            let delta = cfg.probability("delta")?.unwrap_or_else(learndim_core::entropy::Probability::half);
            if let Some(&bad) = examples.iter().find(|&&i| i >= block_len(n)) {
                return Err(CliError::usage(format!("example {bad} outside block {n}")));
            }
            let learner = pac_learner(&cfg.learner_name("erm"), class.as_ref(), n)?;
            Ok(exhaustive_good_set(
                &GoodSetMode::Pac {
                    learner: learner.as_ref(),
                    examples,
                    epsilon: &epsilon,
                    delta: &delta,
                },
                n,
            )?)
        }
        other => Err(CliError::usage(format!("unknown census mode {other:?} (class, mq, pac)"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ExperimentConfig {
        ExperimentConfig {
            class: Some("padded".into()),
            alpha: Some("1/2".into()),
            s: Some("2/5".into()),
            nmax: Some(12),
            ..Default::default()
        }
    }

    #[test]
    fn diagonal_against_padded() {
        let r = run_diagonalize(&cfg(), "padded").unwrap();
        assert!(r.passed());
        assert!(r.running_max <= 1.0);
        assert_eq!(r.table.rows.len(), 13);
        assert!(run_diagonalize(&cfg(), "other").is_err());
    }

    #[test]
    fn diagonal_against_counting() {
        let mut c = cfg();
        c.nmax = Some(8);
        let r = run_diagonalize(&c, "counting").unwrap();
        assert!(r.passed());
    }

    #[test]
    fn censuses() {
        let mut c = cfg();
        c.alpha = Some("1/4".into());
        let m = run_census(&c, "mq", 3, &[]).unwrap();
        assert_eq!(m.blocks.len(), 4);
        let k = run_census(&c, "class", 3, &[]).unwrap();
        assert_eq!(k, m);
        c.class = Some("density".into());
        c.epsilon = Some("1".into());
        assert_eq!(run_census(&c, "pac", 2, &[0, 1]).unwrap().blocks.len(), 16);
        assert!(run_census(&c, "pac", 2, &[7]).is_err());
        assert!(run_census(&c, "bogus", 2, &[]).is_err());
    }
}
