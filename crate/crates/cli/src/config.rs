//! Experiment configuration. Rationals are kept as `p/q` strings and only
//! turned into exact values on use, so a config round-trips unchanged.

use std::path::{Path, PathBuf};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use learndim_core::classes::{density_class, padded_class, ConceptClass, SampleMode};
use learndim_core::constructions::{ConstructionId, CountBudget};
use learndim_core::entropy::{inverse_entropy, Probability};
use learndim_core::gale::Rate;
use learndim_core::learners::{
    consistent_eq_learner, eq_to_online, erm_pac_learner, halving_learner, padded_mq_learner,
    predict_zero_learner, ExhaustiveMqLearner, FlipEqLearner, MqLearner, OnlineLearner, PacLearner,
};
use learndim_core::numeric::parse_rational;

use crate::exit::{CliError, CliResult};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    pub construction: Option<String>,
    /// `density` or `padded`.
    pub class: Option<String>,
    pub alpha: Option<String>,
    /// Entropy level: the density class uses `alpha = H^-1(beta)`.
    pub beta: Option<String>,
    pub learner: Option<String>,
    pub s: Option<String>,
    pub epsilon: Option<String>,
    pub delta: Option<String>,
    /// Per-length example or query budget: `a,b,c`, `n` or
    /// `floor(alpha*2^n)`.
    pub budget: Option<String>,
    pub nmax: Option<u32>,
    pub seed: Option<u64>,
    /// `uniform` or `extremal`.
    pub mode: Option<String>,
    pub samples: Option<usize>,
    pub grid: Option<String>,
    pub out: Option<PathBuf>,
}

/// Cap on `n_max` for runs that only evaluate a gale along a prefix.
pub const EVALUATION_NMAX: u32 = learndim_core::classes::SAMPLE_BUDGET;

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| CliError::usage(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    /// Fields set in `other` win.
    pub fn merged(mut self, other: ExperimentConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(construction, class, alpha, beta, learner, s, epsilon, delta, budget, nmax, seed, mode, samples, grid, out);
        self
    }

    /// Parse every rational-valued field once, so errors surface early.
    pub fn validate(&self) -> CliResult<()> {
        for (name, v) in [
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("s", &self.s),
            ("epsilon", &self.epsilon),
            ("delta", &self.delta),
        ] {
            if let Some(v) = v {
                parse_field(name, v)?;
            }
        }
        if let Some(c) = &self.construction {
            c.parse::<ConstructionId>()?;
        }
        if let Some(m) = &self.mode {
            parse_mode(m)?;
        }
        Ok(())
    }

    pub fn construction(&self) -> CliResult<ConstructionId> {
        Ok(self
            .construction
            .as_deref()
            .ok_or_else(|| CliError::usage("missing --construction"))?
            .parse()?)
    }

    pub fn probability(&self, name: &str) -> CliResult<Option<Probability>> {
        let raw = match name {
            "alpha" => &self.alpha,
            "beta" => &self.beta,
            "epsilon" => &self.epsilon,
            "delta" => &self.delta,
            _ => unreachable!("not a probability field: {name}"),
        };
        raw.as_deref()
            .map(|v| Ok(Probability::new(parse_field(name, v)?)?))
            .transpose()
    }

    pub fn require_probability(&self, name: &str) -> CliResult<Probability> {
        self.probability(name)?
            .ok_or_else(|| CliError::usage(format!("missing --{name}")))
    }

    pub fn rate(&self) -> CliResult<Rate> {
        let s = self.s.as_deref().ok_or_else(|| CliError::usage("missing --s"))?;
        Ok(Rate::new(parse_field("s", s)?)?)
    }

    /// The class density: `alpha`, or `H^-1(beta)` when only `beta` is set.
    pub fn class_alpha(&self) -> CliResult<Probability> {
        match (self.probability("alpha")?, self.probability("beta")?) {
            (Some(a), None) => Ok(a),
            (None, Some(b)) => Ok(inverse_entropy(&b)),
            (Some(_), Some(_)) => Err(CliError::usage("give either --alpha or --beta, not both")),
            (None, None) => Err(CliError::usage("missing --alpha")),
        }
    }

    pub fn class(&self) -> CliResult<Box<dyn ConceptClass>> {
        let alpha = self.class_alpha()?;
        match self.class.as_deref().unwrap_or("density") {
            "density" => Ok(Box::new(density_class(alpha)?)),
            "padded" => Ok(Box::new(padded_class(alpha)?)),
            other => Err(CliError::usage(format!("unknown class {other:?} (density, padded)"))),
        }
    }

    pub fn nmax(&self, default: u32) -> u32 {
        self.nmax.unwrap_or(default)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn sample_mode(&self) -> CliResult<SampleMode> {
        self.mode.as_deref().map_or(Ok(SampleMode::Uniform), parse_mode)
    }

    pub fn budget(&self, default: &str) -> CliResult<CountBudget> {
        let alpha = self.class_alpha().ok();
        Ok(CountBudget::parse(self.budget.as_deref().unwrap_or(default), alpha.as_ref())?)
    }

    pub fn learner_name(&self, default: &'static str) -> String {
        self.learner.clone().unwrap_or_else(|| default.to_string())
    }
}

fn parse_field(name: &str, v: &str) -> CliResult<BigRational> {
    parse_rational(v).map_err(|e| CliError::usage(format!("--{name}: {e}")))
}

fn parse_mode(m: &str) -> CliResult<SampleMode> {
    match m {
        "uniform" => Ok(SampleMode::Uniform),
        "extremal" => Ok(SampleMode::Extremal),
        other => Err(CliError::usage(format!("unknown sampling mode {other:?} (uniform, extremal)"))),
    }
}

/// Online learners by name. Enumerating learners are built for `n <= n_max`.
pub fn online_learner(name: &str, class: &dyn ConceptClass, n_max: u32) -> CliResult<Box<dyn OnlineLearner>> {
    // Generous: a correct equivalence learner needs at most 2^n + 1 queries.
    let eq_budget = (1usize << n_max.min(20)) + 1;
    Ok(match name {
        "predict-zero" => Box::new(predict_zero_learner()),
        "halving" => Box::new(halving_learner(class, n_max)?),
        "eq-flip" => Box::new(eq_to_online(FlipEqLearner, eq_budget)),
        "eq-consistent" => Box::new(eq_to_online(consistent_eq_learner(class, n_max)?, eq_budget)),
        other => {
            return Err(CliError::usage(format!(
                "unknown online learner {other:?} (predict-zero, halving, eq-flip, eq-consistent)"
            )))
        }
    })
}

pub fn pac_learner(name: &str, class: &dyn ConceptClass, n_max: u32) -> CliResult<Box<dyn PacLearner>> {
    match name {
        "erm" => Ok(Box::new(erm_pac_learner(class, n_max)?)),
        other => Err(CliError::usage(format!("unknown PAC learner {other:?} (erm)"))),
    }
}

pub fn mq_learner(name: &str, alpha: &Probability) -> CliResult<Box<dyn MqLearner>> {
    match name {
        "padded-mq" => Ok(Box::new(padded_mq_learner(alpha.clone())?)),
        "exhaustive-mq" => Ok(Box::new(ExhaustiveMqLearner)),
        other => Err(CliError::usage(format!("unknown MQ learner {other:?} (padded-mq, exhaustive-mq)"))),
    }
}

/// `p/q,p/q,...` as exact rationals.
pub fn parse_grid(spec: &str) -> CliResult<Vec<BigRational>> {
    let grid = spec
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| parse_field("grid", t))
        .collect::<CliResult<Vec<_>>>()?;
    check_grid(&grid)?;
    Ok(grid)
}

/// `0, step, 2 step, ...` up to 1.
pub fn grid_from_step(step: &str) -> CliResult<Vec<BigRational>> {
    let step = parse_field("grid-step", step)?;
    let zero = BigRational::from_integer(0.into());
    let one = BigRational::from_integer(1.into());
    if step <= zero {
        return Err(CliError::usage("--grid-step must be positive"));
    }
    let mut grid = Vec::new();
    let mut k = 0i64;
    loop {
        let s = &step * BigRational::from_integer(k.into());
        if s > one {
            break;
        }
        grid.push(s);
        k += 1;
    }
    Ok(grid)
}

fn check_grid(grid: &[BigRational]) -> CliResult<()> {
    if grid.is_empty() {
        return Err(CliError::usage("empty s-grid"));
    }
    let zero = BigRational::from_integer(0.into());
    let one = BigRational::from_integer(1.into());
    if grid.iter().any(|s| *s < zero || *s > one) {
        return Err(CliError::usage("s-grid values must lie in [0, 1]"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exit::ExitStatus;

    fn sample() -> ExperimentConfig {
        ExperimentConfig {
            construction: Some("online".into()),
            class: Some("density".into()),
            alpha: Some("1/4".into()),
            learner: Some("predict-zero".into()),
            s: Some("23/25".into()),
            epsilon: Some("1/20".into()),
            delta: Some("1/16".into()),
            budget: Some("floor(alpha*2^n)".into()),
            nmax: Some(12),
            seed: Some(7),
            mode: Some("extremal".into()),
            ..Default::default()
        }
    }

    #[test]
    fn toml_round_trip() {
        let cfg = sample();
        let text = cfg.to_toml();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), cfg);
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap().to_toml(), text);
    }

    #[test]
    fn rejects_bad_rationals() {
        let err = ExperimentConfig::from_toml("alpha = \"1/0\"").unwrap_err();
        assert_eq!(err.status, ExitStatus::Usage);
        assert!(ExperimentConfig::from_toml("s = \"0.5\"").is_err());
        assert!(ExperimentConfig::from_toml("colour = \"red\"").is_err());
        assert!(ExperimentConfig::from_toml("construction = \"nope\"").is_err());
    }

    #[test]
    fn merge_prefers_later() {
        let base = sample();
        let over = ExperimentConfig {
            seed: Some(9),
            ..Default::default()
        };
        let m = base.clone().merged(over);
        assert_eq!(m.seed, Some(9));
        assert_eq!(m.alpha, base.alpha);
    }

    #[test]
    fn beta_resolves_to_inverse_entropy() {
        let cfg = ExperimentConfig {
            beta: Some("1/2".into()),
            ..Default::default()
        };
        assert!((cfg.class_alpha().unwrap().to_f64() - 0.110_027_864_438_359_55).abs() < 1e-12);
        let both = ExperimentConfig {
            alpha: Some("1/4".into()),
            ..cfg
        };
        assert!(both.class_alpha().is_err());
    }

    #[test]
    fn grids() {
        let g = grid_from_step("1/50").unwrap();
        assert_eq!(g.len(), 51);
        assert_eq!(g[50], BigRational::from_integer(1.into()));
        assert_eq!(parse_grid("1/2, 3/4").unwrap().len(), 2);
        assert_eq!(parse_grid("").unwrap_err().status, ExitStatus::Usage);
        assert!(parse_grid("3/2").is_err());
        assert!(grid_from_step("0").is_err());
    }
}
