//! Compilers from learners to gales, the padded gale with its
//! diagonalisation adversary, and closed-form capital bounds.

mod bounds;
mod mq;
mod online;
mod pac;
mod padded;
mod product;

pub use bounds::{promises_lower_bound, theoretical_bound, BoundParams, ConstructionId};
pub use mq::{mq_to_gale, MqBlockReport, MqGale, MQ_BUDGET};
pub use online::{block_mistakes, online_block_log_factor, online_to_gale, BlockMistakes, OnlineGale};
pub use pac::{
    approx_count, good_set_bounds, pac_to_gale, query_sets, GoodSetBounds, PacBlockReport, PacGale,
    PacTargetReport, PAC_BUDGET,
};
pub use padded::{diagonalize_against, padded_gale, step_ceiling_holds, PaddedGale};
pub use product::{BlockMeasure, ProductGale};

use std::fmt;

use crate::entropy::Probability;
use crate::error::{Error, Result};

/// Per-length budget `n -> count` for examples or queries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CountBudget {
    /// `table[n]`; lengths past the end are an error.
    Table(Vec<usize>),
    /// `floor(alpha 2^n)`.
    FloorScaled(Probability),
    /// `n` itself.
    Length,
}

impl CountBudget {
    pub fn at(&self, n: u32) -> Result<usize> {
        match self {
            CountBudget::Table(t) => t.get(n as usize).copied().ok_or_else(|| {
                Error::Precondition(format!("budget table has no entry for n = {n}"))
            }),
            CountBudget::FloorScaled(a) => Ok(a.floor_scaled(n)),
            CountBudget::Length => Ok(n as usize),
        }
    }

    /// `sum_{i <= n} budget(i)`.
    pub fn cumulative(&self, n: u32) -> Result<usize> {
        (0..=n).map(|i| self.at(i)).sum()
    }

    /// Accepts `a,b,c,...`, `n`, or `floor(alpha*2^n)` (with `alpha`
    /// supplied separately).
    pub fn parse(spec: &str, alpha: Option<&Probability>) -> Result<Self> {
        let compact: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
        match compact.as_str() {
            "n" => Ok(CountBudget::Length),
            "floor(alpha*2^n)" => alpha
                .cloned()
                .map(CountBudget::FloorScaled)
                .ok_or_else(|| Error::Parse("floor(alpha*2^n) budget needs alpha".into())),
            _ => compact
                .split(',')
                .map(|t| t.parse::<usize>().map_err(|_| Error::Parse(format!("bad budget entry {t:?}"))))
                .collect::<Result<Vec<_>>>()
                .map(CountBudget::Table),
        }
    }
}

impl fmt::Display for CountBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CountBudget::Table(t) => {
                let parts: Vec<String> = t.iter().map(|x| x.to_string()).collect();
                f.write_str(&parts.join(","))
            }
            CountBudget::FloorScaled(_) => f.write_str("floor(alpha*2^n)"),
            CountBudget::Length => f.write_str("n"),
        }
    }
}
