//! Empirical dimension: the smallest grid rate at which the counting gale's
//! boundary slope is positive on every sampled member.
//!
//! The counting gale's bets do not depend on `s`, so each member is
//! evaluated once at `s = 0` and the trace shifted by `s * prefix_len`.

use learndim_core::bits::boundary_len;
use learndim_core::classes::{sample_language, ConceptClass, SampleMode};
use learndim_core::gale::{evaluate, Rate};
use learndim_core::numeric::{format_rational, rational_to_f64};
use learndim_core::oracles::counting_gale;
use num_rational::BigRational;
use serde_json::json;

use crate::exit::{CliError, CliResult};
use crate::output::Table;

#[derive(Debug)]
pub struct ScanReport {
    pub table: Table,
    /// First grid rate with positive slope on all samples.
    pub threshold: Option<BigRational>,
}

impl ScanReport {
    pub fn threshold_f64(&self) -> Option<f64> {
        self.threshold.as_ref().map(rational_to_f64)
    }
}

pub fn run_dimension_scan(
    class: &dyn ConceptClass,
    grid: &[BigRational],
    n_max: u32,
    seed: u64,
    samples: usize,
    mode: SampleMode,
) -> CliResult<ScanReport> {
    if grid.is_empty() {
        return Err(CliError::usage("empty s-grid"));
    }
    if samples == 0 {
        return Err(CliError::usage("need at least one sample"));
    }
    let gale = counting_gale(class, Rate::from_ratio(0, 1)?, n_max);
    let len = boundary_len(n_max);
    let mut base = Vec::with_capacity(samples);
    for i in 0..samples as u64 {
        let lang = sample_language(class, n_max, seed.wrapping_add(i), mode)?;
        let trace = evaluate(&gale, lang.bits())?;
        base.push(trace.at(len).expect("full prefix").0);
    }
    let mut table = Table::new(&["s", "min_slope", "max_slope", "succeeds"]);
    let mut threshold = None;
    for s in grid {
        let sf = rational_to_f64(s);
        let slopes: Vec<f64> = base.iter().map(|b| (b + sf * len as f64) / len as f64).collect();
        let min = slopes.iter().copied().fold(f64::INFINITY, f64::min);
        let max = slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let succeeds = min > 0.0;
        if succeeds && threshold.is_none() {
            threshold = Some(s.clone());
        }
        table.push(vec![format_rational(s).into(), min.into(), max.into(), succeeds.into()]);
    }
    table.meta.insert("class".into(), json!(class.name()));
    table.meta.insert("n_max".into(), json!(n_max));
    table.meta.insert("seed".into(), json!(seed));
    table.meta.insert("samples".into(), json!(samples));
    table.meta.insert(
        "threshold".into(),
        json!(threshold.as_ref().map(format_rational)),
    );
    Ok(ScanReport { table, threshold })
}
