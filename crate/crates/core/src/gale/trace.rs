use std::fmt;

use crate::bits::boundary_len;
use crate::error::{Error, Result};
use crate::numeric::log2_rational;

use super::{check_fraction, fraction_for, BettingStrategy};

/// Longest prefix [`evaluate`] accepts by default.
pub const DEFAULT_EVAL_BUDGET: usize = 1 << 14;

/// `log2` of a capital value; `-inf` encodes capital zero.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LogCapital(pub f64);

impl LogCapital {
    pub const ZERO_CAPITAL: LogCapital = LogCapital(f64::NEG_INFINITY);

    pub fn is_zero_capital(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }
}

impl fmt::Display for LogCapital {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero_capital() {
            f.write_str("-inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceSample {
    pub prefix_len: usize,
    pub log2_capital: LogCapital,
}

/// `log2 d(L[0..k])` for every `k` up to the evaluated length.
#[derive(Clone, Debug, PartialEq)]
pub struct CapitalTrace {
    samples: Vec<TraceSample>,
    running_max: LogCapital,
}

impl CapitalTrace {
    pub fn samples(&self) -> &[TraceSample] {
        &self.samples
    }

    pub fn running_max(&self) -> LogCapital {
        self.running_max
    }

    pub fn final_capital(&self) -> LogCapital {
        self.samples.last().expect("trace always holds lambda").log2_capital
    }

    pub fn at(&self, prefix_len: usize) -> Option<LogCapital> {
        self.samples.get(prefix_len).map(|s| s.log2_capital)
    }

    /// Samples at prefix lengths `2^(n+1) - 1`, one per completed block.
    pub fn boundary_samples(&self) -> Vec<TraceSample> {
        (0..)
            .map(boundary_len)
            .take_while(|&len| len < self.samples.len())
            .map(|len| self.samples[len])
            .collect()
    }

    /// Running maximum over prefix lengths `<= prefix_len`.
    pub fn max_up_to(&self, prefix_len: usize) -> LogCapital {
        self.samples[..=prefix_len.min(self.samples.len() - 1)]
            .iter()
            .map(|s| s.log2_capital)
            .fold(LogCapital::ZERO_CAPITAL, |a, b| if b.0 > a.0 { b } else { a })
    }

    /// Copy with `shift * prefix_len` added to every sample; this is how the
    /// trace of the same fractions at rate `s + shift` relates to this one.
    pub fn shifted(&self, shift: f64) -> CapitalTrace {
        let samples: Vec<_> = self
            .samples
            .iter()
            .map(|s| TraceSample {
                prefix_len: s.prefix_len,
                log2_capital: LogCapital(s.log2_capital.0 + shift * s.prefix_len as f64),
            })
            .collect();
        let running_max = max_of(&samples);
        CapitalTrace {
            samples,
            running_max,
        }
    }

    /// CSV with header `prefix_len,log2_capital,is_block_boundary`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("prefix_len,log2_capital,is_block_boundary\n");
        for s in &self.samples {
            let boundary = (s.prefix_len + 1).is_power_of_two() && s.prefix_len > 0;
            out.push_str(&format!(
                "{},{},{}\n",
                s.prefix_len,
                s.log2_capital,
                boundary as u8
            ));
        }
        out
    }
}

fn max_of(samples: &[TraceSample]) -> LogCapital {
    samples
        .iter()
        .map(|s| s.log2_capital)
        .fold(LogCapital::ZERO_CAPITAL, |a, b| if b.0 > a.0 { b } else { a })
}

/// Neumaier-compensated running sum.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

pub fn evaluate(strategy: &dyn BettingStrategy, prefix: &[bool]) -> Result<CapitalTrace> {
    evaluate_with_budget(strategy, prefix, DEFAULT_EVAL_BUDGET)
}

/// Log-domain capital along `prefix`:
/// `log2 d(wb) = log2 d(w) + s + log2 pi_b(w)`. Zero capital is absorbing,
/// and the strategy is no longer consulted once it is reached.
pub fn evaluate_with_budget(
    strategy: &dyn BettingStrategy,
    prefix: &[bool],
    budget: usize,
) -> Result<CapitalTrace> {
    if prefix.len() > budget {
        return Err(Error::budget("evaluation prefix length", budget, prefix.len()));
    }
    let s = strategy.rate().to_f64();
    let mut cursor = strategy.cursor();
    let mut log_fractions = CompensatedSum::default();
    let mut dead = false;
    let mut samples = Vec::with_capacity(prefix.len() + 1);
    samples.push(TraceSample {
        prefix_len: 0,
        log2_capital: LogCapital(0.0),
    });
    for (i, &bit) in prefix.iter().enumerate() {
        if !dead {
            let pi_one = cursor.fraction_one()?;
            check_fraction(&pi_one)?;
            let lf = log2_rational(&fraction_for(&pi_one, bit));
            if lf == f64::NEG_INFINITY {
                dead = true;
            } else {
                log_fractions.add(lf);
                cursor.advance(bit)?;
            }
        }
        let len = i + 1;
        let value = if dead {
            LogCapital::ZERO_CAPITAL
        } else {
            LogCapital(s * len as f64 + log_fractions.value())
        };
        samples.push(TraceSample {
            prefix_len: len,
            log2_capital: value,
        });
    }
    let running_max = max_of(&samples);
    Ok(CapitalTrace {
        samples,
        running_max,
    })
}

/// `log2 capital / prefix_len` at the last completed block boundary.
pub fn growth_exponent(trace: &CapitalTrace) -> Result<f64> {
    let slopes = boundary_slopes(trace);
    if slopes.len() < 2 {
        return Err(Error::Precondition(
            "growth exponent needs at least two block boundaries".into(),
        ));
    }
    Ok(slopes.last().unwrap().1)
}

/// `(n, log2 capital / (2^(n+1) - 1))` for every completed block `n`.
pub fn boundary_slopes(trace: &CapitalTrace) -> Vec<(u32, f64)> {
    trace
        .boundary_samples()
        .iter()
        .enumerate()
        .map(|(n, s)| (n as u32, s.log2_capital.0 / s.prefix_len as f64))
        .collect()
}
