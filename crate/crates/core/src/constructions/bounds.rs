use std::fmt;
use std::str::FromStr;

use super::CountBudget;
use crate::bits::boundary_len;
use crate::entropy::{shannon_entropy, Probability};
use crate::error::{Error, Result};
use crate::gale::Rate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstructionId {
    Online,
    Pac,
    /// PAC bound with the class density folded into the exponent.
    PacDensity,
    Mq,
    MqDensity,
    Padded,
}

impl ConstructionId {
    pub const ALL: [ConstructionId; 6] = [
        ConstructionId::Online,
        ConstructionId::Pac,
        ConstructionId::PacDensity,
        ConstructionId::Mq,
        ConstructionId::MqDensity,
        ConstructionId::Padded,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConstructionId::Online => "online",
            ConstructionId::Pac => "pac",
            ConstructionId::PacDensity => "pac-alpha",
            ConstructionId::Mq => "mq",
            ConstructionId::MqDensity => "mq-alpha",
            ConstructionId::Padded => "padded",
        }
    }
}

impl fmt::Display for ConstructionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConstructionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase().replace('α', "alpha");
        ConstructionId::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown construction {s:?}")))
    }
}

/// Parameters of the closed-form bounds; each construction reads only the
/// fields it needs.
#[derive(Clone, Debug)]
pub struct BoundParams {
    pub s: Rate,
    pub alpha: Option<Probability>,
    /// Online: margin `s - h_alpha(alpha + delta)`. PAC: target accuracy.
    pub epsilon: Option<Probability>,
    pub delta: Option<Probability>,
    pub examples: Option<CountBudget>,
    pub queries: Option<CountBudget>,
}

impl BoundParams {
    pub fn new(s: Rate) -> Self {
        BoundParams {
            s,
            alpha: None,
            epsilon: None,
            delta: None,
            examples: None,
            queries: None,
        }
    }
}

fn need<'a, T>(v: &'a Option<T>, what: &str, id: ConstructionId) -> Result<&'a T> {
    v.as_ref()
        .ok_or_else(|| Error::Precondition(format!("{id} bound needs {what}")))
}

/// Closed-form log2 capital bound at the boundary of block `n` (prefix
/// length `L = 2^(n+1) - 1`), with floors on all per-block counts.
pub fn theoretical_bound(id: ConstructionId, params: &BoundParams, n: u32) -> Result<f64> {
    let l = boundary_len(n) as f64;
    let s = params.s.to_f64();
    let blocks = (n + 1) as f64;
    Ok(match id {
        ConstructionId::Online => need(&params.epsilon, "epsilon", id)?.to_f64() * l,
        ConstructionId::Pac => {
            let h = shannon_entropy(need(&params.epsilon, "epsilon", id)?).value();
            let keep = need(&params.delta, "delta", id)?.complement().to_f64();
            let xi = need(&params.examples, "an example budget", id)?.cumulative(n)? as f64;
            (s - h) * l + blocks * keep.log2() - xi
        }
        ConstructionId::PacDensity => {
            let h = shannon_entropy(need(&params.epsilon, "epsilon", id)?).value();
            let a = need(&params.alpha, "alpha", id)?.to_f64();
            let keep = need(&params.delta, "delta", id)?.complement().to_f64();
            (s - h - a) * l + blocks * keep.log2()
        }
        ConstructionId::Mq => {
            let q = need(&params.queries, "a query budget", id)?.cumulative(n)? as f64;
            s * l - q
        }
        ConstructionId::MqDensity => (s - need(&params.alpha, "alpha", id)?.to_f64()) * l,
        ConstructionId::Padded => {
            let a = need(&params.alpha, "alpha", id)?;
            let free: usize = (0..=n).map(|i| a.floor_scaled(i)).sum();
            s * l - free as f64
        }
    })
}

/// Whether the construction guarantees capital at least the bound on class
/// members. The padded gale's bound is only a growth guarantee for
/// `s >= alpha`.
pub fn promises_lower_bound(id: ConstructionId, params: &BoundParams) -> bool {
    match id {
        ConstructionId::Padded => params
            .alpha
            .as_ref()
            .is_some_and(|a| params.s.value() >= a.value()),
        _ => true,
    }
}
