//! Concept classes in the characteristic-sequence block model.
//!
//! A language is a bit sequence whose block `n` (length `2^n`) lists the
//! membership of the length-`n` strings in lexicographic order. A class is
//! given per length by the set of admissible blocks.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::bits::{all_blocks, block_len, boundary_len, block_start, format_bits, parse_bits, popcount, Bits};
use crate::entropy::{binomial_tail_count, Probability};
use crate::error::{Error, Result};

/// Largest `n` for which classes are enumerated block by block (`2^16`
/// candidate blocks).
pub const ENUMERATION_BUDGET: u32 = 4;

/// Largest `n_max` for sampled languages (prefix of `2^14 - 1` bits).
pub const SAMPLE_BUDGET: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SampleMode {
    /// Uniform over the admissible blocks.
    #[default]
    Uniform,
    /// Blocks that use the whole constraint (maximal number of ones).
    Extremal,
}

/// Counts admissible completions of a partially read block.
pub trait CompletionTracker: Send {
    /// Admissible blocks extending the bits pushed so far.
    fn completions(&self) -> BigUint;
    /// Admissible blocks extending the current prefix followed by `bit`.
    fn completions_with(&self, bit: bool) -> BigUint;
    fn push(&mut self, bit: bool);
    fn boxed_clone(&self) -> Box<dyn CompletionTracker>;
}

pub trait ConceptClass: Send + Sync {
    fn name(&self) -> String;

    fn contains_block(&self, n: u32, block: &[bool]) -> bool;

    /// Admissible blocks at length `n`, lexicographically ordered.
    fn enumerate_blocks(&self, n: u32) -> Result<Vec<Bits>> {
        if n > ENUMERATION_BUDGET {
            return Err(Error::budget("enumeration n", ENUMERATION_BUDGET as usize, n as usize));
        }
        Ok(all_blocks(block_len(n))
            .filter(|b| self.contains_block(n, b))
            .collect())
    }

    fn sample_block(&self, n: u32, rng: &mut dyn RngCore, mode: SampleMode) -> Result<Bits>;

    /// Positions of block `n` whose bits are unconstrained, when the class
    /// has that shape.
    fn free_positions(&self, _n: u32) -> Option<Vec<usize>> {
        None
    }

    fn completion_tracker(&self, n: u32) -> Result<Box<dyn CompletionTracker>> {
        Ok(Box::new(EnumeratedTracker {
            remaining: self.enumerate_blocks(n)?,
            pos: 0,
        }))
    }
}

#[derive(Clone)]
struct EnumeratedTracker {
    remaining: Vec<Bits>,
    pos: usize,
}

impl CompletionTracker for EnumeratedTracker {
    fn completions(&self) -> BigUint {
        BigUint::from(self.remaining.len())
    }

    fn completions_with(&self, bit: bool) -> BigUint {
        BigUint::from(self.remaining.iter().filter(|b| b[self.pos] == bit).count())
    }

    fn push(&mut self, bit: bool) {
        let pos = self.pos;
        self.remaining.retain(|b| b[pos] == bit);
        self.pos += 1;
    }

    fn boxed_clone(&self) -> Box<dyn CompletionTracker> {
        Box::new(self.clone())
    }
}

/// Languages with at most `floor(alpha 2^n)` ones in every block `n`.
#[derive(Clone, Debug)]
pub struct DensityClass {
    alpha: Probability,
}

pub fn density_class(alpha: Probability) -> Result<DensityClass> {
    if alpha == Probability::zero() {
        return Err(Error::Domain("density class needs alpha > 0".into()));
    }
    Ok(DensityClass { alpha })
}

impl DensityClass {
    pub fn alpha(&self) -> &Probability {
        &self.alpha
    }

    pub fn max_ones(&self, n: u32) -> usize {
        self.alpha.floor_scaled(n)
    }
}

impl ConceptClass for DensityClass {
    fn name(&self) -> String {
        format!("density({})", self.alpha)
    }

    fn contains_block(&self, n: u32, block: &[bool]) -> bool {
        block.len() == block_len(n) && popcount(block) <= self.max_ones(n)
    }

    fn sample_block(&self, n: u32, rng: &mut dyn RngCore, mode: SampleMode) -> Result<Bits> {
        let len = block_len(n);
        let k_max = self.max_ones(n).min(len);
        let ones = match mode {
            SampleMode::Extremal => k_max,
            SampleMode::Uniform => sample_weight_class(len, k_max, rng),
        };
        let mut block = vec![false; len];
        for i in rand::seq::index::sample(rng, len, ones) {
            block[i] = true;
        }
        Ok(block)
    }

    fn completion_tracker(&self, n: u32) -> Result<Box<dyn CompletionTracker>> {
        let len = block_len(n) as u64;
        let k = self.max_ones(n) as u64;
        Ok(Box::new(DensityTracker::new(len, k)))
    }
}

/// Draws `k <= k_max` with probability proportional to `C(len, k)`.
fn sample_weight_class(len: usize, k_max: usize, rng: &mut dyn RngCore) -> usize {
    let mut log_c = 0.0f64;
    let mut logs = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        if k > 0 {
            log_c += ((len - k + 1) as f64).ln() - (k as f64).ln();
        }
        logs.push(log_c);
    }
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (k, w) in weights.iter().enumerate() {
        if u < *w {
            return k;
        }
        u -= w;
    }
    k_max
}

/// Tracks `T(r, m) = sum_{i <= m} C(r, i)` and `C(r, m)` for `r` remaining
/// positions and `m` remaining ones, using
/// `T(r, m) = 2 T(r-1, m) - C(r-1, m)`.
#[derive(Clone, Debug)]
struct DensityTracker {
    remaining: u64,
    ones_left: i64,
    tail: BigUint,
    binom: BigUint,
}

impl DensityTracker {
    fn new(len: u64, max_ones: u64) -> Self {
        let k = max_ones.min(len);
        let tail = binomial_tail_count(len, k).expect("k <= len");
        let binom = if max_ones > len {
            BigUint::zero()
        } else {
            binomial(len, max_ones)
        };
        DensityTracker {
            remaining: len,
            ones_left: max_ones as i64,
            tail,
            binom,
        }
    }

    /// `(T(r-1, m), C(r-1, m))`.
    fn after_zero(&self) -> (BigUint, BigUint) {
        if self.ones_left < 0 || self.remaining == 0 {
            return (BigUint::zero(), BigUint::zero());
        }
        let (r, m) = (self.remaining, self.ones_left as u64);
        let c = if m >= r { BigUint::zero() } else { &self.binom * (r - m) / r };
        let t = (&self.tail + &c) >> 1u32;
        (t, c)
    }
}

fn binomial(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, j| acc * (n - j) / (j + 1))
}

impl CompletionTracker for DensityTracker {
    fn completions(&self) -> BigUint {
        if self.ones_left < 0 {
            BigUint::zero()
        } else {
            self.tail.clone()
        }
    }

    fn completions_with(&self, bit: bool) -> BigUint {
        let (t0, _) = self.after_zero();
        if bit {
            self.completions() - t0
        } else {
            t0
        }
    }

    fn push(&mut self, bit: bool) {
        assert!(self.remaining > 0, "block already complete");
        let (t0, c0) = self.after_zero();
        if bit {
            let r = self.remaining;
            let c1 = if self.ones_left <= 0 {
                BigUint::zero()
            } else {
                &self.binom * (self.ones_left as u64) / r
            };
            self.tail = self.completions() - t0;
            self.binom = c1;
            self.ones_left -= 1;
        } else {
            self.tail = t0;
            self.binom = c0;
        }
        self.remaining -= 1;
        if self.ones_left < 0 {
            self.tail = BigUint::zero();
            self.binom = BigUint::zero();
        }
    }

    fn boxed_clone(&self) -> Box<dyn CompletionTracker> {
        Box::new(self.clone())
    }
}

/// Languages whose block `n` is `x 0^(2^n - |x|)` with
/// `|x| = floor(alpha 2^n)` free bits.
#[derive(Clone, Debug)]
pub struct PaddedClass {
    alpha: Probability,
}

pub fn padded_class(alpha: Probability) -> Result<PaddedClass> {
    if alpha == Probability::zero() || alpha == Probability::one() {
        return Err(Error::Domain("padded class needs 0 < alpha < 1".into()));
    }
    Ok(PaddedClass { alpha })
}

impl PaddedClass {
    pub fn alpha(&self) -> &Probability {
        &self.alpha
    }

    pub fn free_count(&self, n: u32) -> usize {
        self.alpha.floor_scaled(n)
    }
}

impl ConceptClass for PaddedClass {
    fn name(&self) -> String {
        format!("padded({})", self.alpha)
    }

    fn contains_block(&self, n: u32, block: &[bool]) -> bool {
        block.len() == block_len(n) && !block[self.free_count(n)..].iter().any(|&b| b)
    }

    fn sample_block(&self, n: u32, rng: &mut dyn RngCore, mode: SampleMode) -> Result<Bits> {
        let free = self.free_count(n);
        let mut block = vec![false; block_len(n)];
        for bit in block.iter_mut().take(free) {
            *bit = match mode {
                SampleMode::Uniform => rng.random::<bool>(),
                SampleMode::Extremal => true,
            };
        }
        Ok(block)
    }

    fn free_positions(&self, n: u32) -> Option<Vec<usize>> {
        Some((0..self.free_count(n)).collect())
    }

    fn completion_tracker(&self, n: u32) -> Result<Box<dyn CompletionTracker>> {
        Ok(Box::new(PaddedTracker {
            free: self.free_count(n),
            pos: 0,
            valid: true,
        }))
    }
}

#[derive(Clone, Debug)]
struct PaddedTracker {
    free: usize,
    pos: usize,
    valid: bool,
}

impl CompletionTracker for PaddedTracker {
    fn completions(&self) -> BigUint {
        if self.valid {
            BigUint::one() << self.free.saturating_sub(self.pos)
        } else {
            BigUint::zero()
        }
    }

    fn completions_with(&self, bit: bool) -> BigUint {
        let mut next = self.clone();
        next.push(bit);
        next.completions()
    }

    fn push(&mut self, bit: bool) {
        if bit && self.pos >= self.free {
            self.valid = false;
        }
        self.pos += 1;
    }

    fn boxed_clone(&self) -> Box<dyn CompletionTracker> {
        Box::new(self.clone())
    }
}

/// A class given by explicit block lists for a finite range of `n`.
#[derive(Clone, Debug, Default)]
pub struct ExplicitClass {
    name: String,
    blocks: BTreeMap<u32, Vec<Bits>>,
}

impl ExplicitClass {
    pub fn new(name: impl Into<String>) -> Self {
        ExplicitClass {
            name: name.into(),
            blocks: BTreeMap::new(),
        }
    }

    pub fn with_blocks(mut self, n: u32, mut blocks: Vec<Bits>) -> Result<Self> {
        if blocks.iter().any(|b| b.len() != block_len(n)) {
            return Err(Error::Domain(format!("block of wrong length for n = {n}")));
        }
        blocks.sort();
        blocks.dedup();
        self.blocks.insert(n, blocks);
        Ok(self)
    }
}

impl ConceptClass for ExplicitClass {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn contains_block(&self, n: u32, block: &[bool]) -> bool {
        self.blocks
            .get(&n)
            .is_some_and(|bs| bs.binary_search_by(|b| b.as_slice().cmp(block)).is_ok())
    }

    fn enumerate_blocks(&self, n: u32) -> Result<Vec<Bits>> {
        Ok(self.blocks.get(&n).cloned().unwrap_or_default())
    }

    fn sample_block(&self, n: u32, rng: &mut dyn RngCore, _mode: SampleMode) -> Result<Bits> {
        let bs = self.blocks.get(&n).filter(|bs| !bs.is_empty()).ok_or(Error::EmptyClass { n })?;
        Ok(bs[rng.random_range(0..bs.len())].clone())
    }
}

/// Bits of a language up to a block boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LanguagePrefix {
    bits: Bits,
}

impl LanguagePrefix {
    pub fn new(bits: Bits) -> Self {
        LanguagePrefix { bits }
    }

    pub fn from_blocks<I: IntoIterator<Item = Bits>>(blocks: I) -> Result<Self> {
        let mut bits = Vec::new();
        for (n, b) in blocks.into_iter().enumerate() {
            if b.len() != block_len(n as u32) {
                return Err(Error::Domain(format!("block {n} has length {}", b.len())));
            }
            bits.extend(b);
        }
        Ok(LanguagePrefix { bits })
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// `L[2^n - 1 ..= 2^(n+1) - 2]`, if the prefix reaches that far.
    pub fn block(&self, n: u32) -> Option<&[bool]> {
        (n < 40 && self.bits.len() >= boundary_len(n)).then(|| &self.bits[block_start(n)..boundary_len(n)])
    }

    /// Number of complete blocks.
    pub fn complete_blocks(&self) -> u32 {
        (0..).take_while(|&n| self.bits.len() >= boundary_len(n)).count() as u32
    }

    pub fn blocks(&self) -> impl Iterator<Item = &[bool]> {
        (0..self.complete_blocks()).map(move |n| self.block(n).unwrap())
    }

    pub fn belongs_to(&self, class: &dyn ConceptClass) -> bool {
        self.blocks()
            .enumerate()
            .all(|(n, b)| class.contains_block(n as u32, b))
    }

    /// `nmax=<n>` header line, then the bits as ASCII `0`/`1`.
    pub fn to_file_string(&self) -> Result<String> {
        let k = self.complete_blocks();
        if k == 0 || self.bits.len() != boundary_len(k - 1) {
            return Err(Error::Domain("prefix does not end at a block boundary".into()));
        }
        Ok(format!("nmax={}\n{}\n", k - 1, format_bits(&self.bits)))
    }

    pub fn parse_file(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty prefix file".into()))?;
        let nmax: u32 = header
            .strip_prefix("nmax=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad header {header:?}")))?;
        let body: String = lines.map(str::trim).collect();
        let bits = parse_bits(&body)?;
        if nmax > 40 || bits.len() != boundary_len(nmax) {
            return Err(Error::Parse(format!(
                "expected {} bits for nmax={nmax}, found {}",
                boundary_len(nmax.min(40)),
                bits.len()
            )));
        }
        Ok(LanguagePrefix { bits })
    }
}

impl fmt::Display for LanguagePrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_bits(&self.bits))
    }
}

/// RNG used for every sampled language: ChaCha20 seeded through
/// `SeedableRng::seed_from_u64`.
pub fn seeded_rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Independently sampled valid blocks for `n = 0..=n_max`.
pub fn sample_language(
    class: &dyn ConceptClass,
    n_max: u32,
    seed: u64,
    mode: SampleMode,
) -> Result<LanguagePrefix> {
    if n_max > SAMPLE_BUDGET {
        return Err(Error::budget("sample n_max", SAMPLE_BUDGET as usize, n_max as usize));
    }
    let mut rng = seeded_rng(seed);
    let mut bits = Vec::with_capacity(boundary_len(n_max));
    for n in 0..=n_max {
        let block = class.sample_block(n, &mut rng, mode)?;
        debug_assert!(class.contains_block(n, &block));
        bits.extend(block);
    }
    Ok(LanguagePrefix { bits })
}
