//! Bit-string helpers and the characteristic-sequence block layout.
//!
//! Block `n` of a characteristic sequence covers the indices
//! `2^n - 1 ..= 2^(n+1) - 2`, i.e. the strings of length `n` in
//! lexicographic order.

use crate::error::{Error, Result};

pub type Bits = Vec<bool>;

/// Length `2^n` of block `n`.
pub fn block_len(n: u32) -> usize {
    1usize << n
}

/// Index of the first bit of block `n`.
pub fn block_start(n: u32) -> usize {
    (1usize << n) - 1
}

/// Prefix length `2^(n+1) - 1` at which block `n` is complete.
pub fn boundary_len(n: u32) -> usize {
    (1usize << (n + 1)) - 1
}

/// Block containing the bit at `index`, with the offset inside it.
pub fn locate(index: usize) -> (u32, usize) {
    let n = usize::BITS - 1 - (index + 1).leading_zeros();
    (n, index - block_start(n))
}

pub fn parse_bits(s: &str) -> Result<Bits> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::Parse(format!("unexpected character {other:?} in bit string"))),
        })
        .collect()
}

pub fn format_bits(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Integer code of a short block, first bit most significant, so that
/// numeric order equals lexicographic order.
pub fn block_code(bits: &[bool]) -> u64 {
    debug_assert!(bits.len() <= 64);
    bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
}

pub fn block_from_code(code: u64, len: usize) -> Bits {
    (0..len).map(|i| (code >> (len - 1 - i)) & 1 == 1).collect()
}

/// All blocks of `len` bits in lexicographic order.
pub fn all_blocks(len: usize) -> impl Iterator<Item = Bits> {
    assert!(len < 64);
    (0..1u64 << len).map(move |c| block_from_code(c, len))
}

pub fn popcount(bits: &[bool]) -> usize {
    bits.iter().filter(|&&b| b).count()
}

/// Heap index of a prefix in a complete binary tree over `{0,1}^{<=d}`.
pub fn node_index(prefix: &[bool]) -> usize {
    (1usize << prefix.len()) - 1 + block_code(prefix) as usize
}
