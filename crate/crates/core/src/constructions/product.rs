use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::bits::{block_len, node_index, Bits};
use crate::error::{Error, Result};
use crate::gale::{BetCursor, BettingStrategy, ExtensionalGale, Rate};
use crate::numeric::rational;

/// Measure on block `n`: `d(v)` for every `v` with `|v| <= 2^n`, stored in
/// heap order. `d(lambda) = 1` and `d(v0) + d(v1) = d(v)` by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMeasure {
    n: u32,
    table: Vec<BigRational>,
}

impl BlockMeasure {
    /// Normalise leaf weights (indexed by block code) and sum upwards.
    pub fn from_leaf_weights(n: u32, weights: Vec<BigRational>) -> Result<Self> {
        let len = block_len(n);
        if weights.len() != 1usize << len {
            return Err(Error::Domain(format!("expected {} leaf weights", 1usize << len)));
        }
        let leaves = weights.len();
        let mut table = vec![BigRational::zero(); 2 * leaves - 1];
        for (code, w) in weights.into_iter().enumerate() {
            table[leaves - 1 + code] = w;
        }
        for i in (0..leaves - 1).rev() {
            table[i] = &table[2 * i + 1] + &table[2 * i + 2];
        }
        let total = table[0].clone();
        if total.is_zero() {
            return Err(Error::Domain("leaf weights sum to zero".into()));
        }
        if !total.is_one() {
            for v in &mut table {
                *v /= &total;
            }
        }
        Ok(BlockMeasure { n, table })
    }

    /// `d(v) = 2^-|v|`.
    pub fn uniform(n: u32) -> Self {
        let leaves = 1usize << block_len(n);
        Self::from_leaf_weights(n, vec![BigRational::one(); leaves]).expect("nonzero weights")
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn value(&self, v: &[bool]) -> Result<&BigRational> {
        if v.len() > block_len(self.n) {
            return Err(Error::Domain(format!("prefix longer than block {}", self.n)));
        }
        Ok(&self.table[node_index(v)])
    }

    /// `d(v1) / d(v)`, or `1/2` where `d(v) = 0`.
    pub fn fraction_one(&self, v: &[bool]) -> Result<BigRational> {
        let i = node_index(v);
        if v.len() >= block_len(self.n) {
            return Err(Error::Domain("no bet after the end of the block".into()));
        }
        let here = &self.table[i];
        if here.is_zero() {
            return Ok(rational(1, 2));
        }
        Ok(&self.table[2 * i + 2] / here)
    }

    /// The block as a martingale `m(v) = 2^|v| d(v)` (rate 1).
    pub fn as_martingale(&self) -> Result<ExtensionalGale> {
        let depth = block_len(self.n);
        ExtensionalGale::from_fn(Rate::from_ratio(1, 1)?, depth, |v| {
            let scale = BigRational::from_integer(BigInt::one() << v.len());
            &self.table[node_index(v)] * scale
        })
    }

    /// Leaves with positive measure, as block codes.
    pub fn support(&self) -> Vec<u64> {
        let leaves = 1usize << block_len(self.n);
        (0..leaves)
            .filter(|&c| !self.table[leaves - 1 + c].is_zero())
            .map(|c| c as u64)
            .collect()
    }

    pub fn leaf(&self, block: &[bool]) -> Result<&BigRational> {
        if block.len() != block_len(self.n) {
            return Err(Error::Domain(format!("not a block of length {}", block_len(self.n))));
        }
        self.value(block)
    }
}

/// `d(w) = 2^(s|w|) prod_i d_i(w^i)`, with fair bets after the last
/// tabulated block.
#[derive(Clone, Debug)]
pub struct ProductGale {
    rate: Rate,
    blocks: Vec<BlockMeasure>,
}

impl ProductGale {
    pub fn new(rate: Rate, blocks: Vec<BlockMeasure>) -> Result<Self> {
        for (i, b) in blocks.iter().enumerate() {
            if b.n as usize != i {
                return Err(Error::Domain(format!("block measure {i} has n = {}", b.n)));
            }
        }
        Ok(ProductGale { rate, blocks })
    }

    pub fn blocks(&self) -> &[BlockMeasure] {
        &self.blocks
    }
}

struct ProductCursor<'a> {
    gale: &'a ProductGale,
    n: u32,
    within: Bits,
}

impl BetCursor for ProductCursor<'_> {
    fn fraction_one(&mut self) -> Result<BigRational> {
        match self.gale.blocks.get(self.n as usize) {
            Some(b) => b.fraction_one(&self.within),
            None => Ok(rational(1, 2)),
        }
    }

    fn advance(&mut self, bit: bool) -> Result<()> {
        self.within.push(bit);
        if self.within.len() == block_len(self.n) {
            self.within.clear();
            self.n += 1;
        }
        Ok(())
    }

    fn fork(&self) -> Box<dyn BetCursor + '_> {
        Box::new(ProductCursor {
            gale: self.gale,
            n: self.n,
            within: self.within.clone(),
        })
    }
}

impl BettingStrategy for ProductGale {
    fn rate(&self) -> &Rate {
        &self.rate
    }

    fn cursor(&self) -> Box<dyn BetCursor + '_> {
        Box::new(ProductCursor {
            gale: self,
            n: 0,
            within: Vec::new(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::{boundary_len, parse_bits};
    use crate::gale::{evaluate, freeze};
    use crate::numeric::log2_rational;

    #[test]
    fn uniform_measure() {
        let m = BlockMeasure::uniform(2);
        assert_eq!(m.value(&[]).unwrap(), &BigRational::one());
        assert_eq!(m.value(&parse_bits("101").unwrap()).unwrap(), &rational(1, 8));
        assert!(m.as_martingale().unwrap().verify_martingale_identity().unwrap().passed());
    }

    #[test]
    fn point_mass_bets() {
        // All mass on 10 at n = 1.
        let m = BlockMeasure::from_leaf_weights(1, vec![0, 0, 3, 0].into_iter().map(|x| rational(x, 1)).collect())
            .unwrap();
        assert_eq!(m.fraction_one(&[]).unwrap(), BigRational::one());
        assert_eq!(m.fraction_one(&[true]).unwrap(), BigRational::zero());
        assert_eq!(m.fraction_one(&[false]).unwrap(), rational(1, 2));
        assert_eq!(m.support(), vec![2]);
        assert!(m.as_martingale().unwrap().verify_martingale_identity().unwrap().passed());
        assert!(BlockMeasure::from_leaf_weights(1, vec![BigRational::zero(); 4]).is_err());
    }

    #[test]
    fn product_chains_blocks() {
        let b0 = BlockMeasure::from_leaf_weights(0, vec![rational(1, 1), rational(0, 1)]).unwrap();
        let b1 = BlockMeasure::from_leaf_weights(1, vec![rational(1, 1), rational(0, 1), rational(0, 1), rational(1, 1)])
            .unwrap();
        let g = ProductGale::new(Rate::from_ratio(1, 2).unwrap(), vec![b0, b1]).unwrap();
        let w = parse_bits("011000").unwrap();
        let t = evaluate(&g, &w).unwrap();
        // d_0(0) = 1, d_1(11) = 1/2, then fair bets.
        let want = 0.5 * 3.0 + log2_rational(&rational(1, 2));
        assert!((t.at(boundary_len(1)).unwrap().0 - want).abs() < 1e-12);
        assert!((t.final_capital().0 - (want + 0.5 * 3.0 - 3.0)).abs() < 1e-12);
        assert!(freeze(&g, 8).unwrap().verify_martingale_identity().unwrap().passed());
        assert!(ProductGale::new(Rate::from_ratio(1, 2).unwrap(), vec![BlockMeasure::uniform(1)]).is_err());
    }
}
