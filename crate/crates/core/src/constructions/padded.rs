use num_rational::BigRational;
use num_traits::Zero;

use crate::bits::{block_len, boundary_len, Bits};
use crate::classes::{LanguagePrefix, SAMPLE_BUDGET};
use crate::entropy::Probability;
use crate::error::{Error, Result};
use crate::gale::{BetCursor, BettingStrategy, CapitalTrace, Rate};
use crate::numeric::rational;

/// Fair bets on the free prefix of every block, everything on 0 after it.
#[derive(Clone, Debug)]
pub struct PaddedGale {
    alpha: Probability,
    rate: Rate,
}

pub fn padded_gale(alpha: Probability, s: Rate) -> Result<PaddedGale> {
    let a = alpha.value();
    if a.is_zero() || *a >= rational(1, 1) {
        return Err(Error::Domain(format!("padded gale needs 0 < alpha < 1, got {alpha}")));
    }
    Ok(PaddedGale { alpha, rate: s })
}

impl PaddedGale {
    pub fn alpha(&self) -> &Probability {
        &self.alpha
    }
}

struct PaddedCursor<'a> {
    gale: &'a PaddedGale,
    n: u32,
    offset: usize,
    free: usize,
}

impl PaddedCursor<'_> {
    fn enter(&mut self, n: u32) {
        self.n = n;
        self.offset = 0;
        self.free = self.gale.alpha.floor_scaled(n);
    }
}

impl BetCursor for PaddedCursor<'_> {
    fn fraction_one(&mut self) -> Result<BigRational> {
        Ok(if self.offset < self.free {
            rational(1, 2)
        } else {
            BigRational::zero()
        })
    }

    fn advance(&mut self, _bit: bool) -> Result<()> {
        self.offset += 1;
        if self.offset == block_len(self.n) {
            self.enter(self.n + 1);
        }
        Ok(())
    }

    fn fork(&self) -> Box<dyn BetCursor + '_> {
        Box::new(PaddedCursor { ..*self })
    }
}

impl BettingStrategy for PaddedGale {
    fn rate(&self) -> &Rate {
        &self.rate
    }

    fn cursor(&self) -> Box<dyn BetCursor + '_> {
        let mut c = PaddedCursor {
            gale: self,
            n: 0,
            offset: 0,
            free: 0,
        };
        c.enter(0);
        Box::new(c)
    }
}

/// A padded-class member on which `strategy` does as badly as possible: at
/// free positions take the bit with the smaller stake (0 on ties), at padded
/// positions take 0.
pub fn diagonalize_against(
    strategy: &dyn BettingStrategy,
    alpha: &Probability,
    n_max: u32,
) -> Result<LanguagePrefix> {
    if n_max > SAMPLE_BUDGET {
        return Err(Error::budget("diagonalisation n_max", SAMPLE_BUDGET as usize, n_max as usize));
    }
    let half = rational(1, 2);
    let mut cursor = strategy.cursor();
    let mut bits: Bits = Vec::with_capacity(boundary_len(n_max));
    let mut dead = false;
    for n in 0..=n_max {
        let free = alpha.floor_scaled(n);
        for offset in 0..block_len(n) {
            let mut bit = false;
            if offset < free && !dead {
                let pi_one = cursor.fraction_one()?;
                bit = pi_one < half;
                dead = bit && pi_one.is_zero();
            }
            if !dead {
                cursor.advance(bit)?;
            }
            bits.push(bit);
        }
    }
    Ok(LanguagePrefix::new(bits))
}

/// Every step of `trace` along a padded-class prefix gains at most `s - 1`
/// at free positions and at most `s` at padded ones.
pub fn step_ceiling_holds(trace: &CapitalTrace, alpha: &Probability, s: f64, slack: f64) -> bool {
    let samples = trace.samples();
    let mut index = 0;
    let mut n = 0;
    while index + 1 < samples.len() {
        let free = alpha.floor_scaled(n);
        for offset in 0..block_len(n) {
            if index + 1 >= samples.len() {
                break;
            }
            let (a, b) = (samples[index].log2_capital.0, samples[index + 1].log2_capital.0);
            index += 1;
            if b == f64::NEG_INFINITY {
                continue;
            }
            let gain = if offset < free { s - 1.0 } else { s };
            if b - a > gain + slack {
                return false;
            }
        }
        n += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::parse_bits;
    use crate::classes::{padded_class, sample_language, SampleMode};
    use crate::gale::{evaluate, freeze, ConstantStrategy};

    fn prob(p: i64, q: i64) -> Probability {
        Probability::from_ratio(p, q).unwrap()
    }

    #[test]
    fn single_step_factors() {
        let g = padded_gale(prob(1, 2), Rate::from_ratio(1, 2).unwrap()).unwrap();
        // Block 0 has no free position; block 1 has one.
        let t = evaluate(&g, &parse_bits("010").unwrap()).unwrap();
        assert!((t.at(1).unwrap().0 - 0.5).abs() < 1e-12);
        assert!((t.at(2).unwrap().0 - 0.0).abs() < 1e-12);
        assert!((t.at(3).unwrap().0 - 0.5).abs() < 1e-12);
        let t = evaluate(&g, &parse_bits("1").unwrap()).unwrap();
        assert!(t.final_capital().is_zero_capital());
        let t = evaluate(&g, &parse_bits("0011").unwrap()).unwrap();
        assert!(t.final_capital().is_zero_capital());
    }

    #[test]
    fn boundary_capital_on_members() {
        let alpha = prob(1, 4);
        let s = Rate::from_ratio(3, 5).unwrap();
        let g = padded_gale(alpha.clone(), s.clone()).unwrap();
        let class = padded_class(alpha.clone()).unwrap();
        let lang = sample_language(&class, 10, 5, SampleMode::Uniform).unwrap();
        let t = evaluate(&g, lang.bits()).unwrap();
        let mut free_total = 0;
        for n in 0..=10 {
            free_total += alpha.floor_scaled(n);
            let l = boundary_len(n);
            let want = 0.6 * l as f64 - free_total as f64;
            assert!((t.at(l).unwrap().0 - want).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_alpha() {
        let s = Rate::from_ratio(1, 2).unwrap();
        assert!(padded_gale(prob(0, 1), s.clone()).is_err());
        assert!(padded_gale(prob(1, 1), s).is_err());
    }

    #[test]
    fn diagonal_against_fair_gale() {
        let alpha = prob(1, 2);
        let fair = ConstantStrategy::fair(Rate::from_ratio(2, 5).unwrap());
        let lang = diagonalize_against(&fair, &alpha, 6).unwrap();
        assert!(lang.bits().iter().all(|b| !b));
        assert!(lang.belongs_to(&padded_class(alpha.clone()).unwrap()));
        let t = evaluate(&fair, lang.bits()).unwrap();
        for w in t.samples().windows(2) {
            assert!(w[1].log2_capital.0 < w[0].log2_capital.0);
        }
    }

    #[test]
    fn diagonal_against_padded_gale() {
        let alpha = prob(1, 2);
        let g = padded_gale(alpha.clone(), Rate::from_ratio(2, 5).unwrap()).unwrap();
        let lang = diagonalize_against(&g, &alpha, 12).unwrap();
        assert!(lang.belongs_to(&padded_class(alpha.clone()).unwrap()));
        let t = evaluate(&g, lang.bits()).unwrap();
        assert!(t.running_max().0 <= 1.0);
        assert!(step_ceiling_holds(&t, &alpha, 0.4, 1e-9));
    }

    #[test]
    fn diagonal_picks_smaller_stake() {
        // Bets 3/4 on 1 everywhere: free bits become 0.
        let alpha = prob(3, 4);
        let g = ConstantStrategy::new(Rate::from_ratio(1, 1).unwrap(), rational(3, 4)).unwrap();
        let lang = diagonalize_against(&g, &alpha, 3).unwrap();
        assert!(lang.bits().iter().all(|b| !b));
        // Bets 1/4 on 1: free bits become 1.
        let g = ConstantStrategy::new(Rate::from_ratio(1, 1).unwrap(), rational(1, 4)).unwrap();
        let lang = diagonalize_against(&g, &alpha, 2).unwrap();
        assert_eq!(lang.bits(), parse_bits("0101110").unwrap().as_slice());
        let t = evaluate(&g, lang.bits()).unwrap();
        assert!(step_ceiling_holds(&t, &alpha, 1.0, 1e-9));
    }

    #[test]
    fn frozen_padded_gale_is_martingale() {
        let g = padded_gale(prob(1, 2), Rate::from_ratio(1, 2).unwrap()).unwrap();
        let f = freeze(&g, 12).unwrap();
        assert!(f.verify_martingale_identity().unwrap().passed());
    }
}
