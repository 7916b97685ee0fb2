use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::economics::{LevelPair, LightSchedule, MAX_LEVEL};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Lowest level the optimizer may choose; it never switches a channel fully off.
pub const MIN_GENE: u8 = 1;

/// One `(red, blue)` level pair per hour, each component in `1..=10`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Chromosome {
    genes: Vec<LevelPair>,
}

impl Chromosome {
    pub fn new(genes: Vec<LevelPair>) -> Result<Self> {
        for (i, g) in genes.iter().enumerate() {
            if !(MIN_GENE..=MAX_LEVEL).contains(&g.red) || !(MIN_GENE..=MAX_LEVEL).contains(&g.blue) {
                return Err(Error::Encoding(format!(
                    "gene {i} = ({}, {}) outside {MIN_GENE}..={MAX_LEVEL}",
                    g.red, g.blue
                )));
            }
        }
        Ok(Self { genes })
    }

    pub(crate) fn from_genes_unchecked(genes: Vec<LevelPair>) -> Self {
        Self { genes }
    }

    pub fn random<R: Rng + ?Sized>(horizon: usize, rng: &mut R) -> Self {
        let genes = (0..horizon).map(|_| LevelPair::new(random_level(rng), random_level(rng))).collect();
        Self { genes }
    }

    pub fn genes(&self) -> &[LevelPair] {
        &self.genes
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    /// Component `k` of the flattened `[r0, b0, r1, b1, …]` view.
    pub fn component(&self, k: usize) -> u8 {
        let g = self.genes[k / 2];
        if k.is_multiple_of(2) {
            g.red
        } else {
            g.blue
        }
    }

    pub(crate) fn set_component(&mut self, k: usize, value: u8) {
        let g = &mut self.genes[k / 2];
        if k.is_multiple_of(2) {
            g.red = value;
        } else {
            g.blue = value;
        }
    }

    pub fn to_schedule(&self) -> LightSchedule {
        LightSchedule::new(self.genes.clone()).expect("chromosome genes are valid light levels")
    }

    pub fn from_schedule(schedule: &LightSchedule) -> Result<Self> {
        Self::new(schedule.levels().to_vec())
    }
}

pub(crate) fn random_level<R: Rng + ?Sized>(rng: &mut R) -> u8 {
    rng.gen_range(MIN_GENE..=MAX_LEVEL)
}

/// Per-hour `(red, blue)` PPFD in µmol/m²s.
pub fn decode_chromosome<T: Scalar>(c: &Chromosome) -> Result<Vec<(T, T)>> {
    let c = Chromosome::new(c.genes.clone())?;
    Ok(c.genes.iter().map(|g| g.ppfd::<T>()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decoding() {
        let c = Chromosome::new(vec![LevelPair::new(3, 3), LevelPair::new(10, 10), LevelPair::new(1, 1)]).unwrap();
        assert_eq!(decode_chromosome::<f64>(&c).unwrap(), vec![(60.0, 30.0), (200.0, 100.0), (20.0, 10.0)]);
    }

    #[test]
    fn zero_and_eleven_are_not_genes() {
        assert!(matches!(Chromosome::new(vec![LevelPair::new(0, 3)]), Err(Error::Encoding(_))));
        assert!(Chromosome::new(vec![LevelPair::new(3, 11)]).is_err());
        let bad = Chromosome::from_genes_unchecked(vec![LevelPair::new(0, 0)]);
        assert!(decode_chromosome::<f64>(&bad).is_err());
    }

    #[test]
    fn components_are_interleaved() {
        let mut c = Chromosome::new(vec![LevelPair::new(1, 2), LevelPair::new(3, 4)]).unwrap();
        assert_eq!((0..4).map(|k| c.component(k)).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
        c.set_component(3, 9);
        assert_eq!(c.genes()[1], LevelPair::new(3, 9));
    }
}
