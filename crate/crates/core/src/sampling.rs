//! Seeded random rational points for identity testing.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactpoly::{int, Rational};
use crate::systems::ParameterRelation;

/// Half-width of the integer range sample coordinates are drawn from.
pub const DEFAULT_RANGE: i64 = 1_000_000;

pub struct Sampler {
    rng: ChaCha8Rng,
    range: i64,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self::with_range(seed, DEFAULT_RANGE)
    }

    pub fn with_range(seed: u64, range: i64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            range,
        }
    }

    pub fn integer(&mut self) -> Rational {
        int(self.rng.gen_range(-self.range..=self.range))
    }

    /// A nonzero fraction `n/d` with `|n| ≤ range`, `1 ≤ d ≤ 1000`.
    pub fn fraction(&mut self) -> Rational {
        loop {
            let n = self.rng.gen_range(-self.range..=self.range);
            let d = self.rng.gen_range(1..=1000);
            if n != 0 {
                return Rational::new(n.into(), d.into());
            }
        }
    }

    /// Integer parameters with the eliminated one solved from the relation.
    pub fn alphas(&mut self, relation: &ParameterRelation) -> Vec<Rational> {
        let n = relation.coeffs().len();
        let mut out: Vec<Rational> = (0..n).map(|_| self.integer()).collect();
        out[n - 1] = Rational::zero();
        relation.project(&mut out);
        out
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}
