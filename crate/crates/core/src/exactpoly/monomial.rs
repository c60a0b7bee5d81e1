use std::cmp::Ordering;

use super::vars::MAX_VARS;
use crate::error::{Error, Result};

/// Exponent vector. Unused trailing slots stay zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub(crate) [u16; MAX_VARS]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; MAX_VARS]);

    pub fn var(i: usize, e: u16) -> Self {
        let mut m = Self::ONE;
        m.0[i] = e;
        m
    }

    pub fn from_exps(exps: &[u16]) -> Self {
        let mut m = Self::ONE;
        m.0[..exps.len()].copy_from_slice(exps);
        m
    }

    pub fn exps(&self) -> &[u16; MAX_VARS] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u16 {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, e: u16) {
        self.0[i] = e;
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn degree_in(&self, vars: &[usize]) -> u32 {
        vars.iter().map(|&i| self.0[i] as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, o: &Monomial) -> Result<Monomial> {
        let mut r = *self;
        for (a, b) in r.0.iter_mut().zip(o.0.iter()) {
            *a = a.checked_add(*b).ok_or(Error::ExponentOverflow)?;
        }
        Ok(r)
    }

    pub fn divides(&self, o: &Monomial) -> bool {
        self.0.iter().zip(o.0.iter()).all(|(a, b)| a <= b)
    }

    /// `o / self`, assuming `self` divides `o`.
    pub fn quotient_of(&self, o: &Monomial) -> Monomial {
        let mut r = *o;
        for (a, b) in r.0.iter_mut().zip(self.0.iter()) {
            *a -= *b;
        }
        r
    }

    pub fn gcd(&self, o: &Monomial) -> Monomial {
        let mut r = *self;
        for (a, b) in r.0.iter_mut().zip(o.0.iter()) {
            *a = (*a).min(*b);
        }
        r
    }
}

impl Ord for Monomial {
    /// Graded lexicographic, variable 0 largest.
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree()
            .cmp(&o.degree())
            .then_with(|| self.0.cmp(&o.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl std::fmt::Debug for Monomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let n = self.0.iter().rposition(|&e| e != 0).map_or(0, |i| i + 1);
        write!(f, "{:?}", &self.0[..n])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grlex_order() {
        let q = Monomial::var(0, 1);
        let p2 = Monomial::var(1, 2);
        let p = Monomial::var(1, 1);
        assert!(p2 > q);
        assert!(q > p);
        assert!(p > Monomial::ONE);
    }

    #[test]
    fn overflow_is_checked() {
        let a = Monomial::var(0, u16::MAX);
        assert!(matches!(a.mul(&Monomial::var(0, 1)), Err(Error::ExponentOverflow)));
    }
}
