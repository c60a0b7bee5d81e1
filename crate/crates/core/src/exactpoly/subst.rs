use std::collections::HashMap;

use super::poly::Poly;
use super::ratfun::RationalFunction;
use super::vars::same_table;
use crate::error::{Error, Result};

/// Simultaneous substitution `v_i ↦ n_i/d_i`.
///
/// With `D_i` a degree bound in `v_i`, each term `c·Π v_i^{e_i}` becomes
/// `c·Π n_i^{e_i} d_i^{D_i−e_i}` over the common denominator `Π d_i^{D_i}`.
/// Terms are grouped variable by variable so each power product is formed once.
struct Prepared {
    var: usize,
    /// `n^k · d^{D−k}` for `k = 0..=D`.
    factors: Vec<Poly>,
    den_power: Poly,
}

fn prepare(bindings: &[(usize, RationalFunction)], degs: &[u16]) -> Vec<Prepared> {
    bindings
        .iter()
        .zip(degs)
        .filter(|(_, &d)| d > 0)
        .map(|((var, value), &d)| {
            let d = d as usize;
            let nums = value.num().powers(d);
            let factors = if value.den().is_one() {
                nums
            } else {
                let dens = value.den().powers(d);
                (0..=d).map(|k| &nums[k] * &dens[d - k]).collect()
            };
            Prepared {
                var: *var,
                den_power: value.den().pow(d as u32),
                factors,
            }
        })
        .collect()
}

fn homogenize(p: &Poly, binds: &[Prepared]) -> Poly {
    let Some((b, rest)) = binds.split_first() else {
        return p.clone();
    };
    let mut acc = Poly::zero(p.vars());
    for (k, part) in p.split_by_var(b.var).iter().enumerate() {
        if part.is_zero() {
            continue;
        }
        let inner = homogenize(part, rest);
        acc = acc + &inner * &b.factors[k];
    }
    acc
}

fn validate(p: &Poly, bindings: &[(usize, RationalFunction)]) -> Result<()> {
    for (i, value) in bindings {
        if *i >= p.vars().len() {
            return Err(Error::UnknownVariable(format!("#{i}")));
        }
        if !same_table(p.vars(), value.vars()) {
            return Err(Error::VarTableMismatch);
        }
    }
    Ok(())
}

impl Poly {
    pub fn substitute(&self, bindings: &[(usize, RationalFunction)]) -> Result<RationalFunction> {
        validate(self, bindings)?;
        let degs: Vec<u16> = bindings.iter().map(|(i, _)| self.var_degree(*i)).collect();
        let prepared = prepare(bindings, &degs);
        let num = homogenize(self, &prepared);
        let den = prepared
            .iter()
            .fold(Poly::one(self.vars()), |acc, b| acc * &b.den_power);
        RationalFunction::new(num, den)
    }

    pub fn substitute_named(
        &self,
        bindings: &HashMap<String, RationalFunction>,
    ) -> Result<RationalFunction> {
        let resolved = bindings
            .iter()
            .map(|(name, v)| Ok((self.vars().require(name)?, v.clone())))
            .collect::<Result<Vec<_>>>()?;
        self.substitute(&resolved)
    }
}

impl RationalFunction {
    /// The numerator and denominator are homogenized with the same degree
    /// bounds so the common denominators cancel.
    pub fn substitute(&self, bindings: &[(usize, RationalFunction)]) -> Result<RationalFunction> {
        validate(self.num(), bindings)?;
        let degs: Vec<u16> = bindings
            .iter()
            .map(|(i, _)| self.num().var_degree(*i).max(self.den().var_degree(*i)))
            .collect();
        let prepared = prepare(bindings, &degs);
        let num = homogenize(self.num(), &prepared);
        let den = homogenize(self.den(), &prepared);
        RationalFunction::new(num, den)
    }
}
