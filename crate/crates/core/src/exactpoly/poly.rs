use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;

use super::monomial::Monomial;
use super::vars::{same_table, VarTable};
use super::Rational;
use crate::error::{Error, Result};

/// Sparse polynomial over ℚ. Terms are kept strictly descending in grlex
/// order with no zero coefficients, so structural equality is equality.
#[derive(Clone)]
pub struct Poly {
    vars: Arc<VarTable>,
    terms: Vec<(Monomial, Rational)>,
}

impl PartialEq for Poly {
    fn eq(&self, o: &Self) -> bool {
        same_table(&self.vars, &o.vars) && self.terms == o.terms
    }
}

impl Eq for Poly {}

impl Poly {
    pub fn zero(vars: &Arc<VarTable>) -> Self {
        Poly {
            vars: vars.clone(),
            terms: Vec::new(),
        }
    }

    pub fn one(vars: &Arc<VarTable>) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn constant(vars: &Arc<VarTable>, c: Rational) -> Self {
        Self::monomial(vars, Monomial::ONE, c)
    }

    pub fn int(vars: &Arc<VarTable>, c: i64) -> Self {
        Self::constant(vars, Rational::from_integer(c.into()))
    }

    pub fn monomial(vars: &Arc<VarTable>, m: Monomial, c: Rational) -> Self {
        let terms = if c.is_zero() { vec![] } else { vec![(m, c)] };
        Poly {
            vars: vars.clone(),
            terms,
        }
    }

    pub fn var(vars: &Arc<VarTable>, i: usize) -> Self {
        assert!(i < vars.len(), "variable index out of range");
        Self::monomial(vars, Monomial::var(i, 1), Rational::one())
    }

    pub fn named(vars: &Arc<VarTable>, name: &str) -> Result<Self> {
        Ok(Self::var(vars, vars.require(name)?))
    }

    /// Sums repeated monomials.
    pub fn from_terms(
        vars: &Arc<VarTable>,
        terms: impl IntoIterator<Item = (Monomial, Rational)>,
    ) -> Self {
        let mut acc: FxHashMap<Monomial, Rational> = FxHashMap::default();
        for (m, c) in terms {
            *acc.entry(m).or_insert_with(Rational::zero) += c;
        }
        Self::from_map(vars, acc)
    }

    fn from_map(vars: &Arc<VarTable>, map: FxHashMap<Monomial, Rational>) -> Self {
        let mut terms: Vec<_> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Poly {
            vars: vars.clone(),
            terms,
        }
    }

    pub(crate) fn from_sorted(vars: &Arc<VarTable>, terms: Vec<(Monomial, Rational)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        Poly {
            vars: vars.clone(),
            terms,
        }
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vars
    }

    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    /// Value of a constant polynomial (zero included).
    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<&(Monomial, Rational)> {
        self.terms.first()
    }

    pub fn degree(&self) -> u32 {
        self.terms.first().map_or(0, |(m, _)| m.degree())
    }

    pub fn degree_in(&self, vars: &[usize]) -> u32 {
        self.terms
            .iter()
            .map(|(m, _)| m.degree_in(vars))
            .max()
            .unwrap_or(0)
    }

    pub fn var_degree(&self, i: usize) -> u16 {
        self.terms.iter().map(|(m, _)| m.get(i)).max().unwrap_or(0)
    }

    pub fn uses_var(&self, i: usize) -> bool {
        self.terms.iter().any(|(m, _)| m.get(i) > 0)
    }

    /// Variables that occur with a positive exponent.
    pub fn support(&self) -> Vec<usize> {
        (0..self.vars.len()).filter(|&i| self.uses_var(i)).collect()
    }

    fn check(&self, o: &Poly) -> Result<()> {
        if same_table(&self.vars, &o.vars) {
            Ok(())
        } else {
            Err(Error::VarTableMismatch)
        }
    }

    pub fn checked_add(&self, o: &Poly) -> Result<Poly> {
        self.check(o)?;
        Ok(self.merge(o, false))
    }

    pub fn checked_sub(&self, o: &Poly) -> Result<Poly> {
        self.check(o)?;
        Ok(self.merge(o, true))
    }

    pub fn checked_mul(&self, o: &Poly) -> Result<Poly> {
        self.check(o)?;
        if self.is_zero() || o.is_zero() {
            return Ok(Poly::zero(&self.vars));
        }
        let (small, big) = if self.len() <= o.len() { (self, o) } else { (o, self) };
        if small.len() == 1 {
            let (m, c) = &small.terms[0];
            return big.mul_term(m, c);
        }
        let mut acc: FxHashMap<Monomial, Rational> =
            FxHashMap::with_capacity_and_hasher(self.len() * o.len() / 2 + 1, Default::default());
        for (ma, ca) in &small.terms {
            for (mb, cb) in &big.terms {
                let m = ma.mul(mb)?;
                let c = ca * cb;
                match acc.get_mut(&m) {
                    Some(v) => *v += c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        Ok(Poly::from_map(&self.vars, acc))
    }

    /// Multiplication by one term keeps the order, so no sorting is needed.
    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> Result<Poly> {
        if c.is_zero() {
            return Ok(Poly::zero(&self.vars));
        }
        let terms = self
            .terms
            .iter()
            .map(|(mm, cc)| Ok((mm.mul(m)?, cc * c)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Poly::from_sorted(&self.vars, terms))
    }

    fn merge(&self, o: &Poly, negate: bool) -> Poly {
        let mut out = Vec::with_capacity(self.len() + o.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &o.terms);
        let sign = |c: &Rational| if negate { -c } else { c.clone() };
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    out.push((b[j].0, sign(&b[j].1)));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(m, c)| (*m, sign(c))));
        Poly::from_sorted(&self.vars, out)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.vars);
        }
        let terms = self.terms.iter().map(|(m, cc)| (*m, cc * c)).collect();
        Poly::from_sorted(&self.vars, terms)
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::one(&self.vars);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Successive powers `self^0 ..= self^n`.
    pub fn powers(&self, n: usize) -> Vec<Poly> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(Poly::one(&self.vars));
        for k in 1..=n {
            let next = &out[k - 1] * self;
            out.push(next);
        }
        out
    }

    pub fn derivative(&self, i: usize) -> Poly {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.get(i) > 0)
            .map(|(m, c)| {
                let e = m.get(i);
                let mut mm = *m;
                mm.set(i, e - 1);
                (mm, c * Rational::from_integer(e.into()))
            });
        Poly::from_terms(&self.vars, terms)
    }

    pub fn derivative_by(&self, name: &str) -> Result<Poly> {
        Ok(self.derivative(self.vars.require(name)?))
    }

    /// Exact value; `point[i]` is the value of variable `i`.
    ///
    /// Works over the integers: each term is scaled by the common
    /// denominator of the coefficients and by `Π d_i^{D_i}` for the point
    /// denominators `d_i` and degree bounds `D_i`.
    pub fn eval(&self, point: &[Rational]) -> Rational {
        let n = self.vars.len();
        let mut degs = vec![0usize; n];
        let mut lcm = BigInt::one();
        for (m, c) in &self.terms {
            for (d, &e) in degs.iter_mut().zip(m.exps()) {
                *d = (*d).max(e as usize);
            }
            if !c.denom().is_one() {
                lcm = lcm.lcm(c.denom());
            }
        }
        let table = |x: &BigInt, d: usize| {
            let mut row = Vec::with_capacity(d + 1);
            row.push(BigInt::one());
            for k in 0..d {
                let next = &row[k] * x;
                row.push(next);
            }
            row
        };
        let nums: Vec<Vec<BigInt>> = (0..n).map(|i| table(point[i].numer(), degs[i])).collect();
        let dens: Vec<Option<Vec<BigInt>>> = (0..n)
            .map(|i| (!point[i].denom().is_one()).then(|| table(point[i].denom(), degs[i])))
            .collect();
        let mut total = BigInt::zero();
        for (m, c) in &self.terms {
            let mut v = if c.denom().is_one() {
                c.numer() * &lcm
            } else {
                c.numer() * (&lcm / c.denom())
            };
            for i in 0..n {
                let e = m.get(i) as usize;
                if e > 0 {
                    v *= &nums[i][e];
                }
                if let Some(d) = &dens[i] {
                    if e < degs[i] {
                        v *= &d[degs[i] - e];
                    }
                }
            }
            total += v;
        }
        let mut den = lcm;
        for (i, d) in dens.iter().enumerate() {
            if let Some(d) = d {
                den *= &d[degs[i]];
            }
        }
        Rational::new(total, den)
    }

    pub fn eval_named(&self, point: &HashMap<String, Rational>) -> Result<Rational> {
        let mut values = vec![Rational::zero(); self.vars.len()];
        for i in self.support() {
            let name = self.vars.name(i);
            values[i] = point
                .get(name)
                .cloned()
                .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        }
        Ok(self.eval(&values))
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut v = super::to_f64(c);
                for (i, &e) in m.exps().iter().enumerate().take(self.vars.len()) {
                    if e > 0 {
                        v *= point[i].powi(e as i32);
                    }
                }
                v
            })
            .sum()
    }

    /// Replaces the listed variables by constants.
    pub fn specialize(&self, values: &[(usize, Rational)]) -> Poly {
        let mut pows: Vec<(usize, Vec<Rational>)> =
            values.iter().map(|(i, v)| (*i, vec![Rational::one(), v.clone()])).collect();
        let terms = self.terms.iter().map(|(m, c)| {
            let mut mm = *m;
            let mut cc = c.clone();
            for (i, row) in pows.iter_mut() {
                let e = m.get(*i) as usize;
                if e == 0 {
                    continue;
                }
                while row.len() <= e {
                    let next = row.last().unwrap() * &row[1];
                    row.push(next);
                }
                cc *= &row[e];
                mm.set(*i, 0);
            }
            (mm, cc)
        });
        Poly::from_terms(&self.vars, terms.collect::<Vec<_>>())
    }

    /// Coefficients of `self` as a polynomial in variable `i`; entry `k`
    /// multiplies `v_i^k` and no longer contains `v_i`.
    pub fn split_by_var(&self, i: usize) -> Vec<Poly> {
        let d = self.var_degree(i) as usize;
        let mut parts = vec![Vec::new(); d + 1];
        for (m, c) in &self.terms {
            let mut mm = *m;
            mm.set(i, 0);
            parts[m.get(i) as usize].push((mm, c.clone()));
        }
        parts
            .into_iter()
            .map(|t| Poly::from_sorted(&self.vars, t))
            .collect()
    }

    /// Substitutes a polynomial for one variable (Horner in that variable).
    pub fn compose_var(&self, i: usize, r: &Poly) -> Poly {
        if !self.uses_var(i) {
            return self.clone();
        }
        let parts = self.split_by_var(i);
        let mut acc = parts.last().unwrap().clone();
        for part in parts.iter().rev().skip(1) {
            acc = &(&acc * r) + part;
        }
        acc
    }

    /// `Some(h)` with `self = g·h`, or `None` when `g` does not divide.
    pub fn divide_exact(&self, g: &Poly) -> Result<Option<Poly>> {
        self.check(g)?;
        if g.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        if self.is_zero() {
            return Ok(Some(Poly::zero(&self.vars)));
        }
        for i in g.support() {
            if self.var_degree(i) < g.var_degree(i) {
                return Ok(None);
            }
        }
        let (lm, lc) = g.terms[0].clone();
        if g.len() == 1 {
            let mut out = Vec::with_capacity(self.len());
            for (m, c) in &self.terms {
                if !lm.divides(m) {
                    return Ok(None);
                }
                out.push((lm.quotient_of(m), c / &lc));
            }
            return Ok(Some(Poly::from_sorted(&self.vars, out)));
        }
        let mut rem: BTreeMap<Monomial, Rational> = self.terms.iter().cloned().collect();
        let mut quot = Vec::new();
        while let Some((m, c)) = rem.pop_last() {
            if !lm.divides(&m) {
                return Ok(None);
            }
            let qm = lm.quotient_of(&m);
            let qc = c / &lc;
            for (gm, gc) in &g.terms[1..] {
                let nm = gm.mul(&qm)?;
                let delta = &qc * gc;
                match rem.get_mut(&nm) {
                    Some(v) => {
                        *v -= delta;
                        if v.is_zero() {
                            rem.remove(&nm);
                        }
                    }
                    None => {
                        rem.insert(nm, -delta);
                    }
                }
            }
            quot.push((qm, qc));
        }
        Ok(Some(Poly::from_sorted(&self.vars, quot)))
    }

    /// Division with remainder by the leading term of `g`: no term of the
    /// remainder is divisible by it. The remainder is zero iff `g | self`.
    pub fn div_rem(&self, g: &Poly) -> Result<(Poly, Poly)> {
        self.check(g)?;
        if g.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        let (lm, lc) = g.terms[0].clone();
        let mut work: BTreeMap<Monomial, Rational> = self.terms.iter().cloned().collect();
        let mut quot = Vec::new();
        let mut rem = Vec::new();
        while let Some((m, c)) = work.pop_last() {
            if !lm.divides(&m) {
                rem.push((m, c));
                continue;
            }
            let qm = lm.quotient_of(&m);
            let qc = c / &lc;
            for (gm, gc) in &g.terms[1..] {
                let nm = gm.mul(&qm)?;
                let delta = &qc * gc;
                match work.get_mut(&nm) {
                    Some(v) => {
                        *v -= delta;
                        if v.is_zero() {
                            work.remove(&nm);
                        }
                    }
                    None => {
                        work.insert(nm, -delta);
                    }
                }
            }
            quot.push((qm, qc));
        }
        Ok((
            Poly::from_sorted(&self.vars, quot),
            Poly::from_sorted(&self.vars, rem),
        ))
    }

    /// Eliminates the parameter `a{eliminated}` using `Σ c_i a_i = constant`.
    pub fn reduce_mod_relation(
        &self,
        coeffs: &[Rational],
        constant: &Rational,
        eliminated: usize,
    ) -> Result<Poly> {
        let ce = &coeffs[eliminated];
        if ce.is_zero() {
            return Err(Error::ZeroRelationCoefficient);
        }
        let var = super::vars::alpha(eliminated);
        if !self.uses_var(var) {
            return Ok(self.clone());
        }
        let mut terms = vec![(Monomial::ONE, constant / ce)];
        for (i, c) in coeffs.iter().enumerate() {
            if i != eliminated && !c.is_zero() {
                terms.push((Monomial::var(super::vars::alpha(i), 1), -(c / ce)));
            }
        }
        let replacement = Poly::from_terms(&self.vars, terms);
        Ok(self.compose_var(var, &replacement))
    }

    /// Reinterprets the polynomial in a table that extends this one.
    pub fn lift(&self, vars: &Arc<VarTable>) -> Result<Poly> {
        let own = self.vars.names();
        if vars.len() < own.len() || &vars.names()[..own.len()] != own {
            return Err(Error::VarTableMismatch);
        }
        Ok(Poly {
            vars: vars.clone(),
            terms: self.terms.clone(),
        })
    }

    /// Drops trailing variables that do not occur; inverse of [`Poly::lift`].
    pub fn restrict(&self, vars: &Arc<VarTable>) -> Result<Poly> {
        let n = vars.len();
        if self.vars.len() < n || &self.vars.names()[..n] != vars.names() {
            return Err(Error::VarTableMismatch);
        }
        if (n..self.vars.len()).any(|i| self.uses_var(i)) {
            return Err(Error::VarTableMismatch);
        }
        Ok(Poly {
            vars: vars.clone(),
            terms: self.terms.clone(),
        })
    }
}

impl std::fmt::Debug for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Poly({self})")
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&Poly> for &Poly {
            type Output = Poly;
            fn $m(self, o: &Poly) -> Poly {
                self.$checked(o).expect("polynomial arithmetic")
            }
        }
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, o: Poly) -> Poly {
                (&self).$checked(&o).expect("polynomial arithmetic")
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, o: &Poly) -> Poly {
                (&self).$checked(o).expect("polynomial arithmetic")
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let terms = self.terms.iter().map(|(m, c)| (*m, -c)).collect();
        Poly::from_sorted(&self.vars, terms)
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}
