use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};

use super::monomial::Monomial;
use super::poly::Poly;
use super::vars::{same_table, VarTable};
use super::Rational;
use crate::error::{Error, Result};

/// Quotient `num/den` with a monic denominator.
///
/// Construction cancels constant factors and common monomial factors only;
/// [`RationalFunction::reduced`] additionally tries exact division.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        if !same_table(num.vars(), den.vars()) {
            return Err(Error::VarTableMismatch);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        let vars = den.vars().clone();
        if num.is_zero() {
            return RationalFunction {
                num,
                den: Poly::one(&vars),
            };
        }
        let lc = den.leading().unwrap().1.clone();
        let (mut num, mut den) = if lc.is_one() {
            (num, den)
        } else {
            let inv = lc.recip();
            (num.scale(&inv), den.scale(&inv))
        };
        let mut g = den.terms()[0].0;
        for (m, _) in den.terms().iter().chain(num.terms()) {
            g = g.gcd(m);
            if g.is_one() {
                break;
            }
        }
        if !g.is_one() {
            let one = Rational::one();
            num = num.divide_exact(&Poly::monomial(&vars, g, one.clone())).unwrap().unwrap();
            den = den.divide_exact(&Poly::monomial(&vars, g, one)).unwrap().unwrap();
        }
        RationalFunction { num, den }
    }

    pub fn from_poly(p: Poly) -> Self {
        let den = Poly::one(p.vars());
        RationalFunction { num: p, den }
    }

    pub fn zero(vars: &Arc<VarTable>) -> Self {
        Self::from_poly(Poly::zero(vars))
    }

    pub fn one(vars: &Arc<VarTable>) -> Self {
        Self::from_poly(Poly::one(vars))
    }

    pub fn var(vars: &Arc<VarTable>, i: usize) -> Self {
        Self::from_poly(Poly::var(vars, i))
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        self.num.vars()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn into_parts(self) -> (Poly, Poly) {
        (self.num, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        self.den.is_one().then_some(&self.num)
    }

    /// Replaces `num/den` by the quotient when `den` divides `num` exactly.
    pub fn reduced(&self) -> Result<Self> {
        if self.den.is_one() {
            return Ok(self.clone());
        }
        Ok(match self.num.divide_exact(&self.den)? {
            Some(q) => Self::from_poly(q),
            None => self.clone(),
        })
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self> {
        self.combine(o, false)
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self> {
        self.combine(o, true)
    }

    fn combine(&self, o: &Self, negate: bool) -> Result<Self> {
        let join = |a: &Poly, b: &Poly| {
            if negate {
                a.checked_sub(b)
            } else {
                a.checked_add(b)
            }
        };
        if self.den == o.den {
            return Self::new(join(&self.num, &o.num)?, self.den.clone());
        }
        if let (Some(ma), Some(mb)) = (single_monomial(&self.den), single_monomial(&o.den)) {
            let l = lcm(&ma, &mb);
            let one = Rational::one();
            let a = self.num.mul_term(&ma.quotient_of(&l), &one)?;
            let b = o.num.mul_term(&mb.quotient_of(&l), &one)?;
            return Self::new(join(&a, &b)?, Poly::monomial(self.vars(), l, one));
        }
        if let Some(q) = self.den.divide_exact(&o.den)? {
            return Self::new(join(&self.num, &o.num.checked_mul(&q)?)?, self.den.clone());
        }
        if let Some(q) = o.den.divide_exact(&self.den)? {
            return Self::new(join(&self.num.checked_mul(&q)?, &o.num)?, o.den.clone());
        }
        Self::new(
            join(&self.num.checked_mul(&o.den)?, &o.num.checked_mul(&self.den)?)?,
            self.den.checked_mul(&o.den)?,
        )
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self> {
        Self::new(self.num.checked_mul(&o.num)?, self.den.checked_mul(&o.den)?)
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        Self::new(self.num.checked_mul(&o.den)?, self.den.checked_mul(&o.num)?)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::normalized(self.num.scale(c), self.den.clone())
    }

    pub fn mul_poly(&self, p: &Poly) -> Self {
        Self::normalized(&self.num * p, self.den.clone())
    }

    pub fn pow(&self, n: u32) -> Self {
        Self::normalized(self.num.pow(n), self.den.pow(n))
    }

    pub fn derivative(&self, i: usize) -> Self {
        let dn = self.num.derivative(i);
        if !self.den.uses_var(i) {
            return Self::normalized(dn, self.den.clone());
        }
        let dd = self.den.derivative(i);
        Self::normalized(&dn * &self.den - &self.num * &dd, self.den.pow(2))
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(Error::Pole);
        }
        Ok(self.num.eval(point) / d)
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.num.eval_f64(point) / self.den.eval_f64(point)
    }

    pub fn specialize(&self, values: &[(usize, Rational)]) -> Result<Self> {
        Self::new(self.num.specialize(values), self.den.specialize(values))
    }

    pub fn reduce_mod_relation(
        &self,
        coeffs: &[Rational],
        constant: &Rational,
        eliminated: usize,
    ) -> Result<Self> {
        Self::new(
            self.num.reduce_mod_relation(coeffs, constant, eliminated)?,
            self.den.reduce_mod_relation(coeffs, constant, eliminated)?,
        )
    }

    pub fn lift(&self, vars: &Arc<VarTable>) -> Result<Self> {
        Ok(RationalFunction {
            num: self.num.lift(vars)?,
            den: self.den.lift(vars)?,
        })
    }

    pub fn uses_var(&self, i: usize) -> bool {
        self.num.uses_var(i) || self.den.uses_var(i)
    }
}

fn single_monomial(p: &Poly) -> Option<Monomial> {
    match p.terms() {
        [(m, c)] if c.is_one() => Some(*m),
        _ => None,
    }
}

fn lcm(a: &Monomial, b: &Monomial) -> Monomial {
    let mut r = *a;
    for i in 0..super::vars::MAX_VARS {
        r.set(i, a.get(i).max(b.get(i)));
    }
    r
}

impl From<Poly> for RationalFunction {
    fn from(p: Poly) -> Self {
        Self::from_poly(p)
    }
}

impl std::fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RationalFunction({self})")
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&RationalFunction> for &RationalFunction {
            type Output = RationalFunction;
            fn $m(self, o: &RationalFunction) -> RationalFunction {
                self.$checked(o).expect("rational function arithmetic")
            }
        }
        impl $tr<RationalFunction> for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, o: RationalFunction) -> RationalFunction {
                (&self).$checked(&o).expect("rational function arithmetic")
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);
binop!(Div, div, checked_div);

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}
