//! Birational maps on `(q, p, t; α)` and the certifications built on them.

mod catalog;
mod checks;

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactpoly::{alpha, Poly, Rational, RationalFunction, VarTable, P, Q, T};
use crate::systems::{ParameterRelation, SystemName};

pub use catalog::{load_catalog, parse_map, Catalog, MapFile};
pub use checks::{
    check_equivalence_pvi, check_polynomial_in_chart, check_symmetry, check_symplectic,
    pullback_field, HolomorphyConstraint, SymmetryConstraint,
};

/// `t ↦ (a t + b)/(c t + d)` with `ad − bc ≠ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeMap {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
}

impl TimeMap {
    pub fn identity() -> Self {
        TimeMap {
            a: Rational::one(),
            b: Rational::zero(),
            c: Rational::zero(),
            d: Rational::one(),
        }
    }

    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Result<Self> {
        if (&a * &d - &b * &c).is_zero() {
            return Err(Error::Precondition("degenerate time map".into()));
        }
        Ok(TimeMap { a, b, c, d })
    }

    /// Reads the coefficients off a rational function of `t` alone.
    pub fn from_rf(r: &RationalFunction) -> Result<Self> {
        let bad = || Error::Precondition(format!("time map `{r}` is not Möbius in t"));
        if r.num().support().iter().chain(r.den().support().iter()).any(|&v| v != T)
            || r.num().var_degree(T) > 1
            || r.den().var_degree(T) > 1
        {
            return Err(bad());
        }
        let coeffs = |p: &Poly| -> (Rational, Rational) {
            let parts = p.split_by_var(T);
            let get = |k: usize| {
                parts
                    .get(k)
                    .and_then(|x| x.constant_value())
                    .unwrap_or_else(Rational::zero)
            };
            (get(1), get(0))
        };
        let (a, b) = coeffs(r.num());
        let (c, d) = coeffs(r.den());
        Self::new(a, b, c, d)
    }

    pub fn is_identity(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d
    }

    pub fn det(&self) -> Rational {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn to_rf(&self, vars: &Arc<VarTable>) -> RationalFunction {
        let lin = |x: &Rational, y: &Rational| {
            Poly::var(vars, T).scale(x) + Poly::constant(vars, y.clone())
        };
        RationalFunction::new(lin(&self.a, &self.b), lin(&self.c, &self.d))
            .expect("nonzero denominator")
    }

    /// `dT/dt = det/(ct + d)²`.
    pub fn derivative_rf(&self, vars: &Arc<VarTable>) -> RationalFunction {
        let den = Poly::var(vars, T).scale(&self.c) + Poly::constant(vars, self.d.clone());
        RationalFunction::new(Poly::constant(vars, self.det()), den.pow(2))
            .expect("nonzero denominator")
    }

    pub fn eval(&self, t: &Rational) -> Result<Rational> {
        let den = &self.c * t + &self.d;
        if den.is_zero() {
            return Err(Error::Pole);
        }
        Ok((&self.a * t + &self.b) / den)
    }

    pub fn derivative_at(&self, t: &Rational) -> Result<Rational> {
        let den = &self.c * t + &self.d;
        if den.is_zero() {
            return Err(Error::Pole);
        }
        Ok(self.det() / (&den * &den))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &TimeMap) -> TimeMap {
        TimeMap {
            a: &self.a * &inner.a + &self.b * &inner.c,
            b: &self.a * &inner.b + &self.b * &inner.d,
            c: &self.c * &inner.a + &self.d * &inner.c,
            d: &self.c * &inner.b + &self.d * &inner.d,
        }
    }

    pub fn inverse(&self) -> TimeMap {
        TimeMap {
            a: self.d.clone(),
            b: -self.b.clone(),
            c: -self.c.clone(),
            d: self.a.clone(),
        }
    }
}

/// `α ↦ Aα + b`; row `i` of `A` holds the coefficients of `α'_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamMap {
    pub matrix: Vec<Vec<Rational>>,
    pub offset: Vec<Rational>,
}

impl ParamMap {
    pub fn identity(n: usize) -> Self {
        ParamMap {
            matrix: (0..n)
                .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
                .collect(),
            offset: vec![Rational::zero(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.offset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offset.is_empty()
    }

    fn row_is_unit(&self, i: usize) -> bool {
        self.offset[i].is_zero()
            && self.matrix[i]
                .iter()
                .enumerate()
                .all(|(j, x)| if i == j { x.is_one() } else { x.is_zero() })
    }

    pub fn is_identity(&self) -> bool {
        (0..self.len()).all(|i| self.row_is_unit(i))
    }

    pub fn apply(&self, alpha: &[Rational]) -> Vec<Rational> {
        self.matrix
            .iter()
            .zip(&self.offset)
            .map(|(row, b)| row.iter().zip(alpha).fold(b.clone(), |acc, (x, a)| acc + x * a))
            .collect()
    }

    pub fn apply_f64(&self, alpha: &[f64]) -> Vec<f64> {
        self.matrix
            .iter()
            .zip(&self.offset)
            .map(|(row, b)| {
                row.iter()
                    .zip(alpha)
                    .fold(crate::exactpoly::to_f64(b), |acc, (x, a)| acc + crate::exactpoly::to_f64(x) * a)
            })
            .collect()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &ParamMap) -> ParamMap {
        let n = self.len();
        let matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n).fold(Rational::zero(), |acc, k| acc + &self.matrix[i][k] * &inner.matrix[k][j])
                    })
                    .collect()
            })
            .collect();
        ParamMap {
            matrix,
            offset: self.apply(&inner.offset),
        }
    }

    pub fn inverse(&self) -> Result<ParamMap> {
        let n = self.len();
        let mut m: Vec<Vec<Rational>> = self
            .matrix
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = row.clone();
                r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
                r
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !m[r][col].is_zero())
                .ok_or_else(|| Error::Precondition("singular parameter map".into()))?;
            m.swap(col, pivot);
            let inv = m[col][col].recip();
            for x in m[col].iter_mut() {
                *x *= &inv;
            }
            for r in 0..n {
                if r != col && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    let pr = m[col].clone();
                    for (x, y) in m[r].iter_mut().zip(&pr) {
                        *x -= &f * y;
                    }
                }
            }
        }
        let matrix: Vec<Vec<Rational>> = m.into_iter().map(|r| r[n..].to_vec()).collect();
        let linear = ParamMap {
            matrix,
            offset: vec![Rational::zero(); n],
        };
        let offset = linear.apply(&self.offset).into_iter().map(|x| -x).collect();
        Ok(ParamMap {
            matrix: linear.matrix,
            offset,
        })
    }

    /// `Some(σ)` with `α'_i = α_{σ(i)}` when the map permutes the parameters.
    pub fn as_permutation(&self) -> Option<Vec<usize>> {
        let n = self.len();
        let mut perm = Vec::with_capacity(n);
        for (row, b) in self.matrix.iter().zip(&self.offset) {
            if !b.is_zero() {
                return None;
            }
            let ones: Vec<usize> = (0..n).filter(|&j| row[j].is_one()).collect();
            if ones.len() != 1 || row.iter().filter(|x| !x.is_zero()).count() != 1 {
                return None;
            }
            perm.push(ones[0]);
        }
        let mut seen = vec![false; n];
        for &j in &perm {
            if std::mem::replace(&mut seen[j], true) {
                return None;
            }
        }
        Some(perm)
    }

    /// Substitutions `a_i ↦ (Aα + b)_i` for the rows that change.
    pub fn bindings(
        &self,
        vars: &Arc<VarTable>,
        relation: &ParameterRelation,
    ) -> Vec<(usize, RationalFunction)> {
        (0..self.len())
            .filter(|&i| !self.row_is_unit(i))
            .map(|i| {
                let mut p = Poly::constant(vars, self.offset[i].clone());
                for (j, x) in self.matrix[i].iter().enumerate() {
                    if !x.is_zero() {
                        p = p + Poly::var(vars, alpha(j)).scale(x);
                    }
                }
                (alpha(i), RationalFunction::from_poly(relation.reduce(&p)))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MapKind {
    Chart,
    Generator,
    Automorphism,
    Equivalence,
    Composite,
}

impl MapKind {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "chart" => MapKind::Chart,
            "generator" => MapKind::Generator,
            "automorphism" => MapKind::Automorphism,
            "equivalence" => MapKind::Equivalence,
            _ => return None,
        })
    }
}

/// `(q, p, t; α) ↦ (Q, P, T; Aα + b)`.
#[derive(Debug, Clone)]
pub struct BirationalMap {
    pub name: String,
    pub kind: MapKind,
    pub q: RationalFunction,
    pub p: RationalFunction,
    pub time: TimeMap,
    pub params: ParamMap,
    pub relation: ParameterRelation,
    pub target: Option<SystemName>,
    pub inverse: Option<Box<BirationalMap>>,
}

impl BirationalMap {
    pub fn identity(vars: &Arc<VarTable>, relation: &ParameterRelation) -> Self {
        BirationalMap {
            name: "id".into(),
            kind: MapKind::Composite,
            q: RationalFunction::var(vars, Q),
            p: RationalFunction::var(vars, P),
            time: TimeMap::identity(),
            params: ParamMap::identity(relation.coeffs().len()),
            relation: relation.clone(),
            target: None,
            inverse: None,
        }
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        self.q.vars()
    }

    pub fn alpha_count(&self) -> usize {
        self.params.len()
    }

    pub fn inverse(&self) -> Result<&BirationalMap> {
        self.inverse
            .as_deref()
            .ok_or_else(|| Error::Unsupported(format!("map {} has no inverse", self.name)))
    }

    /// The bindings that realise this map as a substitution.
    pub fn substitution(&self) -> Vec<(usize, RationalFunction)> {
        let mut out = vec![(Q, self.q.clone()), (P, self.p.clone())];
        if !self.time.is_identity() {
            out.push((T, self.time.to_rf(self.vars())));
        }
        out.extend(self.params.bindings(self.vars(), &self.relation));
        out
    }

    /// `f ↦ f(Q, P, T, Aα + b)`, reduced modulo the relation.
    pub fn pull(&self, f: &RationalFunction) -> Result<RationalFunction> {
        let r = f.substitute(&self.substitution())?;
        self.relation.reduce_rf(&r).reduced()
    }

    pub fn apply_point(
        &self,
        point: [&Rational; 3],
        alpha_values: &[Rational],
    ) -> Result<([Rational; 3], Vec<Rational>)> {
        if alpha_values.len() != self.alpha_count() {
            return Err(Error::AlphaCountMismatch(alpha_values.len(), self.alpha_count()));
        }
        let mut full: Vec<Rational> = point.iter().map(|x| (*x).clone()).collect();
        full.extend(alpha_values.iter().cloned());
        let q = self.q.eval(&full)?;
        let p = self.p.eval(&full)?;
        let t = self.time.eval(point[2])?;
        Ok(([q, p, t], self.params.apply(alpha_values)))
    }

    /// Whether the map is the identity on coordinates, time and parameters.
    pub fn is_identity(&self) -> bool {
        let vars = self.vars();
        let same = |r: &RationalFunction, v: usize| {
            let d = r.num() - &(r.den() * &Poly::var(vars, v));
            self.relation.reduce(&d).is_zero()
        };
        same(&self.q, Q) && same(&self.p, P) && self.time.is_identity() && self.params.is_identity()
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &BirationalMap) -> Result<BirationalMap> {
        if self.alpha_count() != inner.alpha_count() {
            return Err(Error::AlphaCountMismatch(self.alpha_count(), inner.alpha_count()));
        }
        let inverse = match (&self.inverse, &inner.inverse) {
            (Some(a), Some(b)) => Some(Box::new(b.compose(a)?)),
            _ => None,
        };
        Ok(BirationalMap {
            name: format!("{}∘{}", self.name, inner.name),
            kind: MapKind::Composite,
            q: inner.pull(&self.q)?,
            p: inner.pull(&self.p)?,
            time: self.time.compose(&inner.time),
            params: self.params.compose(&inner.params),
            relation: self.relation.clone(),
            target: self.target.or(inner.target),
            inverse,
        })
    }

    /// Specializes parameters of a map that leaves them fixed.
    pub fn specialize_alpha(&self, values: &[(usize, Rational)]) -> Result<BirationalMap> {
        if !self.params.is_identity() {
            return Err(Error::Unsupported(format!(
                "cannot specialize parameters of {}, which moves them",
                self.name
            )));
        }
        Ok(BirationalMap {
            q: self.q.specialize(values)?,
            p: self.p.specialize(values)?,
            inverse: match &self.inverse {
                Some(inv) => Some(Box::new(inv.specialize_alpha(values)?)),
                None => None,
            },
            ..self.clone()
        })
    }
}

impl fmt::Display for BirationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: (q, p) -> ({}, {})", self.name, self.q, self.p)
    }
}
