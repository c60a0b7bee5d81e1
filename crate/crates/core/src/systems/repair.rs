//! Linear solve for unknown scalar coefficients in a Hamiltonian.

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;

use super::{first_integral_residual, HamiltonianSystem, ParameterRelation, SystemName};
use crate::error::{Error, Result};
use crate::exactpoly::{parse_rational_function, Monomial, Poly, Rational, RationalFunction, VarTable};

/// `H(u) = H_0 + Σ u_k H_k` with the unknowns `u_k` entering linearly.
#[derive(Debug, Clone)]
pub struct Ansatz {
    name: SystemName,
    relation: ParameterRelation,
    unknowns: Vec<String>,
    base: RationalFunction,
    parts: Vec<RationalFunction>,
}

impl Ansatz {
    /// Parses `text` over the standard variables plus `unknowns`.
    pub fn parse(
        name: SystemName,
        relation: ParameterRelation,
        text: &str,
        unknowns: &[&str],
    ) -> Result<Self> {
        let n = relation.coeffs().len();
        let wide = VarTable::with_extra(n, unknowns)?;
        let narrow = VarTable::standard(n);
        let h = parse_rational_function(text, &wide)?;
        let extra: Vec<usize> = wide.extra_indices().collect();
        if extra.iter().any(|&i| h.den().uses_var(i)) {
            return Err(Error::UnsupportedAnsatz("unknown in a denominator".into()));
        }
        let mut base = Vec::new();
        let mut parts = vec![Vec::new(); extra.len()];
        for (m, c) in h.num().terms() {
            let mut which = None;
            for (k, &i) in extra.iter().enumerate() {
                match (m.get(i), which) {
                    (0, _) => {}
                    (1, None) => which = Some(k),
                    _ => {
                        return Err(Error::UnsupportedAnsatz(format!(
                            "nonlinear occurrence of unknowns in a term of degree {}",
                            m.degree_in(&extra)
                        )))
                    }
                }
            }
            let mut m = *m;
            match which {
                None => base.push((m, c.clone())),
                Some(k) => {
                    m.set(extra[k], 0);
                    parts[k].push((m, c.clone()));
                }
            }
        }
        let den = h.den().restrict(&narrow)?;
        let over = |terms: Vec<(Monomial, Rational)>| -> Result<RationalFunction> {
            let num = Poly::from_terms(&wide, terms).restrict(&narrow)?;
            RationalFunction::new(num, den.clone())
        };
        Ok(Ansatz {
            name,
            relation,
            unknowns: unknowns.iter().map(|s| s.to_string()).collect(),
            base: over(base)?,
            parts: parts.into_iter().map(over).collect::<Result<_>>()?,
        })
    }

    pub fn unknowns(&self) -> &[String] {
        &self.unknowns
    }

    pub fn base(&self) -> &RationalFunction {
        &self.base
    }

    pub fn parts(&self) -> &[RationalFunction] {
        &self.parts
    }

    /// The system obtained by fixing the unknowns.
    pub fn instantiate(&self, values: &[Rational]) -> Result<HamiltonianSystem> {
        if values.len() != self.parts.len() {
            return Err(Error::Precondition(format!(
                "expected {} values, got {}",
                self.parts.len(),
                values.len()
            )));
        }
        let mut h = self.base.clone();
        for (part, v) in self.parts.iter().zip(values) {
            h = h.checked_add(&part.scale(v))?;
        }
        HamiltonianSystem::new(self.name, "ansatz", h, self.relation.clone())
    }

    /// `H_0` followed by `H_0 + H_k` for each unknown.
    fn vertices(&self) -> Result<Vec<HamiltonianSystem>> {
        let mut out = vec![HamiltonianSystem::new(
            self.name,
            "ansatz",
            self.base.clone(),
            self.relation.clone(),
        )?];
        for part in &self.parts {
            out.push(HamiltonianSystem::new(
                self.name,
                "ansatz",
                self.base.checked_add(part)?,
                self.relation.clone(),
            )?);
        }
        Ok(out)
    }
}

/// A check whose residual depends affinely on the Hamiltonian.
pub trait Constraint: Sync {
    fn label(&self) -> String;

    /// Residual components for each of `systems`. For weights `λ` summing to
    /// one, the check holds on `Σ λ_k H_k` iff `Σ λ_k r_k` vanishes in every
    /// component.
    fn residuals(&self, systems: &[HamiltonianSystem]) -> Result<Vec<Vec<Poly>>>;
}

pub struct FirstIntegral;

impl Constraint for FirstIntegral {
    fn label(&self) -> String {
        "first-integral".into()
    }

    fn residuals(&self, systems: &[HamiltonianSystem]) -> Result<Vec<Vec<Poly>>> {
        let rs: Vec<RationalFunction> = systems.iter().map(first_integral_residual).collect();
        Ok(clear_denominators(&rs)?.into_iter().map(|p| vec![p]).collect())
    }
}

/// Numerators over a common denominator (the product of the distinct ones).
pub fn clear_denominators(rs: &[RationalFunction]) -> Result<Vec<Poly>> {
    let mut dens: Vec<&Poly> = Vec::new();
    for r in rs {
        if !r.den().is_one() && !dens.contains(&r.den()) {
            dens.push(r.den());
        }
    }
    rs.iter()
        .map(|r| {
            dens.iter()
                .filter(|d| **d != r.den())
                .try_fold(r.num().clone(), |acc, d| acc.checked_mul(d))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolutionSpace {
    Unique(Vec<Rational>),
    /// Affine family: a particular solution and the kernel dimension.
    Family {
        particular: Vec<Rational>,
        dimension: usize,
    },
    Infeasible,
}

/// Row-echelon accumulator for `Σ_k a_k u_k = b`, rows stored as `[a | b]`.
struct Echelon {
    width: usize,
    rows: Vec<(usize, Vec<Rational>)>,
}

impl Echelon {
    /// Returns `false` when the row is inconsistent with the ones before.
    fn push(&mut self, mut row: Vec<Rational>) -> bool {
        for (pivot, r) in &self.rows {
            if !row[*pivot].is_zero() {
                let f = row[*pivot].clone();
                for (x, y) in row.iter_mut().zip(r) {
                    *x -= &f * y;
                }
            }
        }
        match (0..self.width).find(|&j| !row[j].is_zero()) {
            None => row[self.width].is_zero(),
            Some(pivot) => {
                let inv = row[pivot].recip();
                for x in row.iter_mut() {
                    *x *= &inv;
                }
                for (_, r) in self.rows.iter_mut() {
                    if !r[pivot].is_zero() {
                        let f = r[pivot].clone();
                        for (x, y) in r.iter_mut().zip(&row) {
                            *x -= &f * y;
                        }
                    }
                }
                self.rows.push((pivot, row));
                true
            }
        }
    }

    fn solution(&self) -> SolutionSpace {
        let mut particular = vec![Rational::zero(); self.width];
        for (pivot, r) in &self.rows {
            particular[*pivot] = r[self.width].clone();
        }
        let dimension = self.width - self.rows.len();
        if dimension == 0 {
            SolutionSpace::Unique(particular)
        } else {
            SolutionSpace::Family {
                particular,
                dimension,
            }
        }
    }
}

/// Requires every constraint residual to vanish identically and solves for
/// the unknowns.
pub fn repair_hamiltonian(ansatz: &Ansatz, constraints: &[&dyn Constraint]) -> Result<SolutionSpace> {
    let vertices = ansatz.vertices()?;
    let k = ansatz.parts().len();
    let blocks: Vec<Vec<Vec<Poly>>> = constraints
        .par_iter()
        .map(|c| c.residuals(&vertices))
        .collect::<Result<_>>()?;
    let mut ech = Echelon {
        width: k,
        rows: Vec::new(),
    };
    for block in &blocks {
        let components = block[0].len();
        for j in 0..components {
            let mut rows: BTreeMap<Monomial, Vec<Rational>> = BTreeMap::new();
            let blank = || vec![Rational::zero(); k + 1];
            for (m, c) in block[0][j].terms() {
                let row = rows.entry(*m).or_insert_with(blank);
                row[k] -= c;
                for x in row.iter_mut().take(k) {
                    *x -= c;
                }
            }
            for (v, res) in block[1..].iter().enumerate() {
                for (m, c) in res[j].terms() {
                    rows.entry(*m).or_insert_with(blank)[v] += c;
                }
            }
            for (_, row) in rows {
                if !ech.push(row) {
                    return Ok(SolutionSpace::Infeasible);
                }
            }
        }
    }
    Ok(ech.solution())
}

impl SolutionSpace {
    pub fn is_unique(&self) -> bool {
        matches!(self, SolutionSpace::Unique(_))
    }

    pub fn unique_value(&self) -> Option<&[Rational]> {
        match self {
            SolutionSpace::Unique(v) => Some(v),
            _ => None,
        }
    }
}

impl std::fmt::Display for SolutionSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let list = |v: &[Rational]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        match self {
            SolutionSpace::Unique(v) => write!(f, "unique ({})", list(v)),
            SolutionSpace::Family {
                particular,
                dimension,
            } => write!(f, "family of dimension {dimension} through ({})", list(particular)),
            SolutionSpace::Infeasible => f.write_str("infeasible"),
        }
    }
}
