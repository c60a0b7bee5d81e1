//! The Hamiltonian systems, their parameter relations and vector fields.

mod repair;

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use num_traits::Zero;

use crate::error::{read_file, Error, Result};
use crate::exactpoly::{
    int, parse_rational_function, Poly, Rational, RationalFunction, VarTable, P, Q, T,
};
use crate::report::{CheckKind, CheckReport, Mode, Residual};

pub use repair::{
    clear_denominators, repair_hamiltonian, Ansatz, Constraint, FirstIntegral, SolutionSpace,
};

/// `Σ c_i α_i = constant`. The last parameter is the one eliminated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterRelation {
    coeffs: Vec<i64>,
    constant: i64,
}

impl ParameterRelation {
    pub fn new(coeffs: Vec<i64>, constant: i64) -> Result<Self> {
        match coeffs.last() {
            None => Err(Error::Precondition("empty relation".into())),
            Some(0) => Err(Error::ZeroRelationCoefficient),
            Some(_) => Ok(ParameterRelation { coeffs, constant }),
        }
    }

    /// `c0 c1 … cn = k`, `#` comments allowed.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let body: String = text
            .lines()
            .map(|l| l.split('#').next().unwrap().trim())
            .filter(|l| !l.is_empty())
            .collect::<Vec<_>>()
            .join(" ");
        let bad = |m: &str| Error::Malformed {
            path: origin.to_string(),
            line: 0,
            message: m.to_string(),
        };
        let (lhs, rhs) = body.split_once('=').ok_or_else(|| bad("missing `=`"))?;
        let coeffs = lhs
            .split_whitespace()
            .map(|s| s.parse::<i64>().map_err(|_| bad("bad coefficient")))
            .collect::<Result<Vec<_>>>()?;
        let constant = rhs.trim().parse::<i64>().map_err(|_| bad("bad constant"))?;
        Self::new(coeffs, constant)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn constant(&self) -> i64 {
        self.constant
    }

    pub fn eliminated(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn rational_coeffs(&self) -> Vec<Rational> {
        self.coeffs.iter().map(|&c| int(c)).collect()
    }

    pub fn reduce(&self, p: &Poly) -> Poly {
        p.reduce_mod_relation(&self.rational_coeffs(), &int(self.constant), self.eliminated())
            .expect("last coefficient is nonzero")
    }

    pub fn reduce_rf(&self, r: &RationalFunction) -> RationalFunction {
        r.reduce_mod_relation(&self.rational_coeffs(), &int(self.constant), self.eliminated())
            .expect("last coefficient is nonzero")
    }

    pub fn holds(&self, values: &[Rational]) -> bool {
        self.lhs(values) == int(self.constant)
    }

    fn lhs(&self, values: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .zip(values)
            .fold(Rational::zero(), |acc, (c, v)| acc + int(*c) * v)
    }

    pub fn holds_f64(&self, values: &[f64], tol: f64) -> bool {
        let s: f64 = self.coeffs.iter().zip(values).map(|(c, v)| *c as f64 * v).sum();
        (s - self.constant as f64).abs() <= tol
    }

    /// Overwrites the eliminated entry so the relation holds exactly.
    pub fn project(&self, values: &mut [Rational]) {
        let e = self.eliminated();
        values[e] = Rational::zero();
        let rest = self.lhs(values);
        values[e] = (int(self.constant) - rest) / int(self.coeffs[e]);
    }

    /// Whether `α ↦ Aα + b` maps the relation hyperplane into itself.
    pub fn preserved_by(&self, matrix: &[Vec<Rational>], offset: &[Rational]) -> bool {
        let n = self.coeffs.len();
        let c = self.rational_coeffs();
        let row_ok = (0..n).all(|j| {
            let s = (0..n).fold(Rational::zero(), |acc, i| acc + &c[i] * &matrix[i][j]);
            s == c[j]
        });
        let shift = (0..n).fold(Rational::zero(), |acc, i| acc + &c[i] * &offset[i]);
        row_ok && shift.is_zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SystemName {
    E6,
    E7,
    E8,
    PviG,
    PviHvi,
}

impl SystemName {
    pub const ALL: [SystemName; 5] = [
        SystemName::E6,
        SystemName::E7,
        SystemName::E8,
        SystemName::PviG,
        SystemName::PviHvi,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SystemName::E6 => "e6",
            SystemName::E7 => "e7",
            SystemName::E8 => "e8",
            SystemName::PviG => "pvi_g",
            SystemName::PviHvi => "pvi_hvi",
        }
    }

    pub fn alpha_count(&self) -> usize {
        match self {
            SystemName::E6 => 7,
            SystemName::E7 => 8,
            SystemName::E8 => 9,
            SystemName::PviG | SystemName::PviHvi => 5,
        }
    }

    pub fn declared_degree(&self) -> Option<u32> {
        match self {
            SystemName::E6 => Some(7),
            SystemName::E7 => Some(10),
            SystemName::E8 => Some(15),
            SystemName::PviG => Some(7),
            SystemName::PviHvi => None,
        }
    }

    pub fn is_pvi(&self) -> bool {
        matches!(self, SystemName::PviG | SystemName::PviHvi)
    }
}

impl fmt::Display for SystemName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SystemName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SystemName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::UnknownSystem(s.to_string()))
    }
}

/// `f = ∂H/∂p`, `g = −∂H/∂q`, reduced modulo the relation.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub f: RationalFunction,
    pub g: RationalFunction,
}

#[derive(Debug, Clone)]
pub struct HamiltonianSystem {
    name: SystemName,
    variant: String,
    hamiltonian: RationalFunction,
    relation: ParameterRelation,
}

impl HamiltonianSystem {
    /// Builds a system without the degree assertion; `H` is reduced modulo
    /// the relation.
    pub fn new(
        name: SystemName,
        variant: impl Into<String>,
        hamiltonian: RationalFunction,
        relation: ParameterRelation,
    ) -> Result<Self> {
        if hamiltonian.vars().alpha_count() != relation.coeffs().len() {
            return Err(Error::AlphaCountMismatch(
                hamiltonian.vars().alpha_count(),
                relation.coeffs().len(),
            ));
        }
        let den_vars = hamiltonian.den().support();
        if den_vars.iter().any(|&v| v != T) {
            return Err(Error::Precondition(
                "Hamiltonian denominator may involve t only".into(),
            ));
        }
        let hamiltonian = relation.reduce_rf(&hamiltonian);
        Ok(HamiltonianSystem {
            name,
            variant: variant.into(),
            hamiltonian,
            relation,
        })
    }

    pub fn name(&self) -> SystemName {
        self.name
    }

    pub fn variant(&self) -> &str {
        &self.variant
    }

    pub fn hamiltonian(&self) -> &RationalFunction {
        &self.hamiltonian
    }

    pub fn relation(&self) -> &ParameterRelation {
        &self.relation
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        self.hamiltonian.vars()
    }

    pub fn alpha_count(&self) -> usize {
        self.relation.coeffs().len()
    }

    pub fn qp_degree(&self) -> u32 {
        self.hamiltonian.num().degree_in(&[Q, P])
    }

    pub fn vector_field(&self) -> VectorField {
        let h = &self.hamiltonian;
        VectorField {
            f: self.relation.reduce_rf(&h.derivative(P)),
            g: self.relation.reduce_rf(&-h.derivative(Q)),
        }
    }

    /// Same system with `H` replaced.
    pub fn with_hamiltonian(&self, h: RationalFunction, variant: &str) -> Result<Self> {
        Self::new(self.name, variant, h, self.relation.clone())
    }
}

pub fn system_dir(data: &Path, name: SystemName) -> std::path::PathBuf {
    data.join("systems").join(name.as_str())
}

pub fn load_relation(data: &Path, name: SystemName) -> Result<ParameterRelation> {
    let path = system_dir(data, name).join("relation.txt");
    let rel = ParameterRelation::parse(&read_file(&path)?, &path.display().to_string())?;
    if rel.coeffs().len() != name.alpha_count() {
        return Err(Error::AlphaCountMismatch(rel.coeffs().len(), name.alpha_count()));
    }
    Ok(rel)
}

pub fn load_system(data: &Path, name: SystemName, variant: &str) -> Result<HamiltonianSystem> {
    let path = system_dir(data, name).join(format!("{variant}.poly"));
    let text = read_file(&path)?;
    let vars = VarTable::standard(name.alpha_count());
    let h = parse_rational_function(&text, &vars)?;
    let sys = HamiltonianSystem::new(name, variant, h, load_relation(data, name)?)?;
    if let Some(expected) = name.declared_degree() {
        let actual = sys.qp_degree();
        if actual != expected {
            return Err(Error::DegreeMismatch {
                system: name.to_string(),
                expected,
                actual,
            });
        }
    }
    Ok(sys)
}

/// Name of the transcription variant the checks run on by default.
pub fn accepted_variant(data: &Path, name: SystemName) -> Result<String> {
    let path = system_dir(data, name).join("accepted");
    Ok(read_file(&path)?.trim().to_string())
}

pub fn load_accepted(data: &Path, name: SystemName) -> Result<HamiltonianSystem> {
    load_system(data, name, &accepted_variant(data, name)?)
}

/// Lists the variants shipped for a system.
pub fn variants(data: &Path, name: SystemName) -> Result<Vec<String>> {
    let dir = system_dir(data, name);
    let entries = std::fs::read_dir(&dir).map_err(|source| Error::Io {
        path: dir.clone(),
        source,
    })?;
    let mut out: Vec<String> = entries
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            let p = e.path();
            (p.extension()? == "poly").then(|| p.file_stem().unwrap().to_string_lossy().into_owned())
        })
        .collect();
    out.sort();
    Ok(out)
}

/// `dH/dt` along the flow, reduced modulo the relation.
pub fn first_integral_residual(sys: &HamiltonianSystem) -> RationalFunction {
    let h = sys.hamiltonian();
    let vf = sys.vector_field();
    let total = &(&h.derivative(Q) * &vf.f) + &(&h.derivative(P) * &vf.g);
    let total = &total + &h.derivative(T);
    sys.relation().reduce_rf(&total)
}

pub fn check_first_integral(sys: &HamiltonianSystem) -> CheckReport {
    let started = Instant::now();
    let r = first_integral_residual(sys);
    let residuals = if r.is_zero() {
        vec![]
    } else {
        vec![Residual::new("dH/dt", &r)]
    };
    CheckReport::new(
        CheckKind::FirstIntegral,
        sys.name().as_str(),
        "H",
        Mode::Symbolic,
        residuals,
        started,
    )
}
