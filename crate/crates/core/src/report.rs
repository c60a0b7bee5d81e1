use std::time::Instant;

use serde::Serialize;

use crate::exactpoly::Poly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Holomorphy,
    Symmetry,
    Symplectic,
    Coxeter,
    Automorphism,
    FirstIntegral,
    Lattice,
    Accessible,
    Charts,
    Equivalence,
    Integrate,
    Backlund,
    Inverse,
}

impl CheckKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckKind::Holomorphy => "holomorphy",
            CheckKind::Symmetry => "symmetry",
            CheckKind::Symplectic => "symplectic",
            CheckKind::Coxeter => "coxeter",
            CheckKind::Automorphism => "automorphism",
            CheckKind::FirstIntegral => "first-integral",
            CheckKind::Lattice => "lattice",
            CheckKind::Accessible => "accessible",
            CheckKind::Charts => "charts",
            CheckKind::Equivalence => "equivalence",
            CheckKind::Integrate => "integrate",
            CheckKind::Backlund => "backlund",
            CheckKind::Inverse => "inverse",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
}

/// How an identity is certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Symbolic,
    /// Exact evaluation at `samples` random rational points drawn from a
    /// seeded generator.
    Probabilistic { samples: usize, seed: u64 },
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Symbolic => "symbolic",
            Mode::Probabilistic { .. } => "probabilistic",
        }
    }

    pub fn samples(&self) -> Option<usize> {
        match self {
            Mode::Symbolic => None,
            Mode::Probabilistic { samples, .. } => Some(*samples),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Mode::Symbolic => None,
            Mode::Probabilistic { seed, .. } => Some(*seed),
        }
    }
}

/// One nonvanishing component of a failed identity.
#[derive(Debug, Clone, Serialize)]
pub struct Residual {
    pub component: String,
    pub text: String,
}

impl Residual {
    pub fn new(component: impl Into<String>, value: impl std::fmt::Display) -> Self {
        Residual {
            component: component.into(),
            text: value.to_string(),
        }
    }

    /// The polynomial shown up to `MAX_TERMS` terms, with the total count.
    pub fn from_poly(component: impl Into<String>, p: &Poly) -> Self {
        let text = if p.len() <= MAX_TERMS {
            p.to_string()
        } else {
            let head = Poly::from_terms(p.vars(), p.terms()[..MAX_TERMS].to_vec());
            format!("{head} + … ({} terms)", p.len())
        };
        Residual {
            component: component.into(),
            text,
        }
    }
}

const MAX_TERMS: usize = 12;

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check: CheckKind,
    pub system: String,
    pub target: String,
    pub status: Status,
    pub mode: &'static str,
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub residuals: Vec<Residual>,
    pub elapsed_ms: u128,
}

impl CheckReport {
    pub fn new(
        check: CheckKind,
        system: impl Into<String>,
        target: impl Into<String>,
        mode: Mode,
        residuals: Vec<Residual>,
        started: Instant,
    ) -> Self {
        CheckReport {
            check,
            system: system.into(),
            target: target.into(),
            status: if residuals.is_empty() { Status::Pass } else { Status::Fail },
            mode: mode.name(),
            samples: mode.samples(),
            seed: mode.seed(),
            residuals,
            elapsed_ms: started.elapsed().as_millis(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// First residual, cut to `limit` characters.
    pub fn residual_excerpt(&self, limit: usize) -> Option<String> {
        self.residuals.first().map(|r| {
            let mut s = format!("{}: {}", r.component, r.text);
            if s.chars().count() > limit {
                s = s.chars().take(limit).collect::<String>() + "…";
            }
            s
        })
    }
}
