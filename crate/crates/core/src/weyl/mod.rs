//! Dynkin diagrams and Coxeter relations of the symmetry generators.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::Instant;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactpoly::Rational;
use crate::report::{CheckKind, CheckReport, Mode, Residual};
use crate::sampling::Sampler;
use crate::systems::{ParameterRelation, SystemName};
use crate::transforms::{BirationalMap, Catalog, MapKind, ParamMap};

/// Simply-laced diagram on nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynkinDiagram {
    nodes: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl DynkinDiagram {
    pub fn new(nodes: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        DynkinDiagram {
            nodes,
            edges: edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect(),
        }
    }

    fn from_paths(nodes: usize, paths: &[&[usize]]) -> Self {
        Self::new(
            nodes,
            paths.iter().flat_map(|p| p.windows(2).map(|w| (w[0], w[1]))),
        )
    }

    /// The affine diagrams of types E6, E7 and E8 in the labelling used by the
    /// generator catalogs.
    pub fn builtin(system: SystemName) -> Option<Self> {
        Some(match system {
            SystemName::E6 => Self::from_paths(7, &[&[1, 2, 0, 4, 3], &[0, 5, 6]]),
            SystemName::E7 => Self::from_paths(8, &[&[3, 2, 1, 0, 4, 5, 6], &[0, 7]]),
            SystemName::E8 => Self::from_paths(9, &[&[5, 4, 3, 2, 1, 0, 6, 7], &[0, 8]]),
            SystemName::PviG | SystemName::PviHvi => return None,
        })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    /// Order of `s_i s_j`: 1 on the diagonal, 3 on edges, 2 otherwise.
    pub fn order(&self, i: usize, j: usize) -> usize {
        if i == j {
            1
        } else if self.adjacent(i, j) {
            3
        } else {
            2
        }
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("graph {name} {{\n");
        for i in 0..self.nodes {
            let _ = writeln!(s, "  {i} [label=\"a{i}\"];");
        }
        for (a, b) in &self.edges {
            let _ = writeln!(s, "  {a} -- {b};");
        }
        s.push_str("}\n");
        s
    }
}

/// A generator's action on the parameters.
#[derive(Debug, Clone)]
pub struct ParameterAction {
    pub name: String,
    pub map: ParamMap,
}

impl ParameterAction {
    pub fn from_catalog(catalog: &Catalog) -> Vec<ParameterAction> {
        catalog
            .of_kind(MapKind::Generator)
            .into_iter()
            .map(|m| ParameterAction {
                name: m.name.clone(),
                map: m.params.clone(),
            })
            .collect()
    }
}

fn unit(n: usize, i: usize) -> Vec<Rational> {
    (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()
}

fn is_row(map: &ParamMap, j: usize, expected: &[Rational]) -> bool {
    map.offset[j].is_zero() && map.matrix[j] == expected
}

/// Reads the diagram off the actions: `{i, j}` is an edge iff
/// `s_i(α_j) = α_j + α_i`.
pub fn infer_diagram(actions: &[ParameterAction]) -> Result<DynkinDiagram> {
    let n = actions.len();
    for (i, a) in actions.iter().enumerate() {
        if a.map.len() != n {
            return Err(Error::AlphaCountMismatch(a.map.len(), n));
        }
        if !a.map.compose(&a.map).is_identity() {
            return Err(Error::NotInvolution(a.name.clone()));
        }
        let neg: Vec<Rational> = unit(n, i).into_iter().map(|x| -x).collect();
        if !is_row(&a.map, i, &neg) {
            return Err(Error::NotReflection(a.name.clone()));
        }
    }
    let raised = |i: usize, j: usize| {
        let mut row = unit(n, j);
        row[i] += Rational::one();
        is_row(&actions[i].map, j, &row)
    };
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            match (raised(i, j), raised(j, i)) {
                (true, true) => edges.push((i, j)),
                (false, false) => {}
                _ => return Err(Error::InconsistentAdjacency(i, j)),
            }
        }
    }
    Ok(DynkinDiagram::new(n, edges))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Param,
    Birational,
}

impl Level {
    pub fn as_str(&self) -> &'static str {
        match self {
            Level::Param => "PARAM",
            Level::Birational => "BIRATIONAL",
        }
    }
}

/// Which pairs `(i, j)`, `i < j`, the birational check enumerates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairs {
    All,
    Adjacent,
}

fn words(diagram: &DynkinDiagram, pairs: Pairs) -> Vec<(usize, usize, usize)> {
    let n = diagram.nodes();
    let mut out: Vec<(usize, usize, usize)> = (0..n).map(|i| (i, i, 2)).collect();
    for i in 0..n {
        for j in i + 1..n {
            if pairs == Pairs::All || diagram.adjacent(i, j) {
                out.push((i, j, diagram.order(i, j)));
            }
        }
    }
    out
}

fn word_label(names: &[&str], i: usize, j: usize, m: usize) -> String {
    if i == j {
        format!("{}^2", names[i])
    } else {
        format!("({} {})^{m}", names[i], names[j])
    }
}

fn param_word(actions: &[ParameterAction], i: usize, j: usize, m: usize) -> ParamMap {
    let step = if i == j {
        actions[i].map.clone()
    } else {
        actions[i].map.compose(&actions[j].map)
    };
    let mut acc = ParamMap::identity(step.len());
    for _ in 0..(if i == j { 2 } else { m }) {
        acc = acc.compose(&step);
    }
    acc
}

fn precondition(diagram: &DynkinDiagram, count: usize) -> Option<Residual> {
    (diagram.nodes() != count).then(|| {
        Residual::new(
            "precondition",
            format!("diagram has {} nodes, {count} generators given", diagram.nodes()),
        )
    })
}

/// `s_i² = 1`, `(s_i s_j)^{m_ij} = 1` on the parameters, exactly.
pub fn check_coxeter_param(
    system: &str,
    actions: &[ParameterAction],
    diagram: &DynkinDiagram,
) -> CheckReport {
    let started = Instant::now();
    let names: Vec<&str> = actions.iter().map(|a| a.name.as_str()).collect();
    let residuals = match precondition(diagram, actions.len()) {
        Some(r) => vec![r],
        None => words(diagram, Pairs::All)
            .into_iter()
            .filter(|&(i, j, m)| !param_word(actions, i, j, m).is_identity())
            .map(|(i, j, m)| Residual::new(word_label(&names, i, j, m), "not the identity on parameters"))
            .collect(),
    };
    CheckReport::new(CheckKind::Coxeter, system, Level::Param.as_str(), Mode::Symbolic, residuals, started)
}

fn birational_word(gens: &[&BirationalMap], i: usize, j: usize, m: usize) -> Result<BirationalMap> {
    let step = if i == j {
        gens[i].clone()
    } else {
        gens[i].compose(gens[j])?
    };
    let mut acc = step.clone();
    for _ in 1..(if i == j { 2 } else { m }) {
        acc = acc.compose(&step)?;
    }
    Ok(acc)
}

/// Applies the word to random points and compares with the start.
fn word_fixes_points(
    gens: &[&BirationalMap],
    word: &[usize],
    relation: &ParameterRelation,
    samples: usize,
    seed: u64,
) -> Result<bool> {
    let mut sampler = Sampler::new(seed);
    let mut done = 0;
    let mut attempts = 0;
    while done < samples {
        attempts += 1;
        if attempts > 20 * samples {
            return Err(Error::Precondition("too many sample points at poles".into()));
        }
        let start_a = sampler.alphas(relation);
        let start = [sampler.integer(), sampler.integer(), sampler.integer()];
        let mut pt = start.clone();
        let mut a = start_a.clone();
        let mut pole = false;
        for &k in word.iter().rev() {
            match gens[k].apply_point([&pt[0], &pt[1], &pt[2]], &a) {
                Ok((next, b)) => {
                    pt = next;
                    a = b;
                }
                Err(Error::Pole) => {
                    pole = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if pole {
            continue;
        }
        if pt != start || a != start_a {
            return Ok(false);
        }
        done += 1;
    }
    Ok(true)
}

/// Coxeter relations for the coordinate maps, by symbolic composition or
/// by evaluation of the words at random points.
pub fn check_coxeter_birational(
    system: &str,
    gens: &[&BirationalMap],
    diagram: &DynkinDiagram,
    pairs: Pairs,
    mode: Mode,
) -> CheckReport {
    let started = Instant::now();
    let names: Vec<&str> = gens.iter().map(|g| g.name.as_str()).collect();
    let residuals = match precondition(diagram, gens.len()) {
        Some(r) => vec![r],
        None => {
            let mut out = Vec::new();
            for (i, j, m) in words(diagram, pairs) {
                let label = word_label(&names, i, j, m);
                let verdict = match mode {
                    Mode::Symbolic => birational_word(gens, i, j, m).map(|w| w.is_identity()),
                    Mode::Probabilistic { samples, seed } => {
                        let word: Vec<usize> = if i == j {
                            vec![i, i]
                        } else {
                            (0..m).flat_map(|_| [i, j]).collect()
                        };
                        word_fixes_points(gens, &word, &gens[0].relation, samples, seed)
                    }
                };
                match verdict {
                    Ok(true) => {}
                    Ok(false) => out.push(Residual::new(label, "not the identity")),
                    Err(e) => out.push(Residual::new(label, e)),
                }
            }
            out
        }
    };
    CheckReport::new(CheckKind::Coxeter, system, Level::Birational.as_str(), mode, residuals, started)
}

/// `s_i² = 1` only, for generator sets without an asserted diagram.
pub fn check_involutions(system: &str, actions: &[ParameterAction]) -> CheckReport {
    let started = Instant::now();
    let residuals = actions
        .iter()
        .filter(|a| !a.map.compose(&a.map).is_identity())
        .map(|a| Residual::new(format!("{}^2", a.name), "not the identity on parameters"))
        .collect();
    CheckReport::new(CheckKind::Coxeter, system, "involutions", Mode::Symbolic, residuals, started)
}

/// `σ` with `π(α)_i = α_{σ(i)}`; the automorphism must map edges to edges and
/// satisfy `π s_i π⁻¹ = s_{σ⁻¹(i)}` on the parameters.
pub fn check_automorphism(
    system: &str,
    pi: &BirationalMap,
    actions: &[ParameterAction],
    diagram: &DynkinDiagram,
) -> Result<CheckReport> {
    let started = Instant::now();
    let sigma = pi
        .params
        .as_permutation()
        .ok_or_else(|| Error::NotAPermutation(pi.name.clone()))?;
    let mut residuals = Vec::new();
    if let Some(r) = precondition(diagram, actions.len()) {
        residuals.push(r);
    } else if sigma.len() != diagram.nodes() {
        residuals.push(Residual::new("precondition", "permutation size differs from the diagram"));
    } else {
        let mut inv = vec![0; sigma.len()];
        for (i, &s) in sigma.iter().enumerate() {
            inv[s] = i;
        }
        for &(a, b) in diagram.edges() {
            if !diagram.adjacent(sigma[a], sigma[b]) {
                residuals.push(Residual::new(
                    format!("edge {a}-{b}"),
                    format!("image {}-{} is not an edge", sigma[a], sigma[b]),
                ));
            }
        }
        let p = &pi.params;
        let p_inv = p.inverse()?;
        for (i, a) in actions.iter().enumerate() {
            let conj = p.compose(&a.map).compose(&p_inv);
            if conj != actions[inv[i]].map {
                residuals.push(Residual::new(
                    format!("{} {} {}^-1", pi.name, a.name, pi.name),
                    format!("differs from {}", actions[inv[i]].name),
                ));
            }
        }
    }
    Ok(CheckReport::new(
        CheckKind::Automorphism,
        system,
        &pi.name,
        Mode::Symbolic,
        residuals,
        started,
    ))
}

/// `σ` written in cycle notation, fixed points omitted.
pub fn cycles(sigma: &[usize]) -> String {
    let mut seen = vec![false; sigma.len()];
    let mut out = String::new();
    for start in 0..sigma.len() {
        if seen[start] || sigma[start] == start {
            continue;
        }
        let mut cycle = Vec::new();
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            cycle.push(k.to_string());
            k = sigma[k];
        }
        let _ = write!(out, "({})", cycle.join(" "));
    }
    if out.is_empty() {
        out.push_str("()");
    }
    out
}
