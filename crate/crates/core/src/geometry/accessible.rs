use std::path::Path;
use std::time::Instant;

use num_traits::{One, Zero};

use crate::error::{read_file, Error, Result};
use crate::exactpoly::{alpha, parse_poly, Poly, Rational, RationalFunction, P, Q, T};
use crate::report::{CheckKind, CheckReport, Mode, Residual};
use crate::sampling::Sampler;
use crate::systems::{HamiltonianSystem, SystemName};
use crate::transforms::{pullback_field, BirationalMap, Catalog};

/// Boundary charts of `Σ₂` and of the first exceptional curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryChart {
    Z2,
    Z3,
    U0,
    U1,
    UInf,
}

impl BoundaryChart {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "z2" => BoundaryChart::Z2,
            "z3" => BoundaryChart::Z3,
            "u0" => BoundaryChart::U0,
            "u1" => BoundaryChart::U1,
            "uinf" => BoundaryChart::UInf,
            _ => return None,
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            BoundaryChart::Z2 => "z2",
            BoundaryChart::Z3 => "z3",
            BoundaryChart::U0 => "u0",
            BoundaryChart::U1 => "u1",
            BoundaryChart::UInf => "uinf",
        }
    }

    pub fn level(&self) -> u8 {
        match self {
            BoundaryChart::Z2 | BoundaryChart::Z3 => 0,
            _ => 1,
        }
    }

    /// `(z, w)` or `(u, v)` as functions of `(q, p)`, and `(q, p)` back as
    /// functions of the chart coordinates (which reuse the `q, p` slots).
    fn formulas(&self, sys: &HamiltonianSystem) -> [RationalFunction; 4] {
        let vars = sys.vars();
        let q = RationalFunction::var(vars, Q);
        let p = RationalFunction::var(vars, P);
        let a0 = RationalFunction::var(vars, alpha(0));
        let one = RationalFunction::one(vars);
        let inv = |x: &RationalFunction| one.checked_div(x).expect("nonzero");
        let qp_a0 = &(&q * &p) + &a0;
        match self {
            BoundaryChart::Z2 => [q.clone(), inv(&p), q.clone(), inv(&p)],
            BoundaryChart::Z3 => {
                let w1 = -&(&qp_a0 * &q);
                let z = &q;
                let back_p = &(-&(&(z * z) * &inv(&p))) - &(&a0 * z);
                [inv(&q), inv(&w1), inv(&q), back_p]
            }
            BoundaryChart::U0 | BoundaryChart::U1 => {
                let nu = if *self == BoundaryChart::U0 { 0 } else { 1 };
                let nu = RationalFunction::from(Poly::int(vars, nu));
                let u = &(&q - &nu) * &p;
                [u, inv(&p), &nu + &(&q * &p), inv(&p)]
            }
            BoundaryChart::UInf => {
                let u = -&qp_a0;
                let w3 = inv(&-&(&qp_a0 * &q));
                let uv = &q * &p;
                let back_p = &(-&(&(&q * &q) * &p)) - &(&a0 * &uv);
                [u, w3, inv(&uv), back_p]
            }
        }
    }

    pub fn map(&self, sys: &HamiltonianSystem) -> BirationalMap {
        let [fq, fp, bq, bp] = self.formulas(sys);
        let mut inverse = BirationalMap::identity(sys.vars(), sys.relation());
        inverse.name = format!("{}^-1", self.as_str());
        inverse.q = bq;
        inverse.p = bp;
        let mut m = BirationalMap::identity(sys.vars(), sys.relation());
        m.name = self.as_str().to_string();
        m.q = fq;
        m.p = fp;
        m.inverse = Some(Box::new(inverse));
        m
    }
}

/// A listed boundary point: coordinate `location` on `{second = 0}` of `chart`.
#[derive(Debug, Clone)]
pub struct AccessiblePoint {
    pub chart: BoundaryChart,
    pub location: Poly,
}

/// Listed points of one system, in file order.
#[derive(Debug, Clone)]
pub struct PointList {
    pub points: Vec<AccessiblePoint>,
}

impl PointList {
    /// Lines `point <chart> <location>`, the location a polynomial in `a0, a1, …`.
    pub fn parse(text: &str, origin: &str, sys: &HamiltonianSystem) -> Result<PointList> {
        let mut points = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |m: String| Error::Malformed {
                path: origin.to_string(),
                line: i + 1,
                message: m,
            };
            let mut it = line.splitn(3, char::is_whitespace);
            let (Some("point"), Some(chart), Some(loc)) = (it.next(), it.next(), it.next()) else {
                return Err(bad("expected `point <chart> <location>`".into()));
            };
            let chart = BoundaryChart::parse(chart).ok_or_else(|| bad(format!("unknown chart {chart}")))?;
            let location = parse_poly(loc.trim(), sys.vars()).map_err(|e| bad(e.to_string()))?;
            if location.uses_var(Q) || location.uses_var(P) || location.uses_var(T) {
                return Err(bad("location must depend on parameters only".into()));
            }
            points.push(AccessiblePoint { chart, location });
        }
        Ok(PointList { points })
    }

    pub fn load(data: &Path, sys: &HamiltonianSystem) -> Result<PointList> {
        let path = data.join("geometry").join(format!("{}.points", sys.name().as_str()));
        PointList::parse(&read_file(&path)?, &path.display().to_string(), sys)
    }

    pub fn at_level(&self, level: u8) -> Vec<&AccessiblePoint> {
        self.points.iter().filter(|p| p.chart.level() == level).collect()
    }
}

fn p_order(d: &Poly) -> u16 {
    d.terms().iter().map(|(m, _)| m.get(P)).min().unwrap_or(0)
}

fn strip_p(d: &Poly, k: u16) -> Poly {
    let terms: Vec<_> = d
        .terms()
        .iter()
        .map(|(m, c)| {
            let mut m = *m;
            m.set(P, m.get(P) - k);
            (m, c.clone())
        })
        .collect();
    Poly::from_terms(d.vars(), terms)
}

/// Numerators of the chart field after multiplying by the least power of
/// the boundary coordinate that makes both components regular along it.
pub fn cleared_numerators(sys: &HamiltonianSystem, chart: BoundaryChart) -> Result<[Poly; 2]> {
    let (f1, f2) = pullback_field(sys, &chart.map(sys))?;
    let a1 = p_order(f1.den());
    let a2 = p_order(f2.den());
    let r1 = strip_p(f1.den(), a1);
    let r2 = strip_p(f2.den(), a2);
    let m = a1.max(a2);
    let pw = |k: u16| Poly::var(sys.vars(), P).pow(k as u32);
    let c1 = f1.num().checked_mul(&pw(m - a1))?.checked_mul(&r2)?;
    let c2 = f2.num().checked_mul(&pw(m - a2))?.checked_mul(&r1)?;
    let common = p_order(&c1).min(p_order(&c2));
    Ok([strip_p(&c1, common), strip_p(&c2, common)])
}

/// Dense univariate polynomial over ℚ, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
struct Univariate(Vec<Rational>);

impl Univariate {
    fn trimmed(mut c: Vec<Rational>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        Univariate(c)
    }

    /// `p` must use only variable `var`.
    fn from_poly(p: &Poly, var: usize) -> Self {
        let mut c = vec![Rational::zero(); p.var_degree(var) as usize + 1];
        for (m, k) in p.terms() {
            c[m.get(var) as usize] += k;
        }
        Self::trimmed(c)
    }

    fn from_roots(roots: &[Rational]) -> Self {
        let mut c = vec![Rational::one()];
        for r in roots {
            let mut next = vec![Rational::zero(); c.len() + 1];
            for (i, x) in c.iter().enumerate() {
                next[i + 1] += x;
                next[i] -= x * r;
            }
            c = next;
        }
        Self::trimmed(c)
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn monic(&self) -> Self {
        match self.0.last() {
            Some(l) => Univariate(self.0.iter().map(|c| c / l).collect()),
            None => self.clone(),
        }
    }

    fn div_rem(&self, g: &Univariate) -> (Univariate, Univariate) {
        let mut r = self.0.clone();
        let lg = g.0.last().expect("nonzero divisor");
        let mut q = vec![Rational::zero(); self.0.len().saturating_sub(g.degree()).max(1)];
        while r.len() >= g.0.len() && !r.is_empty() {
            let shift = r.len() - g.0.len();
            let k = r.last().expect("nonempty") / lg;
            for (i, c) in g.0.iter().enumerate() {
                r[shift + i] -= &k * c;
            }
            q[shift] = k;
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        (Self::trimmed(q), Self::trimmed(r))
    }

    fn gcd(a: &Univariate, b: &Univariate) -> Univariate {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    fn derivative(&self) -> Self {
        Self::trimmed(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer((i as i64).into()))
                .collect(),
        )
    }

    fn squarefree(&self) -> Self {
        if self.degree() == 0 {
            return self.monic();
        }
        self.div_rem(&Univariate::gcd(self, &self.derivative())).0.monic()
    }
}

const ROOT_SAMPLES: usize = 5;
const ROOT_SEED: u64 = 0x5eed;

fn boundary(p: &Poly) -> Poly {
    p.specialize(&[(P, Rational::zero())])
}

/// Where the listed points of `other` sit in `chart`, when both cover `D`.
fn expected_locations(
    chart: BoundaryChart,
    points: &[&AccessiblePoint],
    values: &[(usize, Rational)],
) -> Vec<Rational> {
    let mut out: Vec<Rational> = Vec::new();
    for pt in points {
        let v = pt.location.specialize(values).constant_value().unwrap_or_default();
        let loc = if pt.chart == chart {
            Some(v)
        } else if matches!(
            (pt.chart, chart),
            (BoundaryChart::Z2, BoundaryChart::Z3) | (BoundaryChart::Z3, BoundaryChart::Z2)
        ) {
            (!v.is_zero()).then(|| v.recip())
        } else {
            None
        };
        if let Some(l) = loc {
            if !out.contains(&l) {
                out.push(l);
            }
        }
    }
    out
}

fn level_charts(level: u8) -> &'static [BoundaryChart] {
    if level == 0 {
        &[BoundaryChart::Z2, BoundaryChart::Z3]
    } else {
        &[BoundaryChart::U0, BoundaryChart::U1, BoundaryChart::UInf]
    }
}

fn chart_residuals(
    sys: &HamiltonianSystem,
    chart: BoundaryChart,
    points: &[&AccessiblePoint],
) -> Result<Vec<Residual>> {
    let [c1, c2] = cleared_numerators(sys, chart)?;
    let (b1, b2) = (boundary(&c1), boundary(&c2));
    let rel = sys.relation();
    let mut out = Vec::new();
    for pt in points.iter().filter(|p| p.chart == chart) {
        for (label, b) in [("first", &b1), ("second", &b2)] {
            let at = rel.reduce(&b.compose_var(Q, &pt.location));
            if !at.is_zero() {
                out.push(Residual::from_poly(
                    format!("{} = {}: {label} numerator", chart.as_str(), pt.location),
                    &at,
                ));
            }
        }
    }
    let mut sampler = Sampler::new(ROOT_SEED ^ chart as u64);
    for _ in 0..ROOT_SAMPLES {
        let alphas = sampler.alphas(rel);
        let mut values: Vec<(usize, Rational)> =
            alphas.iter().enumerate().map(|(i, a)| (alpha(i), a.clone())).collect();
        values.push((T, sampler.fraction()));
        let u1 = Univariate::from_poly(&b1.specialize(&values), Q);
        let u2 = Univariate::from_poly(&b2.specialize(&values), Q);
        let g = Univariate::gcd(&u1, &u2);
        let want = Univariate::from_roots(&expected_locations(chart, points, &values));
        if g.is_zero() {
            out.push(Residual::new(chart.as_str(), "field tangent to the whole boundary"));
        } else if g.squarefree() != want {
            let shown: Vec<String> = alphas.iter().map(ToString::to_string).collect();
            out.push(Residual::new(
                format!("{} common roots at a = ({})", chart.as_str(), shown.join(", ")),
                format!("gcd degree {} (squarefree {}), expected {}", g.degree(), g.squarefree().degree(), want.degree()),
            ));
        }
    }
    Ok(out)
}

/// PASS iff the listed points of `level` are common zeros of the cleared
/// boundary numerators and, at random parameters, the only ones.
pub fn verify_accessible_points(sys: &HamiltonianSystem, points: &PointList, level: u8) -> CheckReport {
    let started = Instant::now();
    let listed = points.at_level(level);
    let mut residuals = Vec::new();
    for &chart in level_charts(level) {
        match chart_residuals(sys, chart, &listed) {
            Ok(r) => residuals.extend(r),
            Err(e) => residuals.push(Residual::new(chart.as_str(), e)),
        }
    }
    if listed.is_empty() {
        residuals.push(Residual::new("points", "no points listed"));
    }
    CheckReport::new(
        CheckKind::Accessible,
        sys.name().as_str(),
        format!("level {level} ({} points)", listed.len()),
        Mode::Symbolic,
        residuals,
        started,
    )
}

/// `(−W, V)` for `W = (u − c)/v, V = v`, in the original `(q, p)`.
pub fn chart_chain(sys: &HamiltonianSystem, point: &AccessiblePoint) -> Result<[RationalFunction; 2]> {
    if point.chart.level() != 1 {
        return Err(Error::Precondition(format!(
            "chart chains start on an exceptional curve, not {}",
            point.chart.as_str()
        )));
    }
    let [u, v, _, _] = point.chart.formulas(sys);
    let c = RationalFunction::from(point.location.clone());
    let w = (&u - &c).checked_div(&v)?;
    Ok([-&w, v])
}

/// PASS iff the chain through `point` equals the chart map.
pub fn check_chain(sys: &HamiltonianSystem, point: &AccessiblePoint, chart: &BirationalMap) -> CheckReport {
    let started = Instant::now();
    let rel = sys.relation();
    let residuals = match chart_chain(sys, point) {
        Ok([x, y]) => {
            let mut out = Vec::new();
            for (label, mine, theirs) in [("x", &x, &chart.q), ("y", &y, &chart.p)] {
                let d = rel.reduce_rf(&(mine - theirs));
                if !d.is_zero() {
                    out.push(Residual::from_poly(format!("{label} numerator"), d.num()));
                }
            }
            out
        }
        Err(e) => vec![Residual::new("error", e)],
    };
    CheckReport::new(
        CheckKind::Charts,
        sys.name().as_str(),
        format!("{} via {} = {}", chart.name, point.chart.as_str(), point.location),
        Mode::Symbolic,
        residuals,
        started,
    )
}

/// Checks `(−W_j, V_j) = (x_j, y_j)` for the `j`-th level-1 point (from 1).
pub fn verify_chart_composition(
    sys: &HamiltonianSystem,
    points: &PointList,
    catalog: &Catalog,
    j: usize,
) -> Result<CheckReport> {
    let level1 = points.at_level(1);
    let point = j
        .checked_sub(1)
        .and_then(|i| level1.get(i))
        .ok_or_else(|| Error::UnknownMap(format!("r{j}")))?;
    let chart = catalog.get(&format!("r{j}"))?;
    Ok(check_chain(sys, point, chart))
}

/// Level-1 point count, i.e. the number of `W_j` charts.
pub fn chain_count(points: &PointList) -> usize {
    points.at_level(1).len()
}

pub fn points_path(data: &Path, name: SystemName) -> std::path::PathBuf {
    data.join("geometry").join(format!("{}.points", name.as_str()))
}
