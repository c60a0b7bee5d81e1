use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::report::{CheckKind, CheckReport, Mode, Residual};

/// Integer class over the basis `(D; E_1, …, E_k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorClass(Vec<i64>);

impl DivisorClass {
    pub fn zero(dim: usize) -> Self {
        DivisorClass(vec![0; dim])
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = vec![0; dim];
        v[i] = 1;
        DivisorClass(v)
    }

    pub fn from_coeffs(coeffs: Vec<i64>) -> Self {
        DivisorClass(coeffs)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    fn padded(&self, dim: usize) -> Self {
        let mut v = self.0.clone();
        v.resize(dim, 0);
        DivisorClass(v)
    }

    /// `D·D = 2`, `E_i·E_i = −1`, mixed products zero.
    pub fn dot(&self, o: &DivisorClass) -> i64 {
        let n = self.dim().max(o.dim());
        (0..n)
            .map(|i| {
                let a = self.0.get(i).copied().unwrap_or(0);
                let b = o.0.get(i).copied().unwrap_or(0);
                let w = if i == 0 { 2 } else { -1 };
                w * a * b
            })
            .sum()
    }

    pub fn square(&self) -> i64 {
        self.dot(self)
    }

    pub fn add_scaled(&self, o: &DivisorClass, k: i64) -> DivisorClass {
        let n = self.dim().max(o.dim());
        let a = self.padded(n);
        let b = o.padded(n);
        DivisorClass(a.0.iter().zip(&b.0).map(|(x, y)| x + k * y).collect())
    }

    /// Equality after zero-padding to a common dimension.
    pub fn same_class(&self, o: &DivisorClass) -> bool {
        let n = self.dim().max(o.dim());
        self.padded(n) == o.padded(n)
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let name = if i == 0 { "D".to_string() } else { format!("E{i}") };
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            if mag == 1 {
                write!(f, "{sign}{name}")?;
            } else {
                write!(f, "{sign}{mag}{name}")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Named curves and the canonical class on a surface obtained from the
/// Hirzebruch surface by point blow-ups and contractions.
#[derive(Debug, Clone)]
pub struct SurfaceState {
    dim: usize,
    curves: BTreeMap<String, DivisorClass>,
    order: Vec<String>,
    canonical: DivisorClass,
    contracted: Vec<(String, DivisorClass)>,
}

impl SurfaceState {
    /// `Σ₂` with its section `D` of square 2 and `K = −2D`.
    pub fn hirzebruch(section: &str) -> Self {
        let mut curves = BTreeMap::new();
        curves.insert(section.to_string(), DivisorClass::basis(1, 0));
        SurfaceState {
            dim: 1,
            curves,
            order: vec![section.to_string()],
            canonical: DivisorClass::from_coeffs(vec![-2]),
            contracted: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn canonical(&self) -> &DivisorClass {
        &self.canonical
    }

    pub fn contracted(&self) -> &[(String, DivisorClass)] {
        &self.contracted
    }

    /// Live curve names in creation order.
    pub fn names(&self) -> Vec<&str> {
        self.order
            .iter()
            .filter(|n| self.curves.contains_key(*n))
            .map(String::as_str)
            .collect()
    }

    pub fn class(&self, name: &str) -> Result<&DivisorClass> {
        self.curves
            .get(name)
            .ok_or_else(|| Error::UnknownCurve(name.to_string()))
    }

    pub fn self_intersection(&self, name: &str) -> Result<i64> {
        Ok(self.class(name)?.square())
    }

    pub fn intersection(&self, a: &str, b: &str) -> Result<i64> {
        Ok(self.class(a)?.dot(self.class(b)?))
    }

    /// Blows up a point lying simply on each curve of `through`. Returns the
    /// name of the new exceptional curve.
    pub fn blow_up(&mut self, through: &[&str], name: Option<&str>) -> Result<String> {
        for c in through {
            self.class(c)?;
        }
        let e_index = self.dim;
        self.dim += 1;
        let e = DivisorClass::basis(self.dim, e_index);
        for c in through {
            let cls = self.curves.get_mut(*c).expect("checked above");
            *cls = cls.add_scaled(&e, -1);
        }
        self.canonical = self.canonical.add_scaled(&e, 1);
        let name = name.map(str::to_string).unwrap_or_else(|| format!("E{e_index}"));
        if self.curves.contains_key(&name) {
            return Err(Error::Precondition(format!("curve {name} already exists")));
        }
        self.curves.insert(name.clone(), e);
        self.order.push(name.clone());
        Ok(name)
    }

    /// Contracts a `(−1)`-curve `C`, pushing classes forward by `x ↦ x + (x·C)C`.
    pub fn blow_down(&mut self, name: &str) -> Result<()> {
        let c = self.class(name)?.clone();
        let square = c.square();
        if square != -1 {
            return Err(Error::NotContractible {
                name: name.to_string(),
                square,
            });
        }
        let push = |x: &DivisorClass| x.add_scaled(&c, x.dot(&c));
        self.curves.remove(name);
        for cls in self.curves.values_mut() {
            *cls = push(cls);
        }
        self.canonical = push(&self.canonical);
        self.contracted.push((name.to_string(), c));
        Ok(())
    }

    /// Class of a formal sum such as `-D0-D1-Dinf` or `-2D`.
    pub fn class_of_sum(&self, sum: &str) -> Result<DivisorClass> {
        let mut out = DivisorClass::zero(self.dim);
        for (k, name) in parse_signed_sum(sum)? {
            out = out.add_scaled(self.class(&name)?, k);
        }
        Ok(out)
    }
}

fn parse_signed_sum(sum: &str) -> Result<Vec<(i64, String)>> {
    let bad = || Error::Syntax {
        offset: 0,
        message: format!("bad divisor sum `{sum}`"),
    };
    let s: String = sum.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out = Vec::new();
    let mut rest = s.as_str();
    while !rest.is_empty() {
        let (sign, r) = match rest.as_bytes()[0] {
            b'-' => (-1, &rest[1..]),
            b'+' => (1, &rest[1..]),
            _ if out.is_empty() => (1, rest),
            _ => return Err(bad()),
        };
        let digits = r.chars().take_while(|c| c.is_ascii_digit()).count();
        let k: i64 = if digits == 0 { 1 } else { r[..digits].parse().map_err(|_| bad())? };
        let r = &r[digits..];
        let len = r.find(['+', '-']).unwrap_or(r.len());
        if len == 0 {
            return Err(bad());
        }
        out.push((sign * k, r[..len].to_string()));
        rest = &r[len..];
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

/// PASS iff `K` equals the class of `expected`.
pub fn canonical_check(system: &str, state: &SurfaceState, expected: &str) -> CheckReport {
    let started = Instant::now();
    let residuals = match state.class_of_sum(expected) {
        Ok(cls) if cls.same_class(state.canonical()) => Vec::new(),
        Ok(cls) => vec![Residual::new(
            format!("K - ({expected})"),
            state.canonical().add_scaled(&cls, -1),
        )],
        Err(e) => vec![Residual::new("error", e)],
    };
    CheckReport::new(
        CheckKind::Lattice,
        system,
        format!("K = {expected}"),
        Mode::Symbolic,
        residuals,
        started,
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Directive {
    BlowUp { through: Vec<String>, name: Option<String> },
    BlowDown(String),
    ExpectSquare(String, i64),
    ExpectMeet(String, String, i64),
    ExpectK(String),
    ExpectKSquare(i64),
}

/// A blow-up/blow-down script with its expectations.
#[derive(Debug, Clone)]
pub struct Sequence {
    pub directives: Vec<(usize, Directive)>,
}

impl Sequence {
    /// One directive per line:
    /// `blowup a,b [as name]`, `blowdown c`, `expect c sq n`,
    /// `expect a . b n`, `expectK <sum>`, `expectK sq n`.
    pub fn parse(text: &str, origin: &str) -> Result<Sequence> {
        let mut directives = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |m: &str| Error::Malformed {
                path: origin.to_string(),
                line: i + 1,
                message: m.to_string(),
            };
            let int = |s: &str| s.parse::<i64>().map_err(|_| bad("expected an integer"));
            let words: Vec<&str> = line.split_whitespace().collect();
            let d = match words.as_slice() {
                ["blowup"] => Directive::BlowUp { through: Vec::new(), name: None },
                ["blowup", "as", n] => Directive::BlowUp {
                    through: Vec::new(),
                    name: Some(n.to_string()),
                },
                ["blowup", list] => Directive::BlowUp { through: split_list(list), name: None },
                ["blowup", list, "as", n] => Directive::BlowUp {
                    through: split_list(list),
                    name: Some(n.to_string()),
                },
                ["blowdown", c] => Directive::BlowDown(c.to_string()),
                ["expect", c, "sq", n] => Directive::ExpectSquare(c.to_string(), int(n)?),
                ["expect", a, ".", b, n] => Directive::ExpectMeet(a.to_string(), b.to_string(), int(n)?),
                ["expectK", "sq", n] => Directive::ExpectKSquare(int(n)?),
                ["expectK", rest @ ..] if !rest.is_empty() => Directive::ExpectK(rest.concat()),
                _ => return Err(bad("unrecognised directive")),
            };
            directives.push((i + 1, d));
        }
        Ok(Sequence { directives })
    }

    /// Runs the script from `Σ₂` (section named `section`), one report per
    /// expectation. Errors in blow-up/blow-down steps abort the run.
    pub fn run(&self, system: &str, section: &str) -> Result<(SurfaceState, Vec<CheckReport>)> {
        let mut st = SurfaceState::hirzebruch(section);
        let mut reports = Vec::new();
        for (line, d) in &self.directives {
            let started = Instant::now();
            let report = |target: String, want: i64, got: Result<i64>| {
                let residuals = match got {
                    Ok(v) if v == want => Vec::new(),
                    Ok(v) => vec![Residual::new(format!("line {line}"), format!("found {v}, expected {want}"))],
                    Err(e) => vec![Residual::new("error", e)],
                };
                CheckReport::new(CheckKind::Lattice, system, target, Mode::Symbolic, residuals, started)
            };
            match d {
                Directive::BlowUp { through, name } => {
                    let t: Vec<&str> = through.iter().map(String::as_str).collect();
                    st.blow_up(&t, name.as_deref())?;
                }
                Directive::BlowDown(c) => st.blow_down(c)?,
                Directive::ExpectSquare(c, n) => {
                    reports.push(report(format!("({c})^2 = {n}"), *n, st.self_intersection(c)));
                }
                Directive::ExpectMeet(a, b, n) => {
                    reports.push(report(format!("({a}, {b}) = {n}"), *n, st.intersection(a, b)));
                }
                Directive::ExpectKSquare(n) => {
                    reports.push(report(format!("K^2 = {n}"), *n, Ok(st.canonical().square())));
                }
                Directive::ExpectK(sum) => reports.push(canonical_check(system, &st, sum)),
            }
        }
        Ok((st, reports))
    }
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',').filter(|x| !x.is_empty()).map(str::to_string).collect()
}
