use std::time::Instant;

use num_traits::Zero;
use rayon::prelude::*;

use super::BirationalMap;
use crate::error::{Error, Result};
use crate::exactpoly::{alpha, Poly, Rational, RationalFunction, P, Q, T};
use crate::report::{CheckKind, CheckReport, Mode, Residual};
use crate::sampling::Sampler;
use crate::systems::{clear_denominators, Constraint, HamiltonianSystem, VectorField};

/// Rounds of resampling for points that hit a pole.
const POLE_RETRIES: usize = 20;

/// `dX/dt = X_q f + X_p g + X_t` along the field.
fn along(x: &RationalFunction, vf: &VectorField) -> RationalFunction {
    let lhs = &(&x.derivative(Q) * &vf.f) + &(&x.derivative(P) * &vf.g);
    &lhs + &x.derivative(T)
}

/// The field of `sys` in the coordinates of `map`, written in those
/// coordinates (which reuse the `q, p, t` slots).
pub fn pullback_field(
    sys: &HamiltonianSystem,
    map: &BirationalMap,
) -> Result<(RationalFunction, RationalFunction)> {
    let inv = map.inverse()?;
    let vf = sys.vector_field();
    let vars = sys.vars();
    let dt = map.time.derivative_rf(vars);
    let push = |x: &RationalFunction| -> Result<RationalFunction> {
        let dx = sys.relation().reduce_rf(&along(x, &vf));
        inv.pull(&dx.checked_div(&dt)?)
    };
    Ok((push(&map.q)?, push(&map.p)?))
}

fn tau_power(sys: &HamiltonianSystem) -> Option<Poly> {
    sys.name().is_pvi().then(|| {
        let t = Poly::var(sys.vars(), T);
        let tt = &t * &(&t - &Poly::one(sys.vars()));
        tt.pow(3)
    })
}

/// `None` when the component is polynomial in the chart coordinates.
fn chart_remainder(r: &RationalFunction, tau: Option<&Poly>) -> Result<Option<Poly>> {
    if !r.den().uses_var(Q) && !r.den().uses_var(P) {
        return Ok(None);
    }
    let num = match tau {
        Some(t) => r.num().checked_mul(t)?,
        None => r.num().clone(),
    };
    let (_, rem) = num.div_rem(r.den())?;
    Ok((!rem.is_zero()).then_some(rem))
}

fn holomorphy_residuals(sys: &HamiltonianSystem, chart: &BirationalMap) -> Result<Vec<Residual>> {
    let (fx, fy) = pullback_field(sys, chart)?;
    let tau = tau_power(sys);
    let mut out = Vec::new();
    for (label, r) in [("dX/dt", &fx), ("dY/dt", &fy)] {
        if let Some(rem) = chart_remainder(r, tau.as_ref())? {
            out.push(Residual::from_poly(format!("{label} remainder"), &rem));
        }
    }
    Ok(out)
}

fn error_residual(e: Error) -> Vec<Residual> {
    vec![Residual::new("error", e)]
}

fn sample_alphas(sys: &HamiltonianSystem, samples: usize, seed: u64) -> Vec<Vec<Rational>> {
    let mut s = Sampler::new(seed);
    (0..samples).map(|_| s.alphas(sys.relation())).collect()
}

fn alpha_bindings(values: &[Rational]) -> Vec<(usize, Rational)> {
    values.iter().enumerate().map(|(i, v)| (alpha(i), v.clone())).collect()
}

fn list(values: &[Rational]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

/// Both pulled-back components must be polynomial in the chart coordinates.
pub fn check_polynomial_in_chart(
    sys: &HamiltonianSystem,
    chart: &BirationalMap,
    mode: Mode,
) -> CheckReport {
    let started = Instant::now();
    let residuals = match mode {
        Mode::Symbolic => holomorphy_residuals(sys, chart).unwrap_or_else(error_residual),
        Mode::Probabilistic { samples, seed } => sample_alphas(sys, samples, seed)
            .par_iter()
            .enumerate()
            .map(|(k, a)| {
                let run = || -> Result<Vec<Residual>> {
                    let b = alpha_bindings(a);
                    let h = sys.hamiltonian().specialize(&b)?;
                    let special = sys.with_hamiltonian(h, sys.variant())?;
                    let map = chart.specialize_alpha(&b)?;
                    holomorphy_residuals(&special, &map)
                };
                run()
                    .unwrap_or_else(error_residual)
                    .into_iter()
                    .map(|r| Residual {
                        component: format!("sample {k} (alpha = {}): {}", list(a), r.component),
                        text: r.text,
                    })
                    .collect::<Vec<_>>()
            })
            .flatten()
            .collect(),
    };
    CheckReport::new(
        CheckKind::Holomorphy,
        sys.name().as_str(),
        &chart.name,
        mode,
        residuals,
        started,
    )
}

/// `X_q f + X_p g + X_t − T'·F(Q, P, T, Aα + b)` for `X ∈ {Q, P}`, with
/// `F` the target field component.
fn symmetry_differences(
    sys: &HamiltonianSystem,
    target: &HamiltonianSystem,
    map: &BirationalMap,
) -> Result<[RationalFunction; 2]> {
    let vf = sys.vector_field();
    let tv = target.vector_field();
    let dt = map.time.derivative_rf(sys.vars());
    let rel = sys.relation();
    let side = |x: &RationalFunction, f: &RationalFunction| -> Result<RationalFunction> {
        let lhs = rel.reduce_rf(&along(x, &vf));
        let rhs = dt.checked_mul(&map.pull(f)?)?;
        Ok(rel.reduce_rf(&lhs.checked_sub(&rhs)?))
    };
    Ok([side(&map.q, &tv.f)?, side(&map.p, &tv.g)?])
}

fn symbolic_symmetry(
    sys: &HamiltonianSystem,
    target: &HamiltonianSystem,
    map: &BirationalMap,
) -> Result<Vec<Residual>> {
    let diffs = symmetry_differences(sys, target, map)?;
    Ok(["dQ/dt", "dP/dt"]
        .iter()
        .zip(&diffs)
        .filter(|(_, d)| !d.is_zero())
        .map(|(label, d)| Residual::from_poly(*label, d.num()))
        .collect())
}

struct Evaluators {
    vf: VectorField,
    tv: VectorField,
    partials: [[RationalFunction; 3]; 2],
}

fn probabilistic_symmetry(
    sys: &HamiltonianSystem,
    target: &HamiltonianSystem,
    map: &BirationalMap,
    samples: usize,
    seed: u64,
) -> Vec<Residual> {
    let ev = Evaluators {
        vf: sys.vector_field(),
        tv: target.vector_field(),
        partials: [&map.q, &map.p].map(|x| [Q, P, T].map(|v| x.derivative(v))),
    };
    let mut sampler = Sampler::new(seed);
    let mut out = Vec::new();
    let mut done = 0;
    for _ in 0..POLE_RETRIES {
        let batch: Vec<(Vec<Rational>, [Rational; 3])> = (0..samples - done)
            .map(|_| {
                let a = sampler.alphas(sys.relation());
                (a, [sampler.integer(), sampler.integer(), sampler.integer()])
            })
            .collect();
        let results: Vec<Result<[Rational; 2]>> = batch
            .par_iter()
            .map(|(a, [q, p, t])| symmetry_at(&ev, map, [q, p, t], a))
            .collect();
        for ((a, [q, p, t]), r) in batch.iter().zip(results) {
            match r {
                Err(Error::Pole) => continue,
                Err(e) => return error_residual(e),
                Ok(diffs) => {
                    for (label, d) in ["dQ/dt", "dP/dt"].iter().zip(diffs) {
                        if !d.is_zero() {
                            out.push(Residual::new(
                                format!("sample {done} at (q, p, t) = ({q}, {p}, {t}), alpha = ({})", list(a)),
                                format!("{label} mismatch {d}"),
                            ));
                        }
                    }
                    done += 1;
                }
            }
        }
        if done == samples {
            return out;
        }
    }
    out.push(Residual::new("sampling", "too many sample points at poles"));
    out
}

fn symmetry_at(
    ev: &Evaluators,
    map: &BirationalMap,
    point: [&Rational; 3],
    a: &[Rational],
) -> Result<[Rational; 2]> {
    let mut full: Vec<Rational> = point.iter().map(|x| (*x).clone()).collect();
    full.extend(a.iter().cloned());
    let f = ev.vf.f.eval(&full)?;
    let g = ev.vf.g.eval(&full)?;
    let ([qq, pp, tt], a2) = map.apply_point(point, a)?;
    let mut image = vec![qq, pp, tt];
    image.extend(a2);
    let dt = map.time.derivative_at(point[2])?;
    let mut out = [Rational::zero(), Rational::zero()];
    for (k, target) in [&ev.tv.f, &ev.tv.g].into_iter().enumerate() {
        let [xq, xp, xt] = &ev.partials[k];
        let lhs = xq.eval(&full)? * &f + xp.eval(&full)? * &g + xt.eval(&full)?;
        let rhs = &dt * target.eval(&image)?;
        out[k] = lhs - rhs;
    }
    Ok(out)
}

fn symmetry_report(
    kind: CheckKind,
    sys: &HamiltonianSystem,
    target: &HamiltonianSystem,
    map: &BirationalMap,
    mode: Mode,
) -> CheckReport {
    let started = Instant::now();
    let residuals = match mode {
        Mode::Symbolic => symbolic_symmetry(sys, target, map).unwrap_or_else(error_residual),
        Mode::Probabilistic { samples, seed } => probabilistic_symmetry(sys, target, map, samples, seed),
    };
    CheckReport::new(kind, sys.name().as_str(), &map.name, mode, residuals, started)
}

/// The map carries the flow of `sys` to itself with parameters `Aα + b`.
pub fn check_symmetry(sys: &HamiltonianSystem, gen: &BirationalMap, mode: Mode) -> CheckReport {
    symmetry_report(CheckKind::Symmetry, sys, sys, gen, mode)
}

/// The map carries the flow of `source` to the flow of `target`.
pub fn check_equivalence_pvi(
    source: &HamiltonianSystem,
    target: &HamiltonianSystem,
    map: &BirationalMap,
    mode: Mode,
) -> CheckReport {
    symmetry_report(CheckKind::Equivalence, source, target, map, mode)
}

/// `Q_q P_p − Q_p P_q ≡ 1` modulo the relation.
pub fn check_symplectic(map: &BirationalMap) -> CheckReport {
    let started = Instant::now();
    let run = || -> Result<Vec<Residual>> {
        let det = map
            .q
            .derivative(Q)
            .checked_mul(&map.p.derivative(P))?
            .checked_sub(&map.q.derivative(P).checked_mul(&map.p.derivative(Q))?)?;
        let diff = map.relation.reduce(&det.num().checked_sub(det.den())?);
        Ok(if diff.is_zero() {
            vec![]
        } else {
            vec![Residual::new("det - 1", det.checked_sub(&RationalFunction::one(det.vars()))?)]
        })
    };
    let system = map.target.map(|s| s.as_str()).unwrap_or("");
    CheckReport::new(
        CheckKind::Symplectic,
        system,
        &map.name,
        Mode::Symbolic,
        run().unwrap_or_else(error_residual),
        started,
    )
}

/// Holomorphy in one chart as a constraint on unknown coefficients.
pub struct HolomorphyConstraint<'a> {
    pub chart: &'a BirationalMap,
}

impl Constraint for HolomorphyConstraint<'_> {
    fn label(&self) -> String {
        format!("holomorphy {}", self.chart.name)
    }

    fn residuals(&self, systems: &[HamiltonianSystem]) -> Result<Vec<Vec<Poly>>> {
        let fields = systems
            .par_iter()
            .map(|s| pullback_field(s, self.chart))
            .collect::<Result<Vec<_>>>()?;
        let tau = systems.first().and_then(tau_power);
        let mut out = vec![Vec::new(); systems.len()];
        for pick in [0, 1] {
            let rs: Vec<RationalFunction> = fields
                .iter()
                .map(|f| if pick == 0 { f.0.clone() } else { f.1.clone() })
                .collect();
            let mut dens: Vec<&Poly> = Vec::new();
            for r in &rs {
                if r.den().is_one() || dens.contains(&r.den()) {
                    continue;
                }
                if !r.den().uses_var(Q) && !r.den().uses_var(P) {
                    return Err(Error::UnsupportedAnsatz(format!(
                        "{} has a denominator free of q, p",
                        self.label()
                    )));
                }
                dens.push(r.den());
            }
            let common = dens.iter().fold(Poly::one(rs[0].vars()), |acc, d| &acc * *d);
            for (k, num) in clear_denominators(&rs)?.into_iter().enumerate() {
                let num = match &tau {
                    Some(t) => num.checked_mul(t)?,
                    None => num,
                };
                out[k].push(num.div_rem(&common)?.1);
            }
        }
        Ok(out)
    }
}

/// A symmetry identity as a constraint on unknown coefficients.
pub struct SymmetryConstraint<'a> {
    pub map: &'a BirationalMap,
}

impl Constraint for SymmetryConstraint<'_> {
    fn label(&self) -> String {
        format!("symmetry {}", self.map.name)
    }

    fn residuals(&self, systems: &[HamiltonianSystem]) -> Result<Vec<Vec<Poly>>> {
        let diffs = systems
            .par_iter()
            .map(|s| symmetry_differences(s, s, self.map))
            .collect::<Result<Vec<_>>>()?;
        let mut out = vec![Vec::new(); systems.len()];
        for pick in [0, 1] {
            let rs: Vec<RationalFunction> = diffs.iter().map(|d| d[pick].clone()).collect();
            for (k, num) in clear_denominators(&rs)?.into_iter().enumerate() {
                out[k].push(systems[k].relation().reduce(&num));
            }
        }
        Ok(out)
    }
}
