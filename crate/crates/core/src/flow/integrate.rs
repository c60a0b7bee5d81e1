use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use super::field::FloatRational;
use crate::error::{Error, Result};
use crate::exactpoly::to_f64;
use crate::report::{CheckKind, CheckReport, Mode, Residual};
use crate::systems::HamiltonianSystem;
use crate::transforms::{pullback_field, BirationalMap, Catalog, TimeMap};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Rk4 { step: f64 },
    Rk45 { tolerance: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorConfig {
    pub method: Method,
    pub chart_switch_threshold: f64,
    pub max_steps: usize,
}

pub const DEFAULT_THRESHOLD: f64 = 1e6;
pub const DEFAULT_MAX_STEPS: usize = 1_000_000;

impl IntegratorConfig {
    pub fn rk4(step: f64) -> Self {
        IntegratorConfig {
            method: Method::Rk4 { step },
            chart_switch_threshold: DEFAULT_THRESHOLD,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }

    pub fn rk45(tolerance: f64) -> Self {
        IntegratorConfig {
            method: Method::Rk45 { tolerance },
            chart_switch_threshold: DEFAULT_THRESHOLD,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }

    /// Local error target: the tolerance, or `h⁴` for fixed steps.
    pub fn tolerance(&self) -> f64 {
        match self.method {
            Method::Rk4 { step } => step.powi(4),
            Method::Rk45 { tolerance } => tolerance,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.method {
            Method::Rk4 { step } => step > 0.0 && step.is_finite(),
            Method::Rk45 { tolerance } => tolerance > 0.0 && tolerance.is_finite(),
        };
        if !ok {
            return Err(Error::Precondition("step and tolerance must be positive".into()));
        }
        if !(self.chart_switch_threshold > 1.0) {
            return Err(Error::Precondition("chart switch threshold must exceed 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Sample {
    pub t: f64,
    pub chart: String,
    pub x: f64,
    pub y: f64,
    pub invariant: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SwitchEvent {
    pub t: f64,
    pub from: String,
    pub to: String,
    pub before: [f64; 2],
    pub after: [f64; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub system: String,
    pub alpha: Vec<f64>,
    pub samples: Vec<Sample>,
    pub switches: Vec<SwitchEvent>,
}

impl Trajectory {
    /// Columns `t,chart,x,y,I`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,chart,x,y,I\n");
        for s in &self.samples {
            let _ = writeln!(out, "{},{},{},{},{}", s.t, s.chart, s.x, s.y, s.invariant);
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Max over samples of `|I − I₀| / max(1, |I₀|)`.
pub fn conservation_report(traj: &Trajectory) -> f64 {
    let Some(first) = traj.samples.first() else {
        return 0.0;
    };
    let i0 = first.invariant;
    let scale = i0.abs().max(1.0);
    traj.samples
        .iter()
        .map(|s| (s.invariant - i0).abs() / scale)
        .fold(0.0, f64::max)
}

struct Chart {
    name: String,
    field: [FloatRational; 2],
    /// `(X, Y)` from original coordinates; `None` for the original chart.
    forward: Option<[FloatRational; 2]>,
    backward: Option<[FloatRational; 2]>,
}

/// Position in a chart: index 0 is the original `(q, p)` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub chart: usize,
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

/// An integrator bound to one system and one parameter point.
pub struct Flow<'a> {
    sys: &'a HamiltonianSystem,
    maps: Vec<&'a BirationalMap>,
    charts: Vec<Option<Chart>>,
    alpha: Vec<f64>,
    hamiltonian: FloatRational,
    config: IntegratorConfig,
    h: f64,
    steps: usize,
}

const SAFETY: f64 = 0.9;

impl<'a> Flow<'a> {
    pub fn new(
        sys: &'a HamiltonianSystem,
        catalog: Option<&'a Catalog>,
        alpha: &[f64],
        config: IntegratorConfig,
    ) -> Result<Self> {
        config.validate()?;
        if alpha.len() != sys.alpha_count() {
            return Err(Error::AlphaCountMismatch(alpha.len(), sys.alpha_count()));
        }
        if !sys.relation().holds_f64(alpha, 1e-12) {
            return Err(Error::Precondition("parameters violate the relation".into()));
        }
        let maps: Vec<&BirationalMap> = catalog
            .map(|c| {
                c.charts()
                    .into_iter()
                    .filter(|m| m.time.is_identity() && m.params.is_identity() && m.inverse.is_some())
                    .collect()
            })
            .unwrap_or_default();
        let vf = sys.vector_field();
        let original = Chart {
            name: "qp".into(),
            field: [FloatRational::new(&vf.f), FloatRational::new(&vf.g)],
            forward: None,
            backward: None,
        };
        let mut charts = vec![Some(original)];
        charts.extend(maps.iter().map(|_| None));
        let h = match config.method {
            Method::Rk4 { step } => step,
            Method::Rk45 { tolerance } => tolerance.powf(0.2).min(1e-2),
        };
        Ok(Flow {
            sys,
            maps,
            charts,
            alpha: alpha.to_vec(),
            hamiltonian: FloatRational::new(sys.hamiltonian()),
            config,
            h,
            steps: 0,
        })
    }

    fn chart(&mut self, i: usize) -> Result<&Chart> {
        if self.charts[i].is_none() {
            let map = self.maps[i - 1];
            let (fx, fy) = pullback_field(self.sys, map)?;
            let inv = map.inverse()?;
            self.charts[i] = Some(Chart {
                name: map.name.clone(),
                field: [FloatRational::new(&fx), FloatRational::new(&fy)],
                forward: Some([FloatRational::new(&map.q), FloatRational::new(&map.p)]),
                backward: Some([FloatRational::new(&inv.q), FloatRational::new(&inv.p)]),
            });
        }
        Ok(self.charts[i].as_ref().expect("filled above"))
    }

    fn point(&self, x: f64, y: f64, t: f64) -> Vec<f64> {
        let mut v = vec![x, y, t];
        v.extend_from_slice(&self.alpha);
        v
    }

    pub fn chart_name(&mut self, i: usize) -> Result<String> {
        Ok(self.chart(i)?.name.clone())
    }

    fn rhs(&mut self, chart: usize, t: f64, x: f64, y: f64) -> Result<[f64; 2]> {
        let pt = self.point(x, y, t);
        let c = self.chart(chart)?;
        Ok([c.field[0].eval(&pt), c.field[1].eval(&pt)])
    }

    /// `(q, p)` of a state.
    pub fn original(&mut self, s: &State) -> Result<[f64; 2]> {
        let pt = self.point(s.x, s.y, s.t);
        let c = self.chart(s.chart)?;
        Ok(match &c.backward {
            None => [s.x, s.y],
            Some([bq, bp]) => [bq.eval(&pt), bp.eval(&pt)],
        })
    }

    /// Coordinates of the original point `(q, p)` in chart `i`.
    pub fn to_chart(&mut self, i: usize, t: f64, q: f64, p: f64) -> Result<[f64; 2]> {
        let pt = self.point(q, p, t);
        let c = self.chart(i)?;
        Ok(match &c.forward {
            None => [q, p],
            Some([fq, fp]) => [fq.eval(&pt), fp.eval(&pt)],
        })
    }

    pub fn invariant(&mut self, s: &State) -> Result<f64> {
        let [q, p] = self.original(s)?;
        Ok(self.hamiltonian.eval(&self.point(q, p, s.t)))
    }

    pub fn start(&mut self, q: f64, p: f64, t: f64) -> Result<State> {
        let pt = self.point(q, p, t);
        let c = self.chart(0)?;
        let den = c.field.iter().map(|f| f.den(&pt)).fold(f64::INFINITY, |a, d| a.min(d.abs()));
        let [f, g] = self.rhs(0, t, q, p)?;
        if den == 0.0 || !f.is_finite() || !g.is_finite() {
            return Err(Error::Precondition(format!("initial point ({q}, {p}) at t = {t} is a pole")));
        }
        Ok(State { chart: 0, t, x: q, y: p })
    }

    fn sample(&mut self, s: &State) -> Result<Sample> {
        Ok(Sample {
            t: s.t,
            chart: self.chart_name(s.chart)?,
            x: s.x,
            y: s.y,
            invariant: self.invariant(s)?,
        })
    }

    fn rk4(&mut self, s: &State, h: f64) -> Result<[f64; 2]> {
        let (t, x, y) = (s.t, s.x, s.y);
        let k1 = self.rhs(s.chart, t, x, y)?;
        let k2 = self.rhs(s.chart, t + h / 2.0, x + h / 2.0 * k1[0], y + h / 2.0 * k1[1])?;
        let k3 = self.rhs(s.chart, t + h / 2.0, x + h / 2.0 * k2[0], y + h / 2.0 * k2[1])?;
        let k4 = self.rhs(s.chart, t + h, x + h * k3[0], y + h * k3[1])?;
        let mut out = [0.0; 2];
        for i in 0..2 {
            out[i] = [x, y][i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        Ok(out)
    }

    /// Dormand–Prince 5(4): the fifth-order solution and the error estimate.
    fn dopri(&mut self, s: &State, h: f64) -> Result<([f64; 2], f64)> {
        const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
        const A: [[f64; 6]; 7] = [
            [0.0; 6],
            [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
            [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
            [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
            [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
            [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
        ];
        const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
        const B4: [f64; 7] = [
            5179.0 / 57600.0,
            0.0,
            7571.0 / 16695.0,
            393.0 / 640.0,
            -92097.0 / 339200.0,
            187.0 / 2100.0,
            1.0 / 40.0,
        ];
        let y0 = [s.x, s.y];
        let mut k = [[0.0; 2]; 7];
        for i in 0..7 {
            let mut yi = y0;
            for (j, kj) in k.iter().enumerate().take(i) {
                for c in 0..2 {
                    yi[c] += h * A[i][j] * kj[c];
                }
            }
            k[i] = self.rhs(s.chart, s.t + C[i] * h, yi[0], yi[1])?;
        }
        let mut y5 = y0;
        let mut err = 0.0f64;
        let tol = self.config.tolerance();
        for c in 0..2 {
            let mut e = 0.0;
            for i in 0..7 {
                y5[c] += h * B5[i] * k[i][c];
                e += h * (B5[i] - B4[i]) * k[i][c];
            }
            let scale = tol * (1.0 + y0[c].abs().max(y5[c].abs()));
            err = err.max((e / scale).abs());
        }
        Ok((y5, err))
    }

    fn switch(&mut self, s: &State) -> Result<Option<(usize, SwitchEvent)>> {
        let limit = self.config.chart_switch_threshold;
        if s.x.abs() <= limit && s.y.abs() <= limit {
            return Ok(None);
        }
        let [q, p] = self.original(s)?;
        let mut best: Option<(usize, [f64; 2], f64)> = None;
        for i in 0..self.charts.len() {
            let xy = self.to_chart(i, s.t, q, p)?;
            let size = xy[0].abs().max(xy[1].abs());
            if size.is_finite() && best.as_ref().is_none_or(|b| size < b.2) {
                best = Some((i, xy, size));
            }
        }
        match best {
            Some((i, xy, size)) if size <= limit => {
                let event = SwitchEvent {
                    t: s.t,
                    from: self.chart_name(s.chart)?,
                    to: self.chart_name(i)?,
                    before: [s.x, s.y],
                    after: xy,
                };
                Ok(Some((i, event)))
            }
            _ => Err(Error::Escape(s.t)),
        }
    }

    /// Integrates to `t_end`, recording accepted steps when `traj` is given.
    pub fn advance(&mut self, mut s: State, t_end: f64, mut traj: Option<&mut Trajectory>) -> Result<State> {
        let dir = if t_end >= s.t { 1.0 } else { -1.0 };
        while (t_end - s.t) * dir > 0.0 {
            self.steps += 1;
            if self.steps > self.config.max_steps {
                return Err(Error::MaxSteps(self.config.max_steps));
            }
            let remaining = (t_end - s.t).abs();
            let h = self.h.abs().min(remaining) * dir;
            let last = self.h.abs() >= remaining;
            let (next, accepted) = match self.config.method {
                Method::Rk4 { .. } => {
                    let y = self.rk4(&s, h)?;
                    (y, y.iter().all(|v| v.is_finite()))
                }
                Method::Rk45 { .. } => {
                    let (y, err) = self.dopri(&s, h)?;
                    let ok = err <= 1.0 && y.iter().all(|v| v.is_finite());
                    let factor = if err.is_finite() && err > 0.0 {
                        (SAFETY * err.powf(-0.2)).clamp(0.2, 5.0)
                    } else if err == 0.0 {
                        5.0
                    } else {
                        0.2
                    };
                    if ok && last {
                        self.h = self.h.abs().max(h.abs() * factor.min(1.0));
                    } else {
                        self.h = h.abs() * factor;
                    }
                    (y, ok)
                }
            };
            if !accepted {
                if matches!(self.config.method, Method::Rk4 { .. }) {
                    return Err(Error::Escape(s.t));
                }
                if self.h < 1e-14 * s.t.abs().max(1.0) {
                    return Err(Error::StepUnderflow(s.t));
                }
                continue;
            }
            s = State {
                chart: s.chart,
                t: if last { t_end } else { s.t + h },
                x: next[0],
                y: next[1],
            };
            if let Some((to, ev)) = self.switch(&s)? {
                s.chart = to;
                s.x = ev.after[0];
                s.y = ev.after[1];
                if let Some(tr) = traj.as_deref_mut() {
                    tr.switches.push(ev);
                }
            }
            if let Some(tr) = traj.as_deref_mut() {
                let sample = self.sample(&s)?;
                tr.samples.push(sample);
            }
        }
        Ok(s)
    }

    /// A trajectory over `t_span` from `(q, p)`.
    pub fn trajectory(&mut self, initial: [f64; 2], t_span: [f64; 2]) -> Result<Trajectory> {
        let s = self.start(initial[0], initial[1], t_span[0])?;
        let mut traj = Trajectory {
            system: self.sys.name().as_str().to_string(),
            alpha: self.alpha.clone(),
            samples: vec![self.sample(&s)?],
            switches: Vec::new(),
        };
        self.advance(s, t_span[1], Some(&mut traj))?;
        Ok(traj)
    }
}

/// Integrates `sys` from `initial` over `t_span`, switching to the charts of
/// `catalog` when the coordinates grow past the threshold.
pub fn integrate(
    sys: &HamiltonianSystem,
    catalog: Option<&Catalog>,
    initial: [f64; 2],
    alpha: &[f64],
    t_span: [f64; 2],
    config: IntegratorConfig,
) -> Result<Trajectory> {
    Flow::new(sys, catalog, alpha, config)?.trajectory(initial, t_span)
}

fn time_f64(m: &TimeMap, t: f64) -> f64 {
    (to_f64(&m.a) * t + to_f64(&m.b)) / (to_f64(&m.c) * t + to_f64(&m.d))
}

/// Matched times compared by the Bäcklund check.
pub const BACKLUND_POINTS: usize = 16;

/// Integrates from `initial` and from its image under `gen`, and compares
/// the image of the first trajectory with the second at matched times.
pub fn backlund_numeric_check(
    sys: &HamiltonianSystem,
    catalog: Option<&Catalog>,
    gen: &BirationalMap,
    initial: [f64; 2],
    alpha: &[f64],
    t_span: [f64; 2],
    config: IntegratorConfig,
) -> Result<CheckReport> {
    let started = Instant::now();
    let image = |q: f64, p: f64, t: f64, a: &[f64]| -> [f64; 2] {
        let mut pt = vec![q, p, t];
        pt.extend_from_slice(a);
        [gen.q.eval_f64(&pt), gen.p.eval_f64(&pt)]
    };
    let alpha2 = gen.params.apply_f64(alpha);
    let mut one = Flow::new(sys, catalog, alpha, config)?;
    let mut two = Flow::new(sys, catalog, &alpha2, config)?;
    let [q0, p0] = image(initial[0], initial[1], t_span[0], alpha);
    let mut s1 = one.start(initial[0], initial[1], t_span[0])?;
    let mut s2 = two.start(q0, p0, time_f64(&gen.time, t_span[0]))?;
    let tol = config.tolerance();
    let mut worst = (0.0f64, t_span[0]);
    for k in 1..=BACKLUND_POINTS {
        let t = t_span[0] + (t_span[1] - t_span[0]) * k as f64 / BACKLUND_POINTS as f64;
        s1 = one.advance(s1, t, None)?;
        s2 = two.advance(s2, time_f64(&gen.time, t), None)?;
        let [q1, p1] = one.original(&s1)?;
        let want = image(q1, p1, t, alpha);
        let got = two.original(&s2)?;
        let scale = got[0].abs().max(got[1].abs()).max(1.0);
        let dev = (want[0] - got[0]).abs().max((want[1] - got[1]).abs()) / scale;
        if !(dev <= worst.0) {
            worst = (dev, t);
        }
    }
    let residuals = if worst.0 <= 100.0 * tol {
        Vec::new()
    } else {
        vec![Residual::new(
            format!("deviation at t = {}", worst.1),
            format!("{:e} > {:e}", worst.0, 100.0 * tol),
        )]
    };
    let mut report = CheckReport::new(
        CheckKind::Backlund,
        sys.name().as_str(),
        gen.name.clone(),
        Mode::Symbolic,
        residuals,
        started,
    );
    report.mode = "numeric";
    Ok(report)
}
