//! Check suites behind the `weylpain` command.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;
use weylpain::exactpoly::{int, to_f64};
use weylpain::flow::{backlund_numeric_check, conservation_report, integrate, IntegratorConfig};
use weylpain::geometry::{
    chain_count, verify_accessible_points, verify_chart_composition, PointList, Sequence,
};
use weylpain::report::{CheckKind, CheckReport, Mode, Residual};
use weylpain::sampling::Sampler;
use weylpain::systems::{check_first_integral, load_accepted, load_system, HamiltonianSystem, SystemName};
use weylpain::transforms::{
    check_equivalence_pvi, check_polynomial_in_chart, check_symmetry, check_symplectic, load_catalog,
    Catalog, MapKind,
};
use weylpain::weyl::{
    check_automorphism, check_coxeter_birational, check_coxeter_param, check_involutions, infer_diagram,
    DynkinDiagram, Pairs, ParameterAction,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] weylpain::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Check {
    Holomorphy,
    Symmetry,
    Symplectic,
    Coxeter,
    FirstIntegral,
    Lattice,
    Accessible,
    Charts,
    Equivalence,
    Integrate,
}

impl Check {
    pub const ALL: [Check; 10] = [
        Check::Holomorphy,
        Check::Symmetry,
        Check::Symplectic,
        Check::Coxeter,
        Check::FirstIntegral,
        Check::Lattice,
        Check::Accessible,
        Check::Charts,
        Check::Equivalence,
        Check::Integrate,
    ];

    pub fn parse(s: &str) -> CliResult<Vec<Check>> {
        Ok(match s {
            "all" => Check::ALL.to_vec(),
            "holomorphy" => vec![Check::Holomorphy],
            "symmetry" => vec![Check::Symmetry],
            "symplectic" => vec![Check::Symplectic],
            "coxeter" => vec![Check::Coxeter],
            "first-integral" => vec![Check::FirstIntegral],
            "lattice" => vec![Check::Lattice],
            "accessible" => vec![Check::Accessible],
            "charts" => vec![Check::Charts],
            "equivalence" => vec![Check::Equivalence],
            "integrate" => vec![Check::Integrate],
            other => return Err(CliError::Usage(format!("unknown check `{other}`"))),
        })
    }
}

pub fn parse_systems(s: &str) -> CliResult<Vec<SystemName>> {
    if s == "all" {
        return Ok(SystemName::ALL.to_vec());
    }
    Ok(vec![s.parse()?])
}

pub fn parse_mode(mode: &str, samples: usize, seed: u64) -> CliResult<Mode> {
    match mode {
        "symbolic" => Ok(Mode::Symbolic),
        "probabilistic" if samples > 0 => Ok(Mode::Probabilistic { samples, seed }),
        "probabilistic" => Err(CliError::Usage("--samples must be positive".into())),
        other => Err(CliError::Usage(format!("unknown mode `{other}`"))),
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub data: PathBuf,
    pub systems: Vec<SystemName>,
    pub checks: Vec<Check>,
    pub mode: Mode,
    pub variant: Option<String>,
    pub seed: u64,
    pub jobs: Option<usize>,
}

struct Loaded {
    sys: HamiltonianSystem,
    catalog: Catalog,
}

fn load(cfg: &RunConfig, name: SystemName) -> CliResult<Loaded> {
    let sys = match &cfg.variant {
        Some(v) => load_system(&cfg.data, name, v)?,
        None => load_accepted(&cfg.data, name)?,
    };
    let catalog = load_catalog(&cfg.data, name)?;
    Ok(Loaded { sys, catalog })
}

type Job<'a> = Box<dyn Fn() -> Vec<CheckReport> + Send + Sync + 'a>;

fn error_report(kind: CheckKind, system: SystemName, target: &str, e: impl std::fmt::Display) -> CheckReport {
    CheckReport::new(
        kind,
        system.as_str(),
        target,
        Mode::Symbolic,
        vec![Residual::new("error", e)],
        Instant::now(),
    )
}

fn diagram_report(name: SystemName, catalog: &Catalog) -> CheckReport {
    let started = Instant::now();
    let residuals = match (infer_diagram(&ParameterAction::from_catalog(catalog)), DynkinDiagram::builtin(name)) {
        (Ok(d), Some(b)) if d == b => Vec::new(),
        (Ok(d), Some(b)) => vec![Residual::new(
            "edges",
            format!("inferred {:?}, expected {:?}", d.edges(), b.edges()),
        )],
        (Ok(_), None) => vec![Residual::new("diagram", "no reference diagram")],
        (Err(e), _) => vec![Residual::new("error", e)],
    };
    CheckReport::new(CheckKind::Coxeter, name.as_str(), "diagram", Mode::Symbolic, residuals, started)
}

/// Small random parameters on the relation hyperplane.
pub fn fixture_alpha(sys: &HamiltonianSystem, seed: u64) -> Vec<f64> {
    let mut s = Sampler::with_range(seed, 30);
    let mut a = s.alphas(sys.relation());
    for x in a.iter_mut() {
        *x = x.clone() / int(100);
    }
    sys.relation().project(&mut a);
    a.iter().map(to_f64).collect()
}

/// Tolerance, span and start of the `integrate` check.
pub const FIXTURE_TOL: f64 = 1e-10;
pub const FIXTURE_SPAN: [f64; 2] = [0.0, 0.2];
pub const FIXTURE_START: [f64; 2] = [0.5, 0.5];
pub const FIXTURE_THRESHOLD: f64 = 100.0;
pub const FIXTURE_DRIFT: f64 = 1e-8;

pub fn fixture_config() -> IntegratorConfig {
    let mut c = IntegratorConfig::rk45(FIXTURE_TOL);
    c.chart_switch_threshold = FIXTURE_THRESHOLD;
    c
}

fn conservation_check(l: &Loaded, seed: u64) -> CheckReport {
    let started = Instant::now();
    let alpha = fixture_alpha(&l.sys, seed);
    let residuals = match integrate(&l.sys, Some(&l.catalog), FIXTURE_START, &alpha, FIXTURE_SPAN, fixture_config()) {
        Ok(tr) => {
            let drift = conservation_report(&tr);
            if drift <= FIXTURE_DRIFT {
                Vec::new()
            } else {
                vec![Residual::new("drift", format!("{drift:e} > {FIXTURE_DRIFT:e}"))]
            }
        }
        Err(e) => vec![Residual::new("error", e)],
    };
    let mut r = CheckReport::new(
        CheckKind::Integrate,
        l.sys.name().as_str(),
        "conservation",
        Mode::Symbolic,
        residuals,
        started,
    );
    r.mode = "numeric";
    r.seed = Some(seed);
    r
}

fn jobs_for<'a>(cfg: &'a RunConfig, name: SystemName, l: &'a Loaded, pvi_target: Option<&'a HamiltonianSystem>) -> CliResult<Vec<Job<'a>>> {
    let mut jobs: Vec<Job<'a>> = Vec::new();
    let mode = cfg.mode;
    let sys = &l.sys;
    let cat = &l.catalog;
    for check in &cfg.checks {
        match check {
            Check::Holomorphy => {
                for m in cat.charts() {
                    jobs.push(Box::new(move || vec![check_polynomial_in_chart(sys, m, mode)]));
                }
            }
            Check::Symmetry => {
                for m in cat.symmetries() {
                    jobs.push(Box::new(move || vec![check_symmetry(sys, m, mode)]));
                }
            }
            Check::Symplectic => {
                for m in cat.maps() {
                    jobs.push(Box::new(move || vec![check_symplectic(m)]));
                }
            }
            Check::Coxeter => {
                let actions = ParameterAction::from_catalog(cat);
                let system = name.as_str();
                match DynkinDiagram::builtin(name) {
                    Some(d) => {
                        let (a, dd) = (actions.clone(), d.clone());
                        jobs.push(Box::new(move || vec![diagram_report(name, cat), check_coxeter_param(system, &a, &dd)]));
                        let pairs = if name == SystemName::E6 { Pairs::All } else { Pairs::Adjacent };
                        let dd = d.clone();
                        jobs.push(Box::new(move || {
                            let gens = cat.of_kind(MapKind::Generator);
                            vec![check_coxeter_birational(system, &gens, &dd, pairs, mode)]
                        }));
                        for pi in cat.of_kind(MapKind::Automorphism) {
                            let (a, dd) = (actions.clone(), d.clone());
                            jobs.push(Box::new(move || {
                                vec![check_automorphism(system, pi, &a, &dd)
                                    .unwrap_or_else(|e| error_report(CheckKind::Automorphism, name, &pi.name, e))]
                            }));
                        }
                    }
                    None if !actions.is_empty() => {
                        jobs.push(Box::new(move || vec![check_involutions(system, &actions)]));
                    }
                    None => {}
                }
            }
            Check::FirstIntegral => {
                if !name.is_pvi() {
                    jobs.push(Box::new(move || vec![check_first_integral(sys)]));
                }
            }
            Check::Lattice => {
                if !name.is_pvi() {
                    let path = cfg.data.join("geometry").join(format!("{}.seq", name.as_str()));
                    let text = read(&path)?;
                    let seq = Sequence::parse(&text, &path.display().to_string())?;
                    jobs.push(Box::new(move || match seq.run(name.as_str(), "D") {
                        Ok((_, reports)) => reports,
                        Err(e) => vec![error_report(CheckKind::Lattice, name, "sequence", e)],
                    }));
                }
            }
            Check::Accessible | Check::Charts => {
                if !name.is_pvi() {
                    let points = PointList::load(&cfg.data, sys)?;
                    if *check == Check::Accessible {
                        for level in [0, 1] {
                            let pts = points.clone();
                            jobs.push(Box::new(move || vec![verify_accessible_points(sys, &pts, level)]));
                        }
                    } else {
                        for j in 1..=chain_count(&points) {
                            let pts = points.clone();
                            jobs.push(Box::new(move || {
                                vec![verify_chart_composition(sys, &pts, cat, j)
                                    .unwrap_or_else(|e| error_report(CheckKind::Charts, name, &format!("r{j}"), e))]
                            }));
                        }
                    }
                }
            }
            Check::Equivalence => {
                if let Some(target) = pvi_target {
                    for m in cat.of_kind(MapKind::Equivalence) {
                        jobs.push(Box::new(move || vec![check_equivalence_pvi(sys, target, m, mode)]));
                    }
                }
            }
            Check::Integrate => {
                if !name.is_pvi() {
                    let seed = cfg.seed;
                    jobs.push(Box::new(move || vec![conservation_check(l, seed)]));
                    for m in cat.of_kind(MapKind::Generator) {
                        jobs.push(Box::new(move || {
                            let alpha = fixture_alpha(sys, seed);
                            let r = backlund_numeric_check(
                                sys,
                                Some(cat),
                                m,
                                FIXTURE_START,
                                &alpha,
                                FIXTURE_SPAN,
                                fixture_config(),
                            );
                            vec![r.unwrap_or_else(|e| error_report(CheckKind::Backlund, name, &m.name, e))]
                        }));
                    }
                }
            }
        }
    }
    Ok(jobs)
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn natural(s: &str) -> (String, u64) {
    let digits: String = s.chars().rev().take_while(|c| c.is_ascii_digit()).collect();
    let head = &s[..s.len() - digits.len()];
    let n = digits.chars().rev().collect::<String>().parse().unwrap_or(0);
    (head.to_string(), n)
}

/// Runs every selected check; reports sorted by system, check and target.
pub fn run(cfg: &RunConfig) -> CliResult<Vec<CheckReport>> {
    let loaded: Vec<(SystemName, Loaded)> = cfg
        .systems
        .iter()
        .map(|&n| load(cfg, n).map(|l| (n, l)))
        .collect::<CliResult<_>>()?;
    let hvi = if cfg.systems.contains(&SystemName::PviG) && cfg.checks.contains(&Check::Equivalence) {
        Some(load_accepted(&cfg.data, SystemName::PviHvi)?)
    } else {
        None
    };
    let mut jobs = Vec::new();
    for (name, l) in &loaded {
        let target = if *name == SystemName::PviG { hvi.as_ref() } else { None };
        jobs.extend(jobs_for(cfg, *name, l, target)?);
    }
    let exec = || jobs.par_iter().flat_map_iter(|j| j()).collect::<Vec<_>>();
    let mut reports = match cfg.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(exec),
        None => exec(),
    };
    reports.sort_by(|a, b| {
        (a.system.as_str(), a.check.as_str(), natural(&a.target))
            .cmp(&(b.system.as_str(), b.check.as_str(), natural(&b.target)))
    });
    Ok(reports)
}

#[derive(Serialize)]
pub struct ReportEntry<'a> {
    #[serde(flatten)]
    pub report: &'a CheckReport,
    pub residual_excerpt: Option<String>,
}

#[derive(Serialize)]
pub struct ReportFile<'a> {
    pub schema: u32,
    pub mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub reports: Vec<ReportEntry<'a>>,
}

/// Length limit of `residual_excerpt`.
pub const EXCERPT_CHARS: usize = 400;

pub const SCHEMA: u32 = 1;

pub fn report_json(mode: Mode, reports: &[CheckReport]) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(&ReportFile {
        schema: SCHEMA,
        mode: mode.name(),
        seed: mode.seed(),
        reports: reports
            .iter()
            .map(|report| ReportEntry {
                report,
                residual_excerpt: report.residual_excerpt(EXCERPT_CHARS),
            })
            .collect(),
    })?)
}

/// `0` iff everything passed, `1` otherwise.
pub fn exit_code(reports: &[CheckReport]) -> i32 {
    if reports.iter().all(CheckReport::passed) {
        0
    } else {
        1
    }
}

pub fn summary_line(r: &CheckReport) -> String {
    let status = if r.passed() { "PASS" } else { "FAIL" };
    let mut s = format!("{status} {} {} {} ({} ms)", r.system, r.check.as_str(), r.target, r.elapsed_ms);
    if let Some(x) = r.residual_excerpt(160) {
        s.push_str("\n     ");
        s.push_str(&x);
    }
    s
}
