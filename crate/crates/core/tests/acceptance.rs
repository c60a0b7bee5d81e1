mod common;

use common::data_dir;
use rand::Rng;
use weylpain::exactpoly::{int, to_f64, Monomial, Poly, RationalFunction};
use weylpain::flow::{backlund_numeric_check, conservation_report, integrate, IntegratorConfig};
use weylpain::geometry::{chain_count, verify_accessible_points, verify_chart_composition, PointList, Sequence};
use weylpain::report::{CheckReport, Mode};
use weylpain::sampling::Sampler;
use weylpain::systems::{
    check_first_integral, load_accepted, load_relation, load_system, repair_hamiltonian, Ansatz,
    HamiltonianSystem, SolutionSpace, SystemName,
};
use weylpain::transforms::{
    check_equivalence_pvi, check_polynomial_in_chart, check_symmetry, check_symplectic, load_catalog,
    BirationalMap, Catalog, HolomorphyConstraint, MapKind,
};
use weylpain::weyl::{
    check_automorphism, check_coxeter_birational, check_coxeter_param, infer_diagram, DynkinDiagram, Pairs,
    ParameterAction,
};

const PROBABILISTIC_SAMPLES: usize = 40;
const PROBABILISTIC_SEED: u64 = 20240601;
const CONSERVATION_TOL: f64 = 1e-10;
const CONSERVATION_DRIFT: f64 = 1e-8;
const CONSERVATION_START: [f64; 2] = [2.0, 1.0];
const CONSERVATION_SPAN: [f64; 2] = [0.0, 1.0];
const BACKLUND_TOL: f64 = 1e-10;
const BACKLUND_THRESHOLD: f64 = 100.0;
const BACKLUND_SPAN: [f64; 2] = [0.0, 0.5];
const BACKLUND_SEED: u64 = 11;
const MUTATIONS_H: usize = 10;
const MUTATIONS_GEN: usize = 3;
const MUTATION_SAMPLES: usize = 4;
const MUTATION_SEED: u64 = 7;

fn system(name: SystemName) -> (HamiltonianSystem, Catalog) {
    let sys = load_accepted(&data_dir(), name).unwrap();
    let cat = load_catalog(&data_dir(), name).unwrap();
    (sys, cat)
}

fn failures(reports: &[CheckReport]) -> Vec<String> {
    reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| format!("{} {} {}: {}", r.system, r.check.as_str(), r.target, r.residual_excerpt(160).unwrap_or_default()))
        .collect()
}

fn verdict(n: u32, what: &str, failed: Vec<String>) {
    if failed.is_empty() {
        println!("criterion {n}: PASS {what}");
    } else {
        println!("criterion {n}: FAIL {what}");
        for f in &failed {
            println!("    {f}");
        }
    }
    assert!(failed.is_empty(), "criterion {n} failed: {failed:?}");
}

fn holomorphy(sys: &HamiltonianSystem, cat: &Catalog, mode: Mode) -> Vec<CheckReport> {
    cat.charts().into_iter().map(|m| check_polynomial_in_chart(sys, m, mode)).collect()
}

fn symmetry(sys: &HamiltonianSystem, cat: &Catalog, mode: Mode) -> Vec<CheckReport> {
    cat.symmetries().into_iter().map(|m| check_symmetry(sys, m, mode)).collect()
}

fn targets(reports: &[CheckReport]) -> Vec<String> {
    reports.iter().map(|r| r.target.clone()).collect()
}

#[test]
fn criterion_01_e6_holomorphy() {
    let (sys, cat) = system(SystemName::E6);
    let reports = holomorphy(&sys, &cat, Mode::Symbolic);
    let mut failed = failures(&reports);
    if targets(&reports) != ["r0", "r1", "r2", "r3", "r4", "r5", "r6"] {
        failed.push(format!("charts {:?}", targets(&reports)));
    }
    verdict(1, &format!("e6 holomorphy r0..r6 symbolic ({})", sys.variant()), failed);
}

const BLOCK: &str = "(-3*a0^2 - a2^2 + 2*a0*(a1+2*a2+a3+2*a4) + 3*a0*a5 + 2*a2*a5 + a1*(a5-a2) + (a4+a5)*(a3+a4+a5))*q*p";
const REST: &str = "(q-1)^2*q^2*p^3 - q*(q-1)*((a1+2*a2+a3+2*a4)*q - a1 - 2*a2)*p^2 \
    + (-3*a0^2 - 2*a0*(a1+2*a2+a3+2*a4) - 3*a0*a5 - a5*(a1+2*a2+a3+2*a4+a5))*q^2*p \
    + a2*(a1+a2)*p + a0*(a0+a5)*(a0+a5+a6)*q";

#[test]
fn criterion_02_e6_symmetry() {
    let data = data_dir();
    let (sys, cat) = system(SystemName::E6);
    let mut failed = failures(&symmetry(&sys, &cat, Mode::Symbolic));
    let want = ["s0", "s1", "s2", "s3", "s4", "s5", "s6", "pi1", "pi2", "pi3"];
    if targets(&symmetry(&sys, &cat, Mode::Symbolic)) != want {
        failed.push("symmetry targets differ".into());
    }
    let verbatim = load_system(&data, SystemName::E6, "verbatim").unwrap();
    let verbatim_failed = failures(&symmetry(&verbatim, &cat, Mode::Symbolic));
    if !verbatim_failed.is_empty() {
        let plus = load_system(&data, SystemName::E6, "plus-inserted").unwrap();
        for f in failures(&symmetry(&plus, &cat, Mode::Symbolic)) {
            failed.push(format!("plus-inserted: {f}"));
        }
        let relation = load_relation(&data, SystemName::E6).unwrap();
        let ansatz = Ansatz::parse(SystemName::E6, relation, &format!("{REST} + u*{BLOCK}"), &["u"]).unwrap();
        let cons: Vec<HolomorphyConstraint> = cat.charts().into_iter().map(|chart| HolomorphyConstraint { chart }).collect();
        let refs: Vec<&dyn weylpain::systems::Constraint> = cons.iter().map(|c| c as _).collect();
        let solved = repair_hamiltonian(&ansatz, &refs).unwrap();
        if solved != SolutionSpace::Unique(vec![int(1)]) {
            failed.push(format!("repair of the q*p block selects {solved:?}, expected unique u = 1"));
        }
    }
    verdict(
        2,
        &format!("e6 symmetry s0..s6, pi1..pi3 symbolic ({}); verbatim failures {}", sys.variant(), verbatim_failed.len()),
        failed,
    );
}

#[test]
fn criterion_03_pvi() {
    let (g, cat) = system(SystemName::PviG);
    let hvi = load_accepted(&data_dir(), SystemName::PviHvi).unwrap();
    let mut reports = holomorphy(&g, &cat, Mode::Symbolic);
    reports.extend(symmetry(&g, &cat, Mode::Symbolic));
    let eq: Vec<&BirationalMap> = cat.of_kind(MapKind::Equivalence);
    reports.extend(eq.iter().map(|m| check_equivalence_pvi(&g, &hvi, m, Mode::Symbolic)));
    let mut failed = failures(&reports);
    let want = ["rr0", "rr1", "rr2", "rr3", "rr4", "w0", "w1", "w2", "w3", "w4", "phi"];
    if targets(&reports) != want {
        failed.push(format!("targets {:?}", targets(&reports)));
    }
    verdict(3, "pvi holomorphy rr0..rr4, symmetry w0..w4, equivalence phi", failed);
}

#[test]
fn criterion_04_e7_suite() {
    let (sys, cat) = system(SystemName::E7);
    let mut reports = holomorphy(&sys, &cat, Mode::Symbolic);
    reports.extend(symmetry(&sys, &cat, Mode::Symbolic));
    let mut failed = failures(&reports);
    if reports.len() != 8 + 9 {
        failed.push(format!("{} checks, expected 17", reports.len()));
    }
    verdict(4, "e7 holomorphy r0..r7, symmetry s0..s7, pi symbolic", failed);
}

#[test]
fn criterion_05_e8_suite() {
    let (sys, cat) = system(SystemName::E8);
    let mode = Mode::Probabilistic { samples: PROBABILISTIC_SAMPLES, seed: PROBABILISTIC_SEED };
    let mut reports = holomorphy(&sys, &cat, mode);
    reports.extend(symmetry(&sys, &cat, mode));
    let mut failed = failures(&reports);
    if reports.len() != 9 + 9 {
        failed.push(format!("{} checks, expected 18", reports.len()));
    }
    for r in &reports {
        if r.seed != Some(PROBABILISTIC_SEED) || r.samples != Some(PROBABILISTIC_SAMPLES) {
            failed.push(format!("{} does not record seed and samples", r.target));
        }
    }
    verdict(
        5,
        &format!("e8 holomorphy r0..r8, symmetry s0..s8, {PROBABILISTIC_SAMPLES} samples, seed {PROBABILISTIC_SEED}"),
        failed,
    );
}

#[test]
fn criterion_06_symplectic() {
    let mut reports = Vec::new();
    for name in SystemName::ALL {
        let cat = load_catalog(&data_dir(), name).unwrap();
        reports.extend(cat.maps().into_iter().map(check_symplectic));
    }
    let n = reports.len();
    verdict(6, &format!("jacobian 1 for {n} maps"), failures(&reports));
}

#[test]
fn criterion_07_weyl_relations() {
    let mut failed = Vec::new();
    let mut reports = Vec::new();
    for name in [SystemName::E6, SystemName::E7, SystemName::E8] {
        let cat = load_catalog(&data_dir(), name).unwrap();
        let actions = ParameterAction::from_catalog(&cat);
        let builtin = DynkinDiagram::builtin(name).unwrap();
        match infer_diagram(&actions) {
            Ok(d) if d == builtin => {}
            Ok(d) => failed.push(format!("{name} diagram {:?}", d.edges())),
            Err(e) => failed.push(format!("{name} diagram: {e}")),
        }
        reports.push(check_coxeter_param(name.as_str(), &actions, &builtin));
        if name == SystemName::E6 {
            let gens = cat.of_kind(MapKind::Generator);
            reports.push(check_coxeter_birational(name.as_str(), &gens, &builtin, Pairs::All, Mode::Symbolic));
        }
        let autos = cat.of_kind(MapKind::Automorphism);
        let expected = match name {
            SystemName::E6 => 3,
            SystemName::E7 => 1,
            _ => 0,
        };
        if autos.len() != expected {
            failed.push(format!("{name}: {} automorphisms", autos.len()));
        }
        for pi in autos {
            match check_automorphism(name.as_str(), pi, &actions, &builtin) {
                Ok(r) => reports.push(r),
                Err(e) => failed.push(format!("{name} {}: {e}", pi.name)),
            }
        }
    }
    failed.extend(failures(&reports));
    verdict(7, "diagrams, parameter Coxeter relations, e6 birational pairs, automorphisms", failed);
}

#[test]
fn criterion_08_lattice() {
    let mut failed = Vec::new();
    for name in [SystemName::E6, SystemName::E7, SystemName::E8] {
        let path = data_dir().join("geometry").join(format!("{}.seq", name.as_str()));
        let seq = Sequence::parse(&std::fs::read_to_string(&path).unwrap(), &path.display().to_string()).unwrap();
        match seq.run(name.as_str(), "D") {
            Ok((state, reports)) => {
                failed.extend(failures(&reports));
                if !reports.iter().any(|r| r.target == "K^2 = 0") {
                    failed.push(format!("{name}: no K^2 expectation"));
                }
                let k = state.canonical();
                if k.square() != 0 {
                    failed.push(format!("{name}: K^2 = {}", k.square()));
                }
            }
            Err(e) => failed.push(format!("{name}: {e}")),
        }
    }
    verdict(8, "intersection numbers, canonical classes and K^2 = 0", failed);
}

#[test]
fn criterion_09_accessible_points() {
    let mut reports = Vec::new();
    let mut failed = Vec::new();
    for (name, level1) in [(SystemName::E6, 6), (SystemName::E7, 7), (SystemName::E8, 8)] {
        let (sys, cat) = system(name);
        let points = PointList::load(&data_dir(), &sys).unwrap();
        if points.at_level(0).len() != 3 || points.at_level(1).len() != level1 {
            failed.push(format!("{name}: point counts {} / {}", points.at_level(0).len(), points.at_level(1).len()));
        }
        reports.push(verify_accessible_points(&sys, &points, 0));
        reports.push(verify_accessible_points(&sys, &points, 1));
        for j in 1..=chain_count(&points) {
            match verify_chart_composition(&sys, &points, &cat, j) {
                Ok(r) => reports.push(r),
                Err(e) => failed.push(format!("{name} r{j}: {e}")),
            }
        }
    }
    failed.extend(failures(&reports));
    verdict(9, "accessible points at levels 0 and 1, chart compositions", failed);
}

#[test]
fn criterion_10_first_integrals() {
    let reports: Vec<_> = [SystemName::E6, SystemName::E7, SystemName::E8]
        .into_iter()
        .map(|n| check_first_integral(&load_accepted(&data_dir(), n).unwrap()))
        .collect();
    verdict(10, "first integrals e6, e7, e8 symbolic", failures(&reports));
}

#[test]
fn criterion_11_numeric() {
    let (sys, cat) = system(SystemName::E6);
    let mut failed = Vec::new();
    let zero = vec![0.0; sys.alpha_count()];
    let config = IntegratorConfig::rk45(CONSERVATION_TOL);
    match integrate(&sys, Some(&cat), CONSERVATION_START, &zero, CONSERVATION_SPAN, config) {
        Ok(tr) => {
            if tr.samples[0].invariant != 4.0 {
                failed.push(format!("initial invariant {}", tr.samples[0].invariant));
            }
            let drift = conservation_report(&tr);
            if drift > CONSERVATION_DRIFT {
                failed.push(format!("drift {drift:e} > {CONSERVATION_DRIFT:e}"));
            }
        }
        Err(e) => failed.push(format!("conservation at alpha = 0 on [0, 1]: {e}")),
    }
    let mut s = Sampler::with_range(BACKLUND_SEED, 30);
    let mut a = s.alphas(sys.relation());
    for x in a.iter_mut() {
        *x = x.clone() / int(100);
    }
    sys.relation().project(&mut a);
    let alpha: Vec<f64> = a.iter().map(to_f64).collect();
    let mut bconfig = IntegratorConfig::rk45(BACKLUND_TOL);
    bconfig.chart_switch_threshold = BACKLUND_THRESHOLD;
    let s2 = cat.get("s2").unwrap();
    match backlund_numeric_check(&sys, Some(&cat), s2, CONSERVATION_START, &alpha, BACKLUND_SPAN, bconfig) {
        Ok(r) => failed.extend(failures(&[r])),
        Err(e) => failed.push(format!("backlund s2: {e}")),
    }
    verdict(11, "e6 conservation drift and backlund (e6, s2)", failed);
}

fn random_monomial(vars: &std::sync::Arc<weylpain::exactpoly::VarTable>, rng: &mut impl Rng, max: u16) -> Poly {
    let (a, b) = loop {
        let a = rng.gen_range(0..=max);
        let b = rng.gen_range(0..=max);
        if a + b >= 1 && a + b <= max {
            break (a, b);
        }
    };
    let k = rng.gen_range(0..=1);
    let c = loop {
        let c = rng.gen_range(-5i64..=5);
        if c != 0 {
            break c;
        }
    };
    Poly::monomial(vars, Monomial::from_exps(&[a, b, k]), int(c))
}

fn detected(reports: &[CheckReport]) -> bool {
    reports.iter().any(|r| !r.passed() && !r.residuals.is_empty())
}

#[test]
fn criterion_12_mutation_sensitivity() {
    let mode = Mode::Probabilistic { samples: MUTATION_SAMPLES, seed: MUTATION_SEED };
    let mut sampler = Sampler::new(MUTATION_SEED);
    let mut failed = Vec::new();
    let mut total = 0;
    let (pvi_g, pvi_cat) = system(SystemName::PviG);
    for name in SystemName::ALL {
        let (sys, cat) = system(name);
        let max = sys.qp_degree().min(4) as u16;
        for k in 0..MUTATIONS_H {
            let m = random_monomial(sys.vars(), sampler.rng(), max);
            let h = sys.hamiltonian().checked_add(&RationalFunction::from(m.clone())).unwrap();
            let mutant = sys.with_hamiltonian(h, "mutant").unwrap();
            let reports = if name == SystemName::PviHvi {
                pvi_cat
                    .of_kind(MapKind::Equivalence)
                    .into_iter()
                    .map(|phi| check_equivalence_pvi(&pvi_g, &mutant, phi, mode))
                    .collect()
            } else {
                let mut r = symmetry(&mutant, &cat, mode);
                if !detected(&r) {
                    r.extend(holomorphy(&mutant, &cat, mode));
                }
                r
            };
            total += 1;
            if !detected(&reports) {
                failed.push(format!("{name} H mutation {k} (+{m:?}) undetected"));
            }
        }
        let gens = cat.of_kind(MapKind::Generator);
        if gens.is_empty() {
            continue;
        }
        for k in 0..MUTATIONS_GEN {
            let rng = sampler.rng();
            let mut g = gens[rng.gen_range(0..gens.len())].clone();
            let (a, b) = (rng.gen_range(0..=2u16), rng.gen_range(0..=2u16));
            let c = [-3i64, -2, -1, 1, 2, 3][rng.gen_range(0..6)];
            let extra = RationalFunction::from(Poly::monomial(sys.vars(), Monomial::from_exps(&[a, b]), int(c)));
            if rng.gen_bool(0.5) {
                g.q = g.q.checked_add(&extra).unwrap();
            } else {
                g.p = g.p.checked_add(&extra).unwrap();
            }
            g.inverse = None;
            total += 1;
            let r = check_symmetry(&sys, &g, mode);
            if r.passed() || r.residuals.is_empty() {
                failed.push(format!("{name} generator mutation {k} of {} undetected", g.name));
            }
        }
    }
    verdict(12, &format!("{total} mutations detected with nonzero residuals"), failed);
}
