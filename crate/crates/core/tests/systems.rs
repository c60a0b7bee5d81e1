mod common;

use common::data_dir;
use weylpain::exactpoly::{int, parse_rational_function, Poly, RationalFunction, P, Q, T};
use weylpain::systems::{
    check_first_integral, first_integral_residual, load_accepted, load_relation, load_system,
    repair_hamiltonian, variants, Ansatz, Constraint, FirstIntegral, ParameterRelation, SolutionSpace,
    SystemName,
};
use weylpain::transforms::{load_catalog, HolomorphyConstraint, SymmetryConstraint};
use weylpain::Error;

#[test]
fn declared_degrees() {
    for (name, d) in [(SystemName::E6, 7), (SystemName::E7, 10), (SystemName::E8, 15)] {
        let sys = load_accepted(&data_dir(), name).unwrap();
        assert_eq!(sys.qp_degree(), d, "{name}");
        assert_eq!(sys.alpha_count(), name.alpha_count());
    }
}

#[test]
fn wrong_degree_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let sys_dir = dir.path().join("systems/e6");
    std::fs::create_dir_all(&sys_dir).unwrap();
    std::fs::copy(data_dir().join("systems/e6/relation.txt"), sys_dir.join("relation.txt")).unwrap();
    std::fs::write(sys_dir.join("short.poly"), "q^2*p + a0*q\n").unwrap();
    assert!(matches!(
        load_system(dir.path(), SystemName::E6, "short"),
        Err(Error::DegreeMismatch { expected: 7, actual: 3, .. })
    ));
    assert!(matches!(
        load_system(dir.path(), SystemName::E6, "absent"),
        Err(Error::MissingFile(_))
    ));
}

#[test]
fn names_and_relations() {
    for n in SystemName::ALL {
        assert_eq!(n.as_str().parse::<SystemName>().unwrap(), n);
        assert_eq!(load_relation(&data_dir(), n).unwrap().coeffs().len(), n.alpha_count());
    }
    assert!(matches!("e9".parse::<SystemName>(), Err(Error::UnknownSystem(_))));
    let r = ParameterRelation::parse("1 1 2 1 1 = 1\n", "x").unwrap();
    assert_eq!((r.coeffs(), r.constant()), (&[1, 1, 2, 1, 1][..], 1));
    assert!(matches!(ParameterRelation::new(vec![1, 0], 0), Err(Error::ZeroRelationCoefficient)));
    let mut v = vec![int(1), int(2), int(0), int(4), int(9)];
    r.project(&mut v);
    assert!(r.holds(&v));
}

#[test]
fn e6_variants_shipped() {
    let v = variants(&data_dir(), SystemName::E6).unwrap();
    assert_eq!(v, ["plus-inserted", "repaired", "verbatim"]);
}

#[test]
fn first_integrals() {
    for name in [SystemName::E6, SystemName::E7, SystemName::E8] {
        let sys = load_accepted(&data_dir(), name).unwrap();
        let r = check_first_integral(&sys);
        assert!(r.passed(), "{name}: {:?}", r.residual_excerpt(200));
    }
}

#[test]
fn explicit_time_dependence_is_the_residual() {
    let sys = load_accepted(&data_dir(), SystemName::E6).unwrap();
    let h = parse_rational_function("q*p*t", sys.vars()).unwrap();
    let res = first_integral_residual(&sys.with_hamiltonian(h, "qpt").unwrap());
    let qp = &Poly::var(sys.vars(), Q) * &Poly::var(sys.vars(), P);
    assert_eq!(res, RationalFunction::from(qp));
    assert!(!check_first_integral(&sys.with_hamiltonian(parse_rational_function("q*p*t", sys.vars()).unwrap(), "x").unwrap()).passed());
    let t_only = parse_rational_function("t^2", sys.vars()).unwrap();
    assert!(first_integral_residual(&sys.with_hamiltonian(t_only, "t").unwrap())
        .num()
        .uses_var(T));
}

#[test]
fn vector_field_of_qp() {
    let sys = load_accepted(&data_dir(), SystemName::E6).unwrap();
    let h = parse_rational_function("q*p", sys.vars()).unwrap();
    let vf = sys.with_hamiltonian(h, "qp").unwrap().vector_field();
    assert_eq!(vf.f, RationalFunction::var(sys.vars(), Q));
    assert_eq!(vf.g, -RationalFunction::var(sys.vars(), P));
}

#[test]
fn hvi_field_has_time_denominator() {
    let sys = load_accepted(&data_dir(), SystemName::PviHvi).unwrap();
    let vf = sys.vector_field();
    let tt = parse_rational_function("t^3*(t-1)^3", sys.vars()).unwrap();
    let (_, rem) = tt.num().div_rem(vf.f.den()).unwrap();
    assert!(rem.is_zero());
    assert!(vf.f.den().uses_var(T));
}

#[test]
fn e6_field_matches_finite_differences() {
    let sys = load_accepted(&data_dir(), SystemName::E6).unwrap();
    let vf = sys.vector_field();
    let mut a: Vec<_> = [1, -2, 3, 1, -1, 2, 0].iter().map(|&x| int(x) / int(7)).collect();
    sys.relation().project(&mut a);
    let point = |q: f64, p: f64| {
        let mut v = vec![q, p, 0.5];
        v.extend(a.iter().map(weylpain::exactpoly::to_f64));
        v
    };
    let h = |q, p| sys.hamiltonian().eval_f64(&point(q, p));
    let step = 1e-6;
    let dp = (h(2.0, 1.0 + step) - h(2.0, 1.0 - step)) / (2.0 * step);
    let dq = (h(2.0 + step, 1.0) - h(2.0 - step, 1.0)) / (2.0 * step);
    let f = vf.f.eval_f64(&point(2.0, 1.0));
    let g = vf.g.eval_f64(&point(2.0, 1.0));
    assert!((f - dp).abs() <= 1e-6 * f.abs().max(1.0), "{f} {dp}");
    assert!((g + dq).abs() <= 1e-6 * g.abs().max(1.0), "{g} {dq}");
}

fn e6_relation() -> ParameterRelation {
    load_relation(&data_dir(), SystemName::E6).unwrap()
}

/// The plus-inserted Hamiltonian with the `q·p` block scaled by `u` and an
/// extra `v·a0²·q·p`.
const BLOCK: &str = "(-3*a0^2 - a2^2 + 2*a0*(a1+2*a2+a3+2*a4) + 3*a0*a5 + 2*a2*a5 + a1*(a5-a2) + (a4+a5)*(a3+a4+a5))*q*p";
const REST: &str = "(q-1)^2*q^2*p^3 - q*(q-1)*((a1+2*a2+a3+2*a4)*q - a1 - 2*a2)*p^2 \
    + (-3*a0^2 - 2*a0*(a1+2*a2+a3+2*a4) - 3*a0*a5 - a5*(a1+2*a2+a3+2*a4+a5))*q^2*p \
    + a2*(a1+a2)*p + a0*(a0+a5)*(a0+a5+a6)*q";

#[test]
fn zero_unknowns_is_unique() {
    let a = Ansatz::parse(SystemName::E6, e6_relation(), &format!("{REST} + {BLOCK}"), &[]).unwrap();
    let s = repair_hamiltonian(&a, &[&FirstIntegral]).unwrap();
    assert_eq!(s, SolutionSpace::Unique(vec![]));
}

#[test]
fn scalar_multiple_of_q_is_free_under_s1() {
    let cat = load_catalog(&data_dir(), SystemName::E6).unwrap();
    let a = Ansatz::parse(SystemName::E6, e6_relation(), "c*q", &["c"]).unwrap();
    let s1 = SymmetryConstraint { map: cat.get("s1").unwrap() };
    assert_eq!(
        repair_hamiltonian(&a, &[&s1]).unwrap(),
        SolutionSpace::Family { particular: vec![int(0)], dimension: 1 }
    );
    let a = Ansatz::parse(SystemName::E6, e6_relation(), "c*a1*q", &["c"]).unwrap();
    assert_eq!(repair_hamiltonian(&a, &[&s1]).unwrap(), SolutionSpace::Unique(vec![int(0)]));
    let a = Ansatz::parse(SystemName::E6, e6_relation(), "a1*q + c*q", &["c"]).unwrap();
    assert_eq!(repair_hamiltonian(&a, &[&s1]).unwrap(), SolutionSpace::Infeasible);
}

#[test]
fn first_integral_alone_leaves_a_family() {
    let a = Ansatz::parse(SystemName::E6, e6_relation(), &format!("{REST} + u*{BLOCK}"), &["u"]).unwrap();
    assert!(matches!(
        repair_hamiltonian(&a, &[&FirstIntegral]).unwrap(),
        SolutionSpace::Family { dimension: 1, .. }
    ));
}

fn holomorphy_r0_to_r6(ansatz: &Ansatz) -> SolutionSpace {
    let cat = load_catalog(&data_dir(), SystemName::E6).unwrap();
    let cons: Vec<HolomorphyConstraint> = (0..=6)
        .map(|i| HolomorphyConstraint { chart: cat.get(&format!("r{i}")).unwrap() })
        .collect();
    let refs: Vec<&dyn Constraint> = cons.iter().map(|c| c as &dyn Constraint).collect();
    repair_hamiltonian(ansatz, &refs).unwrap()
}

#[test]
fn scaling_the_block_alone_is_infeasible() {
    let a = Ansatz::parse(SystemName::E6, e6_relation(), &format!("{REST} + u*{BLOCK}"), &["u"]).unwrap();
    assert_eq!(holomorphy_r0_to_r6(&a), SolutionSpace::Infeasible);
}

#[test]
fn two_unknowns_recover_the_repaired_reading() {
    let text = format!("{REST} + u*{BLOCK} + v*a0^2*q*p");
    let a = Ansatz::parse(SystemName::E6, e6_relation(), &text, &["u", "v"]).unwrap();
    let s = holomorphy_r0_to_r6(&a);
    assert_eq!(s, SolutionSpace::Unique(vec![int(1), int(6)]));
    let fixed = a.instantiate(s.unique_value().unwrap()).unwrap();
    let accepted = load_accepted(&data_dir(), SystemName::E6).unwrap();
    let diff = accepted.relation().reduce_rf(&(fixed.hamiltonian() - accepted.hamiltonian()));
    assert!(diff.is_zero());
}

#[test]
fn nonlinear_ansatz_is_unsupported() {
    let r = Ansatz::parse(SystemName::E6, e6_relation(), "u^2*q + u*v*p", &["u", "v"]);
    assert!(matches!(r, Err(Error::UnsupportedAnsatz(_))));
    let r = Ansatz::parse(SystemName::E6, e6_relation(), "q/u", &["u"]);
    assert!(matches!(r, Err(Error::UnsupportedAnsatz(_))));
}
