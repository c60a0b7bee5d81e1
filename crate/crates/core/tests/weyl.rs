mod common;

use common::data_dir;
use weylpain::exactpoly::int;
use weylpain::report::Mode;
use weylpain::systems::{load_accepted, SystemName};
use weylpain::transforms::{load_catalog, BirationalMap, Catalog, MapKind, ParamMap};
use weylpain::weyl::{
    check_automorphism, check_coxeter_birational, check_coxeter_param, check_involutions, cycles,
    infer_diagram, DynkinDiagram, Pairs, ParameterAction,
};
use weylpain::Error;

fn catalog(name: SystemName) -> Catalog {
    load_catalog(&data_dir(), name).unwrap()
}

fn edges(d: &DynkinDiagram) -> Vec<(usize, usize)> {
    d.edges().iter().copied().collect()
}

#[test]
fn e6_diagram_from_the_listing() {
    let d = infer_diagram(&ParameterAction::from_catalog(&catalog(SystemName::E6))).unwrap();
    assert_eq!(edges(&d), vec![(0, 2), (0, 4), (0, 5), (1, 2), (3, 4), (5, 6)]);
}

#[test]
fn inferred_diagrams_equal_the_builtins() {
    for name in [SystemName::E6, SystemName::E7, SystemName::E8] {
        let d = infer_diagram(&ParameterAction::from_catalog(&catalog(name))).unwrap();
        assert_eq!(Some(d), DynkinDiagram::builtin(name), "{name}");
    }
    let e8 = DynkinDiagram::builtin(SystemName::E8).unwrap();
    assert!(e8.adjacent(0, 8));
    assert_eq!(e8.edges().len(), 8);
}

#[test]
fn identity_action_is_not_a_reflection() {
    let actions = vec![ParameterAction {
        name: "id".into(),
        map: ParamMap::identity(1),
    }];
    assert!(matches!(infer_diagram(&actions), Err(Error::NotReflection(_))));
}

#[test]
fn non_involution_is_rejected() {
    let mut m = ParamMap::identity(1);
    m.matrix[0][0] = int(2);
    let actions = vec![ParameterAction {
        name: "x".into(),
        map: m,
    }];
    assert!(matches!(infer_diagram(&actions), Err(Error::NotInvolution(_))));
}

#[test]
fn one_sided_adjacency_is_inconsistent() {
    let mut actions = ParameterAction::from_catalog(&catalog(SystemName::E6));
    actions[3].map.matrix[4][3] = int(0);
    assert!(matches!(infer_diagram(&actions), Err(Error::InconsistentAdjacency(3, 4))));
}

#[test]
fn param_coxeter_relations_hold() {
    for name in [SystemName::E6, SystemName::E7, SystemName::E8] {
        let actions = ParameterAction::from_catalog(&catalog(name));
        let d = DynkinDiagram::builtin(name).unwrap();
        let r = check_coxeter_param(name.as_str(), &actions, &d);
        assert!(r.passed(), "{name}: {:?}", r.residual_excerpt(200));
    }
}

#[test]
fn s1_s3_commute_and_a_wrong_diagram_is_caught() {
    let actions = ParameterAction::from_catalog(&catalog(SystemName::E6));
    let s13 = actions[1].map.compose(&actions[3].map);
    assert!(s13.compose(&s13).is_identity());
    let wrong = DynkinDiagram::new(7, [(0, 2), (0, 4), (0, 5), (1, 2), (3, 4), (5, 6), (1, 3)]);
    let r = check_coxeter_param("e6", &actions, &wrong);
    assert!(!r.passed());
    assert!(r.residuals.iter().any(|x| x.component == "(s1 s3)^3"));
}

#[test]
fn e6_birational_relations_symbolic() {
    let cat = catalog(SystemName::E6);
    let gens = cat.of_kind(MapKind::Generator);
    let d = DynkinDiagram::builtin(SystemName::E6).unwrap();
    let s12 = gens[1].compose(gens[2]).unwrap();
    let cube = s12.compose(&s12).unwrap().compose(&s12).unwrap();
    assert!(cube.is_identity());
    let r = check_coxeter_birational("e6", &gens, &d, Pairs::All, Mode::Symbolic);
    assert!(r.passed(), "{:?}", r.residual_excerpt(200));
}

#[test]
fn e7_adjacent_birational_relations_symbolic() {
    let cat = catalog(SystemName::E7);
    let gens = cat.of_kind(MapKind::Generator);
    let d = DynkinDiagram::builtin(SystemName::E7).unwrap();
    let r = check_coxeter_birational("e7", &gens, &d, Pairs::Adjacent, Mode::Symbolic);
    assert!(r.passed(), "{:?}", r.residual_excerpt(200));
}

#[test]
fn e8_birational_relations_probabilistic() {
    let cat = catalog(SystemName::E8);
    let gens = cat.of_kind(MapKind::Generator);
    let d = DynkinDiagram::builtin(SystemName::E8).unwrap();
    let mode = Mode::Probabilistic { samples: 8, seed: 3 };
    let r = check_coxeter_birational("e8", &gens, &d, Pairs::All, mode);
    assert!(r.passed(), "{:?}", r.residual_excerpt(200));
}

#[test]
fn wrong_order_fails_birationally() {
    let cat = catalog(SystemName::E6);
    let gens = cat.of_kind(MapKind::Generator);
    let wrong = DynkinDiagram::new(7, [(0, 2), (0, 4), (0, 5), (1, 2), (3, 4), (5, 6), (1, 3)]);
    let mode = Mode::Probabilistic { samples: 4, seed: 9 };
    let r = check_coxeter_birational("e6", &gens, &wrong, Pairs::Adjacent, mode);
    assert!(!r.passed());
}

#[test]
fn automorphisms_permute_the_diagram() {
    let cat = catalog(SystemName::E6);
    let actions = ParameterAction::from_catalog(&cat);
    let d = DynkinDiagram::builtin(SystemName::E6).unwrap();
    let pi2 = cat.get("pi2").unwrap();
    assert_eq!(cycles(&pi2.params.as_permutation().unwrap()), "(1 6)(2 5)");
    for m in cat.of_kind(MapKind::Automorphism) {
        let r = check_automorphism("e6", m, &actions, &d).unwrap();
        assert!(r.passed(), "{}: {:?}", m.name, r.residual_excerpt(200));
    }
    let e7 = catalog(SystemName::E7);
    let pi = e7.get("pi").unwrap();
    assert_eq!(cycles(&pi.params.as_permutation().unwrap()), "(1 4)(2 5)(3 6)");
    let r = check_automorphism(
        "e7",
        pi,
        &ParameterAction::from_catalog(&e7),
        &DynkinDiagram::builtin(SystemName::E7).unwrap(),
    )
    .unwrap();
    assert!(r.passed());
}

#[test]
fn identity_is_a_trivial_automorphism() {
    let sys = load_accepted(&data_dir(), SystemName::E6).unwrap();
    let cat = catalog(SystemName::E6);
    let id = BirationalMap::identity(sys.vars(), sys.relation());
    let d = DynkinDiagram::builtin(SystemName::E6).unwrap();
    let r = check_automorphism("e6", &id, &ParameterAction::from_catalog(&cat), &d).unwrap();
    assert!(r.passed());
    assert_eq!(cycles(&id.params.as_permutation().unwrap()), "()");
}

#[test]
fn reflection_is_not_a_permutation() {
    let cat = catalog(SystemName::E6);
    let d = DynkinDiagram::builtin(SystemName::E6).unwrap();
    let r = check_automorphism("e6", cat.get("s0").unwrap(), &ParameterAction::from_catalog(&cat), &d);
    assert!(matches!(r, Err(Error::NotAPermutation(_))));
}

#[test]
fn pvi_generators_are_involutions() {
    let actions = ParameterAction::from_catalog(&catalog(SystemName::PviG));
    assert_eq!(actions.len(), 5);
    assert!(check_involutions("pvi_g", &actions).passed());
}

#[test]
fn dot_lists_every_edge() {
    let d = DynkinDiagram::builtin(SystemName::E6).unwrap();
    let dot = d.to_dot("E6");
    assert!(dot.starts_with("graph E6 {"));
    assert_eq!(dot.matches(" -- ").count(), 6);
}
