use std::rc::Rc;

use mvcml_core::algebra::{BuiltinKind, ResiduatedLattice, TruthValue};
use mvcml_core::functor::{Budget, FunctorKind, Shape};
use mvcml_core::report::Status;
use mvcml_core::semantics::{
    check_lemma1, check_stage_coherence, check_truth_lemma, check_truth_lemma_with, eval_model, eval_step,
    model_consequence, sigma_k, sigma_structural, step_consequence, Iota0, Logic, StageValue, TModel, Tower,
};
use mvcml_core::Error;

fn logic(kind: FunctorKind, lat: ResiduatedLattice, props: &[&str]) -> Logic {
    Logic::new(lat, kind, props.iter().map(|p| p.to_string()).collect(), Budget::default()).unwrap()
}

fn boolean() -> ResiduatedLattice {
    ResiduatedLattice::builtin(BuiltinKind::Boolean, 2).unwrap()
}

fn l3() -> ResiduatedLattice {
    ResiduatedLattice::builtin(BuiltinKind::Lukasiewicz, 3).unwrap()
}

#[test]
fn stage_sizes_powerset_boolean() {
    let lg = logic(FunctorKind::Powerset, boolean(), &["p"]);
    let t = Tower::build(&lg, 2, Iota0::Canonical).unwrap();
    assert_eq!([t.size(0), t.size(1), t.size(2)], [2, 8, 512]);
    match Tower::build(&lg, 3, Iota0::Canonical) {
        Err(Error::Budget { what, cardinality, .. }) => {
            assert_eq!(what, "stage 3");
            assert_eq!(cardinality, "2·2^512");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn lemma1_powerset() {
    let lg = logic(FunctorKind::Powerset, boolean(), &["p"]);
    let t = Tower::build(&lg, 2, Iota0::Canonical).unwrap();
    for n in 0..=2 {
        let r = check_lemma1(&t, n).unwrap();
        assert!(r.passed(), "{r}");
    }
}

#[test]
fn lemma1_other_functors() {
    for kind in [FunctorKind::FuzzyHom, FunctorKind::Neighborhood, FunctorKind::Distribution { q: 2 }, FunctorKind::Selection] {
        let lg = logic(kind, boolean(), &["p"]);
        let t = Tower::build(&lg, 1, Iota0::Canonical).unwrap();
        for n in 0..=1 {
            let r = check_lemma1(&t, n).unwrap();
            assert!(r.passed(), "{kind}: {r}");
        }
    }
}

#[test]
fn step_examples() {
    let lg = logic(FunctorKind::Powerset, boolean(), &["p"]);
    let t = Tower::build(&lg, 1, Iota0::Canonical).unwrap();
    let bp = lg.parse("box(p)").unwrap();
    let c = step_consequence(&t, 1, &[], &bp).unwrap();
    assert!(!c.holds);
    let w = c.witness.unwrap();
    assert!(t.describe(1, w).contains("p=0"), "{}", t.describe(1, w));
    assert!(step_consequence(&t, 1, &[bp.clone()], &bp).unwrap().holds);
    assert!(step_consequence(&t, 0, &[], &lg.parse("p -> p").unwrap()).unwrap().holds);
    assert!(matches!(eval_step(&t, 0, &bp), Err(Error::Stratum { .. })));
    let r = check_stage_coherence(&t, &lg.parse("p /\\ box(p)").unwrap(), 1).unwrap();
    assert!(r.passed());
}

#[test]
fn model_examples() {
    let lg = logic(FunctorKind::Powerset, l3(), &["p", "q"]);
    let m = TModel::from_json(&lg, r#"{"states": 2, "valuation": [[2, 1], [1, 0]], "sigma": [[], [0, 1]]}"#).unwrap();
    let v = eval_model(&lg, &m, &lg.parse("box(p)").unwrap()).unwrap();
    assert_eq!(v.values(), &[TruthValue(2), TruthValue(1)]);
    let c = model_consequence(&lg, &m, &[lg.parse("p").unwrap()], &lg.parse("q").unwrap()).unwrap();
    assert_eq!(c.witness, Some(0));
    let back = TModel::from_json(&lg, &m.to_json(&lg).to_string()).unwrap();
    assert_eq!(back, m);
}

#[test]
fn sigma_singleton_loop() {
    let lg = logic(FunctorKind::Powerset, boolean(), &["p"]);
    let t = Tower::build(&lg, 2, Iota0::Canonical).unwrap();
    let m = TModel::from_json(&lg, r#"{"states": 1, "valuation": [[1]], "sigma": [[0]]}"#).unwrap();
    let s1 = sigma_k(&t, &m, 1).unwrap();
    assert_eq!(t.describe(1, s1[0]), "(p=1, {(p=1, •)})");
    let st = sigma_structural(&lg, &m, 1).unwrap();
    assert_eq!(*st[0], StageValue::Node(1, Shape::Subset(vec![Rc::new(StageValue::Base(1))])));
}

#[test]
fn truth_lemma_and_fault() {
    let lg = logic(FunctorKind::Powerset, boolean(), &["p"]);
    let t = Tower::build(&lg, 2, Iota0::Canonical).unwrap();
    let m = TModel::from_json(&lg, r#"{"states": 2, "valuation": [[1], [0]], "sigma": [[1], [0, 1]]}"#).unwrap();
    let phi = lg.parse("box(dia(p))").unwrap();
    let r = check_truth_lemma(&lg, &m, &phi, Some(&t)).unwrap();
    assert!(r.passed(), "{r}");
    assert_eq!(r.checks[1].status, Status::Pass);

    let mut sigma = sigma_structural(&lg, &m, 2).unwrap();
    sigma.swap(0, 1);
    let r = check_truth_lemma_with(&lg, &m, &phi, &sigma, None).unwrap();
    assert_eq!(r.status(), Status::Fail);
    assert!(r.checks[0].witness.is_some());
}

#[test]
fn stage_model_agrees() {
    let lg = logic(FunctorKind::Neighborhood, boolean(), &["p"]);
    let t = Tower::build(&lg, 1, Iota0::Canonical).unwrap();
    let m = t.stage_model(1).unwrap();
    let phi = lg.parse("box(p) -> p").unwrap();
    assert_eq!(eval_model(&lg, &m, &phi).unwrap(), eval_step(&t, 1, &phi).unwrap());
}
