use mvcml_core::algebra::{BuiltinKind, ResiduatedLattice, TruthValue};
use mvcml_core::functor::{Budget, FunctorKind};
use mvcml_core::lifting::{BuiltinLifting, PredicateLifting};
use mvcml_core::proofkit::{
    ax_a_counterexample, check_derivation, decide_ax_a, one_step_soundness_report, Consecution, Derivation,
    ModalAxiomSet, SoundnessBounds,
};
use mvcml_core::report::Status;
use mvcml_core::semantics::{Iota0, Logic, Tower};

fn logic(lat: ResiduatedLattice) -> Logic {
    Logic::new(lat, FunctorKind::Powerset, vec!["p".into(), "q".into()], Budget::default()).unwrap()
}

fn l3() -> Logic {
    logic(ResiduatedLattice::builtin(BuiltinKind::Lukasiewicz, 3).unwrap())
}

fn boolean() -> Logic {
    logic(ResiduatedLattice::builtin(BuiltinKind::Boolean, 2).unwrap())
}

fn decide(lg: &Logic, premises: &[&str], conclusion: &str) -> bool {
    let ps: Vec<_> = premises.iter().map(|p| lg.parse(p).unwrap()).collect();
    decide_ax_a(lg, &ps, &lg.parse(conclusion).unwrap()).unwrap()
}

#[test]
fn lukasiewicz3_facts() {
    let lg = l3();
    let facts: &[(&[&str], &str, bool)] = &[
        (&[], "p -> p", true),
        (&[], "p | (p -> 0)", false),
        (&[], "((p -> 0) -> 0) -> p", true),
        (&[], "p /\\ q -> p", true),
        (&[], "p -> p & p", false),
        (&["p", "p -> q"], "q", true),
        (&[], "p & (p -> q) -> q", true),
        (&[], "(p -> q) | (q -> p)", true),
        (&[], "p -> (q -> p)", true),
        (&[], "(p -> (p -> q)) -> (p -> q)", false),
        (&["p"], "p & p", true),
        (&["p & q"], "p /\\ q", true),
        (&[], "0.5 -> 0.5 & 0.5", false),
        (&[], "(0.5 -> 0) <-> 0.5", true),
        (&["p | q"], "p", false),
        (&[], "box(p) -> box(p)", true),
        (&[], "box(p) | (box(p) -> 0)", false),
        (&[], "box(p) -> box(q)", false),
        (&[], "((p -> q) -> q) -> ((q -> p) -> p)", true),
        (&["0.5"], "0", true),
        (&[], "p & (p -> 0) -> 0", true),
        (&[], "p /\\ (p -> 0) -> 0", false),
    ];
    for (premises, conclusion, expected) in facts {
        assert_eq!(decide(&lg, premises, conclusion), *expected, "{premises:?} ⊢ {conclusion}");
    }
}

#[test]
fn excluded_middle_witness() {
    let lg = l3();
    let cx = ax_a_counterexample(&lg, &[], &lg.parse("p | (p -> 0)").unwrap()).unwrap().unwrap();
    assert_eq!(cx, vec![(lg.parse("p").unwrap(), TruthValue(1))]);
    assert_eq!(lg.label(cx[0].1), "0.5");
}

const AXIOMS: &str = r#"[
  {"name": "N", "premises": [], "conclusion": "box(1)"},
  {"name": "M", "premises": ["box(p /\\ q)"], "conclusion": "box(p)"},
  {"name": "C", "premises": ["box(p)", "box(q)"], "conclusion": "box(p /\\ q)"}
]"#;

fn tree(lg: &Logic, axioms: &ModalAxiomSet, json: &str, n: Option<usize>) -> Status {
    let d = Derivation::from_json(lg, json).unwrap();
    check_derivation(lg, axioms, &d, n).unwrap().status()
}

#[test]
fn derivations_accepted() {
    let lg = boolean();
    let ax = ModalAxiomSet::from_json(&lg, AXIOMS).unwrap();
    let good = [
        (r#"{"rule": "axa", "premises": ["p", "p -> q"], "conclusion": "q"}"#, None),
        (r#"{"rule": "axiom", "axiom": "N", "premises": [], "conclusion": "box(1)"}"#, Some(1)),
        (
            r#"{"rule": "axiom", "axiom": "M", "substitution": {"p": "q", "q": "p"},
               "premises": ["box(q /\\ p)"], "conclusion": "box(q)"}"#,
            Some(1),
        ),
        (
            r#"{"rule": "lift", "modality": "box", "premises": ["box(p)", "box(p -> q)"], "conclusion": "box(q)",
               "child": {"rule": "axa", "premises": ["p", "p -> q"], "conclusion": "q"}}"#,
            Some(1),
        ),
        (
            r#"{"rule": "lift", "modality": "box", "premises": ["box(box(p /\\ q))"], "conclusion": "box(box(p))",
               "child": {"rule": "axiom", "axiom": "M", "premises": ["box(p /\\ q)"], "conclusion": "box(p)"}}"#,
            Some(2),
        ),
    ];
    for (json, n) in good {
        assert_eq!(tree(&lg, &ax, json, n), Status::Pass, "{json}");
    }
}

#[test]
fn derivations_rejected() {
    let lg = boolean();
    let ax = ModalAxiomSet::from_json(&lg, AXIOMS).unwrap();
    let bad = [
        // conclusion does not match the axiom instance
        (r#"{"rule": "axiom", "axiom": "M", "premises": ["box(p /\\ q)"], "conclusion": "box(q)"}"#, None, "rule-shape"),
        // lift to a different modality
        (
            r#"{"rule": "lift", "modality": "box", "premises": ["box(p)"], "conclusion": "dia(p)",
               "child": {"rule": "axa", "premises": ["p"], "conclusion": "p"}}"#,
            None,
            "rule-shape",
        ),
        (
            r#"{"rule": "lift", "modality": "box", "premises": ["box(p)"], "conclusion": "box(p)",
               "child": {"rule": "axa", "premises": ["p"], "conclusion": "p"}}"#,
            Some(0),
            "stratum",
        ),
        (
            r#"{"rule": "axiom", "axiom": "M", "substitution": {"p": "box(q)"},
               "premises": ["box(box(q) /\\ q)"], "conclusion": "box(box(q))"}"#,
            Some(1),
            "stratum",
        ),
        (
            r#"{"rule": "lift", "modality": "box", "premises": ["box(box(p /\\ q))"], "conclusion": "box(box(p))",
               "child": {"rule": "axiom", "axiom": "M", "premises": ["box(p /\\ q)"], "conclusion": "box(p)"}}"#,
            Some(1),
            "stratum",
        ),
    ];
    for (json, n, kind) in bad {
        let d = Derivation::from_json(&lg, json).unwrap();
        let r = check_derivation(&lg, &ax, &d, n).unwrap();
        assert_eq!(r.status(), Status::Fail, "{json}");
        let w = r.first_failure().unwrap().witness.clone().unwrap();
        assert!(w.contains(kind), "{w}");
    }
}

#[test]
fn axiom_file_rejects_rank_two() {
    let lg = boolean();
    let r = ModalAxiomSet::from_json(&lg, r#"[{"name": "T", "premises": [], "conclusion": "box(box(p))"}]"#);
    assert!(r.is_err());
}

#[test]
fn one_step_soundness() {
    let lg = boolean();
    let tower = Tower::build(&lg, 1, Iota0::Canonical).unwrap();
    let bx = BuiltinLifting::PowersetBox;
    let ls: [&dyn PredicateLifting; 1] = [&bx];
    let bounds = SoundnessBounds::default();

    let good = ModalAxiomSet::new([("N".to_string(), Consecution::new([], lg.parse("box(1)").unwrap()))]).unwrap();
    let r = one_step_soundness_report(&tower, &good, &ls, 1, &bounds).unwrap();
    assert!(r.passed(), "{r}");

    let bad = ModalAxiomSet::new([("F".to_string(), Consecution::new([], lg.parse("box(0)").unwrap()))]).unwrap();
    let r = one_step_soundness_report(&tower, &bad, &ls, 1, &bounds).unwrap();
    assert_eq!(r.status(), Status::Fail);
    let w = r.first_failure().unwrap().witness.clone().unwrap();
    assert!(w.starts_with("refuted by"), "{w}");
}

#[test]
fn monotonicity_axiom_sound() {
    let lg = boolean();
    let tower = Tower::build(&lg, 1, Iota0::Canonical).unwrap();
    let ax = ModalAxiomSet::from_json(&lg, AXIOMS).unwrap();
    let bx = BuiltinLifting::PowersetBox;
    let r = one_step_soundness_report(&tower, &ax, &[&bx], 1, &SoundnessBounds::default()).unwrap();
    assert!(r.passed(), "{r}");
    let t = ModalAxiomSet::from_json(&lg, r#"[{"name": "T", "premises": ["box(p)"], "conclusion": "p"}]"#).unwrap();
    let r = one_step_soundness_report(&tower, &t, &[&bx], 1, &SoundnessBounds::default()).unwrap();
    assert_eq!(r.status(), Status::Fail, "{r}");
}
