//! Acceptance criteria 1 to 10, one line each. Runs without the libtest
//! harness so the lines always reach the output.

mod common;

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::rc::Rc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use common::*;
use mvcml_core::algebra::{BuiltinKind, ResiduatedLattice, TruthValue};
use mvcml_core::decision::Decider;
use mvcml_core::functor::{Budget, FunctorKind, Shape};
use mvcml_core::lifting::{check_naturality, BuiltinLifting, NaturalityOptions, PredicateLifting};
use mvcml_core::proofkit::{
    check_derivation, decide_ax_a, one_step_soundness_report, Derivation, ModalAxiomSet, SoundnessBounds,
};
use mvcml_core::report::Status;
use mvcml_core::semantics::{
    check_lemma1, check_truth_lemma, eval_model, model_consequence, Iota0, Logic, TModel, Tower,
};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn lat(kind: BuiltinKind, k: usize) -> ResiduatedLattice {
    ResiduatedLattice::builtin(kind, k).unwrap()
}

fn boolean() -> ResiduatedLattice {
    lat(BuiltinKind::Boolean, 2)
}

fn logic(l: ResiduatedLattice, kind: FunctorKind, props: &[&str]) -> Logic {
    Logic::new(l, kind, props.iter().map(|p| p.to_string()).collect(), Budget::default()).unwrap()
}

fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(Path::new(FIXTURES).join(name)).unwrap()
}

struct PoolEntry {
    formula: String,
    valid: bool,
    satisfiable: bool,
}

fn pool() -> Vec<PoolEntry> {
    let v: Vec<Value> = serde_json::from_str(&std::fs::read_to_string(POOL).unwrap()).unwrap();
    v.iter()
        .map(|e| PoolEntry {
            formula: e["formula"].as_str().unwrap().to_string(),
            valid: e["valid"].as_bool().unwrap(),
            satisfiable: e["satisfiable"].as_bool().unwrap(),
        })
        .collect()
}

fn pool_decider() -> Decider {
    Decider::new(logic(boolean(), FunctorKind::Powerset, &["p", "q"]), Iota0::Canonical, None)
}

// ---------------------------------------------------------------- 1

fn criterion_1() -> Outcome {
    let start = Instant::now();
    for (kind, k) in [
        (BuiltinKind::Boolean, 2),
        (BuiltinKind::Lukasiewicz, 3),
        (BuiltinKind::Lukasiewicz, 4),
        (BuiltinKind::Goedel, 3),
        (BuiltinKind::Goedel, 4),
    ] {
        let l = lat(kind, k);
        let v = l.validate();
        ensure!(v.is_valid(), "{} rejected: {}", l.name(), v.summary(&l));
        ensure!(raw_is_residuated_lattice(&l.to_file()), "oracle rejects {}", l.name());
    }

    // (base, edits (table, row, col, value), clause the fault must break)
    type Edit = (&'static str, usize, usize, usize);
    let l3 = (BuiltinKind::Lukasiewicz, 3);
    let l4 = (BuiltinKind::Lukasiewicz, 4);
    let faults: [((BuiltinKind, usize), &[Edit], &str); 10] = [
        (l3, &[("join", 0, 1, 0)], "join commutative"),
        (l3, &[("meet", 2, 1, 2)], "meet commutative"),
        (l3, &[("mono", 1, 2, 2), ("mono", 2, 1, 2)], "top is the monoid unit"),
        (l3, &[("mono", 1, 1, 1)], "residuation"),
        (l3, &[("imp", 2, 0, 1)], "residuation"),
        (l3, &[("join", 1, 1, 2)], "join idempotent"),
        (l3, &[("meet", 1, 1, 0)], "meet idempotent"),
        (l3, &[("join", 0, 2, 1), ("join", 2, 0, 1)], "bot is least"),
        (l3, &[("meet", 1, 2, 0), ("meet", 2, 1, 0)], "top is greatest (integrality)"),
        (l4, &[("mono", 1, 2, 1), ("mono", 2, 1, 1)], "monoid associative"),
    ];
    for (i, ((kind, k), edits, clause)) in faults.iter().enumerate() {
        let mut file = lat(*kind, *k).to_file();
        for (table, r, c, v) in edits.iter() {
            let t = match *table {
                "join" => &mut file.join,
                "meet" => &mut file.meet,
                "mono" => &mut file.mono,
                _ => &mut file.imp,
            };
            t[*r][*c] = *v;
        }
        ensure!(!raw_is_residuated_lattice(&file), "fault {i}: oracle finds no violation");
        let l = ResiduatedLattice::from_file(file.clone()).map_err(|e| e.to_string())?;
        let v = l.validate();
        ensure!(!v.is_valid(), "fault {i} accepted");
        ensure!(
            v.violations.iter().any(|x| x.axiom.name() == *clause),
            "fault {i}: expected `{clause}`, got {}",
            v.summary(&l)
        );
        for x in &v.violations {
            let w: Vec<usize> = x.witness.iter().map(|t| t.index()).collect();
            ensure!(
                !raw_clause_holds(&file, x.axiom.name(), &w),
                "fault {i}: witness {w:?} for `{}` does not violate it",
                x.axiom.name()
            );
        }
    }
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(1), "took {took:?}");
    Ok("5 built-ins valid, 10 faults caught with confirmed witnesses".into())
}

// ---------------------------------------------------------------- 2

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let kinds = [
        FunctorKind::Powerset,
        FunctorKind::FuzzyHom,
        FunctorKind::Neighborhood,
        FunctorKind::Distribution { q: 2 },
    ];
    let algebras = [boolean(), lat(BuiltinKind::Lukasiewicz, 3), lat(BuiltinKind::Goedel, 3)];
    let prop_sets: [&[&str]; 2] = [&["p"], &["p", "q"]];
    let mut enumerated = 0;
    for (ki, kind) in kinds.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(200 + ki as u64);
        let mut logics: HashMap<(usize, usize), Logic> = HashMap::new();
        let mut towers: HashMap<(usize, usize, usize), Option<Rc<Tower>>> = HashMap::new();
        for case in 0..500 {
            let (ai, pi) = (rng.gen_range(0..algebras.len()), rng.gen_range(0..prop_sets.len()));
            let lg = logics
                .entry((ai, pi))
                .or_insert_with(|| logic(algebras[ai].clone(), *kind, prop_sets[pi]));
            let mods: Vec<(String, usize)> = BuiltinLifting::shipped(*kind, lg.lattice())
                .iter()
                .map(|l| (l.name(), l.arity()))
                .collect();
            let n = rng.gen_range(1..=3);
            let model = random_model(&mut rng, lg, n);
            let props = lg.props().to_vec();
            let phi = random_formula(&mut rng, lg.lattice(), &props, &mods, 4, 2);
            let tower = towers
                .entry((ai, pi, phi.rank()))
                .or_insert_with(|| Tower::build(lg, phi.rank(), Iota0::Canonical).ok().map(Rc::new));
            let r = check_truth_lemma(lg, &model, &phi, tower.as_deref()).map_err(|e| e.to_string())?;
            if r.check("model against enumerated stage").map(|c| c.status) == Some(Status::Pass) {
                enumerated += 1;
            }
            ensure!(
                r.passed(),
                "{kind} case {case}: {} on {}\n{r}",
                lg.print(&phi),
                model.describe(lg)
            );
        }
    }
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(60), "took {took:?}");
    Ok(format!(
        "2000 pairs agree pointwise ({enumerated} also against an enumerated stage) in {:.1}s",
        took.as_secs_f64()
    ))
}

// ---------------------------------------------------------------- 3

fn criterion_3() -> Outcome {
    let lg = logic(boolean(), FunctorKind::Powerset, &["p"]);
    let t = Tower::build(&lg, 2, Iota0::Canonical).map_err(|e| e.to_string())?;
    let sizes = [t.size(0), t.size(1), t.size(2)];
    ensure!(sizes == [2, 8, 512], "stage sizes {sizes:?}");
    let mut checks = 0;
    for n in 0..=2 {
        let r = check_lemma1(&t, n).map_err(|e| e.to_string())?;
        ensure!(r.passed(), "{r}");
        checks += r.checks.len();
    }
    Ok(format!("stage sizes 2, 8, 512; {checks} checks pass for n <= 2"))
}

// ---------------------------------------------------------------- 4

fn criterion_4() -> Outcome {
    let d = pool_decider();
    let entries = pool();
    let mut valid = 0;
    for e in &entries {
        let phi = d.logic().parse(&e.formula).map_err(|x| x.to_string())?;
        let got = d.validity(&phi).map_err(|x| x.to_string())?.answer;
        ensure!(got == e.valid, "{}: decided {got}, oracle {}", e.formula, e.valid);
        valid += got as usize;
    }
    Ok(format!("{} formulas agree with the |S| <= 8 oracle ({valid} valid)", entries.len()))
}

// ---------------------------------------------------------------- 5

fn criterion_5() -> Outcome {
    let d = pool_decider();
    let lg = d.logic();
    let mut models: HashMap<usize, TModel> = HashMap::new();
    let entries = pool();
    for e in &entries {
        let phi = lg.parse(&e.formula).map_err(|x| x.to_string())?;
        let n = phi.rank();
        if !models.contains_key(&n) {
            let t = d.tower(n).map_err(|x| x.to_string())?;
            models.insert(n, t.stage_model(n).map_err(|x| x.to_string())?);
        }
        let by_model = model_consequence(lg, &models[&n], &[], &phi).map_err(|x| x.to_string())?.holds;
        let by_stage = d.validity(&phi).map_err(|x| x.to_string())?.answer;
        ensure!(by_model == by_stage, "{}: model {by_model}, stage {by_stage}", e.formula);
    }
    Ok(format!("{} formulas agree on the stage model", entries.len()))
}

// ---------------------------------------------------------------- 6

fn criterion_6() -> Outcome {
    let d = pool_decider();
    let lg = d.logic();
    let top = lg.lattice().top();
    let (mut sat, mut unsat) = (0, 0);
    for e in pool() {
        let phi = lg.parse(&e.formula).map_err(|x| x.to_string())?;
        let neg = lg.parse(&format!("({}) -> 0", e.formula)).map_err(|x| x.to_string())?;
        for (f, oracle_sat) in [(&phi, e.satisfiable), (&neg, !e.valid)] {
            let v = d.satisfiable(f).map_err(|x| x.to_string())?;
            if v.answer {
                let w = v.witness.ok_or("sat without witness")?;
                let json = w.model.ok_or("witness without model")?.to_string();
                let m = TModel::from_json(lg, &json).map_err(|x| x.to_string())?;
                let val = eval_model(lg, &m, f).map_err(|x| x.to_string())?.get(0);
                ensure!(val == top, "{}: witness evaluates to {}", lg.print(f), lg.label(val));
                sat += 1;
            } else {
                ensure!(!oracle_sat, "{}: reported unsat, oracle finds a model", lg.print(f));
                unsat += 1;
            }
        }
    }
    Ok(format!("{sat} witnesses re-evaluate to top, {unsat} unsat reports confirmed"))
}

// ---------------------------------------------------------------- 7

fn criterion_7() -> Outcome {
    let lg = logic(lat(BuiltinKind::Lukasiewicz, 3), FunctorKind::Powerset, &["p", "q"]);
    let facts: [(&[&str], &str, bool); 20] = [
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
        (&[], "box(p) | (box(p) -> 0)", false),
        (&[], "box(p) -> box(q)", false),
        (&[], "((p -> q) -> q) -> ((q -> p) -> p)", true),
        (&["0.5"], "0", true),
        (&[], "p /\\ (p -> 0) -> 0", false),
    ];
    for (premises, conclusion, expected) in facts {
        let ps = premises.iter().map(|p| lg.parse(p)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
        let c = lg.parse(conclusion).map_err(|e| e.to_string())?;
        let got = decide_ax_a(&lg, &ps, &c).map_err(|e| e.to_string())?;
        ensure!(got == expected, "{premises:?} ⊢ {conclusion}: got {got}");
    }
    let em = mvcml_core::proofkit::ax_a_counterexample(&lg, &[], &lg.parse("p | (p -> 0)").unwrap())
        .map_err(|e| e.to_string())?;
    ensure!(
        em.as_ref().map(|cx| lg.label(cx[0].1)) == Some("0.5"),
        "excluded middle counterexample {em:?}"
    );

    let bl = logic(boolean(), FunctorKind::Powerset, &["p", "q"]);
    let axioms = ModalAxiomSet::from_json(&bl, &read_fixture("axioms-monotone.json")).map_err(|e| e.to_string())?;
    let cases: Vec<Value> = serde_json::from_str(&read_fixture("derivations/cases.json")).unwrap();
    let (mut accepted, mut rejected) = (0, 0);
    for case in &cases {
        let file = case["file"].as_str().unwrap();
        let n = case["n"].as_u64().map(|n| n as usize);
        let tree = Derivation::from_json(&bl, &read_fixture(&format!("derivations/{file}"))).map_err(|e| e.to_string())?;
        let r = check_derivation(&bl, &axioms, &tree, n).map_err(|e| e.to_string())?;
        if case["accept"].as_bool().unwrap() {
            ensure!(r.passed(), "{file} rejected:\n{r}");
            accepted += 1;
        } else {
            let kind = case["violation"].as_str().unwrap();
            let w = r.first_failure().and_then(|c| c.witness.clone()).unwrap_or_default();
            ensure!(r.status() == Status::Fail && w.contains(kind), "{file}: expected {kind} violation:\n{r}");
            rejected += 1;
        }
    }
    ensure!(accepted == 5 && rejected == 5, "{accepted} accepted, {rejected} rejected");
    Ok("20 Ł3 facts hold; 5 derivations accepted, 5 rejected".into())
}

// ---------------------------------------------------------------- 8

fn criterion_8() -> Outcome {
    let lg = logic(boolean(), FunctorKind::Powerset, &["p"]);
    let t = Tower::build(&lg, 1, Iota0::Canonical).map_err(|e| e.to_string())?;
    let bx = BuiltinLifting::PowersetBox;
    let run = |fixture: &str| {
        let ax = ModalAxiomSet::from_json(&lg, &read_fixture(fixture)).unwrap();
        one_step_soundness_report(&t, &ax, &[&bx], 1, &SoundnessBounds::default()).unwrap()
    };
    let good = run("axioms-box-top.json");
    ensure!(good.passed(), "box(1):\n{good}");
    let bad = run("axioms-box-bottom.json");
    let w = bad.first_failure().and_then(|c| c.witness.clone()).unwrap_or_default();
    ensure!(bad.status() == Status::Fail && w.starts_with("refuted by"), "box(0):\n{bad}");
    Ok(format!("box(1) certified; box(0) {w}"))
}

// ---------------------------------------------------------------- 9

/// Box that gives up on two-element sets; collapsing maps expose it.
struct TwoBlindBox;

impl PredicateLifting for TwoBlindBox {
    fn name(&self) -> String {
        "blindbox".into()
    }
    fn arity(&self) -> usize {
        1
    }
    fn binds(&self, kind: FunctorKind) -> bool {
        kind == FunctorKind::Powerset
    }
    fn functor_name(&self) -> String {
        "powerset".into()
    }
    fn formula(&self) -> String {
        "box, except bot on two-element sets".into()
    }
    fn eval(&self, lat: &ResiduatedLattice, shape: &Shape<usize>, args: &[&[TruthValue]]) -> TruthValue {
        match shape {
            Shape::Subset(xs) if xs.len() == 2 => lat.bot(),
            Shape::Subset(xs) => lat.meet_all(xs.iter().map(|x| args[0][*x])),
            _ => lat.bot(),
        }
    }
}

fn criterion_9() -> Outcome {
    let kinds = [
        FunctorKind::Powerset,
        FunctorKind::FuzzyHom,
        FunctorKind::Neighborhood,
        FunctorKind::Selection,
        FunctorKind::Distribution { q: 2 },
    ];
    let opts = NaturalityOptions::default();
    let (mut checked, mut sampled) = (0, 0);
    for l in [boolean(), lat(BuiltinKind::Lukasiewicz, 3)] {
        for kind in kinds {
            let lg = logic(l.clone(), kind, &["p"]);
            for lifting in BuiltinLifting::shipped(kind, lg.lattice()) {
                let r = check_naturality(&lifting, lg.functor(), &opts).map_err(|e| e.to_string())?;
                ensure!(r.passed(), "{} over {kind}/{}:\n{r}", lifting.name(), l.name());
                checked += 1;
                sampled += r.checks.iter().any(|c| c.coverage != mvcml_core::report::Coverage::Exhaustive) as usize;
            }
        }
    }
    let lg = logic(boolean(), FunctorKind::Powerset, &["p"]);
    let r = check_naturality(&TwoBlindBox, lg.functor(), &opts).map_err(|e| e.to_string())?;
    let w = r.first_failure().and_then(|c| c.witness.clone());
    ensure!(r.status() == Status::Fail && w.is_some(), "fault not caught:\n{r}");
    Ok(format!(
        "{checked} shipped liftings natural ({sampled} sampled); fault caught at {}",
        w.unwrap_or_default()
    ))
}

// ---------------------------------------------------------------- 10

fn run_cli(args: &[&str], cache: Option<&Path>) -> (Vec<u8>, Option<i32>) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mvcml"));
    cmd.args(args).env_remove("MVCML_CACHE_DIR");
    if let Some(dir) = cache {
        cmd.env("MVCML_CACHE_DIR", dir);
    }
    let out = cmd.output().expect("binary runs");
    (out.stdout, out.status.code())
}

fn criterion_10() -> Outcome {
    let axioms = format!("{FIXTURES}/axioms-monotone.json");
    let commands: Vec<Vec<&str>> = vec![
        vec!["--json", "valid", "box(p) -> p"],
        vec!["--json", "sat", "box(c0)"],
        vec!["--json", "--props", "p,q", "entails", "box(p)", "box(q)", "box(p /\\ q)"],
        vec!["--json", "stage", "1", "--dump", "--formula", "box(p)"],
        vec!["--json", "check", "lemma1", "2"],
        vec!["--json", "--algebra", "L3", "--functor", "selection", "check", "naturality", "cond"],
        vec!["--json", "--props", "p,q", "check", "axioms", &axioms, "--n", "1"],
        vec!["--json", "valid", "p ->"],
    ];
    for args in &commands {
        let a = run_cli(args, None);
        let b = run_cli(args, None);
        ensure!(a == b, "outputs differ for {args:?}");
        ensure!(!a.0.is_empty(), "no output for {args:?}");
    }
    // a cold cache, then the same cache warm, then no cache
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let args = ["--json", "--functor", "neighborhood", "valid", "box(box(p)) -> box(p)"];
    let cold = run_cli(&args, Some(dir.path()));
    let warm = run_cli(&args, Some(dir.path()));
    let none = run_cli(&args, None);
    ensure!(cold == warm && warm == none, "cache changes the report");
    Ok(format!("{} commands and a cached run repeat byte for byte", commands.len()))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 10] = [
        (1, "algebra laws", criterion_1),
        (2, "truth lemma on random models", criterion_2),
        (3, "iota closed form and sections", criterion_3),
        (4, "validity against brute force", criterion_4),
        (5, "stage validity against the stage model", criterion_5),
        (6, "satisfiability witnesses", criterion_6),
        (7, "proof kit", criterion_7),
        (8, "one-step soundness report", criterion_8),
        (9, "naturality of shipped liftings", criterion_9),
        (10, "deterministic JSON reports", criterion_10),
    ];
    // optional criterion numbers on the command line select a subset
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (n, title, f) in criteria {
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("criterion {n:>2} PASS  {title}: {detail} [{ms} ms]"),
            Err(why) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {title}: {why} [{ms} ms]");
            }
        }
    }
    let ran = if only.is_empty() { 10 } else { only.len() };
    println!("acceptance: {} of {ran} criteria pass", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
