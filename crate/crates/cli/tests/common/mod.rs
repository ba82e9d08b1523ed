//! Independent oracles and generators shared by the CLI test targets.
#![allow(dead_code)]

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use mvcml_core::algebra::{AlgebraFile, ResiduatedLattice, TruthValue};
use mvcml_core::functor::{FunctorKind, Shape};
use mvcml_core::semantics::{Logic, TModel};
use mvcml_core::syntax::{BinOp, Formula};

pub const POOL: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/pool.json");
pub const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");

/// Seed of the frozen criterion-4 formula pool.
pub const POOL_SEED: u64 = 4;
pub const POOL_SIZE: usize = 200;

// ---------------------------------------------------------------- algebra

/// Clause `name` at `w`, read straight off the raw tables; `leq(a, b)`
/// iff `meet[a][b] == a`.
pub fn raw_clause_holds(f: &AlgebraFile, name: &str, w: &[usize]) -> bool {
    let j = |a: usize, b: usize| f.join[a][b];
    let m = |a: usize, b: usize| f.meet[a][b];
    let x = |a: usize, b: usize| f.mono[a][b];
    let i = |a: usize, b: usize| f.imp[a][b];
    let leq = |a: usize, b: usize| m(a, b) == a;
    let (bot, top) = (f.bot, f.top);
    let g = |k: usize| w[k];
    match name {
        "join commutative" => j(g(0), g(1)) == j(g(1), g(0)),
        "meet commutative" => m(g(0), g(1)) == m(g(1), g(0)),
        "monoid commutative" => x(g(0), g(1)) == x(g(1), g(0)),
        "join associative" => j(j(g(0), g(1)), g(2)) == j(g(0), j(g(1), g(2))),
        "meet associative" => m(m(g(0), g(1)), g(2)) == m(g(0), m(g(1), g(2))),
        "monoid associative" => x(x(g(0), g(1)), g(2)) == x(g(0), x(g(1), g(2))),
        "join idempotent" => j(g(0), g(0)) == g(0),
        "meet idempotent" => m(g(0), g(0)) == g(0),
        "absorption" => j(g(0), m(g(0), g(1))) == g(0) && m(g(0), j(g(0), g(1))) == g(0),
        "bot is least" => m(bot, g(0)) == bot && j(bot, g(0)) == g(0),
        "top is greatest (integrality)" => m(g(0), top) == g(0) && j(g(0), top) == top,
        "top is the monoid unit" => x(g(0), top) == g(0),
        "residuation" => leq(x(g(0), g(1)), g(2)) == leq(g(1), i(g(0), g(2))),
        other => panic!("unknown clause {other}"),
    }
}

/// Whether every clause holds at every tuple of the raw tables.
pub fn raw_is_residuated_lattice(f: &AlgebraFile) -> bool {
    let n = f.size;
    let names = [
        "join commutative",
        "meet commutative",
        "monoid commutative",
        "join associative",
        "meet associative",
        "monoid associative",
        "join idempotent",
        "meet idempotent",
        "absorption",
        "bot is least",
        "top is greatest (integrality)",
        "top is the monoid unit",
        "residuation",
    ];
    (0..n * n * n).all(|t| {
        let w = [t % n, t / n % n, t / (n * n)];
        names.iter().all(|c| raw_clause_holds(f, c, &w))
    })
}

// ---------------------------------------------------------------- Kripke oracle

/// Explicit Boolean Kripke model.
pub struct Kripke {
    pub succ: Vec<Vec<usize>>,
    pub val: Vec<Vec<bool>>,
}

/// Two-valued evaluation at state `s`, with `box`/`dia` over successors.
pub fn kripke_holds(k: &Kripke, props: &[&str], f: &Formula, s: usize) -> bool {
    match f {
        Formula::Const(c) => c.0 == 1,
        Formula::Prop(p) => k.val[s][props.iter().position(|q| q == p).expect("known prop")],
        Formula::Bin(op, l, r) => {
            let (a, b) = (kripke_holds(k, props, l, s), kripke_holds(k, props, r, s));
            match op {
                BinOp::Or => a || b,
                BinOp::And | BinOp::Fuse => a && b,
                BinOp::Imp => !a || b,
            }
        }
        Formula::Modal(name, args) => {
            let mut it = k.succ[s].iter().map(|t| kripke_holds(k, props, &args[0], *t));
            match name.as_str() {
                "box" => it.all(|b| b),
                "dia" => it.any(|b| b),
                other => panic!("oracle has no modality {other}"),
            }
        }
    }
}

/// Calls `visit` on every pointed model relevant to rank-1 formulas over
/// `props` with at most `max_states` states, and every model with at most
/// three states at every state. Stops early when `visit` returns false.
pub fn for_each_pointed_model(props: &[&str], max_states: usize, visit: &mut dyn FnMut(&Kripke, usize) -> bool) -> bool {
    let np = props.len();
    let nv = 1usize << np;
    let bits = |v: usize| (0..np).map(|i| v >> (np - 1 - i) & 1 == 1).collect::<Vec<bool>>();

    // every model with |S| <= 3
    for n in 1..=3usize {
        for rel in 0u64..1 << (n * n) {
            for vals in 0..nv.pow(n as u32) {
                let succ = (0..n).map(|s| (0..n).filter(|t| rel >> (s * n + t) & 1 == 1).collect()).collect();
                let val = (0..n).map(|s| bits(vals / nv.pow(s as u32) % nv)).collect();
                let k = Kripke { succ, val };
                for s in 0..n {
                    if !visit(&k, s) {
                        return false;
                    }
                }
            }
        }
    }

    // a root with a multiset of leaf successors, optionally looping on itself
    fn multisets(nv: usize, size: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        if cur.len() == size {
            return;
        }
        for v in from..nv {
            cur.push(v);
            multisets(nv, size, v, cur, out);
            cur.pop();
        }
    }
    let mut all = Vec::new();
    multisets(nv, max_states - 1, 0, &mut Vec::new(), &mut all);
    for root in 0..nv {
        for leaves in &all {
            for looped in [false, true] {
                let mut succ = vec![(1..=leaves.len()).collect::<Vec<_>>()];
                if looped {
                    succ[0].push(0);
                }
                succ.extend(leaves.iter().map(|_| Vec::new()));
                let mut val = vec![bits(root)];
                val.extend(leaves.iter().map(|v| bits(*v)));
                if !visit(&Kripke { succ, val }, 0) {
                    return false;
                }
            }
        }
    }
    true
}

pub fn oracle_valid(props: &[&str], f: &Formula) -> bool {
    for_each_pointed_model(props, 8, &mut |k, s| kripke_holds(k, props, f, s))
}

pub fn oracle_satisfiable(props: &[&str], f: &Formula) -> bool {
    !for_each_pointed_model(props, 8, &mut |k, s| !kripke_holds(k, props, f, s))
}

// ---------------------------------------------------------------- generators

/// Random formula of depth at most `depth` and rank at most `rank`.
pub fn random_formula(
    rng: &mut ChaCha8Rng,
    lat: &ResiduatedLattice,
    props: &[String],
    mods: &[(String, usize)],
    depth: usize,
    rank: usize,
) -> Formula {
    let leaf = depth == 0 || rng.gen_bool(0.25);
    if leaf {
        return if rng.gen_bool(0.8) {
            Formula::prop(props.choose(rng).expect("props").clone())
        } else {
            Formula::Const(TruthValue(rng.gen_range(0..lat.size()) as u16))
        };
    }
    if rank > 0 && !mods.is_empty() && rng.gen_bool(0.4) {
        let (name, arity) = mods.choose(rng).expect("mods").clone();
        let args = (0..arity).map(|_| random_formula(rng, lat, props, mods, depth - 1, rank - 1)).collect();
        return Formula::modal(name, args);
    }
    let op = *BinOp::ALL.choose(rng).expect("ops");
    Formula::bin(
        op,
        random_formula(rng, lat, props, mods, depth - 1, rank),
        random_formula(rng, lat, props, mods, depth - 1, rank),
    )
}

/// The criterion-4 pool: rank <= 1 over `p`, `q`, Boolean, powerset. A
/// third are implications between related formulas, so valid ones occur.
pub fn pool_formulas(logic: &Logic) -> Vec<Formula> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(POOL_SEED);
    let props = logic.props().to_vec();
    let mods = vec![("box".to_string(), 1), ("dia".to_string(), 1)];
    let lat = logic.lattice().clone();
    let mut out: Vec<Formula> = Vec::new();
    while out.len() < POOL_SIZE {
        let a = random_formula(&mut rng, &lat, &props, &mods, 3, 1);
        let f = match rng.gen_range(0..3) {
            0 => a,
            1 => {
                let b = random_formula(&mut rng, &lat, &props, &mods, 2, 1);
                Formula::imp(a.clone(), Formula::or(a, b))
            }
            _ => {
                let b = random_formula(&mut rng, &lat, &props, &mods, 2, 1);
                Formula::imp(Formula::and(a, b.clone()), b)
            }
        };
        if !out.contains(&f) {
            out.push(f);
        }
    }
    out
}

/// Random model of the session's functor with `n` states.
pub fn random_model(rng: &mut ChaCha8Rng, logic: &Logic, n: usize) -> TModel {
    let lat = logic.lattice();
    let a = lat.size();
    let sigma = (0..n)
        .map(|_| match logic.kind() {
            FunctorKind::Powerset => Shape::Subset((0..n).filter(|_| rng.gen_bool(0.5)).collect()),
            FunctorKind::FuzzyHom => Shape::Fuzzy(
                (0..n)
                    .map(|s| (s, TruthValue(rng.gen_range(0..a) as u16)))
                    .filter(|(_, v)| *v != lat.bot())
                    .collect(),
            ),
            FunctorKind::Distribution { q } => {
                let mut w = vec![0u32; n];
                for _ in 0..q {
                    w[rng.gen_range(0..n)] += 1;
                }
                Shape::Dist {
                    q,
                    weights: w.into_iter().enumerate().filter(|(_, k)| *k > 0).collect(),
                }
            }
            FunctorKind::Neighborhood => Shape::Neigh {
                base: (0..n).collect(),
                table: (0..a.pow(n as u32))
                    .map(|_| TruthValue(rng.gen_range(0..a) as u16))
                    .collect::<Arc<[TruthValue]>>(),
            },
            FunctorKind::Selection => panic!("not generated"),
        })
        .collect();
    let valuation = (0..n)
        .map(|_| logic.props().iter().map(|_| TruthValue(rng.gen_range(0..a) as u16)).collect())
        .collect();
    TModel::new(logic, sigma, valuation).expect("generated model is well formed")
}
