//! The σ tower of a model, the truth-lemma check and the ι closed-form check.

use std::rc::Rc;

use super::model::{eval_model, TModel};
use super::stage::{eval_step_at, Tower};
use super::Logic;
use crate::algebra::TruthValue;
use crate::error::{Error, Result};
use crate::functor::{describe_shape, Shape, ValuationSet};
use crate::lifting::PredicateLifting;
use crate::report::{Check, Status, ValidationReport};
use crate::syntax::Formula;

/// A stage element built structurally, so stages too large to enumerate
/// can still be reached from a model.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StageValue {
    /// `(ν, •)` at stage 0, by valuation id.
    Base(u64),
    Node(u64, Shape<Rc<StageValue>>),
}

impl StageValue {
    pub fn nu(&self) -> u64 {
        match self {
            StageValue::Base(nu) | StageValue::Node(nu, _) => *nu,
        }
    }

    pub fn describe(&self, logic: &Logic, vals: &ValuationSet) -> String {
        match self {
            StageValue::Base(nu) => format!("({}, •)", vals.describe(*nu)),
            StageValue::Node(nu, shape) => format!(
                "({}, {})",
                vals.describe(*nu),
                describe_shape(logic.lattice(), shape, &|m: &Rc<StageValue>| m.describe(logic, vals))
            ),
        }
    }
}

/// `σ_k(s)` for every state, built as `T_P σ_{k-1} ∘ σ_V`.
pub fn sigma_structural(logic: &Logic, model: &TModel, k: usize) -> Result<Vec<Rc<StageValue>>> {
    let vals = logic.valuations()?;
    let nus: Vec<u64> = (0..model.states()).map(|s| vals.encode(model.valuation(s))).collect();
    let mut level: Vec<Rc<StageValue>> = nus.iter().map(|nu| Rc::new(StageValue::Base(*nu))).collect();
    for _ in 0..k {
        let prev = level;
        level = (0..model.states())
            .map(|s| Rc::new(StageValue::Node(nus[s], model.sigma(s).map(|x| prev[*x].clone()))))
            .collect();
    }
    Ok(level)
}

/// `σ_k` as ids into an enumerated stage.
pub fn sigma_k(tower: &Tower, model: &TModel, k: usize) -> Result<Vec<u64>> {
    if k > tower.top() {
        return Err(Error::InvalidParameter(format!(
            "stage {k} requested from a tower built to stage {}",
            tower.top()
        )));
    }
    let vals = tower.valuations();
    let nus: Vec<u64> = (0..model.states()).map(|s| vals.encode(model.valuation(s))).collect();
    let mut level = nus.clone();
    for j in 1..=k {
        let stage = tower.stage(j);
        level = (0..model.states())
            .map(|s| stage.intern(nus[s], model.sigma(s).map(|x| level[*x] as usize)))
            .collect();
    }
    Ok(level)
}

/// `‖phi‖_k` at a single structural stage-`k` element.
pub fn eval_structural(logic: &Logic, vals: &ValuationSet, k: usize, phi: &Formula, v: &StageValue) -> Result<TruthValue> {
    let lat = logic.lattice();
    Ok(match phi {
        Formula::Const(c) => *c,
        Formula::Prop(p) => vals.value(v.nu(), logic.prop_index(p)?),
        Formula::Bin(op, l, r) => op.apply(
            lat,
            eval_structural(logic, vals, k, l, v)?,
            eval_structural(logic, vals, k, r, v)?,
        ),
        Formula::Modal(name, args) => {
            let StageValue::Node(_, shape) = v else {
                return Err(Error::Stratum { rank: phi.rank(), stratum: k });
            };
            let lifting = logic.modality(name, args.len())?;
            let (local, members) = shape.localize();
            let tables = args
                .iter()
                .map(|a| members.iter().map(|m| eval_structural(logic, vals, k - 1, a, m)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            let slices: Vec<&[TruthValue]> = tables.iter().map(Vec::as_slice).collect();
            lifting.eval(lat, &local, &slices)
        }
    })
}

/// Checks `‖phi‖_M = ‖phi‖_n ∘ σ_n` with `n = rank(phi)`, structurally
/// and, when a tower reaching stage `n` is supplied, through stage ids.
pub fn check_truth_lemma(logic: &Logic, model: &TModel, phi: &Formula, tower: Option<&Tower>) -> Result<ValidationReport> {
    let n = phi.rank();
    let sigma = sigma_structural(logic, model, n)?;
    let ids = match tower {
        Some(t) if t.top() >= n => Some((t, sigma_k(t, model, n)?)),
        _ => None,
    };
    check_truth_lemma_with(logic, model, phi, &sigma, ids.as_ref().map(|(t, v)| (*t, v.as_slice())))
}

/// As [`check_truth_lemma`], with the σ tower supplied by the caller.
pub fn check_truth_lemma_with(
    logic: &Logic,
    model: &TModel,
    phi: &Formula,
    sigma_n: &[Rc<StageValue>],
    ids: Option<(&Tower, &[u64])>,
) -> Result<ValidationReport> {
    let n = phi.rank();
    let lat = logic.lattice();
    let vals = logic.valuations()?;
    let mut report = ValidationReport::new(format!("truth lemma for {} at stage {n}", phi.display(lat)));
    let direct = eval_model(logic, model, phi)?;
    let states = model.states() as u64;

    let mut witness = None;
    for s in 0..model.states() {
        let staged = eval_structural(logic, &vals, n, phi, &sigma_n[s])?;
        if staged != direct.get(s) {
            witness = Some(format!(
                "state s{s}: model value {}, stage value {} at {}",
                lat.label(direct.get(s)),
                lat.label(staged),
                sigma_n[s].describe(logic, &vals)
            ));
            break;
        }
    }
    report.push(match witness {
        None => Check::pass("model against structural stage", states),
        Some(w) => Check::fail("model against structural stage", states, w),
    });

    match ids {
        Some((tower, ids)) => {
            let staged = ids.iter().map(|t| eval_step_at(tower, n, phi, *t)).collect::<Result<Vec<_>>>()?;
            let bad = (0..model.states()).find(|s| staged[*s] != direct.get(*s));
            report.push(match bad {
                None => Check::pass("model against enumerated stage", states),
                Some(s) => Check::fail(
                    "model against enumerated stage",
                    states,
                    format!(
                        "state s{s}: model value {}, stage value {} at element {}",
                        lat.label(direct.get(s)),
                        lat.label(staged[s]),
                        tower.describe(n, ids[s])
                    ),
                ),
            });
        }
        None => report.push(
            Check::pass("model against enumerated stage", 0)
                .with_status(Status::Skipped)
                .with_detail(format!("stage {n} not enumerated")),
        ),
    }
    Ok(report)
}

/// The ι maps at stage `n`: the inductive `iota^n_k` against the closed form
/// `T_P^k(!')`, plus `iota^n_n = id` and `gamma^k ∘ iota^k = id`.
pub fn check_lemma1(tower: &Tower, n: usize) -> Result<ValidationReport> {
    if n > tower.top() {
        return Err(Error::InvalidParameter(format!(
            "stage {n} requested from a tower built to stage {}",
            tower.top()
        )));
    }
    let mut report = ValidationReport::new(format!("iota closed form at stage {n}"));
    let size = tower.size(n);
    let iota_n: Vec<(u64, Shape<usize>)> = (0..size).map(|t| tower.iota_value(n, t)).collect();

    // inductive: iota^n_0 = !', iota^n_k = T_P iota^n_{k-1} ∘ iota^n
    let mut inductive: Vec<Vec<u64>> = vec![(0..size).map(|t| tower.nu(n, t)).collect()];
    for k in 1..=n {
        let prev = &inductive[k - 1];
        let stage = tower.stage(k);
        let next = iota_n
            .iter()
            .map(|(nu, shape)| stage.intern(*nu, shape.map(|x| prev[*x] as usize)))
            .collect();
        inductive.push(next);
    }

    for k in 0..=n {
        // closed form: T_P^k applied to !' on stage n - k
        let mut cf: Vec<u64> = (0..tower.size(n - k)).map(|t| tower.nu(n - k, t)).collect();
        for j in 1..=k {
            let from = n - k + j;
            let stage = tower.stage(j);
            cf = (0..tower.size(from))
                .map(|t| {
                    let (nu, shape) = tower.decode(from, t);
                    stage.intern(nu, shape.expect("stage >= 1").map(|x| cf[*x] as usize))
                })
                .collect();
        }
        let name = format!("iota^{n}_{k} inductive equals closed form");
        let bad = (0..size as usize).find(|t| cf[*t] != inductive[k][*t]);
        report.push(match bad {
            None => Check::pass(name, size),
            Some(t) => Check::fail(
                name,
                size,
                format!(
                    "{}: inductive {}, closed form {}",
                    tower.describe(n, t as u64),
                    tower.describe(k, inductive[k][t]),
                    tower.describe(k, cf[t])
                ),
            ),
        });
    }

    let name = format!("iota^{n}_{n} is the identity");
    let bad = (0..size).find(|t| inductive[n][*t as usize] != *t);
    report.push(match bad {
        None => Check::pass(name, size),
        Some(t) => Check::fail(name, size, tower.describe(n, t)),
    });

    for k in 0..=n {
        let name = format!("gamma^{k} after iota^{k} is the identity");
        let sz = tower.size(k);
        let bad = (0..sz).find(|t| {
            let back = if k < n {
                tower.gamma(k)[tower.iota(k)[*t as usize] as usize]
            } else {
                let (nu, shape) = &iota_n[*t as usize];
                tower.gamma_value(n, *nu, shape)
            };
            back != *t
        });
        report.push(match bad {
            None => Check::pass(name, sz),
            Some(t) => Check::fail(name, sz, tower.describe(k, t)),
        });
    }
    Ok(report)
}
