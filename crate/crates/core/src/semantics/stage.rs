//! The stage tower `T_P^k 1̃` with its connecting maps, and step-n semantics.
//!
//! Stage 0 is `Hom(P, A) × 1`, so a stage-0 id is a valuation id. Stage
//! `k >= 1` is `T_P` of stage `k - 1`. `gamma[k]` maps stage `k + 1` onto
//! stage `k`; `iota[k]` is its section from stage `k` into stage `k + 1`.

use serde::{Deserialize, Serialize};

use super::model::{consequence_over, Consequence, TModel};
use super::Logic;
use crate::algebra::{FuzzySubset, TruthValue};
use crate::error::{Error, Result};
use crate::functor::{Cardinality, Shape, TSet, TpSet, ValuationSet};
use crate::lifting::PredicateLifting;
use crate::report::{Check, ValidationReport};
use crate::syntax::Formula;

/// Choice of the section `iota^0` of `gamma^0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Iota0 {
    /// Empty set, constant-bot predicate or table, identity selection
    /// table, or point mass on valuation 0.
    #[default]
    Canonical,
    /// A fixed element of `T(1̃)`, by canonical id.
    Element(u64),
}

#[derive(Clone, Debug)]
pub struct Tower {
    logic: Logic,
    valuations: ValuationSet,
    stages: Vec<TpSet>,
    gamma: Vec<Vec<u64>>,
    iota: Vec<Vec<u64>>,
    t0: Shape<usize>,
    iota0: Iota0,
}

fn stage_object(logic: &Logic, valuations: &ValuationSet, k: usize, base: usize) -> Result<TpSet> {
    let nv = valuations.size() as u128;
    let card = match logic.functor().cardinality(base) {
        Cardinality::Exact(t) => match nv.checked_mul(t) {
            Some(n) => Cardinality::Exact(n),
            None => Cardinality::Huge(format!("{nv}·{t}")),
        },
        Cardinality::Huge(s) => Cardinality::Huge(format!("{nv}·{s}")),
    };
    logic.budget().admit(&format!("stage {k}"), &card)?;
    Ok(TpSet {
        valuations: valuations.clone(),
        inner: logic.functor().image_unbounded(base)?,
    })
}

impl Tower {
    /// Enumerates stages `0..=top` with `gamma^k`, `iota^k` for `k < top`.
    pub fn build(logic: &Logic, top: usize, iota0: Iota0) -> Result<Self> {
        let mut tower = Tower::skeleton(logic, top, iota0)?;
        for k in 0..top {
            let g = tower.compute_gamma(k);
            tower.gamma.push(g);
            let i = tower.compute_iota(k)?;
            tower.iota.push(i);
        }
        Ok(tower)
    }

    /// Rebuilds a tower from previously computed tables, checking shapes.
    pub fn from_tables(logic: &Logic, top: usize, iota0: Iota0, gamma: Vec<Vec<u64>>, iota: Vec<Vec<u64>>) -> Result<Self> {
        let mut tower = Tower::skeleton(logic, top, iota0)?;
        if gamma.len() != top || iota.len() != top {
            return Err(Error::InvalidInput("cached tables do not match the tower height".into()));
        }
        for k in 0..top {
            let (up, down) = (tower.size(k + 1), tower.size(k));
            let ok = gamma[k].len() as u64 == up
                && iota[k].len() as u64 == down
                && gamma[k].iter().all(|t| *t < down)
                && iota[k].iter().all(|t| *t < up);
            if !ok {
                return Err(Error::InvalidInput(format!("cached tables at stage {k} are malformed")));
            }
        }
        tower.gamma = gamma;
        tower.iota = iota;
        Ok(tower)
    }

    fn skeleton(logic: &Logic, top: usize, iota0: Iota0) -> Result<Self> {
        let valuations = logic.valuations()?;
        let one = logic.functor().image_unbounded(valuations.size() as usize)?;
        let t0 = match iota0 {
            Iota0::Canonical => one.minimal()?,
            Iota0::Element(id) if id < one.size() => one.decode(id),
            Iota0::Element(id) => {
                return Err(Error::InvalidParameter(format!(
                    "iota0 element {id} outside T(1) of size {}",
                    one.size()
                )))
            }
        };
        let mut stages: Vec<TpSet> = Vec::with_capacity(top);
        let mut base = valuations.size() as usize;
        for k in 1..=top {
            let s = stage_object(logic, &valuations, k, base)?;
            base = s.size() as usize;
            stages.push(s);
        }
        Ok(Tower {
            logic: logic.clone(),
            valuations,
            stages,
            gamma: Vec::new(),
            iota: Vec::new(),
            t0,
            iota0,
        })
    }

    fn compute_gamma(&self, k: usize) -> Vec<u64> {
        let up = &self.stages[k];
        if k == 0 {
            return (0..up.size()).map(|t| up.split(t).0).collect();
        }
        let down = &self.stages[k - 1];
        let g = &self.gamma[k - 1];
        let f: Vec<usize> = g.iter().map(|x| *x as usize).collect();
        (0..up.size()).map(|t| up.map_element(&f, down, t)).collect()
    }

    fn compute_iota(&self, k: usize) -> Result<Vec<u64>> {
        let up = &self.stages[k];
        if k == 0 {
            let d = up.inner.intern(self.t0.clone());
            return Ok((0..self.valuations.size()).map(|nu| up.pair(nu, d)).collect());
        }
        let down = &self.stages[k - 1];
        let f: Vec<usize> = self.iota[k - 1].iter().map(|x| *x as usize).collect();
        Ok((0..down.size()).map(|t| down.map_element(&f, up, t)).collect())
    }

    pub fn logic(&self) -> &Logic {
        &self.logic
    }

    pub fn top(&self) -> usize {
        self.stages.len()
    }

    pub fn iota0(&self) -> Iota0 {
        self.iota0
    }

    pub fn valuations(&self) -> &ValuationSet {
        &self.valuations
    }

    pub fn size(&self, k: usize) -> u64 {
        if k == 0 {
            self.valuations.size()
        } else {
            self.stages[k - 1].size()
        }
    }

    /// `T_P` of stage `k - 1`, for `1 <= k <= top`.
    pub fn stage(&self, k: usize) -> &TpSet {
        &self.stages[k - 1]
    }

    /// `T` of stage `k - 1`, for `1 <= k <= top`.
    pub fn inner(&self, k: usize) -> &TSet {
        &self.stages[k - 1].inner
    }

    pub fn gamma(&self, k: usize) -> &[u64] {
        &self.gamma[k]
    }

    pub fn iota(&self, k: usize) -> &[u64] {
        &self.iota[k]
    }

    pub fn tables(&self) -> (&Vec<Vec<u64>>, &Vec<Vec<u64>>) {
        (&self.gamma, &self.iota)
    }

    /// The minimal element chosen for `iota^0`, over stage-0 ids.
    pub fn t0(&self) -> &Shape<usize> {
        &self.t0
    }

    pub fn nu(&self, k: usize, t: u64) -> u64 {
        if k == 0 {
            t
        } else {
            self.stages[k - 1].split(t).0
        }
    }

    /// Valuation and structure of a stage-`k` element (no structure at 0).
    pub fn decode(&self, k: usize, t: u64) -> (u64, Option<Shape<usize>>) {
        if k == 0 {
            (t, None)
        } else {
            let (nu, d) = self.stages[k - 1].decode(t);
            (nu, Some(d))
        }
    }

    /// Nested rendering, e.g. `(p=1, {(p=0, •)})`.
    pub fn describe(&self, k: usize, t: u64) -> String {
        match self.decode(k, t) {
            (nu, None) => format!("({}, •)", self.valuations.describe(nu)),
            (nu, Some(shape)) => {
                let inner = self.inner(k).describe(&shape, &|x| self.describe(k - 1, x as u64));
                format!("({}, {inner})", self.valuations.describe(nu))
            }
        }
    }

    /// `iota^n(t)` as a valuation and a shape over stage-`n` ids; stage
    /// `n + 1` need not be enumerated.
    pub fn iota_value(&self, n: usize, t: u64) -> (u64, Shape<usize>) {
        if n == 0 {
            return (t, self.t0.clone());
        }
        let (nu, d) = self.stages[n - 1].decode(t);
        let f = &self.iota[n - 1];
        (nu, d.map(|x| f[*x] as usize).tidy(self.logic.lattice()))
    }

    /// `gamma^n` applied to an element of stage `n + 1` given as a shape.
    pub fn gamma_value(&self, n: usize, nu: u64, shape: &Shape<usize>) -> u64 {
        if n == 0 {
            return nu;
        }
        let g = &self.gamma[n - 1];
        self.stages[n - 1].intern(nu, shape.map(|x| g[*x] as usize))
    }

    /// `gamma^m ∘ .. ∘ gamma^{n-1}`: stage `n` onto stage `m <= n`.
    pub fn gamma_composite(&self, n: usize, m: usize) -> Vec<u64> {
        let mut table: Vec<u64> = (0..self.size(n)).collect();
        for k in (m..n).rev() {
            let g = &self.gamma[k];
            for t in table.iter_mut() {
                *t = g[*t as usize];
            }
        }
        table
    }

    /// The model `⟨stage n, iota^n⟩` with the valuation read off `ν`.
    pub fn stage_model(&self, n: usize) -> Result<TModel> {
        let size = self.size(n);
        let mut sigma = Vec::with_capacity(size as usize);
        let mut valuation = Vec::with_capacity(size as usize);
        for t in 0..size {
            let (nu, shape) = self.iota_value(n, t);
            sigma.push(shape);
            valuation.push(self.valuations.decode(nu));
        }
        TModel::new(&self.logic, sigma, valuation)
    }
}

fn eval_rec(tower: &Tower, n: usize, phi: &Formula) -> Result<Vec<TruthValue>> {
    let logic = tower.logic();
    let lat = logic.lattice();
    let size = tower.size(n) as usize;
    Ok(match phi {
        Formula::Const(c) => vec![*c; size],
        Formula::Prop(p) => {
            let i = logic.prop_index(p)?;
            (0..size as u64).map(|t| tower.valuations.value(tower.nu(n, t), i)).collect()
        }
        Formula::Bin(op, l, r) => {
            let (l, r) = (eval_rec(tower, n, l)?, eval_rec(tower, n, r)?);
            l.iter().zip(&r).map(|(a, b)| op.apply(lat, *a, *b)).collect()
        }
        Formula::Modal(name, args) => {
            if n == 0 {
                return Err(Error::Stratum { rank: phi.rank(), stratum: 0 });
            }
            let lifting = logic.modality(name, args.len())?;
            let tables = args.iter().map(|a| eval_rec(tower, n - 1, a)).collect::<Result<Vec<_>>>()?;
            let slices: Vec<&[TruthValue]> = tables.iter().map(Vec::as_slice).collect();
            let stage = tower.stage(n);
            (0..size as u64)
                .map(|t| lifting.eval(lat, &stage.decode(t).1, &slices))
                .collect()
        }
    })
}

fn require(tower: &Tower, n: usize, formulas: &[&Formula]) -> Result<()> {
    if let Some(f) = formulas.iter().find(|f| f.rank() > n) {
        return Err(Error::Stratum { rank: f.rank(), stratum: n });
    }
    if n > tower.top() {
        return Err(Error::InvalidParameter(format!(
            "stage {n} requested from a tower built to stage {}",
            tower.top()
        )));
    }
    Ok(())
}

/// `‖phi‖_n` over every element of stage `n`.
pub fn eval_step(tower: &Tower, n: usize, phi: &Formula) -> Result<FuzzySubset> {
    require(tower, n, &[phi])?;
    Ok(FuzzySubset::new(eval_rec(tower, n, phi)?))
}

/// `‖phi‖_n` at the single element `t`, visiting only what `t` reaches.
pub fn eval_step_at(tower: &Tower, n: usize, phi: &Formula, t: u64) -> Result<TruthValue> {
    require(tower, n, &[phi])?;
    eval_at(tower, n, phi, t)
}

fn eval_at(tower: &Tower, n: usize, phi: &Formula, t: u64) -> Result<TruthValue> {
    let logic = tower.logic();
    let lat = logic.lattice();
    Ok(match phi {
        Formula::Const(c) => *c,
        Formula::Prop(p) => tower.valuations.value(tower.nu(n, t), logic.prop_index(p)?),
        Formula::Bin(op, l, r) => op.apply(lat, eval_at(tower, n, l, t)?, eval_at(tower, n, r, t)?),
        Formula::Modal(name, args) => {
            let lifting = logic.modality(name, args.len())?;
            let shape = tower.stage(n).decode(t).1;
            let (local, members) = shape.localize();
            let tables = args
                .iter()
                .map(|a| members.iter().map(|m| eval_at(tower, n - 1, a, **m as u64)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            let slices: Vec<&[TruthValue]> = tables.iter().map(Vec::as_slice).collect();
            lifting.eval(lat, &local, &slices)
        }
    })
}

pub fn step_consequence(tower: &Tower, n: usize, premises: &[Formula], conclusion: &Formula) -> Result<Consequence> {
    let all: Vec<&Formula> = premises.iter().chain(std::iter::once(conclusion)).collect();
    require(tower, n, &all)?;
    let ps = premises.iter().map(|p| eval_rec(tower, n, p)).collect::<Result<Vec<_>>>()?;
    let c = eval_rec(tower, n, conclusion)?;
    Ok(consequence_over(tower.logic().lattice(), &ps, &c))
}

/// Compares `‖phi‖_n` with `‖phi‖_m ∘ gamma` for every `rank(phi) <= m <= n`.
pub fn check_stage_coherence(tower: &Tower, phi: &Formula, n: usize) -> Result<ValidationReport> {
    require(tower, n, &[phi])?;
    let lat = tower.logic().lattice().clone();
    let mut report = ValidationReport::new(format!("stage coherence of {} up to stage {n}", phi.display(&lat)));
    let high = eval_rec(tower, n, phi)?;
    for m in phi.rank()..n {
        let low = eval_rec(tower, m, phi)?;
        let g = tower.gamma_composite(n, m);
        let bad = (0..high.len()).find(|t| high[*t] != low[g[*t] as usize]);
        let name = format!("stage {n} against stage {m}");
        report.push(match bad {
            None => Check::pass(name, high.len() as u64),
            Some(t) => Check::fail(
                name,
                high.len() as u64,
                format!(
                    "{}: {} vs {}",
                    tower.describe(n, t as u64),
                    lat.label(high[t]),
                    lat.label(low[g[t] as usize])
                ),
            ),
        });
    }
    report.note("checked empirically on the enumerated stages");
    Ok(report)
}
