//! Validity, consequence and satisfiability by exhausting a stage.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::rc::Rc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::functor::FunctorKind;
use crate::semantics::{eval_model, eval_step, step_consequence, Iota0, Logic, TModel, Tower};
use crate::syntax::Formula;

/// A decoded stage element supporting a verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub level: usize,
    pub element: u64,
    pub decoded: String,
    /// Values of the distinct subformulas at the element, in pre-order.
    pub values: Vec<(String, String)>,
    /// For satisfiability: the part of the stage model generated by the
    /// element, with the element as state 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<serde_json::Value>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub answer: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget_note: Option<String>,
}

#[derive(Serialize)]
struct CacheKey<'a> {
    algebra: crate::algebra::AlgebraFile,
    functor: FunctorKind,
    props: &'a [String],
    height: usize,
    iota0: Iota0,
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    key: String,
    gamma: Vec<Vec<u64>>,
    iota: Vec<Vec<u64>>,
}

/// On-disk store for the `gamma`/`iota` tables of a tower.
#[derive(Clone, Debug)]
pub struct StageCache {
    dir: PathBuf,
}

impl StageCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        StageCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn key(logic: &Logic, height: usize, iota0: Iota0) -> String {
        let key = CacheKey {
            algebra: logic.lattice().to_file(),
            functor: logic.kind(),
            props: logic.props(),
            height,
            iota0,
        };
        let bytes = serde_json::to_vec(&key).expect("cache key serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("tower-{key}.json"))
    }

    /// A cached tower, or `None` when absent or unreadable.
    pub fn load(&self, logic: &Logic, height: usize, iota0: Iota0) -> Option<Tower> {
        let key = Self::key(logic, height, iota0);
        let text = fs::read_to_string(self.path(&key)).ok()?;
        let entry: CacheEntry = serde_json::from_str(&text).ok()?;
        if entry.key != key {
            return None;
        }
        Tower::from_tables(logic, height, iota0, entry.gamma, entry.iota).ok()
    }

    /// Writes to a temporary file and renames it into place.
    pub fn store(&self, tower: &Tower) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let key = Self::key(tower.logic(), tower.top(), tower.iota0());
        let (gamma, iota) = tower.tables();
        let entry = CacheEntry {
            key: key.clone(),
            gamma: gamma.clone(),
            iota: iota.clone(),
        };
        let tmp = self.dir.join(format!(".tower-{key}.{}.tmp", std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            serde_json::to_writer(&mut f, &entry)?;
            f.flush()?;
            f.sync_all()?;
        }
        fs::rename(&tmp, self.path(&key))?;
        Ok(())
    }
}

/// Decision procedures over one session, with towers memoized in memory
/// and optionally on disk.
pub struct Decider {
    logic: Logic,
    iota0: Iota0,
    cache: Option<StageCache>,
    towers: RefCell<BTreeMap<usize, Rc<Tower>>>,
}

impl Decider {
    pub fn new(logic: Logic, iota0: Iota0, cache: Option<StageCache>) -> Self {
        Decider {
            logic,
            iota0,
            cache,
            towers: RefCell::new(BTreeMap::new()),
        }
    }

    pub fn logic(&self) -> &Logic {
        &self.logic
    }

    /// A tower reaching at least stage `n`.
    pub fn tower(&self, n: usize) -> Result<Rc<Tower>> {
        if let Some((_, t)) = self.towers.borrow().range(n..).next() {
            return Ok(t.clone());
        }
        let tower = match self.cache.as_ref().and_then(|c| c.load(&self.logic, n, self.iota0)) {
            Some(t) => t,
            None => {
                let t = Tower::build(&self.logic, n, self.iota0)?;
                if let Some(c) = &self.cache {
                    c.store(&t)?;
                }
                t
            }
        };
        let tower = Rc::new(tower);
        self.towers.borrow_mut().insert(n, tower.clone());
        Ok(tower)
    }

    fn witness(&self, tower: &Tower, n: usize, element: u64, formulas: &[&Formula]) -> Result<Witness> {
        let mut seen = BTreeSet::new();
        let mut values = Vec::new();
        for f in formulas {
            let mut subs = Vec::new();
            f.visit(&mut |s| subs.push(s));
            for s in subs {
                if !seen.insert(s.clone()) {
                    continue;
                }
                let v = eval_step(tower, n, s)?.get(element as usize);
                values.push((self.logic.print(s), self.logic.label(v).to_string()));
            }
        }
        Ok(Witness {
            level: n,
            element,
            decoded: tower.describe(n, element),
            values,
            model: None,
        })
    }

    /// Valid iff `‖phi‖_n` is constantly top, `n = rank(phi)`.
    pub fn validity(&self, phi: &Formula) -> Result<Verdict> {
        self.consequence(&[], phi)
    }

    /// Decides `premises ⊩ conclusion` at the largest rank involved.
    pub fn consequence(&self, premises: &[Formula], conclusion: &Formula) -> Result<Verdict> {
        let n = premises.iter().chain(std::iter::once(conclusion)).map(Formula::rank).max().unwrap_or(0);
        let tower = self.tower(n)?;
        let c = step_consequence(&tower, n, premises, conclusion)?;
        let witness = match c.witness {
            Some(t) => {
                let fs: Vec<&Formula> = premises.iter().chain(std::iter::once(conclusion)).collect();
                Some(self.witness(&tower, n, t, &fs)?)
            }
            None => None,
        };
        Ok(Verdict {
            answer: c.holds,
            witness,
            budget_note: None,
        })
    }

    /// Searches the model `⟨stage n, iota^n⟩` for a point where `phi` is
    /// top; model and stage values are cross-checked.
    pub fn satisfiable(&self, phi: &Formula) -> Result<Verdict> {
        if !self.logic.kind().is_finite() {
            return Err(Error::InvalidParameter(format!("functor {} is not finite", self.logic.kind())));
        }
        let n = phi.rank();
        let tower = self.tower(n)?;
        let model = tower.stage_model(n)?;
        let by_model = eval_model(&self.logic, &model, phi)?;
        let by_stage = eval_step(&tower, n, phi)?;
        if by_model != by_stage {
            let t = (0..by_model.domain_size()).find(|t| by_model.get(*t) != by_stage.get(*t)).unwrap_or(0);
            return Err(Error::Invariant(format!(
                "model and stage semantics disagree on {} at {}",
                self.logic.print(phi),
                tower.describe(n, t as u64)
            )));
        }
        let top = self.logic.lattice().top();
        let found = (0..by_model.domain_size()).find(|t| by_model.get(*t) == top);
        let witness = match found {
            Some(t) => {
                let mut w = self.witness(&tower, n, t as u64, &[phi])?;
                w.model = Some(generated_submodel(&self.logic, &model, t)?.to_json(&self.logic));
                Some(w)
            }
            None => None,
        };
        Ok(Verdict {
            answer: witness.is_some(),
            witness,
            budget_note: None,
        })
    }
}

/// The states reachable from `root`, renumbered in breadth-first order
/// with `root` first.
pub fn generated_submodel(logic: &Logic, model: &TModel, root: usize) -> Result<TModel> {
    let mut order = vec![root];
    let mut index: BTreeMap<usize, usize> = [(root, 0)].into();
    let mut queue = VecDeque::from([root]);
    while let Some(s) = queue.pop_front() {
        for m in model.sigma(s).members() {
            if !index.contains_key(m) {
                index.insert(*m, order.len());
                order.push(*m);
                queue.push_back(*m);
            }
        }
    }
    let sigma = order.iter().map(|s| model.sigma(*s).map(|m| index[m])).collect();
    let valuation = order.iter().map(|s| model.valuation(*s).to_vec()).collect();
    TModel::new(logic, sigma, valuation)
}
