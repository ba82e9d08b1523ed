//! Model semantics, the stage tower and step-n semantics.

mod model;
mod stage;
mod truth;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{ResiduatedLattice, TruthValue};
use crate::error::{Error, Result};
use crate::functor::{Budget, FiniteFunctor, FunctorKind, ValuationSet};
use crate::lifting::{BuiltinLifting, LiftingRegistry, PredicateLifting};
use crate::syntax::{parse, Formula, Signature};

pub use model::{eval_model, model_consequence, Consequence, TModel};
pub use stage::{check_stage_coherence, eval_step, eval_step_at, step_consequence, Iota0, Tower};
pub use truth::{
    check_lemma1, check_truth_lemma, check_truth_lemma_with, eval_structural, sigma_k, sigma_structural, StageValue,
};

/// A session: algebra, functor, propositions and budget.
#[derive(Clone, Debug)]
pub struct Logic {
    lattice: Arc<ResiduatedLattice>,
    functor: FiniteFunctor,
    props: Vec<String>,
    registry: LiftingRegistry,
    budget: Budget,
}

impl Logic {
    pub fn new(lattice: ResiduatedLattice, kind: FunctorKind, props: Vec<String>, budget: Budget) -> Result<Self> {
        let lattice = Arc::new(lattice);
        if props.is_empty() {
            return Err(Error::InvalidParameter("the proposition list is empty".into()));
        }
        for (i, p) in props.iter().enumerate() {
            let ok_ident = p.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && p.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'');
            if !ok_ident {
                return Err(Error::InvalidParameter(format!("`{p}` is not a proposition name")));
            }
            if props[..i].contains(p) {
                return Err(Error::InvalidParameter(format!("proposition `{p}` listed twice")));
            }
            if lattice.resolve(p).is_some() {
                return Err(Error::InvalidParameter(format!("proposition `{p}` shadows a constant")));
            }
        }
        let functor = FiniteFunctor::new(kind, lattice.clone());
        let registry = LiftingRegistry::new(&functor);
        Ok(Logic {
            lattice,
            functor,
            props,
            registry,
            budget,
        })
    }

    pub fn lattice(&self) -> &Arc<ResiduatedLattice> {
        &self.lattice
    }

    pub fn functor(&self) -> &FiniteFunctor {
        &self.functor
    }

    pub fn kind(&self) -> FunctorKind {
        self.functor.kind()
    }

    pub fn props(&self) -> &[String] {
        &self.props
    }

    pub fn registry(&self) -> &LiftingRegistry {
        &self.registry
    }

    pub fn budget(&self) -> &Budget {
        &self.budget
    }

    pub fn prop_index(&self, name: &str) -> Result<usize> {
        self.props
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown proposition `{name}`")))
    }

    pub fn valuations(&self) -> Result<ValuationSet> {
        ValuationSet::new(self.props.clone(), self.lattice.clone(), &self.budget)
    }

    pub fn signature(&self) -> Signature<'_> {
        Signature {
            lattice: &self.lattice,
            props: &self.props,
            modalities: &self.registry,
        }
    }

    pub fn parse(&self, text: &str) -> Result<Formula> {
        parse(text, &self.signature())
    }

    pub fn print(&self, f: &Formula) -> String {
        crate::syntax::print(f, &self.lattice)
    }

    /// Resolves a modality and checks its arity against `args`.
    pub fn modality(&self, name: &str, args: usize) -> Result<BuiltinLifting> {
        let l = self.registry.resolve(name)?;
        if l.arity() != args {
            return Err(Error::Arity {
                name: name.to_string(),
                expected: l.arity(),
                found: args,
            });
        }
        Ok(l)
    }

    pub fn label(&self, v: TruthValue) -> &str {
        self.lattice.label(v)
    }
}

/// Session settings as they appear in a config file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SessionConfig {
    /// Built-in name (`boolean`, `lukasiewicz:3`, `L3`, `goedel:4`) or a
    /// path to an algebra file.
    pub algebra: String,
    pub functor: FunctorKind,
    pub props: Vec<String>,
    #[serde(default)]
    pub budget: Option<Budget>,
    #[serde(default)]
    pub cache_dir: Option<String>,
    #[serde(default)]
    pub iota0: Option<Iota0>,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            algebra: "boolean".into(),
            functor: FunctorKind::Powerset,
            props: vec!["p".into()],
            budget: None,
            cache_dir: None,
            iota0: None,
        }
    }
}
