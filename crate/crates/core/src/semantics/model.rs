//! `T`-models, their JSON form and model semantics.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::Logic;
use crate::algebra::{format_rational, parse_rational, FuzzySubset, Rational, ResiduatedLattice, TruthValue};
use crate::error::{Error, Result};
use crate::functor::{describe_shape, function_decode, function_index, FunctorKind, Shape};
use crate::lifting::PredicateLifting;
use crate::syntax::Formula;

/// A finite `T_P`-coalgebra: structure `sigma` and valuation per state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TModel {
    states: usize,
    sigma: Vec<Shape<usize>>,
    valuation: Vec<Vec<TruthValue>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    states: usize,
    valuation: Vec<Vec<Value>>,
    sigma: Vec<Value>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn truth_value(lat: &ResiduatedLattice, v: &Value) -> Result<TruthValue> {
    match v {
        Value::Number(n) => n
            .as_u64()
            .filter(|i| (*i as usize) < lat.size())
            .map(|i| TruthValue(i as u16))
            .ok_or_else(|| bad(format!("carrier index {n} out of range for {}", lat.name()))),
        Value::String(s) => lat
            .resolve(s)
            .ok_or_else(|| bad(format!("`{s}` is not an element of {}", lat.name()))),
        other => Err(bad(format!("expected a carrier element, found {other}"))),
    }
}

fn state_list(v: &Value, states: usize) -> Result<Vec<usize>> {
    let arr = v.as_array().ok_or_else(|| bad("expected a list of states"))?;
    arr.iter()
        .map(|x| {
            x.as_u64()
                .map(|i| i as usize)
                .filter(|i| *i < states)
                .ok_or_else(|| bad(format!("`{x}` is not a state below {states}")))
        })
        .collect()
}

fn value_list(lat: &ResiduatedLattice, v: &Value) -> Result<Vec<TruthValue>> {
    v.as_array()
        .ok_or_else(|| bad("expected a list of carrier elements"))?
        .iter()
        .map(|x| truth_value(lat, x))
        .collect()
}

/// `{"base": [...], "table": [...]}` or a bare table over all states.
fn based_table(v: &Value, states: usize) -> Result<(Vec<usize>, &Vec<Value>)> {
    match v {
        Value::Object(o) => {
            let base = state_list(o.get("base").ok_or_else(|| bad("missing `base`"))?, states)?;
            let table = o
                .get("table")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("missing `table` list"))?;
            Ok((base, table))
        }
        Value::Array(t) => Ok(((0..states).collect(), t)),
        other => Err(bad(format!("expected a table, found {other}"))),
    }
}

impl TModel {
    /// Builds and validates a model against the session.
    pub fn new(logic: &Logic, sigma: Vec<Shape<usize>>, valuation: Vec<Vec<TruthValue>>) -> Result<Self> {
        let states = sigma.len();
        if states == 0 {
            return Err(bad("a model needs at least one state"));
        }
        if valuation.len() != states {
            return Err(bad(format!("{} valuation rows for {states} states", valuation.len())));
        }
        let lat = logic.lattice();
        for (s, row) in valuation.iter().enumerate() {
            if row.len() != logic.props().len() {
                return Err(bad(format!("state {s}: {} values for {} propositions", row.len(), logic.props().len())));
            }
            if row.iter().any(|v| v.index() >= lat.size()) {
                return Err(bad(format!("state {s}: valuation outside the carrier")));
            }
        }
        for (s, shape) in sigma.iter().enumerate() {
            validate_shape(logic, shape, states).map_err(|e| bad(format!("sigma of state {s}: {e}")))?;
        }
        Ok(TModel {
            states,
            sigma,
            valuation,
        })
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn sigma(&self, s: usize) -> &Shape<usize> {
        &self.sigma[s]
    }

    pub fn valuation(&self, s: usize) -> &[TruthValue] {
        &self.valuation[s]
    }

    pub fn from_json(logic: &Logic, text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        if file.sigma.len() != file.states {
            return Err(bad(format!("{} sigma entries for {} states", file.sigma.len(), file.states)));
        }
        let lat = logic.lattice();
        let valuation = file
            .valuation
            .iter()
            .map(|row| row.iter().map(|v| truth_value(lat, v)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let n = file.states;
        let a = lat.size();
        let sigma = file
            .sigma
            .iter()
            .enumerate()
            .map(|(s, v)| decode_sigma(logic, v, n, a).map_err(|e| bad(format!("sigma of state {s}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        TModel::new(logic, sigma, valuation)
    }

    pub fn to_json(&self, logic: &Logic) -> Value {
        let a = logic.lattice().size();
        let sigma: Vec<Value> = self
            .sigma
            .iter()
            .map(|shape| match shape {
                Shape::Subset(xs) => json!(xs),
                Shape::Fuzzy(xs) => {
                    let mut row = vec![logic.lattice().bot().0; self.states];
                    for (x, v) in xs {
                        row[*x] = v.0;
                    }
                    json!(row)
                }
                Shape::Dist { q, weights } => {
                    let mut row = vec![0u32; self.states];
                    for (x, w) in weights {
                        row[*x] += w;
                    }
                    json!(row
                        .iter()
                        .map(|w| format_rational(&Rational::new(*w as i64, *q as i64)))
                        .collect::<Vec<_>>())
                }
                Shape::Neigh { base, table } => {
                    json!({"base": base, "table": table.iter().map(|v| v.0).collect::<Vec<_>>()})
                }
                Shape::Select { base, table } => json!({
                    "base": base,
                    "table": table
                        .iter()
                        .map(|id| function_decode(*id as u64, base.len(), a).iter().map(|v| v.0).collect::<Vec<_>>())
                        .collect::<Vec<_>>()
                }),
            })
            .collect();
        json!({
            "states": self.states,
            "valuation": self.valuation.iter().map(|r| r.iter().map(|v| v.0).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "sigma": sigma,
        })
    }

    /// One line per state: valuation and structure.
    pub fn describe(&self, logic: &Logic) -> String {
        let lat = logic.lattice();
        (0..self.states)
            .map(|s| {
                let nu: Vec<String> = logic
                    .props()
                    .iter()
                    .zip(&self.valuation[s])
                    .map(|(p, v)| format!("{p}={}", lat.label(*v)))
                    .collect();
                format!("s{s}: {} -> {}", nu.join(", "), describe_shape(lat, &self.sigma[s], &|x| format!("s{x}")))
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

fn decode_sigma(logic: &Logic, v: &Value, n: usize, a: usize) -> Result<Shape<usize>> {
    let lat = logic.lattice();
    Ok(match logic.kind() {
        FunctorKind::Powerset => Shape::Subset(state_list(v, n)?).tidy(lat),
        FunctorKind::FuzzyHom => {
            let row = value_list(lat, v)?;
            if row.len() != n {
                return Err(bad(format!("fuzzy row of length {} for {n} states", row.len())));
            }
            Shape::Fuzzy(row.into_iter().enumerate().collect()).tidy(lat)
        }
        FunctorKind::Distribution { q } => {
            let row = v.as_array().ok_or_else(|| bad("expected a list of probabilities"))?;
            if row.len() != n {
                return Err(bad(format!("distribution of length {} for {n} states", row.len())));
            }
            let mut weights = Vec::new();
            for (x, w) in row.iter().enumerate() {
                let text = match w {
                    Value::String(s) => s.clone(),
                    Value::Number(num) => num.to_string(),
                    other => return Err(bad(format!("`{other}` is not a probability"))),
                };
                let r = parse_rational(&text).ok_or_else(|| bad(format!("`{text}` is not a probability")))?;
                let units = r * Rational::from_integer(q as i64);
                if !units.is_integer() || units < Rational::from_integer(0) {
                    return Err(bad(format!("probability {text} is not a multiple of 1/{q}")));
                }
                weights.push((x, *units.numer() as u32));
            }
            Shape::Dist { q, weights }.tidy(lat)
        }
        FunctorKind::Neighborhood => {
            let (base, table) = based_table(v, n)?;
            let table = table.iter().map(|x| truth_value(lat, x)).collect::<Result<Vec<_>>>()?;
            Shape::Neigh { base, table: table.into() }
        }
        FunctorKind::Selection => {
            let (base, table) = based_table(v, n)?;
            let m = base.len();
            let entries = table
                .iter()
                .map(|row| {
                    let vals = value_list(lat, row)?;
                    if vals.len() != m {
                        return Err(bad(format!("selected predicate of length {} over {m} base states", vals.len())));
                    }
                    Ok(function_index(vals, a) as u32)
                })
                .collect::<Result<Vec<_>>>()?;
            Shape::Select { base, table: entries.into() }
        }
    })
}

fn validate_shape(logic: &Logic, shape: &Shape<usize>, states: usize) -> Result<()> {
    let lat = logic.lattice();
    let a = lat.size() as u64;
    if let Some(x) = shape.members().into_iter().find(|x| **x >= states) {
        return Err(bad(format!("member {x} is not a state")));
    }
    let fits = matches!(
        (shape, logic.kind()),
        (Shape::Subset(_), FunctorKind::Powerset)
            | (Shape::Fuzzy(_), FunctorKind::FuzzyHom)
            | (Shape::Neigh { .. }, FunctorKind::Neighborhood)
            | (Shape::Select { .. }, FunctorKind::Selection)
            | (Shape::Dist { .. }, FunctorKind::Distribution { .. })
    );
    if !fits {
        return Err(bad(format!("a {} does not belong to the {} functor", shape.kind_name(), logic.kind())));
    }
    match shape {
        Shape::Fuzzy(xs) if xs.iter().any(|(_, v)| v.index() >= lat.size()) => Err(bad("membership outside the carrier")),
        Shape::Dist { q, weights } => {
            let FunctorKind::Distribution { q: want } = logic.kind() else { unreachable!() };
            let total: u32 = weights.iter().map(|(_, w)| w).sum();
            if *q != want || total != *q {
                Err(bad(format!("weights sum to {total}/{q}, expected 1 on the 1/{want} grid")))
            } else {
                Ok(())
            }
        }
        Shape::Neigh { base, table } => {
            let want = a.checked_pow(base.len() as u32).ok_or_else(|| bad("base too large"))?;
            if table.len() as u64 != want || table.iter().any(|v| v.index() >= lat.size()) {
                Err(bad(format!("neighborhood table needs {want} carrier entries")))
            } else {
                Ok(())
            }
        }
        Shape::Select { base, table } => {
            let want = a.checked_pow(base.len() as u32).ok_or_else(|| bad("base too large"))?;
            if table.len() as u64 != want || table.iter().any(|v| *v as u64 >= want) {
                Err(bad(format!("selection table needs {want} entries below {want}")))
            } else {
                Ok(())
            }
        }
        _ => Ok(()),
    }
}

fn eval_rec(logic: &Logic, m: &TModel, phi: &Formula) -> Result<Vec<TruthValue>> {
    let lat = logic.lattice();
    Ok(match phi {
        Formula::Const(c) => vec![*c; m.states],
        Formula::Prop(p) => {
            let i = logic.prop_index(p)?;
            m.valuation.iter().map(|row| row[i]).collect()
        }
        Formula::Bin(op, l, r) => {
            let (l, r) = (eval_rec(logic, m, l)?, eval_rec(logic, m, r)?);
            l.iter().zip(&r).map(|(a, b)| op.apply(lat, *a, *b)).collect()
        }
        Formula::Modal(name, args) => {
            let lifting = logic.modality(name, args.len())?;
            let tables = args.iter().map(|a| eval_rec(logic, m, a)).collect::<Result<Vec<_>>>()?;
            let slices: Vec<&[TruthValue]> = tables.iter().map(Vec::as_slice).collect();
            m.sigma.iter().map(|shape| lifting.eval(lat, shape, &slices)).collect()
        }
    })
}

/// Truth value of `phi` at every state.
pub fn eval_model(logic: &Logic, m: &TModel, phi: &Formula) -> Result<FuzzySubset> {
    Ok(FuzzySubset::new(eval_rec(logic, m, phi)?))
}

/// Outcome of a consequence check over a finite carrier.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Consequence {
    pub holds: bool,
    /// First point where every premise is top but the conclusion is not.
    pub witness: Option<u64>,
}

pub(crate) fn consequence_over(
    lat: &ResiduatedLattice,
    premises: &[Vec<TruthValue>],
    conclusion: &[TruthValue],
) -> Consequence {
    let top = lat.top();
    let witness = (0..conclusion.len())
        .find(|&x| premises.iter().all(|p| p[x] == top) && conclusion[x] != top)
        .map(|x| x as u64);
    Consequence {
        holds: witness.is_none(),
        witness,
    }
}

pub fn model_consequence(logic: &Logic, m: &TModel, premises: &[Formula], conclusion: &Formula) -> Result<Consequence> {
    let ps = premises.iter().map(|p| eval_rec(logic, m, p)).collect::<Result<Vec<_>>>()?;
    let c = eval_rec(logic, m, conclusion)?;
    Ok(consequence_over(logic.lattice(), &ps, &c))
}
