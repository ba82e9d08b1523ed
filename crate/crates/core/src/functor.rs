//! Enumerable finite endofunctors on finite sets.
//!
//! A finite set is `{0, .., n - 1}`. For each built-in functor `T` the image
//! `T n` is enumerated arithmetically: an element id is decoded into a
//! [`Shape`] over `0..n` and encoded back, so no element list is stored.
//!
//! Canonical encodings:
//! - powerset: bitmask, bit `x` set iff `x` is a member;
//! - fuzzy subsets and neighborhood tables: little-endian base-`|A|`
//!   numerals (digit `x` is the value at `x`);
//! - selection tables: little-endian base-`|A|^n` numerals;
//! - grid distributions: rank of the weight vector among the weak
//!   compositions of `q` into `n` parts, in descending lexicographic order;
//! - valuations `P -> A`: lexicographic, first proposition most significant;
//! - pairs `(v, d)`: row-major, `id = v * |T n| + d`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{format_rational, Rational, ResiduatedLattice, TruthValue};
use crate::error::{Error, Result};
use crate::report::{Check, ValidationReport};

/// Built-in functor selection, as it appears in configs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctorKind {
    Powerset,
    /// The covariant `A`-valued subset functor `X -> Hom(X, A)`.
    FuzzyHom,
    /// `X -> Hom(Hom(X, A), A)`.
    Neighborhood,
    /// `X -> (Hom(X, A) -> Hom(X, A))`.
    Selection,
    /// Distributions whose probabilities are multiples of `1/q`.
    Distribution { q: u32 },
}

impl FunctorKind {
    /// Accepts `powerset`, `fuzzyhom`, `neighborhood`, `selection`,
    /// `distribution:Q` (or `distribution` for `q = 2`).
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim().to_ascii_lowercase();
        let (head, arg) = match t.split_once(':') {
            Some((h, a)) => (h.to_string(), Some(a.to_string())),
            None => (t.clone(), None),
        };
        let kind = match head.as_str() {
            "powerset" => FunctorKind::Powerset,
            "fuzzyhom" | "hom" => FunctorKind::FuzzyHom,
            "neighborhood" | "neighbourhood" => FunctorKind::Neighborhood,
            "selection" => FunctorKind::Selection,
            "distribution" | "dist" => {
                let q = match arg.as_deref() {
                    None => 2,
                    Some(a) => a
                        .parse::<u32>()
                        .map_err(|_| Error::InvalidParameter(format!("bad grid size in `{text}`")))?,
                };
                if q == 0 {
                    return Err(Error::InvalidParameter("distribution grid q must be positive".into()));
                }
                return Ok(FunctorKind::Distribution { q });
            }
            _ => return Err(Error::InvalidParameter(format!("unknown functor `{text}`"))),
        };
        if arg.is_some() {
            return Err(Error::InvalidParameter(format!("functor `{head}` takes no parameter")));
        }
        Ok(kind)
    }

    /// Finite in the sense that `T S` is finite whenever `S` is. All
    /// built-ins qualify; the distribution functor is grid-restricted.
    pub fn is_finite(self) -> bool {
        true
    }
}

impl fmt::Display for FunctorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctorKind::Powerset => f.write_str("powerset"),
            FunctorKind::FuzzyHom => f.write_str("fuzzyhom"),
            FunctorKind::Neighborhood => f.write_str("neighborhood"),
            FunctorKind::Selection => f.write_str("selection"),
            FunctorKind::Distribution { q } => write!(f, "distribution:{q}"),
        }
    }
}

/// One element of `T X`, with members drawn from `E`.
///
/// Shapes produced by [`Shape::map`] may be non-canonical (repeated
/// members, or a neighborhood/selection table over a non-identity `base`).
/// Every lifting evaluates non-canonical shapes to the same value as their
/// canonical form; [`TSet::normalize`] computes that form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Shape<E> {
    Subset(Vec<E>),
    /// Members with non-bot membership degree.
    Fuzzy(Vec<(E, TruthValue)>),
    /// Members with positive weight, in units of `1/q`.
    Dist { q: u32, weights: Vec<(E, u32)> },
    /// `table[h]` is the value at the predicate `h ∘ base`, where `h`
    /// ranges over `Hom(base positions, A)` in canonical order.
    Neigh { base: Vec<E>, table: Arc<[TruthValue]> },
    /// `table[h]` is the id (over `Hom(base positions, A)`) of the selected
    /// fuzzy set for argument `h ∘ base`.
    Select { base: Vec<E>, table: Arc<[u32]> },
}

impl<E> Shape<E> {
    /// Applies `f` to every member without normalizing.
    pub fn map<F, E2>(&self, mut f: F) -> Shape<E2>
    where
        F: FnMut(&E) -> E2,
    {
        match self {
            Shape::Subset(xs) => Shape::Subset(xs.iter().map(&mut f).collect()),
            Shape::Fuzzy(xs) => Shape::Fuzzy(xs.iter().map(|(x, v)| (f(x), *v)).collect()),
            Shape::Dist { q, weights } => Shape::Dist {
                q: *q,
                weights: weights.iter().map(|(x, w)| (f(x), *w)).collect(),
            },
            Shape::Neigh { base, table } => Shape::Neigh {
                base: base.iter().map(&mut f).collect(),
                table: table.clone(),
            },
            Shape::Select { base, table } => Shape::Select {
                base: base.iter().map(&mut f).collect(),
                table: table.clone(),
            },
        }
    }

    pub fn members(&self) -> Vec<&E> {
        match self {
            Shape::Subset(xs) => xs.iter().collect(),
            Shape::Fuzzy(xs) => xs.iter().map(|(x, _)| x).collect(),
            Shape::Dist { weights, .. } => weights.iter().map(|(x, _)| x).collect(),
            Shape::Neigh { base, .. } | Shape::Select { base, .. } => base.iter().collect(),
        }
    }

    /// Rewrites members as positions into [`Shape::members`].
    pub fn localize(&self) -> (Shape<usize>, Vec<&E>) {
        let members = self.members();
        let mut next = 0usize;
        let local = self.map(|_| {
            next += 1;
            next - 1
        });
        (local, members)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Shape::Subset(_) => "subset",
            Shape::Fuzzy(_) => "fuzzy subset",
            Shape::Dist { .. } => "distribution",
            Shape::Neigh { .. } => "neighborhood",
            Shape::Select { .. } => "selection function",
        }
    }
}

impl Shape<usize> {
    /// Sorts and merges list-like shapes; leaves tables untouched.
    pub fn tidy(self, lat: &ResiduatedLattice) -> Shape<usize> {
        match self {
            Shape::Subset(mut xs) => {
                xs.sort_unstable();
                xs.dedup();
                Shape::Subset(xs)
            }
            Shape::Fuzzy(xs) => {
                let mut acc: BTreeMap<usize, TruthValue> = BTreeMap::new();
                for (x, v) in xs {
                    let e = acc.entry(x).or_insert(lat.bot());
                    *e = lat.join(*e, v);
                }
                Shape::Fuzzy(acc.into_iter().filter(|(_, v)| *v != lat.bot()).collect())
            }
            Shape::Dist { q, weights } => {
                let mut acc: BTreeMap<usize, u32> = BTreeMap::new();
                for (x, w) in weights {
                    *acc.entry(x).or_insert(0) += w;
                }
                Shape::Dist {
                    q,
                    weights: acc.into_iter().filter(|(_, w)| *w > 0).collect(),
                }
            }
            other => other,
        }
    }
}

/// Cardinality of an image, exact when it fits in `u128`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cardinality {
    Exact(u128),
    Huge(String),
}

impl Cardinality {
    pub fn exact(&self) -> Option<u128> {
        match self {
            Cardinality::Exact(n) => Some(*n),
            Cardinality::Huge(_) => None,
        }
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinality::Exact(n) => write!(f, "{n}"),
            Cardinality::Huge(s) => f.write_str(s),
        }
    }
}

/// Caps on enumeration work.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Largest set that may be enumerated in full.
    pub max_elements: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_elements: 1_000_000 }
    }
}

impl Budget {
    pub fn admit(&self, what: &str, card: &Cardinality) -> Result<u64> {
        match card.exact() {
            Some(n) if n <= self.max_elements as u128 => Ok(n as u64),
            _ => Err(Error::Budget {
                what: what.to_string(),
                cardinality: card.to_string(),
                cap: self.max_elements,
            }),
        }
    }
}

fn checked_pow(base: u128, exp: u128) -> Option<u128> {
    if exp > u32::MAX as u128 {
        return if base <= 1 { Some(base) } else { None };
    }
    base.checked_pow(exp as u32)
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n.saturating_sub(k));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Number of weak compositions of `total` into `parts` parts.
fn compositions(total: u64, parts: usize) -> u128 {
    if parts == 0 {
        return u128::from(total == 0);
    }
    binomial(total as u128 + parts as u128 - 1, parts as u128 - 1).unwrap_or(u128::MAX)
}

/// `|T n|` for a built-in functor over an `a`-element algebra.
pub fn cardinality(kind: FunctorKind, a: usize, n: usize) -> Cardinality {
    let (a128, n128) = (a as u128, n as u128);
    match kind {
        FunctorKind::Powerset => checked_pow(2, n128)
            .map(Cardinality::Exact)
            .unwrap_or_else(|| Cardinality::Huge(format!("2^{n}"))),
        FunctorKind::FuzzyHom => checked_pow(a128, n128)
            .map(Cardinality::Exact)
            .unwrap_or_else(|| Cardinality::Huge(format!("{a}^{n}"))),
        FunctorKind::Neighborhood => match checked_pow(a128, n128) {
            Some(h) => checked_pow(a128, h)
                .map(Cardinality::Exact)
                .unwrap_or_else(|| Cardinality::Huge(format!("{a}^{h}"))),
            None => Cardinality::Huge(format!("{a}^({a}^{n})")),
        },
        FunctorKind::Selection => match checked_pow(a128, n128) {
            Some(h) => checked_pow(h, h)
                .map(Cardinality::Exact)
                .unwrap_or_else(|| Cardinality::Huge(format!("{h}^{h}"))),
            None => Cardinality::Huge(format!("({a}^{n})^({a}^{n})")),
        },
        FunctorKind::Distribution { q } => {
            if n == 0 {
                return Cardinality::Exact(0);
            }
            binomial(q as u128 + n128 - 1, n128 - 1)
                .map(Cardinality::Exact)
                .unwrap_or_else(|| Cardinality::Huge(format!("C({},{})", q as usize + n - 1, n - 1)))
        }
    }
}

/// Id of the function `i -> values[i]` in `Hom(len, A)`.
pub fn function_index(values: impl IntoIterator<Item = TruthValue>, a: usize) -> u64 {
    let mut id = 0u64;
    let mut scale = 1u64;
    for v in values {
        id += v.index() as u64 * scale;
        scale = scale.wrapping_mul(a as u64);
    }
    id
}

/// Inverse of [`function_index`].
pub fn function_decode(mut id: u64, len: usize, a: usize) -> Vec<TruthValue> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(TruthValue((id % a as u64) as u16));
        id /= a as u64;
    }
    out
}

/// Every function `{0..n} -> {0..m}` as a lookup vector, little-endian order.
pub fn all_functions(n: usize, m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return if n == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let total = (m as u64).pow(n as u32);
    (0..total)
        .map(|mut id| {
            (0..n)
                .map(|_| {
                    let d = (id % m as u64) as usize;
                    id /= m as u64;
                    d
                })
                .collect()
        })
        .collect()
}

/// An enumerated image `T n` of a built-in functor.
#[derive(Clone, Debug)]
pub struct TSet {
    kind: FunctorKind,
    lattice: Arc<ResiduatedLattice>,
    base: usize,
    size: u64,
    /// `|A|^base`, the number of predicates on the base set.
    preds: u64,
}

impl TSet {
    pub fn kind(&self) -> FunctorKind {
        self.kind
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn lattice(&self) -> &Arc<ResiduatedLattice> {
        &self.lattice
    }

    fn a(&self) -> usize {
        self.lattice.size()
    }

    pub fn decode(&self, id: u64) -> Shape<usize> {
        debug_assert!(id < self.size, "id {id} outside T{} of size {}", self.base, self.size);
        let a = self.a() as u64;
        match self.kind {
            FunctorKind::Powerset => Shape::Subset((0..self.base).filter(|x| id >> x & 1 == 1).collect()),
            FunctorKind::FuzzyHom => {
                let bot = self.lattice.bot();
                Shape::Fuzzy(
                    function_decode(id, self.base, self.a())
                        .into_iter()
                        .enumerate()
                        .filter(|(_, v)| *v != bot)
                        .collect(),
                )
            }
            FunctorKind::Neighborhood => {
                let mut rest = id;
                let table: Vec<TruthValue> = (0..self.preds)
                    .map(|_| {
                        let d = rest % a;
                        rest /= a;
                        TruthValue(d as u16)
                    })
                    .collect();
                Shape::Neigh {
                    base: (0..self.base).collect(),
                    table: table.into(),
                }
            }
            FunctorKind::Selection => {
                let mut rest = id;
                let table: Vec<u32> = (0..self.preds)
                    .map(|_| {
                        let d = rest % self.preds;
                        rest /= self.preds;
                        d as u32
                    })
                    .collect();
                Shape::Select {
                    base: (0..self.base).collect(),
                    table: table.into(),
                }
            }
            FunctorKind::Distribution { q } => {
                let mut rest = id as u128;
                let mut left = q as u64;
                let mut weights = Vec::new();
                for x in 0..self.base {
                    let parts_after = self.base - x - 1;
                    let w = if parts_after == 0 {
                        left
                    } else {
                        let mut chosen = 0;
                        for v in (0..=left).rev() {
                            let c = compositions(left - v, parts_after);
                            if rest < c {
                                chosen = v;
                                break;
                            }
                            rest -= c;
                        }
                        chosen
                    };
                    if w > 0 {
                        weights.push((x, w as u32));
                    }
                    left -= w;
                }
                Shape::Dist { q, weights }
            }
        }
    }

    /// Id of a canonical shape. Use [`TSet::intern`] for arbitrary shapes.
    pub fn encode(&self, shape: &Shape<usize>) -> u64 {
        let a = self.a() as u64;
        match shape {
            Shape::Subset(xs) => xs.iter().fold(0u64, |acc, x| acc | 1 << x),
            Shape::Fuzzy(xs) => xs
                .iter()
                .map(|(x, v)| v.index() as u64 * a.pow(*x as u32))
                .sum(),
            Shape::Neigh { table, .. } => {
                let mut id = 0u64;
                for v in table.iter().rev() {
                    id = id * a + v.index() as u64;
                }
                id
            }
            Shape::Select { table, .. } => {
                let mut id = 0u64;
                for v in table.iter().rev() {
                    id = id * self.preds + *v as u64;
                }
                id
            }
            Shape::Dist { q, weights } => {
                let mut dense = vec![0u64; self.base];
                for (x, w) in weights {
                    dense[*x] = *w as u64;
                }
                let mut rank: u128 = 0;
                let mut left = *q as u64;
                for (x, w) in dense.iter().enumerate() {
                    let parts_after = self.base - x - 1;
                    for v in (*w + 1..=left).rev() {
                        rank += compositions(left - v, parts_after);
                    }
                    left -= w;
                }
                rank as u64
            }
        }
    }

    /// Canonical form over `0..base`: the image of `shape` under the
    /// functor's action, with every member already in this set.
    pub fn normalize(&self, shape: Shape<usize>) -> Shape<usize> {
        let a = self.a();
        match shape {
            Shape::Neigh { base, table } => {
                if is_identity(&base, self.base) {
                    return Shape::Neigh { base, table };
                }
                // table'(h) = table(h ∘ base)
                let out: Vec<TruthValue> = (0..self.preds)
                    .map(|h| {
                        let hv = function_decode(h, self.base, a);
                        table[function_index(base.iter().map(|&b| hv[b]), a) as usize]
                    })
                    .collect();
                Shape::Neigh {
                    base: (0..self.base).collect(),
                    table: out.into(),
                }
            }
            Shape::Select { base, table } => {
                if is_identity(&base, self.base) {
                    return Shape::Select { base, table };
                }
                // s'(h)(y) = join over positions i with base[i] = y of s(h ∘ base)(i)
                let lat = &self.lattice;
                let out: Vec<u32> = (0..self.preds)
                    .map(|h| {
                        let hv = function_decode(h, self.base, a);
                        let g = function_index(base.iter().map(|&b| hv[b]), a);
                        let s = function_decode(table[g as usize] as u64, base.len(), a);
                        let mut y = vec![lat.bot(); self.base];
                        for (i, &b) in base.iter().enumerate() {
                            y[b] = lat.join(y[b], s[i]);
                        }
                        function_index(y, a) as u32
                    })
                    .collect();
                Shape::Select {
                    base: (0..self.base).collect(),
                    table: out.into(),
                }
            }
            other => other.tidy(&self.lattice),
        }
    }

    pub fn intern(&self, shape: Shape<usize>) -> u64 {
        self.encode(&self.normalize(shape))
    }

    /// The action of `T` on `f: base -> to.base` at element `x`.
    pub fn map_element(&self, f: &[usize], to: &TSet, x: u64) -> u64 {
        to.intern(self.decode(x).map(|e| f[*e]))
    }

    /// The least canonical element: empty set, constant-bot predicate or
    /// table, identity selection table, or point mass on element 0.
    pub fn minimal(&self) -> Result<Shape<usize>> {
        let bot = self.lattice.bot();
        Ok(match self.kind {
            FunctorKind::Powerset => Shape::Subset(Vec::new()),
            FunctorKind::FuzzyHom => Shape::Fuzzy(Vec::new()),
            FunctorKind::Neighborhood => Shape::Neigh {
                base: (0..self.base).collect(),
                table: vec![bot; self.preds as usize].into(),
            },
            FunctorKind::Selection => Shape::Select {
                base: (0..self.base).collect(),
                table: (0..self.preds as u32).collect::<Vec<_>>().into(),
            },
            FunctorKind::Distribution { q } => {
                if self.base == 0 {
                    return Err(Error::InvalidInput("no distribution over the empty set".into()));
                }
                Shape::Dist {
                    q,
                    weights: vec![(0, q)],
                }
            }
        })
    }

    /// Human-readable rendering with members shown by `member`.
    pub fn describe(&self, shape: &Shape<usize>, member: &dyn Fn(usize) -> String) -> String {
        describe_shape(&self.lattice, shape, &|x: &usize| member(*x))
    }

    pub fn describe_id(&self, id: u64) -> String {
        self.describe(&self.decode(id), &|x| x.to_string())
    }

    pub fn iter(&self) -> std::ops::Range<u64> {
        0..self.size
    }
}

fn is_identity(base: &[usize], n: usize) -> bool {
    base.len() == n && base.iter().enumerate().all(|(i, b)| i == *b)
}

pub(crate) fn describe_shape<E>(lat: &ResiduatedLattice, shape: &Shape<E>, member: &dyn Fn(&E) -> String) -> String {
    match shape {
        Shape::Subset(xs) if xs.is_empty() => "∅".to_string(),
        Shape::Subset(xs) => format!("{{{}}}", xs.iter().map(member).collect::<Vec<_>>().join(", ")),
        Shape::Fuzzy(xs) if xs.is_empty() => "∅".to_string(),
        Shape::Fuzzy(xs) => format!(
            "{{{}}}",
            xs.iter()
                .map(|(x, v)| format!("{}: {}", member(x), lat.label(*v)))
                .collect::<Vec<_>>()
                .join(", ")
        ),
        Shape::Dist { q, weights } => format!(
            "μ{{{}}}",
            weights
                .iter()
                .map(|(x, w)| format!("{}: {}", member(x), format_rational(&Rational::new(*w as i64, *q as i64))))
                .collect::<Vec<_>>()
                .join(", ")
        ),
        Shape::Neigh { base, table } => format!(
            "N[{}; {}]",
            base.iter().map(member).collect::<Vec<_>>().join(", "),
            table.iter().map(|v| lat.label(*v)).collect::<Vec<_>>().join(" ")
        ),
        Shape::Select { base, table } => format!(
            "S[{}; {}]",
            base.iter().map(member).collect::<Vec<_>>().join(", "),
            table.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
        ),
    }
}

/// Dense rendering of a distribution over `0..base`, e.g. `(1/2, 1/2)`.
pub fn dense_distribution(shape: &Shape<usize>, base: usize) -> Option<String> {
    let Shape::Dist { q, weights } = shape else {
        return None;
    };
    let mut dense = vec![0u32; base];
    for (x, w) in weights {
        dense[*x] += w;
    }
    Some(format!(
        "({})",
        dense
            .iter()
            .map(|w| format_rational(&Rational::new(*w as i64, *q as i64)))
            .collect::<Vec<_>>()
            .join(", ")
    ))
}

/// A functor on finite sets given by its object and morphism actions.
pub trait SetFunctor {
    fn label(&self) -> String;

    /// `T n`, refusing images larger than the budget.
    fn image(&self, base: usize, budget: &Budget) -> Result<TSet>;

    /// `T f` at `x`, for `f: from.base -> to.base`.
    fn map_element(&self, f: &[usize], from: &TSet, to: &TSet, x: u64) -> u64;
}

/// A built-in functor over a fixed algebra.
#[derive(Clone, Debug)]
pub struct FiniteFunctor {
    kind: FunctorKind,
    lattice: Arc<ResiduatedLattice>,
}

impl FiniteFunctor {
    pub fn new(kind: FunctorKind, lattice: Arc<ResiduatedLattice>) -> Self {
        FiniteFunctor { kind, lattice }
    }

    pub fn kind(&self) -> FunctorKind {
        self.kind
    }

    pub fn lattice(&self) -> &Arc<ResiduatedLattice> {
        &self.lattice
    }

    pub fn cardinality(&self, base: usize) -> Cardinality {
        cardinality(self.kind, self.lattice.size(), base)
    }

    /// `T n` without a budget check; ids must still fit in 64 bits.
    pub fn image_unbounded(&self, base: usize) -> Result<TSet> {
        let card = self.cardinality(base);
        let size = match card.exact() {
            Some(n) if n <= u64::MAX as u128 => n as u64,
            _ => {
                return Err(Error::Budget {
                    what: format!("{} of a {base}-element set", self.kind),
                    cardinality: card.to_string(),
                    cap: u64::MAX,
                })
            }
        };
        let preds = match self.kind {
            FunctorKind::Neighborhood | FunctorKind::Selection => {
                checked_pow(self.lattice.size() as u128, base as u128)
                    .filter(|p| *p <= u32::MAX as u128)
                    .ok_or_else(|| Error::Budget {
                        what: format!("predicates on a {base}-element set"),
                        cardinality: format!("{}^{base}", self.lattice.size()),
                        cap: u32::MAX as u64,
                    })? as u64
            }
            _ => checked_pow(self.lattice.size() as u128, base as u128).unwrap_or(u128::MAX).min(u64::MAX as u128) as u64,
        };
        Ok(TSet {
            kind: self.kind,
            lattice: self.lattice.clone(),
            base,
            size,
            preds,
        })
    }
}

impl SetFunctor for FiniteFunctor {
    fn label(&self) -> String {
        format!("{} over {}", self.kind, self.lattice.name())
    }

    fn image(&self, base: usize, budget: &Budget) -> Result<TSet> {
        budget.admit(&format!("{} of a {base}-element set", self.kind), &self.cardinality(base))?;
        self.image_unbounded(base)
    }

    fn map_element(&self, f: &[usize], from: &TSet, to: &TSet, x: u64) -> u64 {
        from.map_element(f, to, x)
    }
}

/// The enumerated set `Hom(P, A)` of valuations.
#[derive(Clone, Debug)]
pub struct ValuationSet {
    props: Vec<String>,
    lattice: Arc<ResiduatedLattice>,
    size: u64,
}

impl ValuationSet {
    pub fn new(props: Vec<String>, lattice: Arc<ResiduatedLattice>, budget: &Budget) -> Result<Self> {
        let card = checked_pow(lattice.size() as u128, props.len() as u128)
            .map(Cardinality::Exact)
            .unwrap_or_else(|| Cardinality::Huge(format!("{}^{}", lattice.size(), props.len())));
        let size = budget.admit("Hom(P, A)", &card)?;
        Ok(ValuationSet { props, lattice, size })
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn props(&self) -> &[String] {
        &self.props
    }

    pub fn prop_index(&self, name: &str) -> Option<usize> {
        self.props.iter().position(|p| p == name)
    }

    pub fn decode(&self, mut id: u64) -> Vec<TruthValue> {
        let a = self.lattice.size() as u64;
        let mut out = vec![TruthValue(0); self.props.len()];
        for slot in out.iter_mut().rev() {
            *slot = TruthValue((id % a) as u16);
            id /= a;
        }
        out
    }

    /// Value of proposition number `p` in valuation `id`.
    pub fn value(&self, id: u64, p: usize) -> TruthValue {
        let a = self.lattice.size() as u64;
        let shift = (self.props.len() - 1 - p) as u32;
        TruthValue(((id / a.pow(shift)) % a) as u16)
    }

    pub fn encode(&self, values: &[TruthValue]) -> u64 {
        let a = self.lattice.size() as u64;
        values.iter().fold(0, |acc, v| acc * a + v.index() as u64)
    }

    pub fn describe(&self, id: u64) -> String {
        self.decode(id)
            .iter()
            .zip(&self.props)
            .map(|(v, p)| format!("{p}={}", self.lattice.label(*v)))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// `T_P S = Hom(P, A) × T S`.
#[derive(Clone, Debug)]
pub struct TpSet {
    pub valuations: ValuationSet,
    pub inner: TSet,
}

impl TpSet {
    pub fn size(&self) -> u64 {
        self.valuations.size() * self.inner.size()
    }

    pub fn decode(&self, id: u64) -> (u64, Shape<usize>) {
        let t = self.inner.size();
        (id / t, self.inner.decode(id % t))
    }

    pub fn split(&self, id: u64) -> (u64, u64) {
        let t = self.inner.size();
        (id / t, id % t)
    }

    pub fn pair(&self, nu: u64, delta: u64) -> u64 {
        nu * self.inner.size() + delta
    }

    pub fn intern(&self, nu: u64, shape: Shape<usize>) -> u64 {
        self.pair(nu, self.inner.intern(shape))
    }

    /// `(id × T f)` at `x`: keeps the valuation, maps the structure.
    pub fn map_element(&self, f: &[usize], to: &TpSet, x: u64) -> u64 {
        let (nu, d) = self.split(x);
        to.pair(nu, self.inner.map_element(f, &to.inner, d))
    }
}

/// `T_P S` for a built-in functor.
pub fn tp_object(functor: &FiniteFunctor, valuations: &ValuationSet, base: usize, budget: &Budget) -> Result<TpSet> {
    let inner = functor.image(base, budget)?;
    let card = Cardinality::Exact(valuations.size() as u128 * inner.size() as u128);
    budget.admit(&format!("T_P of a {base}-element set"), &card)?;
    Ok(TpSet {
        valuations: valuations.clone(),
        inner,
    })
}

/// Exhaustively checks `T id = id` and `T(g ∘ f) = T g ∘ T f` on all sets
/// of size at most `bound`.
pub fn check_functor_laws(functor: &dyn SetFunctor, bound: usize, budget: &Budget) -> Result<ValidationReport> {
    let mut report = ValidationReport::new(format!("functor laws for {} up to size {bound}", functor.label()));
    let images: Vec<TSet> = (0..=bound).map(|n| functor.image(n, budget)).collect::<Result<_>>()?;

    let mut cases = 0u64;
    let mut witness = None;
    'id: for img in &images {
        let id: Vec<usize> = (0..img.base()).collect();
        for x in img.iter() {
            cases += 1;
            let y = functor.map_element(&id, img, img, x);
            if y != x {
                witness = Some(format!("|S|={}, x={} maps to {}", img.base(), img.describe_id(x), img.describe_id(y)));
                break 'id;
            }
        }
    }
    report.push(match witness {
        None => Check::pass("identity law", cases),
        Some(w) => Check::fail("identity law", cases, w),
    });

    let mut cases = 0u64;
    let mut witness = None;
    'comp: for a in &images {
        for b in &images {
            for c in &images {
                let fs = all_functions(a.base(), b.base());
                let gs = all_functions(b.base(), c.base());
                for f in &fs {
                    for g in &gs {
                        let gf: Vec<usize> = f.iter().map(|&y| g[y]).collect();
                        for x in a.iter() {
                            cases += 1;
                            let lhs = functor.map_element(&gf, a, c, x);
                            let rhs = functor.map_element(g, b, c, functor.map_element(f, a, b, x));
                            if lhs != rhs {
                                witness = Some(format!(
                                    "f={f:?}, g={g:?}, x={}: T(g∘f)x={} but Tg(Tf x)={}",
                                    a.describe_id(x),
                                    c.describe_id(lhs),
                                    c.describe_id(rhs)
                                ));
                                break 'comp;
                            }
                        }
                    }
                }
            }
        }
    }
    report.push(match witness {
        None => Check::pass("composition law", cases),
        Some(w) => Check::fail("composition law", cases, w),
    });
    report.note("bounded certificate: laws verified only on the enumerated sets");
    Ok(report)
}
