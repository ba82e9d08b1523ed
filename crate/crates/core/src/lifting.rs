//! Predicate liftings and their bounded certification.
//!
//! A lifting of arity `k` turns `k` predicates `S -> A` into one predicate
//! `T S -> A`. Evaluators work on a single [`Shape`] at a time: `args[i][x]`
//! is the value of argument `i` at member `x`.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{
    first_alpha_gap, format_rational, parse_rational, FuzzySubset, Rational, ResiduatedLattice, TruthValue,
};
use crate::error::{Error, Result};
use crate::functor::{all_functions, function_decode, function_index, FiniteFunctor, FunctorKind, SetFunctor, Shape, TSet, TpSet};
use crate::report::{Check, Coverage, ValidationReport};
use crate::syntax::ModalityTable;

pub trait PredicateLifting: Send + Sync {
    fn name(&self) -> String;

    fn arity(&self) -> usize;

    /// Whether this lifting is defined for `kind`.
    fn binds(&self, kind: FunctorKind) -> bool;

    /// Name of the functor family, for messages and listings.
    fn functor_name(&self) -> String;

    /// Defining formula, shown by the `liftings` listing.
    fn formula(&self) -> String;

    /// Value at one element of `T S`. Non-canonical shapes must give the
    /// same value as their canonical form.
    fn eval(&self, lat: &ResiduatedLattice, shape: &Shape<usize>, args: &[&[TruthValue]]) -> TruthValue;
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum BuiltinLifting {
    PowersetBox,
    PowersetDiamond,
    FuzzyBox,
    FuzzyDiamond,
    NeighborhoodBox,
    /// Binary conditional over selection functions.
    Conditional,
    /// Expected value, floored onto the carrier.
    Probably,
    /// "More than `r`": join of the levels whose cut has mass above `r`.
    MoreThan(Rational),
}

impl BuiltinLifting {
    /// Every fixed lifting shipped for `kind`. `M[r]` is parametric and is
    /// represented here by `r = 1/2`.
    pub fn shipped(kind: FunctorKind, lat: &ResiduatedLattice) -> Vec<BuiltinLifting> {
        match kind {
            FunctorKind::Powerset => vec![BuiltinLifting::PowersetBox, BuiltinLifting::PowersetDiamond],
            FunctorKind::FuzzyHom => vec![BuiltinLifting::FuzzyBox, BuiltinLifting::FuzzyDiamond],
            FunctorKind::Neighborhood => vec![BuiltinLifting::NeighborhoodBox],
            FunctorKind::Selection => vec![BuiltinLifting::Conditional],
            FunctorKind::Distribution { .. } => {
                let mut v = Vec::new();
                if lat.has_embedding() {
                    v.push(BuiltinLifting::Probably);
                }
                v.push(BuiltinLifting::MoreThan(Rational::new(1, 2)));
                v
            }
        }
    }

    /// Looks up a modality name for the session functor.
    pub fn resolve(name: &str, kind: FunctorKind, lat: &ResiduatedLattice) -> Result<BuiltinLifting> {
        let found = match (name, kind) {
            ("box", FunctorKind::Powerset) => Some(BuiltinLifting::PowersetBox),
            ("dia", FunctorKind::Powerset) => Some(BuiltinLifting::PowersetDiamond),
            ("box", FunctorKind::FuzzyHom) => Some(BuiltinLifting::FuzzyBox),
            ("dia", FunctorKind::FuzzyHom) => Some(BuiltinLifting::FuzzyDiamond),
            ("box", FunctorKind::Neighborhood) => Some(BuiltinLifting::NeighborhoodBox),
            ("cond", FunctorKind::Selection) => Some(BuiltinLifting::Conditional),
            ("P", FunctorKind::Distribution { .. }) => {
                if !lat.has_embedding() {
                    return Err(Error::InvalidParameter(format!(
                        "modality `P` needs a numeric embedding of {}",
                        lat.name()
                    )));
                }
                Some(BuiltinLifting::Probably)
            }
            (_, FunctorKind::Distribution { .. }) => parse_threshold(name).map(BuiltinLifting::MoreThan),
            _ => None,
        };
        if let Some(l) = found {
            return Ok(l);
        }
        let home = match name {
            "box" | "dia" => Some("powerset, fuzzyhom or neighborhood"),
            "cond" => Some("selection"),
            "P" => Some("distribution"),
            _ if parse_threshold(name).is_some() => Some("distribution"),
            _ => None,
        };
        match home {
            Some(expected) => Err(Error::FunctorMismatch {
                lifting: name.to_string(),
                expected: expected.to_string(),
                found: kind.to_string(),
            }),
            None => Err(Error::UnknownModality(name.to_string())),
        }
    }
}

/// Parses `M[n/d]` with `0 <= n/d <= 1`.
fn parse_threshold(name: &str) -> Option<Rational> {
    let inner = name.strip_prefix("M[")?.strip_suffix(']')?;
    let r = parse_rational(inner)?;
    (r >= Rational::from_integer(0) && r <= Rational::from_integer(1)).then_some(r)
}

/// `Σ f(x)·μ(x)` as an exact rational, or `None` without an embedding.
pub fn expectation(lat: &ResiduatedLattice, shape: &Shape<usize>, f: &[TruthValue]) -> Option<Rational> {
    let Shape::Dist { q, weights } = shape else {
        return None;
    };
    let mut acc = Rational::from_integer(0);
    for (x, w) in weights {
        acc += lat.value(f[*x])? * Rational::new(*w as i64, *q as i64);
    }
    Some(acc)
}

impl PredicateLifting for BuiltinLifting {
    fn name(&self) -> String {
        match self {
            BuiltinLifting::PowersetBox | BuiltinLifting::FuzzyBox | BuiltinLifting::NeighborhoodBox => "box".into(),
            BuiltinLifting::PowersetDiamond | BuiltinLifting::FuzzyDiamond => "dia".into(),
            BuiltinLifting::Conditional => "cond".into(),
            BuiltinLifting::Probably => "P".into(),
            BuiltinLifting::MoreThan(r) => format!("M[{}/{}]", r.numer(), r.denom()),
        }
    }

    fn arity(&self) -> usize {
        match self {
            BuiltinLifting::Conditional => 2,
            _ => 1,
        }
    }

    fn binds(&self, kind: FunctorKind) -> bool {
        matches!(
            (self, kind),
            (BuiltinLifting::PowersetBox | BuiltinLifting::PowersetDiamond, FunctorKind::Powerset)
                | (BuiltinLifting::FuzzyBox | BuiltinLifting::FuzzyDiamond, FunctorKind::FuzzyHom)
                | (BuiltinLifting::NeighborhoodBox, FunctorKind::Neighborhood)
                | (BuiltinLifting::Conditional, FunctorKind::Selection)
                | (BuiltinLifting::Probably | BuiltinLifting::MoreThan(_), FunctorKind::Distribution { .. })
        )
    }

    fn functor_name(&self) -> String {
        match self {
            BuiltinLifting::PowersetBox | BuiltinLifting::PowersetDiamond => "powerset",
            BuiltinLifting::FuzzyBox | BuiltinLifting::FuzzyDiamond => "fuzzyhom",
            BuiltinLifting::NeighborhoodBox => "neighborhood",
            BuiltinLifting::Conditional => "selection",
            BuiltinLifting::Probably | BuiltinLifting::MoreThan(_) => "distribution",
        }
        .into()
    }

    fn formula(&self) -> String {
        match self {
            BuiltinLifting::PowersetBox => "box(f)(X) = meet of f(x) over x in X".into(),
            BuiltinLifting::PowersetDiamond => "dia(f)(X) = join of f(x) over x in X".into(),
            BuiltinLifting::FuzzyBox => "box(f)(g) = meet of g(x) -> f(x)".into(),
            BuiltinLifting::FuzzyDiamond => "dia(f)(g) = join of g(x) & f(x)".into(),
            BuiltinLifting::NeighborhoodBox => "box(f)(N) = N(f)".into(),
            BuiltinLifting::Conditional => "cond(f, g)(s) = meet of s(f)(x) -> g(x)".into(),
            BuiltinLifting::Probably => "P(f)(mu) = floor of sum f(x) * mu(x)".into(),
            BuiltinLifting::MoreThan(r) => {
                format!("M[{}](f)(mu) = join of a with mu(f_a) > {}", format_rational(r), format_rational(r))
            }
        }
    }

    fn eval(&self, lat: &ResiduatedLattice, shape: &Shape<usize>, args: &[&[TruthValue]]) -> TruthValue {
        let f = args[0];
        match (self, shape) {
            (BuiltinLifting::PowersetBox, Shape::Subset(xs)) => lat.meet_all(xs.iter().map(|x| f[*x])),
            (BuiltinLifting::PowersetDiamond, Shape::Subset(xs)) => lat.join_all(xs.iter().map(|x| f[*x])),
            (BuiltinLifting::FuzzyBox, Shape::Fuzzy(xs)) => lat.meet_all(xs.iter().map(|(x, g)| lat.implies(*g, f[*x]))),
            (BuiltinLifting::FuzzyDiamond, Shape::Fuzzy(xs)) => lat.join_all(xs.iter().map(|(x, g)| lat.fuse(*g, f[*x]))),
            (BuiltinLifting::NeighborhoodBox, Shape::Neigh { base, table }) => {
                table[function_index(base.iter().map(|b| f[*b]), lat.size()) as usize]
            }
            (BuiltinLifting::Conditional, Shape::Select { base, table }) => {
                let g = args[1];
                let chosen = table[function_index(base.iter().map(|b| f[*b]), lat.size()) as usize];
                let s = function_decode(chosen as u64, base.len(), lat.size());
                // positions sharing a member are joined first, matching the canonical form
                let mut merged: BTreeMap<usize, TruthValue> = BTreeMap::new();
                for (i, b) in base.iter().enumerate() {
                    let e = merged.entry(*b).or_insert(lat.bot());
                    *e = lat.join(*e, s[i]);
                }
                lat.meet_all(merged.iter().map(|(b, v)| lat.implies(*v, g[*b])))
            }
            (BuiltinLifting::Probably, Shape::Dist { .. }) => {
                let e = expectation(lat, shape, f).expect("P requires an embedding");
                lat.floor_rational(e).expect("embedding contains 0")
            }
            (BuiltinLifting::MoreThan(r), Shape::Dist { q, weights }) => lat.join_all(lat.elements().filter(|alpha| {
                let mass: u32 = weights.iter().filter(|(x, _)| lat.leq(*alpha, f[*x])).map(|(_, w)| w).sum();
                Rational::new(mass as i64, *q as i64) > *r
            })),
            (l, s) => panic!("lifting {} applied to a {}", l.name(), s.kind_name()),
        }
    }
}

impl fmt::Display for BuiltinLifting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// One row of the `liftings` listing.
#[derive(Clone, Debug, Serialize)]
pub struct LiftingInfo {
    pub name: String,
    pub arity: usize,
    pub functor: String,
    pub formula: String,
}

/// The modalities available for one functor over one algebra; the parser
/// takes its modality names from here.
#[derive(Clone, Debug)]
pub struct LiftingRegistry {
    kind: FunctorKind,
    lattice: std::sync::Arc<ResiduatedLattice>,
}

impl LiftingRegistry {
    pub fn new(functor: &FiniteFunctor) -> Self {
        LiftingRegistry {
            kind: functor.kind(),
            lattice: functor.lattice().clone(),
        }
    }

    pub fn kind(&self) -> FunctorKind {
        self.kind
    }

    pub fn resolve(&self, name: &str) -> Result<BuiltinLifting> {
        BuiltinLifting::resolve(name, self.kind, &self.lattice)
    }

    pub fn list(&self) -> Vec<LiftingInfo> {
        BuiltinLifting::shipped(self.kind, &self.lattice)
            .into_iter()
            .map(|l| {
                let name = match l {
                    BuiltinLifting::MoreThan(_) => "M[r]".to_string(),
                    _ => l.name(),
                };
                let formula = match l {
                    BuiltinLifting::MoreThan(_) => "M[r](f)(mu) = join of a with mu(f_a) > r, r rational in [0,1]".to_string(),
                    _ => l.formula(),
                };
                LiftingInfo {
                    name,
                    arity: l.arity(),
                    functor: l.functor_name(),
                    formula,
                }
            })
            .collect()
    }
}

impl ModalityTable for LiftingRegistry {
    fn arity(&self, name: &str) -> Option<usize> {
        self.resolve(name).ok().map(|l| l.arity())
    }
}

fn check_binding(lifting: &dyn PredicateLifting, kind: FunctorKind) -> Result<()> {
    if lifting.binds(kind) {
        Ok(())
    } else {
        Err(Error::FunctorMismatch {
            lifting: lifting.name(),
            expected: lifting.functor_name(),
            found: kind.to_string(),
        })
    }
}

/// `λ_S(args)` as a fuzzy subset of `T S`.
pub fn apply_lifting(lifting: &dyn PredicateLifting, tset: &TSet, args: &[FuzzySubset]) -> Result<FuzzySubset> {
    check_binding(lifting, tset.kind())?;
    if args.len() != lifting.arity() {
        return Err(Error::Arity {
            name: lifting.name(),
            expected: lifting.arity(),
            found: args.len(),
        });
    }
    if let Some(a) = args.iter().find(|a| a.domain_size() != tset.base()) {
        return Err(Error::InvalidInput(format!(
            "argument over {} elements for a set of {}",
            a.domain_size(),
            tset.base()
        )));
    }
    let lat = tset.lattice();
    let slices: Vec<&[TruthValue]> = args.iter().map(|a| a.values()).collect();
    Ok(FuzzySubset::new(
        tset.iter().map(|x| lifting.eval(lat, &tset.decode(x), &slices)).collect(),
    ))
}

/// `λ'`: a lifting of `T` extended to `T_P`, ignoring the valuation.
pub struct LiftedModality<'a> {
    lifting: &'a dyn PredicateLifting,
}

pub fn lift_prime(lifting: &dyn PredicateLifting) -> LiftedModality<'_> {
    LiftedModality { lifting }
}

impl LiftedModality<'_> {
    pub fn value_at(&self, tp: &TpSet, args: &[&[TruthValue]], id: u64) -> TruthValue {
        let (_, delta) = tp.decode(id);
        self.lifting.eval(tp.inner.lattice(), &delta, args)
    }

    pub fn apply(&self, tp: &TpSet, args: &[FuzzySubset]) -> Result<FuzzySubset> {
        check_binding(self.lifting, tp.inner.kind())?;
        let slices: Vec<&[TruthValue]> = args.iter().map(|a| a.values()).collect();
        Ok(FuzzySubset::new((0..tp.size()).map(|id| self.value_at(tp, &slices, id)).collect()))
    }
}

/// `λ^p`: the nullary lifting reading proposition `p` off the valuation.
#[derive(Clone, Debug)]
pub struct PropLifting {
    pub prop: String,
    index: usize,
}

impl PropLifting {
    pub fn new(tp_props: &[String], prop: &str) -> Result<Self> {
        let index = tp_props
            .iter()
            .position(|p| p == prop)
            .ok_or_else(|| Error::InvalidInput(format!("unknown proposition `{prop}`")))?;
        Ok(PropLifting {
            prop: prop.to_string(),
            index,
        })
    }

    pub fn value_at(&self, tp: &TpSet, id: u64) -> TruthValue {
        tp.valuations.value(tp.split(id).0, self.index)
    }
}

/// Options for [`check_naturality`].
#[derive(Clone, Copy, Debug)]
pub struct NaturalityOptions {
    /// Largest `|S|`, `|S'|` considered.
    pub bound: usize,
    /// Elements of `T S` visited when `T S` exceeds `max_exhaustive`.
    pub sample: u64,
    pub max_exhaustive: u64,
    pub seed: u64,
}

impl Default for NaturalityOptions {
    fn default() -> Self {
        NaturalityOptions {
            bound: 2,
            sample: 2_000,
            max_exhaustive: 1_000_000,
            seed: 0x5eed,
        }
    }
}

fn hom_tuples(m: usize, a: usize, arity: usize) -> Vec<Vec<Vec<TruthValue>>> {
    let preds: Vec<Vec<TruthValue>> = (0..(a as u64).pow(m as u32)).map(|h| function_decode(h, m, a)).collect();
    let mut out: Vec<Vec<Vec<TruthValue>>> = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                preds.iter().map(move |p| {
                    let mut v = prefix.clone();
                    v.push(p.clone());
                    v
                })
            })
            .collect();
    }
    out
}

fn elements_to_visit(tset: &TSet, opts: &NaturalityOptions) -> (Vec<u64>, Coverage) {
    if tset.size() <= opts.max_exhaustive {
        return (tset.iter().collect(), Coverage::Exhaustive);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ tset.base() as u64);
    let k = opts.sample.min(tset.size()) as usize;
    let mut ids: Vec<u64> = if tset.size() <= usize::MAX as u64 {
        sample(&mut rng, tset.size() as usize, k).into_iter().map(|i| i as u64).collect()
    } else {
        use rand::Rng;
        (0..k).map(|_| rng.gen_range(0..tset.size())).collect()
    };
    ids.sort_unstable();
    ids.dedup();
    let visited = ids.len() as u64;
    (
        ids,
        Coverage::Sampled {
            visited,
            total: tset.size().to_string(),
        },
    )
}

/// Checks `λ_S(h ∘ f) = λ_{S'}(h) ∘ T f` for all `f: S -> S'`, all argument
/// tuples `h` on `S'` and all (or sampled, when `T S` is too large)
/// elements of `T S`, with `|S|, |S'| <= bound`.
pub fn check_naturality(
    lifting: &dyn PredicateLifting,
    functor: &FiniteFunctor,
    opts: &NaturalityOptions,
) -> Result<ValidationReport> {
    check_binding(lifting, functor.kind())?;
    let lat = functor.lattice();
    let mut report = ValidationReport::new(format!(
        "naturality of {} for {} over {} up to size {}",
        lifting.name(),
        functor.kind(),
        lat.name(),
        opts.bound
    ));
    let images: Vec<TSet> = (0..=opts.bound).map(|n| functor.image_unbounded(n)).collect::<Result<_>>()?;
    let mut cases = 0u64;
    let mut witness = None;
    let mut coverage = Coverage::Exhaustive;
    let mut sampled_total = Vec::new();
    'outer: for src in &images {
        let (xs, cov) = elements_to_visit(src, opts);
        if let Coverage::Sampled { visited, total } = &cov {
            sampled_total.push(format!("{visited} of {total} at |S|={}", src.base()));
            coverage = cov.clone();
        }
        let decoded: Vec<Shape<usize>> = xs.iter().map(|x| src.decode(*x)).collect();
        for dst in &images {
            let hs = hom_tuples(dst.base(), lat.size(), lifting.arity());
            for f in all_functions(src.base(), dst.base()) {
                let mapped: Vec<u64> = decoded.iter().map(|s| dst.intern(s.map(|e| f[*e]))).collect();
                let mapped_shapes: Vec<Shape<usize>> = mapped.iter().map(|y| dst.decode(*y)).collect();
                for h in &hs {
                    let pulled: Vec<Vec<TruthValue>> = h.iter().map(|hi| f.iter().map(|y| hi[*y]).collect()).collect();
                    let pulled_args: Vec<&[TruthValue]> = pulled.iter().map(Vec::as_slice).collect();
                    let h_args: Vec<&[TruthValue]> = h.iter().map(Vec::as_slice).collect();
                    for (i, x) in xs.iter().enumerate() {
                        cases += 1;
                        let lhs = lifting.eval(lat, &decoded[i], &pulled_args);
                        let rhs = lifting.eval(lat, &mapped_shapes[i], &h_args);
                        if lhs != rhs {
                            witness = Some(format!(
                                "f={f:?}, h={}, element {} of T{}: {} vs {}",
                                h.iter().map(|hi| FuzzySubset::new(hi.clone()).label(lat)).collect::<Vec<_>>().join(" "),
                                src.describe_id(*x),
                                src.base(),
                                lat.label(lhs),
                                lat.label(rhs)
                            ));
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    let mut check = match witness {
        None => Check::pass("naturality square", cases),
        Some(w) => Check::fail("naturality square", cases, w),
    }
    .with_coverage(coverage);
    if !sampled_total.is_empty() {
        check = check.with_detail(format!("sampled elements: {}", sampled_total.join("; ")));
    }
    report.push(check);
    report.note("bounded certificate: naturality verified only on the enumerated sets");
    Ok(report)
}

/// Pointwise `f <= g` implies `λ(f) <= λ(g)` for unary liftings, over all
/// sets of size at most `bound`.
pub fn check_monotone(lifting: &dyn PredicateLifting, functor: &FiniteFunctor, bound: usize) -> Result<ValidationReport> {
    check_binding(lifting, functor.kind())?;
    if lifting.arity() != 1 {
        return Err(Error::InvalidParameter("monotonicity check covers unary liftings only".into()));
    }
    let lat = functor.lattice();
    let mut report = ValidationReport::new(format!("monotonicity of {} up to size {bound}", lifting.name()));
    let mut cases = 0u64;
    let mut witness = None;
    'outer: for n in 0..=bound {
        let tset = functor.image_unbounded(n)?;
        let preds: Vec<Vec<TruthValue>> = (0..(lat.size() as u64).pow(n as u32)).map(|h| function_decode(h, n, lat.size())).collect();
        let tables: Vec<Vec<TruthValue>> = preds
            .iter()
            .map(|p| tset.iter().map(|x| lifting.eval(lat, &tset.decode(x), &[p])).collect())
            .collect();
        for (i, f) in preds.iter().enumerate() {
            for (j, g) in preds.iter().enumerate() {
                if !f.iter().zip(g).all(|(a, b)| lat.leq(*a, *b)) {
                    continue;
                }
                cases += 1;
                if let Some(x) = (0..tset.size()).find(|x| !lat.leq(tables[i][*x as usize], tables[j][*x as usize])) {
                    witness = Some(format!(
                        "f={} <= g={} but not at {}",
                        FuzzySubset::new(f.clone()).label(lat),
                        FuzzySubset::new(g.clone()).label(lat),
                        tset.describe_id(x)
                    ));
                    break 'outer;
                }
            }
        }
    }
    report.push(match witness {
        None => Check::pass("monotone in its argument", cases),
        Some(w) => Check::fail("monotone in its argument", cases, w),
    });
    Ok(report)
}

/// Which right-hand families [`check_alpha_preservation`] quantifies over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyRange {
    /// All families up to the family-size bound, including the empty one.
    Any,
    /// Singleton families only.
    Singletons,
}

#[derive(Clone, Copy, Debug)]
pub struct PreservationBounds {
    pub set_size: usize,
    pub family_size: usize,
    pub right: FamilyRange,
}

impl Default for PreservationBounds {
    fn default() -> Self {
        PreservationBounds {
            set_size: 2,
            family_size: 2,
            right: FamilyRange::Any,
        }
    }
}

fn families(count: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for fam in &frontier {
            let start = fam.last().map_or(0, |l: &usize| l + 1);
            for i in start..count {
                let mut f = fam.clone();
                f.push(i);
                next.push(f);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Bounded check that `F ⊑_α G` implies `λ F ⊑_α λ G`, where
/// `λ F = { λ(f) | f ∈ F }`. Unary liftings only.
pub fn check_alpha_preservation(
    lifting: &dyn PredicateLifting,
    functor: &FiniteFunctor,
    alpha: TruthValue,
    bounds: &PreservationBounds,
    budget: &crate::functor::Budget,
) -> Result<ValidationReport> {
    check_binding(lifting, functor.kind())?;
    if lifting.arity() != 1 {
        return Err(Error::InvalidParameter(format!(
            "alpha-preservation is checked for unary liftings only; `{}` has arity {}",
            lifting.name(),
            lifting.arity()
        )));
    }
    let lat = functor.lattice();
    let range = match bounds.right {
        FamilyRange::Any => format!("families of size <= {}", bounds.family_size),
        FamilyRange::Singletons => format!("families of size <= {} against singletons", bounds.family_size),
    };
    let mut report = ValidationReport::new(format!(
        "{}-preservation of {} over {}, |S| <= {}, {range}",
        lat.label(alpha),
        lifting.name(),
        lat.name(),
        bounds.set_size
    ));
    let mut cases = 0u64;
    let mut witness = None;
    'outer: for n in 0..=bounds.set_size {
        let tset = functor.image(n, budget)?;
        let preds: Vec<FuzzySubset> = (0..(lat.size() as u64).pow(n as u32))
            .map(|h| FuzzySubset::new(function_decode(h, n, lat.size())))
            .collect();
        let lifted: Vec<FuzzySubset> = preds
            .iter()
            .map(|p| FuzzySubset::new(tset.iter().map(|x| lifting.eval(lat, &tset.decode(x), &[p.values()])).collect()))
            .collect();
        let lefts = families(preds.len(), bounds.family_size);
        let rights: Vec<Vec<usize>> = match bounds.right {
            FamilyRange::Any => lefts.clone(),
            FamilyRange::Singletons => (0..preds.len()).map(|i| vec![i]).collect(),
        };
        let pick = |idx: &[usize], pool: &[FuzzySubset]| -> Vec<FuzzySubset> { idx.iter().map(|i| pool[*i].clone()).collect() };
        for l in &lefts {
            let f = pick(l, &preds);
            let lf = pick(l, &lifted);
            for r in &rights {
                let g = pick(r, &preds);
                if first_alpha_gap(lat, n, &f, &g, alpha).is_some() {
                    continue;
                }
                cases += 1;
                let lg = pick(r, &lifted);
                if let Some(x) = first_alpha_gap(lat, tset.size() as usize, &lf, &lg, alpha) {
                    let show = |fam: &[FuzzySubset]| format!("{{{}}}", fam.iter().map(|f| f.label(lat)).collect::<Vec<_>>().join(", "));
                    witness = Some(format!(
                        "|S|={n}, F={}, G={}, element {} of T S",
                        show(&f),
                        show(&g),
                        tset.describe_id(x as u64)
                    ));
                    break 'outer;
                }
            }
        }
    }
    report.push(match witness {
        None => Check::pass("preservation", cases),
        Some(w) => Check::fail("preservation", cases, w),
    });
    report.note("bounded certificate: preservation verified only up to the stated bounds");
    Ok(report)
}
