//! Finite commutative integral residuated lattices (FL-algebras).
//!
//! Carrier elements are canonical indices `0..size`. The lattice order is
//! read off the tables (`a <= b` iff `meet(a, b) == a`), never off the index
//! order, so arbitrary finite lattices are representable. The built-in
//! chains happen to put `bot` at index 0 and `top` at `size - 1`.

use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{Check, ValidationReport};

/// Canonical id of a carrier element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TruthValue(pub u16);

impl TruthValue {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

/// Exact rational used for probabilities and the optional `[0,1]` embedding.
pub type Rational = Ratio<i64>;

/// Parses `"1/2"`, `"0.25"` or `"1"` into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: i64 = n.trim().parse().ok()?;
        let d: i64 = d.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Ratio::new(n, d));
    }
    if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() || frac.len() > 12 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let int: i64 = if int.is_empty() { 0 } else { int.parse().ok()? };
        let den = 10i64.pow(frac.len() as u32);
        let num: i64 = frac.parse().ok()?;
        return Some(Ratio::new(int * den + num, den));
    }
    text.parse::<i64>().ok().map(Ratio::from_integer)
}

/// Renders a rational as a terminating decimal when possible, else `n/d`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        return r.to_integer().to_string();
    }
    let mut d = *r.denom();
    let (mut twos, mut fives) = (0u32, 0u32);
    while d % 2 == 0 {
        d /= 2;
        twos += 1;
    }
    while d % 5 == 0 {
        d /= 5;
        fives += 1;
    }
    if d != 1 {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let digits = twos.max(fives);
    let scaled = *r * Ratio::from_integer(10i64.pow(digits));
    let scaled = scaled.to_integer();
    let sign = if scaled < 0 { "-" } else { "" };
    let scaled = scaled.abs();
    let base = 10i64.pow(digits);
    format!("{sign}{}.{:0width$}", scaled / base, scaled % base, width = digits as usize)
}

/// Named families of finite chains shipped with the tool.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BuiltinKind {
    Boolean,
    Lukasiewicz,
    Goedel,
}

impl BuiltinKind {
    pub fn parse(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "boolean" | "bool" | "b" => Some(BuiltinKind::Boolean),
            "lukasiewicz" | "luk" | "l" => Some(BuiltinKind::Lukasiewicz),
            "goedel" | "godel" | "g" => Some(BuiltinKind::Goedel),
            _ => None,
        }
    }
}

/// A finite commutative integral FL-algebra given by its operation tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResiduatedLattice {
    name: String,
    size: usize,
    join: Vec<TruthValue>,
    meet: Vec<TruthValue>,
    mono: Vec<TruthValue>,
    imp: Vec<TruthValue>,
    bot: TruthValue,
    top: TruthValue,
    labels: Vec<String>,
    embedding: Option<Vec<Rational>>,
}

/// Raw tables as found in an algebra file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub name: String,
    pub size: usize,
    pub join: Vec<Vec<usize>>,
    pub meet: Vec<Vec<usize>>,
    pub mono: Vec<Vec<usize>>,
    #[serde(rename = "impl")]
    pub imp: Vec<Vec<usize>>,
    pub bot: usize,
    pub top: usize,
    /// Optional display labels, one per element.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    /// Optional embedding into `[0,1]` as rational strings; needed by the
    /// probabilistic modality.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<String>>,
}

impl ResiduatedLattice {
    /// Builds a lattice from raw tables, checking only dimensions and ranges.
    /// Call [`ResiduatedLattice::validate`] for the axioms.
    pub fn from_file(file: AlgebraFile) -> Result<Self> {
        let n = file.size;
        if n == 0 {
            return Err(Error::MalformedAlgebra("carrier must be nonempty".into()));
        }
        if n > u16::MAX as usize {
            return Err(Error::MalformedAlgebra(format!("carrier of size {n} is too large")));
        }
        let table = |name: &str, rows: &[Vec<usize>]| -> Result<Vec<TruthValue>> {
            if rows.len() != n {
                return Err(Error::MalformedAlgebra(format!(
                    "`{name}` has {} rows, expected {n}",
                    rows.len()
                )));
            }
            let mut out = Vec::with_capacity(n * n);
            for (i, row) in rows.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::MalformedAlgebra(format!(
                        "`{name}` row {i} has {} entries, expected {n}",
                        row.len()
                    )));
                }
                for (j, &v) in row.iter().enumerate() {
                    if v >= n {
                        return Err(Error::MalformedAlgebra(format!(
                            "`{name}`[{i}][{j}] = {v} is outside the carrier"
                        )));
                    }
                    out.push(TruthValue(v as u16));
                }
            }
            Ok(out)
        };
        let join = table("join", &file.join)?;
        let meet = table("meet", &file.meet)?;
        let mono = table("mono", &file.mono)?;
        let imp = table("impl", &file.imp)?;
        for (what, v) in [("bot", file.bot), ("top", file.top)] {
            if v >= n {
                return Err(Error::MalformedAlgebra(format!("`{what}` = {v} is outside the carrier")));
            }
        }
        let labels = match file.labels {
            Some(l) if l.len() != n => {
                return Err(Error::MalformedAlgebra(format!("{} labels for {n} elements", l.len())))
            }
            Some(l) => l,
            None => (0..n).map(|i| format!("c{i}")).collect(),
        };
        let embedding = match file.values {
            None => None,
            Some(v) if v.len() != n => {
                return Err(Error::MalformedAlgebra(format!("{} values for {n} elements", v.len())))
            }
            Some(v) => Some(
                v.iter()
                    .map(|s| {
                        parse_rational(s)
                            .filter(|r| *r >= Ratio::zero() && *r <= Ratio::one())
                            .ok_or_else(|| Error::MalformedAlgebra(format!("bad embedding value `{s}`")))
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        Ok(ResiduatedLattice {
            name: file.name,
            size: n,
            join,
            meet,
            mono,
            imp,
            bot: TruthValue(file.bot as u16),
            top: TruthValue(file.top as u16),
            labels,
            embedding,
        })
    }

    /// Parses an algebra file and refuses it unless every axiom holds.
    pub fn load_json(text: &str) -> Result<Self> {
        let file: AlgebraFile = serde_json::from_str(text)?;
        let lat = Self::from_file(file)?;
        let v = lat.validate();
        if !v.is_valid() {
            return Err(Error::InvalidAlgebra {
                name: lat.name.clone(),
                summary: v.summary(&lat),
            });
        }
        Ok(lat)
    }

    pub fn to_file(&self) -> AlgebraFile {
        let rows = |t: &[TruthValue]| {
            t.chunks(self.size)
                .map(|r| r.iter().map(|v| v.index()).collect())
                .collect()
        };
        AlgebraFile {
            name: self.name.clone(),
            size: self.size,
            join: rows(&self.join),
            meet: rows(&self.meet),
            mono: rows(&self.mono),
            imp: rows(&self.imp),
            bot: self.bot.index(),
            top: self.top.index(),
            labels: Some(self.labels.clone()),
            values: self
                .embedding
                .as_ref()
                .map(|e| e.iter().map(|r| format!("{}/{}", r.numer(), r.denom())).collect()),
        }
    }

    /// The `k`-element chain with the named t-norm and its residuum.
    pub fn builtin(kind: BuiltinKind, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!("chain length must be at least 2, got {k}")));
        }
        if kind == BuiltinKind::Boolean && k != 2 {
            return Err(Error::InvalidParameter(format!(
                "the Boolean algebra has exactly 2 elements, got {k}"
            )));
        }
        if k > 1000 {
            return Err(Error::InvalidParameter(format!("chain length {k} is too large")));
        }
        let top = k - 1;
        let mut file = AlgebraFile {
            name: match kind {
                BuiltinKind::Boolean => "boolean".to_string(),
                BuiltinKind::Lukasiewicz => format!("lukasiewicz{k}"),
                BuiltinKind::Goedel => format!("goedel{k}"),
            },
            size: k,
            join: vec![vec![0; k]; k],
            meet: vec![vec![0; k]; k],
            mono: vec![vec![0; k]; k],
            imp: vec![vec![0; k]; k],
            bot: 0,
            top,
            labels: None,
            values: None,
        };
        for a in 0..k {
            for b in 0..k {
                file.join[a][b] = a.max(b);
                file.meet[a][b] = a.min(b);
                match kind {
                    BuiltinKind::Boolean | BuiltinKind::Goedel => {
                        file.mono[a][b] = a.min(b);
                        file.imp[a][b] = if a <= b { top } else { b };
                    }
                    BuiltinKind::Lukasiewicz => {
                        // scaled by k-1: max(0, a+b-1) and min(1, 1-a+b)
                        file.mono[a][b] = (a + b).saturating_sub(top);
                        file.imp[a][b] = (top + b).saturating_sub(a).min(top);
                    }
                }
            }
        }
        let values: Vec<Rational> = (0..k).map(|i| Ratio::new(i as i64, top as i64)).collect();
        file.labels = Some(values.iter().map(format_rational).collect());
        file.values = Some(values.iter().map(|r| format!("{}/{}", r.numer(), r.denom())).collect());
        Self::from_file(file)
    }

    /// Parses `boolean`, `lukasiewicz:3`, `goedel4`, `L3`, `G4` and similar.
    pub fn builtin_from_spec(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (name, k) = match spec.split_once(':') {
            Some((n, k)) => (n, Some(k)),
            None => {
                let split = spec.find(|c: char| c.is_ascii_digit()).unwrap_or(spec.len());
                let (n, k) = spec.split_at(split);
                (n, if k.is_empty() { None } else { Some(k) })
            }
        };
        let kind = BuiltinKind::parse(name)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown builtin algebra `{spec}`")))?;
        let k = match k {
            Some(k) => k
                .parse::<usize>()
                .map_err(|_| Error::InvalidParameter(format!("bad chain length in `{spec}`")))?,
            None if kind == BuiltinKind::Boolean => 2,
            None => return Err(Error::InvalidParameter(format!("`{spec}` needs a chain length"))),
        };
        Self::builtin(kind, k)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn bot(&self) -> TruthValue {
        self.bot
    }

    pub fn top(&self) -> TruthValue {
        self.top
    }

    pub fn elements(&self) -> impl Iterator<Item = TruthValue> + Clone {
        (0..self.size as u16).map(TruthValue)
    }

    #[inline]
    fn at(&self, t: &[TruthValue], a: TruthValue, b: TruthValue) -> TruthValue {
        t[a.index() * self.size + b.index()]
    }

    #[inline]
    pub fn join(&self, a: TruthValue, b: TruthValue) -> TruthValue {
        self.at(&self.join, a, b)
    }

    #[inline]
    pub fn meet(&self, a: TruthValue, b: TruthValue) -> TruthValue {
        self.at(&self.meet, a, b)
    }

    /// The monoid operation (strong conjunction, `&` in formulas).
    #[inline]
    pub fn fuse(&self, a: TruthValue, b: TruthValue) -> TruthValue {
        self.at(&self.mono, a, b)
    }

    /// The residuum of [`fuse`](Self::fuse).
    #[inline]
    pub fn implies(&self, a: TruthValue, b: TruthValue) -> TruthValue {
        self.at(&self.imp, a, b)
    }

    #[inline]
    pub fn leq(&self, a: TruthValue, b: TruthValue) -> bool {
        self.meet(a, b) == a
    }

    /// Join of a finite family; the empty join is `bot`.
    pub fn join_all(&self, it: impl IntoIterator<Item = TruthValue>) -> TruthValue {
        it.into_iter().fold(self.bot, |acc, v| self.join(acc, v))
    }

    /// Meet of a finite family; the empty meet is `top`.
    pub fn meet_all(&self, it: impl IntoIterator<Item = TruthValue>) -> TruthValue {
        it.into_iter().fold(self.top, |acc, v| self.meet(acc, v))
    }

    pub fn label(&self, a: TruthValue) -> &str {
        &self.labels[a.index()]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Resolves a label or a `c{index}` token to an element.
    pub fn resolve(&self, token: &str) -> Option<TruthValue> {
        if let Some(i) = self.labels.iter().position(|l| l == token) {
            return Some(TruthValue(i as u16));
        }
        if let Some(rest) = token.strip_prefix('c') {
            if let Ok(i) = rest.parse::<usize>() {
                if i < self.size && !rest.starts_with('+') {
                    return Some(TruthValue(i as u16));
                }
            }
        }
        // numeric tokens that denote the same rational as some label
        if let (Some(r), Some(emb)) = (parse_rational(token), &self.embedding) {
            if let Some(i) = emb.iter().position(|v| *v == r) {
                return Some(TruthValue(i as u16));
            }
        }
        None
    }

    pub fn value(&self, a: TruthValue) -> Option<Rational> {
        self.embedding.as_ref().map(|e| e[a.index()])
    }

    pub fn has_embedding(&self) -> bool {
        self.embedding.is_some()
    }

    /// Largest element (by embedded value) whose value is at most `r`.
    pub fn floor_rational(&self, r: Rational) -> Option<TruthValue> {
        let emb = self.embedding.as_ref()?;
        emb.iter()
            .enumerate()
            .filter(|(_, v)| **v <= r)
            .max_by(|x, y| x.1.cmp(y.1))
            .map(|(i, _)| TruthValue(i as u16))
    }

    /// Exhaustively checks every FL-algebra clause over all triples.
    pub fn validate(&self) -> LatticeValidation {
        validate_tables(self)
    }
}

/// The clauses checked by [`ResiduatedLattice::validate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    JoinCommutative,
    JoinAssociative,
    JoinIdempotent,
    MeetCommutative,
    MeetAssociative,
    MeetIdempotent,
    Absorption,
    BotLeast,
    TopGreatest,
    MonoidCommutative,
    MonoidAssociative,
    MonoidUnit,
    Residuation,
}

impl Axiom {
    pub const ALL: [Axiom; 13] = [
        Axiom::JoinCommutative,
        Axiom::JoinAssociative,
        Axiom::JoinIdempotent,
        Axiom::MeetCommutative,
        Axiom::MeetAssociative,
        Axiom::MeetIdempotent,
        Axiom::Absorption,
        Axiom::BotLeast,
        Axiom::TopGreatest,
        Axiom::MonoidCommutative,
        Axiom::MonoidAssociative,
        Axiom::MonoidUnit,
        Axiom::Residuation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::JoinCommutative => "join commutative",
            Axiom::JoinAssociative => "join associative",
            Axiom::JoinIdempotent => "join idempotent",
            Axiom::MeetCommutative => "meet commutative",
            Axiom::MeetAssociative => "meet associative",
            Axiom::MeetIdempotent => "meet idempotent",
            Axiom::Absorption => "absorption",
            Axiom::BotLeast => "bot is least",
            Axiom::TopGreatest => "top is greatest (integrality)",
            Axiom::MonoidCommutative => "monoid commutative",
            Axiom::MonoidAssociative => "monoid associative",
            Axiom::MonoidUnit => "top is the monoid unit",
            Axiom::Residuation => "residuation",
        }
    }

    /// Re-evaluates this clause at a witness; `true` means it holds there.
    pub fn holds_at(self, lat: &ResiduatedLattice, w: &[TruthValue]) -> bool {
        let g = |i: usize| w[i];
        match self {
            Axiom::JoinCommutative => lat.join(g(0), g(1)) == lat.join(g(1), g(0)),
            Axiom::MeetCommutative => lat.meet(g(0), g(1)) == lat.meet(g(1), g(0)),
            Axiom::MonoidCommutative => lat.fuse(g(0), g(1)) == lat.fuse(g(1), g(0)),
            Axiom::JoinAssociative => {
                lat.join(lat.join(g(0), g(1)), g(2)) == lat.join(g(0), lat.join(g(1), g(2)))
            }
            Axiom::MeetAssociative => {
                lat.meet(lat.meet(g(0), g(1)), g(2)) == lat.meet(g(0), lat.meet(g(1), g(2)))
            }
            Axiom::MonoidAssociative => {
                lat.fuse(lat.fuse(g(0), g(1)), g(2)) == lat.fuse(g(0), lat.fuse(g(1), g(2)))
            }
            Axiom::JoinIdempotent => lat.join(g(0), g(0)) == g(0),
            Axiom::MeetIdempotent => lat.meet(g(0), g(0)) == g(0),
            Axiom::Absorption => {
                lat.join(g(0), lat.meet(g(0), g(1))) == g(0) && lat.meet(g(0), lat.join(g(0), g(1))) == g(0)
            }
            Axiom::BotLeast => lat.meet(lat.bot, g(0)) == lat.bot && lat.join(lat.bot, g(0)) == g(0),
            Axiom::TopGreatest => lat.meet(g(0), lat.top) == g(0) && lat.join(g(0), lat.top) == lat.top,
            Axiom::MonoidUnit => lat.fuse(g(0), lat.top) == g(0),
            Axiom::Residuation => {
                lat.leq(lat.fuse(g(0), g(1)), g(2)) == lat.leq(g(1), lat.implies(g(0), g(2)))
            }
        }
    }

    fn arity(self) -> usize {
        match self {
            Axiom::JoinIdempotent
            | Axiom::MeetIdempotent
            | Axiom::BotLeast
            | Axiom::TopGreatest
            | Axiom::MonoidUnit => 1,
            Axiom::JoinCommutative | Axiom::MeetCommutative | Axiom::MonoidCommutative | Axiom::Absorption => 2,
            _ => 3,
        }
    }
}

/// First violation found for one clause.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    /// `(a)`, `(a, b)` or `(a, b, c)` depending on the clause.
    pub witness: Vec<TruthValue>,
}

/// Outcome of [`ResiduatedLattice::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeValidation {
    pub name: String,
    pub violations: Vec<AxiomViolation>,
    pub cases: Vec<(Axiom, u64)>,
}

impl LatticeValidation {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violation(&self, axiom: Axiom) -> Option<&AxiomViolation> {
        self.violations.iter().find(|v| v.axiom == axiom)
    }

    fn describe(lat: &ResiduatedLattice, v: &AxiomViolation) -> String {
        const NAMES: [&str; 3] = ["a", "b", "c"];
        let parts: Vec<String> = v
            .witness
            .iter()
            .zip(NAMES)
            .map(|(t, n)| format!("{n}={}", lat.label(*t)))
            .collect();
        format!("({})", parts.join(", "))
    }

    pub fn summary(&self, lat: &ResiduatedLattice) -> String {
        self.violations
            .iter()
            .map(|v| format!("{} fails at {}", v.axiom.name(), Self::describe(lat, v)))
            .collect::<Vec<_>>()
            .join("; ")
    }

    pub fn report(&self, lat: &ResiduatedLattice) -> ValidationReport {
        let mut r = ValidationReport::new(format!("algebra {}", self.name));
        for (axiom, cases) in &self.cases {
            match self.violation(*axiom) {
                Some(v) => r.push(Check::fail(axiom.name(), *cases, Self::describe(lat, v))),
                None => r.push(Check::pass(axiom.name(), *cases)),
            }
        }
        r
    }
}

fn validate_tables(lat: &ResiduatedLattice) -> LatticeValidation {
    let elems: Vec<TruthValue> = lat.elements().collect();
    let mut violations = Vec::new();
    let mut cases = Vec::new();
    for axiom in Axiom::ALL {
        let arity = axiom.arity();
        let total = (elems.len() as u64).pow(arity as u32);
        cases.push((axiom, total));
        let mut w = vec![elems[0]; arity];
        let mut idx = vec![0usize; arity];
        'outer: loop {
            for (slot, &i) in w.iter_mut().zip(&idx) {
                *slot = elems[i];
            }
            if !axiom.holds_at(lat, &w) {
                violations.push(AxiomViolation { axiom, witness: w.clone() });
                break;
            }
            // odometer with the last coordinate fastest
            let mut pos = arity;
            loop {
                if pos == 0 {
                    break 'outer;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < elems.len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }
    LatticeValidation {
        name: lat.name.clone(),
        violations,
        cases,
    }
}

/// An `A`-valued fuzzy subset of `{0, .., domain_size - 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FuzzySubset {
    values: Vec<TruthValue>,
}

impl FuzzySubset {
    pub fn new(values: Vec<TruthValue>) -> Self {
        FuzzySubset { values }
    }

    pub fn constant(domain_size: usize, v: TruthValue) -> Self {
        FuzzySubset {
            values: vec![v; domain_size],
        }
    }

    pub fn domain_size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[TruthValue] {
        &self.values
    }

    pub fn into_values(self) -> Vec<TruthValue> {
        self.values
    }

    pub fn get(&self, x: usize) -> TruthValue {
        self.values[x]
    }

    /// `f_alpha = { x | f(x) >= alpha }`, in increasing index order.
    pub fn alpha_cut(&self, lat: &ResiduatedLattice, alpha: TruthValue) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| lat.leq(alpha, **v))
            .map(|(i, _)| i)
            .collect()
    }

    /// Pointwise order.
    pub fn leq(&self, lat: &ResiduatedLattice, other: &FuzzySubset) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| lat.leq(*a, *b))
    }

    pub fn label(&self, lat: &ResiduatedLattice) -> String {
        let parts: Vec<&str> = self.values.iter().map(|v| lat.label(*v)).collect();
        format!("[{}]", parts.join(", "))
    }
}

/// Decides `F ⊑_alpha G`: the intersection of the alpha-cuts of `F` is
/// contained in the union of the alpha-cuts of `G`. An empty `F` intersects
/// to the whole domain and an empty `G` unions to the empty set.
pub fn family_leq_alpha(
    lat: &ResiduatedLattice,
    domain_size: usize,
    left: &[FuzzySubset],
    right: &[FuzzySubset],
    alpha: TruthValue,
) -> Result<bool> {
    if let Some(f) = left.iter().chain(right).find(|f| f.domain_size() != domain_size) {
        return Err(Error::InvalidInput(format!(
            "family member over a domain of size {} in a comparison over size {domain_size}",
            f.domain_size()
        )));
    }
    Ok(first_alpha_gap(lat, domain_size, left, right, alpha).is_none())
}

/// The least point in `⋂ F_alpha` but outside `⋃ G_alpha`, if any.
pub(crate) fn first_alpha_gap(
    lat: &ResiduatedLattice,
    domain_size: usize,
    left: &[FuzzySubset],
    right: &[FuzzySubset],
    alpha: TruthValue,
) -> Option<usize> {
    (0..domain_size).find(|&x| {
        left.iter().all(|f| lat.leq(alpha, f.get(x))) && !right.iter().any(|g| lat.leq(alpha, g.get(x)))
    })
}
