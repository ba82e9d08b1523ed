//! Formula syntax: the AST, rank and strata, substitution, printing.
//!
//! Propositional symbols are kept as a dedicated `Prop` node; semantically
//! they are the nullary modalities whose lifting reads the valuation
//! component of a `T_P` element.

mod parser;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{ResiduatedLattice, TruthValue};

pub use parser::parse;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BinOp {
    Or,
    And,
    /// Strong conjunction, interpreted by the monoid operation.
    Fuse,
    Imp,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Or => "|",
            BinOp::And => "/\\",
            BinOp::Fuse => "&",
            BinOp::Imp => "->",
        }
    }

    pub fn apply(self, lat: &ResiduatedLattice, a: TruthValue, b: TruthValue) -> TruthValue {
        match self {
            BinOp::Or => lat.join(a, b),
            BinOp::And => lat.meet(a, b),
            BinOp::Fuse => lat.fuse(a, b),
            BinOp::Imp => lat.implies(a, b),
        }
    }

    // binding strength for the printer; higher binds tighter
    fn precedence(self) -> u8 {
        match self {
            BinOp::Imp => 1,
            BinOp::Or => 2,
            BinOp::And => 3,
            BinOp::Fuse => 4,
        }
    }

    pub const ALL: [BinOp; 4] = [BinOp::Or, BinOp::And, BinOp::Fuse, BinOp::Imp];
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Formula {
    Const(TruthValue),
    Bin(BinOp, Box<Formula>, Box<Formula>),
    /// Application of a named predicate lifting to its arguments.
    Modal(String, Vec<Formula>),
    Prop(String),
}

impl Formula {
    pub fn prop(name: impl Into<String>) -> Self {
        Formula::Prop(name.into())
    }

    pub fn modal(name: impl Into<String>, args: Vec<Formula>) -> Self {
        Formula::Modal(name.into(), args)
    }

    pub fn bin(op: BinOp, l: Formula, r: Formula) -> Self {
        Formula::Bin(op, Box::new(l), Box::new(r))
    }

    pub fn imp(l: Formula, r: Formula) -> Self {
        Self::bin(BinOp::Imp, l, r)
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Self::bin(BinOp::And, l, r)
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Self::bin(BinOp::Or, l, r)
    }

    pub fn fuse(l: Formula, r: Formula) -> Self {
        Self::bin(BinOp::Fuse, l, r)
    }

    /// `(l -> r) /\ (r -> l)`.
    pub fn iff(l: Formula, r: Formula) -> Self {
        Self::and(Self::imp(l.clone(), r.clone()), Self::imp(r, l))
    }

    /// Modal nesting depth.
    pub fn rank(&self) -> usize {
        match self {
            Formula::Const(_) | Formula::Prop(_) => 0,
            Formula::Bin(_, l, r) => l.rank().max(r.rank()),
            Formula::Modal(_, args) => 1 + args.iter().map(Formula::rank).max().unwrap_or(0),
        }
    }

    /// Membership in the rank-`n` fragment.
    pub fn in_stratum(&self, n: usize) -> bool {
        self.rank() <= n
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Const(_) | Formula::Prop(_) => 1,
            Formula::Bin(_, l, r) => 1 + l.size() + r.size(),
            Formula::Modal(_, args) => 1 + args.iter().map(Formula::size).sum::<usize>(),
        }
    }

    /// Simultaneous single-pass replacement of propositional symbols.
    pub fn substitute(&self, rho: &Substitution) -> Formula {
        match self {
            Formula::Prop(p) => rho.get(p).cloned().unwrap_or_else(|| self.clone()),
            Formula::Const(_) => self.clone(),
            Formula::Bin(op, l, r) => Formula::bin(*op, l.substitute(rho), r.substitute(rho)),
            Formula::Modal(name, args) => {
                Formula::Modal(name.clone(), args.iter().map(|a| a.substitute(rho)).collect())
            }
        }
    }

    pub fn props(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_props(&mut out);
        out
    }

    fn collect_props(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Prop(p) => {
                out.insert(p.clone());
            }
            Formula::Const(_) => {}
            Formula::Bin(_, l, r) => {
                l.collect_props(out);
                r.collect_props(out);
            }
            Formula::Modal(_, args) => args.iter().for_each(|a| a.collect_props(out)),
        }
    }

    /// Names of every modality occurring in the formula.
    pub fn modalities(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Modal(name, _) = f {
                out.insert(name.clone());
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::Bin(_, l, r) => {
                l.visit(f);
                r.visit(f);
            }
            Formula::Modal(_, args) => args.iter().for_each(|a| a.visit(f)),
            _ => {}
        }
    }

    /// Renders with carrier labels for constants.
    pub fn display<'a>(&'a self, lat: &'a ResiduatedLattice) -> FormulaDisplay<'a> {
        FormulaDisplay { formula: self, lattice: Some(lat) }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, lat: Option<&ResiduatedLattice>, ctx: u8) -> fmt::Result {
        match self {
            Formula::Const(c) => match lat {
                Some(l) if label_is_token(l, *c) => f.write_str(l.label(*c)),
                _ => write!(f, "c{}", c.0),
            },
            Formula::Prop(p) => f.write_str(p),
            Formula::Modal(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    a.write(f, lat, 0)?;
                }
                f.write_str(")")
            }
            Formula::Bin(op, l, r) => {
                let p = op.precedence();
                let paren = p < ctx;
                if paren {
                    f.write_str("(")?;
                }
                // `->` is right associative, the others associate to the left
                let (lp, rp) = if *op == BinOp::Imp { (p + 1, p) } else { (p, p + 1) };
                l.write(f, lat, lp)?;
                write!(f, " {} ", op.symbol())?;
                r.write(f, lat, rp)?;
                if paren {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

/// A label prints as itself only when the lexer reads it back as one token
/// resolving to the same element.
fn label_is_token(lat: &ResiduatedLattice, c: TruthValue) -> bool {
    let label = lat.label(c);
    parser::is_single_token(label) && lat.resolve(label) == Some(c)
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, None, 0)
    }
}

pub struct FormulaDisplay<'a> {
    formula: &'a Formula,
    lattice: Option<&'a ResiduatedLattice>,
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.formula.write(f, self.lattice, 0)
    }
}

/// Prints a formula so that [`parse`] reads back the same AST.
pub fn print(formula: &Formula, lat: &ResiduatedLattice) -> String {
    formula.display(lat).to_string()
}

/// A finite-support map from propositional symbols to formulas.
pub type Substitution = BTreeMap<String, Formula>;

/// Maximum rank over the image; an `n`-substitution has this `<= n`.
pub fn substitution_rank(rho: &Substitution) -> usize {
    rho.values().map(Formula::rank).max().unwrap_or(0)
}

/// Arity lookup used by the parser to validate modal applications.
pub trait ModalityTable {
    /// `None` when the name is not registered.
    fn arity(&self, name: &str) -> Option<usize>;
}

impl ModalityTable for BTreeMap<String, usize> {
    fn arity(&self, name: &str) -> Option<usize> {
        self.get(name).copied()
    }
}

/// Everything the parser needs to resolve names.
#[derive(Clone, Copy)]
pub struct Signature<'a> {
    pub lattice: &'a ResiduatedLattice,
    pub props: &'a [String],
    pub modalities: &'a dyn ModalityTable,
}
