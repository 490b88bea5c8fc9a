use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::atom::{Atom, Literal};

/// Negation normal form formula. Negation only appears on literals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op", content = "args", rename_all = "snake_case")]
pub enum Formula {
    True,
    False,
    Lit(Literal),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn lit(l: Literal) -> Self {
        Formula::Lit(l)
    }

    /// Flattening conjunction with constant folding.
    pub fn and(parts: impl IntoIterator<Item = Formula>) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(cs) => out.extend(cs),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    /// Flattening disjunction with constant folding.
    pub fn or(parts: impl IntoIterator<Item = Formula>) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(cs) => out.extend(cs),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    pub fn negate(&self) -> Formula {
        match self {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Lit(l) => Formula::Lit(!*l),
            Formula::And(cs) => Formula::or(cs.iter().map(Formula::negate)),
            Formula::Or(cs) => Formula::and(cs.iter().map(Formula::negate)),
        }
    }

    pub fn xor(a: Formula, b: Formula) -> Formula {
        let na = a.negate();
        let nb = b.negate();
        Formula::or([Formula::and([a, nb]), Formula::and([na, b])])
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Lit(l) => {
                out.insert(l.atom);
            }
            Formula::And(cs) | Formula::Or(cs) => cs.iter().for_each(|c| c.collect_atoms(out)),
        }
    }

    /// Evaluate under a literal valuation.
    pub fn eval(&self, holds: &impl Fn(&Literal) -> bool) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Lit(l) => holds(l),
            Formula::And(cs) => cs.iter().all(|c| c.eval(holds)),
            Formula::Or(cs) => cs.iter().any(|c| c.eval(holds)),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Lit(_) => 1,
            Formula::And(cs) | Formula::Or(cs) => 1 + cs.iter().map(Formula::node_count).sum::<usize>(),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "⊤"),
            Formula::False => write!(f, "⊥"),
            Formula::Lit(l) => write!(f, "{l}"),
            Formula::And(cs) | Formula::Or(cs) => {
                let sep = if matches!(self, Formula::And(_)) { " ∧ " } else { " ∨ " };
                write!(f, "(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "{sep}")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}
