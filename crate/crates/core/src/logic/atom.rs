use std::fmt;
use std::ops::Not;

use serde::{Deserialize, Serialize};

/// A propositional atom over a finite-domain signature.
///
/// Indices refer to positions in a [`Signature`]; names only exist at the
/// schema level. The derived ordering is the canonical atom order used for
/// sorting cubes and breaking ties.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Atom {
    /// Object `obj` has value `value` for attribute `attr`.
    Attr { obj: u8, attr: u8, value: u8 },
    /// Relation `rel` holds from object `from` to object `to` (`from != to`).
    Rel { rel: u8, from: u8, to: u8 },
    /// The program output applies action `action` to object `obj`.
    Out { obj: u8, action: u8 },
    /// Auxiliary indicator variable used by encodings.
    Aux { id: u32 },
}

impl Atom {
    pub fn attr(obj: u8, attr: u8, value: u8) -> Self {
        Atom::Attr { obj, attr, value }
    }

    pub fn rel(rel: u8, from: u8, to: u8) -> Self {
        Atom::Rel { rel, from, to }
    }

    pub fn out(obj: u8, action: u8) -> Self {
        Atom::Out { obj, action }
    }

    pub fn aux(id: u32) -> Self {
        Atom::Aux { id }
    }

    pub fn pos(self) -> Literal {
        Literal { atom: self, positive: true }
    }

    pub fn neg(self) -> Literal {
        Literal { atom: self, positive: false }
    }

    pub fn is_input(&self) -> bool {
        matches!(self, Atom::Attr { .. } | Atom::Rel { .. })
    }

    pub fn is_output(&self) -> bool {
        matches!(self, Atom::Out { .. })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Atom::Attr { obj, attr, value } => write!(f, "attr(x{obj},{attr}={value})"),
            Atom::Rel { rel, from, to } => write!(f, "rel{rel}(x{from},x{to})"),
            Atom::Out { obj, action } => write!(f, "out(x{obj},{action})"),
            Atom::Aux { id } => write!(f, "s{id}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Not for Literal {
    type Output = Literal;

    fn not(self) -> Literal {
        Literal { atom: self.atom, positive: !self.positive }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.atom)
        } else {
            write!(f, "¬{}", self.atom)
        }
    }
}

/// Numeric shape of a schema: everything the logic layer needs to know.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub n_objects: u8,
    /// Number of values of each attribute.
    pub domains: Vec<u8>,
    pub n_relations: u8,
    pub n_actions: u8,
}

impl Signature {
    pub fn n_attrs(&self) -> usize {
        self.domains.len()
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        match *atom {
            Atom::Attr { obj, attr, value } => {
                obj < self.n_objects
                    && (attr as usize) < self.domains.len()
                    && value < self.domains[attr as usize]
            }
            Atom::Rel { rel, from, to } => {
                rel < self.n_relations && from < self.n_objects && to < self.n_objects && from != to
            }
            Atom::Out { obj, action } => obj < self.n_objects && action < self.n_actions,
            Atom::Aux { .. } => true,
        }
    }

    /// Attribute and relation atoms in canonical order.
    pub fn input_atoms(&self) -> Vec<Atom> {
        let mut atoms = Vec::new();
        for obj in 0..self.n_objects {
            for (attr, &d) in self.domains.iter().enumerate() {
                for value in 0..d {
                    atoms.push(Atom::attr(obj, attr as u8, value));
                }
            }
        }
        for rel in 0..self.n_relations {
            for from in 0..self.n_objects {
                for to in 0..self.n_objects {
                    if from != to {
                        atoms.push(Atom::rel(rel, from, to));
                    }
                }
            }
        }
        atoms.sort();
        atoms
    }

    pub fn output_atoms(&self) -> Vec<Atom> {
        let mut atoms = Vec::new();
        for obj in 0..self.n_objects {
            for action in 0..self.n_actions {
                atoms.push(Atom::out(obj, action));
            }
        }
        atoms
    }

    pub fn input_literals(&self) -> Vec<Literal> {
        literal_closure(self.input_atoms())
    }

    pub fn output_literals(&self) -> Vec<Literal> {
        literal_closure(self.output_atoms())
    }

    /// Bit position of an output atom inside an output valuation word.
    pub fn out_bit(&self, obj: u8, action: u8) -> u32 {
        obj as u32 * self.n_actions as u32 + action as u32
    }

    pub fn n_out_bits(&self) -> u32 {
        self.n_objects as u32 * self.n_actions as u32
    }

    /// Number of input models (attribute combinations times relation bits).
    pub fn input_model_count(&self) -> u128 {
        let per_obj: u128 = self.domains.iter().map(|&d| d as u128).product();
        let n = self.n_objects as u32;
        let rel_bits = self.n_relations as u32 * n * n.saturating_sub(1);
        per_obj.pow(n) * (1u128 << rel_bits)
    }
}

/// Both polarities of every atom, sorted.
pub fn literal_closure(atoms: impl IntoIterator<Item = Atom>) -> Vec<Literal> {
    let mut lits: Vec<Literal> = atoms.into_iter().flat_map(|a| [a.neg(), a.pos()]).collect();
    lits.sort();
    lits.dedup();
    lits
}
