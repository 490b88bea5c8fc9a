//! Dense bitset cubes over a small local atom index.

use std::collections::HashMap;

use super::atom::{Atom, Literal};
use super::cube::Cube;
use super::model::TheoryAxioms;
use crate::error::{Error, Result};

pub(crate) const MAX_LOCAL_ATOMS: usize = 128;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Bits {
    pub pos: u128,
    pub neg: u128,
}

impl Bits {
    pub const EMPTY: Bits = Bits { pos: 0, neg: 0 };

    #[inline]
    pub fn union(self, o: Bits) -> Bits {
        Bits { pos: self.pos | o.pos, neg: self.neg | o.neg }
    }

    #[inline]
    pub fn is_subset(self, o: Bits) -> bool {
        self.pos & !o.pos == 0 && self.neg & !o.neg == 0
    }

    #[inline]
    pub fn len(self) -> u32 {
        self.pos.count_ones() + self.neg.count_ones()
    }

    #[inline]
    pub fn clashes(self) -> bool {
        self.pos & self.neg != 0
    }
}

/// Maps atoms touched by a formula (plus their attribute-group siblings) to bit
/// positions in canonical atom order.
pub(crate) struct LocalIndex {
    atoms: Vec<Atom>,
    map: HashMap<Atom, u32>,
    groups: Vec<u128>,
}

impl LocalIndex {
    pub fn build(atoms: impl IntoIterator<Item = Atom>, axioms: &TheoryAxioms) -> Result<Self> {
        let mut all: Vec<Atom> = Vec::new();
        for a in atoms {
            match axioms.group(&a) {
                Some(g) => all.extend(g),
                None => all.push(a),
            }
        }
        all.sort();
        all.dedup();
        if all.len() > MAX_LOCAL_ATOMS {
            return Err(Error::Resource(format!(
                "formula touches {} atoms (limit {MAX_LOCAL_ATOMS})",
                all.len()
            )));
        }
        let map: HashMap<Atom, u32> = all.iter().enumerate().map(|(i, a)| (*a, i as u32)).collect();
        let mut groups: HashMap<(u8, u8), u128> = HashMap::new();
        for (i, a) in all.iter().enumerate() {
            if let Atom::Attr { obj, attr, .. } = *a {
                *groups.entry((obj, attr)).or_default() |= 1u128 << i;
            }
        }
        let mut groups: Vec<u128> = groups.into_values().collect();
        groups.sort();
        Ok(LocalIndex { atoms: all, map, groups })
    }

    pub fn bit(&self, atom: &Atom) -> Option<u32> {
        self.map.get(atom).copied()
    }

    pub fn lit_bits(&self, l: &Literal) -> Option<Bits> {
        let b = 1u128 << self.bit(&l.atom)?;
        Some(if l.positive { Bits { pos: b, neg: 0 } } else { Bits { pos: 0, neg: b } })
    }

    /// Bits for the literals of `lits` that lie inside the index.
    pub fn universe_bits<'a>(&self, lits: impl IntoIterator<Item = &'a Literal>) -> Bits {
        lits.into_iter()
            .filter_map(|l| self.lit_bits(l))
            .fold(Bits::EMPTY, Bits::union)
    }

    pub fn groups(&self) -> &[u128] {
        &self.groups
    }

    pub fn to_cube(&self, b: Bits) -> Cube {
        let mut lits = Vec::with_capacity(b.len() as usize);
        for (i, a) in self.atoms.iter().enumerate() {
            let m = 1u128 << i;
            if b.pos & m != 0 {
                lits.push(a.pos());
            } else if b.neg & m != 0 {
                lits.push(a.neg());
            }
        }
        Cube::new(lits).expect("consistent bits")
    }

    /// Satisfiable modulo the exactly-one axioms.
    pub fn consistent(&self, b: Bits) -> bool {
        if b.clashes() {
            return false;
        }
        self.groups.iter().all(|&g| (b.pos & g).count_ones() <= 1 && b.neg & g != g)
    }
}

/// Remove duplicates and cubes that are supersets of another cube.
pub(crate) fn absorb(mut cubes: Vec<Bits>) -> Vec<Bits> {
    cubes.sort_by_key(|c| (c.len(), *c));
    cubes.dedup();
    let mut kept: Vec<Bits> = Vec::with_capacity(cubes.len());
    for c in cubes {
        if !kept.iter().any(|k| k.is_subset(c)) {
            kept.push(c);
        }
    }
    kept
}
