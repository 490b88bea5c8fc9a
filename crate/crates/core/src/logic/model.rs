use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::atom::{Atom, Literal, Signature};
use super::cube::Cube;
use super::formula::Formula;

/// Exactly-one constraints over the value atoms of every (object, attribute).
///
/// Relation, output and auxiliary atoms are unconstrained booleans.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoryAxioms {
    sig: Signature,
}

impl TheoryAxioms {
    pub fn new(sig: &Signature) -> Self {
        TheoryAxioms { sig: sig.clone() }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    /// All value atoms sharing a group with `atom`, or `None` for free atoms.
    pub fn group(&self, atom: &Atom) -> Option<Vec<Atom>> {
        match *atom {
            Atom::Attr { obj, attr, .. } => {
                let d = *self.sig.domains.get(attr as usize)?;
                Some((0..d).map(|v| Atom::attr(obj, attr, v)).collect())
            }
            _ => None,
        }
    }

    /// Satisfiability of a cube modulo the axioms (purely syntactic check).
    pub fn cube_consistent(&self, cube: &Cube) -> bool {
        let mut pos: BTreeMap<(u8, u8), usize> = BTreeMap::new();
        let mut neg: BTreeMap<(u8, u8), usize> = BTreeMap::new();
        for l in cube.literals() {
            if let Atom::Attr { obj, attr, .. } = l.atom {
                let m = if l.positive { &mut pos } else { &mut neg };
                *m.entry((obj, attr)).or_default() += 1;
            }
        }
        if pos.values().any(|&c| c > 1) {
            return false;
        }
        for ((obj, attr), n) in neg {
            let d = self.sig.domains.get(attr as usize).copied().unwrap_or(0) as usize;
            if n >= d {
                return false;
            }
            if pos.contains_key(&(obj, attr)) {
                // positive value v with ¬v is complementary and already excluded by Cube;
                // positive v with ¬w (w != v) is fine.
                continue;
            }
        }
        true
    }

    /// The axioms as an explicit formula (testing aid).
    pub fn to_formula(&self) -> Formula {
        let mut parts = Vec::new();
        for obj in 0..self.sig.n_objects {
            for (attr, &d) in self.sig.domains.iter().enumerate() {
                let vals: Vec<Atom> = (0..d).map(|v| Atom::attr(obj, attr as u8, v)).collect();
                parts.push(Formula::or(vals.iter().map(|a| Formula::lit(a.pos()))));
                for i in 0..vals.len() {
                    for j in i + 1..vals.len() {
                        parts.push(Formula::or([Formula::lit(vals[i].neg()), Formula::lit(vals[j].neg())]));
                    }
                }
            }
        }
        Formula::and(parts)
    }
}

/// A total assignment over a signature: one value per (object, attribute),
/// a truth value per relation atom and per output atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Model {
    n_objects: u8,
    n_attrs: u8,
    n_relations: u8,
    attrs: Vec<u8>,
    rels: Vec<bool>,
    /// Output valuation as a bit word, bit `obj * n_actions + action`.
    outs: u64,
    n_actions: u8,
}

impl Model {
    /// First model in enumeration order: value 0 everywhere, relations false.
    pub fn zero(sig: &Signature) -> Self {
        let n = sig.n_objects as usize;
        Model {
            n_objects: sig.n_objects,
            n_attrs: sig.domains.len() as u8,
            n_relations: sig.n_relations,
            attrs: vec![0; n * sig.domains.len()],
            rels: vec![false; sig.n_relations as usize * n * n],
            outs: 0,
            n_actions: sig.n_actions,
        }
    }

    pub fn n_objects(&self) -> u8 {
        self.n_objects
    }

    #[inline]
    pub fn attr(&self, obj: u8, attr: u8) -> u8 {
        self.attrs[obj as usize * self.n_attrs as usize + attr as usize]
    }

    pub fn set_attr(&mut self, obj: u8, attr: u8, value: u8) {
        self.attrs[obj as usize * self.n_attrs as usize + attr as usize] = value;
    }

    #[inline]
    pub fn rel(&self, rel: u8, from: u8, to: u8) -> bool {
        let n = self.n_objects as usize;
        self.rels[(rel as usize * n + from as usize) * n + to as usize]
    }

    pub fn set_rel(&mut self, rel: u8, from: u8, to: u8, v: bool) {
        let n = self.n_objects as usize;
        self.rels[(rel as usize * n + from as usize) * n + to as usize] = v;
    }

    pub fn outs(&self) -> u64 {
        self.outs
    }

    pub fn set_outs(&mut self, outs: u64) {
        self.outs = outs;
    }

    pub fn holds(&self, lit: &Literal) -> bool {
        let v = match lit.atom {
            Atom::Attr { obj, attr, value } => self.attr(obj, attr) == value,
            Atom::Rel { rel, from, to } => self.rel(rel, from, to),
            Atom::Out { obj, action } => {
                self.outs >> (obj as u32 * self.n_actions as u32 + action as u32) & 1 == 1
            }
            Atom::Aux { .. } => false,
        };
        v == lit.positive
    }

    pub fn satisfies(&self, f: &Formula) -> bool {
        f.eval(&|l| self.holds(l))
    }

    /// Advance to the next input model in odometer order; `false` after the last.
    /// Output bits are left untouched.
    pub fn advance_input(&mut self, sig: &Signature) -> bool {
        for i in (0..self.rels.len()).rev() {
            let n = self.n_objects as usize;
            let from = (i / n) % n;
            let to = i % n;
            if from == to {
                continue;
            }
            if !self.rels[i] {
                self.rels[i] = true;
                return true;
            }
            self.rels[i] = false;
        }
        for i in (0..self.attrs.len()).rev() {
            let d = sig.domains[i % self.n_attrs as usize];
            if self.attrs[i] + 1 < d {
                self.attrs[i] += 1;
                return true;
            }
            self.attrs[i] = 0;
        }
        false
    }

    /// Every input model of the signature (outputs cleared). Exponential; for
    /// oracles on small schemas.
    pub fn all_inputs(sig: &Signature) -> Vec<Model> {
        let mut m = Model::zero(sig);
        let mut out = vec![m.clone()];
        while m.advance_input(sig) {
            out.push(m.clone());
        }
        out
    }
}

/// A partial assignment to atoms, as produced by the solver.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment(pub BTreeMap<Atom, bool>);

impl Assignment {
    pub fn get(&self, atom: &Atom) -> Option<bool> {
        self.0.get(atom).copied()
    }

    pub fn holds(&self, lit: &Literal) -> Option<bool> {
        self.get(&lit.atom).map(|v| v == lit.positive)
    }

    pub fn true_atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        self.0.iter().filter(|(_, v)| **v).map(|(a, _)| *a)
    }
}
