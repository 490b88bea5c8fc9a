//! Predicate transformers: weakest precondition of disagreement and exact
//! strongest postconditions under a cube precondition.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::program::Program;
use crate::error::{Error, Result};
use crate::logic::{is_sat, Atom, Cube, Formula, Model, Signature, TheoryAxioms};

/// Inputs on which the two programs produce different outputs.
pub fn diff_wp(p1: &Program, p2: &Program, sig: &Signature) -> Formula {
    let mut parts = Vec::new();
    for i in 0..sig.n_objects {
        for a in 0..sig.n_actions {
            let g1 = p1.action_guard(a, i, sig.n_objects);
            let g2 = p2.action_guard(a, i, sig.n_objects);
            if g1 != g2 {
                parts.push(Formula::xor(g1, g2));
            }
        }
    }
    Formula::or(parts)
}

/// Semantic equivalence up to the schema's object count.
pub fn equivalent(p1: &Program, p2: &Program, axioms: &TheoryAxioms) -> bool {
    p1 == p2 || !is_sat(&diff_wp(p1, p2, axioms.signature()), axioms)
}

/// The exact set of output valuations a program can produce on inputs
/// satisfying a precondition. Each valuation is an output bit word.
///
/// Sorted and deduplicated, so equal images compare equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Image(Vec<u64>);

impl Image {
    pub fn from_vectors(v: impl IntoIterator<Item = u64>) -> Image {
        let set: BTreeSet<u64> = v.into_iter().collect();
        Image(set.into_iter().collect())
    }

    pub fn vectors(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Every output in the image satisfies the cube over output atoms.
    pub fn entails_cube(&self, cube: &Cube, sig: &Signature) -> bool {
        let (pos, neg) = out_masks(cube, sig);
        self.0.iter().all(|&v| v & pos == pos && v & neg == 0)
    }

    /// Some output in the image satisfies the cube.
    pub fn meets_cube(&self, cube: &Cube, sig: &Signature) -> bool {
        let (pos, neg) = out_masks(cube, sig);
        self.0.iter().any(|&v| v & pos == pos && v & neg == 0)
    }

    pub fn intersects(&self, other: &Image) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    pub fn union<'a>(images: impl IntoIterator<Item = &'a Image>) -> Image {
        Image::from_vectors(images.into_iter().flat_map(|i| i.0.iter().copied()))
    }

    /// Canonical formula: disjunction of full minterms over all output atoms.
    pub fn to_formula(&self, sig: &Signature) -> Formula {
        Formula::or(self.0.iter().map(|&v| {
            Formula::and(sig.output_atoms().into_iter().map(|a| {
                let Atom::Out { obj, action } = a else { unreachable!() };
                let on = v >> sig.out_bit(obj, action) & 1 == 1;
                Formula::lit(if on { a.pos() } else { a.neg() })
            }))
        }))
    }
}

/// Required-true and required-false output bits of a cube. Non-output
/// literals are ignored.
pub fn out_masks(cube: &Cube, sig: &Signature) -> (u64, u64) {
    let (mut pos, mut neg) = (0u64, 0u64);
    for l in cube.literals() {
        if let Atom::Out { obj, action } = l.atom {
            let b = 1u64 << sig.out_bit(obj, action);
            if l.positive {
                pos |= b;
            } else {
                neg |= b;
            }
        }
    }
    (pos, neg)
}

/// One slot of the enumeration: which model field it sets and its choices.
enum Slot {
    Attr { obj: u8, attr: u8, choices: Vec<u8> },
    Rel { rel: u8, from: u8, to: u8, choices: Vec<bool> },
}

/// Exact strongest postcondition of `p` under the input cube `pre`.
///
/// Enumerates only the inputs the program reads. Values an attribute is
/// never compared against are interchangeable, so one representative of
/// them is enough.
pub fn strongest_post(p: &Program, pre: &Cube, axioms: &TheoryAxioms) -> Result<Image> {
    if !axioms.cube_consistent(pre) {
        return Err(Error::Logic("precondition is unsatisfiable".into()));
    }
    let sig = axioms.signature();
    let (attrs, rels, values) = p.support();
    let mut slots = Vec::new();
    for obj in 0..sig.n_objects {
        for &attr in &attrs {
            let allowed: Vec<u8> = (0..sig.domains[attr as usize])
                .filter(|&v| {
                    let a = Atom::attr(obj, attr, v);
                    !pre.contains(&a.neg())
                        && pre.literals().iter().all(|l| {
                            !l.positive
                                || !matches!(l.atom, Atom::Attr { obj: o, attr: t, value } if o == obj && t == attr && value != v)
                        })
                })
                .collect();
            let mut choices: Vec<u8> =
                allowed.iter().copied().filter(|v| values.binary_search(&(attr, *v)).is_ok()).collect();
            if let Some(&rep) = allowed.iter().find(|v| values.binary_search(&(attr, **v)).is_err()) {
                choices.push(rep);
            }
            slots.push(Slot::Attr { obj, attr, choices });
        }
    }
    for &rel in &rels {
        for from in 0..sig.n_objects {
            for to in 0..sig.n_objects {
                if from == to {
                    continue;
                }
                let a = Atom::rel(rel, from, to);
                let choices = if pre.contains(&a.pos()) {
                    vec![true]
                } else if pre.contains(&a.neg()) {
                    vec![false]
                } else {
                    vec![false, true]
                };
                slots.push(Slot::Rel { rel, from, to, choices });
            }
        }
    }
    let mut m = Model::zero(sig);
    let mut counters = vec![0usize; slots.len()];
    for s in &slots {
        apply(&mut m, s, 0);
    }
    let mut out = BTreeSet::new();
    loop {
        out.insert(p.eval(&m, sig).0);
        let mut k = slots.len();
        loop {
            if k == 0 {
                return Ok(Image(out.into_iter().collect()));
            }
            k -= 1;
            let n = match &slots[k] {
                Slot::Attr { choices, .. } => choices.len(),
                Slot::Rel { choices, .. } => choices.len(),
            };
            counters[k] += 1;
            if counters[k] < n {
                apply(&mut m, &slots[k], counters[k]);
                break;
            }
            counters[k] = 0;
            apply(&mut m, &slots[k], 0);
        }
    }
}

fn apply(m: &mut Model, s: &Slot, c: usize) {
    match s {
        Slot::Attr { obj, attr, choices } => m.set_attr(*obj, *attr, choices[c]),
        Slot::Rel { rel, from, to, choices } => m.set_rel(*rel, *from, *to, choices[c]),
    }
}
