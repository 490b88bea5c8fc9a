#![allow(dead_code)]

use disambig_core::logic::{Atom, Cube, Literal, TheoryAxioms};
use disambig_core::rulelang::{enumerate_rules, Guard, Program, Rule, Schema, WitnessLit};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

pub const BLUR: u8 = 0;
pub const BRIGHTEN: u8 = 1;

pub fn attr(schema: &Schema, obj: u8, name: &str, value: &str) -> Atom {
    let a = schema.attr_index(name).unwrap();
    Atom::attr(obj, a, schema.value_index(a, value).unwrap())
}

pub fn self_is(schema: &Schema, name: &str, value: &str) -> Guard {
    let a = schema.attr_index(name).unwrap();
    Guard::SelfAttr { attr: a, value: schema.value_index(a, value).unwrap() }
}

/// The three brighten programs of the running face/hair/guitar example.
pub fn face_programs(schema: &Schema) -> [Program; 3] {
    let face = self_is(schema, "label", "face");
    let label = schema.attr_index("label").unwrap();
    let guitar = schema.value_index(label, "guitar").unwrap();
    let rule = |g: Guard| Program::new([Rule { guard: g, action: BRIGHTEN }]);
    [
        rule(Guard::And(vec![face.clone(), self_is(schema, "hair", "brown")])),
        rule(Guard::And(vec![face.clone(), self_is(schema, "expression", "smiling")])),
        rule(Guard::And(vec![
            face,
            Guard::ExistsOther { rel: 0, witness: vec![WitnessLit { attr: label, value: guitar, positive: true }] },
        ])),
    ]
}

pub fn cube(lits: impl IntoIterator<Item = Literal>) -> Cube {
    Cube::new(lits).unwrap()
}

/// Every consistent cube over `atoms` (each atom absent, positive or negative).
pub fn all_cubes(atoms: &[Atom], axioms: &TheoryAxioms) -> Vec<Cube> {
    let mut out = vec![Vec::new()];
    for a in atoms {
        let mut next = Vec::with_capacity(out.len() * 3);
        for c in &out {
            next.push(c.clone());
            let mut p: Vec<Literal> = c.clone();
            p.push(a.pos());
            next.push(p);
            let mut n: Vec<Literal> = c.clone();
            n.push(a.neg());
            next.push(n);
        }
        out = next;
    }
    out.into_iter().map(|c| Cube::new(c).unwrap()).filter(|c| axioms.cube_consistent(c)).collect()
}

/// Random programs of one or two rules drawn from the synthesis grammar.
pub fn random_programs(schema: &Schema, rng: &mut impl Rng, n: usize, max_rule_size: usize) -> Vec<Program> {
    let rules = enumerate_rules(schema, max_rule_size);
    (0..n)
        .map(|_| {
            let k = rng.random_range(1..=2);
            Program::new((0..k).map(|_| rules.choose(rng).unwrap().clone()))
        })
        .collect()
}

pub fn random_atoms(schema: &Schema, rng: &mut impl Rng, n: usize) -> Vec<Atom> {
    let mut all = schema.signature().input_atoms();
    all.shuffle(rng);
    all.truncate(n);
    all.sort();
    all
}

/// Output image by running the program on every input satisfying `pre`.
pub fn brute_image(
    p: &disambig_core::rulelang::Program,
    pre: &Cube,
    sig: &disambig_core::logic::Signature,
) -> disambig_core::rulelang::Image {
    use disambig_core::logic::Model;
    disambig_core::rulelang::Image::from_vectors(
        Model::all_inputs(sig)
            .iter()
            .filter(|m| pre.literals().iter().all(|l| m.holds(l)))
            .map(|m| p.eval(m, sig).0),
    )
}
