//! Enumerative synthesis of programs consistent with input/output examples.
//!
//! Grammar: a guard is a conjunction of one to three literals, each a
//! (possibly negated) self-attribute test or a positive `ExistsOther` with a
//! one- or two-literal positive witness cube. At most one `ExistsOther` per
//! guard and no two self-literals on the same attribute. A program has at
//! most two rules.

use super::program::{Guard, OutputMap, Program, Rule, WitnessLit};
use super::schema::Schema;
use crate::logic::Model;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Example {
    pub input: Model,
    pub output: OutputMap,
}

fn self_literals(schema: &Schema) -> Vec<Guard> {
    let mut out = Vec::new();
    for (attr, def) in schema.attributes.iter().enumerate() {
        for value in 0..def.values.len() as u8 {
            let g = Guard::SelfAttr { attr: attr as u8, value };
            out.push(Guard::Not(Box::new(g.clone())));
            out.push(g);
        }
    }
    out
}

fn exists_literals(schema: &Schema) -> Vec<Guard> {
    let mut witnesses: Vec<Vec<WitnessLit>> = Vec::new();
    let lits: Vec<WitnessLit> = schema
        .attributes
        .iter()
        .enumerate()
        .flat_map(|(a, d)| (0..d.values.len() as u8).map(move |v| WitnessLit { attr: a as u8, value: v, positive: true }))
        .collect();
    for (i, &a) in lits.iter().enumerate() {
        witnesses.push(vec![a]);
        for &b in &lits[i + 1..] {
            if a.attr != b.attr {
                witnesses.push(vec![a, b]);
            }
        }
    }
    let mut out = Vec::new();
    for rel in 0..schema.relations.len() as u8 {
        for w in &witnesses {
            out.push(Guard::ExistsOther { rel, witness: w.clone() });
        }
    }
    out
}

fn self_attr_of(g: &Guard) -> Option<u8> {
    match g {
        Guard::SelfAttr { attr, .. } => Some(*attr),
        Guard::Not(inner) => self_attr_of(inner),
        _ => None,
    }
}

/// All grammar guards of size at most `max_size`, in deterministic order.
pub fn enumerate_guards(schema: &Schema, max_size: usize) -> Vec<Guard> {
    let mut lits = self_literals(schema);
    lits.extend(exists_literals(schema));
    lits.retain(|g| g.size() <= max_size);
    lits.sort();
    let compatible = |a: &Guard, b: &Guard| match (self_attr_of(a), self_attr_of(b)) {
        (Some(x), Some(y)) => x != y,
        (None, None) => false,
        _ => true,
    };
    let mut out: Vec<Guard> = lits.clone();
    for i in 0..lits.len() {
        for j in i + 1..lits.len() {
            let (a, b) = (&lits[i], &lits[j]);
            if !compatible(a, b) || 1 + a.size() + b.size() > max_size {
                continue;
            }
            out.push(Guard::And(vec![a.clone(), b.clone()]));
            for c in &lits[j + 1..] {
                if compatible(a, c) && compatible(b, c) && 1 + a.size() + b.size() + c.size() <= max_size {
                    out.push(Guard::And(vec![a.clone(), b.clone(), c.clone()]));
                }
            }
        }
    }
    out.into_iter().map(|g| g.canonical()).collect()
}

/// All grammar rules of AST size at most `max_size`.
pub fn enumerate_rules(schema: &Schema, max_size: usize) -> Vec<Rule> {
    if max_size < 2 {
        return Vec::new();
    }
    let guards = enumerate_guards(schema, max_size - 1);
    let mut rules = Vec::with_capacity(guards.len() * schema.actions.len());
    for action in 0..schema.actions.len() as u8 {
        for g in &guards {
            rules.push(Rule { guard: g.clone(), action });
        }
    }
    rules.sort();
    rules
}

/// Every grammar program of size at most `size_bound` that reproduces all
/// examples, sorted by size then structure.
pub fn synthesize(schema: &Schema, examples: &[Example], size_bound: usize) -> Vec<Program> {
    let sig = schema.signature();
    for (i, a) in examples.iter().enumerate() {
        if examples[..i].iter().any(|b| b.input == a.input && b.output != a.output) {
            return Vec::new();
        }
    }
    let fits = |outs: &[u64]| outs.iter().zip(examples).all(|(o, e)| *o == e.output.0);
    // Keep rules whose output never exceeds the target on any example.
    let mut cands: Vec<(Rule, Vec<u64>)> = Vec::new();
    for r in enumerate_rules(schema, size_bound) {
        let p = Program::new([r.clone()]);
        let outs: Vec<u64> = examples.iter().map(|e| p.eval(&e.input, &sig).0).collect();
        if outs.iter().zip(examples).all(|(o, e)| o & !e.output.0 == 0) {
            cands.push((r, outs));
        }
    }
    let mut progs = Vec::new();
    if examples.iter().all(|e| e.output.0 == 0) {
        progs.push(Program::empty());
    }
    for (i, (r, outs)) in cands.iter().enumerate() {
        if fits(outs) {
            progs.push(Program::new([r.clone()]));
        }
        for (r2, outs2) in &cands[i + 1..] {
            if r.size() + r2.size() > size_bound {
                continue;
            }
            let union: Vec<u64> = outs.iter().zip(outs2).map(|(a, b)| a | b).collect();
            if fits(&union) {
                progs.push(Program::new([r.clone(), r2.clone()]));
            }
        }
    }
    progs.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.cmp(b)));
    progs.dedup();
    progs
}
