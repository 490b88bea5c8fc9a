//! A small DPLL solver with two watched literals and a Tseitin front end.
//!
//! Instances here are tiny (tens to a few hundred atoms), so there is no
//! clause learning: chronological backtracking with unit propagation is fast
//! enough and keeps the search order, and therefore every model returned,
//! fully deterministic.

use std::collections::HashMap;

use super::atom::{Atom, Literal};
use super::formula::Formula;
use super::model::{Assignment, TheoryAxioms};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Lit(u32);

impl Lit {
    pub fn new(var: u32, positive: bool) -> Lit {
        Lit(var << 1 | (!positive) as u32)
    }
    pub fn var(self) -> u32 {
        self.0 >> 1
    }
    pub fn positive(self) -> bool {
        self.0 & 1 == 0
    }
    fn idx(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

const UNDEF: i8 = 0;

#[derive(Default)]
pub(crate) struct Solver {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<u32>>,
    units: Vec<Lit>,
    assigns: Vec<i8>,
    trail: Vec<Lit>,
    /// (trail position, decision literal, already flipped)
    levels: Vec<(usize, Lit, bool)>,
    qhead: usize,
    /// Preferred decision order; variables not listed are decided afterwards.
    priority: Vec<u32>,
    trivially_unsat: bool,
}

impl Solver {
    pub fn new_var(&mut self) -> u32 {
        let v = self.assigns.len() as u32;
        self.assigns.push(UNDEF);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        v
    }

    pub fn prioritize(&mut self, v: u32) {
        self.priority.push(v);
    }

    pub fn add_clause(&mut self, lits: &[Lit]) {
        let mut c: Vec<Lit> = lits.to_vec();
        c.sort_by_key(|l| l.0);
        c.dedup();
        if c.windows(2).any(|w| w[0] == !w[1]) {
            return;
        }
        match c.len() {
            0 => self.trivially_unsat = true,
            1 => self.units.push(c[0]),
            _ => {
                let ci = self.clauses.len() as u32;
                self.watches[c[0].idx()].push(ci);
                self.watches[c[1].idx()].push(ci);
                self.clauses.push(c);
            }
        }
    }

    #[inline]
    fn value(&self, l: Lit) -> i8 {
        let v = self.assigns[l.var() as usize];
        if l.positive() {
            v
        } else {
            -v
        }
    }

    fn enqueue(&mut self, l: Lit) -> bool {
        match self.value(l) {
            1 => true,
            -1 => false,
            _ => {
                self.assigns[l.var() as usize] = if l.positive() { 1 } else { -1 };
                self.trail.push(l);
                true
            }
        }
    }

    fn undo_to(&mut self, pos: usize) {
        while self.trail.len() > pos {
            let l = self.trail.pop().unwrap();
            self.assigns[l.var() as usize] = UNDEF;
        }
        self.qhead = self.qhead.min(pos);
    }

    /// Unit propagation; `false` on conflict.
    fn propagate(&mut self) -> bool {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = !p;
            let ws = std::mem::take(&mut self.watches[false_lit.idx()]);
            let mut kept = Vec::with_capacity(ws.len());
            let mut conflict = false;
            let mut k = 0;
            while k < ws.len() {
                let ci = ws[k];
                k += 1;
                let c = &mut self.clauses[ci as usize];
                if c[0] == false_lit {
                    c.swap(0, 1);
                }
                let first = c[0];
                let v0 = {
                    let v = self.assigns[first.var() as usize];
                    if first.positive() { v } else { -v }
                };
                if v0 == 1 {
                    kept.push(ci);
                    continue;
                }
                let mut moved = false;
                for j in 2..c.len() {
                    let l = c[j];
                    let v = self.assigns[l.var() as usize];
                    let lv = if l.positive() { v } else { -v };
                    if lv != -1 {
                        c.swap(1, j);
                        let nw = c[1];
                        self.watches[nw.idx()].push(ci);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                kept.push(ci);
                if v0 == -1 {
                    conflict = true;
                    kept.extend_from_slice(&ws[k..]);
                    break;
                }
                self.enqueue(first);
            }
            let slot = &mut self.watches[false_lit.idx()];
            kept.append(slot);
            *slot = kept;
            if conflict {
                return false;
            }
        }
        true
    }

    fn pick(&self, cursor: &mut usize) -> Option<u32> {
        while *cursor < self.priority.len() {
            let v = self.priority[*cursor];
            if self.assigns[v as usize] == UNDEF {
                return Some(v);
            }
            *cursor += 1;
        }
        (0..self.assigns.len() as u32).find(|&v| self.assigns[v as usize] == UNDEF)
    }

    /// Decide satisfiability under assumptions. On success the assignment
    /// stays readable through [`Solver::model_value`] until the next call.
    pub fn solve(&mut self, assumptions: &[Lit]) -> bool {
        self.undo_to(0);
        self.levels.clear();
        if self.trivially_unsat {
            return false;
        }
        for i in 0..self.units.len() {
            let u = self.units[i];
            if !self.enqueue(u) {
                return false;
            }
        }
        if !self.propagate() {
            return false;
        }
        for &a in assumptions {
            if !self.enqueue(a) || !self.propagate() {
                return false;
            }
        }
        let mut cursor = 0;
        loop {
            let Some(v) = self.pick(&mut cursor) else {
                return true;
            };
            let d = Lit::new(v, false);
            self.levels.push((self.trail.len(), d, false));
            self.enqueue(d);
            while !self.propagate() {
                loop {
                    let Some((pos, lit, flipped)) = self.levels.pop() else {
                        return false;
                    };
                    self.undo_to(pos);
                    if !flipped {
                        self.levels.push((pos, !lit, true));
                        self.enqueue(!lit);
                        break;
                    }
                }
                cursor = 0;
            }
        }
    }

    pub fn model_value(&self, v: u32) -> bool {
        self.assigns[v as usize] == 1
    }
}

/// Tseitin encoder binding atoms to solver variables, with exactly-one
/// constraints added for every attribute group an atom belongs to.
pub(crate) struct Encoder<'a> {
    axioms: &'a TheoryAxioms,
    pub solver: Solver,
    vars: HashMap<Atom, u32>,
    atoms: Vec<(Atom, u32)>,
    cache: HashMap<Formula, Lit>,
}

impl<'a> Encoder<'a> {
    pub fn new(axioms: &'a TheoryAxioms) -> Self {
        Encoder { axioms, solver: Solver::default(), vars: HashMap::new(), atoms: Vec::new(), cache: HashMap::new() }
    }

    pub fn var(&mut self, atom: Atom) -> u32 {
        if let Some(&v) = self.vars.get(&atom) {
            return v;
        }
        match self.axioms.group(&atom) {
            Some(group) => {
                let vs: Vec<u32> = group.iter().map(|a| self.fresh_atom(*a)).collect();
                let at_least: Vec<Lit> = vs.iter().map(|&v| Lit::new(v, true)).collect();
                self.solver.add_clause(&at_least);
                for i in 0..vs.len() {
                    for j in i + 1..vs.len() {
                        self.solver.add_clause(&[Lit::new(vs[i], false), Lit::new(vs[j], false)]);
                    }
                }
                self.vars[&atom]
            }
            None => self.fresh_atom(atom),
        }
    }

    fn fresh_atom(&mut self, atom: Atom) -> u32 {
        let v = self.solver.new_var();
        self.solver.prioritize(v);
        self.vars.insert(atom, v);
        self.atoms.push((atom, v));
        v
    }

    pub fn lit(&mut self, l: &Literal) -> Lit {
        Lit::new(self.var(l.atom), l.positive)
    }

    /// Literal equivalent to `f`.
    pub fn encode(&mut self, f: &Formula) -> Lit {
        match f {
            Formula::Lit(l) => return self.lit(l),
            Formula::True | Formula::False => {
                let t = self.constant_true();
                return if matches!(f, Formula::True) { t } else { !t };
            }
            _ => {}
        }
        if let Some(&l) = self.cache.get(f) {
            return l;
        }
        let (cs, is_and) = match f {
            Formula::And(cs) => (cs, true),
            Formula::Or(cs) => (cs, false),
            _ => unreachable!(),
        };
        let kids: Vec<Lit> = cs.iter().map(|c| self.encode(c)).collect();
        let g = Lit::new(self.solver.new_var(), true);
        if is_and {
            for &k in &kids {
                self.solver.add_clause(&[!g, k]);
            }
            let mut big: Vec<Lit> = kids.iter().map(|&k| !k).collect();
            big.push(g);
            self.solver.add_clause(&big);
        } else {
            for &k in &kids {
                self.solver.add_clause(&[g, !k]);
            }
            let mut big = kids.clone();
            big.push(!g);
            self.solver.add_clause(&big);
        }
        self.cache.insert(f.clone(), g);
        g
    }

    fn constant_true(&mut self) -> Lit {
        if let Some(&l) = self.cache.get(&Formula::True) {
            return l;
        }
        let t = Lit::new(self.solver.new_var(), true);
        self.solver.add_clause(&[t]);
        self.cache.insert(Formula::True, t);
        t
    }

    /// Add `f` as a hard constraint.
    pub fn assert(&mut self, f: &Formula) {
        match f {
            Formula::True => {}
            Formula::False => self.solver.add_clause(&[]),
            Formula::And(cs) => cs.iter().for_each(|c| self.assert(c)),
            Formula::Or(cs) => {
                let lits: Vec<Lit> = cs.iter().map(|c| self.encode(c)).collect();
                self.solver.add_clause(&lits);
            }
            Formula::Lit(l) => {
                let x = self.lit(l);
                self.solver.add_clause(&[x]);
            }
        }
    }

    pub fn solve(&mut self, assumptions: &[Lit]) -> bool {
        self.solver.solve(assumptions)
    }

    /// Current model restricted to the atoms known to the encoder.
    pub fn assignment(&self) -> Assignment {
        Assignment(self.atoms.iter().map(|&(a, v)| (a, self.solver.model_value(v))).collect())
    }
}

/// Answers repeated "does this cube entail `f`?" questions with one solver.
pub struct ImplicationChecker<'a> {
    enc: Encoder<'a>,
}

impl<'a> ImplicationChecker<'a> {
    pub fn new(f: &Formula, axioms: &'a TheoryAxioms) -> Self {
        let mut enc = Encoder::new(axioms);
        enc.assert(&f.negate());
        ImplicationChecker { enc }
    }

    /// `cube ⊨ f` modulo the axioms.
    pub fn implied_by(&mut self, cube: &super::cube::Cube) -> bool {
        let lits: Vec<Lit> = cube.literals().iter().map(|l| self.enc.lit(l)).collect();
        !self.enc.solve(&lits)
    }
}

/// True iff some model of the axioms satisfies `f`.
pub fn is_sat(f: &Formula, axioms: &TheoryAxioms) -> bool {
    find_model(f, axioms).is_some()
}

/// A model of `f` over its atoms and their attribute groups.
pub fn find_model(f: &Formula, axioms: &TheoryAxioms) -> Option<Assignment> {
    match f {
        Formula::True => return Some(Assignment::default()),
        Formula::False => return None,
        _ => {}
    }
    let mut enc = Encoder::new(axioms);
    enc.assert(f);
    enc.solve(&[]).then(|| enc.assignment())
}

/// `f ⊨ g` modulo the axioms.
pub fn entails(f: &Formula, g: &Formula, axioms: &TheoryAxioms) -> bool {
    !is_sat(&Formula::and([f.clone(), g.negate()]), axioms)
}

/// Every assignment to `vars` (plus the attribute groups they touch) that
/// extends to a model of `f`, each exactly once, in solver order.
pub fn enumerate_models(f: &Formula, vars: &[Atom], axioms: &TheoryAxioms) -> Vec<Assignment> {
    let mut enc = Encoder::new(axioms);
    for &a in vars {
        enc.var(a);
    }
    let projected: Vec<(Atom, u32)> = enc.atoms.clone();
    enc.assert(f);
    let mut out = Vec::new();
    while enc.solve(&[]) {
        let m = Assignment(projected.iter().map(|&(a, v)| (a, enc.solver.model_value(v))).collect());
        let block: Vec<Lit> = projected.iter().map(|&(_, v)| Lit::new(v, !enc.solver.model_value(v))).collect();
        out.push(m);
        if block.is_empty() {
            break;
        }
        enc.solver.add_clause(&block);
    }
    out
}
