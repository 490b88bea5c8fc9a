//! Precondition synthesis: the cube over the precondition universe that
//! distinguishes the most program pairs at the lowest literal cost.

use std::collections::BTreeMap;

use crate::distinguish::DistinguishingSet;
use crate::logic::bits::{Bits, LocalIndex};
use crate::logic::{entails, maxsat, Atom, Cube, Formula, Literal, Soft, TheoryAxioms};
use crate::rulelang::{diff_wp, Program};

/// Integer objective weights: `pair` per distinguished pair, `atom` per literal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecondWeights {
    pub pair: i64,
    pub atom: i64,
}

impl PrecondWeights {
    pub fn from_lambda(lambda_pre: f64) -> Self {
        PrecondWeights { pair: 1000, atom: (lambda_pre * 1000.0).round().max(0.0) as i64 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecondResult {
    pub cube: Cube,
    /// Pairs `(i, j)` (positions in the program list) with a Φ cube inside `cube`.
    pub pairs_distinguished: Vec<(usize, usize)>,
    /// `pair * |pairs| - atom * size(cube)`
    pub objective: i64,
    /// Search finished within its node budget.
    pub optimal: bool,
}

/// Number of pairs the cube provably separates.
pub fn dppre(cube: &Cube, programs: &[&Program], axioms: &TheoryAxioms) -> usize {
    let pre = cube.to_formula();
    let mut n = 0;
    for i in 0..programs.len() {
        for j in i + 1..programs.len() {
            if entails(&pre, &diff_wp(programs[i], programs[j], axioms.signature()), axioms) {
                n += 1;
            }
        }
    }
    n
}

pub const DEFAULT_NODE_BUDGET: usize = 4000;

/// Best precondition for Φ, or `None` when no cube distinguishes any pair
/// at positive objective.
///
/// Ties are broken by fewer literals, then canonical cube order.
pub fn get_best_precondition(
    phi: &DistinguishingSet,
    lambda_pre: f64,
    axioms: &TheoryAxioms,
) -> Option<PrecondResult> {
    get_best_precondition_with(phi, PrecondWeights::from_lambda(lambda_pre), axioms, DEFAULT_NODE_BUDGET)
}

pub fn get_best_precondition_with(
    phi: &DistinguishingSet,
    w: PrecondWeights,
    axioms: &TheoryAxioms,
    node_budget: usize,
) -> Option<PrecondResult> {
    let inst = Instance::new(phi, axioms)?;
    let mut s = Search::new(&inst, w, node_budget);
    s.greedy();
    s.run();
    let best = s.best;
    let covered = inst.covered(best.lits);
    let pairs: Vec<(usize, usize)> = (0..inst.pairs.len()).filter(|&p| covered[p]).map(|p| inst.pairs[p]).collect();
    if pairs.is_empty() {
        return None;
    }
    let cube = drop_implied(&inst.idx.to_cube(best.lits));
    let objective = w.pair * pairs.len() as i64 - w.atom * cube.size() as i64;
    Some(PrecondResult { cube, pairs_distinguished: pairs, objective, optimal: !s.exhausted })
}

/// Remove negative attribute literals made redundant by a positive literal
/// on the same object and attribute. The cube stays equivalent.
fn drop_implied(c: &Cube) -> Cube {
    let fixed = |obj: u8, attr: u8| {
        c.literals().iter().any(|l| l.positive && matches!(l.atom, Atom::Attr { obj: o, attr: a, .. } if o == obj && a == attr))
    };
    Cube::new(c.literals().iter().copied().filter(|l| match l.atom {
        Atom::Attr { obj, attr, .. } if !l.positive => !fixed(obj, attr),
        _ => true,
    }))
    .expect("subset of a consistent cube")
}

struct Instance {
    idx: LocalIndex,
    pairs: Vec<(usize, usize)>,
    cubes: Vec<Bits>,
    cube_pairs: Vec<Vec<usize>>,
    pair_cubes: Vec<Vec<usize>>,
}

impl Instance {
    fn new(phi: &DistinguishingSet, axioms: &TheoryAxioms) -> Option<Instance> {
        let atoms = phi.pairs.values().flatten().flat_map(|c| c.literals().iter().map(|l| l.atom));
        let idx = LocalIndex::build(atoms, axioms).ok()?;
        let mut by_cube: BTreeMap<Cube, Vec<usize>> = BTreeMap::new();
        let mut pairs = Vec::new();
        for (&key, cubes) in &phi.pairs {
            if cubes.is_empty() {
                continue;
            }
            let p = pairs.len();
            pairs.push(key);
            for c in cubes {
                by_cube.entry(c.clone()).or_default().push(p);
            }
        }
        let mut order: Vec<(Cube, Vec<usize>)> = by_cube.into_iter().collect();
        order.sort_by(|a, b| a.0.size().cmp(&b.0.size()).then(b.1.len().cmp(&a.1.len())).then_with(|| a.0.cmp(&b.0)));
        let mut cubes = Vec::new();
        let mut cube_pairs = Vec::new();
        let mut pair_cubes = vec![Vec::new(); pairs.len()];
        for (c, ps) in order {
            let b = c.literals().iter().filter_map(|l| idx.lit_bits(l)).fold(Bits::EMPTY, Bits::union);
            if !idx.consistent(b) {
                continue;
            }
            let id = cubes.len();
            for &p in &ps {
                pair_cubes[p].push(id);
            }
            cubes.push(b);
            cube_pairs.push(ps);
        }
        Some(Instance { idx, pairs, cubes, cube_pairs, pair_cubes })
    }

    fn covered(&self, lits: Bits) -> Vec<bool> {
        let mut cov = vec![false; self.pairs.len()];
        for (c, b) in self.cubes.iter().enumerate() {
            if b.is_subset(lits) {
                for &p in &self.cube_pairs[c] {
                    cov[p] = true;
                }
            }
        }
        cov
    }
}

#[derive(Clone, Copy)]
struct Best {
    lits: Bits,
    score: i64,
}

struct Search<'a> {
    inst: &'a Instance,
    w: PrecondWeights,
    best: Best,
    nodes: usize,
    budget: usize,
    exhausted: bool,
}

impl<'a> Search<'a> {
    fn new(inst: &'a Instance, w: PrecondWeights, budget: usize) -> Self {
        Search { inst, w, best: Best { lits: Bits::EMPTY, score: 0 }, nodes: 0, budget, exhausted: false }
    }

    fn score(&self, lits: Bits, covered: &[bool]) -> i64 {
        self.w.pair * covered.iter().filter(|&&c| c).count() as i64 - self.w.atom * lits.len() as i64
    }

    /// Candidate beats the incumbent: higher score, then fewer literals,
    /// then smaller canonical cube.
    fn offer(&mut self, lits: Bits, score: i64) {
        let b = self.best;
        let better = score > b.score
            || (score == b.score
                && (lits.len() < b.lits.len()
                    || (lits.len() == b.lits.len() && self.inst.idx.to_cube(lits) < self.inst.idx.to_cube(b.lits))));
        if better {
            self.best = Best { lits, score };
        }
    }

    fn greedy(&mut self) {
        let mut lits = Bits::EMPTY;
        let mut covered = self.inst.covered(lits);
        loop {
            let mut pick: Option<(i64, usize)> = None;
            for (c, &b) in self.inst.cubes.iter().enumerate() {
                let u = lits.union(b);
                if u == lits || !self.inst.idx.consistent(u) {
                    continue;
                }
                let gain_pairs = self.inst.cube_pairs[c].iter().filter(|&&p| !covered[p]).count() as i64;
                let gain = self.w.pair * gain_pairs - self.w.atom * (u.len() - lits.len()) as i64;
                if gain > 0 && pick.is_none_or(|(g, _)| gain > g) {
                    pick = Some((gain, c));
                }
            }
            let Some((_, c)) = pick else { break };
            lits = lits.union(self.inst.cubes[c]);
            covered = self.inst.covered(lits);
            let s = self.score(lits, &covered);
            self.offer(lits, s);
        }
    }

    fn run(&mut self) {
        let abandoned = vec![false; self.inst.pairs.len()];
        self.dfs(Bits::EMPTY, abandoned);
    }

    fn dfs(&mut self, lits: Bits, mut abandoned: Vec<bool>) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        let covered = self.inst.covered(lits);
        let score = self.score(lits, &covered);
        self.offer(lits, score);

        // Uncovered, non-abandoned pairs that some compatible cube could still cover.
        let mut alive = 0i64;
        let mut branch: Option<(usize, Vec<usize>)> = None;
        for p in 0..self.inst.pairs.len() {
            if covered[p] || abandoned[p] {
                continue;
            }
            let options: Vec<usize> = self.inst.pair_cubes[p]
                .iter()
                .copied()
                .filter(|&c| self.inst.idx.consistent(lits.union(self.inst.cubes[c])))
                .collect();
            if options.is_empty() {
                continue;
            }
            alive += 1;
            if branch.as_ref().is_none_or(|(_, o)| options.len() < o.len()) {
                branch = Some((p, options));
            }
        }
        let Some((p, options)) = branch else { return };
        let ub = score + self.w.pair * alive - self.w.atom;
        if ub < self.best.score || (ub == self.best.score && lits.len() + 1 > self.best.lits.len()) {
            return;
        }
        for c in options {
            if self.exhausted {
                return;
            }
            self.dfs(lits.union(self.inst.cubes[c]), abandoned.clone());
        }
        abandoned[p] = true;
        if !self.exhausted {
            self.dfs(lits, abandoned);
        }
    }
}

/// The optimization-modulo-theory encoding over auxiliary indicators:
/// `a_t` selects universe literal `t`, `d_ij^k` marks that cube `k` of pair
/// `(i, j)` is fully selected, and `p_ij` marks the pair as distinguished.
#[derive(Clone, Debug)]
pub struct PrecondEncoding {
    pub hard: Vec<Formula>,
    pub soft: Vec<Soft>,
    /// `a_t` indicator atom for each universe literal.
    pub selectors: Vec<(Literal, Atom)>,
    pub pair_vars: Vec<((usize, usize), Atom)>,
}

pub fn encode(phi: &DistinguishingSet, upre: &[Literal], w: PrecondWeights) -> PrecondEncoding {
    let mut next = 0u32;
    let mut fresh = || {
        let a = Atom::aux(next);
        next += 1;
        a
    };
    let selectors: Vec<(Literal, Atom)> = upre.iter().map(|&l| (l, fresh())).collect();
    let sel = |l: &Literal| selectors.iter().find(|(x, _)| x == l).map(|(_, a)| *a);
    let mut hard = Vec::new();
    // (SAT): a selected literal holds on the shared input variables.
    for (l, a) in &selectors {
        hard.push(Formula::or([Formula::lit(a.neg()), Formula::lit(*l)]));
    }
    let mut pair_vars = Vec::new();
    let mut soft = Vec::new();
    for (&key, cubes) in &phi.pairs {
        let p = fresh();
        let mut ds = Vec::new();
        for c in cubes {
            let Some(ats) = c.literals().iter().map(sel).collect::<Option<Vec<Atom>>>() else {
                continue;
            };
            let d = fresh();
            // (IA): a marked cube has all its literals selected.
            for a in ats {
                hard.push(Formula::or([Formula::lit(d.neg()), Formula::lit(a.pos())]));
            }
            ds.push(d);
        }
        // (DP): distinguished iff some cube is marked.
        let any = Formula::or(ds.iter().map(|d| Formula::lit(d.pos())));
        hard.push(Formula::or([Formula::lit(p.neg()), any.clone()]));
        for d in &ds {
            hard.push(Formula::or([Formula::lit(d.neg()), Formula::lit(p.pos())]));
        }
        soft.push(Soft { lit: p.pos(), cost: w.pair as u64 });
        pair_vars.push((key, p));
    }
    for (_, a) in &selectors {
        soft.push(Soft { lit: a.neg(), cost: w.atom as u64 });
    }
    PrecondEncoding { hard, soft, selectors, pair_vars }
}

/// Solve the encoding with the generic MaxSAT procedure. Returns the
/// selected cube and its objective; meant for cross-checking small cases.
pub fn solve_encoding(enc: &PrecondEncoding, w: PrecondWeights, axioms: &TheoryAxioms) -> Option<(Cube, i64)> {
    let sol = maxsat(&enc.hard, &enc.soft, axioms)?;
    let lits: Vec<Literal> =
        enc.selectors.iter().filter(|(_, a)| sol.assignment.get(a) == Some(true)).map(|(l, _)| *l).collect();
    let pairs = enc.pair_vars.iter().filter(|(_, p)| sol.assignment.get(p) == Some(true)).count() as i64;
    let cube = Cube::new(lits).ok()?;
    Some((cube.clone(), w.pair * pairs - w.atom * cube.size() as i64))
}
