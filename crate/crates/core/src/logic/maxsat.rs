use super::atom::{Atom, Literal};
use super::formula::Formula;
use super::model::{Assignment, TheoryAxioms};
use super::sat::{Encoder, Lit};

/// A soft constraint: `lit` should hold; `cost` is paid when it does not.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Soft {
    pub lit: Literal,
    pub cost: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxSatSolution {
    pub assignment: Assignment,
    pub cost: u64,
}

/// Minimum-cost model of the hard constraints.
///
/// Soft literals must range over distinguished indicator atoms. Among
/// optimal models, the one whose sorted sequence of true indicators is
/// lexicographically smallest wins (a proper prefix sorts first).
pub fn maxsat(hard: &[Formula], soft: &[Soft], axioms: &TheoryAxioms) -> Option<MaxSatSolution> {
    let mut indicators: Vec<Atom> = soft.iter().map(|s| s.lit.atom).collect();
    indicators.sort();
    indicators.dedup();

    let mut enc = Encoder::new(axioms);
    let vars: Vec<u32> = indicators.iter().map(|a| enc.var(*a)).collect();
    for h in hard {
        enc.assert(h);
    }
    // cost of setting indicator i to true / false
    let mut cost_true = vec![0u64; indicators.len()];
    let mut cost_false = vec![0u64; indicators.len()];
    for s in soft {
        let i = indicators.binary_search(&s.lit.atom).unwrap();
        if s.lit.positive {
            cost_false[i] += s.cost;
        } else {
            cost_true[i] += s.cost;
        }
    }

    let mut search = Search { enc: &mut enc, vars: &vars, cost_true: &cost_true, cost_false: &cost_false };
    let mut fixed: Vec<Lit> = Vec::new();
    let (best, _) = search.minimize(&fixed, 0, u64::MAX)?;

    // Lexicographic tie-break at cost `best`.
    let n = vars.len();
    let mut pos = 0;
    let mut fixed_cost = 0u64;
    let assignment = loop {
        let mut all_false = fixed.clone();
        all_false.extend(vars[pos..].iter().map(|&v| Lit::new(v, false)));
        let rest: u64 = cost_false[pos..].iter().sum();
        if fixed_cost + rest <= best {
            if let Some((_, m)) = search.minimize(&all_false, n, best - fixed_cost - rest + 1) {
                break m;
            }
        }
        let mut advanced = false;
        for j in pos..n {
            let mut trial = fixed.clone();
            trial.extend(vars[pos..j].iter().map(|&v| Lit::new(v, false)));
            trial.push(Lit::new(vars[j], true));
            let spent = fixed_cost + cost_false[pos..j].iter().sum::<u64>() + cost_true[j];
            if spent > best {
                continue;
            }
            if search.minimize(&trial, j + 1, best - spent + 1).is_some() {
                fixed = trial;
                fixed_cost = spent;
                pos = j + 1;
                advanced = true;
                break;
            }
        }
        assert!(advanced, "optimum must be reachable");
    };
    Some(MaxSatSolution { assignment, cost: best })
}

struct Search<'e, 'a> {
    enc: &'e mut Encoder<'a>,
    vars: &'e [u32],
    cost_true: &'e [u64],
    cost_false: &'e [u64],
}

impl Search<'_, '_> {
    /// Cheapest completion of `fixed` over indicators `from..` with cost
    /// strictly below `bound`; returns its cost and model.
    fn minimize(&mut self, fixed: &[Lit], from: usize, bound: u64) -> Option<(u64, Assignment)> {
        let mut best: Option<(u64, Assignment)> = None;
        let mut bound = bound;
        let mut assumptions = fixed.to_vec();
        self.rec(&mut assumptions, from, 0, &mut bound, &mut best);
        best
    }

    fn rec(&mut self, assumptions: &mut Vec<Lit>, depth: usize, cost: u64, bound: &mut u64, best: &mut Option<(u64, Assignment)>) {
        if cost >= *bound || !self.enc.solve(assumptions) {
            return;
        }
        if depth == self.vars.len() {
            *bound = cost;
            *best = Some((cost, self.enc.assignment()));
            return;
        }
        let v = self.vars[depth];
        let (ct, cf) = (self.cost_true[depth], self.cost_false[depth]);
        let order = if ct < cf { [true, false] } else { [false, true] };
        for val in order {
            assumptions.push(Lit::new(v, val));
            let c = cost + if val { ct } else { cf };
            self.rec(assumptions, depth + 1, c, bound, best);
            assumptions.pop();
        }
    }
}
