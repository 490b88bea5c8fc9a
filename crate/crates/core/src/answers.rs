//! Answer options for a fixed precondition: cluster programs by behaviour,
//! merge clusters into at most `k` bins and describe each bin by a minimum
//! separating cube over output literals.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logic::{maxsat, Atom, Cube, Formula, Literal, Signature, Soft, TheoryAxioms};
use crate::rulelang::{out_masks, strongest_post, Image, Program};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cluster {
    /// Positions in the program list, ascending.
    pub members: Vec<usize>,
    pub image: Image,
}

/// A multiple-choice query: a precondition and one separator per bin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryPlan {
    pub precondition: Cube,
    /// Program positions per option, each ascending and nonempty; options
    /// are ordered by their smallest member.
    pub bins: Vec<Vec<usize>>,
    pub separators: Vec<Cube>,
    /// Program positions in no option; they can only match none-of-the-above.
    #[serde(default)]
    pub rest: Vec<usize>,
    pub dpower: f64,
    pub objective: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnswerConfig {
    pub k: usize,
    pub lambda_post: f64,
    /// Weight of separator size in the load-balancing weights.
    pub lambda_bin: f64,
    /// Run branch and bound when a seed separator is larger than this...
    pub bnb_size_threshold: usize,
    /// ...or the seed's disambiguation power is below this.
    pub bnb_dpower_threshold: f64,
    pub bnb_node_budget: usize,
    pub bnb_leaf_budget: usize,
}

impl Default for AnswerConfig {
    fn default() -> Self {
        AnswerConfig {
            k: 4,
            lambda_post: 0.02,
            lambda_bin: 1.0,
            bnb_size_threshold: 4,
            bnb_dpower_threshold: 0.25,
            bnb_node_budget: 20_000,
            bnb_leaf_budget: 400,
        }
    }
}

/// Group programs by strongest postcondition under `pre`. Clusters are
/// ordered by their smallest member.
pub fn group_by_sp(programs: &[&Program], pre: &Cube, axioms: &TheoryAxioms) -> Result<Vec<Cluster>> {
    let mut out: Vec<Cluster> = Vec::new();
    let mut index: HashMap<Image, usize> = HashMap::new();
    for (i, p) in programs.iter().enumerate() {
        let img = strongest_post(p, pre, axioms)?;
        match index.get(&img) {
            Some(&c) => out[c].members.push(i),
            None => {
                index.insert(img.clone(), out.len());
                out.push(Cluster { members: vec![i], image: img });
            }
        }
    }
    Ok(out)
}

/// Output literals of `upost` that hold on every vector of the image.
pub fn implied_literals(image: &Image, upost: &[Literal], sig: &Signature) -> Vec<Literal> {
    upost
        .iter()
        .copied()
        .filter(|l| {
            let c = Cube::new([*l]).unwrap();
            l.atom.is_output() && image.entails_cube(&c, sig)
        })
        .collect()
}

/// Smallest cube over `upost` implied by every target behaviour and
/// inconsistent with every negative bin, found by counterexample-guided
/// MaxSAT. `None` when the behaviours overlap or no such cube exists.
pub fn construct_separator(
    target: &[&Image],
    negatives: &[Vec<&Image>],
    upost: &[Literal],
    sig: &Signature,
) -> Option<Cube> {
    let pos = Image::union(target.iter().copied());
    let negs: Vec<Image> = negatives.iter().map(|b| Image::union(b.iter().copied())).collect();
    if negs.iter().any(|n| n.intersects(&pos)) {
        return None;
    }
    let cands = implied_literals(&pos, upost, sig);
    let ax = TheoryAxioms::new(sig);
    let ind = |i: usize| Atom::aux(i as u32);
    let soft: Vec<Soft> = (0..cands.len()).map(|i| Soft { lit: ind(i).neg(), cost: 1 }).collect();
    let mut blocking: Vec<Formula> = Vec::new();
    loop {
        let sol = maxsat(&blocking, &soft, &ax)?;
        let chosen: Vec<Literal> =
            (0..cands.len()).filter(|&i| sol.assignment.get(&ind(i)) == Some(true)).map(|i| cands[i]).collect();
        let psi = Cube::new(chosen).expect("implied literals are consistent");
        let (pm, nm) = out_masks(&psi, sig);
        let cex = negs.iter().find_map(|n| n.vectors().iter().copied().find(|&v| v & pm == pm && v & nm == 0));
        let Some(m) = cex else { return Some(psi) };
        // Some chosen-able literal must be false on the counterexample.
        let clause: Vec<Formula> = cands
            .iter()
            .enumerate()
            .filter(|(_, l)| !vector_satisfies(m, l, sig))
            .map(|(i, _)| Formula::lit(ind(i).pos()))
            .collect();
        if clause.is_empty() {
            return None;
        }
        blocking.push(Formula::or(clause));
    }
}

fn vector_satisfies(v: u64, l: &Literal, sig: &Signature) -> bool {
    match l.atom {
        Atom::Out { obj, action } => (v >> sig.out_bit(obj, action) & 1 == 1) == l.positive,
        _ => false,
    }
}

/// Per-cluster weights `|C_i| + λ·size(ψ_i)` with one-vs-all separators;
/// an inseparable cluster counts `|𝒜| + 1` literals.
pub fn cluster_weights(clusters: &[Cluster], upost: &[Literal], sig: &Signature, lambda_bin: f64) -> Vec<f64> {
    (0..clusters.len())
        .map(|i| {
            let target = [&clusters[i].image];
            let negs: Vec<Vec<&Image>> =
                clusters.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, c)| vec![&c.image]).collect();
            let size = match construct_separator(&target, &negs, upost, sig) {
                Some(c) => c.size(),
                None => implied_literals(&clusters[i].image, upost, sig).len() + 1,
            };
            clusters[i].members.len() as f64 + lambda_bin * size as f64
        })
        .collect()
}

/// Assign items to at most `k` bins minimizing the maximum load. Uses
/// exactly `min(k, n)` nonempty bins. Exact up to 12 items; beyond that,
/// longest-processing-time greedy followed by improving moves and swaps.
pub fn lb_partition(weights: &[f64], k: usize) -> Vec<usize> {
    let n = weights.len();
    let k = k.max(1).min(n.max(1));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    if n <= 12 {
        let mut best = (f64::INFINITY, vec![0; n]);
        let mut cur = vec![0usize; n];
        let mut loads = vec![0.0; k];
        lb_exact(weights, &order, k, 0, 0, &mut cur, &mut loads, &mut best);
        return best.1;
    }
    let mut map = vec![0usize; n];
    let mut loads: Vec<f64> = vec![0.0; k];
    for &i in &order {
        let b = (0..k).min_by(|&x, &y| loads[x].total_cmp(&loads[y])).unwrap();
        map[i] = b;
        loads[b] += weights[i];
    }
    let max_load = |l: &[f64]| l.iter().copied().fold(f64::MIN, f64::max);
    loop {
        let before = max_load(&loads);
        let mut improved = false;
        'outer: for a in 0..n {
            for b in a + 1..n {
                let (ba, bb) = (map[a], map[b]);
                if ba == bb {
                    continue;
                }
                let mut l = loads.clone();
                l[ba] += weights[b] - weights[a];
                l[bb] += weights[a] - weights[b];
                if max_load(&l) + 1e-12 < before {
                    map.swap(a, b);
                    loads = l;
                    improved = true;
                    break 'outer;
                }
            }
        }
        if !improved {
            break;
        }
    }
    map
}

#[allow(clippy::too_many_arguments)]
fn lb_exact(
    w: &[f64],
    order: &[usize],
    k: usize,
    depth: usize,
    used: usize,
    cur: &mut Vec<usize>,
    loads: &mut Vec<f64>,
    best: &mut (f64, Vec<usize>),
) {
    let cur_max = loads.iter().copied().fold(0.0, f64::max);
    if cur_max >= best.0 {
        return;
    }
    if depth == order.len() {
        if used == k {
            *best = (cur_max, cur.clone());
        }
        return;
    }
    // Remaining items must be able to open the bins still empty.
    if order.len() - depth < k - used {
        return;
    }
    let item = order[depth];
    for b in 0..(used + 1).min(k) {
        loads[b] += w[item];
        cur[item] = b;
        lb_exact(w, order, k, depth + 1, used.max(b + 1), cur, loads, best);
        loads[b] -= w[item];
    }
}

/// Separator results keyed by the set of clusters in a bin; the negatives
/// are always the remaining clusters.
pub struct SeparatorCache<'a> {
    clusters: &'a [Cluster],
    upost: &'a [Literal],
    sig: &'a Signature,
    memo: HashMap<Vec<usize>, Option<Cube>>,
}

impl<'a> SeparatorCache<'a> {
    pub fn new(clusters: &'a [Cluster], upost: &'a [Literal], sig: &'a Signature) -> Self {
        SeparatorCache { clusters, upost, sig, memo: HashMap::new() }
    }

    /// Separator for `bin` against each other bin of `mapping`.
    fn separator(&mut self, bin: &[usize], mapping: &[usize]) -> Option<Cube> {
        if let Some(r) = self.memo.get(bin) {
            return r.clone();
        }
        let target: Vec<&Image> = bin.iter().map(|&c| &self.clusters[c].image).collect();
        let mine = mapping[bin[0]];
        let n_bins = mapping.iter().copied().max().map_or(0, |m| m + 1);
        let negs: Vec<Vec<&Image>> = (0..n_bins)
            .filter(|&b| b != mine)
            .map(|b| (0..mapping.len()).filter(|&c| mapping[c] == b).map(|c| &self.clusters[c].image).collect())
            .filter(|v: &Vec<&Image>| !v.is_empty())
            .collect();
        let r = construct_separator(&target, &negs, self.upost, self.sig);
        self.memo.insert(bin.to_vec(), r.clone());
        r
    }
}

fn total_programs(clusters: &[Cluster]) -> usize {
    clusters.iter().map(|c| c.members.len()).sum()
}

/// The induced query of a complete mapping and its objective
/// `1 - max_i |bin_i|/|H| - λ_post·Σ size(ψ_i)` over nonempty bins.
/// Infeasible mappings (some separator missing) score `-∞`.
pub fn evaluate_objective(
    mapping: &[usize],
    pre: &Cube,
    cache: &mut SeparatorCache<'_>,
    lambda_post: f64,
) -> (Option<QueryPlan>, f64) {
    let clusters = cache.clusters;
    let n = total_programs(clusters) as f64;
    let n_bins = mapping.iter().copied().max().map_or(0, |m| m + 1);
    let mut bins_c: Vec<Vec<usize>> = (0..n_bins).map(|b| (0..mapping.len()).filter(|&c| mapping[c] == b).collect()).collect();
    bins_c.retain(|b| !b.is_empty());
    let mut separators = Vec::new();
    for b in &bins_c {
        match cache.separator(b, mapping) {
            Some(s) => separators.push(s),
            None => return (None, f64::NEG_INFINITY),
        }
    }
    let mut paired: Vec<(Vec<usize>, Cube)> = bins_c
        .iter()
        .zip(separators)
        .map(|(b, s)| {
            let mut m: Vec<usize> = b.iter().flat_map(|&c| clusters[c].members.iter().copied()).collect();
            m.sort();
            (m, s)
        })
        .collect();
    paired.sort_by_key(|(m, _)| m[0]);
    let (bins, separators): (Vec<Vec<usize>>, Vec<Cube>) = paired.into_iter().unzip();
    let largest = bins.iter().map(Vec::len).max().unwrap_or(0) as f64;
    let dpower = if n > 0.0 { 1.0 - largest / n } else { 0.0 };
    let cost: usize = separators.iter().map(Cube::size).sum();
    let objective = dpower - lambda_post * cost as f64;
    (Some(QueryPlan { precondition: pre.clone(), bins, separators, rest: Vec::new(), dpower, objective }), objective)
}

/// Admissible bound for any completion of a partial mapping:
/// `1 - max_j |P_j| / |H|` over programs assigned so far.
pub fn compute_branch_ub(partial: &[Option<usize>], clusters: &[Cluster]) -> f64 {
    let n = total_programs(clusters) as f64;
    let mut loads: HashMap<usize, usize> = HashMap::new();
    for (c, b) in partial.iter().enumerate() {
        if let Some(b) = b {
            *loads.entry(*b).or_default() += clusters[c].members.len();
        }
    }
    let m = loads.values().copied().max().unwrap_or(0) as f64;
    if n == 0.0 {
        1.0
    } else {
        1.0 - m / n
    }
}

#[derive(Clone, Debug)]
pub struct BnbOutcome {
    pub mapping: Vec<usize>,
    pub objective: f64,
    pub plan: Option<QueryPlan>,
    /// The whole tree was explored (no budget cut).
    pub exhaustive: bool,
}

/// Best complete mapping into at most `k` bins, starting from a seed
/// incumbent. Subtrees whose bound cannot beat the incumbent are pruned.
#[allow(clippy::too_many_arguments)]
pub fn branch_and_bound(
    weights: &[f64],
    seed: &[usize],
    seed_objective: f64,
    pre: &Cube,
    cache: &mut SeparatorCache<'_>,
    k: usize,
    lambda_post: f64,
    budgets: (usize, usize),
) -> BnbOutcome {
    let n = weights.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    let mut st = Bnb {
        order,
        k: k.max(1),
        pre,
        lambda_post,
        best: (seed.to_vec(), seed_objective),
        nodes: 0,
        leaves: 0,
        budgets,
        cut: false,
    };
    let mut partial = vec![None; n];
    st.dfs(cache, &mut partial, 0, 0);
    let (mapping, objective) = st.best;
    let plan = if objective.is_finite() { evaluate_objective(&mapping, pre, cache, lambda_post).0 } else { None };
    BnbOutcome { mapping, objective, plan, exhaustive: !st.cut }
}

struct Bnb<'p> {
    order: Vec<usize>,
    k: usize,
    pre: &'p Cube,
    lambda_post: f64,
    best: (Vec<usize>, f64),
    nodes: usize,
    leaves: usize,
    budgets: (usize, usize),
    cut: bool,
}

impl Bnb<'_> {
    fn dfs(&mut self, cache: &mut SeparatorCache<'_>, partial: &mut Vec<Option<usize>>, depth: usize, used: usize) {
        self.nodes += 1;
        if self.nodes > self.budgets.0 || self.leaves >= self.budgets.1 {
            self.cut = true;
            return;
        }
        if compute_branch_ub(partial, cache.clusters) <= self.best.1 {
            return;
        }
        if depth == self.order.len() {
            self.leaves += 1;
            let mapping: Vec<usize> = partial.iter().map(|b| b.unwrap()).collect();
            let (_, obj) = evaluate_objective(&mapping, self.pre, cache, self.lambda_post);
            if obj > self.best.1 {
                self.best = (mapping, obj);
            }
            return;
        }
        let c = self.order[depth];
        for b in 0..(used + 1).min(self.k) {
            partial[c] = Some(b);
            self.dfs(cache, partial, depth + 1, used.max(b + 1));
            partial[c] = None;
            if self.cut {
                return;
            }
        }
    }
}

/// Merge clusters whose behaviours cannot be told apart by any cube: while
/// the cube hull (common literals) of one group admits a behaviour of
/// another, the two are fused.
pub fn coarsen(clusters: &[Cluster], upost: &[Literal], sig: &Signature) -> Vec<Cluster> {
    let mut groups: Vec<Cluster> = clusters.to_vec();
    loop {
        let mut merge: Option<(usize, usize)> = None;
        'find: for i in 0..groups.len() {
            let hull = Cube::new(implied_literals(&groups[i].image, upost, sig)).unwrap();
            for j in 0..groups.len() {
                if i != j && groups[j].image.meets_cube(&hull, sig) {
                    merge = Some((i.min(j), i.max(j)));
                    break 'find;
                }
            }
        }
        let Some((a, b)) = merge else { return groups };
        let gb = groups.remove(b);
        let ga = &mut groups[a];
        ga.members.extend(gb.members);
        ga.members.sort();
        ga.image = Image::union([&ga.image, &gb.image]);
    }
}

/// Build a query for precondition `pre` over `programs`.
pub fn generate_query(
    pre: &Cube,
    programs: &[&Program],
    upost: &[Literal],
    axioms: &TheoryAxioms,
    cfg: &AnswerConfig,
) -> Result<QueryPlan> {
    let sig = axioms.signature();
    let mut clusters = group_by_sp(programs, pre, axioms)?;
    loop {
        if clusters.len() < 2 {
            return Err(Error::NoQuery("all programs behave alike under the precondition".into()));
        }
        if let Some(plan) = plan_for(&clusters, pre, upost, sig, cfg) {
            return Ok(plan);
        }
        if let Some(plan) = one_vs_rest(&clusters, pre, upost, sig, cfg) {
            return Ok(plan);
        }
        let coarse = coarsen(&clusters, upost, sig);
        if coarse.len() == clusters.len() {
            return Err(Error::NoQuery("no separable partition into two or more options".into()));
        }
        clusters = coarse;
    }
}

/// Candidate mappings that split clusters on the values of one or two
/// output atoms. Such splits are separable whenever every cluster is
/// constant on the chosen atoms; clusters that are not go to an extra bin.
fn split_seeds(clusters: &[Cluster], sig: &Signature, k: usize) -> Vec<Vec<usize>> {
    let bits: Vec<u32> = sig
        .output_atoms()
        .into_iter()
        .filter_map(|a| match a {
            Atom::Out { obj, action } => Some(sig.out_bit(obj, action)),
            _ => None,
        })
        .collect();
    // 0 or 1 when the cluster is constant on the bit, 2 otherwise.
    let value = |c: &Cluster, b: u32| {
        let v = c.image.vectors();
        let first = v[0] >> b & 1;
        if v.iter().all(|x| x >> b & 1 == first) {
            first as usize
        } else {
            2
        }
    };
    let mut seeds = Vec::new();
    let mut push = |labels: Vec<usize>| {
        // Relabel bins by first use so equal partitions compare equal.
        let mut names: Vec<usize> = Vec::new();
        let mapping: Vec<usize> = labels
            .iter()
            .map(|l| match names.iter().position(|n| n == l) {
                Some(i) => i,
                None => {
                    names.push(*l);
                    names.len() - 1
                }
            })
            .collect();
        if (2..=k).contains(&names.len()) && !seeds.contains(&mapping) {
            seeds.push(mapping);
        }
    };
    for &a in &bits {
        push(clusters.iter().map(|c| value(c, a)).collect());
    }
    if k >= 4 {
        for (i, &a) in bits.iter().enumerate() {
            for &b in &bits[i + 1..] {
                push(clusters.iter().map(|c| value(c, a) * 3 + value(c, b)).collect());
            }
        }
    }
    seeds
}

fn plan_for(clusters: &[Cluster], pre: &Cube, upost: &[Literal], sig: &Signature, cfg: &AnswerConfig) -> Option<QueryPlan> {
    let weights = cluster_weights(clusters, upost, sig, cfg.lambda_bin);
    let mut seed = lb_partition(&weights, cfg.k);
    let mut cache = SeparatorCache::new(clusters, upost, sig);
    let (mut plan, mut obj) = evaluate_objective(&seed, pre, &mut cache, cfg.lambda_post);
    for s in split_seeds(clusters, sig, cfg.k) {
        let (p, o) = evaluate_objective(&s, pre, &mut cache, cfg.lambda_post);
        if o > obj {
            (seed, plan, obj) = (s, p, o);
        }
    }
    let trigger = match &plan {
        None => true,
        Some(p) => {
            p.separators.iter().any(|s| s.size() > cfg.bnb_size_threshold) || p.dpower < cfg.bnb_dpower_threshold
        }
    };
    let plan = if trigger {
        let out = branch_and_bound(
            &weights,
            &seed,
            obj,
            pre,
            &mut cache,
            cfg.k,
            cfg.lambda_post,
            (cfg.bnb_node_budget, cfg.bnb_leaf_budget),
        );
        out.plan.or(plan)
    } else {
        plan
    };
    plan.filter(|p| p.bins.len() >= 2)
}

/// Give the largest clusters that can be told apart from all others their
/// own options (at most `k`) and leave the remaining programs to
/// none-of-the-above.
fn one_vs_rest(clusters: &[Cluster], pre: &Cube, upost: &[Literal], sig: &Signature, cfg: &AnswerConfig) -> Option<QueryPlan> {
    let mut order: Vec<usize> = (0..clusters.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(clusters[i].members.len()));
    let mut chosen: Vec<(usize, Cube)> = Vec::new();
    for i in order {
        if chosen.len() == cfg.k {
            break;
        }
        let negs: Vec<Vec<&Image>> =
            clusters.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, c)| vec![&c.image]).collect();
        if let Some(s) = construct_separator(&[&clusters[i].image], &negs, upost, sig) {
            chosen.push((i, s));
        }
    }
    let rest: Vec<usize> = {
        let mut r: Vec<usize> = (0..clusters.len())
            .filter(|i| chosen.iter().all(|(c, _)| c != i))
            .flat_map(|i| clusters[i].members.iter().copied())
            .collect();
        r.sort();
        r
    };
    if chosen.is_empty() || (chosen.len() < 2 && rest.is_empty()) {
        return None;
    }
    chosen.sort_by_key(|(c, _)| clusters[*c].members[0]);
    let bins: Vec<Vec<usize>> = chosen.iter().map(|(c, _)| clusters[*c].members.clone()).collect();
    let separators: Vec<Cube> = chosen.into_iter().map(|(_, s)| s).collect();
    let n = total_programs(clusters) as f64;
    let largest = bins.iter().map(Vec::len).chain([rest.len()]).max().unwrap_or(0) as f64;
    let dpower = 1.0 - largest / n;
    let objective = dpower - cfg.lambda_post * separators.iter().map(Cube::size).sum::<usize>() as f64;
    Some(QueryPlan { precondition: pre.clone(), bins, separators, rest, dpower, objective })
}

/// Check that a plan is a well-formed query for `programs`: disjoint
/// nonempty options (two or more counting the unassigned remainder), a
/// satisfiable precondition, and separators that every member of their bin
/// satisfies and no other program can.
pub fn validate_plan(plan: &QueryPlan, programs: &[&Program], axioms: &TheoryAxioms) -> Result<()> {
    let sig = axioms.signature();
    let n_options = plan.bins.len() + usize::from(!plan.rest.is_empty());
    if n_options < 2 || plan.bins.is_empty() || plan.bins.len() != plan.separators.len() {
        return Err(Error::State("a query needs two or more options, one separator each".into()));
    }
    if !axioms.cube_consistent(&plan.precondition) {
        return Err(Error::Logic("precondition is unsatisfiable".into()));
    }
    let mut seen = vec![false; programs.len()];
    for bin in &plan.bins {
        if bin.is_empty() {
            return Err(Error::State("empty option".into()));
        }
    }
    for bin in plan.bins.iter().chain([&plan.rest]) {
        for &p in bin {
            if p >= programs.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::State(format!("program {p} is missing or appears twice")));
            }
        }
    }
    for &p in &plan.rest {
        let img = strongest_post(programs[p], &plan.precondition, axioms)?;
        if let Some(j) = plan.separators.iter().position(|s| img.meets_cube(s, sig)) {
            return Err(Error::Logic(format!("unassigned program {p} can satisfy the separator of option {j}")));
        }
    }
    for (i, bin) in plan.bins.iter().enumerate() {
        for &p in bin {
            let img = strongest_post(programs[p], &plan.precondition, axioms)?;
            if !img.entails_cube(&plan.separators[i], sig) {
                return Err(Error::Logic(format!("program {p} can violate the separator of option {i}")));
            }
            for (j, s) in plan.separators.iter().enumerate() {
                if j != i && img.meets_cube(s, sig) {
                    return Err(Error::Logic(format!("program {p} can satisfy the separator of option {j}")));
                }
            }
        }
    }
    Ok(())
}
