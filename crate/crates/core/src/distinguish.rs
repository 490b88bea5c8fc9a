//! Distinguishing predicates: input cubes on which two programs are
//! guaranteed to disagree.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::Result;
use crate::logic::{
    prime_implicants_bounded, to_dnf, Cube, Formula, ImplicationChecker, Literal, Signature, TheoryAxioms,
};
use crate::rulelang::{diff_wp, Program};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DistinguishConfig {
    /// Keep at most this many cubes per pair (smallest first).
    pub max_cubes: Option<usize>,
    /// Consensus closure size after which exact prime computation is
    /// abandoned for the DNF-shrinking fallback.
    pub prime_budget: usize,
}

impl Default for DistinguishConfig {
    fn default() -> Self {
        DistinguishConfig { max_cubes: Some(32), prime_budget: 120 }
    }
}

impl DistinguishConfig {
    /// No truncation and no fallback: every prime over the universe.
    pub fn exact() -> Self {
        DistinguishConfig { max_cubes: None, prime_budget: usize::MAX }
    }
}

/// Cubes over `upre` each of which forces `p1` and `p2` to disagree.
///
/// Returns the prime implicants of the disagreement formula when they can be
/// computed within budget. Otherwise each DNF cube is shrunk to a prime by
/// greedy literal removal, which is sound and minimal but may miss primes.
pub fn get_distinguishing(
    p1: &Program,
    p2: &Program,
    upre: &[Literal],
    axioms: &TheoryAxioms,
    cfg: &DistinguishConfig,
) -> Result<Vec<Cube>> {
    let f = diff_wp(p1, p2, axioms.signature());
    let mut cubes = match prime_implicants_bounded(&f, upre, axioms, cfg.prime_budget)? {
        Some(p) => p,
        None => shrink_dnf(&f, upre, axioms)?,
    };
    if let Some(cap) = cfg.max_cubes {
        cubes.truncate(cap);
    }
    Ok(cubes)
}

fn shrink_dnf(f: &Formula, upre: &[Literal], axioms: &TheoryAxioms) -> Result<Vec<Cube>> {
    let allowed: BTreeSet<Literal> = upre.iter().copied().collect();
    let mut checker = ImplicationChecker::new(f, axioms);
    let mut out = BTreeSet::new();
    for d in to_dnf(f, axioms)? {
        if !d.literals().iter().all(|l| allowed.contains(l)) {
            continue;
        }
        let mut c = d;
        for l in c.literals().to_vec() {
            let smaller = c.without(&l);
            if checker.implied_by(&smaller) {
                c = smaller;
            }
        }
        out.insert(c);
    }
    let mut v: Vec<Cube> = out.into_iter().collect();
    v.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.cmp(b)));
    Ok(v)
}

/// Φ: distinguishing cubes per unordered pair of positions in a program list.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DistinguishingSet {
    pub pairs: BTreeMap<(usize, usize), Vec<Cube>>,
}

impl DistinguishingSet {
    /// Compute Φ for every pair of `programs`, in parallel across pairs.
    pub fn compute(
        programs: &[&Program],
        upre: &[Literal],
        axioms: &TheoryAxioms,
        cfg: &DistinguishConfig,
    ) -> Result<Self> {
        let mut todo = Vec::new();
        for i in 0..programs.len() {
            for j in i + 1..programs.len() {
                todo.push((i, j));
            }
        }
        let results = parallel_map(&todo, |&(i, j)| get_distinguishing(programs[i], programs[j], upre, axioms, cfg));
        let mut pairs = BTreeMap::new();
        for (key, r) in todo.into_iter().zip(results) {
            pairs.insert(key, r?);
        }
        Ok(DistinguishingSet { pairs })
    }

    pub fn get(&self, i: usize, j: usize) -> &[Cube] {
        let key = if i < j { (i, j) } else { (j, i) };
        self.pairs.get(&key).map(|v| v.as_slice()).unwrap_or(&[])
    }
}

/// Order-preserving parallel map over a slice using scoped threads.
pub(crate) fn parallel_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(8);
    if threads <= 1 || items.len() < 8 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    std::thread::scope(|s| {
        let handles: Vec<_> =
            items.chunks(chunk).map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// Add every admissible atom of the pairwise disagreement formulas to the
/// universe (both polarities). Atoms are admissible when the signature
/// knows them.
pub fn refine_predicates(programs: &[&Program], upre: &[Literal], sig: &Signature) -> Vec<Literal> {
    let mut out: BTreeSet<Literal> = upre.iter().copied().collect();
    for i in 0..programs.len() {
        for j in i + 1..programs.len() {
            for a in diff_wp(programs[i], programs[j], sig).atoms() {
                if sig.contains(&a) && a.is_input() {
                    out.insert(a.pos());
                    out.insert(a.neg());
                }
            }
        }
    }
    out.into_iter().collect()
}
