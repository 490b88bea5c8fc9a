use super::atom::Literal;
use super::bits::{absorb, Bits, LocalIndex};
use super::cube::Cube;
use super::dnf::dnf_bits;
use super::formula::Formula;
use super::model::TheoryAxioms;
use crate::error::Result;

/// Prime implicants of `f` modulo the axioms, restricted to literals in `universe`.
///
/// Computes the Boolean primes of `f ∨ ¬Ax` by iterated consensus and keeps
/// the axiom-consistent ones built from universe literals. A cube over the
/// universe that entails `f` modulo the axioms always contains one of these.
/// Sorted by size, then canonical order.
pub fn prime_implicants(f: &Formula, universe: &[Literal], axioms: &TheoryAxioms) -> Result<Vec<Cube>> {
    Ok(prime_implicants_bounded(f, universe, axioms, usize::MAX)?.expect("unbounded"))
}

/// Like [`prime_implicants`], but gives up (`Ok(None)`) once the consensus
/// closure holds more than `budget` cubes.
pub fn prime_implicants_bounded(
    f: &Formula,
    universe: &[Literal],
    axioms: &TheoryAxioms,
    budget: usize,
) -> Result<Option<Vec<Cube>>> {
    let idx = LocalIndex::build(f.atoms(), axioms)?;
    let mut cubes = dnf_bits(f, &idx)?;
    if cubes.is_empty() {
        return Ok(Some(Vec::new()));
    }
    for &g in idx.groups() {
        // ¬Ax for this group: no value, or two values at once.
        cubes.push(Bits { pos: 0, neg: g });
        let members: Vec<u32> = (0..128).filter(|i| g >> i & 1 == 1).collect();
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                cubes.push(Bits { pos: 1u128 << a | 1u128 << b, neg: 0 });
            }
        }
    }
    let allowed = idx.universe_bits(universe);
    let Some(closure) = consensus_closure(cubes, budget) else {
        return Ok(None);
    };
    let mut out: Vec<Cube> = closure
        .into_iter()
        .filter(|b| idx.consistent(*b) && b.is_subset(allowed))
        .map(|b| idx.to_cube(b))
        .collect();
    out.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.cmp(b)));
    Ok(Some(out))
}

#[inline]
fn consensus(a: Bits, b: Bits) -> Option<Bits> {
    let opp = (a.pos & b.neg) | (a.neg & b.pos);
    if opp.count_ones() != 1 {
        return None;
    }
    let u = a.union(b);
    Some(Bits { pos: u.pos & !opp, neg: u.neg & !opp })
}

/// Blake canonical form (all Boolean primes) of a cube set.
fn consensus_closure(cubes: Vec<Bits>, budget: usize) -> Option<Vec<Bits>> {
    let mut live = absorb(cubes);
    let mut alive = vec![true; live.len()];
    let mut i = 1;
    while i < live.len() {
        let mut j = 0;
        while j < i && alive[i] {
            if alive[j] {
                if let Some(c) = consensus(live[i], live[j]) {
                    let covered = live.iter().zip(&alive).any(|(k, &al)| al && k.is_subset(c));
                    if !covered {
                        for (k, al) in live.iter().zip(alive.iter_mut()) {
                            if *al && c.is_subset(*k) {
                                *al = false;
                            }
                        }
                        live.push(c);
                        alive.push(true);
                        if live.len() > budget {
                            return None;
                        }
                    }
                }
            }
            j += 1;
        }
        i += 1;
    }
    Some(live.into_iter().zip(alive).filter(|(_, a)| *a).map(|(c, _)| c).collect())
}
