use super::bits::{absorb, Bits, LocalIndex};
use super::cube::Cube;
use super::formula::Formula;
use super::model::TheoryAxioms;
use crate::error::{Error, Result};

/// Upper bound on the number of cubes `to_dnf` will produce.
pub const DNF_CUBE_CAP: usize = 10_000;

/// Disjunctive normal form modulo the axioms.
///
/// Cubes that contradict the axioms are dropped and subsumed cubes absorbed,
/// so the result is irredundant but not necessarily minimal. Output is sorted
/// by size, then canonical order.
pub fn to_dnf(f: &Formula, axioms: &TheoryAxioms) -> Result<Vec<Cube>> {
    let idx = LocalIndex::build(f.atoms(), axioms)?;
    let mut cubes: Vec<Cube> = dnf_bits(f, &idx)?.into_iter().map(|b| idx.to_cube(b)).collect();
    cubes.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.cmp(b)));
    Ok(cubes)
}

pub(crate) fn dnf_bits(f: &Formula, idx: &LocalIndex) -> Result<Vec<Bits>> {
    match f {
        Formula::True => Ok(vec![Bits::EMPTY]),
        Formula::False => Ok(Vec::new()),
        Formula::Lit(l) => {
            let b = idx.lit_bits(l).expect("indexed atom");
            Ok(if idx.consistent(b) { vec![b] } else { Vec::new() })
        }
        Formula::Or(cs) => {
            let mut out = Vec::new();
            for c in cs {
                out.extend(dnf_bits(c, idx)?);
                if out.len() > DNF_CUBE_CAP {
                    out = absorb(out);
                    check_cap(out.len())?;
                }
            }
            Ok(absorb(out))
        }
        Formula::And(cs) => {
            let mut acc = vec![Bits::EMPTY];
            for c in cs {
                let d = dnf_bits(c, idx)?;
                let mut next = Vec::with_capacity(acc.len() * d.len());
                for a in &acc {
                    for b in &d {
                        let u = a.union(*b);
                        if idx.consistent(u) {
                            next.push(u);
                        }
                    }
                    if next.len() > 4 * DNF_CUBE_CAP {
                        next = absorb(next);
                        check_cap(next.len())?;
                    }
                }
                acc = absorb(next);
                check_cap(acc.len())?;
                if acc.is_empty() {
                    break;
                }
            }
            Ok(acc)
        }
    }
}

fn check_cap(n: usize) -> Result<()> {
    if n > DNF_CUBE_CAP {
        Err(Error::Resource(format!("DNF exceeds {DNF_CUBE_CAP} cubes")))
    } else {
        Ok(())
    }
}
