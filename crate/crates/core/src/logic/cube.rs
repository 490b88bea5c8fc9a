use std::fmt;

use serde::{Deserialize, Serialize};

use super::atom::Literal;
use super::formula::Formula;
use crate::error::{Error, Result};

/// A conjunction of literals in canonical (sorted, deduplicated) order.
///
/// Never holds a complementary pair; attribute clashes such as two values for
/// the same attribute are allowed here and only rejected by the axioms.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Literal>", into = "Vec<Literal>")]
pub struct Cube(Vec<Literal>);

impl Cube {
    pub fn top() -> Self {
        Cube(Vec::new())
    }

    pub fn new(lits: impl IntoIterator<Item = Literal>) -> Result<Self> {
        let mut v: Vec<Literal> = lits.into_iter().collect();
        v.sort();
        v.dedup();
        if v.windows(2).any(|w| w[0].atom == w[1].atom) {
            return Err(Error::Logic("cube contains a complementary pair".into()));
        }
        Ok(Cube(v))
    }

    pub fn literals(&self) -> &[Literal] {
        &self.0
    }

    /// Complexity measure: number of literals.
    pub fn size(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, lit: &Literal) -> bool {
        self.0.binary_search(lit).is_ok()
    }

    pub fn is_subset(&self, other: &Cube) -> bool {
        self.0.iter().all(|l| other.contains(l))
    }

    /// Conjunction of two cubes, `None` when they clash syntactically.
    pub fn conjoin(&self, other: &Cube) -> Option<Cube> {
        Cube::new(self.0.iter().chain(other.0.iter()).copied()).ok()
    }

    pub fn without(&self, lit: &Literal) -> Cube {
        Cube(self.0.iter().filter(|l| *l != lit).copied().collect())
    }

    pub fn to_formula(&self) -> Formula {
        Formula::and(self.0.iter().map(|&l| Formula::Lit(l)))
    }
}

impl TryFrom<Vec<Literal>> for Cube {
    type Error = Error;

    fn try_from(v: Vec<Literal>) -> Result<Self> {
        Cube::new(v)
    }
}

impl From<Cube> for Vec<Literal> {
    fn from(c: Cube) -> Self {
        c.0
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "⊤");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ∧ ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::Atom;

    #[test]
    fn canonical_and_rejects_complements() {
        let a = Atom::aux(1);
        let b = Atom::aux(0);
        let c = Cube::new([a.pos(), b.neg(), a.pos()]).unwrap();
        assert_eq!(c.literals(), &[b.neg(), a.pos()]);
        assert_eq!(c, Cube::new([b.neg(), a.pos()]).unwrap());
        assert!(Cube::new([a.pos(), a.neg()]).is_err());
    }

    #[test]
    fn serde_rejects_complements() {
        let a = Atom::aux(3);
        let json = serde_json::to_string(&vec![a.pos(), a.neg()]).unwrap();
        assert!(serde_json::from_str::<Cube>(&json).is_err());
    }
}
