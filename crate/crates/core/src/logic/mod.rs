//! Finite-domain propositional logic: atoms, cubes, formulas and the decision
//! procedures the engine is built on.

mod atom;
pub(crate) mod bits;
mod cube;
mod dnf;
mod formula;
mod maxsat;
mod model;
mod primes;
pub(crate) mod sat;

pub use atom::{literal_closure, Atom, Literal, Signature};
pub use cube::Cube;
pub use dnf::{to_dnf, DNF_CUBE_CAP};
pub use formula::Formula;
pub use maxsat::{maxsat, MaxSatSolution, Soft};
pub use model::{Assignment, Model, TheoryAxioms};
pub use primes::{prime_implicants, prime_implicants_bounded};
pub use sat::{entails, enumerate_models, find_model, is_sat, ImplicationChecker};
