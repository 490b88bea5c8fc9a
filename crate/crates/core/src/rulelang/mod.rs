//! RuleLang: guarded rules over objects with finite-domain attributes.

mod program;
mod schema;
mod synth;
mod task;
mod transform;
pub mod wire;

pub use program::{Guard, OutputMap, Program, Rule, WitnessLit};
pub use schema::{AttributeDef, Schema};
pub use synth::{enumerate_guards, enumerate_rules, synthesize, Example};
pub use task::{gen_suite, gen_task, random_input, validate_task, Difficulty, Task};
pub use transform::{diff_wp, equivalent, out_masks, strongest_post, Image};
