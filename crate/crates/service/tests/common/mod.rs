#![allow(dead_code)]

use disambig_core::render::RenderedQuery;
use disambig_core::rulelang::{gen_task, strongest_post, Difficulty, Schema, Task};

pub fn task(seed: u64) -> Task {
    gen_task(seed, &Schema::default_schema(), Difficulty::Medium).unwrap()
}

/// The letter an exact oracle for the task's ground truth picks, worked out
/// from the served query alone.
pub fn oracle_letter(task: &Task, q: &RenderedQuery) -> String {
    let axioms = task.schema.axioms();
    let img = strongest_post(&task.ground_truth, &q.precondition, &axioms).unwrap();
    let sig = axioms.signature();
    let o = q
        .options
        .iter()
        .find(|o| o.separator.as_ref().is_some_and(|s| img.entails_cube(s, sig)))
        .or_else(|| q.options.iter().find(|o| o.separator.is_none()))
        .expect("some option describes the ground truth");
    o.letter.clone()
}
