use std::collections::BTreeSet;

use disambig_core::logic::{Model, Signature};
use disambig_core::rulelang::wire::*;
use disambig_core::rulelang::*;
use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn two() -> Schema {
    Schema::with_objects(2)
}

/// Programs of one or two grammar rules, drawn from a seed.
fn program_from(schema: &Schema, seed: u64) -> Program {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rules = enumerate_rules(schema, 5);
    let k = rng.random_range(1..=2);
    Program::new((0..k).map(|_| rules.choose(&mut rng).unwrap().clone()))
}

fn model_from(schema: &Schema, seed: u64) -> Model {
    random_input(schema, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Direct reading of the semantics: object i gets action a iff some rule
/// for a has a guard true at i.
fn direct_eval(p: &Program, m: &Model, sig: &Signature) -> Vec<BTreeSet<u8>> {
    fn holds(g: &Guard, m: &Model, i: u8) -> bool {
        match g {
            Guard::SelfAttr { attr, value } => m.attr(i, *attr) == *value,
            Guard::ExistsOther { rel, witness } => (0..m.n_objects())
                .filter(|&j| j != i)
                .any(|j| m.rel(*rel, i, j) && witness.iter().all(|w| (m.attr(j, w.attr) == w.value) == w.positive)),
            Guard::Not(g) => !holds(g, m, i),
            Guard::And(gs) => gs.iter().all(|g| holds(g, m, i)),
            Guard::Or(gs) => gs.iter().any(|g| holds(g, m, i)),
        }
    }
    (0..sig.n_objects)
        .map(|i| p.rules().iter().filter(|r| holds(&r.guard, m, i)).map(|r| r.action).collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eval_matches_second_interpreter(ps in any::<u64>(), ms in any::<u64>(), n in 1u8..=3) {
        let s = Schema::with_objects(n);
        let sig = s.signature();
        let p = program_from(&s, ps);
        let m = model_from(&s, ms);
        let out = p.eval(&m, &sig);
        prop_assert_eq!(out, p.eval(&m, &sig));
        let direct = direct_eval(&p, &m, &sig);
        for i in 0..n {
            prop_assert_eq!(out.actions(&sig, i).into_iter().collect::<BTreeSet<u8>>(), direct[i as usize].clone());
            for r in p.rules() {
                prop_assert_eq!(m.satisfies(&r.guard.instantiate(i, n)), r.guard.holds(&m, i));
            }
        }
    }

    #[test]
    fn diff_wp_is_exact_on_two_objects(a in any::<u64>(), b in any::<u64>()) {
        let s = two();
        let sig = s.signature();
        let (p1, p2) = (program_from(&s, a), program_from(&s, b));
        let f = diff_wp(&p1, &p2, &sig);
        for m in Model::all_inputs(&sig) {
            prop_assert_eq!(m.satisfies(&f), p1.eval(&m, &sig) != p2.eval(&m, &sig));
        }
        prop_assert!(diff_wp(&p1, &p1, &sig).atoms().is_empty() || !disambig_core::logic::is_sat(&diff_wp(&p1, &p1, &sig), &s.axioms()));
    }

    #[test]
    fn strongest_post_is_the_exact_image(ps in any::<u64>(), cs in any::<u64>(), n_lits in 0usize..5) {
        let s = two();
        let sig = s.signature();
        let ax = s.axioms();
        let p = program_from(&s, ps);
        let mut rng = ChaCha8Rng::seed_from_u64(cs);
        let pre = loop {
            let mut atoms = sig.input_atoms();
            rand::seq::SliceRandom::shuffle(atoms.as_mut_slice(), &mut rng);
            let lits = atoms[..n_lits].iter().map(|a| if rng.random_bool(0.5) { a.pos() } else { a.neg() });
            if let Ok(c) = disambig_core::logic::Cube::new(lits) {
                if ax.cube_consistent(&c) {
                    break c;
                }
            }
        };
        let image = strongest_post(&p, &pre, &ax).unwrap();
        let mut brute: Vec<u64> = Model::all_inputs(&sig)
            .iter()
            .filter(|m| pre.literals().iter().all(|l| m.holds(l)))
            .map(|m| p.eval(m, &sig).0)
            .collect();
        brute.sort();
        brute.dedup();
        prop_assert_eq!(image.vectors(), brute.as_slice());
        // The formula form has exactly the image as its output models.
        let f = image.to_formula(&sig);
        let mut m = Model::zero(&sig);
        for v in 0..1u64 << sig.n_out_bits() {
            m.set_outs(v);
            prop_assert_eq!(m.satisfies(&f), brute.contains(&v));
        }
    }

    #[test]
    fn equivalence_is_an_equivalence(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let s = two();
        let ax = s.axioms();
        let sig = s.signature();
        let ps = [program_from(&s, a), program_from(&s, b), program_from(&s, c)];
        let inputs = Model::all_inputs(&sig);
        let obs = |x: &Program, y: &Program| inputs.iter().all(|m| x.eval(m, &sig) == y.eval(m, &sig));
        for x in &ps {
            prop_assert!(equivalent(x, x, &ax));
            for y in &ps {
                prop_assert_eq!(equivalent(x, y, &ax), equivalent(y, x, &ax));
                prop_assert_eq!(equivalent(x, y, &ax), obs(x, y));
                for z in &ps {
                    if equivalent(x, y, &ax) && equivalent(y, z, &ax) {
                        prop_assert!(equivalent(x, z, &ax));
                    }
                }
            }
        }
    }

    #[test]
    fn wire_round_trips(ps in any::<u64>(), n in 1u8..=3) {
        let s = Schema::with_objects(n);
        let p = program_from(&s, ps);
        prop_assert_eq!(parse_schema(&schema_to_json(&s)).unwrap(), s.clone());
        prop_assert_eq!(parse_program(&program_to_json(&p, &s), &s).unwrap(), p.clone());
        let m = model_from(&s, ps);
        prop_assert_eq!(parse_model(&model_to_value(&m, &s).to_string(), &s).unwrap(), m);
    }
}

#[test]
fn smiling_faces_get_brightened() {
    let s = Schema::with_objects(2);
    let sig = s.signature();
    let label = s.attr_index("label").unwrap();
    let expr = s.attr_index("expression").unwrap();
    let brighten = s.action_index("Brighten").unwrap();
    let face = Guard::SelfAttr { attr: label, value: s.value_index(label, "face").unwrap() };
    let smiling = Guard::SelfAttr { attr: expr, value: s.value_index(expr, "smiling").unwrap() };
    let p2 = Program::new([Rule { guard: Guard::And(vec![face, smiling]), action: brighten }]);
    let mut m = Model::zero(&sig);
    m.set_attr(0, label, s.value_index(label, "face").unwrap());
    m.set_attr(0, expr, s.value_index(expr, "smiling").unwrap());
    m.set_attr(1, label, s.value_index(label, "dog").unwrap());
    let out = p2.eval(&m, &sig);
    assert_eq!(out.actions(&sig, 0), vec![brighten]);
    assert!(out.actions(&sig, 1).is_empty());
    assert_eq!(Program::empty().eval(&m, &sig).0, 0);
    let img = strongest_post(&Program::empty(), &disambig_core::logic::Cube::top(), &s.axioms()).unwrap();
    assert_eq!(img.vectors(), &[0]);
}

#[test]
fn rule_order_does_not_matter() {
    let s = two();
    let rules = enumerate_rules(&s, 3);
    let (a, b) = (rules[3].clone(), rules[40].clone());
    let p = Program::new([a.clone(), b.clone()]);
    let q = Program::new([b, a]);
    assert_eq!(p, q);
    assert!(equivalent(&p, &q, &s.axioms()));
}

#[test]
fn synthesis_contains_the_source_program() {
    let s = two();
    let sig = s.signature();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for seed in 0..8 {
        let p = program_from(&s, seed);
        let examples: Vec<Example> = (0..2)
            .map(|_| {
                let input = random_input(&s, &mut rng);
                Example { output: p.eval(&input, &sig), input }
            })
            .collect();
        let h = synthesize(&s, &examples, p.size().max(4));
        if p.size() <= 4 || p.rules().len() <= 2 {
            assert!(h.contains(&p), "seed {seed}");
        }
        for q in &h {
            assert!(examples.iter().all(|e| q.eval(&e.input, &sig) == e.output));
        }
    }
    let input = random_input(&s, &mut rng);
    let contradictory = [
        Example { input: input.clone(), output: OutputMap(0) },
        Example { input, output: OutputMap(1) },
    ];
    assert!(synthesize(&s, &contradictory, 6).is_empty());
}

#[test]
fn generated_tasks_satisfy_their_invariants() {
    let s = Schema::default_schema();
    let sig = s.signature();
    let suite = gen_suite(3, 5, &s, Difficulty::Medium).unwrap();
    assert_eq!(suite, gen_suite(3, 5, &s, Difficulty::Medium).unwrap());
    for t in &suite {
        validate_task(t).unwrap();
        assert!(t.hypothesis.contains(&t.ground_truth));
        assert!((5..=60).contains(&t.hypothesis.len()));
        for p in &t.hypothesis {
            assert!(t.examples.iter().all(|e| p.eval(&e.input, &sig) == e.output));
        }
        assert_eq!(parse_task(&task_to_json(t)).unwrap(), *t);
    }
}

#[test]
fn wrong_format_is_rejected() {
    let s = two();
    let mut v: serde_json::Value = serde_json::from_str(&schema_to_json(&s)).unwrap();
    v["format"] = "rulelang/2".into();
    assert!(parse_schema(&v.to_string()).is_err());
    assert!(parse_program("{}", &s).is_err());
    assert!(parse_task("not json").is_err());
}
