mod common;

use common::*;
use disambig_core::answers::*;
use disambig_core::distinguish::{DistinguishConfig, DistinguishingSet};
use disambig_core::logic::{literal_closure, Atom, Cube, Literal, Signature, TheoryAxioms};
use disambig_core::precond::get_best_precondition;
use disambig_core::rulelang::{gen_task, Difficulty, Image, Program, Schema};
use disambig_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn out_sig(n_actions: u8) -> Signature {
    Signature { n_objects: 1, domains: vec![], n_relations: 0, n_actions }
}

fn vector(sig: &Signature, on: &[u8]) -> u64 {
    on.iter().fold(0, |v, &a| v | 1 << sig.out_bit(0, a))
}

fn random_image(rng: &mut impl Rng, sig: &Signature) -> Image {
    let n = rng.random_range(1..=3);
    Image::from_vectors((0..n).map(|_| rng.random_range(0..1u64 << sig.n_out_bits())))
}

fn brute_separator(pos: &[&Image], neg: &[&Image], sig: &Signature) -> Option<usize> {
    let ax = TheoryAxioms::new(sig);
    all_cubes(&sig.output_atoms(), &ax)
        .into_iter()
        .filter(|c| pos.iter().all(|i| i.entails_cube(c, sig)) && neg.iter().all(|i| !i.meets_cube(c, sig)))
        .map(|c| c.size())
        .min()
}

fn cluster(members: Vec<usize>, image: Image) -> Cluster {
    Cluster { members, image }
}

// Rows-filter example rendered over three output bits:
// r2 "output has 2 rows", e21 "first output cell equals cell (2,1)",
// e11 "first output cell equals cell (1,1)".
#[test]
fn row_filter_separators() {
    let sig = out_sig(3);
    let (r2, e21, e11) = (0u8, 1u8, 2u8);
    let p1 = Image::from_vectors([vector(&sig, &[r2, e11]), vector(&sig, &[r2, e21])]);
    let p2 = Image::from_vectors([vector(&sig, &[e21])]);
    let p3 = Image::from_vectors([vector(&sig, &[e11])]);
    let upost = sig.output_literals();
    let s1 = construct_separator(&[&p1], &[vec![&p2], vec![&p3]], &upost, &sig).unwrap();
    assert_eq!(s1, cube([Atom::out(0, r2).pos()]));
    let s2 = construct_separator(&[&p2], &[vec![&p1], vec![&p3]], &upost, &sig).unwrap();
    assert_eq!(s2, cube([Atom::out(0, r2).neg(), Atom::out(0, e21).pos()]));
    let s3 = construct_separator(&[&p3], &[vec![&p1], vec![&p2]], &upost, &sig).unwrap();
    assert_eq!(s3.size(), 2);
    assert!(s3.contains(&Atom::out(0, r2).neg()));
}

#[test]
fn overlapping_behaviours_have_no_separator() {
    let sig = out_sig(2);
    let a = Image::from_vectors([0, 1]);
    let b = Image::from_vectors([1, 2]);
    assert_eq!(construct_separator(&[&a], &[vec![&b]], &sig.output_literals(), &sig), None);
    // Disjoint but not cube-separable: the hull of {00, 11} is everything.
    let c = Image::from_vectors([0, 3]);
    let d = Image::from_vectors([1]);
    assert_eq!(construct_separator(&[&c], &[vec![&d]], &sig.output_literals(), &sig), None);
    assert_eq!(construct_separator(&[&c], &[], &sig.output_literals(), &sig), Some(Cube::top()));
}

#[test]
fn separator_size_matches_brute_force() {
    let sig = out_sig(5);
    let upost = sig.output_literals();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..300 {
        let n = rng.random_range(2..=4);
        let imgs: Vec<Image> = (0..n).map(|_| random_image(&mut rng, &sig)).collect();
        let split = rng.random_range(1..n);
        let pos: Vec<&Image> = imgs[..split].iter().collect();
        let neg: Vec<&Image> = imgs[split..].iter().collect();
        let negs: Vec<Vec<&Image>> = neg.iter().map(|i| vec![*i]).collect();
        let got = construct_separator(&pos, &negs, &upost, &sig);
        let expect = brute_separator(&pos, &neg, &sig);
        assert_eq!(got.as_ref().map(Cube::size), expect, "case {case}");
        if let Some(c) = got {
            assert!(pos.iter().all(|i| i.entails_cube(&c, &sig)));
            assert!(neg.iter().all(|i| !i.meets_cube(&c, &sig)));
        }
    }
}

#[test]
fn lb_partition_examples() {
    let w = [5.0, 3.0, 3.0, 2.0, 2.0, 1.0];
    let map = lb_partition(&w, 3);
    let mut loads = [0.0; 3];
    for (i, &b) in map.iter().enumerate() {
        loads[b] += w[i];
    }
    assert_eq!(loads.iter().copied().fold(0.0, f64::max), 6.0);

    assert_eq!(lb_partition(&[4.0, 1.0], 3), vec![0, 1]);

    let eq = vec![2.0; 12];
    let map = lb_partition(&eq, 4);
    for b in 0..4 {
        assert_eq!(map.iter().filter(|&&x| x == b).count(), 3);
    }
}

#[test]
fn lb_partition_large_uses_all_bins() {
    let w: Vec<f64> = (0..20).map(|i| (i % 7 + 1) as f64).collect();
    let map = lb_partition(&w, 4);
    let mut loads = [0.0; 4];
    for (i, &b) in map.iter().enumerate() {
        loads[b] += w[i];
    }
    let total: f64 = w.iter().sum();
    assert!(loads.iter().all(|&l| l > 0.0));
    assert!(loads.iter().copied().fold(0.0, f64::max) <= total / 4.0 + 7.0);
}

fn distinct_clusters(sig: &Signature, sizes: &[usize]) -> Vec<Cluster> {
    let mut next = 0;
    sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let members: Vec<usize> = (next..next + n).collect();
            next += n;
            cluster(members, Image::from_vectors([vector(sig, &[i as u8])]))
        })
        .collect()
}

#[test]
fn objective_examples() {
    let sig = out_sig(4);
    let upost = sig.output_literals();
    let pre = Cube::top();
    for k in 2..=4usize {
        let cl = distinct_clusters(&sig, &vec![1; k]);
        let mut cache = SeparatorCache::new(&cl, &upost, &sig);
        let mapping: Vec<usize> = (0..k).collect();
        let (plan, obj) = evaluate_objective(&mapping, &pre, &mut cache, 0.0);
        assert!((obj - (1.0 - 1.0 / k as f64)).abs() < 1e-9);
        assert_eq!(plan.unwrap().bins.len(), k);
    }
    let cl = distinct_clusters(&sig, &[2, 1, 3]);
    let mut cache = SeparatorCache::new(&cl, &upost, &sig);
    let (plan, obj) = evaluate_objective(&[0, 0, 0], &pre, &mut cache, 0.5);
    let plan = plan.unwrap();
    assert_eq!(plan.dpower, 0.0);
    assert_eq!(obj, 0.0);
    assert_eq!(plan.separators, vec![Cube::top()]);
    let (plan, _) = evaluate_objective(&[0, 1, 1], &pre, &mut cache, 0.0);
    let plan = plan.unwrap();
    assert!((plan.dpower - (1.0 - 4.0 / 6.0)).abs() < 1e-9);
    assert_eq!(plan.bins, vec![vec![0, 1], vec![2, 3, 4, 5]]);
}

fn random_clusters(rng: &mut impl Rng, sig: &Signature, n: usize) -> Vec<Cluster> {
    let mut next = 0;
    (0..n)
        .map(|_| {
            let size = rng.random_range(1..=3);
            let members: Vec<usize> = (next..next + size).collect();
            next += size;
            cluster(members, random_image(rng, sig))
        })
        .collect()
}

fn all_mappings(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|m| (0..k).map(move |b| [m.clone(), vec![b]].concat())).collect();
    }
    out
}

#[test]
fn branch_bound_is_admissible() {
    let sig = out_sig(4);
    let upost = sig.output_literals();
    let pre = Cube::top();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let empty = random_clusters(&mut rng, &sig, 3);
    assert_eq!(compute_branch_ub(&[None, None, None], &empty), 1.0);
    for _ in 0..30 {
        let n = rng.random_range(2..=5);
        let k = rng.random_range(2..=3);
        let cl = random_clusters(&mut rng, &sig, n);
        let mut cache = SeparatorCache::new(&cl, &upost, &sig);
        let partial: Vec<Option<usize>> =
            (0..n).map(|_| rng.random_bool(0.5).then(|| rng.random_range(0..k))).collect();
        let ub = compute_branch_ub(&partial, &cl);
        for m in all_mappings(n, k) {
            if partial.iter().zip(&m).all(|(p, b)| p.is_none_or(|x| x == *b)) {
                let (_, obj) = evaluate_objective(&m, &pre, &mut cache, 0.05);
                assert!(ub + 1e-9 >= obj);
            }
        }
    }
}

#[test]
fn branch_and_bound_matches_exhaustive() {
    let sig = out_sig(4);
    let upost = sig.output_literals();
    let pre = Cube::top();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..40 {
        let n = rng.random_range(1..=6);
        let k = rng.random_range(1..=3);
        let cl = random_clusters(&mut rng, &sig, n);
        let mut cache = SeparatorCache::new(&cl, &upost, &sig);
        let best = all_mappings(n, k)
            .iter()
            .map(|m| evaluate_objective(m, &pre, &mut cache, 0.05).1)
            .fold(f64::NEG_INFINITY, f64::max);
        let w = cluster_weights(&cl, &upost, &sig, 1.0);
        let seed = lb_partition(&w, k);
        let (_, seed_obj) = evaluate_objective(&seed, &pre, &mut cache, 0.05);
        let out = branch_and_bound(&w, &seed, seed_obj, &pre, &mut cache, k, 0.05, (usize::MAX, usize::MAX));
        assert!(out.exhaustive);
        assert!((out.objective - best).abs() < 1e-9, "case {case}: {} vs {best}", out.objective);
        if n == 1 {
            assert_eq!(out.mapping, vec![0]);
        }
        // Seeding with the optimum keeps it.
        let again = branch_and_bound(&w, &out.mapping, out.objective, &pre, &mut cache, k, 0.05, (usize::MAX, usize::MAX));
        assert_eq!(again.objective, out.objective);
    }
}

#[test]
fn clusters_follow_image_equality() {
    let s = Schema::with_objects(2);
    let ax = s.axioms();
    let sig = s.signature();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..6 {
        let progs = random_programs(&s, &mut rng, 8, 3);
        let refs: Vec<&Program> = progs.iter().collect();
        let atoms = random_atoms(&s, &mut rng, 3);
        let pre = Cube::new(atoms.iter().map(|a| if rng.random_bool(0.5) { a.pos() } else { a.neg() })).unwrap();
        if !ax.cube_consistent(&pre) {
            continue;
        }
        let clusters = group_by_sp(&refs, &pre, &ax).unwrap();
        let imgs: Vec<Image> = progs.iter().map(|p| brute_image(p, &pre, &sig)).collect();
        for c in &clusters {
            for &m in &c.members {
                assert_eq!(imgs[m], c.image);
            }
        }
        for (a, ca) in clusters.iter().enumerate() {
            for cb in &clusters[a + 1..] {
                assert_ne!(ca.image, cb.image);
            }
        }
        assert_eq!(clusters.iter().map(|c| c.members.len()).sum::<usize>(), progs.len());
    }
    let p = &random_programs(&s, &mut rng, 1, 3)[0];
    assert_eq!(group_by_sp(&[p, p, p], &Cube::top(), &ax).unwrap().len(), 1);
}

#[test]
fn face_programs_get_three_options() {
    let s = Schema::with_objects(2);
    let ax = s.axioms();
    let progs = face_programs(&s);
    let refs: Vec<&Program> = progs.iter().collect();
    let pre = cube([
        attr(&s, 0, "label", "face").pos(),
        attr(&s, 0, "hair", "brown").pos(),
        attr(&s, 0, "expression", "neutral").pos(),
        attr(&s, 1, "label", "face").pos(),
        attr(&s, 1, "hair", "blonde").pos(),
        attr(&s, 1, "expression", "smiling").pos(),
    ]);
    let cfg = AnswerConfig { k: 4, ..AnswerConfig::default() };
    let upost = s.signature().output_literals();
    let plan = generate_query(&pre, &refs, &upost, &ax, &cfg).unwrap();
    assert_eq!(plan.bins, vec![vec![0], vec![1], vec![2]]);
    assert_eq!(plan.separators[0], cube([Atom::out(0, BRIGHTEN).pos()]));
    assert_eq!(plan.separators[1], cube([Atom::out(1, BRIGHTEN).pos()]));
    validate_plan(&plan, &refs, &ax).unwrap();

    let same = [&progs[0], &progs[0]];
    assert!(matches!(generate_query(&pre, &same, &upost, &ax, &cfg), Err(Error::NoQuery(_))));
}

/// Check a plan by running every program on every input allowed by the
/// precondition.
fn brute_valid(plan: &QueryPlan, progs: &[&Program], sig: &Signature) -> bool {
    plan.bins.iter().enumerate().all(|(i, bin)| {
        bin.iter().all(|&p| {
            let img = brute_image(progs[p], &plan.precondition, sig);
            img.vectors().iter().all(|&v| {
                plan.separators.iter().enumerate().all(|(j, s)| {
                    let sat = s.literals().iter().all(|l: &Literal| match l.atom {
                        Atom::Out { obj, action } => (v >> sig.out_bit(obj, action) & 1 == 1) == l.positive,
                        _ => unreachable!(),
                    });
                    sat == (i == j)
                })
            })
        })
    })
}

#[test]
fn generated_queries_are_valid() {
    let s = Schema::with_objects(2);
    let ax = s.axioms();
    let sig = s.signature();
    let upost = sig.output_literals();
    let upre = literal_closure(sig.input_atoms());
    let mut made = 0;
    for seed in 0..6u64 {
        let task = gen_task(seed, &s, Difficulty::Easy).unwrap();
        let refs: Vec<&Program> = task.hypothesis.iter().collect();
        let phi = DistinguishingSet::compute(&refs, &upre, &ax, &DistinguishConfig::default()).unwrap();
        let Some(pre) = get_best_precondition(&phi, 0.1, &ax) else { continue };
        match generate_query(&pre.cube, &refs, &upost, &ax, &AnswerConfig::default()) {
            Ok(plan) => {
                validate_plan(&plan, &refs, &ax).unwrap();
                assert!(brute_valid(&plan, &refs, &sig), "seed {seed}");
                made += 1;
            }
            Err(Error::NoQuery(_)) => {}
            Err(e) => panic!("{e}"),
        }
    }
    assert!(made >= 3, "only {made} queries");
}
