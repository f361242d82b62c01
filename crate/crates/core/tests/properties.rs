mod common;

use std::collections::BTreeMap;

use lig::genlearn::{gen_erdos_renyi, gen_pref_attach, gen_uniform_random, learn_lig, LearnConfig, VoteMatrix};
use lig::influence::{
    exact_most_influential, greedy_most_influential, hitting_set_instance, isolates, GameHypergraph, GoalSpec,
    GreedyConfig, SetPreference,
};
use lig::io::{game_from_json, game_to_json};
use lig::reductions::{gadget_3sat, gadget_knapsack_star, random_3cnf, sat_count, KnapsackInstance, DEFAULT_EPSILON};
use lig::scenarios::{
    best_response_dynamics, diffusion_filibuster, filibuster_breakers, stable_cloture_set, ClotureSpec, DynamicsKind,
};
use lig::solvers::{
    count_psne_extensions, enumerate_psne, propagate, solve_divide_conquer, solve_tree, supermodular_bracket,
    supermodular_run, Extreme,
};
use lig::transforms::{lig_to_polymatrix, polymatrix_to_lig, zero_one_to_pm1, ZeroOneGame};
use lig::{
    brute_force_extension_count, brute_force_psne, Domain, DomainVector, InfluenceGame, JointAction, PartialAssignment,
    SearchConfig,
};
use proptest::prelude::*;
use rand::Rng;

use common::*;

fn all_actions(n: usize) -> impl Iterator<Item = JointAction> {
    (0..1u64 << n).map(move |m| JointAction::from_mask(n, m))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn psne_test_matches_enumeration(seed in any::<u64>(), n in 2usize..9) {
        let g = random_game(&mut rng(seed), n, 0.6);
        let psne = brute_force_psne(&g, None).unwrap();
        for x in all_actions(n) {
            prop_assert_eq!(g.is_psne(&x), psne.binary_search(&x).is_ok());
        }
    }

    #[test]
    fn payoff_antisymmetry_and_scaling(seed in any::<u64>(), n in 2usize..8, c in 0.01f64..100.0) {
        let g = random_game(&mut rng(seed), n, 0.7);
        let scaled_arcs: Vec<_> = g.arcs().map(|(j, i, w)| (j, i, if i == 0 { c * w } else { w })).collect();
        let mut b = g.thresholds().to_vec();
        b[0] *= c;
        let s = InfluenceGame::new(b, scaled_arcs).unwrap();
        for x in all_actions(n) {
            let u = g.payoff(0, &x).unwrap();
            let flipped = x.with(0, -x.get(0));
            prop_assert!((u + g.payoff(0, &flipped).unwrap()).abs() < 1e-12);
            prop_assert_eq!(g.best_responses(0, &x).unwrap(), s.best_responses(0, &x).unwrap());
        }
    }

    #[test]
    fn responses_monotone(f in -5.0f64..5.0, d in 0.0f64..5.0, eps in 0.0f64..1.0) {
        let g = InfluenceGame::new(vec![0.0], []).unwrap().with_tie_epsilon(eps).unwrap();
        let (lo, hi) = (g.response_to(f), g.response_to(f + d));
        if lo == Domain::PLUS {
            prop_assert_eq!(hi, Domain::PLUS);
        }
        if hi == Domain::MINUS {
            prop_assert_eq!(lo, Domain::MINUS);
        }
    }

    #[test]
    fn transforms_preserve_psne(seed in any::<u64>(), n in 2usize..8) {
        let g = random_game(&mut rng(seed), n, 0.6);
        let want = brute_force_psne(&g, None).unwrap();
        let pm = lig_to_polymatrix(&g).unwrap();
        prop_assert_eq!(&pm.brute_force_psne(None).unwrap(), &want);
        prop_assert_eq!(&brute_force_psne(&polymatrix_to_lig(&pm).unwrap(), None).unwrap(), &want);
        let z = ZeroOneGame(g.clone());
        let eq01: Vec<JointAction> = z
            .brute_force_equilibria(None)
            .unwrap()
            .iter()
            .map(|x| lig::transforms::pm1_from_zero_one(x))
            .collect();
        prop_assert_eq!(brute_force_psne(&zero_one_to_pm1(&z), None).unwrap(), eq01);
    }

    #[test]
    fn gadget_identities(seed in any::<u64>(), nv in 3usize..7, m in 1usize..6) {
        let mut r = rng(seed);
        let f = random_3cnf(nv, m, &mut r);
        let g = gadget_3sat(&f, DEFAULT_EPSILON).unwrap();
        prop_assert_eq!(brute_force_psne(&g.to_pm1(), None).unwrap().len() as u64, sat_count(&f));
        // variables only touch clauses
        prop_assert!(g.game().arcs().all(|(j, i, _)| (j < nv) != (i < nv)));

        let items = r.random_range(1..=8usize);
        let weights: Vec<u64> = (0..items).map(|_| r.random_range(1..=10)).collect();
        let inst = KnapsackInstance::new(weights, r.random_range(1..=30)).unwrap();
        let star = gadget_knapsack_star(&inst).unwrap().to_pm1();
        let psne = brute_force_psne(&star, None).unwrap();
        prop_assert_eq!(psne.len() as u64, inst.feasible_count());
        prop_assert!(psne.iter().all(|x| x.get(0) == 1));
        prop_assert!(star.arcs().all(|(j, i, _)| j == 0 || i == 0));
    }

    #[test]
    fn search_matches_brute_force(seed in any::<u64>(), n in 2usize..12, density in 0.1f64..0.9) {
        let g = random_game(&mut rng(seed), n, density);
        let want = brute_force_psne(&g, None).unwrap();
        let (got, stats) = enumerate_psne(&g, &SearchConfig::default()).unwrap();
        prop_assert_eq!(&got, &want);
        prop_assert!(stats.nodes_visited >= stats.psne_found);
        let (_, plain) = enumerate_psne(&g, &SearchConfig::default().with_propagation(false)).unwrap();
        prop_assert!(stats.nodes_visited <= plain.nodes_visited);
        let (par, _) = enumerate_psne(&g, &SearchConfig::default().with_parallel(true)).unwrap();
        prop_assert_eq!(&par, &want);
    }

    #[test]
    fn extension_counts_agree(seed in any::<u64>(), n in 2usize..11) {
        let mut r = rng(seed);
        let g = random_game(&mut r, n, 0.5);
        let k = r.random_range(0..=n);
        let players = rand::seq::index::sample(&mut r, n, k).into_vec();
        let partial = PartialAssignment::from_pairs(players.into_iter().map(|p| (p, if r.random_bool(0.5) { 1 } else { -1 }))).unwrap();
        prop_assert_eq!(
            count_psne_extensions(&g, &partial, &SearchConfig::counting()).unwrap(),
            brute_force_extension_count(&g, &partial, None).unwrap()
        );
    }

    #[test]
    fn propagation_is_sound(seed in any::<u64>(), n in 2usize..10) {
        let mut r = rng(seed);
        let g = random_game(&mut r, n, 0.6);
        let doms: Vec<Domain> = (0..n)
            .map(|_| match r.random_range(0..4) {
                0 => Domain::MINUS,
                1 => Domain::PLUS,
                _ => Domain::BOTH,
            })
            .collect();
        let input = DomainVector::Domains(doms);
        let out = propagate(&g, &input);
        for x in brute_force_psne(&g, None).unwrap() {
            if input.admits(&x) {
                prop_assert!(out.admits(&x));
            }
        }
    }

    #[test]
    fn tree_solver_agrees(seed in any::<u64>(), n in 1usize..16) {
        let g = random_forest(&mut rng(seed), n);
        let psne = brute_force_psne(&g, None).unwrap();
        match solve_tree(&g).unwrap() {
            Some(x) => prop_assert!(g.is_psne(&x)),
            None => prop_assert!(psne.is_empty()),
        }
    }

    #[test]
    fn supermodular_bracketing(seed in any::<u64>(), n in 2usize..12) {
        let g = random_supermodular(&mut rng(seed), n, 0.5);
        let (lo, hi) = supermodular_bracket(&g).unwrap();
        let psne = brute_force_psne(&g, None).unwrap();
        prop_assert!(psne.contains(&lo) && psne.contains(&hi));
        for x in &psne {
            prop_assert!((0..n).all(|i| lo.get(i) <= x.get(i) && x.get(i) <= hi.get(i)));
        }
        for e in [Extreme::AllMinusOne, Extreme::AllPlusOne] {
            prop_assert!(supermodular_run(&g, e).unwrap().1 <= n);
        }
        if lo == hi {
            prop_assert_eq!(psne, vec![lo]);
        }
    }

    #[test]
    fn divide_and_conquer_matches(seed in any::<u64>(), n in 4usize..16, drop in 0usize..4) {
        let g = separable_game(&mut rng(seed), n);
        let cfg = SearchConfig::default();
        let want = enumerate_psne(&g, &cfg).unwrap().0;
        let (got, exact) = solve_divide_conquer(&g, &cfg, 0).unwrap();
        prop_assert!(exact);
        prop_assert_eq!(&got, &want);
        let (sub, _) = solve_divide_conquer(&g, &cfg, drop).unwrap();
        prop_assert!(sub.iter().all(|x| want.contains(x)));
        let s = lig::solvers::find_vertex_separator(&g, 2).unwrap();
        prop_assert!(s.is_valid(&g));
    }

    #[test]
    fn unique_hyperedge_equals_hitting_set(seed in any::<u64>(), n in 2usize..9) {
        let mut r = rng(seed);
        let g = random_game(&mut r, n, 0.8);
        let psne = brute_force_psne(&g, None).unwrap();
        prop_assume!(!psne.is_empty());
        let goal = psne[r.random_range(0..psne.len())].clone();
        let inst = hitting_set_instance(&GameHypergraph::new(psne.clone(), &goal).unwrap());
        prop_assert!(!inst.is_hit_by(&[]));
        for mask in 1..1u64 << n {
            let set: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            prop_assert_eq!(isolates(&psne, &goal, &set), inst.is_hit_by(&set));
        }
    }

    #[test]
    fn greedy_is_feasible_and_bounded(seed in any::<u64>(), n in 3usize..12) {
        let g = random_game(&mut rng(seed), n, 0.7);
        let psne = brute_force_psne(&g, None).unwrap();
        prop_assume!(!psne.is_empty());
        let goal = GoalSpec::MaxAdopters;
        let hg_goal = lig::influence::optimal_psne_set(&psne, &goal, &[]).unwrap()[0].clone();
        let hg = GameHypergraph::new(psne.clone(), &hg_goal).unwrap();
        let r = greedy_most_influential(&g, &psne, &goal, &SetPreference::MinCardinality, &hg, &GreedyConfig::default()).unwrap();
        let fixed = PartialAssignment::restrict(&r.goal, &r.selected).unwrap();
        prop_assert_eq!(brute_force_extension_count(&g, &fixed, None).unwrap(), 1);
        let mut last = psne.len() as u64;
        for round in &r.rounds {
            let c = round.candidate_counts.iter().find(|(i, _)| *i == round.chosen).unwrap().1;
            prop_assert!(c < last);
            last = c;
        }
        let exact = exact_most_influential(&g, &psne, &GoalSpec::TargetPsne(r.goal.clone()), &SetPreference::MinCardinality, None).unwrap();
        let h = psne.len() as f64;
        prop_assert!(r.selected.len() as f64 <= (1.0 + h.ln()) * exact.best.len().max(1) as f64);
        prop_assert!(exact.best.len() <= r.selected.len());
        // positive rescaling of g leaves the choice unchanged
        let t: Vec<f64> = vec![1.0; n];
        let t3: Vec<f64> = vec![3.0; n];
        let a = greedy_most_influential(&g, &psne, &GoalSpec::WeightedAdopters(t), &SetPreference::MinCardinality, &hg, &GreedyConfig::default()).unwrap();
        let b = greedy_most_influential(&g, &psne, &GoalSpec::WeightedAdopters(t3), &SetPreference::MinCardinality, &hg, &GreedyConfig::default()).unwrap();
        prop_assert_eq!(a.selected, b.selected);
    }

    #[test]
    fn filibuster_outputs_are_minimal(seed in any::<u64>(), n in 3usize..11, quota in 1usize..8) {
        let g = random_game(&mut rng(seed), n, 0.7);
        let psne = brute_force_psne(&g, None).unwrap();
        let spec = ClotureSpec::new(quota.min(n), None, n).unwrap();
        let c = stable_cloture_set(&psne, &spec);
        let heur = filibuster_breakers(&g, &psne, &c, false);
        let exact = filibuster_breakers(&g, &psne, &c, true);
        prop_assert_eq!(heur.is_ok(), exact.is_ok());
        if let (Ok(h), Ok(e)) = (heur, exact) {
            for v in [&h, &e] {
                let fixed = PartialAssignment::from_pairs(v.players.iter().map(|&i| (i, 1))).unwrap();
                let ext: Vec<JointAction> = psne.iter().filter(|x| fixed.agrees(x)).cloned().collect();
                prop_assert!(!ext.is_empty());
                prop_assert!(ext.iter().all(|x| c.contains(x)));
                prop_assert_eq!(&ext, &v.cover);
                for k in 0..v.players.len() {
                    let mut rest = v.players.clone();
                    rest.remove(k);
                    let fixed = PartialAssignment::from_pairs(rest.iter().map(|&i| (i, 1))).unwrap();
                    let ext: Vec<&JointAction> = psne.iter().filter(|x| fixed.agrees(x)).collect();
                    prop_assert!(ext.is_empty() || ext.iter().any(|x| !c.contains(x)));
                }
            }
            prop_assert!(e.players.len() <= h.players.len());
        }
    }

    #[test]
    fn nonnegative_dynamics_never_cycle(seed in any::<u64>(), n in 2usize..14) {
        let g = random_supermodular(&mut rng(seed), n, 0.5);
        let out = best_response_dynamics(&g, &BTreeMap::new(), &JointAction::uniform(n, -1), None).unwrap();
        match out.kind {
            DynamicsKind::FixedPoint { rounds, .. } => prop_assert!(rounds <= n),
            DynamicsKind::Cycle { .. } => prop_assert!(false, "cycle in a nonnegative game"),
        }
    }

    #[test]
    fn stable_diffusion_hits_are_psne(seed in any::<u64>(), n in 3usize..9, quota in 1usize..9) {
        let g = random_game(&mut rng(seed), n, 0.6);
        let spec = ClotureSpec::new(quota.min(n), None, n).unwrap();
        for hit in diffusion_filibuster(&g, &spec, 2, None).unwrap() {
            let x = hit.outcome.fixed_point().unwrap();
            prop_assert!(spec.satisfied_by(x));
            prop_assert_eq!(hit.outcome.stable, g.is_psne(x));
        }
    }

    #[test]
    fn generators_are_pure(seed in any::<u64>(), n in 3usize..20) {
        prop_assert_eq!(gen_erdos_renyi(n, 0.3, seed).unwrap(), gen_erdos_renyi(n, 0.3, seed).unwrap());
        prop_assert_eq!(gen_uniform_random(n, 0.5, 0.5, seed).unwrap(), gen_uniform_random(n, 0.5, 0.5, seed).unwrap());
        prop_assert_eq!(gen_pref_attach(n, 3, 0.5, seed).unwrap(), gen_pref_attach(n, 3, 0.5, seed).unwrap());
        let sm = gen_uniform_random(n, 0.5, 0.0, seed).unwrap();
        prop_assert!(supermodular_bracket(&sm).is_ok());
    }

    #[test]
    fn game_json_round_trip(seed in any::<u64>(), n in 1usize..10) {
        let g = random_game(&mut rng(seed), n, 0.5);
        prop_assert_eq!(game_from_json(&game_to_json(&g)).unwrap(), g);
    }

    #[test]
    fn learner_objective_decreases(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rows: Vec<JointAction> = (0..20)
            .map(|_| JointAction::new((0..4).map(|_| if r.random_bool(0.5) { 1 } else { -1 }).collect()).unwrap())
            .collect();
        let votes = VoteMatrix::new(rows, Vec::new()).unwrap();
        let (_, rep) = learn_lig(&votes, &LearnConfig::default()).unwrap();
        for p in &rep.players {
            prop_assert!(p.objective_trace.windows(2).all(|w| w[1] <= w[0]));
        }
    }
}

/// Gibbs samples from a symmetric ground truth; learned signs should match.
#[test]
fn learner_recovers_signs() {
    let mut r = rng(11);
    let n = 6;
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if r.random_bool(0.5) {
                let w = if r.random_bool(0.5) { 1.0 } else { -1.0 } * r.random_range(0.6..1.0);
                arcs.push((u, v, w));
                arcs.push((v, u, w));
            }
        }
    }
    let truth = InfluenceGame::new(vec![0.0; n], arcs).unwrap();
    let mut x: Vec<i8> = vec![1; n];
    let mut rows = Vec::new();
    for t in 0..40_000 {
        let i = t % n;
        let f = truth.influence(i, &JointAction::new(x.clone()).unwrap()).unwrap();
        let p = 1.0 / (1.0 + (-2.0 * f).exp());
        x[i] = if r.random_bool(p) { 1 } else { -1 };
        if t % (3 * n) == 0 && t > 1000 {
            rows.push(JointAction::new(x.clone()).unwrap());
        }
    }
    let votes = VoteMatrix::new(rows, Vec::new()).unwrap();
    let cfg = LearnConfig { l2_lambda: 1e-3, ..LearnConfig::default() };
    let (learned, _) = learn_lig(&votes, &cfg).unwrap();
    let arcs: Vec<_> = truth.arcs().collect();
    let agree = arcs.iter().filter(|&&(j, i, w)| learned.weight(j, i).signum() == w.signum()).count();
    assert!(agree as f64 >= 0.9 * arcs.len() as f64, "{agree} of {}", arcs.len());
}
