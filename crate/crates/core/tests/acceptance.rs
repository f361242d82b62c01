//! One line per acceptance criterion; exits nonzero if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use lig::fixtures::{supreme_court, LIBERALS};
use lig::genlearn::{gen_pref_attach, gen_uniform_random};
use lig::influence::{
    exact_most_influential, greedy_most_influential, isolates, GameHypergraph, GoalSpec, GreedyConfig, SetPreference,
};
use lig::reductions::{gadget_3sat, gadget_knapsack_star, random_3cnf, sat_count, KnapsackInstance, DEFAULT_EPSILON};
use lig::scenarios::{diffusion_filibuster, filibuster_breakers, stable_cloture_set, ClotureSpec};
use lig::solvers::{enumerate_psne, solve_divide_conquer, solve_tree, supermodular_bracket, supermodular_run, Extreme};
use lig::transforms::{detect_potential, potential_value, PotentialKind};
use lig::{brute_force_psne, InfluenceGame, JointAction, PartialAssignment, SearchConfig};
use rand::Rng;

use common::*;

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: &str, name: &str, ok: bool, took: Duration, limit: Duration, detail: String) {
        let ok = ok && took <= limit;
        if !ok {
            self.failures += 1;
        }
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag} [{id}] {name} ({:.2}s, limit {}s): {detail}", took.as_secs_f64(), limit.as_secs());
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len().max(1) as f64
}

fn supreme_court_all_plus(r: &mut Report) {
    let t = Instant::now();
    let g = supreme_court();
    let psne = brute_force_psne(&g, None).unwrap();
    let all = JointAction::uniform(9, 1);
    let e = exact_most_influential(&g, &psne, &GoalSpec::TargetPsne(all.clone()), &SetPreference::MinCardinality, None)
        .unwrap();
    let cons = ["Scalia", "Thomas"].map(|s| g.index_of(s).unwrap());
    let libs = LIBERALS.map(|s| g.index_of(s).unwrap());
    let shape = e.all_optimal.iter().all(|s| {
        s.len() == 2
            && s.iter().filter(|i| cons.contains(i)).count() == 1
            && s.iter().filter(|i| libs.contains(i)).count() == 1
    });
    let ok = e.best.len() == 2 && shape && g.is_psne(&all);
    r.line(
        "1",
        "Supreme Court all-+1 goal: minimum size 2, pairs {Scalia,Thomas} x liberals",
        ok,
        t.elapsed(),
        secs(5),
        format!(
            "min size {}, {} optimal pairs, all-+1 is PSNE: {}",
            e.best.len(),
            e.all_optimal.len(),
            g.is_psne(&all)
        ),
    );
}

fn supreme_court_five_four(r: &mut Report) {
    let t = Instant::now();
    let g = supreme_court();
    let psne = brute_force_psne(&g, None).unwrap();
    let five_four = JointAction::new(vec![1, 1, 1, 1, 1, -1, -1, -1, -1]).unwrap();
    let in_list = psne.contains(&five_four);
    let alone: Vec<(&str, bool)> =
        LIBERALS.iter().map(|&l| (l, in_list && isolates(&psne, &five_four, &[g.index_of(l).unwrap()]))).collect();
    let ok = in_list && alone.iter().all(|&(_, a)| a);
    let detail = alone.iter().map(|(l, a)| format!("{l} alone: {a}")).collect::<Vec<_>>().join(", ");
    r.line(
        "1b",
        "Supreme Court 5-4 goal: each liberal alone is most influential",
        ok,
        t.elapsed(),
        secs(5),
        format!("5-4 PSNE present: {in_list}; {detail}"),
    );
}

fn counting_oracles(r: &mut Report) {
    let t = Instant::now();
    let mut rng = rng(2);
    let mut sat_ok = 0;
    for _ in 0..50 {
        let nv = rng.random_range(3..=6);
        let f = random_3cnf(nv, rng.random_range(1..=8), &mut rng);
        let g = gadget_3sat(&f, DEFAULT_EPSILON).unwrap().to_pm1();
        if brute_force_psne(&g, None).unwrap().len() as u64 == sat_count(&f) {
            sat_ok += 1;
        }
    }
    let mut ks_ok = 0;
    for _ in 0..50 {
        let items = rng.random_range(1..=10);
        let weights: Vec<u64> = (0..items).map(|_| rng.random_range(1..=20)).collect();
        let inst = KnapsackInstance::new(weights, rng.random_range(1..=60)).unwrap();
        let g = gadget_knapsack_star(&inst).unwrap().to_pm1();
        if brute_force_psne(&g, None).unwrap().len() as u64 == inst.feasible_count() {
            ks_ok += 1;
        }
    }
    r.line(
        "2",
        "#SAT = #PSNE(3-SAT gadget), feasible count = #PSNE(knapsack star)",
        sat_ok == 50 && ks_ok == 50,
        t.elapsed(),
        secs(30),
        format!("3-CNF {sat_ok}/50, knapsack {ks_ok}/50"),
    );
}

fn uniform_random_batch(r: &mut Report) {
    let t = Instant::now();
    let cfg = SearchConfig::default();
    let mut means = Vec::new();
    let mut detail = Vec::new();
    let mut p1_games = Vec::new();
    for (k, p) in [0.0, 0.5, 1.0].into_iter().enumerate() {
        let mut counts = Vec::new();
        let mut empty = 0;
        for trial in 0..100u64 {
            let g = gen_uniform_random(25, 0.5, p, 1000 * k as u64 + trial).unwrap();
            let (psne, _) = enumerate_psne(&g, &cfg).unwrap();
            if psne.is_empty() {
                empty += 1;
                continue;
            }
            counts.push(psne.len() as f64);
            if p == 1.0 {
                p1_games.push((g, psne));
            }
        }
        let m = mean(&counts);
        detail.push(format!("p={p}: mean {m:.2} over {} games ({empty} without PSNE)", counts.len()));
        means.push(m);
    }
    let took = t.elapsed();
    let ok = (1.0..=5.0).contains(&means[0])
        && (120.0..=280.0).contains(&means[2])
        && means[2] > means[1]
        && means[1] > means[0];
    r.line("3", "uniform-random 25-node PSNE counts by flip probability", ok, took, secs(1800), detail.join("; "));

    let t = Instant::now();
    let mut within = 0;
    let mut sizes = (Vec::new(), Vec::new());
    for (g, psne) in &p1_games {
        let goal = GoalSpec::MaxAdopters;
        let target = lig::influence::optimal_psne_set(psne, &goal, &[]).unwrap()[0].clone();
        let hg = GameHypergraph::new(psne.clone(), &target).unwrap();
        let greedy =
            greedy_most_influential(g, psne, &goal, &SetPreference::MinCardinality, &hg, &GreedyConfig::default())
                .unwrap();
        let exact = exact_most_influential(
            g,
            psne,
            &GoalSpec::TargetPsne(greedy.goal.clone()),
            &SetPreference::MinCardinality,
            None,
        )
        .unwrap();
        if greedy.selected.len() <= exact.best.len() + 2 {
            within += 1;
        }
        sizes.0.push(greedy.selected.len() as f64);
        sizes.1.push(exact.best.len() as f64);
    }
    let frac = within as f64 / p1_games.len().max(1) as f64;
    r.line(
        "4",
        "greedy size <= exact size + 2 on the p=1 batch",
        frac >= 0.9,
        took + t.elapsed(),
        secs(1800),
        format!(
            "{within}/{} trials ({:.0}%), mean greedy {:.2}, mean exact {:.2}",
            p1_games.len(),
            100.0 * frac,
            mean(&sizes.0),
            mean(&sizes.1)
        ),
    );
}

fn pref_attach_growth(r: &mut Report) {
    let t = Instant::now();
    let cfg = SearchConfig::default();
    let mut means = Vec::new();
    for n in [20, 25, 30, 35] {
        let counts: Vec<f64> = (0..20u64)
            .map(|s| {
                enumerate_psne(&gen_pref_attach(n, 3, 1.0, 7000 + 100 * n as u64 + s).unwrap(), &cfg).unwrap().0.len()
                    as f64
            })
            .collect();
        means.push(mean(&counts));
    }
    let ok = means.windows(2).all(|w| w[1] > w[0]);
    let detail = [20, 25, 30, 35].iter().zip(&means).map(|(n, m)| format!("n={n}: {m:.2}")).collect::<Vec<_>>();
    r.line("5", "pref-attach p=1 mean PSNE count increases with n", ok, t.elapsed(), secs(1200), detail.join(", "));
}

fn solver_equivalence(r: &mut Report) {
    let t = Instant::now();
    let cfg = SearchConfig::default();
    let mut rng = rng(6);
    let mut bt = 0;
    for _ in 0..300 {
        let n = rng.random_range(8..=15);
        let d = rng.random_range(0.1..0.9);
        let g = random_game(&mut rng, n, d);
        if enumerate_psne(&g, &cfg).unwrap().0 == brute_force_psne(&g, None).unwrap() {
            bt += 1;
        }
    }
    let mut tree = 0;
    for _ in 0..200 {
        let n = rng.random_range(1..=15);
        let g = random_forest(&mut rng, n);
        let psne = brute_force_psne(&g, None).unwrap();
        let agrees = match solve_tree(&g).unwrap() {
            Some(x) => psne.contains(&x),
            None => psne.is_empty(),
        };
        if agrees {
            tree += 1;
        }
    }
    let mut dnc = 0;
    for _ in 0..100 {
        let n = rng.random_range(6..=24);
        let g = separable_game(&mut rng, n);
        let (got, exact) = solve_divide_conquer(&g, &cfg, 0).unwrap();
        if exact && got == enumerate_psne(&g, &cfg).unwrap().0 {
            dnc += 1;
        }
    }
    r.line(
        "6",
        "backtracking, tree and divide-and-conquer agree with reference enumeration",
        bt == 300 && tree == 200 && dnc == 100,
        t.elapsed(),
        secs(600),
        format!("backtrack {bt}/300, tree {tree}/200, divide-and-conquer {dnc}/100"),
    );
}

fn supermodular_contract(r: &mut Report) {
    let t = Instant::now();
    let mut rng = rng(7);
    let mut good = 0;
    for _ in 0..100 {
        let n = rng.random_range(2..=12);
        let d = rng.random_range(0.1..0.9);
        let g = random_supermodular(&mut rng, n, d);
        let fast = [Extreme::AllMinusOne, Extreme::AllPlusOne]
            .into_iter()
            .all(|e| supermodular_run(&g, e).is_ok_and(|(_, rounds)| rounds <= n));
        let (lo, hi) = supermodular_bracket(&g).unwrap();
        let bracketed = brute_force_psne(&g, None)
            .unwrap()
            .iter()
            .all(|x| (0..n).all(|i| lo.get(i) <= x.get(i) && x.get(i) <= hi.get(i)));
        if fast && bracketed {
            good += 1;
        }
    }
    r.line(
        "7",
        "nonnegative games: extreme dynamics fix within n rounds and bracket all PSNE",
        good == 100,
        t.elapsed(),
        secs(60),
        format!("{good}/100 games"),
    );
}

fn all_actions(n: usize) -> Vec<JointAction> {
    (0..1u64 << n).map(|m| JointAction::from_mask(n, m)).collect()
}

/// Returns (deltas matched, PSNE = local maxima).
fn potential_check(g: &InfluenceGame, exact: bool) -> (bool, bool) {
    let kind = detect_potential(g);
    if kind == PotentialKind::NoneDetected {
        return (false, false);
    }
    let n = g.n();
    let mut deltas = true;
    let mut local_max = Vec::new();
    for x in all_actions(n) {
        let phi = potential_value(g, &kind, &x).unwrap();
        let mut is_max = true;
        for i in 0..n {
            let y = x.with(i, -x.get(i));
            let du = g.payoff(i, &y).unwrap() - g.payoff(i, &x).unwrap();
            let dphi = potential_value(g, &kind, &y).unwrap() - phi;
            let ok = if exact {
                (du - dphi).abs() <= 1e-9
            } else {
                du.abs() <= 1e-12 && dphi.abs() <= 1e-12 || du.signum() == dphi.signum()
            };
            deltas &= ok;
            if dphi > 1e-12 {
                is_max = false;
            }
        }
        if is_max {
            local_max.push(x);
        }
    }
    (deltas, local_max == brute_force_psne(g, None).unwrap())
}

fn potential_games(r: &mut Report) {
    let t = Instant::now();
    let mut rng = rng(8);
    let (mut sym, mut sym_max, mut ind, mut ind_max) = (0, 0, 0, 0);
    for _ in 0..100 {
        let n = rng.random_range(2..=8);
        let (d, m) = potential_check(&random_symmetric(&mut rng, n, 0.7), true);
        sym += d as usize;
        sym_max += m as usize;
    }
    for k in 0..100 {
        let n = rng.random_range(2..=8);
        let rho = if k % 2 == 0 { 1.0 } else { -1.0 };
        let (d, m) = potential_check(&random_indiscriminate(&mut rng, n, rho), false);
        ind += d as usize;
        ind_max += m as usize;
    }
    r.line(
        "8",
        "potential games: exact and ordinal deltas, PSNE = local maxima",
        sym == 100 && sym_max == 100 && ind == 100 && ind_max == 100,
        t.elapsed(),
        secs(60),
        format!(
            "symmetric deltas {sym}/100, maxima {sym_max}/100; indiscriminate deltas {ind}/100, maxima {ind_max}/100"
        ),
    );
}

/// Player 0 is stubborn and pushes 1 and 2, who coordinate with each other.
fn stubborn_pusher() -> InfluenceGame {
    InfluenceGame::new(vec![1.0, 0.0, 0.0], [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0), (2, 1, 1.0)]).unwrap()
}

/// `Some(true)` when diffusion reaches an unstable quota state and the
/// game-theoretic cover is a verified stable cloture outcome.
fn contrast(g: &InfluenceGame, quota: usize) -> Option<bool> {
    let n = g.n();
    let spec = ClotureSpec::new(quota, None, n).ok()?;
    let psne = brute_force_psne(g, None).ok()?;
    let target = stable_cloture_set(&psne, &spec);
    let hits = diffusion_filibuster(g, &spec, 3, None).ok()?;
    let unstable = hits.iter().any(|h| h.outcome.fixed_point().is_some_and(|x| !g.is_psne(x)));
    let cover = filibuster_breakers(g, &psne, &target, false).ok()?;
    let fixed = PartialAssignment::from_pairs(cover.players.iter().map(|&i| (i, 1))).ok()?;
    let consistent: Vec<&JointAction> = psne.iter().filter(|x| fixed.agrees(x)).collect();
    let verified = !consistent.is_empty() && consistent.iter().all(|x| g.is_psne(x) && spec.satisfied_by(x));
    Some(unstable && verified)
}

fn diffusion_contrast(r: &mut Report) {
    let t = Instant::now();
    let built = contrast(&stubborn_pusher(), 2) == Some(true);
    let mut rng = rng(9);
    let mut random_hits = 0;
    for _ in 0..200 {
        let n = rng.random_range(4..=8);
        let g = random_game(&mut rng, n, 0.6);
        if contrast(&g, n / 2 + 1) == Some(true) {
            random_hits += 1;
        }
    }
    r.line(
        "9",
        "diffusion reaches unstable cloture states where the game cover is stable",
        built,
        t.elapsed(),
        secs(60),
        format!("constructed instance exhibits it: {built}; random instances exhibiting it: {random_hits}/200"),
    );
}

fn main() -> ExitCode {
    let mut r = Report { failures: 0 };
    supreme_court_all_plus(&mut r);
    supreme_court_five_four(&mut r);
    counting_oracles(&mut r);
    uniform_random_batch(&mut r);
    pref_attach_growth(&mut r);
    solver_equivalence(&mut r);
    supermodular_contract(&mut r);
    potential_games(&mut r);
    diffusion_contrast(&mut r);
    println!("N/A  [10] 100-senator results: not reproducible, the learned Congress parameters are not published");
    if r.failures == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} criteria failed", r.failures);
        ExitCode::FAILURE
    }
}
