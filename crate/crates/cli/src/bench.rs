//! Benchmark sweeps over random game families, written as CSV.

use clap::ValueEnum;
use lig::genlearn::{gen_pref_attach, gen_uniform_random};
use lig::influence::{
    exact_most_influential, greedy_most_influential, optimal_psne_set, GameHypergraph, GoalSpec, GreedyConfig,
    SetPreference,
};
use lig::solvers::enumerate_psne;
use lig::{InfluenceGame, JointAction, SearchConfig};
use serde::Serialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// PSNE counts and node visits on uniform random directed graphs.
    UniformRandom,
    /// Greedy against exact most-influential sizes on uniform random graphs.
    Influence,
    /// PSNE counts on preferential-attachment graphs by size.
    PrefAttach,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchConfig {
    pub suite: Suite,
    pub trials: usize,
    pub n: usize,
    pub sizes: Vec<usize>,
    pub flip_ps: Vec<f64>,
    pub arc_p: f64,
    pub m: usize,
    pub seed: u64,
}

/// Mean and the half-width of its normal-approximation 95% interval.
pub fn mean_ci(v: &[f64]) -> (f64, f64) {
    let k = v.len() as f64;
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = v.iter().sum::<f64>() / k;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, 1.96 * (var / k).sqrt())
}

fn fmt(x: f64) -> String {
    format!("{x:.4}")
}

fn trial_seed(base: u64, config: usize, trial: usize) -> u64 {
    base.wrapping_add(1_000_000 * config as u64).wrapping_add(trial as u64)
}

/// A game, its PSNE and the search's node visits.
type Solved = (InfluenceGame, Vec<JointAction>, u64);

/// Games with at least one PSNE, with their equilibria and node visits.
fn solved(games: impl Iterator<Item = lig::Result<InfluenceGame>>) -> lig::Result<(Vec<Solved>, usize)> {
    let mut out = Vec::new();
    let mut empty = 0;
    for g in games {
        let g = g?;
        let (psne, stats) = enumerate_psne(&g, &SearchConfig::default())?;
        if psne.is_empty() {
            empty += 1;
        } else {
            out.push((g, psne, stats.nodes_visited));
        }
    }
    Ok((out, empty))
}

fn count_row(key: String, games: &[Solved], empty: usize) -> Vec<String> {
    let counts: Vec<f64> = games.iter().map(|(_, p, _)| p.len() as f64).collect();
    let visits: Vec<f64> = games.iter().map(|(_, p, v)| *v as f64 / p.len() as f64).collect();
    let (c, cc) = mean_ci(&counts);
    let (v, vc) = mean_ci(&visits);
    vec![key, games.len().to_string(), empty.to_string(), fmt(c), fmt(cc), fmt(v), fmt(vc)]
}

pub fn run(cfg: &BenchConfig) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match cfg.suite {
        Suite::UniformRandom => {
            w.write_record(["p", "games", "no_psne", "avg_psne", "ci_psne", "avg_visits", "ci_visits"])?;
            for (k, &p) in cfg.flip_ps.iter().enumerate() {
                let games =
                    (0..cfg.trials).map(|t| gen_uniform_random(cfg.n, cfg.arc_p, p, trial_seed(cfg.seed, k, t)));
                let (games, empty) = solved(games)?;
                w.write_record(count_row(fmt(p), &games, empty))?;
            }
        }
        Suite::PrefAttach => {
            let p = cfg.flip_ps.first().copied().unwrap_or(1.0);
            w.write_record(["n", "games", "no_psne", "avg_psne", "ci_psne", "avg_visits", "ci_visits"])?;
            for (k, &n) in cfg.sizes.iter().enumerate() {
                let games = (0..cfg.trials).map(|t| gen_pref_attach(n, cfg.m, p, trial_seed(cfg.seed, k, t)));
                let (games, empty) = solved(games)?;
                w.write_record(count_row(n.to_string(), &games, empty))?;
            }
        }
        Suite::Influence => {
            w.write_record([
                "p",
                "games",
                "avg_approx",
                "ci_approx",
                "avg_opt",
                "ci_opt",
                "pct_equal",
                "pct_le_opt1",
                "pct_le_opt2",
            ])?;
            for (k, &p) in cfg.flip_ps.iter().enumerate() {
                let games =
                    (0..cfg.trials).map(|t| gen_uniform_random(cfg.n, cfg.arc_p, p, trial_seed(cfg.seed, k, t)));
                let (games, _) = solved(games)?;
                let (mut approx, mut opt) = (Vec::new(), Vec::new());
                for (g, psne, _) in &games {
                    let (a, o) = influence_sizes(g, psne)?;
                    approx.push(a as f64);
                    opt.push(o as f64);
                }
                let pct = |d: f64| {
                    let hit = approx.iter().zip(&opt).filter(|(a, o)| **a <= **o + d).count();
                    fmt(100.0 * hit as f64 / approx.len().max(1) as f64)
                };
                let (a, ac) = mean_ci(&approx);
                let (o, oc) = mean_ci(&opt);
                w.write_record([
                    fmt(p),
                    games.len().to_string(),
                    fmt(a),
                    fmt(ac),
                    fmt(o),
                    fmt(oc),
                    pct(0.0),
                    pct(1.0),
                    pct(2.0),
                ])?;
            }
        }
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

/// Greedy and exact sizes for the max-adopters goal.
fn influence_sizes(g: &InfluenceGame, psne: &[JointAction]) -> lig::Result<(usize, usize)> {
    let goal = GoalSpec::MaxAdopters;
    let target = optimal_psne_set(psne, &goal, &[])?[0].clone();
    let hg = GameHypergraph::new(psne.to_vec(), &target)?;
    let pref = SetPreference::MinCardinality;
    let greedy = greedy_most_influential(g, psne, &goal, &pref, &hg, &GreedyConfig::default())?;
    let exact = exact_most_influential(g, psne, &GoalSpec::TargetPsne(greedy.goal.clone()), &pref, None)?;
    Ok((greedy.selected.len(), exact.best.len()))
}
