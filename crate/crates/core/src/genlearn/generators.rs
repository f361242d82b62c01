//! Random game families. Every generator is a pure function of its
//! arguments; node `i` draws from its own ChaCha stream.

use rand::seq::index::sample_weighted;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::InfluenceGame;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GenFamily {
    ErdosRenyi { edge_p: f64 },
    UniformRandom { arc_p: f64, flip_p: f64 },
    PrefAttach { m: usize, flip_p: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    #[serde(flatten)]
    pub family: GenFamily,
    pub n: usize,
    pub seed: u64,
}

pub fn generate(cfg: &GenConfig) -> Result<InfluenceGame> {
    match cfg.family {
        GenFamily::ErdosRenyi { edge_p } => gen_erdos_renyi(cfg.n, edge_p, cfg.seed),
        GenFamily::UniformRandom { arc_p, flip_p } => gen_uniform_random(cfg.n, arc_p, flip_p, cfg.seed),
        GenFamily::PrefAttach { m, flip_p } => gen_pref_attach(cfg.n, m, flip_p, cfg.seed),
    }
}

fn check_p(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be in [0, 1], got {p}")))
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Undirected `G(n, p)` with both arc directions present. Per node, the
/// vector `(b_i, w_ji...)` is a uniformly random point on the unit sphere.
pub fn gen_erdos_renyi(n: usize, edge_p: f64, seed: u64) -> Result<InfluenceGame> {
    check_p("edge_p", edge_p)?;
    let mut nb: Vec<Vec<usize>> = vec![Vec::new(); n];
    for u in 0..n {
        let mut rng = stream(seed, 2 * u as u64);
        for v in u + 1..n {
            if rng.random_bool(edge_p) {
                nb[u].push(v);
                nb[v].push(u);
            }
        }
    }
    let mut thresholds = vec![0.0; n];
    let mut arcs = Vec::new();
    for i in 0..n {
        nb[i].sort_unstable();
        let mut rng = stream(seed, 2 * i as u64 + 1);
        let mut v: Vec<f64> = (0..=nb[i].len()).map(|_| rng.sample::<f64, _>(StandardNormal).abs()).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        for a in &mut v {
            *a /= norm;
            if rng.random_bool(0.5) {
                *a = -*a;
            }
        }
        thresholds[i] = v[0];
        arcs.extend(nb[i].iter().zip(&v[1..]).map(|(&j, &w)| (j, i, w)));
    }
    InfluenceGame::new(thresholds, arcs)
}

fn sign(rng: &mut ChaCha8Rng, flip_p: f64) -> f64 {
    if rng.random_bool(flip_p) {
        -1.0
    } else {
        1.0
    }
}

/// Each ordered pair is an arc with probability `arc_p`, weight `-1` with
/// probability `flip_p` and `+1` otherwise; all thresholds are 0.
pub fn gen_uniform_random(n: usize, arc_p: f64, flip_p: f64, seed: u64) -> Result<InfluenceGame> {
    check_p("arc_p", arc_p)?;
    check_p("flip_p", flip_p)?;
    let mut arcs = Vec::new();
    for i in 0..n {
        let mut rng = stream(seed, i as u64);
        for j in (0..n).filter(|&j| j != i) {
            if rng.random_bool(arc_p) {
                arcs.push((j, i, sign(&mut rng, flip_p)));
            }
        }
    }
    InfluenceGame::new(vec![0.0; n], arcs)
}

/// A triangle grown by degree-proportional attachment of each new node to
/// `m` distinct earlier nodes. Edges are symmetric with one `±1` weight.
pub fn gen_pref_attach(n: usize, m: usize, flip_p: f64, seed: u64) -> Result<InfluenceGame> {
    check_p("flip_p", flip_p)?;
    if n < 3 {
        return Err(Error::InvalidInput(format!("preferential attachment needs n >= 3, got {n}")));
    }
    if m == 0 {
        return Err(Error::InvalidInput("m must be at least 1".into()));
    }
    let mut degree = vec![0usize; n];
    let mut edges: Vec<(usize, usize)> = vec![(0, 1), (0, 2), (1, 2)];
    degree[..3].fill(2);
    for v in 3..n {
        let mut rng = stream(seed, v as u64);
        let mut picks: Vec<usize> =
            sample_weighted(&mut rng, v, |u| degree[u] as f64, m.min(v)).expect("degrees are positive").into_vec();
        picks.sort_unstable();
        for u in picks {
            edges.push((u, v));
            degree[u] += 1;
            degree[v] += 1;
        }
    }
    let mut rng = stream(seed, n as u64);
    let arcs = edges.into_iter().flat_map(|(u, v)| {
        let w = sign(&mut rng, flip_p);
        [(u, v, w), (v, u, w)]
    });
    InfluenceGame::new(vec![0.0; n], arcs.collect::<Vec<_>>())
}
