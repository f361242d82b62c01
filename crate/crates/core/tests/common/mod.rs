#![allow(dead_code)]

use lig::InfluenceGame;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixed-sign continuous weights, so exact ties have probability zero.
pub fn random_game(rng: &mut ChaCha8Rng, n: usize, density: f64) -> InfluenceGame {
    let mut arcs = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if i != j && rng.random_bool(density) {
                arcs.push((j, i, rng.random_range(-1.0..1.0)));
            }
        }
    }
    let b = (0..n).map(|_| rng.random_range(-0.5..0.5)).collect();
    InfluenceGame::new(b, arcs).unwrap()
}

/// Random forest with asymmetric, possibly one-directional arcs.
pub fn random_forest(rng: &mut ChaCha8Rng, n: usize) -> InfluenceGame {
    let mut arcs = Vec::new();
    for v in 1..n {
        if rng.random_bool(0.1) {
            continue;
        }
        let u = rng.random_range(0..v);
        let (fwd, back) = match rng.random_range(0..4) {
            0 => (true, false),
            1 => (false, true),
            _ => (true, true),
        };
        if fwd {
            arcs.push((u, v, rng.random_range(-2.0..2.0)));
        }
        if back {
            arcs.push((v, u, rng.random_range(-2.0..2.0)));
        }
    }
    let b = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    InfluenceGame::new(b, arcs).unwrap()
}

/// Two dense blocks that only meet through a few bridge nodes.
pub fn separable_game(rng: &mut ChaCha8Rng, n: usize) -> InfluenceGame {
    let bridges = rng.random_range(1..=2usize);
    let rest = n - bridges;
    let half = rest / 2;
    let block = |v: usize| {
        if v < half {
            0
        } else if v < rest {
            1
        } else {
            2
        }
    };
    let mut arcs = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if i == j {
                continue;
            }
            let (a, b) = (block(j), block(i));
            let linked = if a == 2 || b == 2 { rng.random_bool(0.5) } else { a == b && rng.random_bool(0.4) };
            if linked {
                arcs.push((j, i, rng.random_range(-1.0..1.0)));
            }
        }
    }
    let b = (0..n).map(|_| rng.random_range(-0.5..0.5)).collect();
    InfluenceGame::new(b, arcs).unwrap()
}

/// Symmetric mixed-sign weights.
pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize, density: f64) -> InfluenceGame {
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(density) {
                let w = rng.random_range(-1.0..1.0);
                arcs.push((u, v, w));
                arcs.push((v, u, w));
            }
        }
    }
    let b = (0..n).map(|_| rng.random_range(-0.5..0.5)).collect();
    InfluenceGame::new(b, arcs).unwrap()
}

/// `w_ij = delta_i` for all `j != i`, every delta of sign `rho`.
pub fn random_indiscriminate(rng: &mut ChaCha8Rng, n: usize, rho: f64) -> InfluenceGame {
    let delta: Vec<f64> = (0..n).map(|_| rho * rng.random_range(0.1..1.0)).collect();
    let arcs: Vec<_> = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let arcs = arcs.into_iter().map(|(i, j)| (i, j, delta[i])).collect::<Vec<_>>();
    let b = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    InfluenceGame::new(b, arcs).unwrap()
}

/// Nonnegative weights.
pub fn random_supermodular(rng: &mut ChaCha8Rng, n: usize, density: f64) -> InfluenceGame {
    let mut arcs = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if i != j && rng.random_bool(density) {
                arcs.push((j, i, rng.random_range(0.0..1.0)));
            }
        }
    }
    let b = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    InfluenceGame::new(b, arcs).unwrap()
}
