use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::votes::VoteMatrix;
use crate::error::{Error, Result};
use crate::game::InfluenceGame;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnConfig {
    pub l2_lambda: f64,
    pub max_iters: usize,
    /// Stop once the gradient norm falls below this.
    pub tolerance: f64,
    pub initial_step: f64,
    /// Step shrink factor during backtracking.
    pub backtrack: f64,
    /// Sufficient-decrease constant.
    pub armijo: f64,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            l2_lambda: 0.1,
            max_iters: 5000,
            tolerance: 1e-8,
            initial_step: 1.0,
            backtrack: 0.5,
            armijo: 1e-4,
        }
    }
}

impl LearnConfig {
    fn validate(&self) -> Result<()> {
        let ok = self.l2_lambda > 0.0
            && self.max_iters > 0
            && self.tolerance > 0.0
            && self.initial_step > 0.0
            && self.backtrack > 0.0
            && self.backtrack < 1.0
            && self.armijo > 0.0
            && self.armijo < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid learning configuration {self:?}")))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlayerFit {
    pub iterations: usize,
    pub grad_norm: f64,
    pub converged: bool,
    /// Objective after each accepted step, starting at the initial point.
    pub objective_trace: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LearnReport {
    pub players: Vec<PlayerFit>,
}

impl LearnReport {
    pub fn converged(&self) -> bool {
        self.players.iter().all(|p| p.converged)
    }

    pub fn max_grad_norm(&self) -> f64 {
        self.players.iter().map(|p| p.grad_norm).fold(0.0, f64::max)
    }
}

/// `log(1 + e^{-z})` without overflow.
fn softplus_neg(z: f64) -> f64 {
    if z > 0.0 {
        (-z).exp().ln_1p()
    } else {
        -z + z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Mean logistic loss of `y_i` against `sum_j w_j x_j - b` plus
/// `lambda/2 (|w|^2 + b^2)`. Parameters: `theta = (w_0..w_{n-1} without i, b)`.
struct Problem<'a> {
    rows: &'a [Vec<f64>],
    target: usize,
    lambda: f64,
}

impl Problem<'_> {
    fn features(&self, row: &[f64]) -> impl Iterator<Item = f64> + '_ {
        let t = self.target;
        let owned: Vec<f64> = row.iter().enumerate().filter(|&(j, _)| j != t).map(|(_, &v)| v).collect();
        owned.into_iter().chain(std::iter::once(-1.0))
    }

    fn margin(&self, row: &[f64], theta: &[f64]) -> f64 {
        row[self.target] * self.features(row).zip(theta).map(|(x, w)| x * w).sum::<f64>()
    }

    fn objective(&self, theta: &[f64]) -> f64 {
        let m = self.rows.len() as f64;
        let loss: f64 = self.rows.iter().map(|r| softplus_neg(self.margin(r, theta))).sum::<f64>() / m;
        loss + 0.5 * self.lambda * theta.iter().map(|t| t * t).sum::<f64>()
    }

    fn gradient(&self, theta: &[f64]) -> Vec<f64> {
        let m = self.rows.len() as f64;
        let mut g: Vec<f64> = theta.iter().map(|t| self.lambda * t).collect();
        for r in self.rows {
            let y = r[self.target];
            let coef = -y * sigmoid(-self.margin(r, theta)) / m;
            for (gk, x) in g.iter_mut().zip(self.features(r)) {
                *gk += coef * x;
            }
        }
        g
    }
}

fn fit(p: &Problem<'_>, dim: usize, cfg: &LearnConfig) -> (Vec<f64>, PlayerFit) {
    let mut theta = vec![0.0; dim];
    let mut obj = p.objective(&theta);
    let mut trace = vec![obj];
    let mut step = cfg.initial_step;
    let mut grad = p.gradient(&theta);
    let mut gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    let mut iters = 0;
    while iters < cfg.max_iters && gnorm >= cfg.tolerance {
        iters += 1;
        // Armijo backtracking along the negative gradient
        let mut t = step;
        let accepted = loop {
            let cand: Vec<f64> = theta.iter().zip(&grad).map(|(th, g)| th - t * g).collect();
            let c = p.objective(&cand);
            if c <= obj - cfg.armijo * t * gnorm * gnorm {
                break Some((cand, c));
            }
            t *= cfg.backtrack;
            if t < 1e-20 {
                break None;
            }
        };
        let Some((cand, c)) = accepted else {
            break;
        };
        theta = cand;
        obj = c;
        trace.push(obj);
        step = (t / cfg.backtrack).min(cfg.initial_step * 1e3);
        grad = p.gradient(&theta);
        gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    }
    let converged = gnorm < cfg.tolerance;
    (theta, PlayerFit { iterations: iters, grad_norm: gnorm, converged, objective_trace: trace })
}

/// Independent L2-regularized logistic regressions, one per player; the
/// coefficients of player `i` become `w_ji` and `b_i`.
///
/// Non-convergence is reported in [`LearnReport`], not as an error.
pub fn learn_lig(votes: &VoteMatrix, cfg: &LearnConfig) -> Result<(InfluenceGame, LearnReport)> {
    cfg.validate()?;
    let n = votes.num_players();
    if votes.instances.is_empty() {
        return Err(Error::InvalidInput("no voting instances".into()));
    }
    if n < 2 {
        return Err(Error::InvalidInput(format!("learning needs at least two players, got {n}")));
    }
    let rows: Vec<Vec<f64>> =
        votes.instances.iter().map(|x| x.as_slice().iter().map(|&a| a as f64).collect()).collect();
    let fits: Vec<(Vec<f64>, PlayerFit)> = (0..n)
        .into_par_iter()
        .map(|i| fit(&Problem { rows: &rows, target: i, lambda: cfg.l2_lambda }, n, cfg))
        .collect();
    let mut thresholds = Vec::with_capacity(n);
    let mut arcs = Vec::new();
    let mut players = Vec::with_capacity(n);
    for (i, (theta, report)) in fits.into_iter().enumerate() {
        let others = (0..n).filter(|&j| j != i);
        arcs.extend(others.zip(&theta).map(|(j, &w)| (j, i, w)));
        thresholds.push(theta[n - 1]);
        players.push(report);
    }
    let mut game = InfluenceGame::new(thresholds, arcs)?;
    if !votes.labels.is_empty() {
        game = game.with_labels(votes.labels.clone())?;
    }
    Ok((game, LearnReport { players }))
}

/// Fraction of instances that are PSNE of `game`.
pub fn psne_representation_rate(game: &InfluenceGame, votes: &VoteMatrix) -> Result<f64> {
    if let Some(x) = votes.instances.iter().find(|x| x.len() != game.n()) {
        return Err(Error::LengthMismatch { expected: game.n(), got: x.len() });
    }
    if votes.instances.is_empty() {
        return Ok(0.0);
    }
    let hits = votes.instances.iter().filter(|x| game.is_psne(x)).count();
    Ok(hits as f64 / votes.instances.len() as f64)
}
