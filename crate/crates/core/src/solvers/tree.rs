//! Two-pass table passing on forests.
//!
//! Each component is rooted at its lowest-index node. A node's *parents*
//! are its tree neighbors away from the root and its *child* is the one
//! neighbor toward the root. Tables travel from the leaves down to the root;
//! actions are then replayed back up from stored witnesses.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::game::{InfluenceGame, JointAction};
use crate::transforms::action_index;

const ACTIONS: [i8; 2] = [-1, 1];

fn sigma(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else {
        -1
    }
}

/// Whether the undirected graph underlying the game's arcs has no cycle.
pub fn is_forest(game: &InfluenceGame) -> bool {
    let nb = game.undirected_neighbors();
    let edges: usize = nb.iter().map(Vec::len).sum::<usize>() / 2;
    edges + components(&nb).len() == game.n()
}

fn components(nb: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; nb.len()];
    let mut out = Vec::new();
    for s in 0..nb.len() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &v in &nb[u] {
                if !seen[v] {
                    seen[v] = true;
                    comp.push(v);
                    q.push_back(v);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// A PSNE of a forest-structured game, or `None` when there is none.
///
/// Arcs may be asymmetric or one-directional; only the undirected
/// structure must be a forest. Runs in `O(n d)`.
pub fn solve_tree(game: &InfluenceGame) -> Result<Option<JointAction>> {
    let n = game.n();
    let nb = game.undirected_neighbors();
    if !is_forest(game) {
        return Err(Error::NotApplicable("the underlying graph is not a forest".into()));
    }
    let eps = game.tie_epsilon();
    let mut child: Vec<Option<usize>> = vec![None; n];
    // table[i][x_i][x_child]; for a root only column 0 is used
    let mut table = vec![[[false; 2]; 2]; n];
    // witness[k][x_child]: the action k is told to play
    let mut witness = vec![[0i8; 2]; n];
    let mut x = vec![0i8; n];

    let mut seen = vec![false; n];
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut seen_order = Vec::new();
        let mut q = VecDeque::from([root]);
        while let Some(u) = q.pop_front() {
            seen_order.push(u);
            for &v in &nb[u] {
                if !seen[v] {
                    seen[v] = true;
                    child[v] = Some(u);
                    q.push_back(v);
                }
            }
        }

        for &i in seen_order.iter().rev() {
            let parents = nb[i].iter().copied().filter(|&k| child[i] != Some(k));
            let b = game.threshold(i);
            for xi in ACTIONS {
                let xi_idx = action_index(xi);
                let mut blocked = false;
                let mut fixed = 0.0;
                for k in parents.clone() {
                    let t = &table[k];
                    let ok = [t[0][xi_idx], t[1][xi_idx]];
                    let wki = game.weight(k, i);
                    let xk = match ok {
                        [false, false] => {
                            blocked = true;
                            break;
                        }
                        [true, false] => -1,
                        [false, true] => 1,
                        [true, true] => sigma(xi as f64 * wki),
                    };
                    witness[k][xi_idx] = xk;
                    fixed += wki * xk as f64;
                }
                if blocked {
                    table[i][xi_idx] = [false, false];
                    continue;
                }
                match child[i] {
                    Some(j) => {
                        let wji = game.weight(j, i);
                        for xj in ACTIONS {
                            let f = wji * xj as f64 + fixed - b;
                            table[i][xi_idx][action_index(xj)] = xi as f64 * f >= -eps;
                        }
                    }
                    None => {
                        table[i][xi_idx][0] = xi as f64 * (fixed - b) >= -eps;
                    }
                }
            }
        }

        let Some(xr) = ACTIONS.into_iter().find(|&a| table[root][action_index(a)][0]) else {
            return Ok(None);
        };
        x[root] = xr;
        for &u in &seen_order[1..] {
            let j = child[u].expect("non-root has a child");
            x[u] = witness[u][action_index(x[j])];
        }
    }
    let x = JointAction::new(x).expect("every player assigned");
    debug_assert!(game.is_psne(&x), "table passing produced a non-equilibrium");
    if !game.is_psne(&x) {
        return Err(Error::InvalidGame("tree pass produced a non-equilibrium".into()));
    }
    Ok(Some(x))
}
