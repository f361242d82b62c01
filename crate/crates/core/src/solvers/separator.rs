//! Vertex separators from a refined BFS bisection.

use std::collections::VecDeque;

use super::matching::{hopcroft_karp, konig_cover};
use crate::error::{Error, Result};
use crate::game::InfluenceGame;

const REFINE_PASSES: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Separator {
    /// Separator vertices, sorted.
    pub vertices: Vec<usize>,
    /// Node sets left after removing the separator; each sorted, ordered by
    /// smallest member.
    pub components: Vec<Vec<usize>>,
    /// Undirected cut edges deliberately left out of the separator.
    pub ignored: Vec<(usize, usize)>,
}

impl Separator {
    /// Checks the partition and that no kept edge joins two components.
    pub fn is_valid(&self, game: &InfluenceGame) -> bool {
        let n = game.n();
        let mut owner = vec![usize::MAX; n];
        for &s in &self.vertices {
            if owner[s] != usize::MAX {
                return false;
            }
            owner[s] = usize::MAX - 1;
        }
        for (c, comp) in self.components.iter().enumerate() {
            for &v in comp {
                if owner[v] != usize::MAX {
                    return false;
                }
                owner[v] = c;
            }
        }
        if owner.contains(&usize::MAX) {
            return false;
        }
        game.arcs().all(|(j, i, _)| {
            let (a, b) = (owner[j], owner[i]);
            a == b || a == usize::MAX - 1 || b == usize::MAX - 1 || self.ignores(j, i)
        })
    }

    pub fn ignores(&self, u: usize, v: usize) -> bool {
        let e = (u.min(v), u.max(v));
        self.ignored.binary_search(&e).is_ok()
    }
}

fn bfs_far(nb: &[Vec<usize>], start: usize, allowed: &[bool]) -> (usize, Vec<usize>) {
    let mut dist = vec![usize::MAX; nb.len()];
    dist[start] = 0;
    let mut q = VecDeque::from([start]);
    let mut far = start;
    let mut order = Vec::new();
    while let Some(u) = q.pop_front() {
        order.push(u);
        if dist[u] > dist[far] || (dist[u] == dist[far] && u < far) {
            far = u;
        }
        for &v in &nb[u] {
            if allowed[v] && dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
        }
    }
    (far, order)
}

fn components_of(nb: &[Vec<usize>], keep: &[bool], skip: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let n = nb.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if !keep[s] || seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &v in &nb[u] {
                if keep[v] && !seen[v] && !skip(u, v) {
                    seen[v] = true;
                    comp.push(v);
                    q.push_back(v);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Two-way split of one connected node set: BFS region growing from a
/// pseudo-peripheral node, then boundary moves that shrink the cut while
/// keeping the side sizes within `n/10` of each other.
fn bisect(nb: &[Vec<usize>], nodes: &[usize]) -> Vec<bool> {
    let n = nb.len();
    let mut allowed = vec![false; n];
    for &v in nodes {
        allowed[v] = true;
    }
    let (a, _) = bfs_far(nb, nodes[0], &allowed);
    let (b, _) = bfs_far(nb, a, &allowed);
    let (_, order) = bfs_far(nb, b, &allowed);
    let half = nodes.len() / 2;
    let mut side = vec![false; n];
    for &v in order.iter().take(half.max(1)) {
        side[v] = true;
    }
    let slack = 2 * (nodes.len() / 10) + nodes.len() % 2;
    let mut size_a = half.max(1) as isize;
    let total = nodes.len() as isize;
    for _ in 0..REFINE_PASSES {
        let mut moved = false;
        for &v in nodes {
            let (mut same, mut other) = (0isize, 0isize);
            for &u in &nb[v] {
                if !allowed[u] {
                    continue;
                }
                if side[u] == side[v] {
                    same += 1;
                } else {
                    other += 1;
                }
            }
            if other <= same {
                continue;
            }
            let new_a = if side[v] { size_a - 1 } else { size_a + 1 };
            if new_a <= 0 || new_a >= total || (2 * new_a - total).abs() > slack as isize {
                continue;
            }
            side[v] = !side[v];
            size_a = new_a;
            moved = true;
        }
        if !moved {
            break;
        }
    }
    side
}

/// A vertex separator splitting the interaction graph into two or more parts.
pub fn find_vertex_separator(game: &InfluenceGame, parts: usize) -> Result<Separator> {
    find_vertex_separator_dropping(game, parts, 0)
}

/// As [`find_vertex_separator`], but the `drop` cut edges of smallest total
/// `|w|` (both directions summed, ties by endpoints) are ignored before the
/// cover is computed; they are listed in [`Separator::ignored`].
pub fn find_vertex_separator_dropping(game: &InfluenceGame, parts: usize, drop: usize) -> Result<Separator> {
    if parts != 2 {
        return Err(Error::InvalidInput(format!("only two-way separators are built directly, got {parts}")));
    }
    let n = game.n();
    let nb = game.undirected_neighbors();
    let all = vec![true; n];
    let comps = components_of(&nb, &all, |_, _| false);
    if comps.len() > 1 || n < 3 {
        return Ok(Separator { vertices: Vec::new(), components: comps, ignored: Vec::new() });
    }
    let side = bisect(&nb, &comps[0]);

    let mut cut: Vec<(usize, usize, f64)> = Vec::new();
    for u in 0..n {
        for &v in &nb[u] {
            if u < v && side[u] != side[v] {
                let mass = game.weight(u, v).abs() + game.weight(v, u).abs();
                cut.push((u, v, mass));
            }
        }
    }
    cut.sort_by(|a, b| a.2.total_cmp(&b.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    let k = drop.min(cut.len());
    let mut ignored: Vec<(usize, usize)> = cut[..k].iter().map(|&(u, v, _)| (u, v)).collect();
    ignored.sort_unstable();
    let kept = &cut[k..];

    // left = side-true endpoints, right = side-false endpoints
    let mut left_ids: Vec<usize> = Vec::new();
    let mut right_ids: Vec<usize> = Vec::new();
    let mut lpos = vec![usize::MAX; n];
    let mut rpos = vec![usize::MAX; n];
    let mut adj: Vec<Vec<usize>> = Vec::new();
    for &(u, v, _) in kept {
        let (l, r) = if side[u] { (u, v) } else { (v, u) };
        if lpos[l] == usize::MAX {
            lpos[l] = left_ids.len();
            left_ids.push(l);
            adj.push(Vec::new());
        }
        if rpos[r] == usize::MAX {
            rpos[r] = right_ids.len();
            right_ids.push(r);
        }
        adj[lpos[l]].push(rpos[r]);
    }
    let mate = hopcroft_karp(&adj, right_ids.len());
    let (lc, rc) = konig_cover(&adj, right_ids.len(), &mate);
    let mut vertices: Vec<usize> = lc.iter().map(|&i| left_ids[i]).chain(rc.iter().map(|&i| right_ids[i])).collect();
    vertices.sort_unstable();

    let mut keep = vec![true; n];
    for &s in &vertices {
        keep[s] = false;
    }
    let skip = |u: usize, v: usize| ignored.binary_search(&(u.min(v), u.max(v))).is_ok();
    let components = components_of(&nb, &keep, skip);
    Ok(Separator { vertices, components, ignored })
}
