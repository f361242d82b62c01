//! Maximum bipartite matching and minimum vertex cover.

use std::collections::VecDeque;

const NIL: usize = usize::MAX;

/// Hopcroft–Karp on a bipartite graph with `left` vertices whose neighbor
/// lists index `0..right`. Returns `mate_left[u]` (right partner or `None`).
pub fn hopcroft_karp(adj: &[Vec<usize>], right: usize) -> Vec<Option<usize>> {
    let left = adj.len();
    let mut mate_l = vec![NIL; left];
    let mut mate_r = vec![NIL; right];
    let mut dist = vec![0usize; left];
    loop {
        // layered BFS from free left vertices
        let mut q = VecDeque::new();
        let mut found = false;
        for u in 0..left {
            if mate_l[u] == NIL {
                dist[u] = 0;
                q.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        while let Some(u) = q.pop_front() {
            for &v in &adj[u] {
                let w = mate_r[v];
                if w == NIL {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    q.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        let mut progressed = false;
        for u in 0..left {
            if mate_l[u] == NIL && augment(u, adj, &mut mate_l, &mut mate_r, &mut dist) {
                progressed = true;
            }
        }
        if !progressed {
            break;
        }
    }
    mate_l.into_iter().map(|v| (v != NIL).then_some(v)).collect()
}

fn augment(u: usize, adj: &[Vec<usize>], mate_l: &mut [usize], mate_r: &mut [usize], dist: &mut [usize]) -> bool {
    // iterative DFS along the BFS layers
    let mut stack: Vec<(usize, usize)> = vec![(u, 0)];
    let mut path: Vec<(usize, usize)> = Vec::new();
    while let Some(&mut (x, ref mut next)) = stack.last_mut() {
        if *next >= adj[x].len() {
            dist[x] = usize::MAX;
            stack.pop();
            path.pop();
            continue;
        }
        let v = adj[x][*next];
        *next += 1;
        let w = mate_r[v];
        if w == NIL {
            path.push((x, v));
            for &(a, b) in &path {
                mate_l[a] = b;
                mate_r[b] = a;
            }
            return true;
        }
        if dist[w] == dist[x].wrapping_add(1) {
            path.push((x, v));
            stack.push((w, 0));
        }
    }
    false
}

/// König's construction: a minimum vertex cover from a maximum matching.
/// Returns `(left_cover, right_cover)`, each sorted.
pub fn konig_cover(adj: &[Vec<usize>], right: usize, mate_l: &[Option<usize>]) -> (Vec<usize>, Vec<usize>) {
    let left = adj.len();
    let mut mate_r = vec![None; right];
    for (u, m) in mate_l.iter().enumerate() {
        if let Some(v) = *m {
            mate_r[v] = Some(u);
        }
    }
    let mut zl = vec![false; left];
    let mut zr = vec![false; right];
    let mut q: VecDeque<usize> = (0..left).filter(|&u| mate_l[u].is_none()).collect();
    for &u in &q {
        zl[u] = true;
    }
    while let Some(u) = q.pop_front() {
        for &v in &adj[u] {
            if mate_l[u] == Some(v) || zr[v] {
                continue;
            }
            zr[v] = true;
            if let Some(w) = mate_r[v] {
                if !zl[w] {
                    zl[w] = true;
                    q.push_back(w);
                }
            }
        }
    }
    ((0..left).filter(|&u| !zl[u]).collect(), (0..right).filter(|&v| zr[v]).collect())
}
