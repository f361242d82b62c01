use std::cmp::Reverse;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;

use super::{SearchConfig, SearchStats};
use crate::error::{Error, PartialSearch, Result};
use crate::game::{Domain, DomainVector, InfluenceGame, JointAction, PartialAssignment};

/// Relative slack on every bound test. Pruning less than exact arithmetic
/// allows is always sound because leaves are re-verified.
const SLACK: f64 = 1e-9;

/// Prefix depth expanded before handing subtrees to workers.
const SPLIT_DEPTH: usize = 6;

#[derive(Clone, Debug, Default)]
pub struct SearchOutcome {
    /// Lexicographically ordered; empty when counting only.
    pub psne: Vec<JointAction>,
    pub count: u64,
    pub stats: SearchStats,
}

/// Variable order used by the search.
///
/// Players in `fixed` come first. The first free player is the one with the
/// most outgoing arcs; each later one has the largest `|w_kj|` into an
/// already ordered `j`, falling back to out-degree when no arc enters the
/// ordered set. Ties go to the lowest index.
pub fn search_order(game: &InfluenceGame, fixed: &[usize]) -> Vec<usize> {
    let n = game.n();
    let mut placed = vec![false; n];
    let mut key = vec![0.0f64; n];
    let mut order = Vec::with_capacity(n);
    let place = |v: usize, order: &mut Vec<usize>, placed: &mut [bool], key: &mut [f64]| {
        placed[v] = true;
        order.push(v);
        for a in game.incoming(v) {
            key[a.other] = key[a.other].max(a.weight.abs());
        }
    };
    for &p in fixed {
        place(p, &mut order, &mut placed, &mut key);
    }
    while order.len() < n {
        let mut best: Option<usize> = None;
        for k in (0..n).filter(|&k| !placed[k] && key[k] > 0.0) {
            if best.is_none_or(|b| key[k] > key[b]) {
                best = Some(k);
            }
        }
        let k = best.unwrap_or_else(|| {
            (0..n)
                .filter(|&k| !placed[k])
                .max_by_key(|&k| (game.out_degree(k), Reverse(k)))
                .expect("an unplaced player remains")
        });
        place(k, &mut order, &mut placed, &mut key);
    }
    order
}

#[inline]
fn contrib(w: f64, d: Domain) -> (f64, f64) {
    match d {
        Domain::PLUS => (w, w),
        Domain::MINUS => (-w, -w),
        _ => (-w.abs(), w.abs()),
    }
}

enum Undo {
    Dom(usize, Domain),
    Bounds(usize, f64, f64),
}

struct Exhausted;

struct Searcher<'a> {
    g: &'a InfluenceGame,
    order: &'a [usize],
    slack: &'a [f64],
    eps: f64,
    propagate: bool,
    count_only: bool,
    budget: Option<(u64, &'a AtomicU64)>,
    x: Vec<i8>,
    dom: Vec<Domain>,
    /// Bounds on `sum_j w_ji x_j` over the current domains.
    lo: Vec<f64>,
    hi: Vec<f64>,
    trail: Vec<Undo>,
    queue: Vec<usize>,
    queued: Vec<bool>,
    visits: u64,
    found: u64,
    out: Vec<Vec<i8>>,
}

impl<'a> Searcher<'a> {
    fn new(
        g: &'a InfluenceGame,
        order: &'a [usize],
        slack: &'a [f64],
        dom: Vec<Domain>,
        cfg: &SearchConfig,
        budget: Option<(u64, &'a AtomicU64)>,
    ) -> Self {
        let n = g.n();
        let mut lo = vec![0.0; n];
        let mut hi = vec![0.0; n];
        for i in 0..n {
            for a in g.incoming(i) {
                let (l, h) = contrib(a.weight, dom[a.other]);
                lo[i] += l;
                hi[i] += h;
            }
        }
        Searcher {
            g,
            order,
            slack,
            eps: g.tie_epsilon(),
            propagate: cfg.propagate,
            count_only: cfg.count_only,
            budget,
            x: vec![0; n],
            dom,
            lo,
            hi,
            trail: Vec::new(),
            queue: Vec::new(),
            queued: vec![false; n],
            visits: 0,
            found: 0,
            out: Vec::new(),
        }
    }

    fn fork(&self) -> Self {
        Searcher {
            g: self.g,
            order: self.order,
            slack: self.slack,
            eps: self.eps,
            propagate: self.propagate,
            count_only: self.count_only,
            budget: self.budget,
            x: self.x.clone(),
            dom: self.dom.clone(),
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            trail: Vec::new(),
            queue: Vec::new(),
            queued: vec![false; self.x.len()],
            visits: 0,
            found: 0,
            out: Vec::new(),
        }
    }

    fn allowed(&self, i: usize) -> Domain {
        let b = self.g.threshold(i);
        let tol = self.eps + self.slack[i];
        Domain::from_flags(self.lo[i] - b <= tol, self.hi[i] - b >= -tol)
    }

    fn enqueue(&mut self, i: usize) {
        if !self.queued[i] {
            self.queued[i] = true;
            self.queue.push(i);
        }
    }

    fn clear_queue(&mut self) {
        for i in self.queue.drain(..) {
            self.queued[i] = false;
        }
    }

    fn set_domain(&mut self, j: usize, new: Domain) {
        let old = self.dom[j];
        if old == new {
            return;
        }
        self.trail.push(Undo::Dom(j, old));
        self.dom[j] = new;
        for a in self.g.outgoing(j) {
            let i = a.other;
            let (ol, oh) = contrib(a.weight, old);
            let (nl, nh) = contrib(a.weight, new);
            self.trail.push(Undo::Bounds(i, self.lo[i], self.hi[i]));
            self.lo[i] += nl - ol;
            self.hi[i] += nh - oh;
            if self.propagate {
                self.enqueue(i);
            }
        }
    }

    fn restore(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().expect("trail longer than mark") {
                Undo::Dom(j, d) => self.dom[j] = d,
                Undo::Bounds(i, l, h) => {
                    self.lo[i] = l;
                    self.hi[i] = h;
                }
            }
        }
    }

    /// Shrinks domains to a fixpoint. `false` on contradiction.
    fn run_queue(&mut self) -> bool {
        while let Some(i) = self.queue.pop() {
            self.queued[i] = false;
            let nd = self.dom[i].intersect(self.allowed(i));
            if nd.is_empty() {
                self.clear_queue();
                return false;
            }
            self.set_domain(i, nd);
        }
        true
    }

    /// Consistency after assigning `k`.
    fn settle(&mut self, k: usize) -> bool {
        if self.propagate {
            self.enqueue(k);
            return self.run_queue();
        }
        if !self.allowed(k).contains(self.x[k]) {
            return false;
        }
        self.g.outgoing(k).iter().all(|a| self.x[a.other] == 0 || self.allowed(a.other).contains(self.x[a.other]))
    }

    fn visit(&mut self) -> Result<(), Exhausted> {
        self.visits += 1;
        if let Some((max, shared)) = self.budget {
            if shared.fetch_add(1, Ordering::Relaxed) >= max {
                return Err(Exhausted);
            }
        }
        Ok(())
    }

    /// Assigns `k := a`; on inconsistency the assignment is undone.
    fn assign(&mut self, k: usize, a: i8) -> Option<usize> {
        let mark = self.trail.len();
        self.x[k] = a;
        self.set_domain(k, Domain::single(a));
        if self.settle(k) {
            Some(mark)
        } else {
            self.unassign(k, mark);
            None
        }
    }

    fn unassign(&mut self, k: usize, mark: usize) {
        self.restore(mark);
        self.x[k] = 0;
    }

    fn branch_order(&self, k: usize) -> [i8; 2] {
        if self.lo[k] - self.g.threshold(k) > self.eps {
            [1, -1]
        } else {
            [-1, 1]
        }
    }

    fn leaf(&mut self) {
        if self.g.is_psne_raw(&self.x) {
            self.found += 1;
            if !self.count_only {
                self.out.push(self.x.clone());
            }
        }
    }

    fn dfs(&mut self, d: usize) -> Result<(), Exhausted> {
        if d == self.order.len() {
            self.leaf();
            return Ok(());
        }
        let k = self.order[d];
        for a in self.branch_order(k) {
            if !self.dom[k].contains(a) {
                continue;
            }
            self.visit()?;
            if let Some(mark) = self.assign(k, a) {
                self.dfs(d + 1)?;
                self.unassign(k, mark);
            }
        }
        Ok(())
    }

    /// Like `dfs` but stops at depth `limit`, returning forked states there.
    fn expand(&mut self, d: usize, limit: usize, frontier: &mut Vec<(usize, Searcher<'a>)>) -> Result<(), Exhausted> {
        if d == limit || d == self.order.len() {
            frontier.push((d, self.fork()));
            return Ok(());
        }
        let k = self.order[d];
        for a in self.branch_order(k) {
            if !self.dom[k].contains(a) {
                continue;
            }
            self.visit()?;
            if let Some(mark) = self.assign(k, a) {
                self.expand(d + 1, limit, frontier)?;
                self.unassign(k, mark);
            }
        }
        Ok(())
    }
}

fn slack_for(g: &InfluenceGame) -> Vec<f64> {
    (0..g.n())
        .map(|i| {
            let mass: f64 = g.incoming(i).iter().map(|a| a.weight.abs()).sum();
            SLACK * (1.0 + mass + g.threshold(i).abs())
        })
        .collect()
}

fn finish(out: Vec<Vec<i8>>) -> Vec<JointAction> {
    let mut xs: Vec<JointAction> =
        out.into_iter().map(|x| JointAction::new(x).expect("search assigns only -1/+1")).collect();
    xs.sort_unstable();
    xs
}

/// Backtracking search for the PSNE that agree with `partial`.
pub fn search(game: &InfluenceGame, partial: &PartialAssignment, cfg: &SearchConfig) -> Result<SearchOutcome> {
    partial.check_players(game.n())?;
    let start = Instant::now();
    let fixed: Vec<usize> = partial.players().collect();
    let order = search_order(game, &fixed);
    let slack = slack_for(game);
    let counter = AtomicU64::new(0);
    let budget = cfg.max_nodes.map(|m| (m.max(1), &counter));
    let mut root = Searcher::new(game, &order, &slack, vec![Domain::BOTH; game.n()], cfg, budget);

    let mut out = Vec::new();
    let mut found = 0u64;
    let mut visits = 0u64;
    let mut exhausted = false;

    let run = |root: &mut Searcher, out: &mut Vec<Vec<i8>>, found: &mut u64, visits: &mut u64| -> bool {
        let mut consistent = true;
        for (p, a) in partial.iter() {
            if root.visit().is_err() {
                *visits += root.visits;
                return false;
            }
            if root.assign(p, a).is_none() {
                consistent = false;
                break;
            }
        }
        if consistent && cfg.propagate {
            for i in 0..game.n() {
                root.enqueue(i);
            }
            consistent = root.run_queue();
        }
        let mut ok = true;
        if consistent {
            let d0 = partial.len();
            if cfg.parallel && game.n() - d0 > SPLIT_DEPTH + 4 {
                let mut frontier = Vec::new();
                ok = root.expand(d0, d0 + SPLIT_DEPTH, &mut frontier).is_ok();
                if ok {
                    let results: Vec<_> = frontier
                        .into_par_iter()
                        .map(|(d, mut s)| {
                            let r = s.dfs(d);
                            (r.is_ok(), s.out, s.found, s.visits)
                        })
                        .collect();
                    for (r, o, f, v) in results {
                        ok &= r;
                        out.extend(o);
                        *found += f;
                        *visits += v;
                    }
                }
            } else {
                ok = root.dfs(d0).is_ok();
            }
        }
        out.append(&mut root.out);
        *found += root.found;
        *visits += root.visits;
        ok
    };
    if !run(&mut root, &mut out, &mut found, &mut visits) {
        exhausted = true;
    }

    let stats = SearchStats { nodes_visited: visits, psne_found: found, wall_time: start.elapsed() };
    let psne = finish(out);
    if exhausted {
        return Err(Error::BudgetExhausted(Box::new(PartialSearch {
            budget: cfg.max_nodes.unwrap_or(0),
            psne,
            count: found,
            stats,
        })));
    }
    Ok(SearchOutcome { psne, count: found, stats })
}

/// All PSNE in lexicographic order, with search statistics.
///
/// With `count_only` the list is empty and the count is in `stats.psne_found`.
pub fn enumerate_psne(game: &InfluenceGame, cfg: &SearchConfig) -> Result<(Vec<JointAction>, SearchStats)> {
    let o = search(game, &PartialAssignment::new(), cfg)?;
    Ok((o.psne, o.stats))
}

/// Number of PSNE agreeing with `partial`.
pub fn count_psne_extensions(game: &InfluenceGame, partial: &PartialAssignment, cfg: &SearchConfig) -> Result<u64> {
    let cfg = SearchConfig { count_only: true, ..*cfg };
    Ok(search(game, partial, &cfg)?.count)
}

/// Interval propagation to a fixpoint.
///
/// For each player, bounds on its incoming influence over the allowed
/// actions of the others remove `+1` when the upper bound is below
/// `-tie_epsilon` and `-1` when the lower bound is above `tie_epsilon`.
/// Never removes an action used by a PSNE consistent with `domains`.
///
/// # Panics
/// If the domain vector length differs from the player count.
pub fn propagate(game: &InfluenceGame, domains: &DomainVector) -> DomainVector {
    let Some(d) = domains.domains() else {
        return DomainVector::Contradiction;
    };
    assert_eq!(d.len(), game.n(), "domain vector length does not match the game");
    if d.iter().any(|x| x.is_empty()) {
        return DomainVector::Contradiction;
    }
    let order: Vec<usize> = (0..game.n()).collect();
    let slack = slack_for(game);
    let cfg = SearchConfig::default();
    let mut s = Searcher::new(game, &order, &slack, d.to_vec(), &cfg, None);
    for i in 0..game.n() {
        s.enqueue(i);
    }
    if s.run_queue() {
        DomainVector::Domains(s.dom)
    } else {
        DomainVector::Contradiction
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brute::{brute_force_extension_count, brute_force_psne};

    fn ja(v: &[i8]) -> JointAction {
        JointAction::new(v.to_vec()).unwrap()
    }

    fn pair(w: f64) -> InfluenceGame {
        InfluenceGame::new(vec![0.0, 0.0], [(0, 1, w), (1, 0, w)]).unwrap()
    }

    #[test]
    fn small_enumerations() {
        let cfg = SearchConfig::default();
        assert_eq!(enumerate_psne(&pair(1.0), &cfg).unwrap().0, vec![ja(&[-1, -1]), ja(&[1, 1])]);
        assert_eq!(enumerate_psne(&pair(-1.0), &cfg).unwrap().0, vec![ja(&[-1, 1]), ja(&[1, -1])]);
    }

    #[test]
    fn extension_counts() {
        let g = pair(1.0);
        let cfg = SearchConfig::default();
        let one = PartialAssignment::from_pairs([(0, 1)]).unwrap();
        assert_eq!(count_psne_extensions(&g, &one, &cfg).unwrap(), 1);
        assert_eq!(count_psne_extensions(&g, &PartialAssignment::new(), &cfg).unwrap(), 2);
        let full = PartialAssignment::from_pairs([(0, 1), (1, 1)]).unwrap();
        assert_eq!(count_psne_extensions(&g, &full, &cfg).unwrap(), 1);
        assert_eq!(brute_force_extension_count(&g, &full, None).unwrap(), 1);
    }

    #[test]
    fn propagation_examples() {
        let chain = InfluenceGame::new(vec![0.0, 1.0], [(0, 1, 5.0)]).unwrap();
        let d = DomainVector::Domains(vec![Domain::PLUS, Domain::BOTH]);
        assert_eq!(propagate(&chain, &d).domains().unwrap()[1], Domain::PLUS);

        let zero = InfluenceGame::new(vec![0.0; 3], []).unwrap();
        assert_eq!(propagate(&zero, &DomainVector::full(3)), DomainVector::full(3));

        let neg = InfluenceGame::new(vec![0.0, -1.0], [(0, 1, 5.0)]).unwrap();
        let d = DomainVector::Domains(vec![Domain::MINUS, Domain::BOTH]);
        assert_eq!(propagate(&neg, &d).domains().unwrap()[1], Domain::MINUS);

        let sure = InfluenceGame::new(vec![1.0], []).unwrap();
        let d = DomainVector::Domains(vec![Domain::PLUS]);
        assert!(propagate(&sure, &d).is_contradiction());
    }

    #[test]
    fn budget_reports_partial_results() {
        let g = InfluenceGame::new(vec![0.0; 12], []).unwrap();
        let cfg = SearchConfig::default().with_budget(20);
        match enumerate_psne(&g, &cfg) {
            Err(Error::BudgetExhausted(p)) => {
                assert_eq!(p.budget, 20);
                assert!(p.stats.nodes_visited >= 20);
                assert_eq!(p.psne.len() as u64, p.count);
            }
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn parallel_matches_serial() {
        let n = 14;
        let arcs: Vec<_> = (0..n).flat_map(|i| [((i + 1) % n, i, 1.0), ((i + 3) % n, i, -0.5)]).collect();
        let g = InfluenceGame::new(vec![0.1; n], arcs).unwrap();
        let serial = enumerate_psne(&g, &SearchConfig::default()).unwrap();
        let par = enumerate_psne(&g, &SearchConfig::default().with_parallel(true)).unwrap();
        assert_eq!(serial.0, par.0);
        assert_eq!(serial.0, brute_force_psne(&g, None).unwrap());
        assert_eq!(serial.1.nodes_visited, par.1.nodes_visited);
    }

    #[test]
    fn first_node_has_max_outdegree() {
        let g = InfluenceGame::new(vec![0.0; 4], [(2, 0, 1.0), (2, 1, 1.0), (0, 3, 3.0)]).unwrap();
        let order = search_order(&g, &[]);
        assert_eq!(order[0], 2);
        assert_eq!(order.len(), 4);
    }
}
