//! Most-influential node sets.
//!
//! A set `S` with prescribed actions `x*_S` is feasible when exactly one PSNE
//! agrees with `x*` on `S`, for some `x*` among the goal-optimal PSNE. Among
//! feasible sets the preferred ones maximize the set-preference `h`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::brute::plus_mask;
use crate::error::{Error, Result};
use crate::game::{InfluenceGame, JointAction, PartialAssignment};
use crate::solvers::{count_psne_extensions, SearchConfig};

/// Relative tolerance when comparing goal or preference values.
pub const VALUE_RTOL: f64 = 1e-9;

/// Default cap on the players for [`exact_most_influential`].
pub const DEFAULT_EXACT_CAP: usize = 25;

/// Default number of tied partial selections kept per greedy round when exploring.
pub const DEFAULT_TIE_WIDTH: usize = 64;

fn near_max(v: f64, max: f64) -> bool {
    v >= max - VALUE_RTOL * max.abs().max(1.0)
}

/// The PSNE of a game as hyperedges over `(player, action)` nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameHypergraph {
    num_players: usize,
    hyperedges: Vec<JointAction>,
    goal_index: usize,
}

impl GameHypergraph {
    /// `goal` must be one of the `psne`; duplicates are merged.
    pub fn new(mut psne: Vec<JointAction>, goal: &JointAction) -> Result<Self> {
        psne.sort();
        psne.dedup();
        let goal_index = psne
            .binary_search(goal)
            .map_err(|_| Error::InvalidInput(format!("goal {goal:?} is not a PSNE of the game")))?;
        Ok(GameHypergraph { num_players: goal.len(), hyperedges: psne, goal_index })
    }

    pub fn num_players(&self) -> usize {
        self.num_players
    }

    pub fn hyperedges(&self) -> &[JointAction] {
        &self.hyperedges
    }

    pub fn goal(&self) -> &JointAction {
        &self.hyperedges[self.goal_index]
    }

    pub fn goal_index(&self) -> usize {
        self.goal_index
    }

    /// Hyperedges containing every node of `partial`.
    pub fn degree(&self, partial: &PartialAssignment) -> u64 {
        self.hyperedges.iter().filter(|x| partial.agrees(x)).count() as u64
    }
}

/// Counts the PSNE consistent with a partial assignment.
pub trait ExtensionCounter: Sync {
    fn count(&self, partial: &PartialAssignment) -> Result<u64>;
}

impl ExtensionCounter for GameHypergraph {
    fn count(&self, partial: &PartialAssignment) -> Result<u64> {
        Ok(self.degree(partial))
    }
}

/// Counts by filtering an explicit PSNE list.
pub struct PsneListCounter<'a>(pub &'a [JointAction]);

impl ExtensionCounter for PsneListCounter<'_> {
    fn count(&self, partial: &PartialAssignment) -> Result<u64> {
        Ok(self.0.iter().filter(|x| partial.agrees(x)).count() as u64)
    }
}

/// Counts by running the backtracking search on each query.
pub struct SearchCounter<'a> {
    pub game: &'a InfluenceGame,
    pub config: SearchConfig,
}

impl ExtensionCounter for SearchCounter<'_> {
    fn count(&self, partial: &PartialAssignment) -> Result<u64> {
        count_psne_extensions(self.game, partial, &self.config)
    }
}

/// The goal function `g(x, S)`.
#[derive(Clone, Debug, PartialEq)]
pub enum GoalSpec {
    /// `g = 1[x = x*]`.
    TargetPsne(JointAction),
    /// `g = sum_i x_i`.
    MaxAdopters,
    /// `g = sum_{i in S} t_i x_i - sum_{i not in S} t_i x_i`.
    WeightedAdopters(Vec<f64>),
}

impl GoalSpec {
    pub fn value(&self, x: &JointAction, in_set: &[bool]) -> f64 {
        match self {
            GoalSpec::TargetPsne(t) => f64::from(u8::from(x == t)),
            GoalSpec::MaxAdopters => x.as_slice().iter().map(|&a| a as f64).sum(),
            GoalSpec::WeightedAdopters(t) => x
                .as_slice()
                .iter()
                .zip(t)
                .zip(in_set)
                .map(|((&a, &ti), &s)| if s { ti * a as f64 } else { -ti * a as f64 })
                .sum(),
        }
    }

    fn depends_on_set(&self) -> bool {
        matches!(self, GoalSpec::WeightedAdopters(_))
    }

    fn check(&self, n: usize) -> Result<()> {
        match self {
            GoalSpec::TargetPsne(t) if t.len() != n => Err(Error::LengthMismatch { expected: n, got: t.len() }),
            GoalSpec::WeightedAdopters(t) if t.len() != n => Err(Error::LengthMismatch { expected: n, got: t.len() }),
            _ => Ok(()),
        }
    }
}

/// The set-preference function `h(S)`; larger is preferred.
#[derive(Clone, Debug, PartialEq)]
pub enum SetPreference {
    /// `h(S) = -|S|`.
    MinCardinality,
    /// `h(S) = sum_{i in S} v_i - sum_{i not in S} v_i`.
    WeightedNodes(Vec<f64>),
}

impl SetPreference {
    pub fn value(&self, set: &[usize], n: usize) -> f64 {
        match self {
            SetPreference::MinCardinality => -(set.len() as f64),
            SetPreference::WeightedNodes(v) => {
                let total: f64 = v.iter().sum();
                2.0 * set.iter().map(|&i| v[i]).sum::<f64>() - total
            }
        }
        .max(-(n as f64) * f64::MAX.sqrt())
    }

    /// Per-node weight used to break greedy ties (higher first).
    fn node_weight(&self, i: usize) -> f64 {
        match self {
            SetPreference::MinCardinality => 0.0,
            SetPreference::WeightedNodes(v) => v[i],
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        match self {
            SetPreference::WeightedNodes(v) if v.len() != n => Err(Error::LengthMismatch { expected: n, got: v.len() }),
            _ => Ok(()),
        }
    }
}

fn membership(n: usize, set: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &i in set {
        m[i] = true;
    }
    m
}

/// All maximizers of `g(., S)` over `psne`, in input order.
pub fn optimal_psne_set(psne: &[JointAction], goal: &GoalSpec, set: &[usize]) -> Result<Vec<JointAction>> {
    let Some(first) = psne.first() else {
        return Err(Error::InvalidInput("the PSNE list is empty".into()));
    };
    let n = first.len();
    goal.check(n)?;
    let in_set = membership(n, set);
    let vals: Vec<f64> = psne.iter().map(|x| goal.value(x, &in_set)).collect();
    let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(psne.iter().zip(&vals).filter(|(_, &v)| near_max(v, max)).map(|(x, _)| x.clone()).collect())
}

/// Players eligible for selection.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CandidatePositions {
    /// Every player, prescribed its goal action.
    #[default]
    All,
    /// Only players that play `+1` in the goal.
    Adopters,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GreedyConfig {
    pub candidates: CandidatePositions,
    /// Also record every tied alternative as an option DAG.
    pub explore_ties: bool,
    pub tie_width: usize,
}

impl Default for GreedyConfig {
    fn default() -> Self {
        GreedyConfig { candidates: CandidatePositions::All, explore_ties: false, tie_width: DEFAULT_TIE_WIDTH }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GreedyRound {
    /// `(player, consistent PSNE after adding it)` for every candidate.
    pub candidate_counts: Vec<(usize, u64)>,
    pub chosen: usize,
}

/// Tied selections explored round by round. Node 0 is the empty set.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OptionDag {
    pub nodes: Vec<DagNode>,
    /// `(from, to, player added)`.
    pub edges: Vec<(usize, usize, usize)>,
    /// True when some round had more tied states than the width cap.
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DagNode {
    pub set: Vec<usize>,
    pub consistent: u64,
}

impl OptionDag {
    /// Sets at which exactly one PSNE remains.
    pub fn solutions(&self) -> Vec<Vec<usize>> {
        self.nodes.iter().filter(|d| d.consistent == 1).map(|d| d.set.clone()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GreedyResult {
    /// In selection order.
    pub selected: Vec<usize>,
    pub actions: Vec<i8>,
    pub goal: JointAction,
    pub consistent_psne: u64,
    pub rounds: Vec<GreedyRound>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub option_dag: Option<OptionDag>,
}

fn candidates_for(goal: &JointAction, kind: CandidatePositions) -> Vec<usize> {
    (0..goal.len()).filter(|&i| kind == CandidatePositions::All || goal.get(i) > 0).collect()
}

/// Restricting to the candidate positions must already isolate `goal`.
fn is_dominated(goal: &JointAction, candidates: &[usize], counter: &dyn ExtensionCounter) -> Result<bool> {
    let all = PartialAssignment::restrict(goal, candidates)?;
    Ok(counter.count(&all)? > 1)
}

fn extend(partial: &PartialAssignment, i: usize, goal: &JointAction) -> PartialAssignment {
    let mut p = partial.clone();
    p.assign(i, goal.get(i)).expect("candidate not yet selected");
    p
}

/// Candidate counts after adding each unselected candidate, in candidate order.
fn round_counts(
    partial: &PartialAssignment,
    selected: &[bool],
    candidates: &[usize],
    goal: &JointAction,
    counter: &dyn ExtensionCounter,
) -> Result<Vec<(usize, u64)>> {
    candidates
        .par_iter()
        .filter(|&&i| !selected[i])
        .map(|&i| Ok((i, counter.count(&extend(partial, i, goal))?)))
        .collect()
}

/// The best candidates of a round: least count, then highest preference weight.
fn tied_best(counts: &[(usize, u64)], pref: &SetPreference) -> Vec<usize> {
    let Some(min) = counts.iter().map(|&(_, c)| c).min() else {
        return Vec::new();
    };
    let at_min: Vec<usize> = counts.iter().filter(|&&(_, c)| c == min).map(|&(i, _)| i).collect();
    let best_w = at_min.iter().map(|&i| pref.node_weight(i)).fold(f64::NEG_INFINITY, f64::max);
    at_min.into_iter().filter(|&i| near_max(pref.node_weight(i), best_w)).collect()
}

/// Greedy selection over the game hypergraph.
///
/// Each round adds the candidate leaving the fewest consistent PSNE (ties:
/// higher preference weight, then lowest index) until only the goal remains.
/// For goals that depend on `S`, the goal PSNE is fixed from `S = {}`; the
/// first optimal PSNE that is not dominated on the candidate positions is used.
pub fn greedy_most_influential(
    game: &InfluenceGame,
    psne: &[JointAction],
    goal: &GoalSpec,
    pref: &SetPreference,
    counter: &dyn ExtensionCounter,
    cfg: &GreedyConfig,
) -> Result<GreedyResult> {
    let n = game.n();
    goal.check(n)?;
    pref.check(n)?;
    if let GoalSpec::TargetPsne(t) = goal {
        if !psne.contains(t) || !game.is_psne(t) {
            return Err(Error::InvalidInput(format!("goal {t:?} is not a PSNE of the game")));
        }
    }
    let optima = optimal_psne_set(psne, goal, &[])?;
    let mut target = None;
    for x in &optima {
        let cands = candidates_for(x, cfg.candidates);
        if !is_dominated(x, &cands, counter)? {
            target = Some((x.clone(), cands));
            break;
        }
    }
    let Some((x_star, cands)) = target else {
        return Err(Error::Infeasible(
            "every goal-optimal PSNE is dominated on the candidate positions; uniqueness is unreachable".into(),
        ));
    };

    let mut partial = PartialAssignment::new();
    let mut selected = vec![false; n];
    let mut order = Vec::new();
    let mut rounds = Vec::new();
    let mut current = counter.count(&partial)?;
    while current > 1 {
        let counts = round_counts(&partial, &selected, &cands, &x_star, counter)?;
        let best = tied_best(&counts, pref);
        let &chosen = best.first().expect("a non-dominated goal always has a candidate left");
        let after = counts.iter().find(|&&(i, _)| i == chosen).expect("chosen was counted").1;
        debug_assert!(after < current, "greedy pick did not shrink the consistent set");
        rounds.push(GreedyRound { candidate_counts: counts, chosen });
        partial = extend(&partial, chosen, &x_star);
        selected[chosen] = true;
        order.push(chosen);
        current = after;
    }
    let option_dag =
        if cfg.explore_ties { Some(explore(&cands, &x_star, pref, counter, cfg.tie_width)?) } else { None };
    Ok(GreedyResult {
        actions: order.iter().map(|&i| x_star.get(i)).collect(),
        selected: order,
        goal: x_star,
        consistent_psne: current,
        rounds,
        option_dag,
    })
}

fn explore(
    cands: &[usize],
    goal: &JointAction,
    pref: &SetPreference,
    counter: &dyn ExtensionCounter,
    width: usize,
) -> Result<OptionDag> {
    let n = goal.len();
    let mut dag = OptionDag::default();
    let root = counter.count(&PartialAssignment::new())?;
    dag.nodes.push(DagNode { set: Vec::new(), consistent: root });
    let mut frontier: Vec<usize> = if root > 1 { vec![0] } else { Vec::new() };
    while !frontier.is_empty() {
        let mut next: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let mut new_edges = Vec::new();
        for &id in &frontier {
            let set = dag.nodes[id].set.clone();
            let partial = PartialAssignment::restrict(goal, &set)?;
            let selected = membership(n, &set);
            let counts = round_counts(&partial, &selected, cands, goal, counter)?;
            for i in tied_best(&counts, pref) {
                let mut child = set.clone();
                child.push(i);
                child.sort_unstable();
                let c = counts.iter().find(|&&(k, _)| k == i).expect("counted").1;
                let len = next.len();
                let child_id = match next.get(&child) {
                    Some(&cid) => cid,
                    None => {
                        if len >= width {
                            dag.truncated = true;
                            continue;
                        }
                        let cid = dag.nodes.len();
                        dag.nodes.push(DagNode { set: child.clone(), consistent: c });
                        next.insert(child, cid);
                        cid
                    }
                };
                new_edges.push((id, child_id, i));
            }
        }
        dag.edges.extend(new_edges);
        frontier = next.values().copied().filter(|&id| dag.nodes[id].consistent > 1).collect();
        frontier.sort_unstable();
    }
    Ok(dag)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactResult {
    /// The first optimal set in sweep order.
    pub best: Vec<usize>,
    /// The goal PSNE the best set isolates.
    pub goal: JointAction,
    /// Every optimal set, each sorted, in sweep order.
    pub all_optimal: Vec<Vec<usize>>,
}

/// Subsets of `0..n` with `k` members as bitmasks, in lexicographic order of
/// their sorted member lists.
pub(crate) fn k_subsets(n: usize, k: usize, mut f: impl FnMut(u64) -> bool) {
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let mask = idx.iter().fold(0u64, |m, &i| m | 1 << i);
        if !f(mask) {
            return;
        }
        // advance to the next combination
        let mut p = k;
        loop {
            if p == 0 {
                return;
            }
            p -= 1;
            if idx[p] < n - k + p {
                break;
            }
            if p == 0 {
                return;
            }
        }
        if idx[p] >= n - k + p {
            return;
        }
        idx[p] += 1;
        for q in p + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

pub(crate) fn members(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Reference solver: sweeps subsets and returns `h`-optimal feasible sets.
///
/// `MinCardinality` sweeps by increasing size and stops at the first size
/// with a feasible set. `WeightedNodes` sweeps all `2^n` subsets.
pub fn exact_most_influential(
    game: &InfluenceGame,
    psne: &[JointAction],
    goal: &GoalSpec,
    pref: &SetPreference,
    cap: Option<usize>,
) -> Result<ExactResult> {
    let n = game.n();
    let cap = cap.unwrap_or(DEFAULT_EXACT_CAP).min(62);
    goal.check(n)?;
    pref.check(n)?;
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    if psne.is_empty() {
        return Err(Error::InvalidInput("the PSNE list is empty".into()));
    }
    if let GoalSpec::TargetPsne(t) = goal {
        if !psne.contains(t) {
            return Err(Error::InvalidInput(format!("goal {t:?} is not a PSNE of the game")));
        }
    }
    let masks: Vec<u64> = psne.iter().map(plus_mask).collect();
    let fixed_optima: Option<Vec<usize>> = if goal.depends_on_set() {
        None
    } else {
        let opt = optimal_psne_set(psne, goal, &[])?;
        Some(psne.iter().enumerate().filter(|(_, x)| opt.contains(x)).map(|(k, _)| k).collect())
    };
    // returns the index of an isolated goal PSNE, if any
    let feasible = |s: u64| -> Option<usize> {
        let optima: Vec<usize> = match &fixed_optima {
            Some(o) => o.clone(),
            None => {
                let set = members(s, n);
                let opt = optimal_psne_set(psne, goal, &set).expect("nonempty list");
                psne.iter().enumerate().filter(|(_, x)| opt.contains(x)).map(|(k, _)| k).collect()
            }
        };
        optima.into_iter().find(|&g| {
            let gm = masks[g];
            masks.iter().enumerate().all(|(k, &m)| k == g || (m ^ gm) & s != 0)
        })
    };

    let mut found: Vec<(u64, usize)> = Vec::new();
    match pref {
        SetPreference::MinCardinality => {
            for k in 0..=n {
                k_subsets(n, k, |s| {
                    if let Some(g) = feasible(s) {
                        found.push((s, g));
                    }
                    true
                });
                if !found.is_empty() {
                    break;
                }
            }
        }
        SetPreference::WeightedNodes(_) => {
            let mut best = f64::NEG_INFINITY;
            for k in 0..=n {
                k_subsets(n, k, |s| {
                    if let Some(g) = feasible(s) {
                        let h = pref.value(&members(s, n), n);
                        if h > best && !near_max(best, h) {
                            best = h;
                            found.retain(|&(t, _)| near_max(pref.value(&members(t, n), n), h));
                        }
                        if near_max(h, best) {
                            found.push((s, g));
                        }
                    }
                    true
                });
            }
        }
    }
    let Some(&(s, g)) = found.first() else {
        return Err(Error::Infeasible("no subset isolates a goal-optimal PSNE".into()));
    };
    Ok(ExactResult {
        best: members(s, n),
        goal: psne[g].clone(),
        all_optimal: found.iter().map(|&(s, _)| members(s, n)).collect(),
    })
}

/// Whether exactly one PSNE in `psne` agrees with `goal` on `set`.
pub fn isolates(psne: &[JointAction], goal: &JointAction, set: &[usize]) -> bool {
    psne.iter().filter(|x| set.iter().all(|&i| x.get(i) == goal.get(i))).count() == 1
}

/// The hitting-set view: ground set = the goal edge's nodes, one edge for
/// the whole goal edge and one per other PSNE `e`: `{(i, x*_i) : e_i != x*_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HittingSetInstance {
    pub ground: Vec<(usize, i8)>,
    pub edges: Vec<Vec<(usize, i8)>>,
}

impl HittingSetInstance {
    /// Whether the goal-edge nodes of `players` meet every edge.
    pub fn is_hit_by(&self, players: &[usize]) -> bool {
        self.edges.iter().all(|e| e.iter().any(|(i, _)| players.contains(i)))
    }
}

pub fn hitting_set_instance(hg: &GameHypergraph) -> HittingSetInstance {
    let goal = hg.goal();
    let ground: Vec<(usize, i8)> = (0..goal.len()).map(|i| (i, goal.get(i))).collect();
    let mut edges = vec![ground.clone()];
    for (k, e) in hg.hyperedges().iter().enumerate() {
        if k == hg.goal_index() {
            continue;
        }
        edges.push(ground.iter().copied().filter(|&(i, a)| e.get(i) != a).collect());
    }
    HittingSetInstance { ground, edges }
}
