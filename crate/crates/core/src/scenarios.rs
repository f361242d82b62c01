//! Coalition analyses over PSNE sets, and the diffusion heuristics they are
//! compared against.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{InfluenceGame, JointAction};
use crate::influence::{k_subsets, members};

/// Default cap on the number of subsets one `k` of [`diffusion_filibuster`] may sweep.
pub const DEFAULT_SUBSET_CAP: u64 = 5_000_000;

/// Largest game the exact coalition sweep accepts.
pub const EXACT_COALITION_CAP: usize = 25;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClotureSpec {
    pub quota: usize,
    /// Players whose strict majority must play `+1`.
    pub party: Option<Vec<usize>>,
}

impl ClotureSpec {
    /// A quota above `n` is accepted and simply matches nothing.
    pub fn new(quota: usize, party: Option<Vec<usize>>, n: usize) -> Result<Self> {
        if quota == 0 {
            return Err(Error::InvalidInput("the quota must be at least 1".into()));
        }
        if let Some(p) = &party {
            if let Some(&i) = p.iter().find(|&&i| i >= n) {
                return Err(Error::PlayerOutOfRange { index: i, n });
            }
        }
        Ok(ClotureSpec { quota, party })
    }

    pub fn satisfied_by(&self, x: &JointAction) -> bool {
        if x.count_plus() < self.quota {
            return false;
        }
        match &self.party {
            None => true,
            Some(p) => 2 * p.iter().filter(|&&i| x.get(i) > 0).count() > p.len(),
        }
    }
}

/// The PSNE meeting the quota (and party majority).
pub fn stable_cloture_set(psne: &[JointAction], spec: &ClotureSpec) -> Vec<JointAction> {
    psne.iter().filter(|x| spec.satisfied_by(x)).cloned().collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoalitionResult {
    /// Sorted.
    pub players: Vec<usize>,
    /// The action every member is forced to.
    pub action: i8,
    /// PSNE with every member at `action`.
    pub cover: Vec<JointAction>,
    pub target_size: usize,
    /// Greedy rounds: `(candidate, extensions outside the target)`.
    pub rounds: Vec<Vec<(usize, usize)>>,
}

fn extensions<'a>(psne: &'a [JointAction], set: &[usize], a: i8) -> impl Iterator<Item = usize> + 'a {
    let set = set.to_vec();
    psne.iter().enumerate().filter(move |(_, x)| set.iter().all(|&i| x.get(i) == a)).map(|(k, _)| k)
}

fn feasible(psne: &[JointAction], target: &[bool], set: &[usize], a: i8) -> bool {
    let mut any = false;
    for k in extensions(psne, set, a) {
        if !target[k] {
            return false;
        }
        any = true;
    }
    any
}

/// Minimal `V` with `P(V) = {x : x_i = a for i in V}` nonempty and inside the target.
fn coalition(
    game: &InfluenceGame,
    psne: &[JointAction],
    target_set: &[JointAction],
    a: i8,
    exact: bool,
) -> Result<CoalitionResult> {
    let n = game.n();
    if let Some(x) = psne.iter().find(|x| x.len() != n || !game.is_psne(x)) {
        return Err(Error::InvalidInput(format!("{x:?} is not a PSNE of the game")));
    }
    if psne.is_empty() {
        return Err(Error::Infeasible("there are no PSNE".into()));
    }
    let target: Vec<bool> = psne.iter().map(|x| target_set.contains(x)).collect();
    if let Some(x) = target_set.iter().find(|x| !psne.contains(x)) {
        return Err(Error::InvalidInput(format!("target {x:?} is not among the PSNE")));
    }
    if !target.contains(&true) {
        return Err(Error::Infeasible("the target set is empty".into()));
    }
    // an undominated target x isolates the target once all of its `a` positions are fixed
    let positions = |x: &JointAction| -> Vec<usize> { (0..n).filter(|&i| x.get(i) == a).collect() };
    let good: Vec<usize> =
        (0..psne.len()).filter(|&k| target[k] && feasible(psne, &target, &positions(&psne[k]), a)).collect();
    if good.is_empty() {
        return Err(Error::Infeasible("every target PSNE is dominated by a PSNE outside the target".into()));
    }

    let mut rounds = Vec::new();
    let players = if exact {
        exact_coalition(psne, &target, n, a)?
    } else {
        let mut v: Vec<usize> = Vec::new();
        let mut order: Vec<usize> = Vec::new();
        while !feasible(psne, &target, &v, a) {
            let mut scores = Vec::new();
            let mut best: Option<(usize, usize, usize)> = None;
            for i in (0..n).filter(|i| !v.contains(i)) {
                let mut w = v.clone();
                w.push(i);
                if !good.iter().any(|&k| w.iter().all(|&p| psne[k].get(p) == a)) {
                    continue;
                }
                let (mut outside, mut inside) = (0usize, 0usize);
                for k in extensions(psne, &w, a) {
                    if target[k] {
                        inside += 1;
                    } else {
                        outside += 1;
                    }
                }
                scores.push((i, outside));
                if best.is_none_or(|(_, o, ins)| outside < o || (outside == o && inside > ins)) {
                    best = Some((i, outside, inside));
                }
            }
            let (i, _, _) = best.expect("an undominated target always leaves a useful candidate");
            rounds.push(scores);
            v.push(i);
            order.push(i);
        }
        // drop-one pass, latest picks first
        loop {
            let before = order.len();
            for k in (0..order.len()).rev() {
                let mut rest = order.clone();
                rest.remove(k);
                if feasible(psne, &target, &rest, a) {
                    order = rest;
                    break;
                }
            }
            if order.len() == before {
                break;
            }
        }
        order.sort_unstable();
        order
    };
    let cover: Vec<JointAction> = extensions(psne, &players, a).map(|k| psne[k].clone()).collect();
    Ok(CoalitionResult { players, action: a, cover, target_size: target_set.len(), rounds })
}

fn exact_coalition(psne: &[JointAction], target: &[bool], n: usize, a: i8) -> Result<Vec<usize>> {
    if n > EXACT_COALITION_CAP {
        return Err(Error::CapExceeded { n, cap: EXACT_COALITION_CAP });
    }
    for k in 0..=n {
        let mut best: Option<(usize, u64)> = None;
        k_subsets(n, k, |s| {
            let set = members(s, n);
            if feasible(psne, target, &set, a) {
                let size = extensions(psne, &set, a).count();
                if best.is_none_or(|(b, _)| size > b) {
                    best = Some((size, s));
                }
            }
            true
        });
        if let Some((_, s)) = best {
            return Ok(members(s, n));
        }
    }
    unreachable!("feasibility was established before the sweep")
}

/// Players to force to `+1` so that every remaining PSNE is in `cloture`.
pub fn filibuster_breakers(
    game: &InfluenceGame,
    psne: &[JointAction],
    cloture: &[JointAction],
    exact: bool,
) -> Result<CoalitionResult> {
    coalition(game, psne, cloture, 1, exact)
}

/// Players to force to `-1` so that no remaining PSNE is in `cloture`.
pub fn cloture_preventers(
    game: &InfluenceGame,
    psne: &[JointAction],
    cloture: &[JointAction],
    exact: bool,
) -> Result<CoalitionResult> {
    let rest: Vec<JointAction> = psne.iter().filter(|x| !cloture.contains(x)).cloned().collect();
    coalition(game, psne, &rest, -1, exact)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum DynamicsKind {
    FixedPoint { state: JointAction, rounds: usize },
    Cycle { period: usize, first_repeat_round: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DynamicsOutcome {
    pub kind: DynamicsKind,
    /// Fixed point that is a PSNE, forced players included.
    pub stable: bool,
}

impl DynamicsOutcome {
    pub fn fixed_point(&self) -> Option<&JointAction> {
        match &self.kind {
            DynamicsKind::FixedPoint { state, .. } => Some(state),
            DynamicsKind::Cycle { .. } => None,
        }
    }
}

/// Synchronous best-response dynamics with some players held fixed.
///
/// Indifferent players keep their action. `max_rounds` defaults to `4n`.
pub fn best_response_dynamics(
    game: &InfluenceGame,
    forced: &BTreeMap<usize, i8>,
    init: &JointAction,
    max_rounds: Option<usize>,
) -> Result<DynamicsOutcome> {
    let n = game.n();
    if init.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: init.len() });
    }
    for (&i, &a) in forced {
        if i >= n {
            return Err(Error::PlayerOutOfRange { index: i, n });
        }
        if init.get(i) != a {
            return Err(Error::InvalidInput(format!("player {i} is forced to {a} but starts at {}", init.get(i))));
        }
    }
    let max_rounds = max_rounds.unwrap_or(4 * n);
    let mut is_forced = vec![false; n];
    for &i in forced.keys() {
        is_forced[i] = true;
    }
    let mut x = init.as_slice().to_vec();
    let mut seen: HashMap<Vec<i8>, usize> = HashMap::from([(x.clone(), 0)]);
    for round in 0..max_rounds {
        let next: Vec<i8> = (0..n)
            .map(|i| {
                if is_forced[i] {
                    return x[i];
                }
                let d = game.response_to(game.influence_raw(i, &x));
                if d.contains(x[i]) {
                    x[i]
                } else {
                    d.singleton().expect("a nonempty response excludes the current action")
                }
            })
            .collect();
        if next == x {
            let state = JointAction::new(x).expect("valid actions");
            let stable = game.is_psne(&state);
            return Ok(DynamicsOutcome { kind: DynamicsKind::FixedPoint { state, rounds: round }, stable });
        }
        if let Some(&q) = seen.get(&next) {
            return Ok(DynamicsOutcome {
                kind: DynamicsKind::Cycle { period: round + 1 - q, first_repeat_round: round + 1 },
                stable: false,
            });
        }
        seen.insert(next.clone(), round + 1);
        x = next;
    }
    Err(Error::RoundLimit(max_rounds))
}

fn forced_state(base: &JointAction, set: &[usize], a: i8) -> (BTreeMap<usize, i8>, JointAction) {
    let forced: BTreeMap<usize, i8> = set.iter().map(|&i| (i, a)).collect();
    let mut init = base.as_slice().to_vec();
    for &i in set {
        init[i] = a;
    }
    (forced, JointAction::new(init).expect("valid actions"))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiffusionResult {
    /// In selection order, after the drop-one pass.
    pub selected: Vec<usize>,
    /// Per greedy round: `(candidate, +1 count at the fixed point)`; `None` for a cycle.
    pub rounds: Vec<Vec<(usize, Option<usize>)>>,
}

/// Greedy maximum-spread selection under forced best-response dynamics.
pub fn diffusion_most_influential(game: &InfluenceGame, max_rounds: Option<usize>) -> Result<DiffusionResult> {
    let n = game.n();
    let start = JointAction::uniform(n, -1);
    let spread = |set: &[usize], from: &JointAction| -> Result<Option<JointAction>> {
        let (forced, init) = forced_state(from, set, 1);
        Ok(best_response_dynamics(game, &forced, &init, max_rounds)?.fixed_point().cloned())
    };
    let mut state = spread(&[], &start)?.unwrap_or_else(|| start.clone());
    let mut selected: Vec<usize> = Vec::new();
    let mut rounds = Vec::new();
    while state.count_plus() < n {
        let cands: Vec<usize> = (0..n).filter(|i| !selected.contains(i)).collect();
        let scored: Vec<(usize, Option<JointAction>)> = cands
            .par_iter()
            .map(|&i| {
                let mut set = selected.clone();
                set.push(i);
                Ok((i, spread(&set, &state)?))
            })
            .collect::<Result<_>>()?;
        rounds.push(scored.iter().map(|(i, s)| (*i, s.as_ref().map(JointAction::count_plus))).collect());
        let best = scored
            .into_iter()
            .filter_map(|(i, s)| s.map(|s| (i, s)))
            .max_by_key(|(i, s)| (s.count_plus(), std::cmp::Reverse(*i)));
        let Some((i, s)) = best else {
            return Err(Error::Infeasible(format!(
                "every candidate cycles; best spread so far is {} of {n}",
                state.count_plus()
            )));
        };
        selected.push(i);
        state = s;
    }
    // drop-one pass from a fresh start, latest picks first
    let mut k = selected.len();
    while k > 0 {
        k -= 1;
        let mut rest = selected.clone();
        rest.remove(k);
        if spread(&rest, &start)?.is_some_and(|s| s.count_plus() == n) {
            selected = rest;
        }
    }
    Ok(DiffusionResult { selected, rounds })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiffusionHit {
    pub set: Vec<usize>,
    pub outcome: DynamicsOutcome,
}

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
        if c > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    c as u64
}

/// Forces each `k`-subset to `+1` from all `-1` and records fixed points
/// meeting the quota, for `k = 1, 2, ...` up to the first `k` with a stable hit.
pub fn diffusion_filibuster(
    game: &InfluenceGame,
    spec: &ClotureSpec,
    k_max: usize,
    subset_cap: Option<u64>,
) -> Result<Vec<DiffusionHit>> {
    if k_max == 0 {
        return Err(Error::InvalidInput("k_max must be at least 1".into()));
    }
    let n = game.n();
    if n > 62 {
        return Err(Error::CapExceeded { n, cap: 62 });
    }
    let cap = subset_cap.unwrap_or(DEFAULT_SUBSET_CAP);
    let start = JointAction::uniform(n, -1);
    let mut hits = Vec::new();
    for k in 1..=k_max.min(n) {
        if binomial(n, k) > cap {
            return Err(Error::InvalidInput(format!("{n} choose {k} subsets exceeds the cap of {cap}")));
        }
        let mut masks = Vec::new();
        k_subsets(n, k, |s| {
            masks.push(s);
            true
        });
        let found: Vec<Option<DiffusionHit>> = masks
            .par_iter()
            .map(|&s| {
                let set = members(s, n);
                let (forced, init) = forced_state(&start, &set, 1);
                let outcome = best_response_dynamics(game, &forced, &init, None)?;
                let meets = outcome.fixed_point().is_some_and(|x| spec.satisfied_by(x));
                Ok(meets.then_some(DiffusionHit { set, outcome }))
            })
            .collect::<Result<_>>()?;
        hits.extend(found.into_iter().flatten());
        if hits.iter().any(|h| h.outcome.stable) {
            break;
        }
    }
    Ok(hits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ja(v: &[i8]) -> JointAction {
        JointAction::new(v.to_vec()).unwrap()
    }

    fn pair(w: f64) -> InfluenceGame {
        InfluenceGame::new(vec![0.0, 0.0], [(0, 1, w), (1, 0, w)]).unwrap()
    }

    #[test]
    fn cloture_filter() {
        let s = ClotureSpec::new(3, None, 5).unwrap();
        assert!(s.satisfied_by(&JointAction::uniform(5, 1)));
        assert!(!s.satisfied_by(&ja(&[1, 1, -1, -1, -1])));
        let p = ClotureSpec::new(1, Some(vec![1, 2, 3]), 5).unwrap();
        assert!(!p.satisfied_by(&ja(&[1, 1, -1, -1, 1])));
        assert!(ClotureSpec::new(0, None, 5).is_err());
    }

    #[test]
    fn breakers_and_preventers() {
        let g = pair(1.0);
        let psne = vec![ja(&[-1, -1]), ja(&[1, 1])];
        let c = vec![ja(&[1, 1])];
        let b = filibuster_breakers(&g, &psne, &c, true).unwrap();
        assert_eq!(b.players.len(), 1);
        assert_eq!(b.cover, c);
        let h = filibuster_breakers(&g, &psne, &c, false).unwrap();
        assert_eq!(h.players, vec![0]);
        let p = cloture_preventers(&g, &psne, &c, false).unwrap();
        assert_eq!(p.players, vec![0]);
        assert_eq!(p.cover, vec![ja(&[-1, -1])]);
        assert!(filibuster_breakers(&g, &psne, &[], false).is_err());
        assert!(cloture_preventers(&g, &psne, &psne, false).is_err());
        let all = filibuster_breakers(&g, &psne, &psne, false).unwrap();
        assert!(all.players.is_empty());
        assert_eq!(all.cover, psne);
    }

    #[test]
    fn anti_coordination_cycles() {
        let out = best_response_dynamics(&pair(-1.0), &BTreeMap::new(), &JointAction::uniform(2, 1), None).unwrap();
        assert_eq!(out.kind, DynamicsKind::Cycle { period: 2, first_repeat_round: 2 });
        assert!(!out.stable);
    }

    #[test]
    fn forced_chain_spreads() {
        let g = InfluenceGame::new(vec![0.0; 3], [(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0), (2, 1, 1.0)]).unwrap();
        let forced = BTreeMap::from([(1, 1)]);
        let out = best_response_dynamics(&g, &forced, &ja(&[-1, 1, -1]), None).unwrap();
        assert_eq!(out.fixed_point(), Some(&JointAction::uniform(3, 1)));
        assert!(out.stable);
        let at_rest = best_response_dynamics(&g, &BTreeMap::new(), &JointAction::uniform(3, 1), None).unwrap();
        assert_eq!(at_rest.kind, DynamicsKind::FixedPoint { state: JointAction::uniform(3, 1), rounds: 0 });
        assert!(best_response_dynamics(&g, &forced, &JointAction::uniform(3, -1), None).is_err());
    }

    #[test]
    fn diffusion_examples() {
        assert_eq!(diffusion_most_influential(&pair(1.0), None).unwrap().selected, vec![0]);
        let free = InfluenceGame::new(vec![-1.0; 3], []).unwrap();
        assert!(diffusion_most_influential(&free, None).unwrap().selected.is_empty());
    }

    #[test]
    fn filibuster_by_diffusion() {
        let arcs: Vec<_> = (0..5).flat_map(|u| (0..5).filter(move |&v| v != u).map(move |v| (u, v, 1.0))).collect();
        // eager adopters: one +1 neighbour is enough, all -1 is still a PSNE
        let clique = InfluenceGame::new(vec![-3.0; 5], arcs).unwrap();
        let hits = diffusion_filibuster(&clique, &ClotureSpec::new(3, None, 5).unwrap(), 3, None).unwrap();
        assert_eq!(hits.len(), 5);
        assert!(hits.iter().all(|h| h.outcome.stable && h.set.len() == 1));
        let none = diffusion_filibuster(&clique, &ClotureSpec::new(6, None, 5).unwrap(), 2, None).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn unstable_forced_node() {
        // node 0 will never want +1 yet pulls its two followers along
        let g = InfluenceGame::new(vec![1.0, 0.0, 0.0], [(0, 1, 1.0), (0, 2, 1.0)]).unwrap();
        let hits = diffusion_filibuster(&g, &ClotureSpec::new(3, None, 3).unwrap(), 1, None).unwrap();
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].set, vec![0]);
        assert!(!hits[0].outcome.stable);
    }
}
