//! Linear influence games.
//!
//! A game on `n` players is fully described by a weight matrix `W` (entry
//! `w_ji` is the influence of player `j` on player `i`, zero diagonal) and a
//! threshold vector `b`. Player `i`'s influence function is
//! `f_i(x) = sum_{j != i} w_ji * x_j - b_i`, its payoff is `x_i * f_i(x)`, and
//! it strictly prefers `+1` when `f_i > 0`, `-1` when `f_i < 0`.
//!
//! Actions are the integers `-1` and `+1` throughout.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Games up to this size also keep a dense copy of `W` for O(1) lookups.
pub const DENSE_LIMIT: usize = 64;

pub(crate) fn check_action(a: i64) -> Result<i8> {
    match a {
        -1 => Ok(-1),
        1 => Ok(1),
        other => Err(Error::InvalidAction(other)),
    }
}

/// A nonempty-or-empty subset of `{-1, +1}`, stored as two bits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Domain(u8);

impl Domain {
    pub const EMPTY: Domain = Domain(0);
    pub const MINUS: Domain = Domain(0b01);
    pub const PLUS: Domain = Domain(0b10);
    pub const BOTH: Domain = Domain(0b11);

    pub fn single(action: i8) -> Domain {
        if action > 0 {
            Domain::PLUS
        } else {
            Domain::MINUS
        }
    }

    pub fn contains(self, action: i8) -> bool {
        self.0 & Domain::single(action).0 != 0
    }

    pub fn from_flags(minus: bool, plus: bool) -> Domain {
        Domain(u8::from(minus) | u8::from(plus) << 1)
    }

    pub fn intersect(self, other: Domain) -> Domain {
        Domain(self.0 & other.0)
    }

    pub fn remove(self, action: i8) -> Domain {
        Domain(self.0 & !Domain::single(action).0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// The action, when the domain holds exactly one.
    pub fn singleton(self) -> Option<i8> {
        match self {
            Domain::MINUS => Some(-1),
            Domain::PLUS => Some(1),
            _ => None,
        }
    }

    /// Actions in ascending order (`-1` before `+1`).
    pub fn actions(self) -> impl Iterator<Item = i8> {
        [-1i8, 1].into_iter().filter(move |&a| self.contains(a))
    }
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Domain::EMPTY => write!(f, "{{}}"),
            Domain::MINUS => write!(f, "{{-1}}"),
            Domain::PLUS => write!(f, "{{+1}}"),
            _ => write!(f, "{{-1,+1}}"),
        }
    }
}

/// A full assignment of `-1`/`+1` to every player.
///
/// Ordering is lexicographic with `-1 < +1`, player 0 most significant.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct JointAction(Vec<i8>);

impl JointAction {
    pub fn new(actions: Vec<i8>) -> Result<Self> {
        for &a in &actions {
            check_action(a as i64)?;
        }
        Ok(JointAction(actions))
    }

    pub fn uniform(n: usize, action: i8) -> Self {
        JointAction(vec![if action > 0 { 1 } else { -1 }; n])
    }

    /// Builds from a bitmask where bit `n-1-i` set means player `i` plays `+1`,
    /// so increasing masks enumerate joint actions in lexicographic order.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        JointAction((0..n).map(|i| if mask >> (n - 1 - i) & 1 == 1 { 1 } else { -1 }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> i8 {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<i8> {
        self.0
    }

    pub fn count_plus(&self) -> usize {
        self.0.iter().filter(|&&a| a > 0).count()
    }

    pub fn negated(&self) -> Self {
        JointAction(self.0.iter().map(|a| -a).collect())
    }

    pub fn with(&self, i: usize, action: i8) -> Self {
        let mut v = self.0.clone();
        v[i] = action;
        JointAction(v)
    }

    /// Comma-separated `-1`/`1`, the PSNE file line format.
    pub fn to_line(&self) -> String {
        self.0.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",")
    }

    pub fn parse_line(line: &str) -> Result<Self> {
        let actions = line
            .split(',')
            .map(|t| {
                let v: i64 = t.trim().parse().map_err(|_| Error::InvalidInput(format!("bad action token {t:?}")))?;
                check_action(v)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(JointAction(actions))
    }
}

impl fmt::Debug for JointAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, a) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", if *a > 0 { "+" } else { "-" })?;
        }
        write!(f, ")")
    }
}

impl TryFrom<Vec<i64>> for JointAction {
    type Error = Error;
    fn try_from(v: Vec<i64>) -> Result<Self> {
        Ok(JointAction(v.into_iter().map(check_action).collect::<Result<_>>()?))
    }
}

impl From<JointAction> for Vec<i64> {
    fn from(x: JointAction) -> Self {
        x.0.into_iter().map(i64::from).collect()
    }
}

/// Actions fixed for a subset of players, in the order they were fixed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartialAssignment {
    order: Vec<(usize, i8)>,
}

impl PartialAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, i8)>) -> Result<Self> {
        let mut p = Self::new();
        for (player, action) in pairs {
            p.assign(player, action)?;
        }
        Ok(p)
    }

    /// Fixes every listed player to its action in `x`.
    pub fn restrict(x: &JointAction, players: &[usize]) -> Result<Self> {
        Self::from_pairs(players.iter().map(|&i| (i, x.get(i))))
    }

    pub fn assign(&mut self, player: usize, action: i8) -> Result<()> {
        check_action(action as i64)?;
        if self.get(player).is_some() {
            return Err(Error::DuplicatePlayer(player));
        }
        self.order.push((player, action));
        Ok(())
    }

    pub fn get(&self, player: usize) -> Option<i8> {
        self.order.iter().find(|(p, _)| *p == player).map(|&(_, a)| a)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, i8)> + '_ {
        self.order.iter().copied()
    }

    pub fn players(&self) -> impl Iterator<Item = usize> + '_ {
        self.order.iter().map(|&(p, _)| p)
    }

    pub fn agrees(&self, x: &JointAction) -> bool {
        self.order.iter().all(|&(p, a)| x.get(p) == a)
    }

    pub(crate) fn check_players(&self, n: usize) -> Result<()> {
        match self.order.iter().find(|(p, _)| *p >= n) {
            Some(&(index, _)) => Err(Error::PlayerOutOfRange { index, n }),
            None => Ok(()),
        }
    }

    /// Per-player domains: singletons for assigned players, both actions otherwise.
    pub fn to_domains(&self, n: usize) -> Result<DomainVector> {
        self.check_players(n)?;
        let mut d = vec![Domain::BOTH; n];
        for (p, a) in self.iter() {
            d[p] = Domain::single(a);
        }
        Ok(DomainVector::Domains(d))
    }
}

/// Per-player action sets used by propagation, or a detected contradiction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DomainVector {
    Domains(Vec<Domain>),
    Contradiction,
}

impl DomainVector {
    pub fn full(n: usize) -> Self {
        DomainVector::Domains(vec![Domain::BOTH; n])
    }

    pub fn domains(&self) -> Option<&[Domain]> {
        match self {
            DomainVector::Domains(d) => Some(d),
            DomainVector::Contradiction => None,
        }
    }

    pub fn is_contradiction(&self) -> bool {
        matches!(self, DomainVector::Contradiction)
    }

    /// Whether `x` picks an allowed action for every player.
    pub fn admits(&self, x: &JointAction) -> bool {
        match self {
            DomainVector::Domains(d) => d.iter().zip(x.as_slice()).all(|(d, &a)| d.contains(a)),
            DomainVector::Contradiction => false,
        }
    }
}

/// One weighted arc seen from a fixed endpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    pub other: usize,
    pub weight: f64,
}

/// A linear influence game. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct InfluenceGame {
    n: usize,
    thresholds: Vec<f64>,
    labels: Option<Vec<String>>,
    tie_epsilon: f64,
    /// `incoming[i]` lists `(j, w_ji)` sorted by `j`.
    incoming: Vec<Vec<Arc>>,
    /// `outgoing[j]` lists `(i, w_ji)` sorted by `i`.
    outgoing: Vec<Vec<Arc>>,
    dense: Option<Vec<f64>>,
}

impl InfluenceGame {
    /// Builds a game from thresholds and `(j, i, w_ji)` arcs.
    ///
    /// Zero-weight arcs are dropped. Self-arcs with nonzero weight, repeated
    /// arcs, out-of-range indices and non-finite values are rejected.
    pub fn new(thresholds: Vec<f64>, arcs: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let n = thresholds.len();
        if n == 0 {
            return Err(Error::InvalidGame("a game needs at least one player".into()));
        }
        if let Some(b) = thresholds.iter().find(|b| !b.is_finite()) {
            return Err(Error::InvalidGame(format!("non-finite threshold {b}")));
        }
        let mut incoming: Vec<Vec<Arc>> = vec![Vec::new(); n];
        let mut outgoing: Vec<Vec<Arc>> = vec![Vec::new(); n];
        for (j, i, w) in arcs {
            if j >= n || i >= n {
                return Err(Error::PlayerOutOfRange { index: j.max(i), n });
            }
            if !w.is_finite() {
                return Err(Error::InvalidGame(format!("non-finite weight on arc {j}->{i}")));
            }
            if w == 0.0 {
                continue;
            }
            if i == j {
                return Err(Error::InvalidGame(format!("nonzero self-arc on player {i}")));
            }
            incoming[i].push(Arc { other: j, weight: w });
            outgoing[j].push(Arc { other: i, weight: w });
        }
        for (i, list) in incoming.iter_mut().enumerate() {
            list.sort_by_key(|a| a.other);
            if list.windows(2).any(|p| p[0].other == p[1].other) {
                return Err(Error::InvalidGame(format!("repeated arc into player {i}")));
            }
        }
        for list in outgoing.iter_mut() {
            list.sort_by_key(|a| a.other);
        }
        let dense = (n <= DENSE_LIMIT).then(|| {
            let mut m = vec![0.0; n * n];
            for (i, list) in incoming.iter().enumerate() {
                for a in list {
                    m[a.other * n + i] = a.weight;
                }
            }
            m
        });
        Ok(InfluenceGame { n, thresholds, labels: None, tie_epsilon: 0.0, incoming, outgoing, dense })
    }

    /// Builds from a square matrix with `weights[j][i] = w_ji`.
    pub fn from_matrix(weights: &[Vec<f64>], thresholds: Vec<f64>) -> Result<Self> {
        let n = thresholds.len();
        if weights.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: weights.len() });
        }
        let mut arcs = Vec::new();
        for (j, row) in weights.iter().enumerate() {
            if row.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: row.len() });
            }
            for (i, &w) in row.iter().enumerate() {
                if i == j && w != 0.0 {
                    return Err(Error::InvalidGame(format!("nonzero diagonal entry at {i}")));
                }
                if i != j {
                    arcs.push((j, i, w));
                }
            }
        }
        Self::new(thresholds, arcs)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_tie_epsilon(mut self, eps: f64) -> Result<Self> {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::InvalidGame(format!("tie epsilon must be a finite value >= 0, got {eps}")));
        }
        self.tie_epsilon = eps;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn threshold(&self, i: usize) -> f64 {
        self.thresholds[i]
    }

    pub fn tie_epsilon(&self) -> f64 {
        self.tie_epsilon
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// The player's label, or its index when the game is unlabeled.
    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.as_ref()?.iter().position(|l| l == label)
    }

    /// `w_ji`, the influence of `j` on `i` (0 when there is no arc).
    pub fn weight(&self, j: usize, i: usize) -> f64 {
        match &self.dense {
            Some(m) => m[j * self.n + i],
            None => self.incoming[i]
                .binary_search_by_key(&j, |a| a.other)
                .map(|k| self.incoming[i][k].weight)
                .unwrap_or(0.0),
        }
    }

    /// Arcs into `i` as `(source, w_source_i)`.
    pub fn incoming(&self, i: usize) -> &[Arc] {
        &self.incoming[i]
    }

    /// Arcs out of `j` as `(target, w_j_target)`.
    pub fn outgoing(&self, j: usize) -> &[Arc] {
        &self.outgoing[j]
    }

    pub fn out_degree(&self, j: usize) -> usize {
        self.outgoing[j].len()
    }

    pub fn num_arcs(&self) -> usize {
        self.incoming.iter().map(Vec::len).sum()
    }

    /// All arcs as `(j, i, w_ji)`, sorted by `(j, i)`.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.outgoing.iter().enumerate().flat_map(|(j, list)| list.iter().map(move |a| (j, a.other, a.weight)))
    }

    pub fn all_weights_nonnegative(&self) -> bool {
        self.arcs().all(|(_, _, w)| w >= 0.0)
    }

    /// Neighbors in the underlying undirected graph (union of both arc directions), sorted.
    pub fn undirected_neighbors(&self) -> Vec<Vec<usize>> {
        (0..self.n)
            .map(|i| {
                let mut nb: Vec<usize> = self.incoming[i].iter().chain(&self.outgoing[i]).map(|a| a.other).collect();
                nb.sort_unstable();
                nb.dedup();
                nb
            })
            .collect()
    }

    fn check_player(&self, i: usize) -> Result<()> {
        if i >= self.n {
            Err(Error::PlayerOutOfRange { index: i, n: self.n })
        } else {
            Ok(())
        }
    }

    fn check_len(&self, x: &JointAction) -> Result<()> {
        if x.len() != self.n {
            Err(Error::LengthMismatch { expected: self.n, got: x.len() })
        } else {
            Ok(())
        }
    }

    pub(crate) fn influence_raw(&self, i: usize, x: &[i8]) -> f64 {
        let mut s = 0.0;
        for a in &self.incoming[i] {
            s += a.weight * x[a.other] as f64;
        }
        s - self.thresholds[i]
    }

    /// `f_i(x_{-i}) = sum_{j != i} w_ji x_j - b_i`; `x_i` itself is ignored.
    pub fn influence(&self, i: usize, x: &JointAction) -> Result<f64> {
        self.check_player(i)?;
        self.check_len(x)?;
        Ok(self.influence_raw(i, x.as_slice()))
    }

    /// `u_i(x) = x_i * f_i(x_{-i})`.
    pub fn payoff(&self, i: usize, x: &JointAction) -> Result<f64> {
        Ok(x.get(i) as f64 * self.influence(i, x)?)
    }

    /// Best-response set for an influence value, honoring `tie_epsilon`.
    pub fn response_to(&self, f: f64) -> Domain {
        if f > self.tie_epsilon {
            Domain::PLUS
        } else if f < -self.tie_epsilon {
            Domain::MINUS
        } else {
            Domain::BOTH
        }
    }

    pub fn best_responses(&self, i: usize, x: &JointAction) -> Result<Domain> {
        Ok(self.response_to(self.influence(i, x)?))
    }

    pub(crate) fn is_best_response_raw(&self, i: usize, x: &[i8]) -> bool {
        x[i] as f64 * self.influence_raw(i, x) >= -self.tie_epsilon
    }

    pub(crate) fn is_psne_raw(&self, x: &[i8]) -> bool {
        (0..self.n).all(|i| self.is_best_response_raw(i, x))
    }

    /// Whether every player best-responds in `x`.
    ///
    /// # Panics
    /// If `x` does not have one entry per player.
    pub fn is_psne(&self, x: &JointAction) -> bool {
        assert_eq!(x.len(), self.n, "joint action length does not match the game");
        self.is_psne_raw(x.as_slice())
    }

    /// A copy with different thresholds, same arcs.
    pub fn with_thresholds(&self, thresholds: Vec<f64>) -> Result<Self> {
        if thresholds.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: thresholds.len() });
        }
        let mut g = Self::new(thresholds, self.arcs())?;
        g.labels = self.labels.clone();
        g.tie_epsilon = self.tie_epsilon;
        Ok(g)
    }
}
