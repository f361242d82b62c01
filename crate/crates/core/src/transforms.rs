//! Polymatrix conversion, `{0,1}` re-encoding and potential functions.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::game::{InfluenceGame, JointAction};

/// Absolute tolerance used by [`detect_potential`].
pub const POTENTIAL_TOL: f64 = 1e-12;

/// Maps an action to a table index: `-1 -> 0`, `+1 -> 1`.
#[inline]
pub fn action_index(a: i8) -> usize {
    usize::from(a > 0)
}

/// A 2x2 partial payoff table `t[x_j][x_i]`, indices per [`action_index`].
pub type Table = [[f64; 2]; 2];

/// A 2-action polymatrix game: player `i` earns `sum_{j != i} alpha_ji(x_j, x_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolymatrixGame {
    n: usize,
    tables: BTreeMap<(usize, usize), Table>,
}

impl PolymatrixGame {
    /// Requires one table for every ordered pair `(j, i)`, `j != i`.
    pub fn new(n: usize, tables: impl IntoIterator<Item = (usize, usize, Table)>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGame("polymatrix games need at least two players".into()));
        }
        let mut map = BTreeMap::new();
        for (j, i, t) in tables {
            if j >= n || i >= n {
                return Err(Error::PlayerOutOfRange { index: j.max(i), n });
            }
            if j == i {
                return Err(Error::InvalidGame(format!("table for self-pair ({i}, {i})")));
            }
            if t.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::InvalidGame(format!("non-finite entry in table ({j}, {i})")));
            }
            if map.insert((j, i), t).is_some() {
                return Err(Error::InvalidGame(format!("repeated table ({j}, {i})")));
            }
        }
        if map.len() != n * (n - 1) {
            return Err(Error::InvalidGame(format!("expected {} tables, got {}", n * (n - 1), map.len())));
        }
        Ok(PolymatrixGame { n, tables: map })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self, j: usize, i: usize) -> &Table {
        &self.tables[&(j, i)]
    }

    pub fn tables(&self) -> impl Iterator<Item = (usize, usize, &Table)> {
        self.tables.iter().map(|(&(j, i), t)| (j, i, t))
    }

    pub fn payoff(&self, i: usize, x: &[i8]) -> f64 {
        (0..self.n).filter(|&j| j != i).map(|j| self.table(j, i)[action_index(x[j])][action_index(x[i])]).sum()
    }

    pub fn is_psne(&self, x: &JointAction) -> bool {
        let mut y = x.as_slice().to_vec();
        (0..self.n).all(|i| {
            let here = self.payoff(i, &y);
            y[i] = -y[i];
            let there = self.payoff(i, &y);
            y[i] = -y[i];
            here >= there
        })
    }

    /// All PSNE by enumeration, lexicographically ordered.
    pub fn brute_force_psne(&self, cap: Option<usize>) -> Result<Vec<JointAction>> {
        let cap = cap.unwrap_or(crate::DEFAULT_BRUTE_CAP);
        if self.n > cap {
            return Err(Error::CapExceeded { n: self.n, cap });
        }
        Ok((0..1u64 << self.n).map(|m| JointAction::from_mask(self.n, m)).filter(|x| self.is_psne(x)).collect())
    }
}

/// `alpha_ji(x_j, x_i) = x_i w_ji x_j - x_i b_i / (n - 1)`.
pub fn lig_to_polymatrix(game: &InfluenceGame) -> Result<PolymatrixGame> {
    let n = game.n();
    if n < 2 {
        return Err(Error::NotApplicable("polymatrix form needs n >= 2".into()));
    }
    let share = (n - 1) as f64;
    let mut tables = Vec::with_capacity(n * (n - 1));
    for i in 0..n {
        let b = game.threshold(i);
        for j in (0..n).filter(|&j| j != i) {
            let w = game.weight(j, i);
            let mut t = [[0.0; 2]; 2];
            for xj in [-1i8, 1] {
                for xi in [-1i8, 1] {
                    let (xj_f, xi_f) = (xj as f64, xi as f64);
                    t[action_index(xj)][action_index(xi)] = xi_f * w * xj_f - xi_f * b / share;
                }
            }
            tables.push((j, i, t));
        }
    }
    PolymatrixGame::new(n, tables)
}

/// Inverse construction: `w_ji` is the interaction part of `alpha_ji`, and
/// `b_i` collects the parts that depend on `x_i` alone.
pub fn polymatrix_to_lig(pm: &PolymatrixGame) -> Result<InfluenceGame> {
    let n = pm.n();
    let mut b = vec![0.0; n];
    let mut arcs = Vec::new();
    for (j, i, t) in pm.tables() {
        let (mm, mp, pm_, pp) = (t[0][0], t[0][1], t[1][0], t[1][1]);
        // t[x_j][x_i]: pp = (1,1), mp = (-1,1), pm_ = (1,-1), mm = (-1,-1)
        arcs.push((j, i, 0.25 * (pp - mp - pm_ + mm)));
        b[i] -= 0.25 * (pp + mp - pm_ - mm);
    }
    InfluenceGame::new(b, arcs)
}

/// A game whose actions are read as `{0, 1}` rather than `{-1, +1}`.
///
/// Player `i` prefers 1 when `sum_j w_ji x_j - b_i > 0` and 0 when it is negative.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroOneGame(pub InfluenceGame);

impl ZeroOneGame {
    pub fn game(&self) -> &InfluenceGame {
        &self.0
    }

    pub fn is_equilibrium(&self, x: &[u8]) -> bool {
        let g = &self.0;
        (0..g.n()).all(|i| {
            let f: f64 = g.incoming(i).iter().map(|a| a.weight * x[a.other] as f64).sum::<f64>() - g.threshold(i);
            if x[i] == 1 {
                f >= -g.tie_epsilon()
            } else {
                f <= g.tie_epsilon()
            }
        })
    }

    /// Equilibria by enumeration, as 0/1 vectors in lexicographic order.
    pub fn brute_force_equilibria(&self, cap: Option<usize>) -> Result<Vec<Vec<u8>>> {
        let n = self.0.n();
        let cap = cap.unwrap_or(crate::DEFAULT_BRUTE_CAP);
        if n > cap {
            return Err(Error::CapExceeded { n, cap });
        }
        Ok((0..1u64 << n)
            .map(|m| (0..n).map(|i| (m >> (n - 1 - i) & 1) as u8).collect::<Vec<u8>>())
            .filter(|x| self.is_equilibrium(x))
            .collect())
    }

    pub fn to_pm1(&self) -> InfluenceGame {
        zero_one_to_pm1(self)
    }
}

/// `w' = w / 2`, `b'_i = b_i - sum_j w_ji / 2`; `x` is an equilibrium of the
/// `{0,1}` game iff `2x - 1` is a PSNE of the result.
pub fn zero_one_to_pm1(game01: &ZeroOneGame) -> InfluenceGame {
    let g = &game01.0;
    let b: Vec<f64> =
        (0..g.n()).map(|i| g.threshold(i) - g.incoming(i).iter().map(|a| a.weight / 2.0).sum::<f64>()).collect();
    let out =
        InfluenceGame::new(b, g.arcs().map(|(j, i, w)| (j, i, w / 2.0))).expect("halving a valid game keeps it valid");
    let out = out.with_tie_epsilon(g.tie_epsilon()).expect("epsilon already validated");
    match g.labels() {
        Some(l) => out.with_labels(l.to_vec()).expect("same length"),
        None => out,
    }
}

pub fn pm1_from_zero_one(x: &[u8]) -> JointAction {
    JointAction::new(x.iter().map(|&v| if v == 1 { 1 } else { -1 }).collect()).expect("valid actions")
}

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialKind {
    /// `w_ij = w_ji` for all pairs; exact potential.
    SymmetricExact,
    /// `w_ij = delta_i != 0` for every `j != i`, all `delta_i` of sign `rho`.
    IndiscriminateOrdinal {
        rho: i8,
        delta: Vec<f64>,
    },
    NoneDetected,
}

pub fn detect_potential(game: &InfluenceGame) -> PotentialKind {
    detect_potential_with(game, POTENTIAL_TOL)
}

/// Symmetry is tested first; a game that is both is reported as symmetric.
pub fn detect_potential_with(game: &InfluenceGame, tol: f64) -> PotentialKind {
    let n = game.n();
    let symmetric = game.arcs().all(|(j, i, w)| (w - game.weight(i, j)).abs() <= tol);
    if symmetric {
        return PotentialKind::SymmetricExact;
    }
    let mut delta = Vec::with_capacity(n);
    for i in 0..n {
        let out = game.outgoing(i);
        if out.len() != n - 1 {
            return PotentialKind::NoneDetected;
        }
        let d = out[0].weight;
        if out.iter().any(|a| (a.weight - d).abs() > tol) {
            return PotentialKind::NoneDetected;
        }
        delta.push(d);
    }
    let rho: i8 = if delta[0] > 0.0 { 1 } else { -1 };
    if delta.iter().all(|&d| d * rho as f64 > 0.0) {
        PotentialKind::IndiscriminateOrdinal { rho, delta }
    } else {
        PotentialKind::NoneDetected
    }
}

/// Evaluates the potential matching `kind` at `x`.
pub fn potential_value(game: &InfluenceGame, kind: &PotentialKind, x: &JointAction) -> Result<f64> {
    if x.len() != game.n() {
        return Err(Error::LengthMismatch { expected: game.n(), got: x.len() });
    }
    let xs = x.as_slice();
    match kind {
        PotentialKind::SymmetricExact => Ok((0..game.n())
            .map(|t| {
                let inner: f64 = game.incoming(t).iter().map(|a| xs[a.other] as f64 * a.weight / 2.0).sum();
                xs[t] as f64 * (inner - game.threshold(t))
            })
            .sum()),
        PotentialKind::IndiscriminateOrdinal { rho, delta } => {
            if delta.len() != game.n() {
                return Err(Error::LengthMismatch { expected: game.n(), got: delta.len() });
            }
            let s: f64 = delta.iter().zip(xs).map(|(d, &a)| d * a as f64).sum();
            let lin: f64 = (0..game.n()).map(|i| game.threshold(i) * delta[i] * xs[i] as f64).sum();
            Ok(*rho as f64 * (s * s - 2.0 * lin))
        }
        PotentialKind::NoneDetected => Err(Error::NotApplicable("no potential function detected for this game".into())),
    }
}
