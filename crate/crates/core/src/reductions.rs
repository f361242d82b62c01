//! Hardness gadgets and the counting oracles they are checked against.
//!
//! Every builder emits a [`ZeroOneGame`]; convert with
//! [`ZeroOneGame::to_pm1`] before solving. Player layout: variables first,
//! then clauses, then any auxiliary players. In the knapsack star the hub is
//! player 0 and item `i` is player `i + 1`.

use std::io::BufRead;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::InfluenceGame;
use crate::transforms::ZeroOneGame;

pub const DEFAULT_EPSILON: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, negated: false }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, negated: true }
    }

    fn holds(&self, assignment: u64) -> bool {
        (assignment >> self.var & 1 == 1) != self.negated
    }
}

/// A 3-CNF formula. Repeated literals in a clause count once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<[Literal; 3]>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<[Literal; 3]>) -> Result<Self> {
        for c in &clauses {
            if let Some(l) = c.iter().find(|l| l.var >= num_vars) {
                return Err(Error::InvalidInput(format!(
                    "literal on variable {} but the formula has {num_vars} variables",
                    l.var
                )));
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    /// A formula with only positive literals.
    pub fn monotone(num_vars: usize, clauses: &[[usize; 3]]) -> Result<Self> {
        Self::new(num_vars, clauses.iter().map(|c| c.map(Literal::pos)).collect())
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[[Literal; 3]] {
        &self.clauses
    }

    pub fn is_monotone(&self) -> bool {
        self.clauses.iter().flatten().all(|l| !l.negated)
    }

    /// Distinct literals of clause `k`, rejecting `x` together with `not x`.
    fn clause_literals(&self, k: usize) -> Result<Vec<Literal>> {
        let mut out: Vec<Literal> = Vec::with_capacity(3);
        for l in self.clauses[k] {
            match out.iter().find(|o| o.var == l.var) {
                Some(o) if o.negated != l.negated => {
                    return Err(Error::InvalidInput(format!(
                        "clause {k} contains variable {} in both polarities",
                        l.var
                    )))
                }
                Some(_) => {}
                None => out.push(l),
            }
        }
        Ok(out)
    }

    /// Parses DIMACS CNF with exactly three literals per clause.
    pub fn from_dimacs<R: BufRead>(reader: R) -> Result<Self> {
        let mut num_vars = None;
        let mut expected = None;
        let mut tokens: Vec<i64> = Vec::new();
        for line in reader.lines() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('c') || t.starts_with('%') {
                continue;
            }
            if let Some(rest) = t.strip_prefix('p') {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 3 || parts[0] != "cnf" {
                    return Err(Error::InvalidInput(format!("bad problem line {t:?}")));
                }
                let parse =
                    |s: &str| s.parse::<usize>().map_err(|_| Error::InvalidInput(format!("bad problem line {t:?}")));
                num_vars = Some(parse(parts[1])?);
                expected = Some(parse(parts[2])?);
                continue;
            }
            for tok in t.split_whitespace() {
                tokens.push(tok.parse().map_err(|_| Error::InvalidInput(format!("bad literal {tok:?}")))?);
            }
        }
        let num_vars = num_vars.ok_or_else(|| Error::InvalidInput("missing `p cnf` line".into()))?;
        let mut clauses = Vec::new();
        for chunk in tokens.split(|&v| v == 0).filter(|c| !c.is_empty()) {
            if chunk.len() != 3 {
                return Err(Error::InvalidInput(format!("clause {chunk:?} does not have exactly three literals")));
            }
            let lit = |v: i64| {
                let var = v.unsigned_abs() as usize - 1;
                Literal { var, negated: v < 0 }
            };
            clauses.push([lit(chunk[0]), lit(chunk[1]), lit(chunk[2])]);
        }
        if let Some(m) = expected {
            if m != clauses.len() {
                return Err(Error::InvalidInput(format!(
                    "problem line announces {m} clauses, found {}",
                    clauses.len()
                )));
            }
        }
        Self::new(num_vars, clauses)
    }
}

/// A random 3-CNF: each clause uses three distinct variables with random polarity.
pub fn random_3cnf<R: Rng>(num_vars: usize, num_clauses: usize, rng: &mut R) -> CnfFormula {
    assert!(num_vars >= 3, "need at least three variables");
    let clauses = (0..num_clauses)
        .map(|_| {
            let vars = sample(rng, num_vars, 3);
            [0, 1, 2].map(|k| Literal { var: vars.index(k), negated: rng.random_bool(0.5) })
        })
        .collect();
    CnfFormula::new(num_vars, clauses).expect("variables in range")
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("epsilon must lie in (0, 1), got {epsilon}")))
    }
}

/// Number of satisfying assignments, by enumeration.
pub fn sat_count(f: &CnfFormula) -> u64 {
    assert!(f.num_vars < 40, "enumeration oracle only");
    (0..1u64 << f.num_vars).filter(|&a| f.clauses.iter().all(|c| c.iter().any(|l| l.holds(a)))).count() as u64
}

/// Number of assignments making exactly one distinct variable true in every clause.
pub fn one_in_three_count(f: &CnfFormula) -> u64 {
    assert!(f.num_vars < 40, "enumeration oracle only");
    (0..1u64 << f.num_vars)
        .filter(|&a| {
            f.clauses.iter().all(|c| {
                let mut vars: Vec<usize> = c.iter().map(|l| l.var).collect();
                vars.sort_unstable();
                vars.dedup();
                vars.iter().filter(|&&v| a >> v & 1 == 1).count() == 1
            })
        })
        .count() as u64
}

/// Bipartite variable/clause game whose PSNE correspond one-to-one with
/// satisfying assignments.
pub fn gadget_3sat(formula: &CnfFormula, epsilon: f64) -> Result<ZeroOneGame> {
    check_epsilon(epsilon)?;
    let nv = formula.num_vars();
    let m = formula.clauses().len();
    let mut b = vec![0.0; nv + m];
    let mut arcs = Vec::new();
    for k in 0..m {
        let clause = nv + k;
        let lits = formula.clause_literals(k)?;
        b[clause] = 1.0 - epsilon;
        for l in lits {
            let lk = if l.negated { 0.0 } else { 1.0 };
            b[clause] -= 1.0 - lk;
            b[l.var] += 1.0 - 2.0 * lk;
            arcs.push((clause, l.var, 1.0 - 2.0 * lk));
            arcs.push((l.var, clause, 2.0 * lk - 1.0));
        }
    }
    Ok(ZeroOneGame(InfluenceGame::new(b, arcs)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OneInThreeVariant {
    Basic,
    ExtraPlayers,
    VerificationPlayers,
}

#[derive(Clone, Debug)]
pub struct OneInThreeGadget {
    pub game: ZeroOneGame,
    /// Players whose joint action 1 is the question being asked.
    pub designated: Vec<usize>,
    pub k: usize,
    /// Index of the all-satisfied verifier; the none-satisfied verifier follows it.
    pub verifiers: Option<usize>,
}

/// Gadgets built from a monotone one-in-three instance.
///
/// * `Basic`: designated = clause players, `k = m`.
/// * `ExtraPlayers`: adds `m(m-1)` players, `m-1` fanned out from each clause; `k = m^2`.
/// * `VerificationPlayers`: adds the two verifiers and `m^2` designated extra players.
pub fn gadget_one_in_three(formula: &CnfFormula, epsilon: f64, variant: OneInThreeVariant) -> Result<OneInThreeGadget> {
    check_epsilon(epsilon)?;
    if !formula.is_monotone() {
        return Err(Error::InvalidInput("one-in-three gadgets need a monotone formula".into()));
    }
    let nv = formula.num_vars();
    let m = formula.clauses().len();
    let mut co = vec![vec![false; nv]; nv];
    let mut b = vec![0.0; nv];
    b.extend(std::iter::repeat_n(epsilon, m));
    let mut arcs = Vec::new();
    for k in 0..m {
        let vars: Vec<usize> = formula.clause_literals(k)?.iter().map(|l| l.var).collect();
        for &u in &vars {
            arcs.push((u, nv + k, 1.0));
            for &v in &vars {
                if u != v {
                    co[u][v] = true;
                }
            }
        }
    }
    for (u, row) in co.iter().enumerate() {
        for (v, &linked) in row.iter().enumerate() {
            if linked {
                arcs.push((u, v, -1.0));
            }
        }
    }
    let clauses: Vec<usize> = (nv..nv + m).collect();
    let (designated, k, verifiers) = match variant {
        OneInThreeVariant::Basic => (clauses, m, None),
        OneInThreeVariant::ExtraPlayers => {
            for (c, &clause) in clauses.iter().enumerate() {
                for e in 0..m.saturating_sub(1) {
                    let id = nv + m + c * (m - 1) + e;
                    debug_assert_eq!(id, b.len());
                    b.push(epsilon);
                    arcs.push((clause, id, 1.0));
                }
            }
            // designated players are the clause and extra players together
            let designated: Vec<usize> = (nv..b.len()).collect();
            (designated, m * m, None)
        }
        OneInThreeVariant::VerificationPlayers => {
            let all = b.len();
            let none = all + 1;
            b.push(m as f64 - epsilon);
            b.push(-epsilon);
            for &clause in &clauses {
                arcs.push((clause, all, 1.0));
                arcs.push((clause, none, -1.0));
            }
            let first = b.len();
            for e in 0..m * m {
                b.push(epsilon);
                arcs.push((all, first + e, 1.0));
                arcs.push((none, first + e, 1.0));
            }
            ((first..first + m * m).collect(), m * m, Some(all))
        }
    };
    Ok(OneInThreeGadget { game: ZeroOneGame(InfluenceGame::new(b, arcs)?), designated, k, verifiers })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnapsackInstance {
    pub weights: Vec<u64>,
    pub capacity: u64,
}

impl KnapsackInstance {
    pub fn new(weights: Vec<u64>, capacity: u64) -> Result<Self> {
        let k = KnapsackInstance { weights, capacity };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        if self.weights.contains(&0) {
            return Err(Error::InvalidInput("knapsack item weights must be at least 1".into()));
        }
        Ok(())
    }

    /// Subsets whose total weight fits, by enumeration.
    pub fn feasible_count(&self) -> u64 {
        let n = self.weights.len();
        assert!(n < 40, "enumeration oracle only");
        (0..1u64 << n)
            .filter(|&s| {
                let total: u64 = (0..n).filter(|&i| s >> i & 1 == 1).map(|i| self.weights[i]).sum();
                total <= self.capacity
            })
            .count() as u64
    }
}

/// Star with the hub at player 0. Hub threshold `-W`, leaf thresholds 1,
/// `w_{hub -> leaf} = 1`, `w_{leaf i -> hub} = -a_i`.
///
/// Needs `W >= 1`: at `W = 0` the hub is indifferent at the all-0 profile,
/// which adds an equilibrium with no counterpart.
pub fn gadget_knapsack_star(instance: &KnapsackInstance) -> Result<ZeroOneGame> {
    instance.validate()?;
    if instance.capacity == 0 {
        return Err(Error::InvalidInput("the star gadget needs a capacity of at least 1".into()));
    }
    let n = instance.weights.len();
    let mut b = vec![-(instance.capacity as f64)];
    b.extend(std::iter::repeat_n(1.0, n));
    let mut arcs = Vec::with_capacity(2 * n);
    for (i, &a) in instance.weights.iter().enumerate() {
        arcs.push((0, i + 1, 1.0));
        arcs.push((i + 1, 0, -(a as f64)));
    }
    Ok(ZeroOneGame(InfluenceGame::new(b, arcs)?))
}
