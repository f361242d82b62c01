use crate::error::{Error, Result};
use crate::game::{InfluenceGame, JointAction};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extreme {
    AllMinusOne,
    AllPlusOne,
}

impl Extreme {
    fn action(self) -> i8 {
        match self {
            Extreme::AllMinusOne => -1,
            Extreme::AllPlusOne => 1,
        }
    }
}

/// Synchronous best-response dynamics from an extreme joint action, with
/// indifferent players taking the start action. Returns the fixed point
/// and the number of rounds in which some player moved.
pub fn supermodular_run(game: &InfluenceGame, start: Extreme) -> Result<(JointAction, usize)> {
    if let Some((j, i, w)) = game.arcs().find(|&(_, _, w)| w < 0.0) {
        return Err(Error::NotApplicable(format!("dynamics need nonnegative influence, arc {j}->{i} has weight {w}")));
    }
    let n = game.n();
    let eps = game.tie_epsilon();
    let s = start.action();
    let mut x = vec![s; n];
    for round in 0..=n {
        let next: Vec<i8> = (0..n)
            .map(|i| {
                let f = game.influence_raw(i, &x);
                if f > eps {
                    1
                } else if f < -eps {
                    -1
                } else {
                    s
                }
            })
            .collect();
        if next == x {
            return Ok((JointAction::new(x).expect("valid actions"), round));
        }
        x = next;
    }
    Err(Error::RoundLimit(n))
}

/// A PSNE of a game with nonnegative weights.
pub fn solve_supermodular(game: &InfluenceGame, start: Extreme) -> Result<JointAction> {
    Ok(supermodular_run(game, start)?.0)
}

/// The fixed points reached from all `-1` and from all `+1`; every PSNE lies
/// componentwise between them.
pub fn supermodular_bracket(game: &InfluenceGame) -> Result<(JointAction, JointAction)> {
    Ok((solve_supermodular(game, Extreme::AllMinusOne)?, solve_supermodular(game, Extreme::AllPlusOne)?))
}
