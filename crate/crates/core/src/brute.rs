//! Exhaustive oracles. Every solver is tested against these.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{InfluenceGame, JointAction, PartialAssignment};

pub const DEFAULT_BRUTE_CAP: usize = 25;

const CHUNK_BITS: u32 = 12;

/// Visits every completion of `fixed` (entries 0 are free) in lexicographic
/// order, calling `hit` on each PSNE. Free players map to mask bits with the
/// lowest-index free player most significant.
fn sweep<F>(game: &InfluenceGame, fixed: &[i8], mut hit: F)
where
    F: FnMut(&[i8]),
{
    let n = game.n();
    let free: Vec<usize> = (0..n).filter(|&i| fixed[i] == 0).collect();
    let k = free.len();
    let mut x: Vec<i8> = fixed.iter().map(|&a| if a == 0 { -1 } else { a }).collect();
    for mask in 0u64..(1u64 << k) {
        for (b, &p) in free.iter().enumerate() {
            x[p] = if mask >> (k - 1 - b) & 1 == 1 { 1 } else { -1 };
        }
        if game.is_psne_raw(&x) {
            hit(&x);
        }
    }
}

/// Splits the free players' range into prefix chunks solved in parallel,
/// returned in increasing prefix order.
fn split_sweep<T, F>(game: &InfluenceGame, fixed: &[i8], leaf: F) -> Vec<T>
where
    T: Send,
    F: Fn(&InfluenceGame, &[i8]) -> T + Sync,
{
    let free: Vec<usize> = (0..fixed.len()).filter(|&i| fixed[i] == 0).collect();
    let split = free.len().saturating_sub(CHUNK_BITS as usize).min(16);
    let prefix = &free[..split];
    (0u64..(1u64 << split))
        .into_par_iter()
        .map(|m| {
            let mut f = fixed.to_vec();
            for (b, &p) in prefix.iter().enumerate() {
                f[p] = if m >> (split - 1 - b) & 1 == 1 { 1 } else { -1 };
            }
            leaf(game, &f)
        })
        .collect()
}

fn check_cap(free: usize, cap: Option<usize>) -> Result<()> {
    let cap = cap.unwrap_or(DEFAULT_BRUTE_CAP);
    if free > cap || free > 62 {
        return Err(Error::CapExceeded { n: free, cap });
    }
    Ok(())
}

/// All PSNE by enumeration of the `2^n` joint actions, in lexicographic order.
///
/// `cap` bounds `n` (default [`DEFAULT_BRUTE_CAP`]).
pub fn brute_force_psne(game: &InfluenceGame, cap: Option<usize>) -> Result<Vec<JointAction>> {
    check_cap(game.n(), cap)?;
    let fixed = vec![0i8; game.n()];
    let chunks = split_sweep(game, &fixed, |g, f| {
        let mut out = Vec::new();
        sweep(g, f, |x| out.push(JointAction::new(x.to_vec()).expect("valid actions")));
        out
    });
    // prefix chunks are produced in increasing prefix order, each sorted
    Ok(chunks.into_iter().flatten().collect())
}

/// Number of PSNE agreeing with `partial`. `cap` bounds the number of free players.
pub fn brute_force_extension_count(
    game: &InfluenceGame,
    partial: &PartialAssignment,
    cap: Option<usize>,
) -> Result<u64> {
    partial.check_players(game.n())?;
    let mut fixed = vec![0i8; game.n()];
    for (p, a) in partial.iter() {
        fixed[p] = a;
    }
    check_cap(game.n() - partial.len(), cap)?;
    let counts = split_sweep(game, &fixed, |g, f| {
        let mut c = 0u64;
        sweep(g, f, |_| c += 1);
        c
    });
    Ok(counts.into_iter().sum())
}

/// Indices of players playing `+1`, as a bitmask over the first 64 players.
pub(crate) fn plus_mask(x: &JointAction) -> u64 {
    x.as_slice().iter().enumerate().filter(|(_, &a)| a > 0).fold(0u64, |m, (i, _)| m | 1 << i)
}
