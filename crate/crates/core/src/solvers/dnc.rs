use std::collections::BTreeMap;

use rayon::prelude::*;

use super::backtrack::enumerate_psne;
use super::separator::find_vertex_separator_dropping;
use super::SearchConfig;
use crate::error::Result;
use crate::game::{InfluenceGame, JointAction};

/// Separator players keep no incoming arcs and get threshold 0, so the
/// subgame leaves them free to play anything.
fn subgame(
    game: &InfluenceGame,
    comp: &[usize],
    sep: &[usize],
    ignored: &impl Fn(usize, usize) -> bool,
) -> (Vec<usize>, InfluenceGame) {
    let mut nodes: Vec<usize> = comp.iter().chain(sep).copied().collect();
    nodes.sort_unstable();
    let n = game.n();
    let mut local = vec![usize::MAX; n];
    for (k, &v) in nodes.iter().enumerate() {
        local[v] = k;
    }
    let mut in_comp = vec![false; n];
    for &v in comp {
        in_comp[v] = true;
    }
    let b: Vec<f64> = nodes.iter().map(|&v| if in_comp[v] { game.threshold(v) } else { 0.0 }).collect();
    let mut arcs = Vec::new();
    for &i in comp {
        for a in game.incoming(i) {
            if local[a.other] != usize::MAX && !ignored(a.other, i) {
                arcs.push((local[a.other], local[i], a.weight));
            }
        }
    }
    let g = InfluenceGame::new(b, arcs)
        .expect("restriction of a valid game")
        .with_tie_epsilon(game.tie_epsilon())
        .expect("epsilon already validated");
    (nodes, g)
}

/// `(player, action)` pairs outside the separator.
type Assignment = Vec<(usize, i8)>;

/// PSNE via one separator level: solve each part together with the
/// separator, join the partial equilibria on the separator's actions and
/// keep the joins that are PSNE of the full game.
///
/// With `anytime_drop > 0` that many cut edges are ignored; the result is
/// then a subset of the PSNE and the returned flag is `false`.
pub fn solve_divide_conquer(
    game: &InfluenceGame,
    cfg: &SearchConfig,
    anytime_drop: usize,
) -> Result<(Vec<JointAction>, bool)> {
    let sep = find_vertex_separator_dropping(game, 2, anytime_drop)?;
    let exact = sep.ignored.is_empty();
    if sep.components.is_empty() {
        return Ok((enumerate_psne(game, &SearchConfig { count_only: false, ..*cfg })?.0, exact));
    }
    let skip = |u: usize, v: usize| sep.ignores(u, v);
    let sub_cfg = SearchConfig { count_only: false, ..*cfg };
    let solve = |comp: &Vec<usize>| -> Result<(Vec<usize>, Vec<JointAction>)> {
        let (nodes, g) = subgame(game, comp, &sep.vertices, &skip);
        Ok((nodes, enumerate_psne(&g, &sub_cfg)?.0))
    };
    let parts: Vec<(Vec<usize>, Vec<JointAction>)> = if cfg.parallel {
        sep.components.par_iter().map(solve).collect::<Result<_>>()?
    } else {
        sep.components.iter().map(solve).collect::<Result<_>>()?
    };

    // index each part's solutions by the separator assignment
    let n = game.n();
    let mut grouped: Vec<BTreeMap<Vec<i8>, Vec<Assignment>>> = Vec::with_capacity(parts.len());
    for (nodes, sols) in &parts {
        let mut by_key: BTreeMap<Vec<i8>, Vec<Assignment>> = BTreeMap::new();
        let sep_local: Vec<usize> =
            sep.vertices.iter().map(|s| nodes.binary_search(s).expect("separator in every subgame")).collect();
        for x in sols {
            let key: Vec<i8> = sep_local.iter().map(|&k| x.get(k)).collect();
            let rest: Vec<(usize, i8)> = nodes
                .iter()
                .enumerate()
                .filter(|(_, v)| sep.vertices.binary_search(v).is_err())
                .map(|(k, &v)| (v, x.get(k)))
                .collect();
            by_key.entry(key).or_default().push(rest);
        }
        grouped.push(by_key);
    }

    let mut out = Vec::new();
    for (key, first) in &grouped[0] {
        let lists: Option<Vec<&Vec<Assignment>>> =
            std::iter::once(Some(first)).chain(grouped[1..].iter().map(|m| m.get(key))).collect();
        let Some(lists) = lists else {
            continue;
        };
        let mut x = vec![0i8; n];
        for (&s, &a) in sep.vertices.iter().zip(key) {
            x[s] = a;
        }
        product(&lists, 0, &mut x, &mut |x| {
            if game.is_psne_raw(x) {
                out.push(JointAction::new(x.to_vec()).expect("fully assigned"));
            }
        });
    }
    out.sort_unstable();
    Ok((out, exact))
}

fn product(lists: &[&Vec<Vec<(usize, i8)>>], d: usize, x: &mut [i8], emit: &mut impl FnMut(&[i8])) {
    if d == lists.len() {
        emit(x);
        return;
    }
    for part in lists[d] {
        for &(v, a) in part {
            x[v] = a;
        }
        product(lists, d + 1, x, emit);
    }
}
