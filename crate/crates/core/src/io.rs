//! File formats.
//!
//! * Game JSON: `{"n", "labels", "thresholds", "arcs": [[j, i, w_ji], ...]}`,
//!   0-based, optional `"tie_epsilon"`. Absent arcs have weight 0.
//! * Polymatrix JSON: `{"n", "tables": [[j, i, [[a_mm, a_mp], [a_pm, a_pp]]], ...]}`
//!   where the first table index is `x_j` and the second `x_i`, `m = -1`, `p = +1`.
//! * PSNE files: one equilibrium per line, comma-separated `-1`/`1`.
//! * Stats JSON: `{"nodes_visited", "psne_found", "wall_time_ms"}`.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{InfluenceGame, JointAction};
use crate::transforms::{PolymatrixGame, Table};

#[derive(Clone, Debug, Serialize, Deserialize)]
struct GameFile {
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    thresholds: Vec<f64>,
    #[serde(default)]
    arcs: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tie_epsilon: Option<f64>,
}

pub fn game_from_json(text: &str) -> Result<InfluenceGame> {
    let f: GameFile = serde_json::from_str(text)?;
    if f.thresholds.len() != f.n {
        return Err(Error::LengthMismatch { expected: f.n, got: f.thresholds.len() });
    }
    let mut g = InfluenceGame::new(f.thresholds, f.arcs)?;
    if let Some(l) = f.labels {
        g = g.with_labels(l)?;
    }
    if let Some(e) = f.tie_epsilon {
        g = g.with_tie_epsilon(e)?;
    }
    Ok(g)
}

fn json<T: Serialize + ?Sized>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

/// Stable, diffable layout with each arc on its own line.
pub fn game_to_json(game: &InfluenceGame) -> String {
    let mut s = String::from("{\n");
    let _ = writeln!(s, "  \"n\": {},", game.n());
    if let Some(l) = game.labels() {
        let _ = writeln!(s, "  \"labels\": {},", json(l));
    }
    let _ = writeln!(s, "  \"thresholds\": {},", json(game.thresholds()));
    if game.tie_epsilon() != 0.0 {
        let _ = writeln!(s, "  \"tie_epsilon\": {},", json(&game.tie_epsilon()));
    }
    let arcs: Vec<String> = game.arcs().map(|(j, i, w)| format!("    [{j}, {i}, {}]", json(&w))).collect();
    if arcs.is_empty() {
        s.push_str("  \"arcs\": []\n}\n");
    } else {
        let _ = write!(s, "  \"arcs\": [\n{}\n  ]\n}}\n", arcs.join(",\n"));
    }
    s
}

pub fn read_game(path: impl AsRef<Path>) -> Result<InfluenceGame> {
    game_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_game(path: impl AsRef<Path>, game: &InfluenceGame) -> Result<()> {
    std::fs::write(path, game_to_json(game))?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct PolymatrixFile {
    n: usize,
    tables: Vec<(usize, usize, Table)>,
}

pub fn polymatrix_from_json(text: &str) -> Result<PolymatrixGame> {
    let f: PolymatrixFile = serde_json::from_str(text)?;
    PolymatrixGame::new(f.n, f.tables)
}

pub fn polymatrix_to_json(pm: &PolymatrixGame) -> String {
    let f = PolymatrixFile { n: pm.n(), tables: pm.tables().map(|(j, i, t)| (j, i, *t)).collect() };
    serde_json::to_string_pretty(&f).expect("plain data serializes")
}

pub fn write_psne<W: Write>(mut w: W, psne: &[JointAction]) -> Result<()> {
    for x in psne {
        writeln!(w, "{}", x.to_line())?;
    }
    Ok(())
}

pub fn psne_to_string(psne: &[JointAction]) -> String {
    let mut s = String::new();
    for x in psne {
        s.push_str(&x.to_line());
        s.push('\n');
    }
    s
}

pub fn read_psne<R: BufRead>(r: R) -> Result<Vec<JointAction>> {
    r.lines()
        .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|l| JointAction::parse_line(&l?))
        .collect()
}
