//! Bundled data.

use serde::Deserialize;

use crate::game::InfluenceGame;

/// Raw 9x9 table; row `i` is the receiver, the diagonal holds thresholds.
pub const SUPREME_COURT_TABLE_JSON: &str = include_str!("../fixtures/supreme_court_table.json");

/// The same game in the core schema.
pub const SUPREME_COURT_JSON: &str = include_str!("../fixtures/supreme_court.json");

pub const CONSERVATIVES: [&str; 3] = ["Scalia", "Thomas", "Rehnquist"];
pub const SWING: [&str; 2] = ["O'Connor", "Kennedy"];
pub const LIBERALS: [&str; 4] = ["Breyer", "Souter", "Ginsburg", "Stevens"];

#[derive(Deserialize)]
struct RawTable {
    labels: Vec<String>,
    matrix: Vec<Vec<f64>>,
}

/// Builds a game from a receiver-major table: `m[i][j] = w_ji` off the
/// diagonal, `m[i][i] = b_i`.
pub fn game_from_receiver_table(labels: Vec<String>, m: &[Vec<f64>]) -> crate::Result<InfluenceGame> {
    let n = m.len();
    let mut arcs = Vec::new();
    for (i, row) in m.iter().enumerate() {
        if row.len() != n {
            return Err(crate::Error::LengthMismatch { expected: n, got: row.len() });
        }
        for (j, &w) in row.iter().enumerate() {
            if i != j {
                arcs.push((j, i, w));
            }
        }
    }
    InfluenceGame::new((0..n).map(|i| m[i][i]).collect(), arcs)?.with_labels(labels)
}

/// The nine-justice game learned from court votes.
pub fn supreme_court() -> InfluenceGame {
    let raw: RawTable = serde_json::from_str(SUPREME_COURT_TABLE_JSON).expect("bundled table parses");
    game_from_receiver_table(raw.labels, &raw.matrix).expect("bundled table is a valid game")
}
