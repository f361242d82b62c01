//! PSNE engines: backtracking with pruning and propagation, the tree
//! algorithm, supermodular dynamics and separator-based divide and conquer.

use std::time::Duration;

use serde::{Deserialize, Serialize};

mod backtrack;
mod dnc;
mod matching;
mod separator;
mod supermodular;
mod tree;

pub use backtrack::{count_psne_extensions, enumerate_psne, propagate, search, search_order, SearchOutcome};
pub use dnc::solve_divide_conquer;
pub use matching::{hopcroft_karp, konig_cover};
pub use separator::{find_vertex_separator, find_vertex_separator_dropping, Separator};
pub use supermodular::{solve_supermodular, supermodular_bracket, supermodular_run, Extreme};
pub use tree::{is_forest, solve_tree};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Maximum number of attempted assignments.
    pub max_nodes: Option<u64>,
    pub parallel: bool,
    /// Count equilibria without materializing them.
    pub count_only: bool,
    pub collect_stats: bool,
    /// Shrink domains after every assignment.
    pub propagate: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { max_nodes: None, parallel: false, count_only: false, collect_stats: true, propagate: true }
    }
}

impl SearchConfig {
    pub fn counting() -> Self {
        SearchConfig { count_only: true, ..Self::default() }
    }

    pub fn with_budget(mut self, max_nodes: u64) -> Self {
        self.max_nodes = Some(max_nodes.max(1));
        self
    }

    pub fn with_propagation(mut self, on: bool) -> Self {
        self.propagate = on;
        self
    }

    pub fn with_parallel(mut self, on: bool) -> Self {
        self.parallel = on;
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes_visited: u64,
    pub psne_found: u64,
    #[serde(rename = "wall_time_ms", with = "millis")]
    pub wall_time: Duration,
}

impl SearchStats {
    pub fn merge(&mut self, other: &SearchStats) {
        self.nodes_visited += other.nodes_visited;
        self.psne_found += other.psne_found;
        self.wall_time += other.wall_time;
    }
}

mod millis {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64() * 1e3)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let ms = f64::deserialize(d)?;
        Ok(Duration::from_secs_f64(ms.max(0.0) / 1e3))
    }
}
