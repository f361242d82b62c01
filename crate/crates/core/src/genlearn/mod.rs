//! Synthetic games, vote ingestion and a per-player logistic learner.

pub mod generators;
pub mod learn;
pub mod votes;

pub use generators::{gen_erdos_renyi, gen_pref_attach, gen_uniform_random, generate, GenConfig, GenFamily};
pub use learn::{learn_lig, psne_representation_rate, LearnConfig, LearnReport, PlayerFit};
pub use votes::{court_code_map, ingest_votes, read_votes_csv, IngestReport, VoteCode, VoteMatrix};
