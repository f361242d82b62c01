//! Linear influence games: PSNE computation and counting, most-influential
//! node sets, coalition analyses, transforms, hardness gadgets, generators
//! and a vote-matrix learner.
//!
//! ```
//! use lig::{brute_force_psne, InfluenceGame, JointAction};
//!
//! // two players who each want to match the other
//! let g = InfluenceGame::new(vec![0.0, 0.0], [(0, 1, 1.0), (1, 0, 1.0)]).unwrap();
//! let psne = brute_force_psne(&g, None).unwrap();
//! assert_eq!(psne, vec![JointAction::uniform(2, -1), JointAction::uniform(2, 1)]);
//! ```

pub mod brute;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod genlearn;
pub mod influence;
pub mod io;
pub mod reductions;
pub mod scenarios;
pub mod solvers;
pub mod transforms;

pub use brute::{brute_force_extension_count, brute_force_psne, DEFAULT_BRUTE_CAP};
pub use error::{Error, PartialSearch, Result};
pub use game::{Arc, Domain, DomainVector, InfluenceGame, JointAction, PartialAssignment};
pub use solvers::{SearchConfig, SearchStats};
