//! Next-basket recommendation from personalized item frequencies.
//!
//! The core predictor represents every user as a temporally decayed item-frequency
//! vector (recent baskets count more, in two decay tiers: within a group of
//! consecutive baskets and across groups), finds the user's nearest neighbors under
//! Euclidean distance, and blends the user's own vector with the neighbor average
//! before taking the top-scoring items as the predicted next basket. Around that
//! sit three frequency/kNN baselines, a fold-based evaluation harness with grid
//! search, dataset pattern-analysis tools, and a small linear-RNN probe that tests
//! whether gradient training can discover repeated-vector addition.
//!
//! Every capability is demonstrated by a runnable example:
//!
//! ```text
//! cargo run --example build_corpus        # CSV ingest, filtering, snapshot round-trip
//! cargo run --example decayed_vectors     # item-frequency and decayed user vectors
//! cargo run --example nearest_neighbors   # Euclidean kNN over user vectors
//! cargo run --example predict_methods     # the predictor and all three baselines
//! cargo run --example evaluate_fold       # fold split + recall/NDCG report
//! cargo run --example grid_search         # validation-driven hyperparameter search
//! cargo run --example pattern_analysis    # repeat/collaborative purchase ratios, gap histogram
//! cargo run --example rnn_addition_probe  # linear RNN vs. the vector-addition task
//! ```
//!
//! The same functionality is scriptable through one thin binary (`tifuknn`) with
//! subcommands `ingest`, `analyze`, `recommend`, `evaluate`, `grid-search`, and
//! `rnn-probe`; see [`cli`].

pub mod analysis;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod knn;
pub mod predictor;
pub mod presets;
pub mod representation;
pub mod rnnprobe;
pub mod synth;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
