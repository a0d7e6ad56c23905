//! Temporal link prediction for social interaction networks.
//!
//! The toolkit ingests timestamped friendship and wall-post edge lists
//! into aligned snapshot sequences, scores future interactions with
//! dynamic predictors (EWMA, time-series Adamic-Adar and Katz, and a
//! simplified block-model predictor), optionally fuses those scores with
//! current or predicted friendship networks through a convex
//! combination, and evaluates predictions with a split protocol: PRAUC
//! over never-observed pairs, AUC over previously observed pairs, and
//! the chance-corrected geometric mean (GMAUC) of the two.

pub mod config;
pub mod dataset_io;
pub mod dynamic_predictors;
pub mod error;
pub mod evaluation;
pub mod experiment;
pub mod fusion;
pub mod graph;
pub mod ingest;
pub mod scores;
pub mod spectral;
pub mod static_predictors;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{DualDataset, NetworkKind, NodeId, Pair, Snapshot, SnapshotSequence};
pub use scores::ScoreMap;
