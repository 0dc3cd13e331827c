//! Steiner Forest by monotonic moat growing, boost local search, extension and
//! autarkic pairs, all in exact rational arithmetic.

pub mod autarkic;
pub mod engine;
pub mod error;
pub mod extension;
pub mod generators;
pub mod graph;
pub mod local_search;
pub mod rational;
pub mod solvers;
pub mod verify;

pub use engine::{
    run_boosted, run_extended, run_legacy, run_shadow, BoostedOutcome, Event, EventKind, GrowthLedger,
    LegacyOutcome, MoatTrace, SetKey,
};
pub use error::{Error, Result};
pub use graph::{
    check_feasible, parse_instance, serialize_instance, shortest_path, steiner_tree_embed, validate_instance,
    Edge, Fingerprint, Forest, Instance, Vertex,
};
pub use rational::Q;
