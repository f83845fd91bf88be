//! Round-accounted LOCAL-model simulator and verifier for deterministic
//! Δ-coloring of dense graphs.
//!
//! Phases run in order: almost-clique decomposition, loophole enumeration and
//! hard/easy classification, the four hard-clique phases (balanced matching,
//! sparsification, slack triads, list coloring), and finally the easy cliques
//! and loopholes. Every phase checks its own invariants and aborts with a
//! witness when one fails.

pub mod acd;
pub mod error;
pub mod generator;
pub mod graph;
pub mod loophole;
pub mod matching;
pub mod oracle;
mod par;
pub mod pipeline;
pub mod sim;
pub mod subroutines;
pub mod triads;

pub use error::{Error, Result};
pub use graph::{Color, Coloring, ColoringReport, Graph, Vertex};
pub use par::is_parallel;
pub use sim::{PhaseMode, RoundTrace};
pub use pipeline::{exit_code, run_pipeline, PipelineConfig, PipelineOutput};
