//! Batch analysis of multimodal collaborative-design annotation corpora.
//!
//! Pipeline: [`io::parse_corpus`] builds a validated [`model::Corpus`];
//! [`interval::find_parallel_pairs`] finds concurrent units;
//! [`classify`] labels each pair integrated or not (and redundant or
//! complementary across channels); [`segment`] cuts the timeline into
//! episodes of constant alignment; [`coalition`] finds aligned subgroups
//! opposed to others; [`stats`] aggregates; [`report`] ties it together.
//!
//! With the default `parallel` feature, per-pair and per-slice stages run on
//! rayon; [`exec::Execution::Sequential`] forces a single thread. Both paths
//! yield identical output.

pub mod classify;
pub mod coalition;
pub mod error;
pub mod exec;
pub mod interval;
pub mod io;
pub mod model;
pub mod pattern;
pub mod report;
pub mod segment;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use exec::Execution;
