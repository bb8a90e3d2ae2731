//! Evaluation toolkit for generative models of graphs.
//!
//! Two metric families are provided: kernel MMD over graph statistics
//! ([`mmd`]) and metrics over GIN graph embeddings ([`embed_metrics`]).
//! [`generators`] builds the synthetic datasets and the perturbation
//! protocol, [`ordering`] the node orderings and sequence encodings, and
//! [`harness`] the experiment drivers used by the `ggeval` binary.

pub mod embed_metrics;
pub mod error;
pub mod generators;
pub mod gin;
pub mod graph;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod mmd;
pub mod orbits;
pub mod ordering;
pub mod report;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use graph::{Graph, GraphSet, Provenance};
pub use rng::Rng;
