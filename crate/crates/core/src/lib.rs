//! Matching engine for parsed CVs and job posts.
//!
//! The pipeline scores a candidate against a job post along four axes —
//! general skills, domain skills, organizational culture, and required
//! skills — behind a hard education filter, then ranks candidate pools
//! with a majority-rule multi-criteria aggregate.
//!
//! Building blocks:
//!
//! - [`docstore`] — JSON document store for CVs and job posts
//! - [`textkit`] — tokenization, n-grams, edit similarity, noun chunking
//! - [`embeddings`] — word-vector file loading, cosine, nearest neighbors
//! - [`ontology`] — typed concept graphs (equivalence / super-topic /
//!   contributes-to) with fuzzy label lookup
//! - [`skillgraph`] — concept-graph extraction from text against an ontology
//! - [`culture`] — culture value tree and 12-pole document profiles
//! - [`graphsim`] — graph edit distance bounds and a normalized match score
//! - [`screenrank`] — education gate, axis scoring, MR aggregation, reports
//! - [`taxonomy`] — draft domain ontology bootstrapping from a corpus
//! - [`config`] — run configuration and the assembled [`config::Engine`]

pub mod config;
pub mod culture;
pub mod docstore;
pub mod embeddings;
pub mod error;
pub mod graphsim;
pub mod ontology;
pub mod screenrank;
pub mod skillgraph;
pub mod taxonomy;
pub mod textkit;

pub use config::{Engine, RunConfig};
pub use error::{Error, Result};
