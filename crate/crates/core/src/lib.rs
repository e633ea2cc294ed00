//! Assessment toolkit for open-ended questions with candidate responses.
//!
//! The crate covers the full desk-scale pipeline: corpus and question
//! ingestion, exact top-k inner-product retrieval, query augmentation,
//! pluggable response scoring, teacher-judgment aggregation, ranking and
//! classification metrics, and question clustering with validity indices.
//!
//! Hot inner loops (index scans, k-means assignment, silhouette) are
//! data-parallel via rayon when the default `parallel` feature is enabled;
//! the sequential fallbacks produce identical results.

pub mod augment;
pub mod cluster;
pub mod embed;
pub mod error;
pub mod index;
pub mod metrics;
pub mod model;
pub mod raters;
pub mod scorer;
pub mod synthetic;

pub use error::{Error, Result};
