//! Online prototype-based clustering and classification on the unit
//! hypersphere.
//!
//! The codebook of unit-norm prototypes is trained online by a family of
//! competitive rules: self-learning winner-takes-all, Gaussian-neighborhood
//! winner-takes-more, a competition-free similarity-weighted rule, and
//! supervised attract/repel vector quantization with an equidistant
//! push-back. A hybrid trainer switches per sample between the self-learning
//! and supervised branches depending on whether a class label is available,
//! which makes partially labeled streams first-class. Inference reports both
//! a crisp class and a fuzzy membership over all prototypes, so overlapping
//! classes keep their ambiguity instead of being forced to a hard boundary.
//!
//! Supporting modules cover dataset ingestion and preprocessing, a seeded
//! synthetic generator for overlapping clusters, batch fuzzy c-means plus
//! plain SOM/LVQ classifiers for comparison, and an evaluation harness.

pub mod baselines;
pub mod config;
pub mod data;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod hybrid;
pub mod lvq;
pub mod schedule;
pub mod som;

pub use error::{Error, Result};
