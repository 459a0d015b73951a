//! Distributional vector spaces, compositional phrase models and
//! feature-inclusion entailment measures.
//!
//! The pipeline runs corpus → PPMI space → verb tensors → composed phrase
//! vectors → entailment scores → AUC reports.

pub mod composition;
pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod measures;
pub mod tensor;
pub mod vector;

pub use error::{Error, Result};
pub use measures::{Measure, MeasureConfig};
pub use vector::{DistVector, FeatureSet, VectorSpace, Vocabulary};
