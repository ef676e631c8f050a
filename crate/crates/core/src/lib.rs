//! Symbolic computation with even FC-type Artin groups.
//!
//! Provides defining graphs with validation, words with a decidable word
//! problem, parabolic subgroup algebra, presentations of retraction
//! kernels, and a constructive intersection algorithm for parabolic
//! subgroups with verifiable certificates.

pub mod error;
pub mod graph;
pub mod word;

pub mod intersect;
pub mod kernel;
pub mod oracle;
pub mod parabolic;
pub mod solve;

pub use error::{Error, Result};
pub use graph::{ArtinGraph, RawGraph, ValidationReport, VertexId, VertexSet};
pub use word::{GeneratorMap, Syllable, Word};
