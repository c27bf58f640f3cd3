//! Speech-based blood-pressure class clustering.
//!
//! The pipeline runs recordings through [`audio::preprocess`], summarises each clip with
//! [`features::extract_feature_vector`], clusters the standardized vectors with batch and
//! incremental k-means plus centroids searched by the [`ffi`] optimizer, multiplies the two
//! soft memberships into Low/Normal/High classes and scores the result with [`metrics`].

// `!(x > 0.0)` style checks are deliberate: they reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audio;
pub mod features;
pub mod ffi;
pub mod clustering;
pub mod metrics;
pub mod harness;
