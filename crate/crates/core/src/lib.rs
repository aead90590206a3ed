//! Random r-uniform d-regular hypergraphs: sampling, coloring, and
//! first-moment certificates.
//!
//! The crate is organised around one pipeline. A bucket/point system draws a
//! multi-hypergraph with independent uniform edges, trims buckets down to
//! degree `d` by rank, and then grows the partition back to full regularity
//! through a sequence of uniformity-preserving augmentation steps driven by
//! the exact `q_k` part-meeting distribution. A greedy coloring of the
//! stripped simple hypergraph is carried through the transformation and
//! patched afterwards with a small fresh palette.
//!
//! Alongside the constructive path, [`theory`] evaluates the closed-form
//! predictions (the `z2`/`z1` system, the first-moment condition, predicted
//! chromatic number and independence fraction) so experiments can compare
//! observed values against them, and [`oracle`] provides exhaustive
//! chromatic/independence solvers for desk-size instances.
//!
//! The crate is `no_std`-compatible (`default-features = false`); all
//! randomized operations take a caller-supplied [`rand::Rng`] so results are
//! reproducible from seeds alone.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod coloring;
pub mod hypergraph;
pub mod oracle;
pub mod pipeline;
pub mod qk;
pub mod sampler;
pub mod theory;

pub use hypergraph::{ClassProfile, Coloring, DegeneracyOrder, Hypergraph, Vertex};
pub use pipeline::{PipelineParams, PipelineResult, PipelineRun};
pub use qk::{QkDistribution, QkSampler};
pub use sampler::{DegreeDiagnostics, PointSystem, RegularSample, StripStats};
pub use theory::TheoryReport;

// Re-exported so downstream crates and tests share the exact-arithmetic types
// used in public signatures.
pub use num_bigint;
pub use num_rational;
