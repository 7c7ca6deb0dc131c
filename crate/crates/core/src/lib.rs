//! Exact census of subset triples `(A, B, C)` of a finite abelian group with
//! no solution `x + y = z` (`x in A`, `y in B`, `z in C`), together with the
//! additive-combinatorics tooling used to study it: sumsets and thick
//! sumsets, Kneser and Pollard bounds, Fourier spectra, dissociated sets,
//! Bohr sets and their covers, and a constructive Bohr-cover decomposition
//! of the complement of a sumset.
//!
//! The same triples are the independent sets of the tripartite "mod"
//! hypergraph, so [`hypergraph`] cross-checks the census through a generic
//! independent-set counter.
//!
//! Runnable walkthroughs live in `examples/`; `cargo run --example census`
//! is a good starting point.

pub mod analysis;
pub mod cache;
pub mod census;
pub mod error;
pub mod fourier;
pub mod group;
pub mod hypergraph;
pub mod mask;
pub mod structure;
pub mod subset;
pub mod suite;
pub mod sumset;
pub mod tolerance;

pub use error::{Error, Result};
pub use group::{Character, Element, GroupOp, GroupSpec, Subgroup};
pub use subset::Subset;
