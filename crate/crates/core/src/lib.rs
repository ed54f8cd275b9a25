//! Max-sum diversification: select a subset maximizing the sum of pairwise
//! distances, subject to matroid or matroid-intersection constraints.
//!
//! For distances of negative type (Euclidean, Manhattan, cosine, Jaccard)
//! single-swap local search over bases is a `(1 - 5/k)`-approximation in
//! `O(n k^2 log k)` unit operations, p-exchange search handles matroid
//! intersection with a PTAS schedule, and a non-oblivious potential extends
//! the guarantee to objectives `g = d + f` with `f` monotone submodular.
//!
//! The `maxdiv` binary exposes `run`, `verify`, and `bench`.

pub mod bench;
pub mod cli;
pub mod config;
pub mod dispersion;
pub mod distance;
pub mod error;
pub mod intersection;
pub mod local_search;
pub mod matroid;
pub mod numeric;
pub mod oracle;
pub mod report;
pub mod submodular;
pub mod synth;
pub mod verify;

pub use error::{Error, Result};
