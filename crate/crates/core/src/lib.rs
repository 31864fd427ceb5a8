//! k-regret minimizing sets over multi-attribute data.
//!
//! A dataset is a set of points with non-negative attributes; a user
//! preference is a non-negative direction `u`, and the score of a point `p`
//! is the inner product `⟨u, p⟩`. A subset `Q ⊆ P` has regret ratio at most
//! `ε` when, for every preference, the best score in `Q` is within a factor
//! `(1 - ε)` of the k-th best score in `P`. This crate computes small such
//! subsets and evaluates how good they are:
//!
//! - [`rank`]: scoring, top-k ranking, per-direction regret, skyline.
//! - [`exact`]: exact maximum regret for d = 2 (rotational sweep) and d = 3
//!   (candidate-ray enumeration), plus a deterministic grid oracle for any d.
//! - [`eval`]: sampled regret estimation and regret distributions.
//! - [`coreset`]: directional width, ε-kernel certificates, and the staged
//!   randomized regret-set algorithm (RRS).
//! - [`hitting`]: scaling normalization, δ-nets, near-top-k range systems,
//!   greedy hitting set, the bicriteria `rms_hs` pipeline, and the
//!   min-error binary search.
//! - [`greedy`]: a sampled-direction greedy baseline.
//! - [`datasets`]: synthetic generators (sphere, anti-correlated, skyline
//!   clusters) and CSV ingestion.
//!
//! All numeric kernels are generic over the scalar type via [`Scalar`]
//! (`f32` or `f64`); the unqualified type names default to `f64`.

pub mod coreset;
pub mod datasets;
pub mod error;
pub mod eval;
pub mod exact;
pub mod greedy;
pub mod hitting;
pub mod points;
pub mod rank;
mod scalar;
pub(crate) mod util;

pub use error::{Error, Result};
pub use points::{PointSet, Preference, RankedResult};
pub use scalar::Scalar;
pub use util::derive_seed;

/// `f32` aliases for the core domain types (the defaults are `f64`).
pub mod f32 {
    pub type PointSet = crate::points::PointSet<f32>;
    pub type Preference = crate::points::Preference<f32>;
    pub type RankedResult = crate::points::RankedResult<f32>;
}
