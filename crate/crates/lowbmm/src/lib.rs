//! Lower-dimensional Bayesian Mallows model (lowBMM): unsupervised variable
//! selection on ranking data.
//!
//! The model assumes only an unknown `n*`-subset of the items follows a
//! Mallows distribution around a consensus ranking, while the remaining
//! items carry uniform noise. Inference runs a Metropolis-Hastings chain
//! over the joint state `(rho, A*)`; this crate also ships the simulation
//! generators, the off-line scale tuning, posterior summaries, and the
//! evaluation metrics and baseline used in benchmarking.

pub mod alpha;
pub mod datagen;
pub mod error;
pub mod io;
pub mod mallows;
pub mod metrics;
pub mod perm;
pub mod postprocess;
pub mod sampler;
pub mod seed;

pub use datagen::{GroundTruth, Provenance, RankingDataset};
pub use error::{Error, Result};
pub use mallows::MallowsParams;
pub use perm::{ItemSet, Ranking};
pub use postprocess::{PosteriorSummary, SelectionFrequencies};
pub use sampler::{ChainState, PosteriorSamples, SamplerConfig};
