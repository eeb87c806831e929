//! Evolution strategies with importance-mixing sample reuse.
//!
//! The crate provides four evolution strategies (OpenAI-style ES, SNES,
//! CEM, CMA-ES) behind an ask/tell interface, a rejection-based
//! importance-mixing layer that recycles evaluated samples from previous
//! generations without biasing the new population, self-contained
//! classic-control benchmarks, a statistical suite that checks the
//! unbiasedness of the mixing procedure, and an experiment driver that
//! accounts every episode evaluation.

pub mod envs;
pub mod error;
pub mod experiment;
pub mod gaussian;
pub mod mixing;
pub mod policy;
pub mod stats;
pub mod strategies;

pub use error::{CoreError, Result};
pub use gaussian::{log_density_ratio, CovarianceRepr, GaussianPdf};
pub use mixing::{
    mix, mix_extended, mix_sun_variant, Archive, Generation, MixOutcome, Provenance,
};
pub use strategies::{rank_transform, weight_decay_penalty, Algorithm, Strategy, StrategyConfig};
