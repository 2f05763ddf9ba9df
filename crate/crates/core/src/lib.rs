//! Perfect (zero-error) samplers for the stationary law of finite Markov
//! chains, built from a mixing-time certificate and exact oracles.
//!
//! The usual entry point is [`sampler::mc_perfect_sampler`]: give it a
//! [`model::ChainModel`], a start state, a mode and a certificate source,
//! then call [`sampler::PerfectSampler::draw`] with any [`bits::BitSource`].

pub mod bits;
pub mod dist;
pub mod error;
pub mod gallery;
pub mod harness;
pub mod matrix;
pub mod mixing;
pub mod model;
pub mod rational;
pub mod sampler;
pub mod stationary;

pub use bits::{BitSource, PrefixBits, SeededBits};
pub use dist::FiniteDist;
pub use error::{Error, Result};
pub use matrix::RationalMatrix;
pub use model::{ChainModel, Limits, StateSpace};
pub use rational::Rational;
pub use sampler::{
    coin_eps, mc_perfect_sampler, main_theorem_sampler, proposal_tolerance, Branch, CertificateSource, MixingBound, Mode,
    PerfectSampler, SampleReport, SamplerConfig,
};
pub use stationary::{solve_stationary, StationaryVector};
