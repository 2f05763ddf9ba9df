//! Concrete chains with rational kernels and exact reference distributions.

mod combinatorial;
mod def;
mod graph;
mod jsv;
mod spin;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dist::FiniteDist;
use crate::error::{Error, Result};
use crate::model::{ChainModel, Limits, StateSpace};
use crate::rational::Rational;
use crate::stationary::{check_reversible, gibbs_from_weights, solve_stationary};

pub use combinatorial::{bases_exchange_chain, linear_extension_chain, spanning_trees};
pub use def::{
    ChainDef, ColoringParams, EvenParams, GraphArg, GraphParams, HardcoreParams, JsvParams, PosetParams,
    TwoSpinParams,
};
pub use graph::GraphSpec;
pub use jsv::{
    jsv_matching_chain, jsv_matching_chain_with_weights, jsv_perfect_matching_sampler, JsvChain,
    JsvMatchingSampler, MatchingDraw, MatchingState,
};
pub use spin::{
    coloring_glauber, even_subgraph_weights, hardcore, lazy_walk, proper_colorings,
    two_spin_glauber,
};

/// A chain together with the stationary law it is designed to have.
#[derive(Debug, Clone)]
pub struct GalleryChain {
    pub name: String,
    pub chain: Arc<ChainModel>,
    pub declared_pi: FiniteDist,
}

/// Outcome of checking a gallery chain against its declared law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GalleryCheck {
    pub reversible: bool,
    pub stationary_matches: bool,
    pub irreducible: bool,
    pub aperiodic: bool,
}

impl GalleryCheck {
    pub fn all(&self) -> bool {
        self.reversible && self.stationary_matches && self.irreducible && self.aperiodic
    }
}

impl GalleryChain {
    /// Builds the chain and its Gibbs law; refuses reducible kernels.
    pub(crate) fn assemble(
        name: impl Into<String>,
        labels: Vec<String>,
        weights: Vec<Rational>,
        rows: Vec<Vec<(usize, Rational)>>,
    ) -> Result<Self> {
        let name = name.into();
        let chain = ChainModel::new(StateSpace::new(labels)?, rows)?;
        if !chain.is_irreducible() {
            return Err(Error::Modeling(format!("{name}: kernel is reducible on its state space")));
        }
        Ok(Self {
            name,
            chain: Arc::new(chain),
            declared_pi: gibbs_from_weights(&weights)?,
        })
    }

    pub fn size(&self) -> usize {
        self.chain.size()
    }

    /// Exact reversibility, stationarity, irreducibility and aperiodicity.
    pub fn check(&self, limits: &Limits) -> Result<GalleryCheck> {
        let p = self.chain.transition_matrix(limits.dense_states)?;
        Ok(GalleryCheck {
            reversible: check_reversible(&p, &self.declared_pi)?,
            stationary_matches: solve_stationary(&p)?.dist == self.declared_pi,
            irreducible: self.chain.is_irreducible(),
            aperiodic: self.chain.has_self_loop(),
        })
    }
}

pub(crate) fn enumeration_cap() -> usize {
    Limits::from_env().enumeration
}

pub(crate) fn check_cap(count: usize, what: &str) -> Result<()> {
    let cap = enumeration_cap();
    if count > cap {
        return Err(Error::Resource(format!("{what}: {count} states exceed enumeration cap {cap}")));
    }
    Ok(())
}
