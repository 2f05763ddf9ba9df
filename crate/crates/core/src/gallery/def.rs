use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    bases_exchange_chain, coloring_glauber, even_subgraph_weights, hardcore, jsv_matching_chain,
    lazy_walk, linear_extension_chain, two_spin_glauber, GalleryChain, GraphSpec,
};
use crate::error::{Error, Result};
use crate::matrix::RationalMatrix;
use crate::model::{ChainModel, StateSpace};
use crate::rational::Rational;
use crate::stationary::solve_stationary;

/// A graph given in full or as a shorthand such as `"cycle:4"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphArg {
    Shorthand(String),
    Full(GraphSpec),
}

impl GraphArg {
    pub fn resolve(&self) -> Result<GraphSpec> {
        match self {
            GraphArg::Shorthand(s) => GraphSpec::from_shorthand(s),
            GraphArg::Full(g) => Ok(g.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphParams {
    pub graph: GraphArg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColoringParams {
    pub graph: GraphArg,
    pub q: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardcoreParams {
    pub graph: GraphArg,
    #[serde(with = "crate::rational::serde_pair")]
    pub lambda: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoSpinParams {
    pub graph: GraphArg,
    #[serde(with = "crate::rational::serde_pair")]
    pub beta: Rational,
    #[serde(with = "crate::rational::serde_pair")]
    pub gamma: Rational,
    #[serde(with = "crate::rational::serde_pair")]
    pub lambda: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetParams {
    pub n: usize,
    /// `[a, b]` means `a < b`.
    #[serde(default)]
    pub relations: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsvParams {
    pub graph: GraphArg,
    #[serde(default, with = "crate::rational::serde_opt", skip_serializing_if = "Option::is_none")]
    pub penalty: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvenParams {
    pub graph: GraphArg,
    #[serde(with = "crate::rational::serde_pair")]
    pub beta: Rational,
}

/// Chain-definition document: `{"kind": ..., "params": {...}}` or
/// `{"kind": "explicit", "matrix": [[[num, den], ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ChainDef {
    LazyWalk {
        params: GraphParams,
    },
    ColoringGlauber {
        params: ColoringParams,
    },
    Hardcore {
        params: HardcoreParams,
    },
    TwoSpin {
        params: TwoSpinParams,
    },
    LinearExtension {
        params: PosetParams,
    },
    BasesExchange {
        params: GraphParams,
    },
    JsvMatching {
        params: JsvParams,
    },
    EvenSubgraph {
        params: EvenParams,
    },
    Explicit {
        #[serde(with = "crate::rational::serde_matrix")]
        matrix: Vec<Vec<Rational>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
    },
}

impl ChainDef {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("chain definition: {e}")))
    }

    /// Inline JSON when the argument starts with `{`, otherwise a file path.
    pub fn load(arg: &str) -> Result<Self> {
        if arg.trim_start().starts_with('{') {
            return Self::parse(arg);
        }
        let text = std::fs::read_to_string(arg).map_err(|e| Error::Parse(format!("reading {arg}: {e}")))?;
        Self::parse(&text)
    }

    pub fn build(&self) -> Result<GalleryChain> {
        match self {
            ChainDef::LazyWalk { params } => lazy_walk(&params.graph.resolve()?),
            ChainDef::ColoringGlauber { params } => coloring_glauber(&params.graph.resolve()?, params.q),
            ChainDef::Hardcore { params } => hardcore(&params.graph.resolve()?, &params.lambda),
            ChainDef::TwoSpin { params } => {
                two_spin_glauber(&params.graph.resolve()?, &params.beta, &params.gamma, &params.lambda)
            }
            ChainDef::LinearExtension { params } => linear_extension_chain(params.n, &params.relations),
            ChainDef::BasesExchange { params } => bases_exchange_chain(&params.graph.resolve()?),
            ChainDef::JsvMatching { params } => {
                Ok(jsv_matching_chain(&params.graph.resolve()?, params.penalty.clone())?.gallery)
            }
            ChainDef::EvenSubgraph { params } => even_subgraph_weights(&params.graph.resolve()?, &params.beta),
            ChainDef::Explicit { matrix, labels } => {
                let m = RationalMatrix::from_rows(matrix.clone())?;
                let space = match labels {
                    Some(l) => StateSpace::new(l.clone())?,
                    None => StateSpace::indexed(m.rows()),
                };
                let chain = ChainModel::from_matrix(space, &m)?;
                let pi = solve_stationary(&m)?.dist;
                Ok(GalleryChain {
                    name: format!("explicit(n={})", m.rows()),
                    chain: Arc::new(chain),
                    declared_pi: pi,
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn parses_every_kind() {
        let docs = [
            r#"{"kind":"lazy-walk","params":{"graph":"complete:3"}}"#,
            r#"{"kind":"coloring-glauber","params":{"graph":"complete:3","q":4}}"#,
            r#"{"kind":"hardcore","params":{"graph":"path:3","lambda":[2,1]}}"#,
            r#"{"kind":"two-spin","params":{"graph":"path:2","beta":2,"gamma":"2","lambda":[1,1]}}"#,
            r#"{"kind":"linear-extension","params":{"n":3,"relations":[[0,2],[1,2]]}}"#,
            r#"{"kind":"bases-exchange","params":{"graph":"cycle:4"}}"#,
            r#"{"kind":"jsv-matching","params":{"graph":"complete-bipartite:2"}}"#,
            r#"{"kind":"even-subgraph","params":{"graph":{"n":3,"edges":[[0,1],[1,2],[0,2]]},"beta":[1,2]}}"#,
            r#"{"kind":"explicit","matrix":[[[1,2],[1,2]],[[1,3],[2,3]]]}"#,
        ];
        let sizes = [3, 24, 5, 4, 2, 4, 6, 2, 2];
        for (doc, size) in docs.iter().zip(sizes) {
            let def = ChainDef::parse(doc).unwrap();
            assert_eq!(def.build().unwrap().size(), size, "{doc}");
            let again = ChainDef::parse(&serde_json::to_string(&def).unwrap()).unwrap();
            assert_eq!(again, def);
        }
    }

    #[test]
    fn explicit_chain_gets_solved_law() {
        let g = ChainDef::parse(r#"{"kind":"explicit","matrix":[[[1,2],[1,2]],[[1,3],[2,3]]]}"#)
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(g.declared_pi.masses(), &[rat(2, 5), rat(3, 5)]);
    }

    #[test]
    fn parse_errors() {
        for bad in [
            "not json",
            r#"{"kind":"mystery"}"#,
            r#"{"kind":"lazy-walk","params":{"graph":"complete:3","extra":1}}"#,
            r#"{"kind":"explicit","matrix":[[[1,0]]]}"#,
        ] {
            assert!(matches!(ChainDef::parse(bad), Err(Error::Parse(_))), "{bad}");
        }
        let not_stochastic = ChainDef::parse(r#"{"kind":"explicit","matrix":[[[1,2]]]}"#).unwrap();
        assert!(not_stochastic.build().is_err());
    }
}
