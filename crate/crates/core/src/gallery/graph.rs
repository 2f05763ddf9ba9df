use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Simple undirected graph on vertices `0..n`, optionally with a bipartition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct GraphSpec {
    n: usize,
    edges: Vec<(usize, usize)>,
    bipartition: Option<(Vec<usize>, Vec<usize>)>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bipartition: Option<(Vec<usize>, Vec<usize>)>,
}

impl TryFrom<RawGraph> for GraphSpec {
    type Error = Error;

    fn try_from(raw: RawGraph) -> Result<Self> {
        let g = GraphSpec::new(raw.n, raw.edges)?;
        match raw.bipartition {
            Some((u, v)) => g.with_bipartition(u, v),
            None => Ok(g),
        }
    }
}

impl From<GraphSpec> for RawGraph {
    fn from(g: GraphSpec) -> Self {
        RawGraph {
            n: g.n,
            edges: g.edges,
            bipartition: g.bipartition,
        }
    }
}

impl GraphSpec {
    /// Edges are normalized to `(min, max)` and sorted.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &(a, b) in &edges {
            if a >= n || b >= n {
                return Err(Error::Domain(format!("edge ({a},{b}) outside {n} vertices")));
            }
            if a == b {
                return Err(Error::Domain(format!("self-loop at {a}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::Domain(format!("duplicate edge ({a},{b})")));
            }
        }
        Ok(Self {
            n,
            edges: seen.into_iter().collect(),
            bipartition: None,
        })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        Self::new(n, edges).expect("valid")
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i - 1, i)).collect()).expect("valid")
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Domain(format!("cycle needs at least 3 vertices, got {n}")));
        }
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect())
    }

    /// `K_{a,b}` with `U = 0..a` and `V = a..a+b`.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let edges = (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v))).collect();
        Self::new(a + b, edges)
            .and_then(|g| g.with_bipartition((0..a).collect(), (a..a + b).collect()))
            .expect("valid")
    }

    pub fn with_bipartition(mut self, u: Vec<usize>, v: Vec<usize>) -> Result<Self> {
        let mut side = vec![None; self.n];
        for (s, part) in [(0u8, &u), (1u8, &v)] {
            for &x in part {
                if x >= self.n || side[x].is_some() {
                    return Err(Error::Domain(format!("bad bipartition entry {x}")));
                }
                side[x] = Some(s);
            }
        }
        if side.iter().any(Option::is_none) {
            return Err(Error::Domain("bipartition does not cover every vertex".into()));
        }
        if let Some(&(a, b)) = self.edges.iter().find(|(a, b)| side[*a] == side[*b]) {
            return Err(Error::Domain(format!("edge ({a},{b}) inside one side")));
        }
        self.bipartition = Some((u, v));
        Ok(self)
    }

    /// Removes one edge.
    pub fn without_edge(&self, a: usize, b: usize) -> Result<Self> {
        let e = (a.min(b), a.max(b));
        let pos = self
            .edges
            .iter()
            .position(|&x| x == e)
            .ok_or_else(|| Error::Domain(format!("no edge ({a},{b})")))?;
        let mut g = self.clone();
        g.edges.remove(pos);
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn bipartition(&self) -> Option<(&[usize], &[usize])> {
        self.bipartition.as_ref().map(|(u, v)| (u.as_slice(), v.as_slice()))
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn max_degree(&self) -> usize {
        self.neighbors().iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Connected-component id of every vertex.
    pub fn components(&self) -> Vec<usize> {
        let adj = self.neighbors();
        let mut comp = vec![usize::MAX; self.n];
        let mut next = 0;
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.components().iter().all(|&c| c == 0)
    }

    /// Parses shorthands `complete:n`, `path:n`, `cycle:n`,
    /// `complete-bipartite:n` (that is `K_{n,n}`) and `empty:n`.
    pub fn from_shorthand(text: &str) -> Result<Self> {
        let (kind, arg) = text
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("graph shorthand {text:?} lacks ':'")))?;
        let n: usize = arg
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("graph size {arg:?}: {e}")))?;
        match kind.trim() {
            "complete" => Ok(Self::complete(n)),
            "path" => Ok(Self::path(n)),
            "cycle" => Self::cycle(n),
            "complete-bipartite" => Ok(Self::complete_bipartite(n, n)),
            "empty" => Self::new(n, Vec::new()),
            other => Err(Error::Parse(format!("unknown graph shorthand {other:?}"))),
        }
    }
}
