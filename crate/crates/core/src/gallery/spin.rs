use std::collections::HashMap;

use num_traits::{One, Zero};

use super::{check_cap, GalleryChain, GraphSpec};
use crate::error::{Error, Result};
use crate::rational::{int, rat, Rational};

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Half-lazy simple random walk; stationary law proportional to degree.
pub fn lazy_walk(graph: &GraphSpec) -> Result<GalleryChain> {
    if !graph.is_connected() {
        return Err(Error::Domain("lazy walk needs a connected graph".into()));
    }
    let n = graph.n();
    let adj = graph.neighbors();
    let rows = adj
        .iter()
        .enumerate()
        .map(|(v, nb)| {
            if nb.is_empty() {
                return vec![(v, int(1))];
            }
            let share = rat(1, 2 * nb.len() as i64);
            let mut row = vec![(v, rat(1, 2))];
            row.extend(nb.iter().map(|&w| (w, share.clone())));
            row
        })
        .collect();
    let weights = adj.iter().map(|nb| int(nb.len().max(1) as i64)).collect();
    GalleryChain::assemble(format!("lazy-walk(n={n})"), (0..n).map(|v| v.to_string()).collect(), weights, rows)
}

/// All proper `q`-colorings in lexicographic order.
pub fn proper_colorings(graph: &GraphSpec, q: usize) -> Result<Vec<Vec<usize>>> {
    let adj = graph.neighbors();
    let n = graph.n();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    fn rec(
        adj: &[Vec<usize>],
        q: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<()> {
        let v = current.len();
        if v == adj.len() {
            out.push(current.clone());
            return check_cap(out.len(), "colorings");
        }
        for c in 0..q {
            if adj[v].iter().all(|&w| w > v || current[w] != c) {
                current.push(c);
                rec(adj, q, current, out)?;
                current.pop();
            }
        }
        Ok(())
    }
    rec(&adj, q, &mut current, &mut out)?;
    Ok(out)
}

/// Heat-bath Glauber dynamics on proper `q`-colorings; uniform stationary law.
pub fn coloring_glauber(graph: &GraphSpec, q: usize) -> Result<GalleryChain> {
    let delta = graph.max_degree();
    if q < delta + 2 {
        return Err(Error::Domain(format!("need q >= max degree + 2 = {}, got q = {q}", delta + 2)));
    }
    let n = graph.n();
    let adj = graph.neighbors();
    let states = proper_colorings(graph, q)?;
    if states.is_empty() {
        return Err(Error::EmptySupport);
    }
    let index: HashMap<&[usize], usize> = states.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    let mut rows = Vec::with_capacity(states.len());
    for s in &states {
        let mut row = Vec::new();
        for v in 0..n {
            let allowed: Vec<usize> = (0..q).filter(|&c| adj[v].iter().all(|&w| s[w] != c)).collect();
            let p = rat(1, (n * allowed.len()) as i64);
            let mut next = s.clone();
            for c in allowed {
                next[v] = c;
                row.push((index[next.as_slice()], p.clone()));
            }
        }
        rows.push(row);
    }
    let labels = states.iter().map(|s| join(s.iter())).collect();
    let weights = vec![int(1); states.len()];
    GalleryChain::assemble(format!("coloring-glauber(n={n},q={q})"), labels, weights, rows)
}

struct TwoSpin<'a> {
    edges: &'a [(usize, usize)],
    beta: &'a Rational,
    gamma: &'a Rational,
    lambda: &'a Rational,
}

impl TwoSpin<'_> {
    fn weight(&self, sigma: u64) -> Rational {
        let spin = |v: usize| sigma >> v & 1 == 1;
        let mut w = Rational::one();
        for &(a, b) in self.edges {
            match (spin(a), spin(b)) {
                (false, false) => w *= self.beta,
                (true, true) => w *= self.gamma,
                _ => {}
            }
        }
        for _ in 0..sigma.count_ones() {
            w *= self.lambda;
        }
        w
    }
}

fn ones(mask: u64, width: usize) -> Vec<usize> {
    (0..width).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Heat-bath single-site dynamics for the two-spin system with edge
/// interaction `((β,1),(1,γ))` and external field `λ`.
pub fn two_spin_glauber(
    graph: &GraphSpec,
    beta: &Rational,
    gamma: &Rational,
    lambda: &Rational,
) -> Result<GalleryChain> {
    if [beta, gamma, lambda].iter().any(|x| *x < &Rational::zero()) {
        return Err(Error::Domain("two-spin parameters must be nonnegative".into()));
    }
    let n = graph.n();
    if n >= 63 || (1usize << n) > super::enumeration_cap() {
        return Err(Error::Resource(format!("2^{n} configurations exceed the enumeration cap")));
    }
    let model = TwoSpin {
        edges: graph.edges(),
        beta,
        gamma,
        lambda,
    };
    let mut states: Vec<(u64, Rational)> = (0..1u64 << n)
        .map(|s| (s, model.weight(s)))
        .filter(|(_, w)| !w.is_zero())
        .collect();
    if states.is_empty() {
        return Err(Error::EmptySupport);
    }
    states.sort_by_key(|(s, _)| (s.count_ones(), ones(*s, n)));
    let index: HashMap<u64, usize> = states.iter().enumerate().map(|(i, (s, _))| (*s, i)).collect();
    let site = rat(1, n.max(1) as i64);
    let rows = states
        .iter()
        .enumerate()
        .map(|(i, (s, _))| {
            if n == 0 {
                return vec![(i, int(1))];
            }
            let mut row = Vec::new();
            for v in 0..n {
                let down = s & !(1 << v);
                let up = s | (1 << v);
                let (w0, w1) = (model.weight(down), model.weight(up));
                let z = &w0 + &w1;
                for (target, w) in [(down, w0), (up, w1)] {
                    if !w.is_zero() {
                        row.push((index[&target], &site * w / &z));
                    }
                }
            }
            row
        })
        .collect();
    let labels = states
        .iter()
        .map(|(s, _)| (0..n).map(|v| if s >> v & 1 == 1 { '1' } else { '0' }).collect())
        .collect();
    let weights = states.into_iter().map(|(_, w)| w).collect();
    GalleryChain::assemble(
        format!("two-spin(n={n},beta={beta},gamma={gamma},lambda={lambda})"),
        labels,
        weights,
        rows,
    )
}

/// Hardcore model: the two-spin system with `β = 1`, `γ = 0`.
pub fn hardcore(graph: &GraphSpec, lambda: &Rational) -> Result<GalleryChain> {
    let mut g = two_spin_glauber(graph, &int(1), &int(0), lambda)?;
    g.name = format!("hardcore(n={},lambda={lambda})", graph.n());
    Ok(g)
}

/// Fundamental cycles of a spanning forest, as edge-index bitmasks.
fn cycle_basis(graph: &GraphSpec) -> Vec<u64> {
    let n = graph.n();
    let edges = graph.edges();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut depth = vec![usize::MAX; n];
    let mut tree = vec![false; edges.len()];
    let mut incident = vec![Vec::new(); n];
    for (k, &(a, b)) in edges.iter().enumerate() {
        incident[a].push((b, k));
        incident[b].push((a, k));
    }
    for root in 0..n {
        if depth[root] != usize::MAX {
            continue;
        }
        depth[root] = 0;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &(w, k) in &incident[v] {
                if depth[w] == usize::MAX {
                    depth[w] = depth[v] + 1;
                    parent[w] = Some((v, k));
                    tree[k] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    edges
        .iter()
        .enumerate()
        .filter(|(k, _)| !tree[*k])
        .map(|(k, &(a, b))| {
            let mut mask = 1u64 << k;
            let (mut x, mut y) = (a, b);
            while x != y {
                if depth[x] < depth[y] {
                    std::mem::swap(&mut x, &mut y);
                }
                let (p, e) = parent[x].expect("non-root");
                mask ^= 1 << e;
                x = p;
            }
            mask
        })
        .collect()
}

/// Gibbs law `β^{|S|}` over even edge subsets, with a lazy Metropolis walk
/// that flips a uniformly chosen cycle-basis element.
pub fn even_subgraph_weights(graph: &GraphSpec, beta: &Rational) -> Result<GalleryChain> {
    if *beta <= Rational::zero() {
        return Err(Error::Domain(format!("beta must be positive, got {beta}")));
    }
    let m = graph.edges().len();
    if m > 63 {
        return Err(Error::Resource(format!("{m} edges exceed the 63-edge limit")));
    }
    let basis = cycle_basis(graph);
    let k = basis.len();
    if k >= 63 || (1usize << k) > super::enumeration_cap() {
        return Err(Error::Resource(format!("2^{k} even subgraphs exceed the enumeration cap")));
    }
    let mut states: Vec<u64> = (0..1u64 << k)
        .map(|c| basis.iter().enumerate().filter(|(i, _)| c >> i & 1 == 1).fold(0, |acc, (_, b)| acc ^ b))
        .collect();
    states.sort_by_key(|s| (s.count_ones(), ones(*s, m)));
    let index: HashMap<u64, usize> = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let power = |e: u32| -> Rational { (0..e).fold(Rational::one(), |acc, _| acc * beta) };
    let rows = states
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let mut row = vec![(i, rat(1, 2))];
            for &c in &basis {
                let t = s ^ c;
                let accept = Rational::one().min(power(t.count_ones()) / power(s.count_ones()));
                let p = rat(1, 2 * k as i64) * accept;
                row.push((i, rat(1, 2 * k as i64) - &p));
                row.push((index[&t], p));
            }
            if k == 0 {
                row = vec![(i, int(1))];
            }
            row
        })
        .collect();
    let labels = states
        .iter()
        .map(|&s| {
            let es: Vec<String> = ones(s, m).into_iter().map(|e| format!("{}-{}", graph.edges()[e].0, graph.edges()[e].1)).collect();
            format!("{{{}}}", es.join(","))
        })
        .collect();
    let weights = states.iter().map(|s| power(s.count_ones())).collect();
    GalleryChain::assemble(format!("even-subgraph(n={},beta={beta})", graph.n()), labels, weights, rows)
}
