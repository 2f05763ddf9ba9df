use std::collections::HashMap;

use super::{check_cap, GalleryChain, GraphSpec};
use crate::error::{Error, Result};
use crate::rational::{int, rat};

fn is_acyclic(n: usize, relations: &[(usize, usize)]) -> bool {
    let mut indeg = vec![0usize; n];
    let mut out = vec![Vec::new(); n];
    for &(a, b) in relations {
        out[a].push(b);
        indeg[b] += 1;
    }
    let mut ready: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = ready.pop() {
        seen += 1;
        for &w in &out[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                ready.push(w);
            }
        }
    }
    seen == n
}

/// Lazy adjacent-transposition walk on the linear extensions of the partial
/// order generated by `relations` (`(a, b)` meaning `a < b`).
pub fn linear_extension_chain(n: usize, relations: &[(usize, usize)]) -> Result<GalleryChain> {
    if let Some(&(a, b)) = relations.iter().find(|(a, b)| *a >= n || *b >= n || a == b) {
        return Err(Error::Domain(format!("bad relation ({a},{b}) on {n} elements")));
    }
    if !is_acyclic(n, relations) {
        return Err(Error::Domain("relations contain a cycle".into()));
    }
    let mut below = vec![vec![false; n]; n];
    for &(a, b) in relations {
        below[a][b] = true;
    }
    let mut states = Vec::new();
    let mut current = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(
        below: &[Vec<bool>],
        current: &mut Vec<usize>,
        used: &mut [bool],
        out: &mut Vec<Vec<usize>>,
    ) -> Result<()> {
        let n = below.len();
        if current.len() == n {
            out.push(current.clone());
            return check_cap(out.len(), "linear extensions");
        }
        for v in 0..n {
            // v may come next once everything required below it is placed
            if !used[v] && (0..n).all(|u| !below[u][v] || used[u]) {
                used[v] = true;
                current.push(v);
                rec(below, current, used, out)?;
                current.pop();
                used[v] = false;
            }
        }
        Ok(())
    }
    rec(&below, &mut current, &mut used, &mut states)?;
    let index: HashMap<&[usize], usize> = states.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    let rows = states
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if n < 2 {
                return vec![(i, int(1))];
            }
            let p = rat(1, 2 * (n as i64 - 1));
            let mut row = vec![(i, rat(1, 2))];
            for k in 0..n - 1 {
                let target = if below[s[k]][s[k + 1]] {
                    i
                } else {
                    let mut t = s.clone();
                    t.swap(k, k + 1);
                    index[t.as_slice()]
                };
                row.push((target, p.clone()));
            }
            row
        })
        .collect();
    let labels = states
        .iter()
        .map(|s| s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("<"))
        .collect();
    let weights = vec![int(1); states.len()];
    GalleryChain::assemble(format!("linear-extension(n={n})"), labels, weights, rows)
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Spanning trees as sorted lists of edge indices, in lexicographic order.
pub fn spanning_trees(graph: &GraphSpec) -> Result<Vec<Vec<usize>>> {
    if !graph.is_connected() {
        return Err(Error::Domain("spanning trees need a connected graph".into()));
    }
    let n = graph.n();
    let edges = graph.edges();
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(n - 1);
    fn rec(
        edges: &[(usize, usize)],
        n: usize,
        from: usize,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<()> {
        if chosen.len() == n - 1 {
            out.push(chosen.clone());
            return check_cap(out.len(), "spanning trees");
        }
        let need = n - 1 - chosen.len();
        for k in from..edges.len() {
            if edges.len() - k < need {
                break;
            }
            let mut parent: Vec<usize> = (0..n).collect();
            let mut ok = true;
            for &e in chosen.iter().chain(std::iter::once(&k)) {
                let (a, b) = edges[e];
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra == rb {
                    ok = false;
                    break;
                }
                parent[ra] = rb;
            }
            if ok {
                chosen.push(k);
                rec(edges, n, k + 1, chosen, out)?;
                chosen.pop();
            }
        }
        Ok(())
    }
    rec(edges, n, 0, &mut chosen, &mut out)?;
    Ok(out)
}

/// Down-up walk on spanning trees: drop a uniform tree edge, then add a
/// uniform edge across the resulting cut. Uniform stationary law.
pub fn bases_exchange_chain(graph: &GraphSpec) -> Result<GalleryChain> {
    let states = spanning_trees(graph)?;
    let n = graph.n();
    let edges = graph.edges();
    let index: HashMap<&[usize], usize> = states.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    let rows = states
        .iter()
        .enumerate()
        .map(|(i, tree)| {
            if tree.is_empty() {
                return vec![(i, int(1))];
            }
            let mut row = Vec::new();
            for (pos, _) in tree.iter().enumerate() {
                let rest: Vec<usize> = tree.iter().enumerate().filter(|(q, _)| *q != pos).map(|(_, e)| *e).collect();
                let mut parent: Vec<usize> = (0..n).collect();
                for &e in &rest {
                    let (ra, rb) = (find(&mut parent, edges[e].0), find(&mut parent, edges[e].1));
                    parent[ra] = rb;
                }
                let cut: Vec<usize> = (0..edges.len())
                    .filter(|&f| find(&mut parent, edges[f].0) != find(&mut parent, edges[f].1))
                    .collect();
                let p = rat(1, (tree.len() * cut.len()) as i64);
                for f in cut {
                    let mut next = rest.clone();
                    next.push(f);
                    next.sort_unstable();
                    row.push((index[next.as_slice()], p.clone()));
                }
            }
            row
        })
        .collect();
    let labels = states
        .iter()
        .map(|t| {
            let es: Vec<String> = t.iter().map(|&e| format!("{}-{}", edges[e].0, edges[e].1)).collect();
            format!("{{{}}}", es.join(","))
        })
        .collect();
    let weights = vec![int(1); states.len()];
    GalleryChain::assemble(format!("bases-exchange(n={n},m={})", edges.len()), labels, weights, rows)
}
