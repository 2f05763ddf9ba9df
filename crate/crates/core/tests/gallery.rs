use num_traits::{One, Zero};
use perfect_sampler::bits::{dyadic, PrefixBits};
use perfect_sampler::gallery::{
    bases_exchange_chain, coloring_glauber, even_subgraph_weights, hardcore, jsv_matching_chain,
    jsv_matching_chain_with_weights, lazy_walk, linear_extension_chain, proper_colorings, two_spin_glauber,
    ChainDef, GalleryChain, GraphSpec,
};
use perfect_sampler::rational::{int, rat};
use perfect_sampler::stationary::is_stationary;
use perfect_sampler::{solve_stationary, Error, Limits, Rational};

fn all_chains() -> Vec<GalleryChain> {
    let k4 = GraphSpec::complete(4);
    let c4 = GraphSpec::cycle(4).unwrap();
    vec![
        lazy_walk(&GraphSpec::complete(5)).unwrap(),
        lazy_walk(&GraphSpec::path(4)).unwrap(),
        coloring_glauber(&GraphSpec::complete(3), 4).unwrap(),
        coloring_glauber(&GraphSpec::path(3), 4).unwrap(),
        hardcore(&GraphSpec::path(4), &int(2)).unwrap(),
        hardcore(&c4, &rat(1, 3)).unwrap(),
        two_spin_glauber(&GraphSpec::path(3), &int(2), &int(2), &int(1)).unwrap(),
        two_spin_glauber(&c4, &rat(1, 2), &int(3), &rat(2, 3)).unwrap(),
        linear_extension_chain(3, &[(0, 2), (1, 2)]).unwrap(),
        linear_extension_chain(4, &[(0, 1)]).unwrap(),
        bases_exchange_chain(&c4).unwrap(),
        bases_exchange_chain(&k4).unwrap(),
        even_subgraph_weights(&k4, &rat(1, 2)).unwrap(),
        even_subgraph_weights(&c4, &int(3)).unwrap(),
        jsv_matching_chain(&GraphSpec::complete_bipartite(2, 2), None).unwrap().gallery,
        jsv_matching_chain(&GraphSpec::complete_bipartite(3, 3).without_edge(0, 3).unwrap(), None)
            .unwrap()
            .gallery,
    ]
}

#[test]
fn every_chain_is_reversible_stationary_irreducible_aperiodic() {
    for g in all_chains() {
        let c = g.check(&Limits::default()).unwrap();
        assert!(c.all(), "{}: {c:?}", g.name);
        let p = g.chain.transition_matrix(5000).unwrap();
        assert!(is_stationary(&p, &g.declared_pi), "{}", g.name);
        assert_eq!(g.declared_pi.masses().iter().sum::<Rational>(), Rational::one());
    }
}

#[test]
fn declared_law_matches_solver() {
    for g in all_chains() {
        let p = g.chain.transition_matrix(5000).unwrap();
        assert_eq!(solve_stationary(&p).unwrap().dist, g.declared_pi, "{}", g.name);
    }
}

#[test]
fn bit_tree_reproduces_small_rows() {
    let k = 12;
    let open_cell = dyadic(1, k);
    let mut rows_checked = 0;
    for g in all_chains() {
        for i in 0..g.size() {
            if g.chain.row(i).len() > 8 {
                continue;
            }
            let mut decided = vec![Rational::zero(); g.size()];
            let mut open = Rational::zero();
            for code in 0..(1u64 << k) {
                let mut src = PrefixBits::from_code(code, k);
                let j = g.chain.step(i, &mut src);
                if src.exhausted() {
                    open += &open_cell;
                } else {
                    decided[j] += &open_cell;
                }
            }
            for (j, mass) in decided.iter().enumerate() {
                let p = g.chain.probability(i, j);
                assert!(*mass <= p, "{} row {i} col {j}", g.name);
                assert!(&p - mass <= open, "{} row {i} col {j}", g.name);
            }
            rows_checked += 1;
        }
    }
    assert!(rows_checked > 50);
}

#[test]
fn known_laws() {
    let hc = hardcore(&GraphSpec::path(3), &int(2)).unwrap();
    let mut masses = hc.declared_pi.masses().to_vec();
    masses.sort();
    assert_eq!(masses, vec![rat(1, 11), rat(2, 11), rat(2, 11), rat(2, 11), rat(4, 11)]);

    let trees = bases_exchange_chain(&GraphSpec::complete(4)).unwrap();
    assert_eq!(trees.size(), 16);
    assert!(trees.declared_pi.masses().iter().all(|m| *m == rat(1, 16)));

    let v = linear_extension_chain(3, &[(0, 2), (1, 2)]).unwrap();
    assert_eq!(v.size(), 2);
    let chain = linear_extension_chain(4, &[(0, 1)]).unwrap();
    assert_eq!(chain.size(), 12);
}

#[test]
fn frozen_triangle_coloring_is_refused() {
    // three colors on a triangle: every proper coloring is isolated under single-site moves
    assert_eq!(proper_colorings(&GraphSpec::complete(3), 3).unwrap().len(), 6);
    assert!(matches!(coloring_glauber(&GraphSpec::complete(3), 3), Err(Error::Domain(_))));
}

#[test]
fn ideal_hole_weights_balance_every_hole() {
    for graph in [GraphSpec::complete_bipartite(2, 2), GraphSpec::complete_bipartite(3, 3)] {
        let jsv = jsv_matching_chain(&graph, None).unwrap();
        let n = jsv.n as i64;
        let perfect: Rational = jsv
            .states
            .iter()
            .zip(jsv.gallery.declared_pi.masses())
            .filter(|(s, _)| s.hole.is_none())
            .map(|(_, m)| m.clone())
            .sum();
        assert_eq!(perfect, rat(1, n * n + 1));
        for u in 0..jsv.n {
            for v in 0..jsv.n {
                assert_eq!(jsv.pi_hole(u, v), perfect);
            }
        }
    }
}

#[test]
fn doubled_hole_weights_keep_perfect_mass() {
    let graph = GraphSpec::complete_bipartite(3, 3).without_edge(1, 5).unwrap();
    let doubled = jsv_matching_chain_with_weights(&graph, None, |_, _, w| w * int(2)).unwrap();
    assert!(doubled.gallery.check(&Limits::default()).unwrap().all());
    // every hole class doubles relative to P: π(P) = 1/(1 + 2n²)
    assert_eq!(doubled.pi_perfect(), rat(1, 19));
    assert!(doubled.pi_perfect() >= rat(1, 2 * 10));
    let halved = jsv_matching_chain_with_weights(&graph, None, |u, v, w| {
        if (u + v) % 2 == 0 { w / int(2) } else { w * int(2) }
    })
    .unwrap();
    assert!(halved.pi_perfect() >= rat(1, 20));
}

#[test]
fn chain_files_build_every_kind() {
    let docs = [
        r#"{"kind":"lazy-walk","params":{"graph":"cycle:5"}}"#,
        r#"{"kind":"coloring-glauber","params":{"graph":"path:3","q":4}}"#,
        r#"{"kind":"hardcore","params":{"graph":"path:3","lambda":"2"}}"#,
        r#"{"kind":"two-spin","params":{"graph":"path:2","beta":[1,2],"gamma":2,"lambda":"1/3"}}"#,
        r#"{"kind":"linear-extension","params":{"n":3,"relations":[[0,2],[1,2]]}}"#,
        r#"{"kind":"bases-exchange","params":{"graph":"cycle:4"}}"#,
        r#"{"kind":"jsv-matching","params":{"graph":"complete-bipartite:2"}}"#,
        r#"{"kind":"even-subgraph","params":{"graph":"complete:4","beta":"1/2"}}"#,
        r#"{"kind":"explicit","matrix":[[[1,2],[1,2]],[[1,3],[2,3]]]}"#,
    ];
    for doc in docs {
        let g = ChainDef::parse(doc).unwrap().build().unwrap();
        assert!(g.check(&Limits::default()).unwrap().stationary_matches, "{doc}");
    }
    let explicit = ChainDef::parse(docs[8]).unwrap().build().unwrap();
    assert_eq!(explicit.declared_pi.masses(), &[rat(2, 5), rat(3, 5)]);
}
