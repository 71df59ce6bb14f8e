//! Cross-checks every network metric against its brute-force oracle over
//! random graphs from all four classes, and community detection against
//! exhaustive partition search on structured graphs.

use socsim_core::metrics::{
    aspl, clustering, density, detect_communities, homophily, lcc_fraction, modularity, Graph,
    Partition,
};
use socsim_core::oracles;
use socsim_core::rng::derive_stream;

const TOLERANCE: f64 = 1e-9;

fn two_group_split(n: usize) -> Partition {
    Partition::from_labels(&(0..n).map(|u| 1 + (u % 2)).collect::<Vec<_>>())
}

#[test]
fn metrics_agree_with_oracles_on_random_graphs() {
    for class in oracles::GRAPH_CLASSES {
        for seed in 0..200u64 {
            let mut rng = derive_stream(seed, &["oracle", "graph"]);
            let g = oracles::random_graph(&mut rng, class);
            let label = format!("{class:?} seed {seed}");

            let d = density(&g).unwrap();
            assert!(
                (d - oracles::density(&g).unwrap()).abs() < TOLERANCE,
                "density {label}"
            );

            let c = clustering(&g);
            let (oc_nodes, oc_global) = oracles::clustering(&g);
            assert!((c.global - oc_global).abs() < TOLERANCE, "clustering {label}");
            for (a, b) in c.per_node.iter().zip(&oc_nodes) {
                assert!((a - b).abs() < TOLERANCE, "clustering node {label}");
            }

            assert!(
                (lcc_fraction(&g) - oracles::lcc_fraction(&g)).abs() < TOLERANCE,
                "lcc {label}"
            );

            match (aspl(&g), oracles::aspl(&g)) {
                (Ok(a), Some(b)) => {
                    assert!((a - b).abs() < TOLERANCE, "aspl {label}: {a} vs {b}")
                }
                (Err(_), None) => {}
                (a, b) => panic!("aspl definedness mismatch {label}: {a:?} vs {b:?}"),
            }

            let split = two_group_split(g.node_count());
            match (modularity(&g, &split), oracles::modularity(&g, &split)) {
                (Ok(a), Some(b)) => {
                    assert!((a - b).abs() < TOLERANCE, "modularity {label}")
                }
                (Err(_), None) => {}
                (a, b) => panic!("modularity definedness mismatch {label}: {a:?} vs {b:?}"),
            }

            // The one-community partition scores exactly zero.
            let one = Partition::one_community(g.node_count());
            if let Ok(q) = modularity(&g, &one) {
                assert!(q.abs() < 1e-12, "one-community modularity {label}: {q}");
            }

            match (homophily(&g, &split), oracles::homophily(&g, &split)) {
                (Ok(a), Some(b)) => {
                    assert!((a - b).abs() < TOLERANCE, "homophily {label}")
                }
                (Err(_), None) => {}
                (a, b) => panic!("homophily definedness mismatch {label}: {a:?} vs {b:?}"),
            }
        }
    }
}

#[test]
fn detect_communities_matches_exhaustive_on_structured_graphs() {
    // Two disjoint triangles.
    let mut two_tri = Graph::undirected(6);
    for (a, b) in [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)] {
        two_tri.add_edge(a, b);
    }
    // Complete graph on six nodes.
    let mut k6 = Graph::undirected(6);
    for u in 0..6 {
        for v in u + 1..6 {
            k6.add_edge(u, v);
        }
    }
    // Barbell: two K4 blocks plus a bridge.
    let mut barbell = Graph::undirected(8);
    for base in [0, 4] {
        for u in base..base + 4 {
            for v in u + 1..base + 4 {
                barbell.add_edge(u, v);
            }
        }
    }
    barbell.add_edge(3, 4);

    for (name, g) in [("two-triangles", two_tri), ("k6", k6), ("barbell", barbell)] {
        let greedy = detect_communities(&g);
        let greedy_q = modularity(&g, &greedy).unwrap();
        let (best, best_q) = oracles::best_partition(&g).unwrap();
        assert!(
            (greedy_q - best_q).abs() < 1e-9,
            "{name}: greedy Q {greedy_q} vs exhaustive {best_q}"
        );
        assert_eq!(greedy.labels(), best.labels(), "{name}: partitions differ");
    }
}

#[test]
fn two_triangles_modularity_golden() {
    let mut g = Graph::undirected(6);
    for (a, b) in [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)] {
        g.add_edge(a, b);
    }
    let p = detect_communities(&g);
    assert_eq!(p.community_count(), 2);
    let q = modularity(&g, &p).unwrap();
    assert!((q - 0.5).abs() < 1e-12, "Q = {q}");
}

#[test]
fn homophily_of_random_mixing_is_near_one() {
    // Uniform random graphs with two equal groups of 15: the mean homophily
    // over 1000 samples sits at 1 within 0.05.
    let n = 30;
    let groups = Partition::from_labels(
        &(0..n)
            .map(|u| if u < n / 2 { 1 } else { 2 })
            .collect::<Vec<_>>(),
    );
    let mut rng = derive_stream(7, &["oracle", "mixing"]);
    let mut sum = 0.0;
    let mut samples = 0u32;
    use rand::Rng;
    while samples < 1000 {
        let mut g = Graph::undirected(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen::<f64>() < 0.2 {
                    g.add_edge(u, v);
                }
            }
        }
        if let Ok(phi) = homophily(&g, &groups) {
            sum += phi;
            samples += 1;
        }
    }
    let mean = sum / f64::from(samples);
    assert!((mean - 1.0).abs() < 0.05, "mean homophily {mean}");
}
