use densedelta::acd::{AcdPartition, Eta};
use densedelta::loophole::{canonical_cycle, enumerate_loopholes, LoopholeKind};
use densedelta::oracle::{brute_deg_list, brute_delta_color, brute_loophole_sets};
use densedelta::Graph;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random graph with a few vertex groups declared as almost-cliques; most
/// groups are made complete so the block skeleton gets exercised.
fn fixture(rng: &mut ChaCha8Rng) -> (Graph, AcdPartition) {
    let n = rng.gen_range(6..=14);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut cliques = Vec::new();
    let mut at = 0;
    while at + 2 <= n && cliques.len() < 3 {
        let size = rng.gen_range(2..=5).min(n - at);
        let mut c = order[at..at + size].to_vec();
        c.sort_unstable();
        cliques.push(c);
        at += size;
    }
    let mut edges = Vec::new();
    let p = rng.gen_range(0.1..0.45);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    for c in &cliques {
        if rng.gen_bool(0.7) {
            for (i, &u) in c.iter().enumerate() {
                for &v in &c[i + 1..] {
                    edges.push((u, v));
                }
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let g = Graph::from_edges(n, edges).unwrap();
    let part = AcdPartition::from_cliques(n, cliques, Eta::default());
    (g, part)
}

#[test]
fn enumeration_matches_subset_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut nonempty = 0;
    for case in 0..400 {
        let (g, p) = fixture(&mut rng);
        let found = enumerate_loopholes(&g, &p).unwrap();
        let mut sets: Vec<Vec<usize>> = found.iter().map(|l| l.vertex_set()).collect();
        sets.sort();
        let expected = brute_loophole_sets(&g, &p);
        assert_eq!(sets, expected, "case {case}: {:?} cliques {:?}", g.write_text(), p.cliques);
        for l in &found {
            match l.kind {
                LoopholeKind::LowDegreeVertex => assert!(l.vertices.len() == 1 && g.degree(l.vertices[0]) < g.delta()),
                LoopholeKind::NonCliqueEvenCycle => {
                    assert_eq!(canonical_cycle(&g, &l.vertex_set()).as_ref(), Some(&l.vertices));
                }
            }
        }
        nonempty += usize::from(!expected.is_empty());
    }
    assert!(nonempty > 100, "fixtures too sparse: {nonempty}");
}

#[test]
fn k4_minus_edge_is_three_colorable() {
    let g = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
    assert_eq!(g.delta(), 3);
    let c = brute_delta_color(&g, 1_000_000).unwrap().unwrap();
    assert!(g.edges().all(|(u, v)| c[u] != c[v]) && c.iter().all(|&x| x < 3));
}

#[test]
fn triangle_with_equal_two_lists_fails() {
    // lists of size deg(v) do not suffice on a clique
    let g = Graph::from_edges(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
    let lists = vec![vec![0, 1]; 3];
    assert_eq!(brute_deg_list(&g, &lists, 1000).unwrap(), None);
    let lists = vec![vec![0, 1], vec![1, 2], vec![0, 2]];
    assert!(brute_deg_list(&g, &lists, 1000).unwrap().is_some());
}

#[test]
fn empty_list_has_no_coloring() {
    let g = Graph::from_edges(1, []).unwrap();
    assert_eq!(brute_deg_list(&g, &[vec![]], 10).unwrap(), None);
}
