use std::collections::{BTreeSet, VecDeque};

use densedelta::graph::{detect_k_delta_plus_one, verify_coloring};
use densedelta::matching::find_sdr;
use densedelta::oracle::brute_sdr;
use densedelta::sim::{run_sync, LocalView, NodeProgram, Step};
use densedelta::subroutines::list_coloring::deg_plus1_list_color;
use densedelta::subroutines::ruling::{is_ruling_set, ruling_set};
use densedelta::subroutines::split::{degree_split, Multigraph};
use densedelta::{Coloring, Graph};
use proptest::prelude::*;

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let len = pairs.len();
        (Just(n), Just(pairs), proptest::collection::vec(any::<bool>(), len))
            .prop_map(|(n, pairs, keep)| Graph::from_edges(n, pairs.into_iter().zip(keep).filter(|p| p.1).map(|p| p.0)).unwrap())
    })
}

fn is_clique(g: &Graph, set: &[usize]) -> bool {
    set.iter().enumerate().all(|(i, &u)| set[i + 1..].iter().all(|&v| g.has_edge(u, v)))
}

/// Any clique of size `Delta + 1` by exhaustive search over closed
/// neighbourhoods.
fn brute_k_delta_plus_one(g: &Graph) -> bool {
    let d = g.delta();
    (0..g.n()).any(|v| {
        let nb: Vec<usize> = g.neighbors(v).to_vec();
        if nb.len() < d {
            return false;
        }
        let mut pick = vec![v];
        fn go(g: &Graph, nb: &[usize], from: usize, need: usize, pick: &mut Vec<usize>) -> bool {
            if need == 0 {
                return true;
            }
            for i in from..nb.len() {
                if pick.iter().all(|&u| g.has_edge(u, nb[i])) {
                    pick.push(nb[i]);
                    if go(g, nb, i + 1, need - 1, pick) {
                        return true;
                    }
                    pick.pop();
                }
            }
            false
        }
        go(g, &nb, 0, d, &mut pick)
    })
}

/// Floods identifiers for `t` rounds; the output is everything heard.
struct Gossip {
    t: usize,
}

impl NodeProgram for Gossip {
    type State = BTreeSet<usize>;
    type Msg = BTreeSet<usize>;
    type Output = BTreeSet<usize>;

    fn init(&self, view: LocalView<'_>) -> BTreeSet<usize> {
        BTreeSet::from([view.id])
    }

    fn step(&self, round: usize, view: LocalView<'_>, s: &mut BTreeSet<usize>, inbox: &[(usize, BTreeSet<usize>)]) -> Step<BTreeSet<usize>, BTreeSet<usize>> {
        for (_, m) in inbox {
            s.extend(m);
        }
        if round == self.t {
            return Step::halt(s.clone());
        }
        Step::send(view.neighbors.iter().map(|&w| (w, s.clone())).collect())
    }
}

fn ball(g: &Graph, v: usize, t: usize) -> BTreeSet<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    dist[v] = 0;
    let mut q = VecDeque::from([v]);
    while let Some(x) = q.pop_front() {
        for &y in g.neighbors(x) {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                q.push_back(y);
            }
        }
    }
    (0..g.n()).filter(|&x| dist[x] <= t).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn k_delta_plus_one_matches_exhaustive_search(g in graph(12)) {
        let found = detect_k_delta_plus_one(&g);
        prop_assert_eq!(found.is_some(), brute_k_delta_plus_one(&g));
        if let Some(c) = found {
            prop_assert_eq!(c.len(), g.delta() + 1);
            prop_assert!(is_clique(&g, &c));
        }
    }

    #[test]
    fn text_round_trip(g in graph(20)) {
        let text = g.write_text();
        let back = Graph::read_text(&text).unwrap();
        prop_assert_eq!(back.write_text(), text);
    }

    #[test]
    fn passing_report_means_proper(g in graph(10), raw in proptest::collection::vec(0u32..4, 10)) {
        let mut c = Coloring::empty(g.n(), g.delta());
        for v in 0..g.n() {
            if (raw[v] as usize) < g.delta() {
                c.set(v, raw[v]);
            }
        }
        if verify_coloring(&g, &c, true).passed() {
            prop_assert!(g.edges().all(|(u, v)| c.get(u).is_some() && c.get(u) != c.get(v)));
        }
    }

    #[test]
    fn outputs_depend_only_on_the_ball(g in graph(14), t in 0usize..4) {
        let run = run_sync(&g, &Gossip { t }, 100).unwrap();
        prop_assert_eq!(run.rounds, t);
        for v in 0..g.n() {
            prop_assert_eq!(&run.outputs[v], &ball(&g, v, t));
        }
    }

    #[test]
    fn ruling_sets_pass_the_bfs_oracle(g in graph(16), r in 2usize..7) {
        let labels: Vec<usize> = (0..g.n()).collect();
        let rs = ruling_set(&g, &labels, r, 10_000).unwrap();
        prop_assert!(is_ruling_set(&g, &rs.members, r));
    }

    #[test]
    fn deg_plus_one_lists_always_color(g in graph(14), seed in any::<u64>()) {
        // each list: degree + 1 colors out of [2 Delta + 2], rotated by the seed
        let palette = 2 * g.delta() as u32 + 2;
        let lists: Vec<Vec<u32>> = (0..g.n())
            .map(|v| (0..=g.degree(v) as u32).map(|i| (i * 2 + (seed as u32).wrapping_add(v as u32)) % palette).collect())
            .collect();
        let labels: Vec<usize> = (0..g.n()).map(|v| 3 * v + 1).collect();
        let out = deg_plus1_list_color(&g, &labels, &lists, 100_000).unwrap();
        for (u, v) in g.edges() {
            prop_assert_ne!(out.colors[u], out.colors[v]);
        }
        for v in 0..g.n() {
            prop_assert!(lists[v].contains(&out.colors[v]));
        }
    }

    #[test]
    fn sdr_agrees_with_brute_force(sets in proptest::collection::vec(proptest::collection::vec(0usize..8, 0..4), 0..9)) {
        let fast = find_sdr(&sets);
        let brute = brute_sdr(&sets, 10_000_000).unwrap();
        prop_assert_eq!(fast.is_some(), brute.is_some());
        if let Some(pick) = fast {
            let distinct: BTreeSet<usize> = pick.iter().copied().collect();
            prop_assert_eq!(distinct.len(), pick.len());
            prop_assert!(pick.iter().zip(&sets).all(|(x, s)| s.contains(x)));
        }
    }

    #[test]
    fn split_parts_stay_near_a_quarter(n in 2usize..25, raw in proptest::collection::vec((0usize..25, 1usize..25), 0..200)) {
        let edges: Vec<(usize, usize)> = raw.into_iter().map(|(a, s)| (a % n, (a % n + s % (n - 1) + 1) % n)).collect();
        let g = Multigraph::new(n, edges);
        let split = degree_split(&g, 2).unwrap();
        let d = g.degrees();
        for v in 0..n {
            prop_assert_eq!(split.ledger[v].iter().sum::<usize>(), d[v]);
            for &p in &split.ledger[v] {
                prop_assert!((4 * p as i64 - d[v] as i64).abs() <= 12);
            }
        }
    }
}
