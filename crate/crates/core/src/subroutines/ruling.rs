//! (2, r)-ruling sets by greedy ID suppression.
//!
//! The run is cut into phases of `r` rounds. During a phase each node floods
//! the statuses it knew at phase start to distance `r`; at the boundary an
//! undecided node leaves if a member lies in its ball and joins if it has
//! the smallest identifier among the undecided nodes of its ball. Members
//! are thus pairwise more than `r` apart, and every non-member is within `r`
//! of one. A node halts once its whole ball was decided at phase start; no
//! undecided node can then need it as a relay.

use std::collections::VecDeque;
use std::sync::Arc;

use crate::error::Result;
use crate::graph::Graph;
use crate::sim::{run_sync_labeled, LocalView, NodeProgram, Step};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Undecided,
    In,
    Out,
}

struct Ruling {
    r: usize,
    /// One past the largest identifier.
    universe: usize,
}

struct RulingState {
    status: Status,
    /// Statuses at phase start of the nodes heard of this phase.
    known: Vec<(usize, Status)>,
    seen: Vec<u64>,
    /// Entries first heard last round; only these are forwarded.
    fresh: Arc<Vec<(usize, Status)>>,
}

impl RulingState {
    fn reset(&mut self, id: usize) {
        self.seen.iter_mut().for_each(|w| *w = 0);
        self.seen[id / 64] |= 1 << (id % 64);
        self.known = vec![(id, self.status)];
        self.fresh = Arc::new(self.known.clone());
    }
}

impl NodeProgram for Ruling {
    type State = RulingState;
    type Msg = Arc<Vec<(usize, Status)>>;
    type Output = bool;

    fn init(&self, view: LocalView<'_>) -> RulingState {
        let mut s = RulingState {
            status: Status::Undecided,
            known: Vec::new(),
            seen: vec![0; self.universe.div_ceil(64)],
            fresh: Arc::default(),
        };
        s.reset(view.id);
        s
    }

    fn step(&self, round: usize, view: LocalView<'_>, s: &mut RulingState, inbox: &[(usize, Self::Msg)]) -> Step<Self::Msg, bool> {
        // entries relayed at phase offset o lie at distance o + 1
        let mut fresh = Vec::new();
        for (_, entries) in inbox {
            for &(id, st) in entries.iter() {
                let (w, b) = (id / 64, 1u64 << (id % 64));
                if s.seen[w] & b == 0 {
                    s.seen[w] |= b;
                    fresh.push((id, st));
                }
            }
        }
        s.known.extend_from_slice(&fresh);
        s.fresh = Arc::new(fresh);
        if round % self.r == 0 {
            if round > 0 {
                if s.known.iter().all(|(_, st)| *st != Status::Undecided) {
                    return Step::halt(s.status == Status::In);
                }
                if s.status == Status::Undecided {
                    if s.known.iter().any(|(_, st)| *st == Status::In) {
                        s.status = Status::Out;
                    } else if s.known.iter().filter(|(_, st)| *st == Status::Undecided).map(|&(id, _)| id).min() == Some(view.id) {
                        s.status = Status::In;
                    }
                }
            }
            s.reset(view.id);
        }
        if s.fresh.is_empty() {
            return Step::wait();
        }
        Step::send(view.neighbors.iter().map(|&w| (w, Arc::clone(&s.fresh))).collect())
    }
}

#[derive(Debug, Clone)]
pub struct RulingSet {
    /// Member indices, ascending.
    pub members: Vec<usize>,
    pub rounds: usize,
}

/// Computes a (2, r)-ruling set of `g`; node `i` has identifier `labels[i]`.
pub fn ruling_set(g: &Graph, labels: &[usize], r: usize, round_cap: usize) -> Result<RulingSet> {
    assert!(r >= 2, "ruling radius must be at least 2");
    let universe = labels.last().map_or(0, |&l| l + 1);
    let run = run_sync_labeled(g, labels, &Ruling { r, universe }, round_cap)?;
    Ok(RulingSet {
        members: (0..g.n()).filter(|&v| run.outputs[v]).collect(),
        rounds: run.rounds,
    })
}

/// BFS oracle: `set` is independent and every vertex is within `r` of it.
pub fn is_ruling_set(g: &Graph, set: &[usize], r: usize) -> bool {
    let mut member = vec![false; g.n()];
    for &v in set {
        member[v] = true;
    }
    if set.iter().any(|&v| g.neighbors(v).iter().any(|&w| member[w])) {
        return false;
    }
    let mut dist = vec![usize::MAX; g.n()];
    let mut queue: VecDeque<usize> = set.iter().copied().collect();
    for &v in set {
        dist[v] = 0;
    }
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist.iter().all(|&d| d <= r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ids(n: usize) -> Vec<usize> {
        (0..n).collect()
    }

    #[test]
    fn single_vertex() {
        let g = Graph::from_edges(1, []).unwrap();
        assert_eq!(ruling_set(&g, &[0], 2, 100).unwrap().members, vec![0]);
    }

    #[test]
    fn complete_graph_picks_min_id() {
        let g = Graph::from_edges(6, (0..6).flat_map(|i| (i + 1..6).map(move |j| (i, j)))).unwrap();
        assert_eq!(ruling_set(&g, &ids(6), 3, 100).unwrap().members, vec![0]);
    }

    #[test]
    fn random_graph_radius_six() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let mut edges = Vec::new();
            for u in 0..50 {
                for v in u + 1..50 {
                    if rng.gen_bool(0.05) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::from_edges(50, edges).unwrap();
            let rs = ruling_set(&g, &ids(50), 6, 10_000).unwrap();
            assert!(is_ruling_set(&g, &rs.members, 6));
        }
    }

    #[test]
    fn long_path_members_are_spread() {
        let n = 40;
        let g = Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap();
        let rs = ruling_set(&g, &ids(n), 2, 10_000).unwrap();
        assert!(is_ruling_set(&g, &rs.members, 2));
        assert!(rs.members.windows(2).all(|w| w[1] - w[0] > 2));
    }

    #[test]
    fn oracle_rejects_bad_sets() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(!is_ruling_set(&g, &[0, 1], 3));
        assert!(!is_ruling_set(&g, &[0], 2));
        assert!(is_ruling_set(&g, &[0], 3));
    }
}
