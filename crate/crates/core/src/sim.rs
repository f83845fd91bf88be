//! Synchronous LOCAL-model round driver, per-phase round accounting, and the
//! virtual-graph adapter that lets groups of real vertices (cliques, slack
//! pairs, loopholes) act as single nodes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::par;

/// What a node sees: its own identifier and its neighbours' identifiers
/// (ascending). Identifiers are the labels passed to [`run_sync_labeled`].
#[derive(Debug, Clone, Copy)]
pub struct LocalView<'a> {
    pub id: usize,
    pub neighbors: &'a [usize],
}

/// Result of one node step: messages addressed by neighbour identifier, and
/// `Some(output)` when the node halts.
#[derive(Debug)]
pub struct Step<M, O> {
    pub send: Vec<(usize, M)>,
    pub output: Option<O>,
}

impl<M, O> Step<M, O> {
    pub fn wait() -> Self {
        Step { send: Vec::new(), output: None }
    }

    pub fn send(send: Vec<(usize, M)>) -> Self {
        Step { send, output: None }
    }

    pub fn halt(output: O) -> Self {
        Step { send: Vec::new(), output: Some(output) }
    }

    pub fn send_and_halt(send: Vec<(usize, M)>, output: O) -> Self {
        Step { send, output: Some(output) }
    }
}

/// A deterministic node program. `step` sees only the node's own view,
/// state and inbox; the inbox is sorted by sender identifier.
pub trait NodeProgram: Sync {
    type State: Send;
    type Msg: Clone + Send + Sync;
    type Output: Send;

    fn init(&self, view: LocalView<'_>) -> Self::State;

    fn step(
        &self,
        round: usize,
        view: LocalView<'_>,
        state: &mut Self::State,
        inbox: &[(usize, Self::Msg)],
    ) -> Step<Self::Msg, Self::Output>;
}

#[derive(Debug, Clone)]
pub struct SyncRun<O> {
    pub outputs: Vec<O>,
    /// Index of the last round in which any node was still running.
    pub rounds: usize,
}

struct Slot<S, M> {
    state: Option<S>,
    inbox: Vec<(usize, M)>,
}

/// Runs `program` on `g` with vertex indices as identifiers.
pub fn run_sync<P: NodeProgram>(g: &Graph, program: &P, round_cap: usize) -> Result<SyncRun<P::Output>> {
    let labels: Vec<usize> = (0..g.n()).collect();
    run_sync_labeled(g, &labels, program, round_cap)
}

/// Runs `program` on `g` where node `i` carries identifier `labels[i]`.
/// Labels must be strictly increasing so identifier order matches index
/// order.
pub fn run_sync_labeled<P: NodeProgram>(
    g: &Graph,
    labels: &[usize],
    program: &P,
    round_cap: usize,
) -> Result<SyncRun<P::Output>> {
    assert!(round_cap > 0, "round cap must be positive");
    assert_eq!(labels.len(), g.n());
    assert!(labels.windows(2).all(|w| w[0] < w[1]), "labels must be strictly increasing");
    let n = g.n();
    let nbr_labels: Vec<Vec<usize>> = (0..n)
        .map(|v| g.neighbors(v).iter().map(|&w| labels[w]).collect())
        .collect();
    let view = |v: usize| LocalView {
        id: labels[v],
        neighbors: &nbr_labels[v],
    };

    let mut slots: Vec<Slot<P::State, P::Msg>> = (0..n)
        .map(|v| Slot {
            state: Some(program.init(view(v))),
            inbox: Vec::new(),
        })
        .collect();
    let mut outputs: Vec<Option<P::Output>> = (0..n).map(|_| None).collect();
    let mut live = n;
    let mut last_active = 0;
    let mut round = 0;

    while live > 0 {
        if round >= round_cap {
            return Err(Error::RoundCapExceeded { cap: round_cap });
        }
        let steps = par::map_slice_mut(&mut slots, |v, slot| {
            let state = slot.state.as_mut()?;
            let step = program.step(round, view(v), state, &slot.inbox);
            slot.inbox.clear();
            Some(step)
        });
        let mut deliveries = Vec::new();
        for (v, step) in steps.into_iter().enumerate() {
            let Some(step) = step else { continue };
            for (to, msg) in step.send {
                let dst = labels
                    .binary_search(&to)
                    .ok()
                    .filter(|&d| g.has_edge(v, d))
                    .ok_or(Error::NonNeighborMessage { from: labels[v], to })?;
                deliveries.push((dst, labels[v], msg));
            }
            if let Some(out) = step.output {
                outputs[v] = Some(out);
                slots[v].state = None;
                live -= 1;
            }
        }
        for (dst, from, msg) in deliveries {
            if slots[dst].state.is_some() {
                slots[dst].inbox.push((from, msg));
            }
        }
        last_active = round;
        round += 1;
    }

    Ok(SyncRun {
        outputs: outputs.into_iter().map(|o| o.expect("every node halted")).collect(),
        rounds: last_active,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseMode {
    #[serde(rename = "simulated-distributed")]
    SimulatedDistributed,
    #[serde(rename = "centralized-with-certificate")]
    CentralizedWithCertificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub name: String,
    pub rounds: usize,
    pub mode: PhaseMode,
}

/// Rounds consumed per phase. Centrally solved phases are recorded with
/// zero rounds and the centralized mode rather than an invented count.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundTrace {
    pub phases: Vec<PhaseRecord>,
    pub total: usize,
}

impl RoundTrace {
    pub fn simulated(&mut self, name: impl Into<String>, rounds: usize) {
        self.push(name, rounds, PhaseMode::SimulatedDistributed);
    }

    pub fn centralized(&mut self, name: impl Into<String>) {
        self.push(name, 0, PhaseMode::CentralizedWithCertificate);
    }

    fn push(&mut self, name: impl Into<String>, rounds: usize, mode: PhaseMode) {
        self.phases.push(PhaseRecord {
            name: name.into(),
            rounds,
            mode,
        });
        self.total += rounds;
    }

    pub fn phase(&self, name: &str) -> Option<&PhaseRecord> {
        self.phases.iter().find(|p| p.name == name)
    }

    pub fn is_consistent(&self) -> bool {
        self.phases.iter().map(|p| p.rounds).sum::<usize>() == self.total
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let t: RoundTrace = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        if !t.is_consistent() {
            return Err(Error::Parse {
                line: 1,
                message: "trace total does not equal the sum of phase rounds".into(),
            });
        }
        Ok(t)
    }
}

/// Groups of real vertices contracted to single nodes. Node `i` of `graph`
/// is `groups[i]`; two nodes are adjacent iff a real edge joins the groups.
#[derive(Debug, Clone)]
pub struct VirtualGraph {
    pub groups: Vec<Vec<Vertex>>,
    pub graph: Graph,
    /// Lexicographically smallest real edge `(u, v)` with `u` in the lower
    /// group, per virtual edge `(a, b)`, `a < b`.
    pub witness: BTreeMap<(usize, usize), (Vertex, Vertex)>,
}

impl VirtualGraph {
    /// Number of real edges leaving group `i`.
    pub fn boundary_edges(&self, g: &Graph, i: usize) -> usize {
        let group = &self.groups[i];
        group
            .iter()
            .map(|&v| g.neighbors(v).iter().filter(|w| !group.contains(w)).count())
            .sum()
    }
}

pub fn lift_virtual(g: &Graph, groups: &[Vec<Vertex>]) -> Result<VirtualGraph> {
    let mut owner = vec![usize::MAX; g.n()];
    let groups: Vec<Vec<Vertex>> = groups
        .iter()
        .map(|grp| {
            let mut grp = grp.clone();
            grp.sort_unstable();
            grp
        })
        .collect();
    for (i, grp) in groups.iter().enumerate() {
        for &v in grp {
            if v >= g.n() {
                return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
            }
            if owner[v] != usize::MAX {
                return Err(Error::OverlappingGroups { vertex: v });
            }
            owner[v] = i;
        }
    }
    let mut witness = BTreeMap::new();
    for (a, grp) in groups.iter().enumerate() {
        for &u in grp {
            for &w in g.neighbors(u) {
                let b = owner[w];
                if b != usize::MAX && b > a {
                    witness.entry((a, b)).or_insert((u, w));
                }
            }
        }
    }
    let graph = Graph::from_edges(groups.len(), witness.keys().copied())?;
    Ok(VirtualGraph { groups, graph, witness })
}
