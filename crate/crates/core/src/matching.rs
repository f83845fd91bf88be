//! Phase 1: the maximal matching `F1` on crossing hard edges, the grabbing
//! hypergraph on 28 sub-cliques per clique, its SDR, and the oriented
//! matching `F2` with 28 outgoing edges per clique.

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::acd::{AcdPartition, EPSILON_DEN};
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::loophole::CliqueClassification;
use crate::sim::{run_sync, LocalView, NodeProgram, RoundTrace, Step};

pub const SUBCLIQUES: usize = 28;

/// Vertex-disjoint edges. Undirected edges are stored as `(u, v)` with
/// `u < v`, directed ones as `(tail, head)`; either way sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientedMatching {
    pub directed: bool,
    pub edges: Vec<(Vertex, Vertex)>,
    at: Vec<Option<usize>>,
}

impl OrientedMatching {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>, directed: bool) -> Result<Self> {
        let mut edges: Vec<(Vertex, Vertex)> = edges
            .into_iter()
            .map(|(u, v)| if directed || u < v { (u, v) } else { (v, u) })
            .collect();
        edges.sort_unstable();
        let mut at = vec![None; n];
        for (i, &(u, v)) in edges.iter().enumerate() {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
                if let Some(j) = at[x] {
                    return Err(Error::MatchingViolation {
                        vertex: x,
                        edges: vec![edges[j], (u, v)],
                    });
                }
                at[x] = Some(i);
            }
        }
        Ok(OrientedMatching { directed, edges, at })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edge_at(&self, v: Vertex) -> Option<usize> {
        self.at[v]
    }

    pub fn mate(&self, v: Vertex) -> Option<Vertex> {
        self.at[v].map(|i| {
            let (a, b) = self.edges[i];
            if a == v {
                b
            } else {
                a
            }
        })
    }

    pub fn index_of(&self, e: (Vertex, Vertex)) -> Option<usize> {
        let key = if self.directed || e.0 < e.1 { e } else { (e.1, e.0) };
        self.edges.binary_search(&key).ok()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matching serializes")
    }
}

impl Serialize for OrientedMatching {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Undirected {
            u: Vertex,
            v: Vertex,
        }
        #[derive(Serialize)]
        struct Directed {
            tail: Vertex,
            head: Vertex,
        }
        let mut seq = s.serialize_seq(Some(self.edges.len()))?;
        for &(a, b) in &self.edges {
            if self.directed {
                seq.serialize_element(&Directed { tail: a, head: b })?;
            } else {
                seq.serialize_element(&Undirected { u: a, v: b })?;
            }
        }
        seq.end()
    }
}

fn is_hard_vertex(p: &AcdPartition, cls: &CliqueClassification, v: Vertex) -> bool {
    p.clique_of(v).is_some_and(|c| cls.is_hard(c))
}

/// Edges between different hard cliques.
pub fn crossing_hard_edges(g: &Graph, p: &AcdPartition, cls: &CliqueClassification) -> Vec<(Vertex, Vertex)> {
    g.edges()
        .filter(|&(u, v)| is_hard_vertex(p, cls, u) && is_hard_vertex(p, cls, v) && p.clique_of(u) != p.clique_of(v))
        .collect()
}

#[derive(Debug, Clone)]
enum MatchMsg {
    Propose,
    Matched,
}

struct MatchState {
    active: Vec<usize>,
    target: Option<usize>,
}

/// Every unmatched node proposes to its smallest unmatched neighbour; a
/// mutual proposal matches the pair, which then tells its other neighbours.
/// The smallest active node is matched in every two-round iteration.
struct Proposals;

impl NodeProgram for Proposals {
    type State = MatchState;
    type Msg = MatchMsg;
    type Output = Option<usize>;

    fn init(&self, view: LocalView<'_>) -> MatchState {
        MatchState {
            active: view.neighbors.to_vec(),
            target: None,
        }
    }

    fn step(&self, round: usize, _: LocalView<'_>, s: &mut MatchState, inbox: &[(usize, MatchMsg)]) -> Step<MatchMsg, Option<usize>> {
        if round % 2 == 0 {
            for (from, m) in inbox {
                if matches!(m, MatchMsg::Matched) {
                    s.active.retain(|x| x != from);
                }
            }
            return match s.active.first() {
                None => Step::halt(None),
                Some(&t) => {
                    s.target = Some(t);
                    Step::send(vec![(t, MatchMsg::Propose)])
                }
            };
        }
        let t = s.target.expect("odd rounds follow a proposal");
        if inbox.iter().any(|(from, m)| *from == t && matches!(m, MatchMsg::Propose)) {
            let notify = s.active.iter().filter(|&&x| x != t).map(|&x| (x, MatchMsg::Matched)).collect();
            return Step::send_and_halt(notify, Some(t));
        }
        Step::wait()
    }
}

/// Maximal matching on all crossing hard edges, as a simulated program.
/// Returns the matching and the rounds used.
pub fn maximal_matching_f1(g: &Graph, p: &AcdPartition, cls: &CliqueClassification, round_cap: usize) -> Result<(OrientedMatching, usize)> {
    let h = Graph::from_edges(g.n(), crossing_hard_edges(g, p, cls))?;
    let run = run_sync(&h, &Proposals, round_cap)?;
    let edges: Vec<(Vertex, Vertex)> = run
        .outputs
        .iter()
        .enumerate()
        .filter_map(|(v, m)| m.filter(|&w| v < w).map(|w| (v, w)))
        .collect();
    let f1 = OrientedMatching::new(g.n(), edges, false)?;
    if let Some((u, v)) = h.edges().find(|&(u, v)| f1.edge_at(u).is_none() && f1.edge_at(v).is_none()) {
        return Err(Error::invariant(format!("F1 is not maximal: edge ({u}, {v}) is free")));
    }
    Ok((f1, run.rounds))
}

#[derive(Debug, Clone, Serialize)]
pub struct SubClique {
    pub clique: usize,
    pub vertices: Vec<Vertex>,
}

/// `parts` contiguous blocks of sizes differing by at most one, the larger
/// blocks first.
pub fn partition_clique(c: &[Vertex], parts: usize) -> Vec<Vec<Vertex>> {
    let (base, extra) = (c.len() / parts, c.len() % parts);
    let mut out = Vec::with_capacity(parts);
    let mut at = 0;
    for i in 0..parts {
        let len = base + usize::from(i < extra);
        out.push(c[at..at + len].to_vec());
        at += len;
    }
    out
}

#[derive(Debug, Clone)]
struct Info {
    mate: Option<usize>,
    clique: Option<usize>,
    hard: bool,
}

/// Round 0: announce mate and clique. Round 1: a `C_HEG` vertex picks
/// `f(v)` (itself if matched, else its smallest external hard neighbour)
/// and `phi(v)`, the `F1` edge at `f(v)`.
struct Proposer<'a> {
    p: &'a AcdPartition,
    cls: &'a CliqueClassification,
    f1: &'a OrientedMatching,
}

type Proposal = std::result::Result<(Vertex, (Vertex, Vertex)), Vertex>;

impl NodeProgram for Proposer<'_> {
    type State = Vec<(usize, Info)>;
    type Msg = Info;
    type Output = Option<Proposal>;

    fn init(&self, _: LocalView<'_>) -> Self::State {
        Vec::new()
    }

    fn step(&self, round: usize, view: LocalView<'_>, seen: &mut Self::State, inbox: &[(usize, Info)]) -> Step<Info, Self::Output> {
        let v = view.id;
        let clique = self.p.clique_of(v);
        let mate = self.f1.mate(v);
        if round == 0 {
            let info = Info {
                mate,
                clique,
                hard: clique.is_some_and(|c| self.cls.is_hard(c)),
            };
            let send = view.neighbors.iter().map(|&w| (w, info.clone())).collect();
            return if clique.is_some_and(|c| self.cls.in_heg(c)) {
                Step::send(send)
            } else {
                Step::send_and_halt(send, None)
            };
        }
        seen.extend(inbox.iter().cloned());
        if let Some(w) = mate {
            return Step::halt(Some(Ok((v, (v.min(w), v.max(w))))));
        }
        let (w, info) = seen
            .iter()
            .find(|(_, i)| i.hard && i.clique != clique)
            .expect("C_HEG vertices have an external hard neighbour");
        Step::halt(Some(match info.mate {
            Some(m) => Ok((*w, ((*w).min(m), (*w).max(m)))),
            None => Err(*w),
        }))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GrabHypergraph {
    pub subcliques: Vec<SubClique>,
    /// `f(v)` for vertices of `C_HEG` cliques.
    pub f: Vec<Option<Vertex>>,
    /// `phi(v)` as an index into `F1`.
    pub phi: Vec<Option<usize>>,
    /// Per `F1` edge, the sub-cliques proposing it.
    pub hyperedges: Vec<Vec<usize>>,
    /// Per sub-clique, `(edge, witness vertex)` sorted by edge.
    pub incident: Vec<Vec<(usize, Vertex)>>,
    pub delta_h: usize,
    pub rank_h: usize,
    /// `delta_h > 1.1 rank_h`; reported, not required.
    pub margin_holds: bool,
    pub rounds: usize,
}

/// `(delta_H, r_H)`: smallest sub-clique degree and largest hyperedge.
pub fn degree_and_rank<A, B>(incident: &[Vec<A>], hyperedges: &[Vec<B>]) -> (usize, usize) {
    (
        incident.iter().map(Vec::len).min().unwrap_or(0),
        hyperedges.iter().map(Vec::len).max().unwrap_or(0),
    )
}

/// `delta_H > 1.1 r_H`
pub fn margin_holds(delta_h: usize, rank_h: usize) -> bool {
    10 * delta_h > 11 * rank_h
}

pub fn build_grab_hypergraph(
    g: &Graph,
    p: &AcdPartition,
    cls: &CliqueClassification,
    f1: &OrientedMatching,
    round_cap: usize,
) -> Result<GrabHypergraph> {
    let run = run_sync(g, &Proposer { p, cls, f1 }, round_cap)?;
    let mut f = vec![None; g.n()];
    let mut phi = vec![None; g.n()];
    for (v, out) in run.outputs.iter().enumerate() {
        match out {
            None => {}
            Some(Ok((fv, e))) => {
                f[v] = Some(*fv);
                phi[v] = Some(f1.index_of(*e).expect("proposed edge is in F1"));
            }
            Some(Err(w)) => {
                return Err(Error::invariant(format!(
                    "F1 is not maximal: {v} and its proposal target {w} are both unmatched"
                )))
            }
        }
    }

    let mut subcliques = Vec::new();
    for (ci, c) in p.cliques.iter().enumerate() {
        if !cls.in_heg(ci) {
            continue;
        }
        if c.len() < SUBCLIQUES {
            return Err(Error::invariant(format!("clique {ci} has {} < {SUBCLIQUES} vertices", c.len())));
        }
        subcliques.extend(partition_clique(c, SUBCLIQUES).into_iter().map(|vertices| SubClique { clique: ci, vertices }));
    }

    let mut hyperedges = vec![Vec::new(); f1.len()];
    let mut incident = Vec::with_capacity(subcliques.len());
    for (qi, q) in subcliques.iter().enumerate() {
        let mut props: Vec<(usize, Vertex)> = q.vertices.iter().map(|&v| (phi[v].expect("C_HEG vertex proposes"), v)).collect();
        props.sort_unstable();
        for w in props.windows(2) {
            let (u, v) = (w[0].1, w[1].1);
            if w[0].0 == w[1].0 {
                return Err(Error::ProposalCollision { subclique: qi, u, v });
            }
        }
        for (i, &u) in q.vertices.iter().enumerate() {
            if let Some(&v) = q.vertices[i + 1..].iter().find(|&&v| f[v] == f[u]) {
                return Err(Error::ProposalCollision { subclique: qi, u, v });
            }
        }
        for &(e, _) in &props {
            hyperedges[e].push(qi);
        }
        incident.push(props);
    }

    let (delta_h, rank_h) = degree_and_rank(&incident, &hyperedges);
    if !subcliques.is_empty() && delta_h < rank_h {
        return Err(Error::HallViolated { min_degree: delta_h, rank: rank_h });
    }
    if EPSILON_DEN * rank_h > 2 * g.delta() {
        return Err(Error::invariant(format!(
            "hyperedge rank {rank_h} exceeds 2 eps Delta = {:.3}",
            2.0 * g.delta() as f64 / EPSILON_DEN as f64
        )));
    }
    Ok(GrabHypergraph {
        subcliques,
        f,
        phi,
        hyperedges,
        incident,
        delta_h,
        rank_h,
        margin_holds: margin_holds(delta_h, rank_h),
        rounds: run.rounds,
    })
}

/// Distinct representatives by augmenting paths: `sets[i]` lists the
/// options of element `i`, tried in the given order. `None` if Hall fails.
pub fn find_sdr(sets: &[Vec<usize>]) -> Option<Vec<usize>> {
    fn augment(i: usize, sets: &[Vec<usize>], owner: &mut Vec<Option<usize>>, seen: &mut Vec<bool>) -> bool {
        for &x in &sets[i] {
            if seen[x] {
                continue;
            }
            seen[x] = true;
            if owner[x].map_or(true, |j| augment(j, sets, owner, seen)) {
                owner[x] = Some(i);
                return true;
            }
        }
        false
    }
    let universe = sets.iter().flatten().max().map_or(0, |&m| m + 1);
    let mut owner = vec![None; universe];
    for i in 0..sets.len() {
        let mut seen = vec![false; universe];
        if !augment(i, sets, &mut owner, &mut seen) {
            return None;
        }
    }
    let mut pick = vec![0; sets.len()];
    for (x, o) in owner.iter().enumerate() {
        if let Some(i) = *o {
            pick[i] = x;
        }
    }
    Some(pick)
}

/// Each sub-clique grabs one incident hyperedge, all distinct.
pub fn solve_heg(h: &GrabHypergraph) -> Result<Vec<usize>> {
    let sets: Vec<Vec<usize>> = h.incident.iter().map(|inc| inc.iter().map(|&(e, _)| e).collect()).collect();
    let grab = find_sdr(&sets).ok_or_else(|| Error::NoSdr {
        unassigned: (0..sets.len()).collect(),
    })?;
    check_grabbing(h, &grab)?;
    Ok(grab)
}

/// Independent certificate check: total, incident, injective.
pub fn check_grabbing(h: &GrabHypergraph, grab: &[usize]) -> Result<()> {
    if grab.len() != h.subcliques.len() {
        return Err(Error::invariant("grabbing is not total"));
    }
    let mut taken = vec![None; h.hyperedges.len()];
    for (q, &e) in grab.iter().enumerate() {
        if h.incident[q].binary_search_by_key(&e, |&(x, _)| x).is_err() {
            return Err(Error::invariant(format!("sub-clique {q} grabbed non-incident edge {e}")));
        }
        if let Some(other) = taken[e].replace(q) {
            return Err(Error::invariant(format!("edge {e} grabbed by sub-cliques {other} and {q}")));
        }
    }
    Ok(())
}

/// `F2`: per grabbing sub-clique with witness `v`, the `F1` edge itself if
/// `v` is matched, else `{v, f(v)}`; tail `v`.
pub fn build_f2(g: &Graph, p: &AcdPartition, h: &GrabHypergraph, f1: &OrientedMatching, grab: &[usize]) -> Result<OrientedMatching> {
    let mut edges = Vec::with_capacity(grab.len());
    for (q, &e) in grab.iter().enumerate() {
        let inc = &h.incident[q];
        let v = inc[inc.binary_search_by_key(&e, |&(x, _)| x).expect("checked grabbing")].1;
        let (a, b) = f1.edges[e];
        let head = if v == a {
            b
        } else if v == b {
            a
        } else {
            h.f[v].expect("witness proposes")
        };
        edges.push((v, head));
    }
    let f2 = OrientedMatching::new(g.n(), edges, true)?;
    if let Some(&(t, hd)) = f2.edges.iter().find(|&&(t, hd)| p.clique_of(t) == p.clique_of(hd)) {
        return Err(Error::invariant(format!("F2 edge ({t}, {hd}) stays inside a clique")));
    }
    Ok(f2)
}

/// Every `C_HEG` clique must hold 28 tails of `F2`.
pub fn check_outgoing(p: &AcdPartition, h: &GrabHypergraph, f2: &OrientedMatching) -> Result<()> {
    let mut outgoing = vec![0usize; p.cliques.len()];
    for &(t, _) in &f2.edges {
        outgoing[p.clique_of(t).expect("tails are clique vertices")] += 1;
    }
    for sq in &h.subcliques {
        if outgoing[sq.clique] < SUBCLIQUES {
            return Err(Error::TooFewOutgoing {
                clique: sq.clique,
                outgoing: outgoing[sq.clique],
                needed: SUBCLIQUES,
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct Phase1 {
    pub f1: OrientedMatching,
    pub hypergraph: GrabHypergraph,
    pub grabbing: Vec<usize>,
    pub f2: OrientedMatching,
}

pub fn run_phase1(g: &Graph, p: &AcdPartition, cls: &CliqueClassification, trace: &mut RoundTrace, round_cap: usize) -> Result<Phase1> {
    let (f1, rounds) = maximal_matching_f1(g, p, cls, round_cap)?;
    trace.simulated("phase1/f1-matching", rounds);
    let hypergraph = build_grab_hypergraph(g, p, cls, &f1, round_cap)?;
    trace.simulated("phase1/proposals", hypergraph.rounds);
    let grabbing = solve_heg(&hypergraph)?;
    trace.centralized("phase1/heg");
    let f2 = build_f2(g, p, &hypergraph, &f1, &grabbing)?;
    check_outgoing(p, &hypergraph, &f2)?;
    Ok(Phase1 {
        f1,
        hypergraph,
        grabbing,
        f2,
    })
}
