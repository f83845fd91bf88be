//! Phases 2 to 4: sparsify `F2` to `F3` on the sub-clique multigraph, form
//! one slack triad per clique, color the slack pairs on their virtual graph,
//! and finish the hard vertices with two list-coloring instances.

use serde::Serialize;

use crate::acd::{AcdPartition, EPSILON_DEN};
use crate::error::{Error, Result};
use crate::graph::{Color, Coloring, Graph, Vertex};
use crate::loophole::{CliqueClass, CliqueClassification};
use crate::matching::OrientedMatching;
use crate::sim::{lift_virtual, RoundTrace};
use crate::subroutines::list_coloring::{deg_plus1_list_color, extend_coloring};
use crate::subroutines::split::{degree_split, Multigraph, SplitAssignment};

pub const SPLIT_LEVELS: u32 = 2;
/// Real rounds per virtual round on slack pairs: the two pair vertices talk
/// through their slack vertex, then one real edge to the next pair.
pub const PAIR_DILATION: usize = 5;

/// `(Delta - 2 eps Delta - 1) / 2`
pub fn incoming_bound(delta: usize) -> f64 {
    let e = EPSILON_DEN as f64;
    (delta as f64 - 2.0 * delta as f64 / e - 1.0) / 2.0
}

fn incoming_ok(incoming: usize, delta: usize) -> bool {
    let e = EPSILON_DEN;
    2 * e * incoming + e < (e - 2) * delta
}

fn pair_count_ok(count: usize, delta: usize) -> bool {
    let e = EPSILON_DEN;
    2 * e * count <= (e - 2) * delta + e
}

/// `G_Q`: nodes `2c` (`Q_C^+`, tails of `F2`) and `2c + 1` (`Q_C^-`) per
/// clique, one edge per `F2` edge in the same order.
pub fn sub_clique_graph(p: &AcdPartition, f2: &OrientedMatching) -> Multigraph {
    let tail = |v: Vertex| f2.edge_at(v).is_some_and(|i| f2.edges[i].0 == v);
    let node = |v: Vertex| 2 * p.clique_of(v).expect("F2 lives on clique vertices") + usize::from(!tail(v));
    Multigraph::new(2 * p.cliques.len(), f2.edges.iter().map(|&(t, h)| (node(t), node(h))).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct Sparsified {
    pub f3: OrientedMatching,
    pub split: SplitAssignment,
    /// Per clique, outgoing and incoming edges of part 0 before the discard.
    pub outgoing: Vec<usize>,
    pub incoming: Vec<usize>,
}

pub fn derive_f3(g: &Graph, p: &AcdPartition, cls: &CliqueClassification, f2: &OrientedMatching) -> Result<Sparsified> {
    let delta = g.delta();
    let k = p.cliques.len();
    let split = degree_split(&sub_clique_graph(p, f2), SPLIT_LEVELS)?;
    let part0: Vec<(Vertex, Vertex)> = f2
        .edges
        .iter()
        .zip(&split.part_of)
        .filter(|&(_, &part)| part == 0)
        .map(|(&e, _)| e)
        .collect();
    let clique = |v: Vertex| p.clique_of(v).expect("clique vertex");
    let mut outgoing = vec![0; k];
    let mut incoming = vec![0; k];
    for &(t, h) in &part0 {
        outgoing[clique(t)] += 1;
        incoming[clique(h)] += 1;
    }
    for c in 0..k {
        if cls.in_heg(c) && outgoing[c] < 2 {
            return Err(Error::TooFewOutgoing {
                clique: c,
                outgoing: outgoing[c],
                needed: 2,
            });
        }
        if cls.is_hard(c) && !incoming_ok(incoming[c], delta) {
            return Err(Error::IncomingBound {
                clique: c,
                incoming: incoming[c],
                bound: incoming_bound(delta),
            });
        }
    }
    // part0 is sorted by tail, so the first two per clique have the lowest tails
    let mut kept = vec![0; k];
    let f3_edges: Vec<(Vertex, Vertex)> = part0
        .into_iter()
        .filter(|&(t, _)| {
            let c = clique(t);
            kept[c] += 1;
            kept[c] <= 2
        })
        .collect();
    Ok(Sparsified {
        f3: OrientedMatching::new(g.n(), f3_edges, true)?,
        split,
        outgoing,
        incoming,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SlackTriad {
    /// Slack vertex, tail of the lower-tail outgoing edge.
    pub u: Vertex,
    /// Tail of the other outgoing edge, in the same clique.
    pub v: Vertex,
    /// Head of `u`'s edge, outside the clique.
    pub w: Vertex,
    pub clique: usize,
}

pub fn form_triads(g: &Graph, p: &AcdPartition, cls: &CliqueClassification, f3: &OrientedMatching) -> Result<Vec<SlackTriad>> {
    let k = p.cliques.len();
    let mut out: Vec<Vec<(Vertex, Vertex)>> = vec![Vec::new(); k];
    for &(t, h) in &f3.edges {
        out[p.clique_of(t).expect("clique vertex")].push((t, h));
    }
    let mut triads = Vec::new();
    for c in 0..k {
        if !cls.in_heg(c) {
            continue;
        }
        let [(u, w), (v, _)] = out[c][..] else {
            return Err(Error::invariant(format!("clique {c} has {} outgoing edges in F3, expected 2", out[c].len())));
        };
        if g.has_edge(v, w) {
            return Err(Error::SlackPairAdjacent { u, v, w });
        }
        triads.push(SlackTriad { u, v, w, clique: c });
    }

    let mut owner = vec![false; g.n()];
    let mut pair_vertices = vec![0usize; k];
    for t in &triads {
        for x in [t.u, t.v, t.w] {
            if std::mem::replace(&mut owner[x], true) {
                return Err(Error::TriadOverlap { vertex: x });
            }
        }
        for x in [t.v, t.w] {
            pair_vertices[p.clique_of(x).expect("clique vertex")] += 1;
        }
    }
    let delta = g.delta();
    if let Some(c) = (0..k).find(|&c| !pair_count_ok(pair_vertices[c], delta)) {
        return Err(Error::SlackPairCount {
            clique: c,
            count: pair_vertices[c],
            bound: incoming_bound(delta) + 1.0,
        });
    }
    Ok(triads)
}

#[derive(Debug, Clone, Serialize)]
pub struct PairColoring {
    pub virtual_rounds: usize,
    pub max_degree: usize,
}

/// Colors both vertices of every slack pair with one color, from `palette`
/// minus colors already next to the pair.
pub fn color_slack_pairs(g: &Graph, triads: &[SlackTriad], palette: &[Color], coloring: &mut Coloring, round_cap: usize) -> Result<PairColoring> {
    let mut groups: Vec<Vec<Vertex>> = triads.iter().map(|t| vec![t.v.min(t.w), t.v.max(t.w)]).collect();
    groups.sort_unstable();
    let vg = lift_virtual(g, &groups)?;
    let bound = g.delta().saturating_sub(2);
    for i in 0..groups.len() {
        if vg.graph.degree(i) > bound {
            return Err(Error::VirtualDegree {
                pair: i,
                degree: vg.graph.degree(i),
                bound,
                neighbors: vg.graph.neighbors(i).to_vec(),
            });
        }
    }
    let lists: Vec<Vec<Color>> = groups
        .iter()
        .map(|grp| {
            let taken: Vec<Color> = grp.iter().flat_map(|&x| g.neighbors(x)).filter_map(|&y| coloring.get(y)).collect();
            palette.iter().copied().filter(|c| !taken.contains(c)).collect()
        })
        .collect();
    let labels: Vec<usize> = groups.iter().map(|grp| grp[0]).collect();
    let out = deg_plus1_list_color(&vg.graph, &labels, &lists, round_cap)?;
    for (grp, &c) in groups.iter().zip(&out.colors) {
        for &x in grp {
            coloring.set(x, c);
        }
    }
    Ok(PairColoring {
        virtual_rounds: out.rounds,
        max_degree: vg.graph.delta(),
    })
}

/// Colors all remaining hard vertices. Instance 1 skips the slack vertices
/// and one uncolored anchor per Type II clique, which keep a free color for
/// their clique-mates; instance 2 colors those. Returns the anchors used.
pub fn color_remaining_hard(
    g: &Graph,
    p: &AcdPartition,
    cls: &CliqueClassification,
    triads: &[SlackTriad],
    coloring: &mut Coloring,
    trace: &mut RoundTrace,
    round_cap: usize,
) -> Result<Vec<(usize, Vertex)>> {
    let hard = |v: Vertex| p.clique_of(v).is_some_and(|c| cls.is_hard(c));
    let mut special: Vec<Vertex> = Vec::new();
    for t in triads {
        if coloring.is_colored(t.u) {
            return Err(Error::MissingSlackSource { clique: t.clique });
        }
        special.push(t.u);
    }
    let mut anchors = Vec::new();
    for (c, class) in cls.classes.iter().enumerate() {
        if !matches!(class, CliqueClass::TypeIi { .. }) {
            continue;
        }
        let anchor = p.cliques[c]
            .iter()
            .copied()
            .find(|&v| !coloring.is_colored(v) && g.neighbors(v).iter().any(|&w| p.clique_of(w) != Some(c) && !hard(w)))
            .ok_or(Error::MissingSlackSource { clique: c })?;
        anchors.push((c, anchor));
        special.push(anchor);
    }
    special.sort_unstable();

    let first: Vec<Vertex> = (0..g.n())
        .filter(|&v| hard(v) && !coloring.is_colored(v) && special.binary_search(&v).is_err())
        .collect();
    let r1 = extend_coloring(g, &first, coloring, round_cap)?;
    trace.simulated("phase4/instance-1", r1);
    let r2 = extend_coloring(g, &special, coloring, round_cap)?;
    trace.simulated("phase4/instance-2", r2);
    if let Some(v) = (0..g.n()).find(|&v| hard(v) && !coloring.is_colored(v)) {
        return Err(Error::invariant(format!("hard vertex {v} left uncolored")));
    }
    Ok(anchors)
}

#[derive(Debug, Clone, Serialize)]
pub struct HardOutcome {
    pub sparsified: Sparsified,
    pub triads: Vec<SlackTriad>,
    pub pairs: PairColoring,
    pub anchors: Vec<(usize, Vertex)>,
}

pub fn run_phases_2_to_4(
    g: &Graph,
    p: &AcdPartition,
    cls: &CliqueClassification,
    f2: &OrientedMatching,
    coloring: &mut Coloring,
    trace: &mut RoundTrace,
    round_cap: usize,
) -> Result<HardOutcome> {
    let sparsified = derive_f3(g, p, cls, f2)?;
    trace.centralized("phase2/split");
    let triads = form_triads(g, p, cls, &sparsified.f3)?;
    trace.centralized("phase3/triads");
    let palette: Vec<Color> = (0..g.delta() as Color).collect();
    let pairs = color_slack_pairs(g, &triads, &palette, coloring, round_cap)?;
    trace.simulated("phase4/slack-pairs", pairs.virtual_rounds * PAIR_DILATION);
    let anchors = color_remaining_hard(g, p, cls, &triads, coloring, trace, round_cap)?;
    Ok(HardOutcome {
        sparsified,
        triads,
        pairs,
        anchors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acd::{compute_acd, Eta};
    use crate::generator::gen_hard_dense;
    use crate::graph::verify_coloring;
    use crate::loophole::{classify_cliques, enumerate_loopholes};
    use crate::matching::run_phase1;

    #[test]
    fn integer_bounds_match_the_fractions() {
        for delta in 63..400 {
            let b = incoming_bound(delta);
            for x in 0..delta {
                let strictly_below = (x as f64) < b && b - x as f64 > 1e-9;
                assert_eq!(incoming_ok(x, delta), strictly_below);
                assert_eq!(pair_count_ok(x, delta), x as f64 <= b + 1.0 + 1e-9);
            }
        }
        assert!(incoming_ok(29, 63) && !incoming_ok(30, 63));
        assert!(pair_count_ok(31, 63) && !pair_count_ok(32, 63));
    }

    #[test]
    fn ring128_hard_phases() {
        let inst = gen_hard_dense(128, 63, 0).unwrap();
        let g = &inst.graph;
        let p = compute_acd(g, Eta::default());
        let cls = classify_cliques(g, &p, &enumerate_loopholes(g, &p).unwrap()).unwrap();
        let mut trace = RoundTrace::default();
        let ph1 = run_phase1(g, &p, &cls, &mut trace, 10_000).unwrap();
        let mg = sub_clique_graph(&p, &ph1.f2);
        assert_eq!(mg.edges.len(), ph1.f2.len());
        let mut coloring = Coloring::empty(g.n(), g.delta());
        let out = run_phases_2_to_4(g, &p, &cls, &ph1.f2, &mut coloring, &mut trace, 100_000).unwrap();
        assert_eq!(out.triads.len(), 128);
        assert!(out.sparsified.f3.edges.iter().all(|e| ph1.f2.index_of(*e).is_some()));
        for c in 0..128 {
            assert!(out.sparsified.outgoing[c] >= 2);
            assert!(out.sparsified.incoming[c] < 30);
        }
        assert!(out.pairs.max_degree <= 61);
        assert!(out.anchors.is_empty());
        assert!(verify_coloring(g, &coloring, true).passed());
        assert!(trace.is_consistent());
    }

    #[test]
    fn lone_triad_gets_color_zero() {
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (2, 3)]).unwrap();
        let mut c = Coloring::empty(4, g.delta());
        let t = SlackTriad { u: 0, v: 1, w: 2, clique: 0 };
        color_slack_pairs(&g, &[t], &[0, 1], &mut c, 10).unwrap();
        assert_eq!((c.get(1), c.get(2)), (Some(0), Some(0)));
    }
}
