//! Loopholes on at most six vertices, hard/easy classification of the
//! almost-cliques, and the coloring of easy cliques and loopholes.
//!
//! Enumeration works on a block skeleton: every complete almost-clique is one
//! block and every other vertex is a block of its own. A cycle is a sequence
//! of runs inside blocks joined by jump edges between blocks. The search
//! fixes the entry and exit vertex of each run (at most six in total) and
//! only afterwards fills complete blocks with interior vertices, so it never
//! walks the `Delta^5` paths inside a clique. Loopholes are identified by
//! their vertex set.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::acd::AcdPartition;
use crate::error::{Error, Result};
use crate::graph::{Color, Coloring, Graph, Vertex};
use crate::oracle;
use crate::par;
use crate::sim::{run_sync_labeled, LocalView, NodeProgram, RoundTrace, Step};
use crate::subroutines::list_coloring::extend_coloring;
use crate::subroutines::ruling::ruling_set;

pub const MAX_LOOPHOLE: usize = 6;
pub const RULING_RADIUS: usize = 6;
pub const BFS_DEPTH: usize = 25;
/// Default cap on enumeration work (search nodes plus emitted sets).
pub const LOOPHOLE_BUDGET: u64 = 200_000_000;
const DEG_LIST_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoopholeKind {
    LowDegreeVertex,
    NonCliqueEvenCycle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Loophole {
    pub kind: LoopholeKind,
    /// The vertex, or the smallest canonical Hamiltonian cycle of the set.
    pub vertices: Vec<Vertex>,
    pub home_cliques: Vec<usize>,
}

impl Loophole {
    pub fn contains(&self, v: Vertex) -> bool {
        self.vertices.contains(&v)
    }

    pub fn vertex_set(&self) -> Vec<Vertex> {
        let mut s = self.vertices.clone();
        s.sort_unstable();
        s
    }
}

/// Cycle through all of `set` (sorted), rotated to its smallest vertex and
/// oriented so the second vertex is smaller than the last; the
/// lexicographically smallest such cycle.
pub fn canonical_cycle(g: &Graph, set: &[Vertex]) -> Option<Vec<Vertex>> {
    fn go(g: &Graph, set: &[Vertex], path: &mut Vec<Vertex>, best: &mut Option<Vec<Vertex>>) {
        if path.len() == set.len() {
            let closes = g.has_edge(path[path.len() - 1], path[0]);
            if closes && path[1] < path[path.len() - 1] && best.as_ref().map_or(true, |b| *path < *b) {
                *best = Some(path.clone());
            }
            return;
        }
        for &v in &set[1..] {
            if !path.contains(&v) && g.has_edge(path[path.len() - 1], v) {
                path.push(v);
                go(g, set, path, best);
                path.pop();
            }
        }
    }
    if set.len() < 3 {
        return None;
    }
    let mut best = None;
    go(g, set, &mut vec![set[0]], &mut best);
    best
}

fn is_clique(g: &Graph, set: &[Vertex]) -> bool {
    set.iter()
        .enumerate()
        .all(|(i, &u)| set[i + 1..].iter().all(|&v| g.has_edge(u, v)))
}

struct Skeleton<'a> {
    blocks: Vec<Vec<Vertex>>,
    block_of: Vec<usize>,
    jumps: Vec<Vec<Vertex>>,
    between: HashMap<(usize, usize), Vec<Vertex>>,
    g: &'a Graph,
}

impl<'a> Skeleton<'a> {
    fn new(g: &'a Graph, p: &AcdPartition) -> Self {
        let mut blocks = Vec::new();
        let mut block_of = vec![usize::MAX; g.n()];
        for c in &p.cliques {
            if c.len() > 1 && is_clique(g, c) {
                for &v in c {
                    block_of[v] = blocks.len();
                }
                blocks.push(c.clone());
            }
        }
        for v in 0..g.n() {
            if block_of[v] == usize::MAX {
                block_of[v] = blocks.len();
                blocks.push(vec![v]);
            }
        }
        let jumps: Vec<Vec<Vertex>> = (0..g.n())
            .map(|v| g.neighbors(v).iter().copied().filter(|&w| block_of[w] != block_of[v]).collect())
            .collect();
        let mut between: HashMap<(usize, usize), Vec<Vertex>> = HashMap::new();
        for v in 0..g.n() {
            for &w in &jumps[v] {
                between.entry((block_of[v], block_of[w])).or_default().push(v);
            }
        }
        for list in between.values_mut() {
            list.dedup();
        }
        Skeleton {
            blocks,
            block_of,
            jumps,
            between,
            g,
        }
    }
}

struct Walk<'s, 'a> {
    sk: &'s Skeleton<'a>,
    q0: Vertex,
    b0: usize,
    used: Vec<Vertex>,
    /// (block, entry, exit) of every run except the closing one
    runs: Vec<(usize, Vertex, Vertex)>,
    work: u64,
    budget: u64,
    found: BTreeSet<Vec<Vertex>>,
}

impl Walk<'_, '_> {
    fn tick(&mut self) -> Result<()> {
        self.work += 1;
        if self.work > self.budget {
            return Err(Error::LoopholeBudget { work: self.work });
        }
        Ok(())
    }

    /// `p` was just entered; `c` fixed vertices so far, `p` included.
    fn enter(&mut self, p: Vertex, c: usize) -> Result<()> {
        self.tick()?;
        let sk = self.sk;
        let b = sk.block_of[p];
        if b == self.b0 {
            self.emit(c, (b, p, self.q0))?;
        }
        let mut exits = vec![p];
        if sk.blocks[b].len() > 1 {
            let rem = MAX_LOOPHOLE - c;
            let mut cand: Vec<Vertex> = match rem {
                0 => Vec::new(),
                1 => sk.jumps[self.q0].iter().copied().filter(|&x| sk.block_of[x] == b).collect(),
                2 => {
                    let mut v = sk.between.get(&(b, self.b0)).cloned().unwrap_or_default();
                    for &p2 in &sk.jumps[self.q0] {
                        v.extend(sk.jumps[p2].iter().copied().filter(|&x| sk.block_of[x] == b));
                    }
                    v
                }
                _ => sk.blocks[b].clone(),
            };
            cand.sort_unstable();
            cand.dedup();
            exits.extend(cand.into_iter().filter(|&x| x != p && !self.used.contains(&x)));
        }
        for q in exits {
            let cq = c + usize::from(q != p);
            if q != p {
                self.used.push(q);
            }
            self.runs.push((b, p, q));
            for &p2 in &sk.jumps[q] {
                if p2 == self.q0 {
                    self.emit(cq, (self.b0, self.q0, self.q0))?;
                } else if cq < MAX_LOOPHOLE && !self.used.contains(&p2) {
                    self.used.push(p2);
                    self.enter(p2, cq + 1)?;
                    self.used.pop();
                }
            }
            self.runs.pop();
            if q != p {
                self.used.pop();
            }
        }
        Ok(())
    }

    /// Records every vertex set obtained by filling the runs up to a cycle
    /// of length 4 or 6.
    fn emit(&mut self, c: usize, closing: (usize, Vertex, Vertex)) -> Result<()> {
        let mut fill_blocks: Vec<usize> = self
            .runs
            .iter()
            .chain(std::iter::once(&closing))
            .filter(|(_, p, q)| p != q)
            .map(|&(b, _, _)| b)
            .collect();
        fill_blocks.sort_unstable();
        fill_blocks.dedup();
        let pools: Vec<Vec<Vertex>> = fill_blocks
            .iter()
            .map(|&b| self.sk.blocks[b].iter().copied().filter(|v| !self.used.contains(v)).collect())
            .collect();
        for len in [4, 6] {
            if len < c || (len > c && pools.is_empty()) {
                continue;
            }
            let mut chosen = Vec::new();
            self.fill(&pools, 0, 0, len - c, &mut chosen)?;
        }
        Ok(())
    }

    fn fill(&mut self, pools: &[Vec<Vertex>], pool: usize, from: usize, extra: usize, chosen: &mut Vec<Vertex>) -> Result<()> {
        if extra == 0 {
            self.tick()?;
            let mut set: Vec<Vertex> = self.used.iter().chain(chosen.iter()).copied().collect();
            set.sort_unstable();
            if !is_clique(self.sk.g, &set) {
                self.found.insert(set);
            }
            return Ok(());
        }
        if pool == pools.len() {
            return Ok(());
        }
        for i in from..pools[pool].len() {
            chosen.push(pools[pool][i]);
            self.fill(pools, pool, i + 1, extra - 1, chosen)?;
            chosen.pop();
        }
        self.fill(pools, pool + 1, 0, extra, chosen)
    }
}

/// All loopholes with the default work budget.
pub fn enumerate_loopholes(g: &Graph, p: &AcdPartition) -> Result<Vec<Loophole>> {
    enumerate_loopholes_with_budget(g, p, LOOPHOLE_BUDGET)
}

/// Kind 1: almost-clique vertices of degree below `Delta`. Kind 2: vertex
/// sets of size 4 or 6 meeting an almost-clique, spanned by a cycle and not
/// inducing a clique. Sorted by `vertices`.
pub fn enumerate_loopholes_with_budget(g: &Graph, p: &AcdPartition, budget: u64) -> Result<Vec<Loophole>> {
    let delta = g.delta();
    let sk = Skeleton::new(g, p);
    let starts: Vec<Vertex> = p.cliques.iter().flatten().copied().collect();
    let per_start = par::map_slice(&starts, |&q0| -> Result<(BTreeSet<Vec<Vertex>>, u64)> {
        let mut walk = Walk {
            sk: &sk,
            q0,
            b0: sk.block_of[q0],
            used: vec![q0],
            runs: Vec::new(),
            work: 0,
            budget,
            found: BTreeSet::new(),
        };
        for &p1 in &sk.jumps[q0] {
            walk.used.push(p1);
            walk.enter(p1, 2)?;
            walk.used.pop();
        }
        Ok((walk.found, walk.work))
    });
    let mut sets = BTreeSet::new();
    let mut work = 0u64;
    for r in per_start {
        let (found, w) = r?;
        work += w;
        if work > budget {
            return Err(Error::LoopholeBudget { work });
        }
        sets.extend(found);
    }
    let sets: Vec<Vec<Vertex>> = sets.into_iter().collect();
    let home = |vs: &[Vertex]| {
        let mut h: Vec<usize> = vs.iter().filter_map(|&v| p.clique_of(v)).collect();
        h.sort_unstable();
        h.dedup();
        h
    };
    let mut out: Vec<Loophole> = starts
        .iter()
        .filter(|&&v| g.degree(v) < delta)
        .map(|&v| Loophole {
            kind: LoopholeKind::LowDegreeVertex,
            vertices: vec![v],
            home_cliques: home(&[v]),
        })
        .collect();
    out.extend(par::map_slice(&sets, |set| {
        let cycle = canonical_cycle(g, set).expect("skeleton sets are spanned by a cycle");
        Loophole {
            kind: LoopholeKind::NonCliqueEvenCycle,
            home_cliques: home(set),
            vertices: cycle,
        }
    }));
    out.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum CliqueClass {
    Easy,
    /// Hard, and every vertex has an external neighbour in a hard clique.
    Heg,
    /// Hard with an anchor: its smallest vertex with a non-hard external
    /// neighbour.
    TypeIi { anchor: Vertex },
}

#[derive(Debug, Clone, Serialize)]
pub struct CliqueClassification {
    pub classes: Vec<CliqueClass>,
}

impl CliqueClassification {
    pub fn is_hard(&self, c: usize) -> bool {
        self.classes[c] != CliqueClass::Easy
    }

    pub fn in_heg(&self, c: usize) -> bool {
        self.classes[c] == CliqueClass::Heg
    }

    pub fn anchor(&self, c: usize) -> Option<Vertex> {
        match self.classes[c] {
            CliqueClass::TypeIi { anchor } => Some(anchor),
            _ => None,
        }
    }

    pub fn hard_cliques(&self) -> Vec<usize> {
        (0..self.classes.len()).filter(|&c| self.is_hard(c)).collect()
    }

    pub fn easy_count(&self) -> usize {
        self.classes.iter().filter(|c| **c == CliqueClass::Easy).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("classification serializes")
    }
}

/// Easy iff the clique holds a loophole vertex. Hard cliques must be true
/// cliques of `Delta`-degree vertices with no outside vertex seeing two of
/// them; a violation means a loophole was missed.
pub fn classify_cliques(g: &Graph, p: &AcdPartition, loopholes: &[Loophole]) -> Result<CliqueClassification> {
    let k = p.cliques.len();
    let mut easy = vec![false; k];
    for l in loopholes {
        for &v in &l.vertices {
            if let Some(c) = p.clique_of(v) {
                easy[c] = true;
            }
        }
    }
    let hard_vertex = |v: Vertex| p.clique_of(v).is_some_and(|c| !easy[c]);
    let delta = g.delta();
    let mut classes = Vec::with_capacity(k);
    for (ci, c) in p.cliques.iter().enumerate() {
        if easy[ci] {
            classes.push(CliqueClass::Easy);
            continue;
        }
        for (i, &u) in c.iter().enumerate() {
            if let Some(&w) = c[i + 1..].iter().find(|&&w| !g.has_edge(u, w)) {
                return Err(Error::HardCliqueProperty {
                    clique: ci,
                    property: 1,
                    witness: vec![u, w],
                });
            }
        }
        if let Some(&v) = c.iter().find(|&&v| g.degree(v) != delta) {
            return Err(Error::HardCliqueProperty {
                clique: ci,
                property: 2,
                witness: vec![v],
            });
        }
        let mut seen: HashMap<Vertex, Vertex> = HashMap::new();
        for &v in c {
            for &w in g.neighbors(v) {
                if p.clique_of(w) != Some(ci) {
                    if let Some(&first) = seen.get(&w) {
                        return Err(Error::HardCliqueProperty {
                            clique: ci,
                            property: 3,
                            witness: vec![w, first, v],
                        });
                    }
                    seen.insert(w, v);
                }
            }
        }
        let anchor = c.iter().copied().find(|&v| {
            !g.neighbors(v)
                .iter()
                .any(|&w| p.clique_of(w) != Some(ci) && hard_vertex(w))
        });
        classes.push(match anchor {
            None => CliqueClass::Heg,
            Some(anchor) => CliqueClass::TypeIi { anchor },
        });
    }
    Ok(CliqueClassification { classes })
}

/// Colors `sub` (sorted, at most 8 vertices) from `lists` by exhaustive
/// search. Requires `|list(v)| >= deg_sub(v)`.
pub fn deg_list_color(g: &Graph, sub: &[Vertex], lists: &[Vec<Color>]) -> Result<Vec<Color>> {
    assert!(sub.len() <= oracle::MAX_DEG_LIST_N);
    let inst = g.induced(sub);
    for (i, &v) in sub.iter().enumerate() {
        if lists[i].len() < inst.degree(i) {
            return Err(Error::ListPrecondition {
                vertex: v,
                list_len: lists[i].len(),
                degree: inst.degree(i),
            });
        }
    }
    oracle::brute_deg_list(&inst, lists, DEG_LIST_BUDGET)?.ok_or_else(|| Error::DegListFailure { vertices: sub.to_vec() })
}

/// Voted loopholes (indices into the loophole list), the graph `G_L` on
/// them, and its ruling set (indices into `voted`).
#[derive(Debug, Clone)]
pub struct LoopholeGraph {
    pub voted: Vec<usize>,
    pub graph: Graph,
    pub ruling: Vec<usize>,
}

/// Each loophole vertex votes for the smallest loophole containing it.
pub fn vote(loopholes: &[Loophole]) -> Vec<usize> {
    let mut best: HashMap<Vertex, usize> = HashMap::new();
    for (i, l) in loopholes.iter().enumerate() {
        for &v in &l.vertices {
            best.entry(v).or_insert(i);
        }
    }
    let mut voted: Vec<usize> = best.into_values().collect();
    voted.sort_unstable();
    voted.dedup();
    voted
}

/// `G_L`: voted loopholes adjacent iff they intersect or a real edge joins
/// them.
pub fn loophole_graph_edges(g: &Graph, loopholes: &[Loophole], voted: &[usize]) -> Vec<(usize, usize)> {
    let mut holder: HashMap<Vertex, Vec<usize>> = HashMap::new();
    for (i, &l) in voted.iter().enumerate() {
        for &v in &loopholes[l].vertices {
            holder.entry(v).or_default().push(i);
        }
    }
    let mut edges = BTreeSet::new();
    for (i, &l) in voted.iter().enumerate() {
        for &v in &loopholes[l].vertices {
            for u in std::iter::once(v).chain(g.neighbors(v).iter().copied()) {
                for &j in holder.get(&u).into_iter().flatten() {
                    if j > i {
                        edges.insert((i, j));
                    }
                }
            }
        }
    }
    edges.into_iter().collect()
}

/// Largest distance between two vertices of a loophole inside it.
fn internal_diameter(g: &Graph, vertices: &[Vertex]) -> usize {
    let mut sorted = vertices.to_vec();
    sorted.sort_unstable();
    let h = g.induced(&sorted);
    (0..h.n())
        .map(|s| {
            let mut dist = vec![usize::MAX; h.n()];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &w in h.neighbors(v) {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[v] + 1;
                        queue.push_back(w);
                    }
                }
            }
            dist.into_iter().max().unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}

struct Bfs {
    depth: usize,
    sources: Vec<bool>,
}

impl NodeProgram for Bfs {
    type State = ();
    type Msg = ();
    type Output = Option<usize>;

    fn init(&self, _: LocalView<'_>) {}

    fn step(&self, round: usize, view: LocalView<'_>, _: &mut (), inbox: &[(usize, ())]) -> Step<(), Option<usize>> {
        let relay = || view.neighbors.iter().map(|&w| (w, ())).collect();
        if round == 0 && self.sources[view.id] {
            return Step::send_and_halt(relay(), Some(0));
        }
        if !inbox.is_empty() {
            return if round < self.depth {
                Step::send_and_halt(relay(), Some(round))
            } else {
                Step::halt(Some(round))
            };
        }
        if round >= self.depth {
            return Step::halt(None);
        }
        Step::wait()
    }
}

#[derive(Debug, Clone)]
pub struct EasyOutcome {
    pub loophole_graph: LoopholeGraph,
    /// Largest BFS layer.
    pub depth: usize,
}

/// Colors every vertex left uncolored by the hard phases: vote, ruling set
/// on `G_L`, BFS layering from the ruling loopholes, layers from the outside
/// in, and finally the ruling loopholes themselves. Returns `None` when
/// nothing is uncolored.
pub fn color_easy_and_loopholes(
    g: &Graph,
    loopholes: &[Loophole],
    coloring: &mut Coloring,
    trace: &mut RoundTrace,
    round_cap: usize,
) -> Result<Option<EasyOutcome>> {
    let uncolored: Vec<Vertex> = (0..g.n()).filter(|&v| !coloring.is_colored(v)).collect();
    if uncolored.is_empty() {
        return Ok(None);
    }
    let voted = vote(loopholes);
    trace.centralized("easy/vote");

    let gl = Graph::from_edges(voted.len(), loophole_graph_edges(g, loopholes, &voted))?;
    let labels: Vec<usize> = (0..voted.len()).collect();
    let rs = ruling_set(&gl, &labels, RULING_RADIUS, round_cap)?;
    // one G_L round crosses a loophole, one edge, and the next loophole
    let dilation = 2 * voted.iter().map(|&l| internal_diameter(g, &loopholes[l].vertices)).max().unwrap_or(0) + 1;
    trace.simulated("easy/ruling-set", rs.rounds * dilation);

    let mut is_source = vec![false; g.n()];
    for &i in &rs.members {
        for &v in &loopholes[voted[i]].vertices {
            is_source[v] = true;
        }
    }
    if let Some(&v) = uncolored.iter().find(|&&v| is_source[v] && coloring.is_colored(v)) {
        return Err(Error::invariant(format!("ruling loophole vertex {v} is already colored")));
    }
    let sub = g.induced(&uncolored);
    let bfs = Bfs {
        depth: BFS_DEPTH,
        sources: uncolored.iter().map(|&v| is_source[v]).collect(),
    };
    let labels: Vec<usize> = (0..uncolored.len()).collect();
    let run = run_sync_labeled(&sub, &labels, &bfs, round_cap)?;
    if let Some(i) = run.outputs.iter().position(Option::is_none) {
        return Err(Error::Uncovered {
            vertex: uncolored[i],
            depth: BFS_DEPTH,
        });
    }
    trace.simulated("easy/bfs", run.rounds);
    let layer_of: Vec<usize> = run.outputs.iter().map(|d| d.expect("covered")).collect();
    let depth = layer_of.iter().copied().max().unwrap_or(0);

    let mut layer_rounds = 0;
    for d in (1..=depth).rev() {
        let layer: Vec<Vertex> = uncolored
            .iter()
            .zip(&layer_of)
            .filter(|&(_, &l)| l == d)
            .map(|(&v, _)| v)
            .collect();
        layer_rounds += extend_coloring(g, &layer, coloring, round_cap)?;
    }
    trace.simulated("easy/layers", layer_rounds);

    for &i in &rs.members {
        let sub = loopholes[voted[i]].vertex_set();
        let lists: Vec<Vec<Color>> = sub.iter().map(|&v| coloring.palette(g, v)).collect();
        let colors = deg_list_color(g, &sub, &lists)?;
        for (&v, c) in sub.iter().zip(colors) {
            coloring.set(v, c);
        }
    }
    trace.centralized("easy/loopholes");

    Ok(Some(EasyOutcome {
        loophole_graph: LoopholeGraph {
            voted,
            graph: gl,
            ruling: rs.members,
        },
        depth,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acd::{compute_acd, Eta};
    use crate::generator::{gen_hard_dense, gen_mixed_dense, GenSpec};
    use crate::graph::verify_coloring;
    use crate::subroutines::ruling::is_ruling_set;

    fn clique_edges(base: usize, size: usize) -> Vec<(usize, usize)> {
        (0..size)
            .flat_map(|i| (i + 1..size).map(move |j| (base + i, base + j)))
            .collect()
    }

    #[test]
    fn canonical_cycle_of_c4() {
        let g = Graph::from_edges(4, [(0, 2), (2, 1), (1, 3), (3, 0)]).unwrap();
        assert_eq!(canonical_cycle(&g, &[0, 1, 2, 3]), Some(vec![0, 2, 1, 3]));
        let path = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(canonical_cycle(&path, &[0, 1, 2, 3]), None);
    }

    #[test]
    fn ring128_has_no_loopholes_and_all_heg() {
        let inst = gen_hard_dense(128, 63, 0).unwrap();
        let p = compute_acd(&inst.graph, Eta::default());
        let ls = enumerate_loopholes(&inst.graph, &p).unwrap();
        assert!(ls.is_empty());
        let cls = classify_cliques(&inst.graph, &p, &ls).unwrap();
        assert!((0..128).all(|c| cls.in_heg(c)));
    }

    #[test]
    fn one_drop_gives_two_kind1_and_type_ii() {
        let spec = GenSpec {
            easy_drop: 1,
            ..GenSpec::hard(128, 63, 0)
        };
        let inst = gen_mixed_dense(&spec).unwrap();
        let p = compute_acd(&inst.graph, Eta::default());
        let ls = enumerate_loopholes(&inst.graph, &p).unwrap();
        assert_eq!(ls.len(), 2);
        assert!(ls.iter().all(|l| l.kind == LoopholeKind::LowDegreeVertex));
        let cls = classify_cliques(&inst.graph, &p, &ls).unwrap();
        assert_eq!(cls.easy_count(), 2);
        let type_ii: Vec<usize> = (0..128).filter(|&c| cls.anchor(c).is_some()).collect();
        assert!(!type_ii.is_empty());
        for c in type_ii {
            let a = cls.anchor(c).unwrap();
            assert!(inst.graph.neighbors(a).iter().any(|&w| !cls.is_hard(p.clique_of(w).unwrap())));
        }
    }

    #[test]
    fn double_pair_gives_a_four_cycle() {
        let spec = GenSpec {
            easy_double: 1,
            ..GenSpec::hard(128, 63, 0)
        };
        let inst = gen_mixed_dense(&spec).unwrap();
        let p = compute_acd(&inst.graph, Eta::default());
        let ls = enumerate_loopholes(&inst.graph, &p).unwrap();
        let fours: Vec<&Loophole> = ls.iter().filter(|l| l.vertices.len() == 4).collect();
        assert!(!fours.is_empty());
        for l in &ls {
            assert_eq!(l.kind, LoopholeKind::NonCliqueEvenCycle);
            assert!(!is_clique(&inst.graph, &l.vertex_set()));
            let n = l.vertices.len();
            assert!((0..n).all(|i| inst.graph.has_edge(l.vertices[i], l.vertices[(i + 1) % n])));
        }
        let cls = classify_cliques(&inst.graph, &p, &ls).unwrap();
        for &c in &inst.meta.planted_easy {
            assert!(!cls.is_hard(c));
        }
    }

    #[test]
    fn isolated_k_delta_is_easy_and_colored() {
        // K_6 next to a precolored star that lifts Delta to 6
        let mut edges = clique_edges(0, 6);
        edges.extend((7..13).map(|v| (6, v)));
        let g = Graph::from_edges(13, edges).unwrap();
        let p = AcdPartition::from_cliques(13, vec![(0..6).collect()], Eta::default());
        let ls = enumerate_loopholes(&g, &p).unwrap();
        assert_eq!(ls.len(), 6);
        assert!(ls.iter().all(|l| l.kind == LoopholeKind::LowDegreeVertex));
        let cls = classify_cliques(&g, &p, &ls).unwrap();
        assert_eq!(cls.classes, vec![CliqueClass::Easy]);
        let mut c = Coloring::empty(13, 6);
        c.set(6, 0);
        (7..13).for_each(|v| c.set(v, 1));
        let mut trace = RoundTrace::default();
        let out = color_easy_and_loopholes(&g, &ls, &mut c, &mut trace, 10_000).unwrap().unwrap();
        assert!(verify_coloring(&g, &c, true).passed());
        let lg = &out.loophole_graph;
        assert_eq!(lg.voted.len(), 6);
        assert_eq!(lg.ruling, vec![0]);
        assert!(is_ruling_set(&lg.graph, &lg.ruling, RULING_RADIUS));
        assert!(trace.phase("easy/layers").is_some());
        assert!(trace.is_consistent());
    }

    #[test]
    fn hard_properties_are_checked() {
        // 3 sees both 0 and 1; vertex 2 is short of Delta, checked without loopholes
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (1, 2), (3, 0), (3, 1)]).unwrap();
        let p = AcdPartition::from_cliques(4, vec![vec![0, 1, 2]], Eta::default());
        match classify_cliques(&g, &p, &[]) {
            Err(Error::HardCliqueProperty { property, witness, .. }) => {
                assert_eq!(property, 2);
                assert_eq!(witness, vec![2]);
            }
            other => panic!("{other:?}"),
        }
        let ls = enumerate_loopholes(&g, &p).unwrap();
        assert!(ls.iter().any(|l| l.vertex_set() == vec![0, 1, 2, 3]));
    }

    #[test]
    fn deg_list_examples() {
        let g = Graph::from_edges(5, (0..5).map(|i| (i, (i + 1) % 5))).unwrap();
        assert_eq!(deg_list_color(&g, &[2], &[vec![5]]).unwrap(), vec![5]);
        let c4 = Graph::from_edges(4, (0..4).map(|i| (i, (i + 1) % 4))).unwrap();
        let c = deg_list_color(&c4, &[0, 1, 2, 3], &vec![vec![0, 1]; 4]).unwrap();
        assert!((0..4).all(|i| c[i] != c[(i + 1) % 4]));
        assert!(matches!(
            deg_list_color(&g, &[0, 1, 2, 3, 4], &vec![vec![0, 1]; 5]),
            Err(Error::DegListFailure { .. })
        ));
    }

    #[test]
    fn nothing_to_color_is_a_no_op() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let mut c = Coloring::empty(2, 1);
        c.set(0, 0);
        c.set(1, 0);
        let before = c.clone();
        let mut trace = RoundTrace::default();
        assert!(color_easy_and_loopholes(&g, &[], &mut c, &mut trace, 10).unwrap().is_none());
        assert_eq!(c, before);
        assert!(trace.phases.is_empty());
    }

    #[test]
    fn uncovered_vertex_is_reported() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let mut c = Coloring::empty(3, 2);
        let mut trace = RoundTrace::default();
        assert!(matches!(
            color_easy_and_loopholes(&g, &[], &mut c, &mut trace, 100),
            Err(Error::Uncovered { vertex: 0, .. })
        ));
    }

    #[test]
    fn budget_is_enforced() {
        let spec = GenSpec {
            easy_double: 1,
            ..GenSpec::hard(128, 63, 0)
        };
        let inst = gen_mixed_dense(&spec).unwrap();
        let p = compute_acd(&inst.graph, Eta::default());
        assert!(matches!(
            enumerate_loopholes_with_budget(&inst.graph, &p, 1000),
            Err(Error::LoopholeBudget { .. })
        ));
    }
}
