//! Almost-clique decomposition with epsilon = 1/63.
//!
//! All density thresholds are compared in integers: with epsilon = 1/63 the
//! size window is `251 Delta <= 252 |C|` and `63 |C| <= 64 Delta`, members
//! need `63 in >= 62 Delta`, non-members `126 in <= 125 Delta`, and the
//! outside-neighbour observation is `63 out <= Delta`.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::graph::{Graph, Vertex};
use crate::par;

pub const EPSILON_DEN: usize = 63;

/// Friend parameter eta as a fraction `num / den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Eta {
    pub num: usize,
    pub den: usize,
}

impl Default for Eta {
    fn default() -> Self {
        Eta { num: 1, den: 20 }
    }
}

impl Eta {
    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `x >= (1 - eta) Delta`
    fn at_least(self, x: usize, delta: usize) -> bool {
        x * self.den >= (self.den - self.num) * delta
    }
}

impl Serialize for Eta {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.as_f64())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AcdPartition {
    pub cliques: Vec<Vec<Vertex>>,
    pub sparse: Vec<Vertex>,
    pub eta: Eta,
    pub epsilon: f64,
    #[serde(skip)]
    clique_of: Vec<Option<usize>>,
}

impl AcdPartition {
    /// Partition with the given cliques (each sorted on entry); everything
    /// else is sparse. Cliques are ordered by minimum vertex.
    pub fn from_cliques(n: usize, cliques: Vec<Vec<Vertex>>, eta: Eta) -> Self {
        let mut cliques: Vec<Vec<Vertex>> = cliques
            .into_iter()
            .filter(|c| !c.is_empty())
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        cliques.sort();
        let mut clique_of = vec![None; n];
        for (i, c) in cliques.iter().enumerate() {
            for &v in c {
                clique_of[v] = Some(i);
            }
        }
        let sparse = (0..n).filter(|&v| clique_of[v].is_none()).collect();
        AcdPartition {
            cliques,
            sparse,
            eta,
            epsilon: 1.0 / EPSILON_DEN as f64,
            clique_of,
        }
    }

    pub fn clique_of(&self, v: Vertex) -> Option<usize> {
        self.clique_of[v]
    }

    pub fn is_dense(&self) -> bool {
        self.sparse.is_empty()
    }

    /// `e_C = Delta - |C| + 1`
    pub fn e_c(&self, g: &Graph, c: usize) -> i64 {
        g.delta() as i64 - self.cliques[c].len() as i64 + 1
    }

    /// Number of edges leaving clique `c`.
    pub fn external_degree(&self, g: &Graph, c: usize) -> usize {
        self.cliques[c]
            .iter()
            .map(|&v| g.neighbors(v).iter().filter(|&&w| self.clique_of[w] != Some(c)).count())
            .sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("partition serializes")
    }
}

fn common_neighbors(a: &[Vertex], b: &[Vertex]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Friend edges, dense vertices, friend components among dense vertices;
/// components violating (i)-(iii) are demoted to sparse.
pub fn compute_acd(g: &Graph, eta: Eta) -> AcdPartition {
    let delta = g.delta();
    let friends: Vec<Vec<Vertex>> = par::map_range(g.n(), |v| {
        g.neighbors(v)
            .iter()
            .copied()
            .filter(|&u| eta.at_least(common_neighbors(g.neighbors(v), g.neighbors(u)), delta))
            .collect()
    });
    let dense: Vec<bool> = friends.iter().map(|f| eta.at_least(f.len(), delta) && !f.is_empty()).collect();

    let mut comp = vec![usize::MAX; g.n()];
    let mut components = Vec::new();
    for s in 0..g.n() {
        if !dense[s] || comp[s] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut members = vec![s];
        comp[s] = id;
        let mut head = 0;
        while head < members.len() {
            let v = members[head];
            head += 1;
            for &u in &friends[v] {
                if dense[u] && comp[u] == usize::MAX {
                    comp[u] = id;
                    members.push(u);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }

    let provisional = AcdPartition::from_cliques(g.n(), components, eta);
    let report = verify_acd(g, &provisional);
    let bad: std::collections::BTreeSet<usize> = report
        .violations
        .iter()
        .filter(|v| !matches!(v, AcdViolation::OutsideNeighbors { .. }))
        .filter_map(AcdViolation::clique)
        .collect();
    let kept = provisional
        .cliques
        .into_iter()
        .enumerate()
        .filter(|(i, _)| !bad.contains(i))
        .map(|(_, c)| c)
        .collect();
    AcdPartition::from_cliques(g.n(), kept, eta)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "property", rename_all = "snake_case")]
pub enum AcdViolation {
    /// (i) `(1 - eps/4) Delta <= |C| <= (1 + eps) Delta`
    SizeWindow { clique: usize, size: usize },
    /// (ii) member with fewer than `(1 - eps) Delta` neighbours inside
    InternalDegree { clique: usize, vertex: Vertex, inside: usize },
    /// (iii) non-member with more than `(1 - eps/2) Delta` neighbours inside
    ExternalCrowding { clique: usize, vertex: Vertex, inside: usize },
    /// member with more than `eps Delta` neighbours outside
    OutsideNeighbors { clique: usize, vertex: Vertex, outside: usize },
    /// vertex in two cliques, or in a clique and the sparse set
    NotPartition { vertex: Vertex },
}

impl AcdViolation {
    pub fn clique(&self) -> Option<usize> {
        match *self {
            AcdViolation::SizeWindow { clique, .. }
            | AcdViolation::InternalDegree { clique, .. }
            | AcdViolation::ExternalCrowding { clique, .. }
            | AcdViolation::OutsideNeighbors { clique, .. } => Some(clique),
            AcdViolation::NotPartition { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct AcdReport {
    pub violations: Vec<AcdViolation>,
    pub is_dense: bool,
}

impl AcdReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn verify_acd(g: &Graph, p: &AcdPartition) -> AcdReport {
    let delta = g.delta();
    let e = EPSILON_DEN;
    let mut violations = Vec::new();

    let mut seen = vec![0usize; g.n()];
    for &v in p.cliques.iter().flatten().chain(&p.sparse) {
        seen[v] += 1;
    }
    violations.extend((0..g.n()).filter(|&v| seen[v] != 1).map(|vertex| AcdViolation::NotPartition { vertex }));

    let per_clique = par::map_range(p.cliques.len(), |ci| {
        let c = &p.cliques[ci];
        let mut out = Vec::new();
        let size = c.len();
        if 4 * e * size < (4 * e - 1) * delta || e * size > (e + 1) * delta {
            out.push(AcdViolation::SizeWindow { clique: ci, size });
        }
        let mut outside_hits: BTreeMap<Vertex, usize> = BTreeMap::new();
        for &v in c {
            let inside = g.neighbors(v).iter().filter(|&&w| c.binary_search(&w).is_ok()).count();
            let outside = g.degree(v) - inside;
            if e * inside < (e - 1) * delta {
                out.push(AcdViolation::InternalDegree { clique: ci, vertex: v, inside });
            }
            if e * outside > delta {
                out.push(AcdViolation::OutsideNeighbors { clique: ci, vertex: v, outside });
            }
            for &w in g.neighbors(v) {
                if c.binary_search(&w).is_err() {
                    *outside_hits.entry(w).or_insert(0) += 1;
                }
            }
        }
        for (w, inside) in outside_hits {
            if 2 * e * inside > (2 * e - 1) * delta {
                out.push(AcdViolation::ExternalCrowding { clique: ci, vertex: w, inside });
            }
        }
        out
    });
    violations.extend(per_clique.into_iter().flatten());
    AcdReport {
        violations,
        is_dense: p.is_dense(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::gen_hard_dense;

    fn clique_edges(base: usize, size: usize) -> Vec<(usize, usize)> {
        (0..size)
            .flat_map(|i| (i + 1..size).map(move |j| (base + i, base + j)))
            .collect()
    }

    #[test]
    fn two_disjoint_k64() {
        let mut edges = clique_edges(0, 64);
        edges.extend(clique_edges(64, 64));
        let g = Graph::from_edges(128, edges).unwrap();
        let p = compute_acd(&g, Eta::default());
        assert_eq!(p.cliques.len(), 2);
        assert!(p.cliques.iter().all(|c| c.len() == 64));
        assert!(p.is_dense());
        assert!(verify_acd(&g, &p).passed());
    }

    #[test]
    fn ring128_recovers_planted_cliques() {
        let inst = gen_hard_dense(128, 63, 0).unwrap();
        let p = compute_acd(&inst.graph, Eta::default());
        assert!(p.is_dense());
        assert_eq!(p.cliques, inst.meta.cliques);
        assert!(verify_acd(&inst.graph, &p).passed());
        assert_eq!(p.e_c(&inst.graph, 0), 1);
        assert_eq!(p.external_degree(&inst.graph, 0), 63);
    }

    #[test]
    fn star_is_sparse() {
        let g = Graph::from_edges(6, (1..6).map(|i| (0, i))).unwrap();
        let p = compute_acd(&g, Eta::default());
        assert!(p.cliques.is_empty());
        assert_eq!(p.sparse.len(), 6);
        let r = verify_acd(&g, &p);
        assert!(r.passed());
        assert!(!r.is_dense);
    }

    #[test]
    fn half_clique_fails_internal_degree() {
        let inst = gen_hard_dense(128, 63, 0).unwrap();
        let mut cliques = inst.meta.cliques.clone();
        let first = cliques.remove(0);
        cliques.push(first[..31].to_vec());
        cliques.push(first[31..].to_vec());
        let p = AcdPartition::from_cliques(inst.graph.n(), cliques, Eta::default());
        let r = verify_acd(&inst.graph, &p);
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, AcdViolation::InternalDegree { .. })));
    }

    #[test]
    fn json_shape() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let p = AcdPartition::from_cliques(3, vec![vec![1, 0]], Eta::default());
        let v: serde_json::Value = serde_json::from_str(&p.to_json()).unwrap();
        assert_eq!(v["cliques"], serde_json::json!([[0, 1]]));
        assert_eq!(v["sparse"], serde_json::json!([2]));
        assert_eq!(v["eta"], serde_json::json!(0.05));
        assert!((v["epsilon"].as_f64().unwrap() - 1.0 / 63.0).abs() < 1e-15);
        assert_eq!(g.m(), 1);
    }
}
