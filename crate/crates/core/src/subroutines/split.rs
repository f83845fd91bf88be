//! Undirected degree splitting by Eulerian circuits.
//!
//! One level: join a virtual vertex to every odd-degree vertex, walk an
//! Eulerian circuit of each component (from the virtual vertex when the
//! component has one, else from its smallest vertex; smallest neighbour
//! first), and alternate edges between the two halves. A vertex's two half
//! degrees then differ by at most 2 (1 if its degree is odd, 2 only for a
//! start vertex on an odd circuit). Repeating on each half `i` times gives
//! `2^i` parts, each within `d / 2^i +- a` with `a = 2 sum_{j<i} 2^-j`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Multigraph without self-loops; parallel edges allowed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Multigraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Multigraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Self {
        for &(u, v) in &edges {
            assert!(u < n && v < n && u != v, "edge ({u}, {v}) invalid for n = {n}");
        }
        Multigraph { n, edges }
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(u, v) in &self.edges {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitAssignment {
    pub parts: usize,
    /// Part index of each edge.
    pub part_of: Vec<usize>,
    /// `ledger[v][p]`: edges of part `p` at vertex `v`.
    pub ledger: Vec<Vec<usize>>,
}

impl SplitAssignment {
    fn build(g: &Multigraph, parts: usize, part_of: Vec<usize>) -> Self {
        let mut ledger = vec![vec![0; parts]; g.n];
        for (e, &(u, v)) in g.edges.iter().enumerate() {
            ledger[u][part_of[e]] += 1;
            ledger[v][part_of[e]] += 1;
        }
        SplitAssignment { parts, part_of, ledger }
    }

    /// Checks every part degree against `d / 2^i +- a`, comparing
    /// `|part 2^i - d| <= 4 (2^i - 1)` in integers.
    pub fn check_window(&self, degrees: &[usize]) -> Result<()> {
        let parts = self.parts as i64;
        let slack = 4 * (parts - 1);
        for (v, row) in self.ledger.iter().enumerate() {
            let d = degrees[v] as i64;
            for &p in row {
                if (p as i64 * parts - d).abs() > slack {
                    let a = slack as f64 / parts as f64;
                    return Err(Error::SplitWindow {
                        vertex: v,
                        part_degree: p,
                        low: d as f64 / parts as f64 - a,
                        high: d as f64 / parts as f64 + a,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Splits `edge_ids` of `g` into two halves along Eulerian circuits.
fn split_once(g: &Multigraph, edge_ids: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let virt = g.n;
    // (neighbour, local edge index); local indices >= edge_ids.len() are virtual
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); g.n + 1];
    for (i, &e) in edge_ids.iter().enumerate() {
        let (u, v) = g.edges[e];
        adj[u].push((v, i));
        adj[v].push((u, i));
    }
    let mut total = edge_ids.len();
    for v in 0..g.n {
        if adj[v].len() % 2 == 1 {
            adj[v].push((virt, total));
            adj[virt].push((v, total));
            total += 1;
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let mut used = vec![false; total];
    let mut ptr = vec![0; g.n + 1];
    let (mut a, mut b) = (Vec::new(), Vec::new());
    let starts = std::iter::once(virt).chain(0..g.n);
    for start in starts {
        if adj[start].iter().all(|&(_, e)| used[e]) {
            continue;
        }
        // iterative Hierholzer; edges come out in reverse circuit order
        let mut circuit = Vec::new();
        let mut stack: Vec<(usize, Option<usize>)> = vec![(start, None)];
        while let Some(&(v, via)) = stack.last() {
            while ptr[v] < adj[v].len() && used[adj[v][ptr[v]].1] {
                ptr[v] += 1;
            }
            if let Some(&(w, e)) = adj[v].get(ptr[v]) {
                used[e] = true;
                stack.push((w, Some(e)));
            } else {
                stack.pop();
                circuit.extend(via);
            }
        }
        for (pos, &e) in circuit.iter().enumerate() {
            if e < edge_ids.len() {
                if pos % 2 == 0 {
                    a.push(edge_ids[e]);
                } else {
                    b.push(edge_ids[e]);
                }
            }
        }
    }
    (a, b)
}

/// Splits the edges of `g` into `2^levels` parts.
pub fn degree_split(g: &Multigraph, levels: u32) -> Result<SplitAssignment> {
    assert!(levels >= 1, "at least one level");
    let mut groups: Vec<Vec<usize>> = vec![(0..g.edges.len()).collect()];
    for _ in 0..levels {
        let mut next = Vec::with_capacity(groups.len() * 2);
        for grp in &groups {
            let (a, b) = split_once(g, grp);
            let mut da = vec![0i64; g.n];
            for &e in &a {
                da[g.edges[e].0] += 1;
                da[g.edges[e].1] += 1;
            }
            for &e in &b {
                da[g.edges[e].0] -= 1;
                da[g.edges[e].1] -= 1;
            }
            if let Some(v) = (0..g.n).find(|&v| da[v].abs() > 2) {
                return Err(Error::invariant(format!(
                    "split level left vertex {v} with half-degree difference {}",
                    da[v]
                )));
            }
            next.push(a);
            next.push(b);
        }
        groups = next;
    }
    let mut part_of = vec![0; g.edges.len()];
    for (p, grp) in groups.iter().enumerate() {
        for &e in grp {
            part_of[e] = p;
        }
    }
    let split = SplitAssignment::build(g, groups.len(), part_of);
    split.check_window(&g.degrees())?;
    Ok(split)
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitClaimReport {
    pub checked: usize,
    pub violations: Vec<(u32, f64)>,
    /// Smallest and largest `rhs - lhs` over the grid.
    pub min_slack: f64,
    pub max_slack: f64,
}

impl SplitClaimReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Evaluates `(1/2 + eps)^n <= 2^-n + 2 eps` over the grid.
pub fn check_split_claim(ns: impl IntoIterator<Item = u32>, epsilons: &[f64]) -> SplitClaimReport {
    let mut report = SplitClaimReport {
        checked: 0,
        violations: Vec::new(),
        min_slack: f64::INFINITY,
        max_slack: f64::NEG_INFINITY,
    };
    for n in ns {
        for &eps in epsilons {
            assert!((0.0..=0.5).contains(&eps) && n >= 1);
            let lhs = (0.5 + eps).powi(n as i32);
            let rhs = 0.5f64.powi(n as i32) + 2.0 * eps;
            let slack = rhs - lhs;
            report.checked += 1;
            report.min_slack = report.min_slack.min(slack);
            report.max_slack = report.max_slack.max(slack);
            if lhs > rhs {
                report.violations.push((n, eps));
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c4_splits_evenly() {
        let g = Multigraph::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)]);
        let s = degree_split(&g, 1).unwrap();
        assert!(s.ledger.iter().all(|row| row == &vec![1, 1]));
    }

    #[test]
    fn star_center_gets_four_five() {
        let g = Multigraph::new(10, (1..10).map(|i| (0, i)).collect());
        let s = degree_split(&g, 1).unwrap();
        let mut c = s.ledger[0].clone();
        c.sort_unstable();
        assert_eq!(c, vec![4, 5]);
    }

    #[test]
    fn regular_multigraph_two_levels() {
        // 28 parallel copies of a perfect matching plus a 28-regular circulant
        let n = 30;
        let mut edges = Vec::new();
        for v in 0..n {
            for s in 1..=14 {
                edges.push((v, (v + s) % n));
            }
        }
        let g = Multigraph::new(n, edges);
        assert!(g.degrees().iter().all(|&d| d == 28));
        let s = degree_split(&g, 2).unwrap();
        assert!(s.ledger.iter().flatten().all(|&p| (4..=10).contains(&p)));
        let mut m = vec![(0, 1); 28];
        m.extend(vec![(2, 3); 28]);
        let s = degree_split(&Multigraph::new(4, m), 2).unwrap();
        assert!(s.ledger.iter().flatten().all(|&p| (4..=10).contains(&p)));
    }

    #[test]
    fn window_check_catches_skew() {
        let g = Multigraph::new(2, vec![(0, 1); 8]);
        let skewed = SplitAssignment::build(&g, 4, vec![0; 8]);
        assert!(matches!(skewed.check_window(&g.degrees()), Err(Error::SplitWindow { .. })));
    }

    #[test]
    fn claim_boundaries() {
        let r = check_split_claim([1], &[0.5]);
        assert!(r.passed());
        assert_eq!(r.min_slack, 0.5);
        let eps: Vec<f64> = (0..=50).map(|k| k as f64 / 100.0).collect();
        let r = check_split_claim(1..=20, &eps);
        assert!(r.passed());
        assert_eq!(r.checked, 20 * 51);
        let r = check_split_claim(1..=20, &[0.0]);
        assert_eq!((r.min_slack, r.max_slack), (0.0, 0.0));
    }
}
