//! End-to-end run: reject out-of-scope input, color the hard cliques, then
//! the easy cliques and loopholes, and verify the result.

use serde_json::{json, Value};

use crate::acd::{compute_acd, verify_acd, Eta};
use crate::error::{Error, Result};
use crate::graph::{detect_k_delta_plus_one, verify_coloring, Coloring, Graph, Vertex};
use crate::loophole::{classify_cliques, color_easy_and_loopholes, enumerate_loopholes_with_budget, LOOPHOLE_BUDGET};
use crate::matching::run_phase1;
use crate::sim::RoundTrace;
use crate::subroutines::ruling::is_ruling_set;
use crate::triads::run_phases_2_to_4;

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub eta: Eta,
    /// Extra checks between phases: partial properness, ruling-set radius.
    pub debug_checks: bool,
    pub round_cap: usize,
    pub loophole_budget: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            eta: Eta::default(),
            debug_checks: false,
            round_cap: 1_000_000,
            loophole_budget: LOOPHOLE_BUDGET,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub coloring: Coloring,
    pub trace: RoundTrace,
    /// Partition, loopholes, classification, F1, F2, F3, triads and the
    /// special vertices, for audit.
    pub artifacts: Value,
}

fn check_partial(g: &Graph, c: &Coloring, after: &str) -> Result<()> {
    let report = verify_coloring(g, c, false);
    if report.passed() {
        Ok(())
    } else {
        Err(Error::invariant(format!("coloring improper after {after}: {:?}", report.monochromatic.first())))
    }
}

pub fn run_pipeline(g: &Graph, config: &PipelineConfig) -> Result<PipelineOutput> {
    if let Some(clique) = detect_k_delta_plus_one(g) {
        return Err(Error::KDeltaPlusOne { clique });
    }
    let p = compute_acd(g, config.eta);
    let acd = verify_acd(g, &p);
    if !acd.passed() || !p.is_dense() {
        return Err(Error::NotDense {
            sparse: p.sparse.clone(),
            violations: acd.violations.iter().map(|v| format!("{v:?}")).collect(),
        });
    }
    let mut trace = RoundTrace::default();
    trace.centralized("acd");
    let loopholes = enumerate_loopholes_with_budget(g, &p, config.loophole_budget)?;
    trace.centralized("loopholes");
    let cls = classify_cliques(g, &p, &loopholes)?;

    let mut coloring = Coloring::empty(g.n(), g.delta());
    let mut artifacts = json!({
        "partition": p,
        "loopholes": loopholes,
        "classification": cls,
    });

    let any_heg = (0..p.cliques.len()).any(|c| cls.in_heg(c));
    if any_heg {
        let ph1 = run_phase1(g, &p, &cls, &mut trace, config.round_cap)?;
        let hard = run_phases_2_to_4(g, &p, &cls, &ph1.f2, &mut coloring, &mut trace, config.round_cap)?;
        let special: Vec<Vertex> = hard.triads.iter().map(|t| t.u).chain(hard.anchors.iter().map(|a| a.1)).collect();
        artifacts["f1"] = json!(ph1.f1);
        artifacts["f2"] = json!(ph1.f2);
        artifacts["f3"] = json!(hard.sparsified.f3);
        artifacts["hypergraph"] = json!({
            "subcliques": ph1.hypergraph.subcliques.len(),
            "delta_h": ph1.hypergraph.delta_h,
            "rank_h": ph1.hypergraph.rank_h,
            "margin_holds": ph1.hypergraph.margin_holds,
        });
        artifacts["triads"] = json!(hard.triads);
        artifacts["special"] = json!(special);
    } else if !cls.hard_cliques().is_empty() {
        // only Type II cliques: nothing to match, anchors give the slack
        let anchors = crate::triads::color_remaining_hard(g, &p, &cls, &[], &mut coloring, &mut trace, config.round_cap)?;
        artifacts["special"] = json!(anchors.iter().map(|a| a.1).collect::<Vec<_>>());
    }
    if let Some(v) = (0..g.n()).find(|&v| coloring.is_colored(v) && !cls.is_hard(p.clique_of(v).expect("dense"))) {
        return Err(Error::invariant(format!("easy vertex {v} colored during the hard phases")));
    }
    if config.debug_checks {
        check_partial(g, &coloring, "hard phases")?;
    }

    if let Some(easy) = color_easy_and_loopholes(g, &loopholes, &mut coloring, &mut trace, config.round_cap)? {
        let lg = &easy.loophole_graph;
        if config.debug_checks && !is_ruling_set(&lg.graph, &lg.ruling, crate::loophole::RULING_RADIUS) {
            return Err(Error::invariant("loophole ruling set fails its radius"));
        }
        artifacts["easy"] = json!({
            "voted": lg.voted,
            "ruling": lg.ruling.iter().map(|&i| lg.voted[i]).collect::<Vec<_>>(),
            "bfs_depth": easy.depth,
        });
    }

    let report = verify_coloring(g, &coloring, true);
    if !report.passed() {
        return Err(Error::invariant(format!(
            "final coloring fails: {} conflicts, {} uncolored, {} out of range",
            report.monochromatic.len(),
            report.uncolored.len(),
            report.out_of_range.len()
        )));
    }
    if !trace.is_consistent() {
        return Err(Error::invariant("trace total disagrees with its phases"));
    }
    Ok(PipelineOutput {
        coloring,
        trace,
        artifacts,
    })
}

/// Process exit code for a pipeline error: 2 for rejected input, 3 for an
/// internal assertion.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_internal() {
        3
    } else {
        2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{gen_hard_dense, gen_mixed_dense, GenSpec};

    fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).unwrap()
    }

    #[test]
    fn rejects_k_delta_plus_one() {
        let err = run_pipeline(&complete(5), &PipelineConfig::default()).unwrap_err();
        assert!(matches!(err, Error::KDeltaPlusOne { ref clique } if clique.len() == 5));
        assert_eq!(exit_code(&err), 2);
    }

    #[test]
    fn rejects_sparse_input() {
        let g = Graph::from_edges(6, (0..6).map(|i| (i, (i + 1) % 6))).unwrap();
        assert!(matches!(run_pipeline(&g, &PipelineConfig::default()), Err(Error::NotDense { .. })));
    }

    #[test]
    fn ring128_colors_without_easy_phase() {
        let inst = gen_hard_dense(128, 63, 0).unwrap();
        let cfg = PipelineConfig {
            debug_checks: true,
            ..Default::default()
        };
        let out = run_pipeline(&inst.graph, &cfg).unwrap();
        assert!(verify_coloring(&inst.graph, &out.coloring, true).passed());
        assert!(out.trace.phase("easy/bfs").is_none());
        assert_eq!(out.artifacts["triads"].as_array().unwrap().len(), 128);
    }

    #[test]
    fn one_drop_uses_easy_phase_after_hard() {
        let spec = GenSpec {
            easy_drop: 1,
            ..GenSpec::hard(128, 63, 3)
        };
        let inst = gen_mixed_dense(&spec).unwrap();
        let cfg = PipelineConfig {
            debug_checks: true,
            ..Default::default()
        };
        let out = run_pipeline(&inst.graph, &cfg).unwrap();
        assert!(verify_coloring(&inst.graph, &out.coloring, true).passed());
        let names: Vec<&str> = out.trace.phases.iter().map(|p| p.name.as_str()).collect();
        let first_easy = names.iter().position(|n| n.starts_with("easy/")).unwrap();
        assert!(names[first_easy..].iter().all(|n| n.starts_with("easy/")));
    }
}
