//! Exhaustive oracles for small instances. Each search counts its steps and
//! gives up with `BudgetExceeded` instead of running unbounded.

use crate::acd::AcdPartition;
use crate::error::{Error, Result};
use crate::graph::{Color, Graph, Vertex};

pub const MAX_DELTA_COLOR_N: usize = 22;
pub const MAX_SDR_EDGES: usize = 12;
pub const MAX_DEG_LIST_N: usize = 8;
pub const MAX_LOOPHOLE_SCAN_N: usize = 16;

fn list_search(g: &Graph, lists: &[Vec<Color>], budget: u64) -> Result<Option<Vec<Color>>> {
    // most constrained first: higher degree, then smaller list
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), lists[v].len(), v));
    let mut colors: Vec<Option<Color>> = vec![None; g.n()];
    let mut work = 0u64;

    fn go(
        i: usize,
        order: &[usize],
        g: &Graph,
        lists: &[Vec<Color>],
        colors: &mut Vec<Option<Color>>,
        work: &mut u64,
        budget: u64,
    ) -> Result<bool> {
        if i == order.len() {
            return Ok(true);
        }
        let v = order[i];
        for &c in &lists[v] {
            *work += 1;
            if *work > budget {
                return Err(Error::BudgetExceeded);
            }
            if g.neighbors(v).iter().any(|&w| colors[w] == Some(c)) {
                continue;
            }
            colors[v] = Some(c);
            if go(i + 1, order, g, lists, colors, work, budget)? {
                return Ok(true);
            }
        }
        colors[v] = None;
        Ok(false)
    }

    if go(0, &order, g, lists, &mut colors, &mut work, budget)? {
        Ok(Some(colors.into_iter().map(|c| c.expect("all assigned")).collect()))
    } else {
        Ok(None)
    }
}

/// A proper coloring of `g` with `Delta` colors, if one exists.
pub fn brute_delta_color(g: &Graph, budget: u64) -> Result<Option<Vec<Color>>> {
    assert!(g.n() <= MAX_DELTA_COLOR_N, "oracle limited to n <= {MAX_DELTA_COLOR_N}");
    let lists = vec![(0..g.delta() as Color).collect::<Vec<_>>(); g.n()];
    list_search(g, &lists, budget)
}

/// A proper coloring of `g` from `lists`, if one exists.
pub fn brute_deg_list(g: &Graph, lists: &[Vec<Color>], budget: u64) -> Result<Option<Vec<Color>>> {
    assert!(g.n() <= MAX_DEG_LIST_N, "oracle limited to n <= {MAX_DEG_LIST_N}");
    assert_eq!(lists.len(), g.n());
    list_search(g, lists, budget)
}

/// Distinct representatives: `out[i]` is an element of `sets[i]`, all
/// different. `None` if impossible.
pub fn brute_sdr(sets: &[Vec<usize>], budget: u64) -> Result<Option<Vec<usize>>> {
    assert!(sets.len() <= MAX_SDR_EDGES, "oracle limited to {MAX_SDR_EDGES} sets");
    let mut chosen = Vec::with_capacity(sets.len());
    let mut work = 0u64;

    fn go(sets: &[Vec<usize>], chosen: &mut Vec<usize>, work: &mut u64, budget: u64) -> Result<bool> {
        let i = chosen.len();
        if i == sets.len() {
            return Ok(true);
        }
        for &x in &sets[i] {
            *work += 1;
            if *work > budget {
                return Err(Error::BudgetExceeded);
            }
            if chosen.contains(&x) {
                continue;
            }
            chosen.push(x);
            if go(sets, chosen, work, budget)? {
                return Ok(true);
            }
            chosen.pop();
        }
        Ok(false)
    }

    Ok(go(sets, &mut chosen, &mut work, budget)?.then_some(chosen))
}

fn has_hamiltonian_cycle(g: &Graph, set: &[Vertex]) -> bool {
    fn go(g: &Graph, set: &[Vertex], path: &mut Vec<Vertex>) -> bool {
        let last = path[path.len() - 1];
        if path.len() == set.len() {
            return g.has_edge(last, path[0]);
        }
        for &v in &set[1..] {
            if !path.contains(&v) && g.has_edge(last, v) {
                path.push(v);
                if go(g, set, path) {
                    return true;
                }
                path.pop();
            }
        }
        false
    }
    go(g, set, &mut vec![set[0]])
}

/// Loophole vertex sets by scanning every subset of size 1, 4 and 6.
pub fn brute_loophole_sets(g: &Graph, p: &AcdPartition) -> Vec<Vec<Vertex>> {
    assert!(g.n() <= MAX_LOOPHOLE_SCAN_N, "oracle limited to n <= {MAX_LOOPHOLE_SCAN_N}");
    let mut out = Vec::new();
    for mask in 1u32..(1 << g.n()) {
        let set: Vec<Vertex> = (0..g.n()).filter(|&v| mask >> v & 1 == 1).collect();
        if !set.iter().any(|&v| p.clique_of(v).is_some()) {
            continue;
        }
        let hit = match set.len() {
            1 => g.degree(set[0]) < g.delta(),
            4 | 6 => {
                let clique = set.iter().enumerate().all(|(i, &u)| set[i + 1..].iter().all(|&v| g.has_edge(u, v)));
                !clique && has_hamiltonian_cycle(g, &set)
            }
            _ => false,
        };
        if hit {
            out.push(set);
        }
    }
    out.sort();
    out
}
