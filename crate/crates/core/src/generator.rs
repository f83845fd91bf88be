//! Dense instances with planted cliques.
//!
//! Hard instances are `k` disjoint copies of `K_Delta` glued along a
//! `Delta`-regular bipartite super-graph, one real edge per super-edge, so
//! every vertex has exactly one external neighbour. A triangle-free
//! `Delta`-regular super-graph needs `k >= 2 Delta` (adjacent super-nodes
//! have disjoint neighbourhoods), which the generator enforces.
//!
//! PRNG stream (ChaCha8, seeded once, stream 0): left-side permutation,
//! right-side permutation, the shift set, then one port permutation per
//! clique in clique order. Mixed instances continue on stream 1.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

pub const MIN_DELTA: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    pub k: usize,
    pub delta: usize,
    pub seed: u64,
    /// External edges deleted, each leaving two degree-deficient vertices.
    pub easy_drop: usize,
    /// Degree-preserving swaps that put a second edge between a clique pair.
    pub easy_double: usize,
}

impl GenSpec {
    pub fn hard(k: usize, delta: usize, seed: u64) -> Self {
        GenSpec {
            k,
            delta,
            seed,
            easy_drop: 0,
            easy_double: 0,
        }
    }
}

/// Ground truth shipped next to a generated graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenMeta {
    pub cliques: Vec<Vec<Vertex>>,
    pub planted_easy: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: Graph,
    pub meta: GenMeta,
}

/// Whether `gen_hard_dense(k, delta, _)` can succeed.
pub fn is_feasible(k: usize, delta: usize) -> bool {
    delta >= MIN_DELTA && k % 2 == 0 && k >= 2 * delta
}

struct Planted {
    k: usize,
    delta: usize,
    /// The single external neighbour of each vertex, if any.
    external: Vec<Option<Vertex>>,
}

impl Planted {
    fn clique(&self, v: Vertex) -> usize {
        v / self.delta
    }

    fn pair_key(&self, u: Vertex, v: Vertex) -> (usize, usize) {
        let (a, b) = (self.clique(u), self.clique(v));
        (a.min(b), a.max(b))
    }

    fn super_counts(&self) -> BTreeMap<(usize, usize), usize> {
        let mut counts = BTreeMap::new();
        for (u, &x) in self.external.iter().enumerate() {
            if let Some(v) = x {
                if u < v {
                    *counts.entry(self.pair_key(u, v)).or_insert(0) += 1;
                }
            }
        }
        counts
    }

    fn into_instance(self, planted_easy: BTreeSet<usize>) -> Instance {
        let (k, d) = (self.k, self.delta);
        let mut edges = Vec::with_capacity(k * d * (d - 1) / 2 + k * d / 2);
        for c in 0..k {
            let base = c * d;
            for i in 0..d {
                for j in i + 1..d {
                    edges.push((base + i, base + j));
                }
            }
        }
        for (u, &x) in self.external.iter().enumerate() {
            if let Some(v) = x {
                if u < v {
                    edges.push((u, v));
                }
            }
        }
        let graph = Graph::from_edges(k * d, edges).expect("planted construction is simple");
        Instance {
            graph,
            meta: GenMeta {
                cliques: (0..k).map(|c| (c * d..(c + 1) * d).collect()).collect(),
                planted_easy: planted_easy.into_iter().collect(),
            },
        }
    }
}

fn plant_hard(k: usize, delta: usize, seed: u64) -> Result<Planted> {
    if !is_feasible(k, delta) {
        return Err(Error::Infeasible {
            message: format!(
                "hard instance needs delta >= {MIN_DELTA}, k even and k >= 2*delta (got k = {k}, delta = {delta})"
            ),
        });
    }
    let h = k / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tau: Vec<usize> = (0..h).collect();
    tau.shuffle(&mut rng);
    let mut sigma: Vec<usize> = (0..h).collect();
    sigma.shuffle(&mut rng);
    let mut shifts: Vec<usize> = (0..h).collect();
    shifts.shuffle(&mut rng);
    shifts.truncate(delta);
    shifts.sort_unstable();

    // Union of `delta` disjoint perfect matchings, each a shifted copy of
    // one base permutation: simple and delta-regular by construction.
    let mut super_adj = vec![Vec::with_capacity(delta); k];
    for i in 0..h {
        for &s in &shifts {
            let j = h + sigma[(tau[i] + s) % h];
            super_adj[i].push(j);
            super_adj[j].push(i);
        }
    }
    let mut port = vec![BTreeMap::new(); k];
    for (c, nbrs) in super_adj.iter_mut().enumerate() {
        nbrs.sort_unstable();
        let mut slots: Vec<usize> = (0..delta).collect();
        slots.shuffle(&mut rng);
        for (&other, &slot) in nbrs.iter().zip(&slots) {
            port[c].insert(other, c * delta + slot);
        }
    }
    let mut external = vec![None; k * delta];
    for c in 0..k {
        for (&other, &v) in &port[c] {
            external[v] = Some(port[other][&c]);
        }
    }
    Ok(Planted { k, delta, external })
}

/// All-hard dense instance: every clique is hard and lies in `C_HEG`.
pub fn gen_hard_dense(k: usize, delta: usize, seed: u64) -> Result<Instance> {
    Ok(plant_hard(k, delta, seed)?.into_instance(BTreeSet::new()))
}

/// Hard instance plus planted loopholes. Swaps run first, then deletions
/// among external edges neither step has touched.
pub fn gen_mixed_dense(spec: &GenSpec) -> Result<Instance> {
    let mut p = plant_hard(spec.k, spec.delta, spec.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(1);
    let n = p.external.len();
    let mut touched = vec![false; n];
    let mut easy = BTreeSet::new();
    let attempts = 64 * n;

    if spec.easy_double > 0 && spec.k == 2 * spec.delta {
        // the super-graph is complete bipartite: a swap has no free pair to use
        return Err(Error::Infeasible {
            message: format!("double clique pairs need k > 2*delta (got k = {}, delta = {})", spec.k, spec.delta),
        });
    }
    let mut counts = p.super_counts();
    let mut placed = 0;
    let mut tries = 0;
    while placed < spec.easy_double {
        tries += 1;
        if tries > attempts {
            return Err(Error::Infeasible {
                message: format!("could only plant {placed} of {} double clique pairs", spec.easy_double),
            });
        }
        let a0 = rng.gen_range(0..n);
        let Some(b0) = p.external[a0].filter(|_| !touched[a0]) else { continue };
        if touched[b0] || counts[&p.pair_key(a0, b0)] != 1 {
            continue;
        }
        let (ca, cb) = (p.clique(a0), p.clique(b0));
        let a1 = ca * spec.delta + rng.gen_range(0..spec.delta);
        let Some(x) = p.external[a1].filter(|_| a1 != a0 && !touched[a1]) else { continue };
        if touched[x] || p.clique(x) == cb {
            continue;
        }
        let cx = p.clique(x);
        let mut candidates: Vec<Vertex> = (cb * spec.delta..(cb + 1) * spec.delta).collect();
        candidates.shuffle(&mut rng);
        let found = candidates.into_iter().find_map(|b1| {
            let y = p.external[b1]?;
            let cy = p.clique(y);
            let free = b1 != b0 && !touched[b1] && !touched[y] && cy != ca;
            let key = (cx.min(cy), cx.max(cy));
            (free && !counts.contains_key(&key)).then_some((b1, y))
        });
        let Some((b1, y)) = found else { continue };
        for (u, v, add) in [(a1, x, false), (b1, y, false), (a1, b1, true), (x, y, true)] {
            let key = p.pair_key(u, v);
            if add {
                *counts.entry(key).or_insert(0) += 1;
            } else if counts[&key] == 1 {
                counts.remove(&key);
            } else {
                *counts.get_mut(&key).expect("counted") -= 1;
            }
        }
        p.external[a1] = Some(b1);
        p.external[b1] = Some(a1);
        p.external[x] = Some(y);
        p.external[y] = Some(x);
        for v in [a0, b0, a1, b1, x, y] {
            touched[v] = true;
        }
        easy.insert(ca);
        easy.insert(cb);
        placed += 1;
    }

    let mut free: Vec<Vertex> = (0..n)
        .filter(|&u| matches!(p.external[u], Some(v) if u < v && !touched[u] && !touched[v]))
        .collect();
    if free.len() < spec.easy_drop {
        return Err(Error::Infeasible {
            message: format!("only {} untouched external edges for {} deletions", free.len(), spec.easy_drop),
        });
    }
    free.shuffle(&mut rng);
    for &u in &free[..spec.easy_drop] {
        let v = p.external[u].take().expect("free edge");
        p.external[v] = None;
        easy.insert(p.clique(u));
        easy.insert(p.clique(v));
    }
    Ok(p.into_instance(easy))
}
