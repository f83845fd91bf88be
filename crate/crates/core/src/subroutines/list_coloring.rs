//! (deg+1)-list coloring as a simulated LOCAL program.
//!
//! Nodes first run Linial-style color reduction (one round per step: colors
//! are read as polynomials over a prime field and each node keeps the first
//! evaluation point where it disagrees with every neighbour). Steps are
//! applied only while they strictly shrink the color space; when `n` is
//! around `Delta^2`, as at desk scale, the schedule is usually empty. A
//! local-minimum sweep follows: a node picks the smallest free list color
//! once every neighbour with a smaller class has decided.

use crate::error::{Error, Result};
use crate::graph::{Color, Coloring, Graph, Vertex};
use crate::sim::{run_sync_labeled, LocalView, NodeProgram, Step};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionStep {
    pub q: usize,
    pub degree: usize,
}

fn is_prime(x: usize) -> bool {
    x >= 2 && (2..).take_while(|d| d * d <= x).all(|d| x % d != 0)
}

fn pow_at_least(q: usize, e: usize, m: usize) -> bool {
    let mut acc: usize = 1;
    for _ in 0..e {
        acc = acc.saturating_mul(q);
        if acc >= m {
            return true;
        }
    }
    acc >= m
}

/// Reduction schedule from `m` initial colors at maximum degree `d`.
pub fn linial_schedule(mut m: usize, d: usize) -> Vec<ReductionStep> {
    let mut steps = Vec::new();
    loop {
        let best = (1..=32)
            .map(|t| {
                let mut q = t * d + 1;
                while !(is_prime(q) && pow_at_least(q, t + 1, m)) {
                    q += 1;
                }
                ReductionStep { q, degree: t }
            })
            .min_by_key(|s| (s.q * s.q, s.degree));
        match best {
            Some(s) if s.q * s.q < m => {
                m = s.q * s.q;
                steps.push(s);
            }
            _ => return steps,
        }
    }
}

fn eval(class: usize, step: ReductionStep, x: usize) -> usize {
    let q = step.q;
    let (mut c, mut acc, mut pow) = (class, 0, 1);
    for _ in 0..=step.degree {
        acc = (acc + (c % q) * pow) % q;
        pow = pow * x % q;
        c /= q;
    }
    acc
}

/// One reduction step: smallest point `x` where `class` disagrees with all
/// neighbour classes; new class `x q + p(x)`.
pub fn reduce_class(class: usize, neighbors: &[usize], step: ReductionStep) -> usize {
    let x = (0..step.q)
        .find(|&x| {
            let mine = eval(class, step, x);
            neighbors.iter().all(|&c| eval(c, step, x) != mine)
        })
        .expect("q > t d leaves a free evaluation point");
    x * step.q + eval(class, step, x)
}

#[derive(Debug, Clone)]
enum Msg {
    Class(usize),
    Colored(Color),
}

struct ListProgram<'a> {
    lists: &'a [Vec<Color>],
    schedule: &'a [ReductionStep],
    labels: &'a [usize],
}

struct ListState {
    class: usize,
    nbr_class: Vec<usize>,
    pending_lower: usize,
    forbidden: Vec<Color>,
}

impl NodeProgram for ListProgram<'_> {
    type State = ListState;
    type Msg = Msg;
    type Output = std::result::Result<Color, Vec<Color>>;

    fn init(&self, view: LocalView<'_>) -> ListState {
        ListState {
            class: view.id,
            nbr_class: vec![0; view.neighbors.len()],
            pending_lower: 0,
            forbidden: Vec::new(),
        }
    }

    fn step(&self, round: usize, view: LocalView<'_>, s: &mut ListState, inbox: &[(usize, Msg)]) -> Step<Msg, Self::Output> {
        let broadcast = |m: Msg| view.neighbors.iter().map(|&w| (w, m.clone())).collect::<Vec<_>>();
        let slot = |from: usize| view.neighbors.binary_search(&from).expect("sender is a neighbour");
        let reductions = self.schedule.len();

        if round <= reductions {
            for (from, m) in inbox {
                if let Msg::Class(c) = m {
                    s.nbr_class[slot(*from)] = *c;
                }
            }
            if round > 0 {
                s.class = reduce_class(s.class, &s.nbr_class, self.schedule[round - 1]);
            }
            return Step::send(broadcast(Msg::Class(s.class)));
        }

        for (from, m) in inbox {
            match *m {
                Msg::Class(c) => s.nbr_class[slot(*from)] = c,
                Msg::Colored(c) => {
                    s.forbidden.push(c);
                    if s.nbr_class[slot(*from)] < s.class {
                        s.pending_lower -= 1;
                    }
                }
            }
        }
        if round == reductions + 1 {
            s.pending_lower = s.nbr_class.iter().filter(|&&c| c < s.class).count();
        }
        if s.pending_lower > 0 {
            return Step::wait();
        }
        let list = &self.lists[self.labels.binary_search(&view.id).expect("known label")];
        match list.iter().find(|c| !s.forbidden.contains(c)) {
            Some(&c) => Step::send_and_halt(broadcast(Msg::Colored(c)), Ok(c)),
            None => {
                let mut seen = std::mem::take(&mut s.forbidden);
                seen.sort_unstable();
                Step::halt(Err(seen))
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ListColoring {
    pub colors: Vec<Color>,
    pub rounds: usize,
    pub reductions: usize,
}

/// Colors instance `g` (node `i` has identifier `labels[i]`, strictly
/// increasing) from `lists`. Requires `|list(v)| >= deg(v) + 1`.
pub fn deg_plus1_list_color(g: &Graph, labels: &[usize], lists: &[Vec<Color>], round_cap: usize) -> Result<ListColoring> {
    assert_eq!(lists.len(), g.n());
    let lists: Vec<Vec<Color>> = lists
        .iter()
        .map(|l| {
            let mut l = l.clone();
            l.sort_unstable();
            l.dedup();
            l
        })
        .collect();
    for v in 0..g.n() {
        if lists[v].len() < g.degree(v) + 1 {
            return Err(Error::ListPrecondition {
                vertex: labels[v],
                list_len: lists[v].len(),
                degree: g.degree(v),
            });
        }
    }
    let m = labels.last().map_or(0, |&l| l + 1);
    let schedule = linial_schedule(m, g.delta());
    let program = ListProgram {
        lists: &lists,
        schedule: &schedule,
        labels,
    };
    let run = run_sync_labeled(g, labels, &program, round_cap)?;
    let colors = run
        .outputs
        .into_iter()
        .enumerate()
        .map(|(v, out)| {
            out.map_err(|neighbor_colors| Error::EmptyPalette {
                vertex: labels[v],
                neighbor_colors,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ListColoring {
        colors,
        rounds: run.rounds,
        reductions: schedule.len(),
    })
}

/// Colors `vertices` of `g` (sorted) on top of `coloring`, each from its
/// current palette. Returns the rounds used.
pub fn extend_coloring(g: &Graph, vertices: &[Vertex], coloring: &mut Coloring, round_cap: usize) -> Result<usize> {
    if vertices.is_empty() {
        return Ok(0);
    }
    let inst = g.induced(vertices);
    let lists: Vec<Vec<Color>> = vertices.iter().map(|&v| coloring.palette(g, v)).collect();
    let out = deg_plus1_list_color(&inst, vertices, &lists, round_cap)?;
    for (&v, &c) in vertices.iter().zip(&out.colors) {
        coloring.set(v, c);
    }
    Ok(out.rounds)
}
