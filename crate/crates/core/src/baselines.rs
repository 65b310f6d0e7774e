//! Degree-greedy heuristics and 1-flip local search.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::Graph;
use crate::qubo::{is_feasible, BinaryAssignment, ProblemKind};
use crate::{Error, Result};

/// Degree-based greedy algorithm.
///
/// * MaxCut: nodes in descending weighted degree (tie: smaller index) join
///   the side that cuts more weight to already placed neighbors; ties join
///   the side marked `1`.
/// * MIS: repeatedly take the node of minimum residual degree (tie: smaller
///   index) and delete it with its neighbors.
/// * MVC: repeatedly take the node of maximum residual degree (tie: smaller
///   index) and delete its incident edges, until no edge remains.
pub fn dga(kind: ProblemKind, g: &Graph) -> BinaryAssignment {
    match kind {
        ProblemKind::MaxCut => dga_maxcut(g),
        ProblemKind::Mis => dga_mis(g),
        ProblemKind::Mvc => dga_mvc(g),
    }
}

fn dga_maxcut(g: &Graph) -> BinaryAssignment {
    let mut order: Vec<usize> = (0..g.n()).collect();
    let deg = g.degree();
    order.sort_by(|&a, &b| deg[b].total_cmp(&deg[a]).then(a.cmp(&b)));
    // 0 = unplaced, 1 = side S (x = 1), 2 = side T (x = 0)
    let mut side = vec![0u8; g.n()];
    for v in order {
        let (mut to_s, mut to_t) = (0.0, 0.0);
        for &(u, w) in g.neighbors(v) {
            match side[u] {
                1 => to_s += w,
                2 => to_t += w,
                _ => {}
            }
        }
        // joining S cuts the edges to T and vice versa
        side[v] = if to_t >= to_s { 1 } else { 2 };
    }
    BinaryAssignment::new(side.into_iter().map(|s| s == 1).collect())
}

/// Residual degrees with an ordered index for min/max extraction.
struct Residual {
    degree: Vec<usize>,
    alive: Vec<bool>,
    queue: BTreeSet<(usize, usize)>,
}

impl Residual {
    fn new(g: &Graph) -> Self {
        let degree: Vec<usize> = (0..g.n()).map(|v| g.neighbor_count(v)).collect();
        let queue = degree.iter().enumerate().map(|(v, &d)| (d, v)).collect();
        Self {
            degree,
            alive: vec![true; g.n()],
            queue,
        }
    }

    fn remove(&mut self, g: &Graph, v: usize) {
        if !self.alive[v] {
            return;
        }
        self.alive[v] = false;
        self.queue.remove(&(self.degree[v], v));
        for &(u, _) in g.neighbors(v) {
            if self.alive[u] {
                self.queue.remove(&(self.degree[u], u));
                self.degree[u] -= 1;
                self.queue.insert((self.degree[u], u));
            }
        }
    }

    /// Largest residual degree, smallest index among ties.
    fn pop_max(&self) -> Option<(usize, usize)> {
        let &(d, _) = self.queue.last()?;
        self.queue.range((d, 0)..).next().copied()
    }
}

fn dga_mis(g: &Graph) -> BinaryAssignment {
    let mut x = BinaryAssignment::zeros(g.n());
    let mut res = Residual::new(g);
    while let Some(&(_, v)) = res.queue.first() {
        x.set(v, true);
        res.remove(g, v);
        for &(u, _) in g.neighbors(v) {
            res.remove(g, u);
        }
    }
    x
}

fn dga_mvc(g: &Graph) -> BinaryAssignment {
    let mut x = BinaryAssignment::zeros(g.n());
    let mut res = Residual::new(g);
    while let Some((d, v)) = res.pop_max() {
        if d == 0 {
            break;
        }
        x.set(v, true);
        res.remove(g, v);
    }
    x
}

/// Change in the problem's objective from flipping `v`, or `None` when the
/// flip would break feasibility.
fn flip_gain(kind: ProblemKind, g: &Graph, x: &BinaryAssignment, v: usize) -> Option<f64> {
    let on = x.get(v);
    match kind {
        ProblemKind::MaxCut => Some(
            g.neighbors(v)
                .iter()
                .map(|&(u, w)| if x.get(u) == on { w } else { -w })
                .sum(),
        ),
        ProblemKind::Mis => {
            if on {
                Some(-1.0)
            } else if g.neighbors(v).iter().all(|&(u, _)| !x.get(u)) {
                Some(1.0)
            } else {
                None
            }
        }
        ProblemKind::Mvc => {
            if !on {
                Some(1.0)
            } else if g.neighbors(v).iter().all(|&(u, _)| x.get(u)) {
                Some(-1.0)
            } else {
                None
            }
        }
    }
}

/// First-improvement 1-flip local search in ascending node order, repeated
/// until a full scan finds no improving feasible flip.
pub fn one_flip_local_search(
    kind: ProblemKind,
    g: &Graph,
    x0: &BinaryAssignment,
) -> Result<BinaryAssignment> {
    if !is_feasible(kind, g, x0)? {
        return Err(Error::Infeasible);
    }
    let mut x = x0.clone();
    loop {
        let mut improved = false;
        for v in 0..g.n() {
            if let Some(gain) = flip_gain(kind, g, &x, v) {
                if kind.improves(gain, 0.0) {
                    x.flip(v);
                    improved = true;
                }
            }
        }
        if !improved {
            return Ok(x);
        }
    }
}
