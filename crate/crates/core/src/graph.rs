//! Undirected weighted graphs and everything that builds or reshapes them.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::CsrMatrix;
use crate::{Error, Result};

/// An undirected edge stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Immutable weighted undirected graph.
///
/// Edges are kept in canonical order (`u < v`, sorted by `(u, v)`), so two
/// graphs built from the same edge set compare equal regardless of the order
/// or orientation the edges were supplied in.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    adjacency: Vec<(usize, f64)>,
    degree: Vec<f64>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicates and out-of-range nodes.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut canon: Vec<Edge> = Vec::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParameters(format!(
                    "edge ({u}, {v}) out of range for {n} nodes"
                )));
            }
            if u == v {
                return Err(Error::InvalidParameters(format!("self-loop at node {u}")));
            }
            if !w.is_finite() {
                return Err(Error::InvalidParameters(format!("non-finite weight on edge ({u}, {v})")));
            }
            let (u, v) = if u < v { (u, v) } else { (v, u) };
            canon.push(Edge { u, v, w });
        }
        canon.sort_by_key(|e| (e.u, e.v));
        if let Some(pair) = canon.windows(2).find(|p| (p[0].u, p[0].v) == (p[1].u, p[1].v)) {
            return Err(Error::InvalidParameters(format!(
                "duplicate edge ({}, {})",
                pair[0].u, pair[0].v
            )));
        }
        Ok(Self::from_canonical(n, canon))
    }

    /// Unit-weight convenience constructor.
    pub fn unweighted(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::new(n, edges.into_iter().map(|(u, v)| (u, v, 1.0)))
    }

    fn from_canonical(n: usize, edges: Vec<Edge>) -> Self {
        let mut counts = vec![0usize; n + 1];
        let mut degree = vec![0.0; n];
        for e in &edges {
            counts[e.u + 1] += 1;
            counts[e.v + 1] += 1;
            degree[e.u] += e.w;
            degree[e.v] += e.w;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let offsets = counts;
        let mut fill = offsets.clone();
        let mut adjacency = vec![(0usize, 0.0f64); 2 * edges.len()];
        for e in &edges {
            adjacency[fill[e.u]] = (e.v, e.w);
            fill[e.u] += 1;
            adjacency[fill[e.v]] = (e.u, e.w);
            fill[e.v] += 1;
        }
        for i in 0..n {
            adjacency[offsets[i]..offsets[i + 1]].sort_by_key(|&(j, _)| j);
        }
        Self {
            n,
            edges,
            offsets,
            adjacency,
            degree,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges in canonical order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// `(neighbor, weight)` pairs of `v`, sorted by neighbor.
    #[inline]
    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Number of incident edges.
    #[inline]
    pub fn neighbor_count(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Weighted degree: sum of incident edge weights.
    pub fn degree(&self) -> &[f64] {
        &self.degree
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        let nbrs = self.neighbors(u);
        nbrs.binary_search_by_key(&v, |&(j, _)| j).ok().map(|k| nbrs[k].1)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.weight(u, v).is_some()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }
}

/// Parses the Gset text format: a header `n m` followed by `m` lines of
/// `i j w` with 1-based node indices. Blank lines are ignored.
pub fn parse_gset(text: &str) -> Result<Graph> {
    let parse_err = |line: usize, message: String| Error::Parse { line, message };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header".into()))?;
    let mut fields = header.split_whitespace();
    let mut next_count = |what: &str| -> Result<usize> {
        let tok = fields
            .next()
            .ok_or_else(|| parse_err(hline, format!("missing {what} in header")))?;
        tok.parse::<usize>()
            .map_err(|_| parse_err(hline, format!("invalid {what} `{tok}`")))
    };
    let n = next_count("node count")?;
    let m = next_count("edge count")?;
    if fields.next().is_some() {
        return Err(parse_err(hline, "header must hold exactly two integers".into()));
    }

    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (lno, line) = lines
            .next()
            .ok_or_else(|| parse_err(hline, format!("expected {m} edge lines, found {}", edges.len())))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(parse_err(lno, format!("expected `i j w`, found `{line}`")));
        }
        let index = |tok: &str| -> Result<usize> {
            let i = tok
                .parse::<usize>()
                .map_err(|_| parse_err(lno, format!("invalid node index `{tok}`")))?;
            if i == 0 || i > n {
                return Err(parse_err(lno, format!("node index {i} outside 1..={n}")));
            }
            Ok(i - 1)
        };
        let u = index(toks[0])?;
        let v = index(toks[1])?;
        let w = toks[2]
            .parse::<f64>()
            .ok()
            .filter(|w| w.is_finite())
            .ok_or_else(|| parse_err(lno, format!("invalid weight `{}`", toks[2])))?;
        if u == v {
            return Err(parse_err(lno, format!("self-loop at node {}", u + 1)));
        }
        let key = if u < v { (u, v) } else { (v, u) };
        if !seen.insert(key) {
            return Err(parse_err(lno, format!("duplicate edge {} {}", u + 1, v + 1)));
        }
        edges.push((u, v, w));
    }
    if let Some((lno, _)) = lines.next() {
        return Err(parse_err(lno, format!("unexpected data after {m} edge lines")));
    }
    Graph::new(n, edges)
}

/// Writes the Gset text format with edges in canonical order.
pub fn write_gset(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", g.n(), g.m());
    for e in g.edges() {
        let _ = writeln!(out, "{} {} {}", e.u + 1, e.v + 1, e.w);
    }
    out
}

const MAX_PAIRING_RESTARTS: usize = 1_000_000;

/// Random simple `d`-regular graph from the pairing model.
///
/// Stubs are shuffled and paired consecutively; any self-loop or repeated
/// pair discards the whole pairing and the draw restarts.
pub fn generate_d_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if d >= n {
        return Err(Error::InvalidParameters(format!("degree {d} must be below node count {n}")));
    }
    if (n * d) % 2 == 1 {
        return Err(Error::InvalidParameters(format!("n·d = {} is odd", n * d)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| core::iter::repeat_n(v, d)).collect();
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    'attempt: for _ in 0..MAX_PAIRING_RESTARTS {
        stubs.shuffle(&mut rng);
        pairs.clear();
        for chunk in stubs.chunks_exact(2) {
            let (a, b) = (chunk[0], chunk[1]);
            if a == b {
                continue 'attempt;
            }
            let key = if a < b { (a, b) } else { (b, a) };
            if !pairs.insert(key) {
                continue 'attempt;
            }
        }
        return Graph::unweighted(n, pairs.iter().copied());
    }
    Err(Error::InvalidParameters(format!(
        "no simple {d}-regular pairing found on {n} nodes after {MAX_PAIRING_RESTARTS} draws"
    )))
}

/// Erdős–Rényi G(n, p) with unit weights.
pub fn generate_erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameters(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::unweighted(n, edges)
}

/// A node-induced subgraph together with the map back to the full graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedSample {
    /// Retained original node indices, strictly increasing.
    pub kept_nodes: Vec<usize>,
    /// Graph induced on `kept_nodes`, indexed by position in `kept_nodes`.
    pub observed_graph: Graph,
    pub original_n: usize,
}

impl ObservedSample {
    /// Original index of observed node `i`.
    #[inline]
    pub fn original(&self, i: usize) -> usize {
        self.kept_nodes[i]
    }

    pub fn node_map(&self) -> &[usize] {
        &self.kept_nodes
    }

    /// Observed index of an original node, if it was kept.
    pub fn observed_index(&self, original: usize) -> Option<usize> {
        self.kept_nodes.binary_search(&original).ok()
    }
}

/// Keeps `round(fraction · n)` nodes drawn uniformly without replacement and
/// induces every edge between them.
pub fn sample_observed_subgraph(g: &Graph, fraction: f64, seed: u64) -> Result<ObservedSample> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidParameters(format!("fraction {fraction} outside (0, 1]")));
    }
    let keep = libm::round(fraction * g.n() as f64) as usize;
    if keep == 0 {
        return Err(Error::InvalidParameters(format!(
            "fraction {fraction} keeps no node of {}",
            g.n()
        )));
    }
    let mut order: Vec<usize> = (0..g.n()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let mut kept_nodes = order[..keep].to_vec();
    kept_nodes.sort_unstable();

    let mut position = vec![usize::MAX; g.n()];
    for (i, &v) in kept_nodes.iter().enumerate() {
        position[v] = i;
    }
    let induced = g.edges().iter().filter_map(|e| {
        let (a, b) = (position[e.u], position[e.v]);
        (a != usize::MAX && b != usize::MAX).then_some((a, b, e.w))
    });
    let observed_graph = Graph::new(keep, induced)?;
    Ok(ObservedSample {
        kept_nodes,
        observed_graph,
        original_n: g.n(),
    })
}

/// The GCN propagation matrix `D̂^{-1/2} (A + I) D̂^{-1/2}`.
///
/// `D̂` uses absolute edge weights so that graphs with negative weights
/// (several Gset instances) still get a positive normalizer.
pub fn renormalized_adjacency(g: &Graph) -> CsrMatrix {
    let scale: Vec<f64> = (0..g.n())
        .map(|v| {
            let d_hat = 1.0 + g.neighbors(v).iter().map(|&(_, w)| libm::fabs(w)).sum::<f64>();
            1.0 / libm::sqrt(d_hat)
        })
        .collect();
    let mut triplets = Vec::with_capacity(g.n() + 2 * g.m());
    for v in 0..g.n() {
        triplets.push((v, v, scale[v] * scale[v]));
        for &(u, w) in g.neighbors(v) {
            triplets.push((v, u, w * (scale[v] * scale[u])));
        }
    }
    CsrMatrix::from_triplets(g.n(), g.n(), triplets)
}
