//! Graph auto-encoder that predicts the full adjacency from an observed
//! node-induced subgraph.
//!
//! Observed nodes are encoded by one GCN layer `Z = Â' H W` over the observed
//! graph; nodes that were never observed get free embedding rows. Pair
//! scores are `sigmoid(z_i · z_j)`.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gnn::{sigmoid, TrainConfig};
use crate::graph::{renormalized_adjacency, Graph, ObservedSample};
use crate::linalg::{dot, CsrMatrix, Matrix};
use crate::optim::Adam;
use crate::{Error, Result};

/// Decoupled weight decay applied to the free embeddings of unobserved nodes.
pub const UNOBSERVED_WEIGHT_DECAY: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct PredictorParams {
    /// Observed-node embedding table, `n_obs × d0`.
    pub embedding: Matrix,
    /// Encoder weight, `d0 × d1`.
    pub weight: Matrix,
    /// Free rows for unobserved nodes, `(full_n − n_obs) × d1`, in ascending
    /// original index.
    pub unobserved: Matrix,
    kept_nodes: Vec<usize>,
    unobserved_nodes: Vec<usize>,
    a_hat: CsrMatrix,
}

impl PredictorParams {
    pub fn full_n(&self) -> usize {
        self.kept_nodes.len() + self.unobserved_nodes.len()
    }

    pub fn embedding_dim(&self) -> usize {
        self.weight.cols()
    }

    /// Encoder output for the observed nodes, `n_obs × d1`.
    pub fn observed_embeddings(&self) -> Matrix {
        self.a_hat.mul_dense(&self.embedding.matmul(&self.weight))
    }

    /// Embedding for every node of the full graph, indexed by original node.
    pub fn embeddings(&self) -> Matrix {
        let z_obs = self.observed_embeddings();
        let mut z = Matrix::zeros(self.full_n(), self.embedding_dim());
        for (i, &v) in self.kept_nodes.iter().enumerate() {
            z.row_mut(v).copy_from_slice(z_obs.row(i));
        }
        for (k, &v) in self.unobserved_nodes.iter().enumerate() {
            z.row_mut(v).copy_from_slice(self.unobserved.row(k));
        }
        z
    }

    /// Edge probability for two observed nodes, by observed index.
    pub fn observed_score(&self, z_obs: &Matrix, i: usize, j: usize) -> f64 {
        sigmoid(dot(z_obs.row(i), z_obs.row(j)))
    }
}

#[inline]
fn softplus(z: f64) -> f64 {
    z.max(0.0) + libm::log1p(libm::exp(-libm::fabs(z)))
}

/// Binary cross-entropy of `sigmoid(logit)` against `label`.
#[inline]
pub fn bce_with_logit(logit: f64, label: bool) -> f64 {
    softplus(logit) - if label { logit } else { 0.0 }
}

/// Binary cross-entropy of a fixed probability against `label`.
pub fn bce(prob: f64, label: bool) -> f64 {
    let p = prob.clamp(1e-12, 1.0 - 1e-12);
    if label {
        -libm::log(p)
    } else {
        -libm::log(1.0 - p)
    }
}

fn canonical(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

/// Non-edges of `g` minus `excluded`, drawn uniformly.
struct NegativePool {
    n: usize,
    explicit: Option<Vec<(usize, usize)>>,
    available: usize,
}

impl NegativePool {
    fn new(g: &Graph, excluded: &BTreeSet<(usize, usize)>) -> Self {
        let n = g.n();
        let total = n * n.saturating_sub(1) / 2;
        let blocked = g.m() + excluded.iter().filter(|&&(i, j)| !g.has_edge(i, j)).count();
        let available = total - blocked;
        // rejection sampling is fine while most pairs qualify
        let explicit = (2 * available < total).then(|| {
            let mut pool = Vec::with_capacity(available);
            for i in 0..n {
                for j in i + 1..n {
                    if !g.has_edge(i, j) && !excluded.contains(&(i, j)) {
                        pool.push((i, j));
                    }
                }
            }
            pool
        });
        Self {
            n,
            explicit,
            available,
        }
    }

    fn sample(&self, g: &Graph, excluded: &BTreeSet<(usize, usize)>, rng: &mut ChaCha8Rng) -> Option<(usize, usize)> {
        if self.available == 0 {
            return None;
        }
        if let Some(pool) = &self.explicit {
            return pool.choose(rng).copied();
        }
        loop {
            let i = rng.gen_range(0..self.n);
            let j = rng.gen_range(0..self.n);
            if i == j {
                continue;
            }
            let pair = canonical(i, j);
            if !g.has_edge(pair.0, pair.1) && !excluded.contains(&pair) {
                return Some(pair);
            }
        }
    }
}

/// Trains the encoder on every observed edge.
pub fn train_predictor(sample: &ObservedSample, full_n: usize, cfg: &TrainConfig) -> Result<PredictorParams> {
    train_predictor_excluding(sample, full_n, cfg, &BTreeSet::new())
}

/// Trains the encoder on the observed graph, never using a pair in
/// `excluded` (observed indices, `i < j`) as a negative sample.
///
/// Each epoch scores every observed edge and one fresh uniformly drawn
/// non-edge per edge, minimizing their mean binary cross-entropy with Adam.
pub fn train_predictor_excluding(
    sample: &ObservedSample,
    full_n: usize,
    cfg: &TrainConfig,
    excluded: &BTreeSet<(usize, usize)>,
) -> Result<PredictorParams> {
    cfg.validate()?;
    let g = &sample.observed_graph;
    let n_obs = g.n();
    if full_n < n_obs {
        return Err(Error::InvalidParameters(alloc::format!(
            "full graph size {full_n} below observed size {n_obs}"
        )));
    }
    if sample.kept_nodes.iter().any(|&v| v >= full_n) {
        return Err(Error::InvalidParameters("kept node outside the full graph".into()));
    }
    if cfg.d1 < 2 {
        return Err(Error::InvalidParameters("embedding dim must be at least 2".into()));
    }
    if g.m() == 0 {
        return Err(Error::CannotTrain("observed graph has no edges"));
    }

    let (d0, d1) = (cfg.d0, cfg.d1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut uniform = |rows: usize, cols: usize, fan_in: usize| {
        let s = 1.0 / libm::sqrt(fan_in as f64);
        Matrix::from_fn(rows, cols, |_, _| rng.gen_range(-s..s))
    };
    let kept: BTreeSet<usize> = sample.kept_nodes.iter().copied().collect();
    let unobserved_nodes: Vec<usize> = (0..full_n).filter(|v| !kept.contains(v)).collect();
    let mut params = PredictorParams {
        embedding: uniform(n_obs, d0, 1),
        weight: uniform(d0, d1, d0),
        unobserved: uniform(unobserved_nodes.len(), d1, d1),
        kept_nodes: sample.kept_nodes.clone(),
        unobserved_nodes,
        a_hat: renormalized_adjacency(g),
    };

    let pool = NegativePool::new(g, excluded);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9E37_79B9_7F4A_7C15);
    let mut opt = Adam::new(cfg.learning_rate, &[n_obs * d0, d0 * d1]);
    let decay = 1.0 - cfg.learning_rate * UNOBSERVED_WEIGHT_DECAY;

    let mut reference = f64::INFINITY;
    let mut stall = 0;
    let mut pairs: Vec<(usize, usize, bool)> = Vec::with_capacity(2 * g.m());
    for epoch in 0..cfg.max_epochs {
        pairs.clear();
        for e in g.edges() {
            pairs.push((e.u, e.v, true));
            if let Some((i, j)) = pool.sample(g, excluded, &mut rng) {
                pairs.push((i, j, false));
            }
        }

        let xw = params.embedding.matmul(&params.weight);
        let z = params.a_hat.mul_dense(&xw);
        let scale = 1.0 / pairs.len() as f64;
        let mut loss = 0.0;
        let mut g_z = Matrix::zeros(n_obs, d1);
        for &(i, j, label) in &pairs {
            let logit = dot(z.row(i), z.row(j));
            loss += bce_with_logit(logit, label) * scale;
            let coeff = (sigmoid(logit) - if label { 1.0 } else { 0.0 }) * scale;
            for k in 0..d1 {
                let (zi, zj) = (z.get(i, k), z.get(j, k));
                g_z.row_mut(i)[k] += coeff * zj;
                g_z.row_mut(j)[k] += coeff * zi;
            }
        }
        if !loss.is_finite() {
            return Err(Error::Diverged { epoch });
        }
        let g_xw = params.a_hat.mul_dense(&g_z);
        let g_weight = params.embedding.t_matmul(&g_xw);
        let g_embedding = g_xw.matmul_t(&params.weight);

        opt.tick();
        opt.apply(0, params.embedding.as_mut_slice(), g_embedding.as_slice());
        opt.apply(1, params.weight.as_mut_slice(), g_weight.as_slice());
        params.unobserved.as_mut_slice().iter_mut().for_each(|u| *u *= decay);

        if loss < reference - cfg.tolerance {
            reference = loss;
            stall = 0;
        } else {
            stall += 1;
            if stall >= cfg.patience {
                break;
            }
        }
    }
    Ok(params)
}

/// Symmetric matrix of edge probabilities with a zero diagonal, stored as a
/// packed strict upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftAdjacency {
    n: usize,
    upper: Vec<f64>,
}

impl SoftAdjacency {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            upper: vec![0.0; n * n.saturating_sub(1) / 2],
        }
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.n);
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (a, b) = canonical(i, j);
        self.upper[self.index(a, b)]
    }

    /// Sets `(i, j)` and `(j, i)`. Diagonal writes are ignored.
    pub fn set(&mut self, i: usize, j: usize, prob: f64) {
        if i == j {
            return;
        }
        let (a, b) = canonical(i, j);
        let k = self.index(a, b);
        self.upper[k] = prob.clamp(0.0, 1.0);
    }

    /// `(i, j, prob)` with `i < j` for every entry at or above `min_prob`.
    pub fn entries_at_least(&self, min_prob: f64) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n)
            .flat_map(move |i| (i + 1..self.n).map(move |j| (i, j)))
            .zip(self.upper.iter().copied())
            .filter(move |&(_, p)| p >= min_prob)
            .map(|((i, j), p)| (i, j, p))
    }

    /// Graph whose edge weights are the probabilities at or above `min_prob`.
    pub fn to_weighted_graph(&self, min_prob: f64) -> Graph {
        Graph::new(self.n, self.entries_at_least(min_prob)).expect("canonical pairs form a simple graph")
    }
}

/// `sigmoid(z_i · z_j)` for every pair, then observed pairs overwritten by
/// their observed 0/1 status.
pub fn predict_adjacency(params: &PredictorParams, known: &ObservedSample) -> SoftAdjacency {
    let z = params.embeddings();
    let n = params.full_n();
    let mut soft = SoftAdjacency::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            soft.set(i, j, sigmoid(dot(z.row(i), z.row(j))));
        }
    }
    let g = &known.observed_graph;
    for a in 0..g.n() {
        for b in a + 1..g.n() {
            let indicator = if g.has_edge(a, b) { 1.0 } else { 0.0 };
            soft.set(known.original(a), known.original(b), indicator);
        }
    }
    soft
}

/// Unit-weight graph of the pairs with probability at least `tau`.
pub fn threshold_adjacency(soft: &SoftAdjacency, tau: f64) -> Result<Graph> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::InvalidParameters(alloc::format!("threshold {tau} outside (0, 1)")));
    }
    Graph::new(soft.n(), soft.entries_at_least(tau).map(|(i, j, _)| (i, j, 1.0)))
}

/// Labelled observed-index pairs held out from training.
#[derive(Debug, Clone)]
pub struct EdgeSplit {
    /// Observed sample with the held-out edges removed.
    pub train: ObservedSample,
    pub held_out: Vec<(usize, usize, bool)>,
}

impl EdgeSplit {
    /// Held-out pairs as an exclusion set for negative sampling.
    pub fn excluded(&self) -> BTreeSet<(usize, usize)> {
        self.held_out.iter().map(|&(i, j, _)| (i, j)).collect()
    }
}

/// Holds out `round(fraction · m)` observed edges (at least one, at most
/// `m − 1`) and the same number of observed non-edges.
pub fn holdout_split(sample: &ObservedSample, fraction: f64, seed: u64) -> Result<EdgeSplit> {
    let g = &sample.observed_graph;
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidParameters(alloc::format!("holdout fraction {fraction} outside (0, 1)")));
    }
    if g.m() < 2 {
        return Err(Error::CannotTrain("need at least two observed edges to hold one out"));
    }
    let k = (libm::round(fraction * g.m() as f64) as usize).clamp(1, g.m() - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..g.m()).collect();
    order.shuffle(&mut rng);
    let held: BTreeSet<usize> = order[..k].iter().copied().collect();

    let mut non_edges: Vec<(usize, usize)> = Vec::new();
    for i in 0..g.n() {
        for j in i + 1..g.n() {
            if !g.has_edge(i, j) {
                non_edges.push((i, j));
            }
        }
    }
    if non_edges.len() < k {
        return Err(Error::CannotTrain("not enough observed non-edges to hold out"));
    }
    non_edges.shuffle(&mut rng);

    let mut held_out: Vec<(usize, usize, bool)> =
        held.iter().map(|&idx| (g.edges()[idx].u, g.edges()[idx].v, true)).collect();
    held_out.extend(non_edges[..k].iter().map(|&(i, j)| (i, j, false)));

    let kept_edges = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(idx, _)| !held.contains(idx))
        .map(|(_, e)| (e.u, e.v, e.w));
    let train = ObservedSample {
        kept_nodes: sample.kept_nodes.clone(),
        observed_graph: Graph::new(g.n(), kept_edges)?,
        original_n: sample.original_n,
    };
    Ok(EdgeSplit { train, held_out })
}

/// Mean BCE of the predictor's scores on labelled observed-index pairs.
pub fn pairs_bce(params: &PredictorParams, pairs: &[(usize, usize, bool)]) -> f64 {
    let z = params.observed_embeddings();
    pairs
        .iter()
        .map(|&(i, j, y)| bce_with_logit(dot(z.row(i), z.row(j)), y))
        .sum::<f64>()
        / pairs.len() as f64
}

/// Mean BCE of a constant predictor on labelled pairs.
pub fn constant_bce(prob: f64, pairs: &[(usize, usize, bool)]) -> f64 {
    pairs.iter().map(|&(_, _, y)| bce(prob, y)).sum::<f64>() / pairs.len() as f64
}

/// Fraction of node pairs of `g` that are edges.
pub fn edge_density(g: &Graph) -> f64 {
    let pairs = g.n() * g.n().saturating_sub(1) / 2;
    if pairs == 0 {
        0.0
    } else {
        g.m() as f64 / pairs as f64
    }
}

/// Class-balanced reconstruction BCE over every observed pair: the mean of
/// the edge-pair BCE and the non-edge-pair BCE (a class with no pairs
/// contributes nothing).
pub fn reconstruction_bce(params: &PredictorParams, sample: &ObservedSample) -> f64 {
    let g = &sample.observed_graph;
    let z = params.observed_embeddings();
    let (mut pos, mut n_pos, mut neg, mut n_neg) = (0.0, 0usize, 0.0, 0usize);
    for i in 0..g.n() {
        for j in i + 1..g.n() {
            let logit = dot(z.row(i), z.row(j));
            if g.has_edge(i, j) {
                pos += bce_with_logit(logit, true);
                n_pos += 1;
            } else {
                neg += bce_with_logit(logit, false);
                n_neg += 1;
            }
        }
    }
    match (n_pos, n_neg) {
        (0, 0) => 0.0,
        (0, _) => neg / n_neg as f64,
        (_, 0) => pos / n_pos as f64,
        _ => 0.5 * (pos / n_pos as f64 + neg / n_neg as f64),
    }
}

/// Defaults for the link predictor.
pub fn default_predictor_config(seed: u64) -> TrainConfig {
    TrainConfig {
        max_epochs: 300,
        learning_rate: 1e-2,
        patience: 100,
        tolerance: 1e-4,
        seed,
        d0: 16,
        d1: 8,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_erdos_renyi, sample_observed_subgraph};

    #[test]
    fn packed_indexing_covers_every_pair_once() {
        let mut soft = SoftAdjacency::zeros(5);
        let mut k = 0.0;
        for i in 0..5 {
            for j in i + 1..5 {
                k += 0.05;
                soft.set(j, i, k);
            }
        }
        let all: Vec<_> = soft.entries_at_least(0.0).collect();
        assert_eq!(all.len(), 10);
        assert!(all.windows(2).all(|w| w[0].2 < w[1].2));
        assert_eq!(soft.get(3, 3), 0.0);
        assert_eq!(soft.get(1, 4), soft.get(4, 1));
    }

    #[test]
    fn single_edge_scores_above_half() {
        let g = Graph::unweighted(2, [(0, 1)]).unwrap();
        let sample = sample_observed_subgraph(&g, 1.0, 0).unwrap();
        for seed in 0..3 {
            let params = train_predictor(&sample, 2, &default_predictor_config(seed)).unwrap();
            let z = params.observed_embeddings();
            assert!(params.observed_score(&z, 0, 1) > 0.5);
        }
    }

    #[test]
    fn cannot_train_without_edges() {
        let g = Graph::unweighted(4, []).unwrap();
        let sample = sample_observed_subgraph(&g, 1.0, 0).unwrap();
        assert_eq!(
            train_predictor(&sample, 4, &default_predictor_config(0)),
            Err(Error::CannotTrain("observed graph has no edges"))
        );
    }

    #[test]
    fn training_is_deterministic() {
        let g = generate_erdos_renyi(20, 0.2, 4).unwrap();
        let sample = sample_observed_subgraph(&g, 0.8, 1).unwrap();
        let cfg = default_predictor_config(7);
        assert_eq!(train_predictor(&sample, 20, &cfg).unwrap(), train_predictor(&sample, 20, &cfg).unwrap());
    }

    #[test]
    fn override_and_threshold_rules() {
        let g = generate_erdos_renyi(15, 0.3, 2).unwrap();
        let sample = sample_observed_subgraph(&g, 0.8, 3).unwrap();
        let params = train_predictor(&sample, 15, &default_predictor_config(1)).unwrap();
        let soft = predict_adjacency(&params, &sample);
        for (a, &u) in sample.kept_nodes.iter().enumerate() {
            for (b, &v) in sample.kept_nodes.iter().enumerate() {
                let expect = if a != b && sample.observed_graph.has_edge(a, b) { 1.0 } else { 0.0 };
                assert_eq!(soft.get(u, v), expect);
            }
        }
        assert!(threshold_adjacency(&SoftAdjacency::zeros(4), 0.5).unwrap().m() == 0);
        assert!(threshold_adjacency(&soft, 1.0).is_err());
        let loose = threshold_adjacency(&soft, 0.5).unwrap();
        let tight = threshold_adjacency(&soft, 0.999).unwrap();
        assert!(tight.edges().iter().all(|e| loose.has_edge(e.u, e.v)));
    }

    #[test]
    fn holdout_split_is_balanced_and_disjoint() {
        let g = generate_erdos_renyi(30, 0.2, 8).unwrap();
        let sample = sample_observed_subgraph(&g, 0.8, 2).unwrap();
        let split = holdout_split(&sample, 0.2, 5).unwrap();
        let pos = split.held_out.iter().filter(|p| p.2).count();
        assert_eq!(pos * 2, split.held_out.len());
        assert_eq!(split.train.observed_graph.m() + pos, sample.observed_graph.m());
        for &(i, j, y) in &split.held_out {
            assert_eq!(sample.observed_graph.has_edge(i, j), y);
            assert!(!split.train.observed_graph.has_edge(i, j));
        }
    }

    #[test]
    fn bce_helpers_agree() {
        for &z in &[-30.0, -2.0, 0.0, 0.7, 25.0] {
            for y in [true, false] {
                let direct = bce(sigmoid(z), y);
                assert!((bce_with_logit(z, y) - direct).abs() < 1e-9 * direct.max(1.0) || direct > 20.0);
            }
        }
        assert!((constant_bce(0.5, &[(0, 1, true), (1, 2, false)]) - core::f64::consts::LN_2).abs() < 1e-15);
    }
}
