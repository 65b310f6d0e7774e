//! Two-layer GCN relaxation solver.
//!
//! Featureless graphs get a trainable embedding table `H0` in place of node
//! features. The network is
//!
//! ```text
//! H1 = ReLU(Â H0 W0)        (n × d1)
//! p  = sigmoid(Â H1 W1)     (n)
//! ```
//!
//! and is trained without labels by minimizing the relaxed Hamiltonian
//! (see [`QuboMatrix::eval`]). Gradients are derived by hand; see [`backward`].

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::baselines::one_flip_local_search;
use crate::graph::{renormalized_adjacency, Graph};
use crate::linalg::{CsrMatrix, Matrix};
use crate::optim::Adam;
use crate::qubo::{build_qubo, objective, BinaryAssignment, ProblemKind, QuboMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainConfig {
    pub max_epochs: usize,
    pub learning_rate: f64,
    pub patience: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub d0: usize,
    pub d1: usize,
}

impl TrainConfig {
    /// Solver defaults sized for an `n`-node graph: `d0 = max(4, round(√n))`
    /// capped at 128 and `d1 = max(2, d0 / 2)`.
    pub fn for_nodes(n: usize) -> Self {
        let d0 = (libm::round(libm::sqrt(n as f64)) as usize).clamp(4, 128);
        Self {
            max_epochs: 10_000,
            learning_rate: 1e-2,
            patience: 500,
            tolerance: 1e-4,
            seed: 0,
            d0,
            d1: (d0 / 2).max(2),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameters(alloc::format!("train config: {what}")));
        if self.max_epochs == 0 {
            return bad("max_epochs must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if self.patience == 0 {
            return bad("patience must be at least 1");
        }
        if !(self.tolerance >= 0.0) {
            return bad("tolerance must be non-negative");
        }
        if self.d0 == 0 || self.d1 == 0 {
            return bad("embedding dims must be at least 1");
        }
        Ok(())
    }
}

/// Trainable parameters. Gradients share this shape.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GcnParams {
    /// `n × d0` node embedding table.
    pub embedding: Matrix,
    /// `d0 × d1`.
    pub w0: Matrix,
    /// `d1 × 1`.
    pub w1: Matrix,
}

impl GcnParams {
    pub fn n(&self) -> usize {
        self.embedding.rows()
    }

    fn check(&self, a_hat: &CsrMatrix) -> Result<()> {
        let (n, d0) = self.embedding.shape();
        let mismatch = |expected, found| Err(Error::DimensionMismatch { expected, found });
        if a_hat.n_rows() != n || a_hat.n_cols() != n {
            return mismatch(n, a_hat.n_rows());
        }
        if self.w0.rows() != d0 {
            return mismatch(d0, self.w0.rows());
        }
        if self.w1.rows() != self.w0.cols() {
            return mismatch(self.w0.cols(), self.w1.rows());
        }
        if self.w1.cols() != 1 {
            return mismatch(1, self.w1.cols());
        }
        Ok(())
    }

    fn blocks_mut(&mut self) -> [&mut [f64]; 3] {
        [
            self.embedding.as_mut_slice(),
            self.w0.as_mut_slice(),
            self.w1.as_mut_slice(),
        ]
    }
}

pub type GcnGradients = GcnParams;

/// Uniform `(-s, s)` draws with `s = 1/√fan_in`. The embedding rows act as
/// one-hot inputs, so their fan-in is 1.
pub fn init_params(n: usize, d0: usize, d1: usize, seed: u64) -> Result<GcnParams> {
    if d0 == 0 || d1 == 0 {
        return Err(Error::InvalidParameters("embedding dims must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |rows: usize, cols: usize, fan_in: usize| {
        let s = 1.0 / libm::sqrt(fan_in as f64);
        Matrix::from_fn(rows, cols, |_, _| rng.gen_range(-s..s))
    };
    let embedding = draw(n, d0, 1);
    let w0 = draw(d0, d1, d0);
    let w1 = draw(d1, 1, d1);
    Ok(GcnParams { embedding, w0, w1 })
}

/// Relaxed node decisions, each strictly inside `(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftAssignment(Vec<f64>);

impl SoftAssignment {
    /// Clamps into the open unit interval.
    pub fn new(p: Vec<f64>) -> Self {
        Self(p.into_iter().map(clamp_open).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

const P_MIN: f64 = f64::MIN_POSITIVE;
const P_MAX: f64 = 1.0 - f64::EPSILON / 2.0;

#[inline]
fn clamp_open(p: f64) -> f64 {
    p.clamp(P_MIN, P_MAX)
}

#[inline]
pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

struct Activations {
    /// `Â H0 W0`, before the ReLU.
    pre: Matrix,
    /// `ReLU(pre)`.
    hidden: Matrix,
    p: Vec<f64>,
}

fn run_forward(params: &GcnParams, a_hat: &CsrMatrix) -> Activations {
    let pre = a_hat.mul_dense(&params.embedding.matmul(&params.w0));
    let mut hidden = pre.clone();
    hidden.as_mut_slice().iter_mut().for_each(|v| *v = v.max(0.0));
    let u = hidden.matmul(&params.w1).into_vec();
    let logits = a_hat.mul_vec(&u);
    let p = logits.into_iter().map(|z| clamp_open(sigmoid(z))).collect();
    Activations { pre, hidden, p }
}

pub fn forward(params: &GcnParams, a_hat: &CsrMatrix) -> Result<SoftAssignment> {
    params.check(a_hat)?;
    Ok(SoftAssignment(run_forward(params, a_hat).p))
}

/// Relaxed Hamiltonian of `p`.
pub fn relaxed_loss(p: &SoftAssignment, q: &QuboMatrix) -> Result<f64> {
    q.eval(p.as_slice())
}

/// Chain rule through the Hamiltonian and both layers.
///
/// With `g_p = ∂H/∂p` (see [`QuboMatrix::gradient`]) and `g_z = g_p ⊙ p ⊙ (1 − p)`, and using `Âᵀ = Â`:
///
/// ```text
/// g_u   = Â g_z               g_W1 = H1ᵀ g_u
/// g_H1  = g_u W1ᵀ             g_pre = g_H1 ⊙ [pre > 0]
/// g_M   = Â g_pre             (M = H0 W0)
/// g_W0  = H0ᵀ g_M             g_H0 = g_M W0ᵀ
/// ```
pub fn backward(params: &GcnParams, a_hat: &CsrMatrix, q: &QuboMatrix) -> Result<GcnGradients> {
    params.check(a_hat)?;
    Ok(loss_and_gradients(params, a_hat, q)?.2)
}

fn loss_and_gradients(
    params: &GcnParams,
    a_hat: &CsrMatrix,
    q: &QuboMatrix,
) -> Result<(Vec<f64>, f64, GcnGradients)> {
    let act = run_forward(params, a_hat);
    let loss = q.eval(&act.p)?;
    let g_p = q.gradient(&act.p)?;
    let g_z: Vec<f64> = g_p.iter().zip(&act.p).map(|(g, p)| g * p * (1.0 - p)).collect();
    let n = act.p.len();
    let g_u = Matrix::from_vec(n, 1, a_hat.mul_vec(&g_z))?;
    let g_w1 = act.hidden.t_matmul(&g_u);
    let mut g_pre = g_u.matmul_t(&params.w1);
    for (g, &pre) in g_pre.as_mut_slice().iter_mut().zip(act.pre.as_slice()) {
        if pre <= 0.0 {
            *g = 0.0;
        }
    }
    let g_m = a_hat.mul_dense(&g_pre);
    let g_w0 = params.embedding.t_matmul(&g_m);
    let g_embedding = g_m.matmul_t(&params.w0);
    Ok((
        act.p,
        loss,
        GcnParams {
            embedding: g_embedding,
            w0: g_w0,
            w1: g_w1,
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceRow {
    pub epoch: usize,
    pub loss: f64,
    pub best_loss: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Assignment at the lowest observed loss.
    pub best: SoftAssignment,
    pub best_loss: f64,
    pub trace: Vec<TraceRow>,
}

/// Trains a freshly initialized GCN on `g` to minimize the relaxed `q`.
pub fn train(g: &Graph, q: &QuboMatrix, cfg: &TrainConfig) -> Result<TrainOutcome> {
    train_with_constant(&renormalized_adjacency(g), q, cfg, 0.0)
}

/// Like [`train`] but minimizes `H(p) + constant`. The constant carries loss
/// terms that do not depend on the solver's parameters; it shifts the
/// reported losses and nothing else.
pub fn train_with_constant(
    a_hat: &CsrMatrix,
    q: &QuboMatrix,
    cfg: &TrainConfig,
    constant: f64,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    let n = a_hat.n_rows();
    if q.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: q.n(),
        });
    }
    let mut params = init_params(n, cfg.d0, cfg.d1, cfg.seed)?;
    let mut opt = Adam::new(
        cfg.learning_rate,
        &[n * cfg.d0, cfg.d0 * cfg.d1, cfg.d1],
    );

    let mut best = vec![0.5; n];
    let mut best_loss = f64::INFINITY;
    let mut reference = f64::INFINITY;
    let mut stall = 0;
    let mut trace = Vec::new();
    for epoch in 0..cfg.max_epochs {
        let (p, h, grads) = loss_and_gradients(&params, a_hat, q)?;
        let loss = h + constant;
        if !loss.is_finite() || !grads.embedding.is_finite() || !grads.w0.is_finite() || !grads.w1.is_finite() {
            return Err(Error::Diverged { epoch });
        }
        if loss < best_loss {
            best_loss = loss;
            best = p;
        }
        trace.push(TraceRow {
            epoch,
            loss,
            best_loss,
        });
        if loss < reference - cfg.tolerance {
            reference = loss;
            stall = 0;
        } else {
            stall += 1;
            if stall >= cfg.patience {
                break;
            }
        }

        opt.tick();
        let grad_blocks = [grads.embedding.as_slice(), grads.w0.as_slice(), grads.w1.as_slice()];
        for (k, (block, grad)) in params.blocks_mut().into_iter().zip(grad_blocks).enumerate() {
            opt.apply(k, block, grad);
        }
    }
    Ok(TrainOutcome {
        best: SoftAssignment(best),
        best_loss,
        trace,
    })
}

/// Rounds at 0.5, restores feasibility on `g`, and optionally runs 1-flip
/// local search.
///
/// Repair is deterministic. MIS: for each edge with both ends selected, drop
/// the endpoint with more neighbors (tie: larger index), then add every node
/// with no selected neighbor in ascending order. MVC: for each uncovered
/// edge, add the endpoint with more neighbors (tie: smaller index), then,
/// scanning from the highest index down, drop any node whose neighbors are
/// all selected.
pub fn project_and_repair(
    kind: ProblemKind,
    g: &Graph,
    p: &SoftAssignment,
    polish: bool,
) -> Result<BinaryAssignment> {
    if p.len() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            found: p.len(),
        });
    }
    let mut x = BinaryAssignment::new(p.as_slice().iter().map(|&v| v >= 0.5).collect());
    let deg = |v: usize| g.neighbor_count(v);
    match kind {
        ProblemKind::MaxCut => {}
        ProblemKind::Mis => {
            for e in g.edges() {
                if x.get(e.u) && x.get(e.v) {
                    // (degree, index) ordering: larger wins, ties go to the larger index
                    let drop = if (deg(e.u), e.u) > (deg(e.v), e.v) { e.u } else { e.v };
                    x.set(drop, false);
                }
            }
            for v in 0..g.n() {
                if !x.get(v) && g.neighbors(v).iter().all(|&(u, _)| !x.get(u)) {
                    x.set(v, true);
                }
            }
        }
        ProblemKind::Mvc => {
            for e in g.edges() {
                if !x.get(e.u) && !x.get(e.v) {
                    let add = if deg(e.v) > deg(e.u) { e.v } else { e.u };
                    x.set(add, true);
                }
            }
            for v in (0..g.n()).rev() {
                if x.get(v) && g.neighbors(v).iter().all(|&(u, _)| x.get(u)) {
                    x.set(v, false);
                }
            }
        }
    }
    if polish {
        x = one_flip_local_search(kind, g, &x)?;
    }
    Ok(x)
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub assignment: BinaryAssignment,
    pub objective: f64,
    pub train: TrainOutcome,
}

/// Standalone solver: encode, train, round and repair on the same graph.
pub fn solve(
    kind: ProblemKind,
    g: &Graph,
    cfg: &TrainConfig,
    penalty: f64,
    polish: bool,
) -> Result<SolveOutcome> {
    let q = build_qubo(kind, g, penalty)?;
    let train = train(g, &q, cfg)?;
    let assignment = project_and_repair(kind, g, &train.best, polish)?;
    let objective = objective(kind, g, &assignment)?;
    Ok(SolveOutcome {
        assignment,
        objective,
        train,
    })
}
