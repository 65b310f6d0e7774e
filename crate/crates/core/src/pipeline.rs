//! Predict-then-optimize on a partially observed graph, and the
//! multilinear-extension tools for coverage-style set functions.

use alloc::vec;
use alloc::vec::Vec;

use crate::gnn::{self, project_and_repair, SoftAssignment, TrainConfig, TrainOutcome};
use crate::graph::{renormalized_adjacency, sample_observed_subgraph, Graph};
use crate::linkpred::{self, predict_adjacency, reconstruction_bce, train_predictor, SoftAdjacency};
use crate::qubo::{build_qubo, is_feasible, objective, BinaryAssignment, ProblemKind, QuboMatrix, DEFAULT_PENALTY};
use crate::{Error, Result};

/// Predicted pairs below this probability are left out of the QUBO.
pub const PREDICTED_EDGE_MIN_PROB: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PipelineConfig {
    pub kind: ProblemKind,
    pub observe_fraction: f64,
    /// Weight of the prediction loss in the combined objective.
    pub lambda: f64,
    pub predictor_cfg: TrainConfig,
    pub solver_cfg: TrainConfig,
    /// Seed for node sampling.
    pub seed: u64,
    pub penalty: f64,
    pub polish: bool,
}

impl PipelineConfig {
    /// Defaults for an `n`-node graph, with every stage seeded from `seed`.
    pub fn new(kind: ProblemKind, n: usize, seed: u64) -> Self {
        Self {
            kind,
            observe_fraction: 0.8,
            lambda: 1.0,
            predictor_cfg: linkpred::default_predictor_config(seed),
            solver_cfg: TrainConfig::for_nodes(n).with_seed(seed),
            seed,
            penalty: DEFAULT_PENALTY,
            polish: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.observe_fraction > 0.0 && self.observe_fraction <= 1.0) {
            return Err(Error::InvalidParameters(alloc::format!(
                "observe fraction {} outside (0, 1]",
                self.observe_fraction
            )));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameters(alloc::format!("lambda {} must be non-negative", self.lambda)));
        }
        self.predictor_cfg.validate()?;
        self.solver_cfg.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineResult {
    /// Decision on the full graph, repaired against the true graph.
    pub assignment: BinaryAssignment,
    pub objective_true: f64,
    /// Objective of the same decision on the predicted (weighted) graph.
    pub objective_predicted: f64,
    pub feasible_true: bool,
    /// Wall time, filled in by callers that have a clock.
    pub runtime_ms: Option<u64>,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    /// Relaxed Hamiltonian on the predicted QUBO at the returned solver state.
    pub h_qubo: f64,
    /// Prediction loss term.
    pub l_obj: f64,
    pub combined_loss: f64,
}

/// `H(p) + λ · reconstruction BCE`.
pub fn combined_loss(p: &SoftAssignment, q_pred: &QuboMatrix, recon_bce: f64, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidParameters(alloc::format!("lambda {lambda} must be non-negative")));
    }
    Ok(q_pred.eval(p.as_slice())? + lambda * recon_bce)
}

/// Intermediate artifacts of one pipeline run, for export and inspection.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub result: PipelineResult,
    pub soft_adjacency: SoftAdjacency,
    /// Solver trace on the predicted QUBO, shifted by `λ · L_obj`.
    pub solver: TrainOutcome,
}

/// Sample, predict, encode on the prediction, solve, then repair and score
/// on the true graph.
///
/// The predictor is trained first and frozen; the solver then minimizes the
/// combined loss, whose prediction term is constant in the solver's
/// parameters.
pub fn end_to_end_solve(g_true: &Graph, cfg: &PipelineConfig) -> Result<PipelineResult> {
    Ok(end_to_end_run(g_true, cfg)?.result)
}

/// [`end_to_end_solve`] keeping the predicted adjacency and the solver trace.
pub fn end_to_end_run(g_true: &Graph, cfg: &PipelineConfig) -> Result<PipelineRun> {
    cfg.validate()?;
    let sample = sample_observed_subgraph(g_true, cfg.observe_fraction, cfg.seed)?;
    let predictor = train_predictor(&sample, g_true.n(), &cfg.predictor_cfg)?;
    let soft = predict_adjacency(&predictor, &sample);
    let l_obj = reconstruction_bce(&predictor, &sample);

    let g_pred = soft.to_weighted_graph(PREDICTED_EDGE_MIN_PROB);
    let q_pred = build_qubo(cfg.kind, &g_pred, cfg.penalty)?;
    let trained = gnn::train_with_constant(&renormalized_adjacency(&g_pred), &q_pred, &cfg.solver_cfg, cfg.lambda * l_obj)?;

    let assignment = project_and_repair(cfg.kind, g_true, &trained.best, cfg.polish)?;
    let h_qubo = q_pred.eval(trained.best.as_slice())?;
    let result = PipelineResult {
        objective_true: objective(cfg.kind, g_true, &assignment)?,
        objective_predicted: objective(cfg.kind, &g_pred, &assignment)?,
        feasible_true: is_feasible(cfg.kind, g_true, &assignment)?,
        assignment,
        runtime_ms: None,
        seed: cfg.seed,
        n: g_true.n(),
        m: g_true.m(),
        h_qubo,
        l_obj,
        combined_loss: combined_loss(&trained.best, &q_pred, l_obj, cfg.lambda)?,
    };
    Ok(PipelineRun {
        result,
        soft_adjacency: soft,
        solver: trained,
    })
}

/// Largest ground set [`multilinear_value`] enumerates.
pub const MAX_MULTILINEAR_ITEMS: usize = 16;

/// Multilinear extension `F(x) = Σ_S f(S) Π_{i∈S} x_i Π_{i∉S} (1 − x_i)` by
/// enumeration. `f` receives the set as a bit mask (item `i` is bit `i`)
/// and must vanish on the empty set.
pub fn multilinear_value(f: impl Fn(u32) -> f64, x: &[f64]) -> Result<f64> {
    let n = x.len();
    if n > MAX_MULTILINEAR_ITEMS {
        return Err(Error::TooLarge {
            n,
            max: MAX_MULTILINEAR_ITEMS,
        });
    }
    let empty = f(0);
    if empty != 0.0 {
        return Err(Error::NotNormalized(empty));
    }
    let mut total = 0.0;
    for mask in 1u32..(1u32 << n) {
        let mut weight = 1.0;
        for (i, &xi) in x.iter().enumerate() {
            weight *= if mask >> i & 1 == 1 { xi } else { 1.0 - xi };
            if weight == 0.0 {
                break;
            }
        }
        if weight != 0.0 {
            total += weight * f(mask);
        }
    }
    Ok(total)
}

/// Probabilities `θ_ij` that item `i` covers target `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageModel {
    items: usize,
    targets: usize,
    theta: Vec<f64>,
}

impl CoverageModel {
    pub fn new(items: usize, targets: usize, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != items * targets {
            return Err(Error::DimensionMismatch {
                expected: items * targets,
                found: theta.len(),
            });
        }
        if theta.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(Error::InvalidParameters("coverage probabilities must lie in [0, 1]".into()));
        }
        Ok(Self { items, targets, theta })
    }

    pub fn items(&self) -> usize {
        self.items
    }

    pub fn targets(&self) -> usize {
        self.targets
    }

    #[inline]
    pub fn theta(&self, i: usize, j: usize) -> f64 {
        self.theta[i * self.targets + j]
    }

    /// `F(x, θ) = Σ_j [1 − Π_i (1 − x_i θ_ij)]`.
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.check(x)?;
        Ok((0..self.targets)
            .map(|j| 1.0 - (0..self.items).map(|i| 1.0 - x[i] * self.theta(i, j)).product::<f64>())
            .sum())
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.items {
            return Err(Error::DimensionMismatch {
                expected: self.items,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// `Π_{ℓ ∉ skip} (1 − x_ℓ θ_ℓj)`.
    fn survival_except(&self, x: &[f64], j: usize, skip: &[usize]) -> f64 {
        (0..self.items)
            .filter(|l| !skip.contains(l))
            .map(|l| 1.0 - x[l] * self.theta(l, j))
            .product()
    }
}

/// Gradient of the coverage extension and its sensitivity to `θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageGradients {
    /// `∇_{x_i} F = Σ_j θ_ij Π_{k≠i} (1 − x_k θ_kj)`.
    pub grad_x: Vec<f64>,
    items: usize,
    targets: usize,
    /// `d/dθ_kj ∇_{x_i} F`, laid out `[i][k][j]`.
    mixed: Vec<f64>,
}

impl CoverageGradients {
    /// `d/dθ_kj ∇_{x_i} F`.
    pub fn mixed(&self, i: usize, k: usize, j: usize) -> f64 {
        self.mixed[(i * self.items + k) * self.targets + j]
    }
}

/// Closed-form derivatives of the coverage extension:
///
/// ```text
/// d/dθ_kj ∇_{x_i} F = −θ_ij x_k Π_{ℓ≠i,k} (1 − x_ℓ θ_ℓj)   if k ≠ i
///                   =  Π_{k≠i} (1 − x_k θ_kj)              if k = i
/// ```
pub fn coverage_multilinear_grads(x: &[f64], model: &CoverageModel) -> Result<CoverageGradients> {
    model.check(x)?;
    if x.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::InvalidParameters("x must lie in [0, 1]".into()));
    }
    let (items, targets) = (model.items, model.targets);
    let grad_x = (0..items)
        .map(|i| {
            (0..targets)
                .map(|j| model.theta(i, j) * model.survival_except(x, j, &[i]))
                .sum()
        })
        .collect();
    let mut mixed = vec![0.0; items * items * targets];
    for i in 0..items {
        for k in 0..items {
            for j in 0..targets {
                mixed[(i * items + k) * targets + j] = if k != i {
                    -model.theta(i, j) * x[k] * model.survival_except(x, j, &[i, k])
                } else {
                    model.survival_except(x, j, &[i])
                };
            }
        }
    }
    Ok(CoverageGradients {
        grad_x,
        items,
        targets,
        mixed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combined_loss_examples() {
        let g = Graph::unweighted(2, [(0, 1)]).unwrap();
        let q = build_qubo(ProblemKind::MaxCut, &g, 0.0).unwrap();
        let p = SoftAssignment::new(vec![0.3, 0.8]);
        let h = q.eval(p.as_slice()).unwrap();
        assert_eq!(combined_loss(&p, &q, 0.7, 0.0).unwrap(), h);
        let g1 = combined_loss(&p, &q, 0.7, 1.0).unwrap() - h;
        let g2 = combined_loss(&p, &q, 0.7, 2.0).unwrap() - h;
        assert!((g2 - 2.0 * g1).abs() < 1e-15);
        assert!(combined_loss(&p, &q, 0.7, -1.0).is_err());

        // H = −2.0 reached by a diagonal-only form at x = (1, 1)
        let diag = QuboMatrix::from_entries(2, [(0, 0, -1.0), (1, 1, -1.0)], 0.0, 0.0).unwrap();
        let ones = SoftAssignment::new(vec![1.0, 1.0]);
        let v = combined_loss(&ones, &diag, 0.7, 1.0).unwrap();
        assert!((v + 1.3).abs() < 1e-12, "{v}");
    }

    #[test]
    fn multilinear_examples() {
        let cut = |m: u32| if (m & 1) != (m >> 1 & 1) { 1.0 } else { 0.0 };
        assert_eq!(multilinear_value(cut, &[0.5, 0.5]).unwrap(), 0.5);
        assert_eq!(multilinear_value(cut, &[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(multilinear_value(cut, &[0.0, 0.0]).unwrap(), 0.0);
        assert!(matches!(multilinear_value(|_| 0.0, &[0.0; 17]), Err(Error::TooLarge { .. })));
        assert_eq!(multilinear_value(|_| 1.0, &[0.2]), Err(Error::NotNormalized(1.0)));
    }

    #[test]
    fn coverage_degenerate_shapes() {
        let one = CoverageModel::new(1, 1, vec![0.6]).unwrap();
        let g = coverage_multilinear_grads(&[0.3], &one).unwrap();
        assert_eq!(g.grad_x, vec![0.6]);
        assert_eq!(g.mixed(0, 0, 0), 1.0);

        let two = CoverageModel::new(2, 1, vec![0.4, 0.9]).unwrap();
        let x = [0.25, 0.5];
        let g = coverage_multilinear_grads(&x, &two).unwrap();
        assert_eq!(g.mixed(0, 1, 0), -0.4 * 0.5);
        assert_eq!(g.mixed(1, 0, 0), -0.9 * 0.25);
    }

    #[test]
    fn coverage_rejects_bad_inputs() {
        assert!(CoverageModel::new(2, 2, vec![0.1; 3]).is_err());
        assert!(CoverageModel::new(1, 1, vec![1.5]).is_err());
        let m = CoverageModel::new(2, 1, vec![0.1, 0.2]).unwrap();
        assert!(coverage_multilinear_grads(&[0.5], &m).is_err());
        assert!(coverage_multilinear_grads(&[0.5, 1.2], &m).is_err());
    }
}
