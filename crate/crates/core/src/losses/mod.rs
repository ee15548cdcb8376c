//! Training objectives: Bernoulli-Poisson reconstruction, local modularity,
//! and their weighted combination with L2 weight decay.

mod bp;
mod lq;
mod modularity;

pub use bp::{bp_loss_balanced, bp_loss_bruteforce, BpEstimator, BRUTEFORCE_MAX_NODES, INNER_PRODUCT_FLOOR};
pub use lq::{
    build_b, build_s, lq_loss, lq_loss_with_scaling, lq_matrix, lq_matrix_with_scaling, successor,
    LocalScaling, LqMatrix, ModularityMatrixB, EDGE_MASS_FLOOR,
};
pub use modularity::modularity_q;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::kernel::{DenseMatrix, RngStream};
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    pub alpha: f64,
    pub beta: f64,
    /// L2 weight-decay strength.
    pub lambda: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            lambda: 1e-2,
        }
    }
}

impl LossWeights {
    fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("lambda", self.lambda)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Unweighted components and the weighted total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub bp: f64,
    pub lq: Option<f64>,
    pub reg: f64,
    pub total: f64,
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub loss: LossBreakdown,
    pub grad_f: DenseMatrix,
    /// Gradient of the weight-decay term w.r.t. (W1, W2).
    pub reg_grad: (DenseMatrix, DenseMatrix),
    /// Scaling used for the local-modularity term, when it was active.
    pub scaling: Option<LocalScaling>,
}

/// `α·L_BP + [lq]·β·L_LQ + λ(‖W1‖² + ‖W2‖²)` over a fixed graph.
#[derive(Debug, Clone)]
pub struct Objective<'g> {
    graph: &'g Graph,
    b: ModularityMatrixB<'g>,
    weights: LossWeights,
    estimator: BpEstimator,
}

impl<'g> Objective<'g> {
    pub fn new(graph: &'g Graph, weights: LossWeights, estimator: BpEstimator) -> Result<Self> {
        weights.validate()?;
        Ok(Self {
            graph,
            b: build_b(graph)?,
            weights,
            estimator,
        })
    }

    pub fn weights(&self) -> LossWeights {
        self.weights
    }

    /// Evaluates the objective. The local-modularity scaling is computed
    /// from `f` unless `frozen` supplies one; either way it is a constant
    /// for the gradient.
    pub fn evaluate(
        &self,
        f: &DenseMatrix,
        params: &ModelParams,
        include_lq: bool,
        frozen: Option<&LocalScaling>,
        rng: &mut RngStream,
    ) -> Result<Evaluation> {
        let w = self.weights;
        let (bp, mut grad_f) = if w.alpha > 0.0 {
            let (v, g) = bp_loss_balanced(f, self.graph, self.estimator, rng)?;
            (v, g.scale(w.alpha))
        } else {
            (0.0, DenseMatrix::zeros(f.rows(), f.cols()))
        };
        let mut total = w.alpha * bp;

        let mut lq = None;
        let mut scaling = None;
        if include_lq && w.beta > 0.0 {
            let s = match frozen {
                Some(s) => s.clone(),
                None => build_s(f, self.graph)?,
            };
            let (v, g) = lq_loss_with_scaling(f, &self.b, &s)?;
            grad_f.axpy(w.beta, &g)?;
            total += w.beta * v;
            lq = Some(v);
            scaling = Some(s);
        }

        let reg = params.squared_norm();
        total += w.lambda * reg;
        let reg_grad = (params.w1.scale(2.0 * w.lambda), params.w2.scale(2.0 * w.lambda));
        Ok(Evaluation {
            loss: LossBreakdown { bp, lq, reg, total },
            grad_f,
            reg_grad,
            scaling,
        })
    }
}

/// One-shot exact evaluation; see [`Objective`].
pub fn total_loss(
    f: &DenseMatrix,
    g: &Graph,
    weights: LossWeights,
    include_lq: bool,
    params: &ModelParams,
) -> Result<Evaluation> {
    let obj = Objective::new(g, weights, BpEstimator::Exact)?;
    obj.evaluate(f, params, include_lq, None, &mut RngStream::new(0))
}
