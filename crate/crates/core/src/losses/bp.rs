//! Bernoulli-Poisson reconstruction loss.
//!
//! An edge `(i, j)` has probability `1 - exp(-F_i·F_j)`. The balanced form
//! averages the edge log-likelihood and the non-edge penalty separately so
//! the far more numerous non-edges do not swamp the edge term.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::kernel::{log1mexp, DenseMatrix, RngStream};

/// Lower clamp on `F_i·F_j` inside the logarithm.
pub const INNER_PRODUCT_FLOOR: f64 = 1e-10;

/// Node limit for the quadratic-time reference loss.
pub const BRUTEFORCE_MAX_NODES: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "samples")]
pub enum BpEstimator {
    /// Every edge and every non-edge, via the column-sum identity.
    #[default]
    Exact,
    /// `s` uniform edges and `s` uniform non-edges per evaluation.
    Sampled(usize),
}

fn row_dot(f: &DenseMatrix, i: usize, j: usize) -> f64 {
    crate::kernel::dense_dot(f.row(i), f.row(j))
}

/// `(-ln(1 - e^{-x}), d/dx)` with `x` floored; the derivative is zero
/// where the floor is active.
fn edge_term(x: f64) -> (f64, f64) {
    if x < INNER_PRODUCT_FLOOR {
        (-log1mexp(INNER_PRODUCT_FLOOR), 0.0)
    } else {
        (-log1mexp(x), -1.0 / x.exp_m1())
    }
}

/// Adds `scale * F_j` to row `i` of `grad`.
fn add_row(grad: &mut DenseMatrix, i: usize, f: &DenseMatrix, j: usize, scale: f64) {
    let k = f.cols();
    let (gi, fj) = (i * k, j * k);
    let src = &f.as_slice()[fj..fj + k];
    for (g, v) in grad.as_mut_slice()[gi..gi + k].iter_mut().zip(src) {
        *g += scale * v;
    }
}

fn check_shapes(f: &DenseMatrix, g: &Graph) -> Result<()> {
    if f.rows() != g.n_nodes() {
        return Err(Error::shape(format!(
            "affiliation matrix has {} rows for {} nodes",
            f.rows(),
            g.n_nodes()
        )));
    }
    Ok(())
}

/// Unweighted sum over all unordered pairs: `-Σ_E ln(1 - e^{-F_i·F_j}) +
/// Σ_{non-E} F_i·F_j`. Quadratic in `N`; intended as a reference.
pub fn bp_loss_bruteforce(f: &DenseMatrix, g: &Graph) -> Result<(f64, DenseMatrix)> {
    check_shapes(f, g)?;
    let n = g.n_nodes();
    if n > BRUTEFORCE_MAX_NODES {
        return Err(Error::invalid(format!(
            "brute-force loss limited to {BRUTEFORCE_MAX_NODES} nodes, got {n}"
        )));
    }
    let mut value = 0.0;
    let mut grad = DenseMatrix::zeros(n, f.cols());
    for i in 0..n {
        for j in i + 1..n {
            let x = row_dot(f, i, j);
            let d = if g.has_edge(i, j) {
                let (v, d) = edge_term(x);
                value += v;
                d
            } else {
                value += x;
                1.0
            };
            add_row(&mut grad, i, f, j, d);
            add_row(&mut grad, j, f, i, d);
        }
    }
    Ok((value, grad))
}

/// Balanced loss: mean edge term plus mean non-edge inner product.
pub fn bp_loss_balanced(
    f: &DenseMatrix,
    g: &Graph,
    estimator: BpEstimator,
    rng: &mut RngStream,
) -> Result<(f64, DenseMatrix)> {
    check_shapes(f, g)?;
    if g.n_edges() == 0 {
        return Err(Error::InvalidData("graph has no edges".into()));
    }
    if g.n_non_edges() == 0 {
        return Err(Error::InvalidData("graph is complete; no non-edges".into()));
    }
    match estimator {
        BpEstimator::Exact => Ok(exact(f, g)),
        BpEstimator::Sampled(s) if s > 0 => Ok(sampled(f, g, s, rng)),
        BpEstimator::Sampled(_) => Err(Error::invalid("sample count must be positive")),
    }
}

fn exact(f: &DenseMatrix, g: &Graph) -> (f64, DenseMatrix) {
    let n = g.n_nodes();
    let k = f.cols();
    let n_edges = g.n_edges() as f64;
    let n_non = g.n_non_edges() as f64;

    let col_sum = f.col_sums();
    let sum_sq: f64 = col_sum.iter().map(|v| v * v).sum();
    let self_sq = f.squared_norm();
    let all_pairs = 0.5 * (sum_sq - self_sq);

    let mut grad = DenseMatrix::zeros(n, k);
    let mut edge_value = 0.0;
    let mut edge_dots = 0.0;
    for (i, j) in g.edges() {
        let x = row_dot(f, i, j);
        edge_dots += x;
        let (v, d) = edge_term(x);
        edge_value += v;
        // edge-mean gradient, minus this pair's share of the all-pairs sum
        let scale = d / n_edges - 1.0 / n_non;
        add_row(&mut grad, i, f, j, scale);
        add_row(&mut grad, j, f, i, scale);
    }
    // d/dF_i of Σ_{i<j} F_i·F_j is (colsum - F_i)
    for i in 0..n {
        let row = &mut grad.as_mut_slice()[i * k..(i + 1) * k];
        for c in 0..k {
            row[c] += (col_sum[c] - f[(i, c)]) / n_non;
        }
    }
    let value = edge_value / n_edges + (all_pairs - edge_dots) / n_non;
    (value, grad)
}

fn sampled(f: &DenseMatrix, g: &Graph, s: usize, rng: &mut RngStream) -> (f64, DenseMatrix) {
    let n = g.n_nodes();
    let stored = 2 * g.n_edges();
    let mut grad = DenseMatrix::zeros(n, f.cols());
    let inv = 1.0 / s as f64;
    let mut value = 0.0;
    for _ in 0..s {
        let (i, j) = g.entry_at(rng.below(stored));
        let (v, d) = edge_term(row_dot(f, i, j));
        value += v * inv;
        add_row(&mut grad, i, f, j, d * inv);
        add_row(&mut grad, j, f, i, d * inv);
    }
    for _ in 0..s {
        let (i, j) = loop {
            let i = rng.below(n);
            let j = rng.below(n);
            if i != j && !g.has_edge(i, j) {
                break (i, j);
            }
        };
        value += row_dot(f, i, j) * inv;
        add_row(&mut grad, i, f, j, inv);
        add_row(&mut grad, j, f, i, inv);
    }
    (value, grad)
}
