//! Local-modularity loss.
//!
//! With the modularity matrix `B = A - d dᵀ/(2|E|)` and a per-community
//! scaling `S`, the matrix
//! `LQ = S Fᵀ B F / (4|E|)` holds intra-community scores on its diagonal and
//! inter-community scores off it. The loss rewards the diagonal and
//! penalizes each community's score against its cyclic successor, with
//! both passed through a logistic squashing.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::kernel::{log_sigmoid, sigmoid, DenseMatrix};

/// Floor on a community's incident-edge mass.
pub const EDGE_MASS_FLOOR: f64 = 1e-9;

/// Implicit `B = A - d dᵀ/(2|E|)`; never materialized.
#[derive(Debug, Clone, Copy)]
pub struct ModularityMatrixB<'g> {
    graph: &'g Graph,
    inv_two_edges: f64,
}

pub fn build_b(g: &Graph) -> Result<ModularityMatrixB<'_>> {
    if g.n_edges() == 0 {
        return Err(Error::InvalidData("modularity matrix needs at least one edge".into()));
    }
    Ok(ModularityMatrixB {
        graph: g,
        inv_two_edges: 0.5 / g.n_edges() as f64,
    })
}

impl<'g> ModularityMatrixB<'g> {
    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    /// `B V` in `O(|E| K + N K)`.
    pub fn apply(&self, v: &DenseMatrix) -> Result<DenseMatrix> {
        let g = self.graph;
        let mut out = g.adjacency().spmm(v)?;
        let k = v.cols();
        let mut d_dot = vec![0.0; k];
        for (i, &d) in g.degree().iter().enumerate() {
            for (acc, x) in d_dot.iter_mut().zip(v.row(i)) {
                *acc += d as f64 * x;
            }
        }
        for (i, &d) in g.degree().iter().enumerate() {
            let d = d as f64;
            for (o, &dd) in out.row_mut(i).iter_mut().zip(&d_dot) {
                *o -= d * dd * self.inv_two_edges;
            }
        }
        Ok(out)
    }

    /// Dense `N x N` form, for small reference computations only.
    pub fn to_dense(&self) -> DenseMatrix {
        let g = self.graph;
        let deg = g.degree();
        let mut m = DenseMatrix::from_fn(g.n_nodes(), g.n_nodes(), |i, j| {
            -((deg[i] * deg[j]) as f64) * self.inv_two_edges
        });
        for (i, j) in g.edges() {
            m[(i, j)] += 1.0;
            m[(j, i)] += 1.0;
        }
        m
    }
}

/// Diagonal of `S`: `|E| / max(L_s, ε)` where `L_s` is the
/// affiliation-weighted edge mass incident to community `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalScaling {
    diag: Vec<f64>,
    edge_mass: Vec<f64>,
}

impl LocalScaling {
    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn edge_mass(&self) -> &[f64] {
        &self.edge_mass
    }

    /// Communities whose edge mass fell below the floor.
    pub fn floored(&self) -> Vec<usize> {
        (0..self.edge_mass.len())
            .filter(|&s| self.edge_mass[s] < EDGE_MASS_FLOOR)
            .collect()
    }
}

/// `L_s = Σ_{(i,j)∈E} max(F̂_is, F̂_js)` with `F̂` the row-max-normalized `F`.
pub fn build_s(f: &DenseMatrix, g: &Graph) -> Result<LocalScaling> {
    if f.rows() != g.n_nodes() {
        return Err(Error::shape("affiliation rows must match node count"));
    }
    let k = f.cols();
    let row_scale: Vec<f64> = (0..f.rows())
        .map(|i| {
            let m = f.row(i).iter().copied().fold(0.0, f64::max);
            if m > 0.0 {
                1.0 / m
            } else {
                1.0
            }
        })
        .collect();
    let mut edge_mass = vec![0.0; k];
    for (i, j) in g.edges() {
        let (ri, rj) = (f.row(i), f.row(j));
        for s in 0..k {
            edge_mass[s] += (ri[s] * row_scale[i]).max(rj[s] * row_scale[j]);
        }
    }
    let e = g.n_edges() as f64;
    let diag = edge_mass.iter().map(|&l| e / l.max(EDGE_MASS_FLOOR)).collect();
    Ok(LocalScaling { diag, edge_mass })
}

/// `K x K` local-modularity matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LqMatrix(DenseMatrix);

impl LqMatrix {
    pub fn as_dense(&self) -> &DenseMatrix {
        &self.0
    }

    /// Trace of the matrix: the scalar local modularity.
    pub fn trace(&self) -> f64 {
        (0..self.0.rows()).map(|s| self.0[(s, s)]).sum()
    }
}

fn prefactor(g: &Graph) -> f64 {
    1.0 / (4.0 * g.n_edges() as f64)
}

/// `S Fᵀ B F / (4|E|)` for a given scaling, also returning `B F`.
fn lq_parts(
    f: &DenseMatrix,
    b: &ModularityMatrixB<'_>,
    s: &LocalScaling,
) -> Result<(LqMatrix, DenseMatrix)> {
    if s.diag.len() != f.cols() {
        return Err(Error::shape("scaling length must equal community count"));
    }
    let bf = b.apply(f)?;
    let mut m = DenseMatrix::gemm(f, true, &bf, false)?;
    let c = prefactor(b.graph());
    for r in 0..m.rows() {
        let scale = s.diag[r] * c;
        m.row_mut(r).iter_mut().for_each(|v| *v *= scale);
    }
    Ok((LqMatrix(m), bf))
}

pub fn lq_matrix_with_scaling(
    f: &DenseMatrix,
    b: &ModularityMatrixB<'_>,
    s: &LocalScaling,
) -> Result<LqMatrix> {
    lq_parts(f, b, s).map(|(m, _)| m)
}

pub fn lq_matrix(f: &DenseMatrix, g: &Graph) -> Result<LqMatrix> {
    let b = build_b(g)?;
    let s = build_s(f, g)?;
    lq_matrix_with_scaling(f, &b, &s)
}

/// Index of the community each community is contrasted with.
pub fn successor(s: usize, k: usize) -> usize {
    (s + 1) % k
}

/// Loss value and `dL/dF` with `S` held fixed.
pub fn lq_loss_with_scaling(
    f: &DenseMatrix,
    b: &ModularityMatrixB<'_>,
    s: &LocalScaling,
) -> Result<(f64, DenseMatrix)> {
    let k = f.cols();
    if k < 2 {
        return Err(Error::invalid("local-modularity loss needs at least 2 communities"));
    }
    let (lq, bf) = lq_parts(f, b, s)?;
    let lq = lq.0;
    let norm = 1.0 / (2.0 * k as f64);
    let mut value = 0.0;
    // dL/dLQ, nonzero only on the diagonal and the successor entries
    let mut g_lq = DenseMatrix::zeros(k, k);
    for r in 0..k {
        let diag = lq[(r, r)];
        let t = successor(r, k);
        let off = lq[(r, t)];
        value -= norm * (log_sigmoid(diag) + log_sigmoid(-off));
        g_lq[(r, r)] -= norm * (1.0 - sigmoid(diag));
        g_lq[(r, t)] += norm * sigmoid(off);
    }
    // LQ = c·diag(S)·M with M = Fᵀ B F; dL/dM = c·diag(S)·dL/dLQ
    let c = prefactor(b.graph());
    for r in 0..k {
        let scale = c * s.diag[r];
        g_lq.row_mut(r).iter_mut().for_each(|v| *v *= scale);
    }
    // dL/dF = B F (H + Hᵀ) since B is symmetric
    let sym = g_lq.add(&g_lq.transpose())?;
    let grad = bf.matmul(&sym)?;
    Ok((value, grad))
}

/// Loss value and gradient, computing `S` from `f` and freezing it.
pub fn lq_loss(f: &DenseMatrix, g: &Graph) -> Result<(f64, DenseMatrix)> {
    let b = build_b(g)?;
    let s = build_s(f, g)?;
    lq_loss_with_scaling(f, &b, &s)
}
