//! Undirected graphs, node features, and the adjacency transforms fed to
//! the encoder.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{CsrMatrix, DenseMatrix};

/// Immutable simple undirected graph stored as a symmetric binary CSR
/// adjacency without self-loops.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    adjacency: CsrMatrix,
    degree: Vec<usize>,
    n_edges: usize,
}

/// What was discarded while building a [`Graph`] from raw pairs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildReport {
    pub self_loops: usize,
    pub duplicates: usize,
}

impl Graph {
    /// Builds a graph on `n` nodes. Reversed and repeated pairs are merged,
    /// self-loops dropped; both are counted in the returned report.
    pub fn from_edge_list(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<(Self, BuildReport)> {
        let mut report = BuildReport::default();
        let mut neighbors: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidData(format!(
                    "edge ({u},{v}) references a node >= {n}"
                )));
            }
            if u == v {
                report.self_loops += 1;
                continue;
            }
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        let mut indptr = Vec::with_capacity(n + 1);
        let mut indices = Vec::new();
        indptr.push(0);
        let mut raw_pairs = 0;
        for mut nb in neighbors {
            raw_pairs += nb.len();
            nb.sort_unstable();
            nb.dedup();
            indices.extend_from_slice(&nb);
            indptr.push(indices.len());
        }
        report.duplicates = (raw_pairs - indices.len()) / 2;
        let degree: Vec<usize> = indptr.windows(2).map(|w| w[1] - w[0]).collect();
        let n_edges = indices.len() / 2;
        let values = vec![1.0; indices.len()];
        let adjacency = CsrMatrix::from_parts(n, n, indptr, indices, values)?;
        Ok((
            Self {
                adjacency,
                degree,
                n_edges,
            },
            report,
        ))
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::from_edge_list(n, edges).map(|(g, _)| g)
    }

    pub fn empty(n: usize) -> Self {
        Self::from_edges(n, std::iter::empty()).expect("empty graph is valid")
    }

    pub fn n_nodes(&self) -> usize {
        self.degree.len()
    }

    /// Undirected edge count; each edge counted once.
    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    /// Number of unordered node pairs that are not edges.
    pub fn n_non_edges(&self) -> usize {
        let n = self.n_nodes();
        n * n.saturating_sub(1) / 2 - self.n_edges
    }

    pub fn adjacency(&self) -> &CsrMatrix {
        &self.adjacency
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        self.adjacency.row_indices(i)
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors(i).binary_search(&j).is_ok()
    }

    pub fn degree(&self) -> &[usize] {
        &self.degree
    }

    /// The `k`-th stored adjacency entry as a node pair, `k < 2|E|`.
    /// Drawing `k` uniformly gives a uniform random edge.
    pub fn entry_at(&self, k: usize) -> (usize, usize) {
        let indptr = self.adjacency.indptr();
        let row = indptr.partition_point(|&p| p <= k) - 1;
        (row, self.neighbors(row)[k - indptr[row]])
    }

    /// Edges as `(i, j)` with `i < j`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n_nodes()).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .copied()
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }
}

/// Per-node neighbor counts.
pub fn degree_vector(g: &Graph) -> Vec<usize> {
    g.degree().to_vec()
}

/// Which transform produced a [`NormalizedAdjacency`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdjacencyTransform {
    /// `I + D^{-1/2} A D^{-1/2}`
    SymmetricPlusIdentity,
}

/// `I + D^{-1/2} A D^{-1/2}` in CSR form.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedAdjacency {
    matrix: CsrMatrix,
    transform: AdjacencyTransform,
}

impl NormalizedAdjacency {
    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn transform(&self) -> AdjacencyTransform {
        self.transform
    }
}

/// Isolated nodes keep only the unit diagonal.
pub fn normalize_adjacency(g: &Graph) -> NormalizedAdjacency {
    let inv_sqrt: Vec<f64> = g
        .degree()
        .iter()
        .map(|&d| if d > 0 { 1.0 / (d as f64).sqrt() } else { 0.0 })
        .collect();
    NormalizedAdjacency {
        matrix: with_unit_diagonal(g, |i, j| inv_sqrt[i] * inv_sqrt[j]),
        transform: AdjacencyTransform::SymmetricPlusIdentity,
    }
}

/// `A + I`.
pub fn augment_adjacency(g: &Graph) -> CsrMatrix {
    with_unit_diagonal(g, |_, _| 1.0)
}

/// `D̃^{-1/2} (A + I) D̃^{-1/2}` with `D̃ = D + I`; every row of a
/// `k`-regular graph sums to one.
pub fn renormalize_augmented(g: &Graph) -> CsrMatrix {
    let inv_sqrt: Vec<f64> = g
        .degree()
        .iter()
        .map(|&d| 1.0 / (d as f64 + 1.0).sqrt())
        .collect();
    with_diagonal(g, |i| inv_sqrt[i] * inv_sqrt[i], |i, j| inv_sqrt[i] * inv_sqrt[j])
}

fn with_unit_diagonal(g: &Graph, weight: impl Fn(usize, usize) -> f64) -> CsrMatrix {
    with_diagonal(g, |_| 1.0, weight)
}

fn with_diagonal(
    g: &Graph,
    diag: impl Fn(usize) -> f64,
    weight: impl Fn(usize, usize) -> f64,
) -> CsrMatrix {
    let n = g.n_nodes();
    let mut indptr = Vec::with_capacity(n + 1);
    let mut indices = Vec::with_capacity(g.adjacency().nnz() + n);
    let mut values = Vec::with_capacity(g.adjacency().nnz() + n);
    indptr.push(0);
    for i in 0..n {
        let nb = g.neighbors(i);
        let split = nb.partition_point(|&j| j < i);
        for &j in &nb[..split] {
            indices.push(j);
            values.push(weight(i, j));
        }
        indices.push(i);
        values.push(diag(i));
        for &j in &nb[split..] {
            indices.push(j);
            values.push(weight(i, j));
        }
        indptr.push(indices.len());
    }
    CsrMatrix::from_parts(n, n, indptr, indices, values).expect("sorted by construction")
}

/// Dense `N x d` node-attribute matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix(DenseMatrix);

impl FeatureMatrix {
    pub fn new(data: DenseMatrix) -> Result<Self> {
        data.ensure_finite("feature matrix")?;
        Ok(Self(data))
    }

    pub fn n_rows(&self) -> usize {
        self.0.rows()
    }

    pub fn dim(&self) -> usize {
        self.0.cols()
    }

    pub fn as_dense(&self) -> &DenseMatrix {
        &self.0
    }

    pub fn into_dense(self) -> DenseMatrix {
        self.0
    }
}

/// Divides each nonzero row by its Euclidean norm; zero rows are untouched.
pub fn row_l2_normalize(x: &FeatureMatrix) -> FeatureMatrix {
    let mut out = x.0.clone();
    for i in 0..out.rows() {
        let row = out.row_mut(i);
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            row.iter_mut().for_each(|v| *v /= norm);
        }
    }
    FeatureMatrix(out)
}

/// Source of the encoder's input features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputVariant {
    /// Node attributes only.
    X,
    /// Adjacency rows as features (`d = N`).
    G,
    /// Adjacency rows followed by the attribute columns.
    U,
}

/// Assembles the (not yet normalized) feature matrix for a variant.
pub fn build_features(
    g: &Graph,
    attrs: Option<&FeatureMatrix>,
    variant: InputVariant,
) -> Result<FeatureMatrix> {
    let need_attrs = matches!(variant, InputVariant::X | InputVariant::U);
    let attrs = match (need_attrs, attrs) {
        (true, None) => {
            return Err(Error::invalid(format!(
                "input variant {variant:?} needs an attribute matrix"
            )))
        }
        (_, Some(x)) if x.n_rows() != g.n_nodes() => {
            return Err(Error::shape(format!(
                "{} attribute rows for {} nodes",
                x.n_rows(),
                g.n_nodes()
            )))
        }
        (_, a) => a,
    };
    match variant {
        InputVariant::X => Ok(attrs.unwrap().clone()),
        InputVariant::G => FeatureMatrix::new(g.adjacency().to_dense()),
        InputVariant::U => FeatureMatrix::new(g.adjacency().to_dense().hconcat(attrs.unwrap().as_dense())?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::RngStream;

    fn triangle() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    fn star3() -> Graph {
        Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn degrees() {
        assert_eq!(degree_vector(&Graph::from_edges(2, [(0, 1)]).unwrap()), vec![1, 1]);
        assert_eq!(degree_vector(&triangle()), vec![2, 2, 2]);
        assert_eq!(triangle().n_edges(), 3);
    }

    #[test]
    fn duplicates_and_self_loops_are_reported() {
        let (g, report) = Graph::from_edge_list(2, [(0, 1), (1, 0), (1, 1)]).unwrap();
        assert_eq!(g.n_edges(), 1);
        assert_eq!(report, BuildReport { self_loops: 1, duplicates: 1 });
        assert!(g.adjacency().is_symmetric(0.0));
    }

    #[test]
    fn out_of_range_edge_is_rejected() {
        assert!(Graph::from_edges(2, [(0, 2)]).is_err());
    }

    #[test]
    fn normalized_single_edge_is_all_ones() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let a = normalize_adjacency(&g).matrix().to_dense();
        assert_eq!(a.as_slice(), &[1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn normalized_star_and_triangle() {
        let a = normalize_adjacency(&star3()).matrix().to_dense();
        for leaf in 1..4 {
            assert!((a[(0, leaf)] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
            assert!((a[(0, leaf)] - 0.5774).abs() < 1e-4);
            assert_eq!(a[(leaf, leaf)], 1.0);
        }
        assert_eq!(a[(1, 2)], 0.0);
        let t = normalize_adjacency(&triangle()).matrix().to_dense();
        for i in 0..3 {
            for j in 0..3 {
                assert!((t[(i, j)] - if i == j { 1.0 } else { 0.5 }).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn isolated_nodes_get_identity_rows() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let a = normalize_adjacency(&g);
        assert_eq!(a.matrix().row_indices(2), &[2]);
        assert_eq!(a.matrix().row_values(2), &[1.0]);
    }

    #[test]
    fn regular_graph_rows_sum_to_one_plus_one() {
        for n in [3, 5, 10] {
            let a = normalize_adjacency(&cycle(n));
            for i in 0..n {
                let off: f64 = a.matrix().row(i).filter(|&(j, _)| j != i).map(|(_, v)| v).sum();
                assert!((off - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn normalized_adjacency_is_symmetric_on_random_graphs() {
        let mut rng = RngStream::new(5);
        for _ in 0..20 {
            let n = 15;
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.bernoulli(0.2) {
                        edges.push((i, j));
                    }
                }
            }
            let g = Graph::from_edges(n, edges).unwrap();
            assert!(normalize_adjacency(&g).matrix().is_symmetric(1e-12));
        }
    }

    #[test]
    fn renormalized_augmented_rows() {
        // star center: degree 3, leaves: degree 1
        let a = renormalize_augmented(&star3()).to_dense();
        assert!((a[(0, 0)] - 0.25).abs() < 1e-15);
        assert!((a[(0, 1)] - 1.0 / 8f64.sqrt()).abs() < 1e-15);
        assert!((a[(1, 1)] - 0.5).abs() < 1e-15);
        for n in [3, 6] {
            let c = renormalize_augmented(&cycle(n));
            for i in 0..n {
                let sum: f64 = c.row(i).map(|(_, v)| v).sum();
                assert!((sum - 1.0).abs() < 1e-14);
            }
        }
        let iso = renormalize_augmented(&Graph::empty(2));
        assert_eq!(iso.to_dense().as_slice(), &[1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn augmented_adjacency() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        assert_eq!(augment_adjacency(&g).to_dense().as_slice(), &[1.0; 4]);
        assert_eq!(augment_adjacency(&Graph::empty(3)).to_dense(), DenseMatrix::identity(3));
        assert_eq!(augment_adjacency(&triangle()).to_dense().as_slice(), &[1.0; 9]);
    }

    #[test]
    fn l2_normalization() {
        let x = FeatureMatrix::new(DenseMatrix::from_rows(&[vec![3.0, 4.0], vec![0.0, 0.0]]).unwrap())
            .unwrap();
        let y = row_l2_normalize(&x);
        assert!((y.as_dense()[(0, 0)] - 0.6).abs() < 1e-15);
        assert!((y.as_dense()[(0, 1)] - 0.8).abs() < 1e-15);
        assert_eq!(y.as_dense().row(1), &[0.0, 0.0]);
    }

    #[test]
    fn l2_normalized_rows_have_unit_or_zero_norm() {
        let mut rng = RngStream::new(8);
        let mut m = DenseMatrix::from_fn(5, 4, |_, _| rng.uniform_range(-3.0, 3.0));
        m.row_mut(2).fill(0.0);
        let y = row_l2_normalize(&FeatureMatrix::new(m).unwrap());
        for i in 0..5 {
            let norm = y.as_dense().row(i).iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(norm.abs() < 1e-12 || (norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn non_finite_features_are_rejected() {
        let m = DenseMatrix::from_rows(&[vec![f64::NAN]]).unwrap();
        assert!(matches!(FeatureMatrix::new(m), Err(Error::NonFinite(_))));
    }

    #[test]
    fn input_variants() {
        let g = triangle();
        let x = FeatureMatrix::new(DenseMatrix::from_fn(3, 2, |i, j| (i + j) as f64)).unwrap();
        assert_eq!(build_features(&g, Some(&x), InputVariant::X).unwrap(), x);
        let gf = build_features(&g, None, InputVariant::G).unwrap();
        assert_eq!(gf.dim(), 3);
        assert_eq!(gf.as_dense().row(0), &[0.0, 1.0, 1.0]);
        let uf = build_features(&g, Some(&x), InputVariant::U).unwrap();
        assert_eq!(uf.dim(), 5);
        assert_eq!(uf.as_dense().row(2), &[1.0, 1.0, 0.0, 2.0, 3.0]);
        assert!(build_features(&g, None, InputVariant::X).is_err());
    }
}
