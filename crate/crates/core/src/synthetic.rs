//! Bernoulli-Poisson graph sampling and planted-community fixtures.

use crate::cover::Cover;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::kernel::{DenseMatrix, RngStream};
use crate::model::AffiliationMatrix;

/// Samples a graph in which each pair `i < j` is an edge with probability
/// `1 - (1 - background) exp(-F_i·F_j)`.
///
/// The affiliation part is drawn community by community (an edge appears if
/// any shared community fires, which has the same law), so the cost is
/// `Σ_c |members_c|²` plus the number of background edges rather than `N²K`.
pub fn sample_bp_graph(f: &DenseMatrix, background: f64, rng: &mut RngStream) -> Result<Graph> {
    if f.as_slice().iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::invalid("affiliations must be finite and nonnegative"));
    }
    if !(0.0..1.0).contains(&background) {
        return Err(Error::invalid(format!("background rate {background} not in [0,1)")));
    }
    let n = f.rows();
    let mut edges = Vec::new();
    for c in 0..f.cols() {
        let members: Vec<(usize, f64)> = (0..n)
            .map(|i| (i, f[(i, c)]))
            .filter(|&(_, v)| v > 0.0)
            .collect();
        for (a, &(i, fi)) in members.iter().enumerate() {
            for &(j, fj) in &members[a + 1..] {
                if rng.uniform() < -(-fi * fj).exp_m1() {
                    edges.push((i, j));
                }
            }
        }
    }
    if background > 0.0 && n > 1 {
        sample_background(n, background, rng, &mut edges);
    }
    Graph::from_edges(n, edges)
}

/// Uniform noise edges over all pairs by geometric skipping.
fn sample_background(n: usize, p: f64, rng: &mut RngStream, edges: &mut Vec<(usize, usize)>) {
    let total = (n * (n - 1) / 2) as u64;
    let log_q = (-p).ln_1p();
    let mut pos: u64 = 0;
    let (mut row, mut row_start) = (0usize, 0u64);
    loop {
        // 1 - uniform() lies in (0, 1], so the log is finite
        let skip = ((1.0 - rng.uniform()).ln() / log_q).floor();
        if skip >= (total - pos) as f64 {
            break;
        }
        pos += skip as u64;
        // advance to the row containing linear pair index `pos`
        while pos >= row_start + (n - 1 - row) as u64 {
            row_start += (n - 1 - row) as u64;
            row += 1;
        }
        let col = row + 1 + (pos - row_start) as usize;
        edges.push((row, col));
        pos += 1;
        if pos >= total {
            break;
        }
    }
}

/// Ground-truth instance for recovery experiments.
#[derive(Debug, Clone)]
pub struct PlantedInstance {
    pub f_true: AffiliationMatrix,
    pub cover_true: Cover,
    pub graph: Graph,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantedConfig {
    pub n: usize,
    pub k: usize,
    /// Share of nodes given a second community.
    pub overlap: f64,
    /// Affiliation strength of every membership.
    pub strength: f64,
    /// Uniform noise-edge rate.
    pub background: f64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        Self {
            n: 200,
            k: 4,
            overlap: 0.1,
            strength: 1.5,
            background: 0.01,
        }
    }
}

/// Nodes are split into `k` contiguous, even groups; `⌊overlap·n⌋` randomly
/// chosen nodes also join a second, randomly chosen group.
pub fn make_planted(cfg: &PlantedConfig, seed: u64) -> Result<PlantedInstance> {
    let PlantedConfig { n, k, overlap, strength, background } = *cfg;
    if k == 0 || n < k {
        return Err(Error::invalid(format!("need n >= k >= 1, got n={n} k={k}")));
    }
    if !(0.0..1.0).contains(&overlap) {
        return Err(Error::invalid(format!("overlap fraction {overlap} not in [0,1)")));
    }
    if !(strength > 0.0 && strength.is_finite()) {
        return Err(Error::invalid("strength must be positive"));
    }
    if k == 1 && overlap > 0.0 {
        return Err(Error::invalid("overlap needs at least two communities"));
    }
    let root = RngStream::new(seed);
    let mut assign_rng = root.fork(1);
    let mut graph_rng = root.fork(2);

    let mut memberships: Vec<Vec<usize>> = (0..n).map(|i| vec![i * k / n]).collect();
    let n_overlap = (overlap * n as f64).floor() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    assign_rng.shuffle(&mut order);
    for &i in &order[..n_overlap] {
        let primary = memberships[i][0];
        let second = (primary + 1 + assign_rng.below(k - 1)) % k;
        memberships[i].push(second);
    }

    let mut f = DenseMatrix::zeros(n, k);
    let mut comms = vec![Vec::new(); k];
    for (i, m) in memberships.iter().enumerate() {
        for &c in m {
            f[(i, c)] = strength;
            comms[c].push(i);
        }
    }
    let graph = sample_bp_graph(&f, background, &mut graph_rng)?;
    Ok(PlantedInstance {
        f_true: AffiliationMatrix::new(f)?,
        cover_true: Cover::new(n, comms)?,
        graph,
        seed,
    })
}

/// One-hot community indicators as node attributes (`N x K`).
pub fn indicator_attributes(cover: &Cover) -> DenseMatrix {
    let mut x = DenseMatrix::zeros(cover.n_nodes(), cover.len());
    for (c, members) in cover.communities().iter().enumerate() {
        for &i in members {
            x[(i, c)] = 1.0;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_affiliation_gives_empty_graph() {
        let f = DenseMatrix::zeros(30, 3);
        let g = sample_bp_graph(&f, 0.0, &mut RngStream::new(1)).unwrap();
        assert_eq!(g.n_edges(), 0);
    }

    #[test]
    fn within_community_density_matches_model() {
        // 150 nodes in one community: 11175 pairs at p = 1 - e^{-2.25}
        let n = 150;
        let c = 1.5;
        let f = DenseMatrix::from_vec(n, 1, vec![c; n]).unwrap();
        let g = sample_bp_graph(&f, 0.0, &mut RngStream::new(2)).unwrap();
        let pairs = (n * (n - 1) / 2) as f64;
        let p = 1.0 - (-c * c).exp();
        assert!((p - 0.8946).abs() < 1e-4);
        let sigma = (pairs * p * (1.0 - p)).sqrt();
        assert!((g.n_edges() as f64 - pairs * p).abs() < 3.0 * sigma);
    }

    #[test]
    fn background_density_matches_rate() {
        let n = 400;
        let f = DenseMatrix::zeros(n, 1);
        let eta = 0.02;
        let g = sample_bp_graph(&f, eta, &mut RngStream::new(3)).unwrap();
        let pairs = (n * (n - 1) / 2) as f64;
        let sigma = (pairs * eta * (1.0 - eta)).sqrt();
        assert!((g.n_edges() as f64 - pairs * eta).abs() < 3.0 * sigma);
    }

    #[test]
    fn per_pair_frequencies_converge() {
        // three nodes, two communities: pair (0,1) shares both, (1,2) one, (0,2) none
        let f = DenseMatrix::from_rows(&[vec![0.8, 0.5], vec![0.6, 0.7], vec![0.0, 0.9]]).unwrap();
        let eta = 0.05;
        let trials = 20_000;
        let mut rng = RngStream::new(4);
        let mut counts = [0usize; 3];
        for _ in 0..trials {
            let g = sample_bp_graph(&f, eta, &mut rng).unwrap();
            for (slot, (i, j)) in [(0, 1), (1, 2), (0, 2)].into_iter().enumerate() {
                counts[slot] += usize::from(g.has_edge(i, j));
            }
        }
        for (slot, (i, j)) in [(0, 1), (1, 2), (0, 2)].into_iter().enumerate() {
            let dot: f64 = (0..2).map(|c| f[(i, c)] * f[(j, c)]).sum();
            let p = 1.0 - (1.0 - eta) * (-dot).exp();
            let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
            assert!((counts[slot] as f64 - trials as f64 * p).abs() < 3.0 * sigma, "pair {slot}");
        }
    }

    #[test]
    fn sampling_is_deterministic_and_valid() {
        let cfg = PlantedConfig::default();
        let a = make_planted(&cfg, 9).unwrap();
        let b = make_planted(&cfg, 9).unwrap();
        assert_eq!(a.graph, b.graph);
        assert!(a.graph.adjacency().is_symmetric(0.0));
        assert!((0..cfg.n).all(|i| !a.graph.has_edge(i, i)));
    }

    #[test]
    fn planted_disjoint_when_no_overlap() {
        let cfg = PlantedConfig { overlap: 0.0, ..Default::default() };
        let inst = make_planted(&cfg, 1).unwrap();
        assert!(inst.cover_true.memberships_per_node().iter().all(|&m| m == 1));
        assert!(inst.cover_true.communities().iter().all(|c| c.len() == 50));
    }

    #[test]
    fn planted_overlap_count_is_exact() {
        let inst = make_planted(&PlantedConfig::default(), 2).unwrap();
        let twice = inst.cover_true.memberships_per_node().iter().filter(|&&m| m == 2).count();
        assert_eq!(twice, 20);
        assert!(inst.cover_true.memberships_per_node().iter().all(|&m| m == 1 || m == 2));
    }

    #[test]
    fn cover_matches_positive_affiliations() {
        let inst = make_planted(&PlantedConfig::default(), 3).unwrap();
        let f = inst.f_true.as_dense();
        for (c, members) in inst.cover_true.communities().iter().enumerate() {
            for i in 0..f.rows() {
                assert_eq!(f[(i, c)] > 0.0, members.binary_search(&i).is_ok());
            }
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let base = PlantedConfig::default();
        for cfg in [
            PlantedConfig { n: 3, k: 4, ..base },
            PlantedConfig { k: 0, ..base },
            PlantedConfig { overlap: 1.0, ..base },
            PlantedConfig { strength: -1.0, ..base },
            PlantedConfig { background: 1.0, ..base },
        ] {
            assert!(make_planted(&cfg, 0).is_err(), "{cfg:?}");
        }
    }
}
