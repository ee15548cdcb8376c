use crate::cover::Cover;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Newman modularity of a (possibly overlapping) cover:
/// `Q = 1/(2m) Σ_s Σ_ij (A_ij - d_i d_j / 2m) C_is C_js`, `m` = undirected
/// edge count. Diagnostic only.
pub fn modularity_q(cover: &Cover, g: &Graph) -> Result<f64> {
    if cover.n_nodes() != g.n_nodes() {
        return Err(Error::shape("cover and graph disagree on node count"));
    }
    if g.n_edges() == 0 {
        return Err(Error::InvalidData("modularity is undefined without edges".into()));
    }
    let two_m = 2.0 * g.n_edges() as f64;
    let deg = g.degree();
    let mut q = 0.0;
    for k in 0..cover.len() {
        let member = cover.indicator(k);
        let mut internal = 0.0;
        let mut volume = 0.0;
        for &i in cover.community(k) {
            volume += deg[i] as f64;
            internal += g.neighbors(i).iter().filter(|&&j| member[j]).count() as f64;
        }
        q += internal - volume * volume / two_m;
    }
    Ok(q / two_m)
}
