//! Agreement between a predicted cover and a ground-truth cover.
//!
//! [`onmi`] is the overlapping NMI in its max-normalized form: every
//! community is a binary variable over nodes, each community of one cover
//! is matched to its least-uncertain admissible counterpart in the other,
//! and the mutual information is divided by the larger total entropy.

pub use crate::cover::Cover;
use crate::error::{Error, Result};

fn h(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

fn binary_entropy(size: usize, n: usize) -> f64 {
    let p = size as f64 / n as f64;
    h(p) + h((n - size) as f64 / n as f64)
}

/// `|X_k ∩ Y_l|` for every community pair.
fn intersections(x: &Cover, y: &Cover) -> Vec<Vec<usize>> {
    let mut y_of = vec![Vec::new(); y.n_nodes()];
    for (l, c) in y.communities().iter().enumerate() {
        for &i in c {
            y_of[i].push(l);
        }
    }
    let mut counts = vec![vec![0; y.len()]; x.len()];
    for (k, c) in x.communities().iter().enumerate() {
        for &i in c {
            for &l in &y_of[i] {
                counts[k][l] += 1;
            }
        }
    }
    counts
}

/// `Σ_k min_l H(X_k | Y_l)` over admissible `l`, falling back to `H(X_k)`.
fn conditional_entropy(x: &Cover, y: &Cover, inter: &[Vec<usize>]) -> f64 {
    let n = x.n_nodes();
    let nf = n as f64;
    let mut total = 0.0;
    for (k, xk) in x.communities().iter().enumerate() {
        let hx = binary_entropy(xk.len(), n);
        let mut best = hx;
        for (l, yl) in y.communities().iter().enumerate() {
            let both = inter[k][l];
            let only_x = xk.len() - both;
            let only_y = yl.len() - both;
            let neither = n - both - only_x - only_y;
            let (h11, h10, h01, h00) = (
                h(both as f64 / nf),
                h(only_x as f64 / nf),
                h(only_y as f64 / nf),
                h(neither as f64 / nf),
            );
            if h11 + h00 <= h01 + h10 {
                continue;
            }
            let cond = (h11 + h10 + h01 + h00) - binary_entropy(yl.len(), n);
            best = best.min(cond.max(0.0));
        }
        total += best;
    }
    total
}

/// Overlapping NMI in `[0, 1]`; 0 when neither cover carries information.
pub fn onmi(truth: &Cover, pred: &Cover) -> Result<f64> {
    if truth.n_nodes() != pred.n_nodes() {
        return Err(Error::shape(format!(
            "covers over {} and {} nodes",
            truth.n_nodes(),
            pred.n_nodes()
        )));
    }
    let n = truth.n_nodes();
    if n == 0 {
        return Ok(0.0);
    }
    let hx: f64 = truth.communities().iter().map(|c| binary_entropy(c.len(), n)).sum();
    let hy: f64 = pred.communities().iter().map(|c| binary_entropy(c.len(), n)).sum();
    let denom = hx.max(hy);
    if denom <= 0.0 {
        return Ok(0.0);
    }
    let inter = intersections(truth, pred);
    let hx_y = conditional_entropy(truth, pred, &inter);
    let inter_t = transpose(&inter, pred.len());
    let hy_x = conditional_entropy(pred, truth, &inter_t);
    let mi = 0.5 * ((hx - hx_y) + (hy - hy_x));
    Ok((mi / denom).clamp(0.0, 1.0))
}

fn transpose(m: &[Vec<usize>], cols: usize) -> Vec<Vec<usize>> {
    (0..cols).map(|c| m.iter().map(|row| row[c]).collect()).collect()
}

/// Mean over truth communities of the fraction covered by the predicted
/// community with the largest overlap (lowest index on ties). Empty truth
/// communities are skipped.
pub fn recall_best_match(truth: &Cover, pred: &Cover) -> Result<f64> {
    if truth.n_nodes() != pred.n_nodes() {
        return Err(Error::shape("covers disagree on node count"));
    }
    let scored: Vec<usize> = (0..truth.len())
        .filter(|&k| !truth.community(k).is_empty())
        .collect();
    if scored.is_empty() {
        return Err(Error::InvalidData("truth cover has no nonempty community".into()));
    }
    let inter = intersections(truth, pred);
    let total: f64 = scored
        .iter()
        .map(|&k| {
            let best = inter[k].iter().copied().max().unwrap_or(0);
            best as f64 / truth.community(k).len() as f64
        })
        .sum();
    Ok(total / scored.len() as f64)
}

/// Index of the predicted community best matching each truth community,
/// `None` when nothing overlaps.
pub fn best_matches(truth: &Cover, pred: &Cover) -> Vec<Option<usize>> {
    intersections(truth, pred)
        .iter()
        .map(|row| {
            let mut best: Option<(usize, usize)> = None;
            for (l, &c) in row.iter().enumerate() {
                if c > 0 && best.is_none_or(|(_, b)| c > b) {
                    best = Some((l, c));
                }
            }
            best.map(|(l, _)| l)
        })
        .collect()
}
