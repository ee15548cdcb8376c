use serde::{Deserialize, Serialize};

use crate::cover::Cover;
use crate::kernel::DenseMatrix;

/// How affiliations are compared against the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdMode {
    /// Each column divided by its maximum first; zero columns untouched.
    #[default]
    ColumnMax,
    /// Raw activations.
    Raw,
}

pub fn rescale_columns(f: &DenseMatrix) -> DenseMatrix {
    let mut max = vec![0.0f64; f.cols()];
    for i in 0..f.rows() {
        for (m, &v) in max.iter_mut().zip(f.row(i)) {
            *m = m.max(v);
        }
    }
    let mut out = f.clone();
    for i in 0..out.rows() {
        for (v, &m) in out.row_mut(i).iter_mut().zip(&max) {
            if m > 0.0 {
                *v /= m;
            }
        }
    }
    out
}

/// Node `i` joins community `j` iff its (rescaled) affiliation exceeds `p`.
pub fn threshold_assign(f: &DenseMatrix, p: f64, mode: ThresholdMode) -> Cover {
    let scaled;
    let f = match mode {
        ThresholdMode::ColumnMax => {
            scaled = rescale_columns(f);
            &scaled
        }
        ThresholdMode::Raw => f,
    };
    let mut comms = vec![Vec::new(); f.cols()];
    for i in 0..f.rows() {
        for (j, &v) in f.row(i).iter().enumerate() {
            if v > p {
                comms[j].push(i);
            }
        }
    }
    Cover::new(f.rows(), comms).expect("node ids in range")
}

pub fn threshold_sweep(f: &DenseMatrix, ps: &[f64], mode: ThresholdMode) -> Vec<(f64, Cover)> {
    ps.iter().map(|&p| (p, threshold_assign(f, p, mode))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::RngStream;

    #[test]
    fn identity_indicator() {
        let c = threshold_assign(&DenseMatrix::identity(3), 0.5, ThresholdMode::ColumnMax);
        assert_eq!(c.communities(), &[vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn overlapping_row() {
        let f = DenseMatrix::from_rows(&[vec![0.9, 0.7, 0.1], vec![1.0, 1.0, 1.0]]).unwrap();
        let c = threshold_assign(&f, 0.5, ThresholdMode::Raw);
        assert_eq!(c.memberships_per_node()[0], 2);
        assert!(c.community(0).contains(&0) && c.community(1).contains(&0));
        assert!(!c.community(2).contains(&0));
    }

    #[test]
    fn threshold_one_is_empty() {
        let mut rng = RngStream::new(1);
        let f = DenseMatrix::from_fn(10, 3, |_, _| rng.uniform_range(0.0, 5.0));
        let c = threshold_assign(&f, 1.0, ThresholdMode::ColumnMax);
        assert!(c.communities().iter().all(Vec::is_empty));
    }

    #[test]
    fn column_max_rescaling() {
        let f = DenseMatrix::from_rows(&[vec![4.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let r = rescale_columns(&f);
        assert_eq!(r.as_slice(), &[1.0, 0.0, 0.25, 0.0]);
    }

    #[test]
    fn sweep_is_nested_and_matches_single() {
        let mut rng = RngStream::new(2);
        let f = DenseMatrix::from_fn(30, 4, |_, _| rng.uniform_range(0.0, 3.0));
        let sweep = threshold_sweep(&f, &[0.4, 0.5, 0.6], ThresholdMode::ColumnMax);
        for w in sweep.windows(2) {
            for k in 0..4 {
                assert!(w[1].1.community(k).iter().all(|i| w[0].1.community(k).contains(i)));
            }
        }
        assert_eq!(sweep[1].1, threshold_assign(&f, 0.5, ThresholdMode::ColumnMax));
    }
}
