use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::DenseMatrix;
use crate::model::ModelParams;

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    m: [DenseMatrix; 2],
    v: [DenseMatrix; 2],
    t: u64,
}

impl AdamState {
    pub fn new(params: &ModelParams) -> Self {
        let z1 = DenseMatrix::zeros(params.w1.rows(), params.w1.cols());
        let z2 = DenseMatrix::zeros(params.w2.rows(), params.w2.cols());
        Self {
            m: [z1.clone(), z2.clone()],
            v: [z1, z2],
            t: 0,
        }
    }

    pub fn timestep(&self) -> u64 {
        self.t
    }
}

/// Bias-corrected Adam update of both weight matrices.
pub fn adam_step(
    params: &mut ModelParams,
    grads: (&DenseMatrix, &DenseMatrix),
    state: &mut AdamState,
    lr: f64,
) -> Result<()> {
    if grads.0.shape() != params.w1.shape() || grads.1.shape() != params.w2.shape() {
        return Err(Error::shape("gradient shapes do not match parameters"));
    }
    if state.m[0].shape() != params.w1.shape() || state.m[1].shape() != params.w2.shape() {
        return Err(Error::shape("optimizer state does not match parameters"));
    }
    grads.0.ensure_finite("W1 gradient")?;
    grads.1.ensure_finite("W2 gradient")?;

    state.t += 1;
    let t = state.t as i32;
    let c1 = 1.0 - BETA1.powi(t);
    let c2 = 1.0 - BETA2.powi(t);
    let targets = [&mut params.w1, &mut params.w2];
    for (slot, (w, g)) in targets.into_iter().zip([grads.0, grads.1]).enumerate() {
        let m = state.m[slot].as_mut_slice();
        let v = state.v[slot].as_mut_slice();
        for (((w, &g), m), v) in w.as_mut_slice().iter_mut().zip(g.as_slice()).zip(m).zip(v) {
            *m = BETA1 * *m + (1.0 - BETA1) * g;
            *v = BETA2 * *v + (1.0 - BETA2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *w -= lr * m_hat / (v_hat.sqrt() + EPSILON);
        }
    }
    Ok(())
}
