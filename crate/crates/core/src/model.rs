//! Two-layer graph-convolutional encoder producing the node-community
//! affiliation matrix, with a hand-written reverse pass.
//!
//! Main variant:     `F = ReLU(A⁺ · tanh(Ā X W1 + X W1) · W2)`
//! Ablation variant: `F = ReLU(Ā · tanh(Ā X W1) · W2)`
//!
//! `Ā = I + D^{-1/2} A D^{-1/2}`; `A⁺` is the outer propagation matrix,
//! normally `A + I` (the raw adjacency can be substituted by the caller).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{FeatureMatrix, NormalizedAdjacency};
use crate::kernel::{Activation, CsrMatrix, DenseMatrix, RngStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConvVariant {
    #[default]
    Main,
    Ablation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub w1: DenseMatrix,
    pub w2: DenseMatrix,
}

impl ModelParams {
    /// Xavier-initialized weights for feature dim `d`, hidden width
    /// `hidden` and `k` communities.
    pub fn init(d: usize, hidden: usize, k: usize, rng: &mut RngStream) -> Self {
        let w1 = xavier_init(d, hidden, rng);
        let w2 = xavier_init(hidden, k, rng);
        Self { w1, w2 }
    }

    pub fn feature_dim(&self) -> usize {
        self.w1.rows()
    }

    pub fn hidden(&self) -> usize {
        self.w1.cols()
    }

    pub fn n_communities(&self) -> usize {
        self.w2.cols()
    }

    pub fn squared_norm(&self) -> f64 {
        self.w1.squared_norm() + self.w2.squared_norm()
    }

    fn validate(&self) -> Result<()> {
        if self.w1.cols() != self.w2.rows() {
            return Err(Error::shape(format!(
                "W1 is {:?} but W2 is {:?}",
                self.w1.shape(),
                self.w2.shape()
            )));
        }
        self.w1.ensure_finite("W1")?;
        self.w2.ensure_finite("W2")
    }
}

/// Glorot-uniform draw in `±sqrt(6 / (fan_in + fan_out))`.
pub fn xavier_init(fan_in: usize, fan_out: usize, rng: &mut RngStream) -> DenseMatrix {
    let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
    DenseMatrix::from_fn(fan_in, fan_out, |_, _| rng.uniform_range(-bound, bound))
}

/// Nonnegative `N x K` soft memberships.
#[derive(Debug, Clone, PartialEq)]
pub struct AffiliationMatrix(DenseMatrix);

impl AffiliationMatrix {
    pub fn new(f: DenseMatrix) -> Result<Self> {
        f.ensure_finite("affiliation matrix")?;
        if f.as_slice().iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidData("negative affiliation".into()));
        }
        Ok(Self(f))
    }

    pub fn as_dense(&self) -> &DenseMatrix {
        &self.0
    }

    pub fn into_dense(self) -> DenseMatrix {
        self.0
    }

    pub fn n_nodes(&self) -> usize {
        self.0.rows()
    }

    pub fn n_communities(&self) -> usize {
        self.0.cols()
    }
}

/// Matrices the encoder propagates over.
#[derive(Debug, Clone, Copy)]
pub struct ModelInputs<'a> {
    pub abar: &'a NormalizedAdjacency,
    /// Outer propagation matrix of the main variant.
    pub outer: &'a CsrMatrix,
    pub x: &'a FeatureMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardOptions {
    pub variant: ConvVariant,
    pub dropout: f64,
    pub training: bool,
}

impl ForwardOptions {
    pub fn inference(variant: ConvVariant) -> Self {
        Self {
            variant,
            dropout: 0.0,
            training: false,
        }
    }
}

/// Activations kept for the reverse pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    variant: ConvVariant,
    /// Dropped-out input features; `None` when no dropout was applied.
    x_dropped: Option<DenseMatrix>,
    /// `tanh` output of layer one.
    hidden: DenseMatrix,
    /// Inverted-dropout scale per hidden entry.
    hidden_mask: Option<Vec<f64>>,
    /// Layer-two input after dropout.
    hidden_dropped: DenseMatrix,
    /// Pre-ReLU output.
    pre_relu: DenseMatrix,
}

fn dropout_mask(len: usize, rate: f64, rng: &mut RngStream) -> Vec<f64> {
    let keep = 1.0 - rate;
    let scale = 1.0 / keep;
    (0..len)
        .map(|_| if rng.uniform() < keep { scale } else { 0.0 })
        .collect()
}

fn apply_mask(m: &DenseMatrix, mask: &[f64]) -> DenseMatrix {
    let mut out = m.clone();
    for (v, s) in out.as_mut_slice().iter_mut().zip(mask) {
        *v *= s;
    }
    out
}

fn check_inputs(params: &ModelParams, inputs: &ModelInputs<'_>) -> Result<()> {
    params.validate()?;
    let n = inputs.x.n_rows();
    if inputs.x.dim() != params.feature_dim() {
        return Err(Error::shape(format!(
            "feature dim {} but W1 expects {}",
            inputs.x.dim(),
            params.feature_dim()
        )));
    }
    let a = inputs.abar.matrix();
    if a.rows() != n || a.cols() != n || inputs.outer.rows() != n || inputs.outer.cols() != n {
        return Err(Error::shape("propagation matrices must be N x N"));
    }
    Ok(())
}

pub fn forward(
    params: &ModelParams,
    inputs: &ModelInputs<'_>,
    opts: &ForwardOptions,
    rng: &mut RngStream,
) -> Result<(AffiliationMatrix, ForwardCache)> {
    check_inputs(params, inputs)?;
    if !(0.0..1.0).contains(&opts.dropout) {
        return Err(Error::invalid(format!("dropout rate {} not in [0,1)", opts.dropout)));
    }
    let use_dropout = opts.training && opts.dropout > 0.0;
    let x = inputs.x.as_dense();
    let abar = inputs.abar.matrix();

    let x_dropped = use_dropout.then(|| {
        let mask = dropout_mask(x.as_slice().len(), opts.dropout, rng);
        apply_mask(x, &mask)
    });
    let x_in = x_dropped.as_ref().unwrap_or(x);

    let xw = x_in.matmul(&params.w1)?;
    let mut z1 = abar.spmm(&xw)?;
    if opts.variant == ConvVariant::Main {
        z1.axpy(1.0, &xw)?;
    }
    let hidden = z1.map(Activation::Tanh);

    let hidden_mask = use_dropout.then(|| dropout_mask(hidden.as_slice().len(), opts.dropout, rng));
    let hidden_dropped = match &hidden_mask {
        Some(mask) => apply_mask(&hidden, mask),
        None => hidden.clone(),
    };

    let hw = hidden_dropped.matmul(&params.w2)?;
    let outer = match opts.variant {
        ConvVariant::Main => inputs.outer,
        ConvVariant::Ablation => abar,
    };
    let pre_relu = outer.spmm(&hw)?;
    let f = pre_relu.map(Activation::Relu);
    f.ensure_finite("affiliation matrix")?;

    let cache = ForwardCache {
        variant: opts.variant,
        x_dropped,
        hidden,
        hidden_mask,
        hidden_dropped,
        pre_relu,
    };
    Ok((AffiliationMatrix(f), cache))
}

/// Gradients of a scalar loss with respect to `W1` and `W2`, given
/// `grad_f = dL/dF` and the cache from the matching forward call.
pub fn backward(
    params: &ModelParams,
    cache: &ForwardCache,
    grad_f: &DenseMatrix,
    inputs: &ModelInputs<'_>,
) -> Result<(DenseMatrix, DenseMatrix)> {
    check_inputs(params, inputs)?;
    if grad_f.shape() != cache.pre_relu.shape() {
        return Err(Error::shape(format!(
            "grad_f is {:?}, forward produced {:?}",
            grad_f.shape(),
            cache.pre_relu.shape()
        )));
    }
    if cache.hidden.cols() != params.hidden() {
        return Err(Error::shape("cache does not match parameters"));
    }
    let abar = inputs.abar.matrix();
    let outer = match cache.variant {
        ConvVariant::Main => inputs.outer,
        ConvVariant::Ablation => abar,
    };

    let g_pre = grad_f.zip_with(&cache.pre_relu, |g, z| if z > 0.0 { g } else { 0.0 })?;
    // both propagation matrices are symmetric, so their transpose is themselves
    let g_hw = outer.spmm(&g_pre)?;
    let grad_w2 = DenseMatrix::gemm(&cache.hidden_dropped, true, &g_hw, false)?;

    let mut g_hidden = DenseMatrix::gemm(&g_hw, false, &params.w2, true)?;
    if let Some(mask) = &cache.hidden_mask {
        for (g, s) in g_hidden.as_mut_slice().iter_mut().zip(mask) {
            *g *= s;
        }
    }
    let g_z1 = g_hidden.zip_with(&cache.hidden, |g, t| g * (1.0 - t * t))?;
    let mut g_xw = abar.spmm(&g_z1)?;
    if cache.variant == ConvVariant::Main {
        g_xw.axpy(1.0, &g_z1)?;
    }
    let x_in = cache.x_dropped.as_ref().unwrap_or(inputs.x.as_dense());
    let grad_w1 = DenseMatrix::gemm(x_in, true, &g_xw, false)?;
    Ok((grad_w1, grad_w2))
}
