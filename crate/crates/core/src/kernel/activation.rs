use std::f64::consts::LN_2;

/// Elementwise functions used by the model and losses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    Relu,
    Sigmoid,
    TanhDerivative,
    ReluDerivative,
    SigmoidDerivative,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Relu => x.max(0.0),
            Activation::Sigmoid => sigmoid(x),
            Activation::TanhDerivative => {
                let t = x.tanh();
                1.0 - t * t
            }
            // relu'(0) = 0
            Activation::ReluDerivative => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::SigmoidDerivative => {
                let s = sigmoid(x);
                s * (1.0 - s)
            }
        }
    }
}

/// Logistic function, evaluated without overflow for large |x|.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^x)`.
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `ln(sigmoid(x))`.
pub fn log_sigmoid(x: f64) -> f64 {
    -softplus(-x)
}

/// `ln(1 - e^{-x})` for `x > 0`.
pub fn log1mexp(x: f64) -> f64 {
    if x < LN_2 {
        (-(-x).exp_m1()).ln()
    } else {
        (-(-x).exp()).ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_points() {
        assert_eq!(Activation::Relu.apply(-1.0), 0.0);
        assert_eq!(Activation::Relu.apply(2.0), 2.0);
        assert_eq!(Activation::Tanh.apply(0.0), 0.0);
        assert_eq!(Activation::Sigmoid.apply(0.0), 0.5);
        assert_eq!(Activation::ReluDerivative.apply(0.0), 0.0);
        assert_eq!(Activation::ReluDerivative.apply(1e-300), 1.0);
    }

    #[test]
    fn tanh_derivative_matches_identity() {
        let mut rng = crate::kernel::RngStream::new(11);
        for _ in 0..1000 {
            let x = rng.uniform_range(-5.0, 5.0);
            let t = x.tanh();
            assert!((Activation::TanhDerivative.apply(x) - (1.0 - t * t)).abs() < 1e-12);
        }
    }

    #[test]
    fn sigmoid_is_stable_at_extremes() {
        assert_eq!(sigmoid(-1000.0), 0.0);
        assert_eq!(sigmoid(1000.0), 1.0);
        assert!(log_sigmoid(-1000.0).is_finite());
        assert!((log_sigmoid(-1000.0) + 1000.0).abs() < 1e-9);
        assert!((softplus(0.0) - LN_2).abs() < 1e-15);
    }

    #[test]
    fn log1mexp_branches_agree_with_naive_form() {
        for &x in &[1e-3, 0.1, 0.5, LN_2, 1.0, 3.0, 20.0] {
            let naive = (1.0 - (-x).exp()).ln();
            assert!((log1mexp(x) - naive).abs() < 1e-12 * naive.abs().max(1.0), "x={x}");
        }
        // naive form loses everything here
        let x = 1e-10;
        assert!((log1mexp(x) - x.ln()).abs() < 1e-9);
    }
}
