//! Full-batch training with the staged early-stopping schedule.
//!
//! The loop tracks the number of consecutive iterations without a new
//! minimum of the active loss. Once that counter exceeds
//! `patience_lq`, the local-modularity term is switched on for the rest of
//! the run and the minimum is re-baselined; once it exceeds
//! `patience_stop`, training ends.

mod adam;
mod threshold;

pub use adam::{adam_step, AdamState, BETA1, BETA2, EPSILON};
pub use threshold::{rescale_columns, threshold_assign, threshold_sweep, ThresholdMode};

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    augment_adjacency, normalize_adjacency, renormalize_augmented, row_l2_normalize, FeatureMatrix, Graph,
};
use crate::kernel::{CsrMatrix, RngStream};
use crate::losses::{BpEstimator, LossWeights, Objective};
use crate::model::{backward, forward, AffiliationMatrix, ConvVariant, ForwardOptions, ModelInputs, ModelParams};

/// A new minimum must beat the previous one by at least this much.
pub const MIN_IMPROVEMENT: f64 = 1e-9;

/// Outer propagation matrix of the main variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OuterAdjacency {
    /// `D̃^{-1/2} (A + I) D̃^{-1/2}`
    #[default]
    Renormalized,
    /// `A + I`. Scales with degree, so dense graphs saturate quickly.
    Augmented,
    /// `A`
    Raw,
}

impl OuterAdjacency {
    pub fn build(self, g: &Graph) -> CsrMatrix {
        match self {
            OuterAdjacency::Renormalized => renormalize_augmented(g),
            OuterAdjacency::Augmented => augment_adjacency(g),
            OuterAdjacency::Raw => g.adjacency().clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub k: usize,
    pub hidden: usize,
    pub alpha: f64,
    pub beta: f64,
    pub lr: f64,
    pub weight_decay: f64,
    pub dropout: f64,
    pub threshold: f64,
    pub threshold_mode: ThresholdMode,
    pub max_iters: usize,
    pub patience_lq: usize,
    pub patience_stop: usize,
    pub seed: u64,
    pub variant: ConvVariant,
    pub outer: OuterAdjacency,
    pub lq_enabled: bool,
    pub estimator: BpEstimator,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            k: 2,
            hidden: 128,
            alpha: 1.0,
            beta: 1.0,
            lr: 1e-3,
            weight_decay: 1e-2,
            dropout: 0.5,
            threshold: 0.5,
            threshold_mode: ThresholdMode::ColumnMax,
            max_iters: 1000,
            patience_lq: 30,
            patience_stop: 80,
            seed: 0,
            variant: ConvVariant::Main,
            outer: OuterAdjacency::Renormalized,
            lq_enabled: true,
            estimator: BpEstimator::Exact,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::invalid(m));
        if self.k == 0 || self.hidden == 0 {
            return bad("k and hidden must be positive".into());
        }
        if self.lq_enabled && self.k < 2 {
            return bad("local-modularity loss needs k >= 2 (or disable it)".into());
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return bad(format!("threshold {} not in [0,1]", self.threshold));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return bad(format!("dropout {} not in [0,1)", self.dropout));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad(format!("learning rate {} must be positive", self.lr));
        }
        if self.patience_lq >= self.patience_stop {
            return bad("patience_lq must be smaller than patience_stop".into());
        }
        Ok(())
    }

    pub fn loss_weights(&self) -> LossWeights {
        LossWeights {
            alpha: self.alpha,
            beta: self.beta,
            lambda: self.weight_decay,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub bp: f64,
    pub lq: Option<f64>,
    pub total: f64,
    /// Consecutive non-improving iterations, including this one.
    pub counter: usize,
    /// Whether the local-modularity term was part of this iteration's loss.
    pub lq_active: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainLog {
    pub records: Vec<IterationRecord>,
}

impl TrainLog {
    /// One JSON object per line.
    pub fn write_jsonl(&self, mut w: impl Write) -> Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl(text: &str) -> Result<Self> {
        let records = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<std::result::Result<_, _>>()?;
        Ok(Self { records })
    }

    /// Iteration at which the local-modularity term first appears.
    pub fn lq_switch(&self) -> Option<usize> {
        self.records.iter().find(|r| r.lq_active).map(|r| r.iteration)
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Inference-mode affiliations from the final parameters.
    pub affiliations: AffiliationMatrix,
    pub params: ModelParams,
    pub log: TrainLog,
}

/// Counter state for the staged schedule.
#[derive(Debug, Clone)]
struct Schedule {
    best: f64,
    counter: usize,
    lq_active: bool,
}

impl Schedule {
    /// Records a loss; returns the counter after the update.
    fn observe(&mut self, loss: f64) -> usize {
        if loss < self.best - MIN_IMPROVEMENT {
            self.best = loss;
            self.counter = 0;
        } else {
            self.counter += 1;
        }
        self.counter
    }

    fn switch_on_lq(&mut self) {
        self.lq_active = true;
        self.best = f64::INFINITY;
        self.counter = 0;
    }
}

pub fn train(g: &Graph, x: &FeatureMatrix, cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    if x.n_rows() != g.n_nodes() {
        return Err(Error::shape(format!(
            "{} feature rows for {} nodes",
            x.n_rows(),
            g.n_nodes()
        )));
    }
    let x = row_l2_normalize(x);
    let abar = normalize_adjacency(g);
    let outer = cfg.outer.build(g);
    let inputs = ModelInputs {
        abar: &abar,
        outer: &outer,
        x: &x,
    };
    let root = RngStream::new(cfg.seed);
    let mut init_rng = root.fork(0);
    let mut dropout_rng = root.fork(1);
    let mut loss_rng = root.fork(2);

    let mut params = ModelParams::init(x.dim(), cfg.hidden, cfg.k, &mut init_rng);
    let mut adam = AdamState::new(&params);
    let objective = Objective::new(g, cfg.loss_weights(), cfg.estimator)?;
    let train_opts = ForwardOptions {
        variant: cfg.variant,
        dropout: cfg.dropout,
        training: true,
    };

    let mut log = TrainLog::default();
    let mut schedule = Schedule {
        best: f64::INFINITY,
        counter: 0,
        lq_active: false,
    };
    for iteration in 0..cfg.max_iters {
        let (f, cache) = forward(&params, &inputs, &train_opts, &mut dropout_rng)?;
        let eval = objective.evaluate(f.as_dense(), &params, schedule.lq_active, None, &mut loss_rng)?;
        let loss = eval.loss;
        if !loss.total.is_finite() {
            return Err(Error::Diverged {
                iteration,
                reason: format!("loss is {}", loss.total),
                last_finite: Box::new(params),
            });
        }
        let counter = schedule.observe(loss.total);
        log.records.push(IterationRecord {
            iteration,
            bp: loss.bp,
            lq: loss.lq,
            total: loss.total,
            counter,
            lq_active: schedule.lq_active,
        });
        if counter > cfg.patience_stop {
            break;
        }
        if cfg.lq_enabled && !schedule.lq_active && counter > cfg.patience_lq {
            schedule.switch_on_lq();
        }

        let (mut g1, mut g2) = backward(&params, &cache, &eval.grad_f, &inputs)?;
        g1.axpy(1.0, &eval.reg_grad.0)?;
        g2.axpy(1.0, &eval.reg_grad.1)?;
        let before = params.clone();
        if let Err(e) = adam_step(&mut params, (&g1, &g2), &mut adam, cfg.lr) {
            return Err(match e {
                Error::NonFinite(what) => Error::Diverged {
                    iteration,
                    reason: format!("non-finite {what}"),
                    last_finite: Box::new(before),
                },
                other => other,
            });
        }
    }

    let (f, _) = forward(
        &params,
        &inputs,
        &ForwardOptions::inference(cfg.variant),
        &mut dropout_rng,
    )?;
    Ok(TrainOutcome {
        affiliations: f,
        params,
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::{indicator_attributes, make_planted, PlantedConfig};

    fn small_instance() -> (Graph, FeatureMatrix) {
        let cfg = PlantedConfig { n: 60, k: 2, overlap: 0.0, strength: 1.5, background: 0.01 };
        let inst = make_planted(&cfg, 3).unwrap();
        let x = FeatureMatrix::new(indicator_attributes(&inst.cover_true)).unwrap();
        (inst.graph, x)
    }

    #[test]
    fn zero_iterations_returns_initial_model() {
        let (g, x) = small_instance();
        let cfg = TrainConfig { k: 2, max_iters: 0, hidden: 8, ..Default::default() };
        let out = train(&g, &x, &cfg).unwrap();
        assert!(out.log.records.is_empty());
        let mut rng = RngStream::new(cfg.seed).fork(0);
        assert_eq!(out.params, ModelParams::init(2, 8, 2, &mut rng));
        assert_eq!(out.affiliations.n_communities(), 2);
    }

    #[test]
    fn disabled_lq_never_activates() {
        let (g, x) = small_instance();
        let cfg = TrainConfig { k: 2, hidden: 16, max_iters: 400, lq_enabled: false, ..Default::default() };
        let out = train(&g, &x, &cfg).unwrap();
        assert!(out.log.records.iter().all(|r| !r.lq_active && r.lq.is_none()));
    }

    #[test]
    fn loss_decreases_on_planted_graph() {
        let (g, x) = small_instance();
        let cfg = TrainConfig { k: 2, hidden: 32, max_iters: 300, lr: 1e-2, ..Default::default() };
        let out = train(&g, &x, &cfg).unwrap();
        let first = out.log.records.first().unwrap().total;
        let bp_last = out.log.records.last().unwrap().bp;
        assert!(bp_last < out.log.records[0].bp);
        assert!(out.log.records.iter().all(|r| r.total.is_finite()));
        assert!(out.log.records.iter().filter(|r| !r.lq_active).any(|r| r.total < first));
    }

    #[test]
    fn training_is_deterministic() {
        let (g, x) = small_instance();
        let cfg = TrainConfig { k: 2, hidden: 16, max_iters: 60, seed: 11, ..Default::default() };
        let a = train(&g, &x, &cfg).unwrap();
        let b = train(&g, &x, &cfg).unwrap();
        assert_eq!(a.log, b.log);
        assert_eq!(a.affiliations, b.affiliations);
    }

    #[test]
    fn schedule_switches_once_and_stops() {
        // a learning rate of ~0 freezes the loss, so the counter runs freely
        let (g, x) = small_instance();
        let cfg = TrainConfig { k: 2, hidden: 8, lr: 1e-300, dropout: 0.0, ..Default::default() };
        let out = train(&g, &x, &cfg).unwrap();
        let recs = &out.log.records;
        let switch = out.log.lq_switch().unwrap();
        assert_eq!(recs[switch - 1].counter, cfg.patience_lq + 1);
        assert!(recs[..switch].iter().all(|r| !r.lq_active));
        assert!(recs[switch..].iter().all(|r| r.lq_active));
        assert_eq!(recs.last().unwrap().counter, cfg.patience_stop + 1);
        assert_eq!(recs.len(), switch + cfg.patience_stop + 2);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let (g, x) = small_instance();
        for cfg in [
            TrainConfig { k: 1, ..Default::default() },
            TrainConfig { threshold: 1.5, ..Default::default() },
            TrainConfig { dropout: 1.0, ..Default::default() },
            TrainConfig { lr: 0.0, ..Default::default() },
            TrainConfig { patience_lq: 80, ..Default::default() },
        ] {
            assert!(train(&g, &x, &cfg).is_err());
        }
        let short = FeatureMatrix::new(crate::kernel::DenseMatrix::zeros(3, 2)).unwrap();
        assert!(train(&g, &short, &TrainConfig::default()).is_err());
    }

    #[test]
    fn log_round_trips_through_jsonl() {
        let (g, x) = small_instance();
        let cfg = TrainConfig { k: 2, hidden: 8, max_iters: 5, ..Default::default() };
        let out = train(&g, &x, &cfg).unwrap();
        let mut buf = Vec::new();
        out.log.write_jsonl(&mut buf).unwrap();
        let back = TrainLog::read_jsonl(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, out.log);
    }
}
