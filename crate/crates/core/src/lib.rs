//! Overlapping community detection with a two-layer graph convolutional
//! encoder trained on a Bernoulli-Poisson reconstruction loss plus a
//! local-modularity term.
//!
//! ```no_run
//! use lqgcn_core::{make_planted, indicator_attributes, train, threshold_assign, onmi};
//! use lqgcn_core::{FeatureMatrix, PlantedConfig, TrainConfig};
//!
//! let inst = make_planted(&PlantedConfig::default(), 7).unwrap();
//! let x = FeatureMatrix::new(indicator_attributes(&inst.cover_true)).unwrap();
//! let cfg = TrainConfig { k: 4, ..Default::default() };
//! let out = train(&inst.graph, &x, &cfg).unwrap();
//! let cover = threshold_assign(out.affiliations.as_dense(), cfg.threshold, cfg.threshold_mode);
//! println!("onmi = {:.3}", onmi(&cover, &inst.cover_true).unwrap());
//! ```

pub mod cover;
pub mod error;
pub mod graph;
pub mod io;
pub mod kernel;
pub mod losses;
pub mod metrics;
pub mod model;
pub mod synthetic;
pub mod trainer;

pub use cover::Cover;
pub use error::{Error, Result};
pub use graph::{build_features, normalize_adjacency, FeatureMatrix, Graph, InputVariant};
pub use kernel::{CsrMatrix, DenseMatrix, RngStream};
pub use losses::{BpEstimator, LossWeights};
pub use metrics::{onmi, recall_best_match};
pub use model::{AffiliationMatrix, ConvVariant, ModelParams};
pub use synthetic::{indicator_attributes, make_planted, PlantedConfig, PlantedInstance};
pub use trainer::{threshold_assign, threshold_sweep, train, OuterAdjacency, ThresholdMode, TrainConfig, TrainLog, TrainOutcome};
