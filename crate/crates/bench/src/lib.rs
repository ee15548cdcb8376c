//! Shared fixtures for the criterion benches.

use lqgcn_core::{indicator_attributes, make_planted, FeatureMatrix, Graph, PlantedConfig, Result};

/// A planted graph with indicator attributes.
pub struct Fixture {
    pub graph: Graph,
    pub attrs: FeatureMatrix,
}

/// Affiliation strength that gives each node about `degree` neighbours inside
/// its own group.
pub fn strength_for_degree(n: usize, k: usize, degree: f64) -> f64 {
    let p = (degree * k as f64 / n as f64).min(0.99);
    (-(1.0 - p).ln()).sqrt()
}

impl Fixture {
    pub fn planted(n: usize, k: usize, degree: f64, seed: u64) -> Result<Self> {
        let cfg = PlantedConfig {
            n,
            k,
            overlap: 0.1,
            strength: strength_for_degree(n, k, degree),
            background: 0.0,
        };
        let inst = make_planted(&cfg, seed)?;
        let attrs = FeatureMatrix::new(indicator_attributes(&inst.cover_true))?;
        Ok(Self { graph: inst.graph, attrs })
    }
}
