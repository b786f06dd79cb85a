//! Pipelines built on the miner: composite rewriting, significance
//! testing against noise, and similarity of episode sets.

mod composite;
mod significance;
mod similarity;

pub use composite::{discover_synfire, rewrite_with_composites, Rewrite, SynfireConfig, SynfireReport};
pub use significance::{
    significance_run, Curve, PatternData, Separation, SignificanceConfig, SignificanceReport, Statistic,
};
pub use similarity::{similarity, similarity_matrix};
