//! Cross-direction analyses over score grids and their report rendering.

pub mod conditions;
pub mod factors;
pub mod grid;
pub mod report;
pub mod scoring;

pub use conditions::{bucket_by_condition, Bucket};
pub use factors::{
    correlate_factors, cosine_pairwise, load_factors, similarity_factors, similarity_to_english, FactorCorrelation,
    FeatureCategory, FeatureSet, FeatureVector, Side,
};
pub use grid::{average_to_from, per_language_averages, ScoreGrid, ToFrom};
pub use report::{emit_report, error_trend_tsv, render, Cell, Report, ReportFormat, Table};
pub use scoring::{compose_pivot, grid_gain, pivot_gain, score_records, PivotGain, ScoredGrid};
