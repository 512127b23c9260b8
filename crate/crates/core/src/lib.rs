//! Per-shot bitrate ladder construction from predicted quality.
//!
//! Source features and compression statistics feed an Extra-Trees quality
//! regressor; predicted rate-quality curves are turned into ladders that are
//! scored against the measured convex hull with Bjøntegaard metrics.

pub mod commands;
pub mod evaluation;
pub mod config;
pub mod features;
pub mod ladder;
pub mod manifest;
pub mod media;
pub mod pipeline;
pub mod regression;
pub mod types;
pub mod video;
pub mod vif;
