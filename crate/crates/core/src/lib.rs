//! Landmark-following route planning over topological navigation graphs.
//!
//! The crate builds a graph of past observations, turns per-landmark image
//! compatibility logits into grounding probabilities, and searches for the
//! walk that best trades landmark adherence against expected traversal
//! failure. Scalar-valued code is generic over [`Scalar`] (`f32` or `f64`);
//! the aliases below fix the common `f64` instantiation.

pub mod eval;
pub mod graph;
pub mod parsing;
pub mod planner;
pub mod remote;
pub mod scalar;
pub mod scoring;
pub mod sim;

pub use scalar::Scalar;

pub type Graph = graph::TopoGraph<f64>;
pub type Edge = graph::Edge<f64>;
pub type ScoreMatrix = scoring::ScoreMatrix<f64>;
pub type GroundingDistribution = scoring::GroundingDistribution<f64>;
pub type Walk = planner::Walk<f64>;
pub type PlannerParams = planner::PlannerParams<f64>;
pub type DpTable = planner::DpTable<f64>;
