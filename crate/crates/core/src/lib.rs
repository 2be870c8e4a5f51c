//! Causal graphical modelling on anterial graphs.
//!
//! Mixed graphs with directed, undirected and bidirected edges; walk-based
//! separation; marginalisation, conditioning and maximisation; graphical
//! interventions and counterfactual graphs; constrained adjustment-set
//! selection; and Gaussian structural equilibrium models.

pub mod adjust;
pub mod causal;
pub mod classes;
pub mod error;
pub mod gaussian;
pub mod generate;
pub mod graph;
pub mod inducing;
pub mod io;
pub mod label;
pub mod separation;
pub mod transforms;

pub use error::{Error, Result};
pub use graph::{Edge, EdgeKind, Mark, MixedGraph, Relation};
