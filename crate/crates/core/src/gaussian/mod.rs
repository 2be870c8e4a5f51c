//! Linear Gaussian structural equilibrium models.

pub mod law;
pub mod model;
pub mod random;
pub mod sample;
pub mod stats;
pub mod system;

pub use law::{coupled_law, exact_ci, joint_law, partial_correlation, GaussianLaw};
pub use model::{ErrorCovBlock, GaussianModel, GaussianPart};
pub use sample::{gibbs_sample, sample_coupled, sample_equilibrium, Provenance, SampleMatrix};
pub use stats::{fisher_z, markov_report, FisherZ, MarkovData, MarkovRow};
pub use system::{Equation, EquilibriumSystem};
pub use random::{random_model, shipped_models};
