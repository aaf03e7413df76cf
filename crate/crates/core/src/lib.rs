//! Exact log canonical thresholds and jumping numbers of plane curves and
//! monomial ideals, through clusters, Enriques diagrams and unloading.

pub mod cluster;
pub mod corpus;
pub mod engine;
pub mod enriques;
pub mod error;
pub mod euclid;
pub mod monomial_diagram;
pub mod newton;
pub mod poly;
pub mod rational;
pub mod resolution;

pub use cluster::{Basis, BasisVector, Cluster, ClusterPoint, ProximityMatrix, WeightedCluster};
pub use error::{Error, Result};
pub use newton::{LatticePoint, MonomialIdeal, Staircase};
pub use poly::BivariatePolynomial;
pub use rational::Rational;
