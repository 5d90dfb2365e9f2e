//! Exact Klein polyhedra (sails) of unimodular lattices in dimensions 2 and 3.

pub mod determinants;
pub mod enumerate;
pub mod error;
pub mod hull;
pub mod lattice;
pub mod linalg;
pub mod logplane;
pub mod normmin;
pub mod polar;
pub mod rational;
pub mod report;
pub mod sail;
pub mod scalar;

pub use error::{Error, Result};
pub use lattice::{Lattice, LatticePoint, Provenance};
pub use rational::Q;
pub use scalar::{NumberField, Scalar};
