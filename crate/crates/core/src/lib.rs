//! Computable predicates for two characterizations of ellipsoidal cones:
//! flat boundary intersections and centrally symmetric sections.

pub mod centroid;
pub mod characterize;
pub mod cone;
pub mod error;
pub mod gamma;
pub mod harness;
pub mod linalg;
pub mod polytope;
pub mod sphere;

pub use cone::{ConeSpec, Membership, Section};
pub use error::{Error, Result};
pub use linalg::{Hyperplane, Matrix, Vector};
