//! Analysis of reaction networks embedded in Euclidean space under
//! mass-action kinetics.
//!
//! The crate classifies single-target networks by the geometry of their
//! Newton polytope, constructs dynamically equivalent detailed-balanced
//! realizations through convex potential minimization, decides dynamical
//! equivalence to single-target and complex-balanced systems by linear
//! feasibility, and verifies everything by direct ODE simulation.

pub mod balancing;
pub mod dynamics;
pub mod equivalence;
pub mod geometry;
pub mod model;
pub mod numlin;
pub mod parser;

pub use model::{
    classify_structure, Edge, EmbeddedNetwork, FluxAssignment, MassActionSystem, ModelError,
    StructureReport, Vertex, VertexId,
};
pub use numlin::Tolerances;
