//! Geodesics on the shape space of closed surfaces in ℝ³ under
//! curvature-weighted almost-local Riemannian metrics.
//!
//! The library minimizes a discrete horizontal path energy over triangle-mesh
//! paths with fixed endpoints, checks the result against an exact
//! concentric-sphere ODE reduction, and reports conserved-momentum
//! diagnostics along solved paths.

mod error;

pub mod mesh;
pub mod numerics;

pub use error::{Error, Result};

pub use mesh::{load_mesh, make_icosphere, save_mesh, MeshFormat, TriMesh, VertexField};
