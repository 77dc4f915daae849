//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("mesh has no faces")]
    EmptyMesh,

    #[error("face {face} references vertex {index}, but the mesh has {vertex_count} vertices")]
    FaceIndexOutOfRange {
        face: usize,
        index: usize,
        vertex_count: usize,
    },

    #[error("face {face} is degenerate: repeated vertex indices {indices:?}")]
    RepeatedFaceIndices { face: usize, indices: [usize; 3] },

    #[error("non-manifold edge ({a}, {b}): shared by {count} faces")]
    NonManifoldEdge { a: usize, b: usize, count: usize },

    #[error("boundary edge ({a}, {b}): mesh is not closed")]
    BoundaryEdge { a: usize, b: usize },

    #[error("inconsistent orientation across edge ({a}, {b})")]
    InconsistentOrientation { a: usize, b: usize },

    #[error("vertex {vertex} has a non-disk neighborhood")]
    NonManifoldVertex { vertex: usize },

    #[error("face {face} has area {area:.3e}, below the floor {floor:.3e}")]
    DegenerateFace { face: usize, area: f64, floor: f64 },

    #[error("vertex {vertex} has a degenerate star (vanishing vector area)")]
    DegenerateStar { vertex: usize },

    #[error("icosphere subdivision level {level} exceeds the maximum of {max}")]
    SubdivisionTooDeep { level: u32, max: u32 },

    #[error("meshes do not share combinatorics: {reason}")]
    CombinatoricsMismatch { reason: String },

    #[error("field length {got} does not match vertex count {expected}")]
    FieldLengthMismatch { got: usize, expected: usize },

    #[error("degenerate mesh at timestep {timestep}: {source}")]
    DegenerateTimestep {
        timestep: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("finite-difference step {step:.3e} is below the cancellation guard {min:.3e}")]
    StepTooSmall { step: f64, min: f64 },

    #[error("radius must be positive, got {radius}")]
    NonpositiveRadius { radius: f64 },

    #[error("sphere radius fell below the floor {floor:.3e} during integration")]
    RadiusCollapsed { floor: f64 },

    #[error("shooting failed to bracket the boundary value over r_t(0) in [{lo}, {hi}]")]
    BracketingFailure { lo: f64, hi: f64 },

    #[error("stationary translation radius requires exponent l >= 1, got {l}")]
    ExponentBelowOne { l: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}
