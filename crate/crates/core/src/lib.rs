//! Prototype learning on the Grassmann manifold.
//!
//! Image sets (or single images) are represented as subspaces, compared via
//! principal angles, and classified by their nearest labeled prototype
//! subspace. Prototypes are learned with the GLVQ relative-distance cost,
//! optionally together with a relevance weighting of the principal angles.

pub mod cli;
pub mod error;
pub mod grassmann;
pub mod io;
pub mod lvq;

pub use error::{Error, Result};
pub use grassmann::{
    adaptive_squared_distance, geodesic_distance, g_matrix_diagonal, image_contribution,
    orthonormalize_columns, pixel_influence, principal_decomposition, single_vector_angle,
    squared_geodesic_distance, subspace_from_set, vector_decomposition, DataMatrix, PrincipalDecomposition,
    RelevanceVector, Subspace, SubspaceWithFactors,
};
