//! Lowest-order finite element and Fourier tools for Maxwell problems with
//! mixed tangential/normal boundary conditions.
//!
//! The crate is organised bottom-up:
//!
//! * [`mesh`] - tetrahedral meshes with a two-way boundary partition
//!   (`Tau` = tangential condition, `Nu` = normal condition), domain
//!   generators, red refinement and the `meshlite` text format.
//! * [`material`] - piecewise constant admissible coefficient fields.
//! * [`fespace`] - constrained degrees of freedom and the incidence matrices of
//!   the discrete de Rham complex.
//! * [`assembly`] - mass, curl-curl and load assembly with exact low order
//!   quadrature, plus quadrature-point field containers.
//! * [`sparse`] - CSR storage, (projected) conjugate gradients, saddle point
//!   solves, null spaces and smallest generalized eigenpairs.
//! * [`fourier`] - periodic grid potentials for gradient, curl and divergence.
//! * [`decompose`] - Helmholtz decompositions and Dirichlet–Neumann fields.
//! * [`statics`] - the static boundary value problem and Poincaré/Maxwell
//!   constants.

pub mod assembly;
pub mod decompose;
pub mod error;
pub mod fespace;
pub mod fourier;
pub mod material;
pub mod mesh;
pub mod sparse;
pub mod statics;
pub mod vtk;

pub use assembly::{AssembledForms, QuadField, ScalarQuadField};
pub use decompose::{CohomologyBasis, Decomposer, Decomposition};
pub use error::{Error, Result};
pub use fespace::{DofMap, DofMaps, IncidenceOperators, Side, SpaceKind};
pub use material::MaterialField;
pub use mesh::{BoundaryTag, DomainKind, DomainSpec, Mesh};
pub use sparse::{CsrMatrix, SolveReport};
pub use statics::{ConstantsReport, StaticProblem, StaticSolution, StaticSolver};
