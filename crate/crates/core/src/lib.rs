//! Generalized concurrences of multipartite quantum states.
//!
//! Pure-state values come from a two-copy expectation value of an operator
//! built out of symmetric and antisymmetric projectors on each subsystem.
//! Mixed states are handled through the convex roof: an algebraic lower
//! bound optimized over a complex unit vector, an exact evaluation when the
//! operator has rank one, a quasi-pure approximation, and a direct search
//! over pure-state decompositions that gives an upper bound.

pub mod error;
pub mod mixed;
pub mod optim;
pub mod projector;
pub mod pure;
pub mod rng;
pub mod states;
pub mod tensor;

pub use error::{Error, Result};
pub use mixed::{
    coefficient_matrices, exact_rank_one, optimize_lower_bound, quasi_pure, roof_direct_search,
    seminorm_bound, spectral_ensemble, tau, BoundOptions, BoundReport, CoefficientMatrices,
    QuasiPure, RoofEstimate, RoofOptions, SpectralEnsemble, ZVector,
};
pub use projector::{
    apply_a, chi_vectors, named_spec, validate_spec, ChiBasis, ConcurrenceSpec, NamedConcurrence,
    Sign, SignString, SpecFile, SpecWarning,
};
pub use pure::{closed_form_cn, eta, evaluate};
pub use tensor::{
    partial_trace, purity, tensor_product, two_copy_reorder, two_copy_restore, CMatrix, CVector,
    DensityMatrix, StateVector, SubsystemSubset, SystemShape,
};
