//! Mixed states: spectral ensembles, coefficient matrices `T^a`, the
//! singular-value lower bound and its optimization, the rank-one exact
//! path, the quasi-pure approximation, and a direct roof search.
//!
//! For an ensemble `rho = sum_i |phi_i><phi_i|` every other decomposition is
//! `psi_i = sum_j V_ij phi_j` with `V^H V = 1`, and with
//! `T^a_jk = <phi_j phi_k|chi_a>` the roof becomes
//! `inf_V sum_i sqrt(sum_a |[V T^a V^T]_ii|^2)` (up to complex conjugation,
//! which no quantity here depends on). Contracting with a unit vector `z`
//! gives `tau = sum_a z_a T^a`, and the best decomposition for a single
//! complex symmetric matrix is known in closed form from its singular
//! values.

mod bound;
mod coefficients;
mod ensemble;
mod quasi_pure;
mod roof;

pub use bound::{exact_rank_one, optimize_lower_bound, seminorm_bound, BoundOptions, BoundReport};
pub use coefficients::{coefficient_matrices, coefficient_matrices_from, tau, CoefficientMatrices, ZVector};
pub use ensemble::{spectral_ensemble, SpectralEnsemble, DEFAULT_CUTOFF};
pub use quasi_pure::{quasi_pure, QuasiPure};
pub use roof::{roof_direct_search, RoofEstimate, RoofOptions};

use crate::error::Result;
use crate::projector::{chi_vectors, ChiBasis, ConcurrenceSpec};
use crate::tensor::DensityMatrix;

/// Ensemble, spectral vectors of `A`, and the coefficient matrices for a
/// state and specification.
pub fn prepare(
    rho: &DensityMatrix,
    spec: &ConcurrenceSpec,
) -> Result<(SpectralEnsemble, ChiBasis, CoefficientMatrices)> {
    spec.shape().ensure_same(rho.shape())?;
    let ens = spectral_ensemble(rho, DEFAULT_CUTOFF)?;
    let chis = chi_vectors(spec)?;
    let t = coefficient_matrices(&ens, &chis)?;
    Ok((ens, chis, t))
}
