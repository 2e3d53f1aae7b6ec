use num_complex::Complex64;

use crate::error::{bail, Result};
use crate::projector::ChiBasis;
use crate::tensor::CMatrix;

use super::{coefficient_matrices, seminorm_bound, SpectralEnsemble};

/// Denominators below this count as zero.
pub const QP_DENOMINATOR_MIN: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct QuasiPure {
    pub tau: CMatrix,
    pub value: f64,
    /// Index of the ensemble member used as the dominant state.
    pub dominant: usize,
    /// The largest eigenvalue was degenerate.
    pub degenerate: bool,
}

/// Quasi-pure approximation: `tau_ij = <phi_1 phi_1|A|phi_i phi_j> /
/// sqrt(<phi_1 phi_1|A|phi_1 phi_1>)` with `phi_1` the dominant member.
///
/// When the largest eigenvalue is degenerate the member of the degenerate
/// block with the largest denominator is used. This is an approximation to
/// the roof, not a bound on it.
pub fn quasi_pure(ens: &SpectralEnsemble, chis: &ChiBasis) -> Result<QuasiPure> {
    let t = coefficient_matrices(ens, chis)?;
    let denominator = |i: usize| -> f64 { t.mats().iter().map(|m| m[(i, i)].norm_sqr()).sum() };
    let block = ens.dominant_degeneracy().max(1);
    let mut dominant = 0;
    for i in 1..block {
        if denominator(i) > denominator(dominant) {
            dominant = i;
        }
    }
    let den = denominator(dominant);
    if den <= QP_DENOMINATOR_MIN {
        bail!(
            Precondition,
            "quasi-pure denominator {den:e} vanishes: the dominant eigenvector has zero pure-state concurrence"
        );
    }
    let norm = den.sqrt();
    let r = t.rank();
    let tau = CMatrix::from_fn(r, r, |i, j| {
        t.mats()
            .iter()
            .map(|m| m[(dominant, dominant)] * m[(i, j)].conj())
            .sum::<Complex64>()
            / norm
    });
    let (value, _) = seminorm_bound(&tau);
    Ok(QuasiPure { tau, value, dominant, degenerate: block > 1 })
}
