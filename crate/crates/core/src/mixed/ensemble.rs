use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::error::{bail, Result};
use crate::tensor::{CMatrix, DensityMatrix, StateVector, SystemShape, NEG_EIGEN_TOL};

/// Relative cutoff on eigenvalues, as a fraction of the trace.
pub const DEFAULT_CUTOFF: f64 = 1e-12;
/// Relative gap below which the leading eigenvalue counts as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-10;

/// `rho = sum_i |phi_i><phi_i|` with `phi_i = sqrt(mu_i) e_i`, sorted by
/// decreasing `mu_i`.
///
/// Each eigenvector's phase is fixed so that its largest-magnitude
/// amplitude is real and positive.
#[derive(Debug, Clone)]
pub struct SpectralEnsemble {
    shape: SystemShape,
    members: Vec<StateVector>,
    eigenvalues: Vec<f64>,
    dominant_degeneracy: usize,
}

impl SpectralEnsemble {
    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn members(&self) -> &[StateVector] {
        &self.members
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Number of members r.
    pub fn rank(&self) -> usize {
        self.members.len()
    }

    /// How many eigenvalues share the largest value (1 when it is simple).
    pub fn dominant_degeneracy(&self) -> usize {
        self.dominant_degeneracy
    }

    /// `D x r` matrix whose columns are the members.
    pub fn matrix(&self) -> CMatrix {
        let d = self.shape.total_dim();
        CMatrix::from_fn(d, self.rank(), |i, j| self.members[j].amplitudes()[i])
    }

    /// `sum_i |phi_i><phi_i|`.
    pub fn reconstruct(&self) -> CMatrix {
        let phi = self.matrix();
        &phi * phi.adjoint()
    }
}

fn fix_phase(v: &mut nalgebra::DVector<Complex64>) {
    let mut best = 0;
    let mut best_norm = -1.0;
    for (i, z) in v.iter().enumerate() {
        let n = z.norm();
        if n > best_norm * (1.0 + 1e-12) {
            best = i;
            best_norm = n;
        }
    }
    if best_norm > 0.0 {
        let phase = v[best].conj() / best_norm;
        *v *= phase;
    }
}

/// Eigen-decomposition of `rho` as an ensemble of subnormalized states.
///
/// Eigenvalues below `cutoff * Tr rho` are dropped and the rest rescaled to
/// keep the trace.
pub fn spectral_ensemble(rho: &DensityMatrix, cutoff: f64) -> Result<SpectralEnsemble> {
    let eig = SymmetricEigen::new(rho.matrix().clone());
    let trace = rho.matrix().trace().re;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let min = eig.eigenvalues.min();
    if min < -NEG_EIGEN_TOL * trace.max(1.0) {
        bail!(Numerical, "density matrix has eigenvalue {min:e}");
    }
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&i| eig.eigenvalues[i] >= cutoff * trace && eig.eigenvalues[i] > 0.0)
        .collect();
    if kept.is_empty() {
        bail!(Numerical, "density matrix has no eigenvalue above the cutoff");
    }
    let kept_sum: f64 = kept.iter().map(|&i| eig.eigenvalues[i]).sum();
    let scale = trace / kept_sum;
    let mut members = Vec::with_capacity(kept.len());
    let mut eigenvalues = Vec::with_capacity(kept.len());
    for &i in &kept {
        let mu = eig.eigenvalues[i] * scale;
        let mut e = eig.eigenvectors.column(i).into_owned();
        fix_phase(&mut e);
        members.push(StateVector::new(rho.shape().clone(), e.scale(mu.sqrt()))?);
        eigenvalues.push(mu);
    }
    let top = eigenvalues[0];
    let dominant_degeneracy =
        eigenvalues.iter().take_while(|&&mu| (top - mu) <= DEGENERACY_GAP * top).count();
    Ok(SpectralEnsemble {
        shape: rho.shape().clone(),
        members,
        eigenvalues,
        dominant_degeneracy,
    })
}
