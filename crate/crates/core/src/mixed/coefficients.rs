use num_complex::Complex64;

use crate::error::{bail, Result};
use crate::projector::ChiBasis;
use crate::tensor::{two_copy_permutation, CMatrix, CVector};

use super::SpectralEnsemble;

/// The matrices `T^a_jk = <phi_j phi_k|chi_a>`, one per spectral vector of
/// the operator. They are complex symmetric for even-minus operators.
#[derive(Debug, Clone)]
pub struct CoefficientMatrices {
    mats: Vec<CMatrix>,
}

impl CoefficientMatrices {
    pub fn new(mats: Vec<CMatrix>) -> Result<Self> {
        let Some(first) = mats.first() else {
            bail!(Domain, "no coefficient matrices");
        };
        let r = first.nrows();
        if mats.iter().any(|m| m.nrows() != r || m.ncols() != r) {
            bail!(Shape, "coefficient matrices must all be {r}x{r}");
        }
        Ok(Self { mats })
    }

    pub fn mats(&self) -> &[CMatrix] {
        &self.mats
    }

    /// Number of matrices (one per `chi_a`).
    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    /// Size r of each matrix.
    pub fn rank(&self) -> usize {
        self.mats[0].nrows()
    }

    /// `sum_a T^a_jk conj(T^a_lm) = <phi_j phi_k|A|phi_l phi_m>`.
    pub fn a_hat(&self, j: usize, k: usize, l: usize, m: usize) -> Complex64 {
        self.mats.iter().map(|t| t[(j, k)] * t[(l, m)].conj()).sum()
    }

    /// Largest `||T - T^T||` over the set.
    pub fn symmetry_error(&self) -> f64 {
        self.mats.iter().map(|t| (t - t.transpose()).norm()).fold(0.0, f64::max)
    }
}

/// Coefficient matrices of a spectral ensemble.
pub fn coefficient_matrices(ens: &SpectralEnsemble, chis: &ChiBasis) -> Result<CoefficientMatrices> {
    ens.shape().ensure_same(chis.shape())?;
    coefficient_matrices_from(&ens.matrix(), chis)
}

/// Coefficient matrices for arbitrary ensemble members, given as the columns
/// of a `D x r` matrix.
pub fn coefficient_matrices_from(phi: &CMatrix, chis: &ChiBasis) -> Result<CoefficientMatrices> {
    let d = chis.shape().total_dim();
    if phi.nrows() != d {
        bail!(Shape, "ensemble vectors have length {}, expected {d}", phi.nrows());
    }
    if chis.is_empty() {
        bail!(Domain, "operator has no spectral vectors");
    }
    let perm = two_copy_permutation(chis.shape());
    let phi_h = phi.adjoint();
    let phi_c = phi.map(|z| z.conj());
    let mats = chis
        .vectors()
        .iter()
        .map(|chi| {
            // back to (x_i H_i) x (x_i H_i), read as a D x D matrix X[a, b]
            let x = CMatrix::from_fn(d, d, |a, b| chi[perm[a * d + b]]);
            &phi_h * x * &phi_c
        })
        .collect();
    CoefficientMatrices::new(mats)
}

/// Complex unit vector over the spectral index.
#[derive(Debug, Clone, PartialEq)]
pub struct ZVector(CVector);

impl ZVector {
    pub fn new(z: CVector) -> Result<Self> {
        if (z.norm() - 1.0).abs() > 1e-12 {
            bail!(Validation, "z has norm {}, expected 1", z.norm());
        }
        Ok(Self(z))
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalize(z: CVector) -> Result<Self> {
        let n = z.norm();
        if !(n > 0.0) || !n.is_finite() {
            bail!(Domain, "cannot normalize z with norm {n}");
        }
        Ok(Self(z.unscale(n)))
    }

    /// Unit vector along the first axis.
    pub fn first_axis(len: usize) -> Self {
        let mut z = CVector::zeros(len);
        z[0] = Complex64::new(1.0, 0.0);
        Self(z)
    }

    pub fn as_vector(&self) -> &CVector {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `tau = sum_a z_a T^a`.
pub fn tau(z: &ZVector, t: &CoefficientMatrices) -> Result<CMatrix> {
    if z.len() != t.len() {
        bail!(Shape, "z has {} components for {} matrices", z.len(), t.len());
    }
    Ok(tau_unchecked(z.as_vector().as_slice(), t))
}

pub(crate) fn tau_unchecked(z: &[Complex64], t: &CoefficientMatrices) -> CMatrix {
    let r = t.rank();
    let mut out = CMatrix::zeros(r, r);
    for (za, ta) in z.iter().zip(t.mats()) {
        if *za != Complex64::new(0.0, 0.0) {
            out.zip_apply(ta, |o, x| *o += za * x);
        }
    }
    out
}
