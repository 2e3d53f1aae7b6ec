//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use mconc::{CMatrix, CVector, StateVector, SystemShape};
use nalgebra::SymmetricEigen;
use num_complex::Complex64;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Two-qubit concurrence from the spin-flipped state:
/// singular values of `sqrt(rho) (Y x Y) conj(sqrt(rho))`.
pub fn wootters(rho: &CMatrix) -> f64 {
    assert_eq!(rho.nrows(), 4);
    let eig = SymmetricEigen::new(rho.clone());
    let roots = eig.eigenvalues.map(|l| if l < 1e-13 { 0.0 } else { l.sqrt() });
    let v = &eig.eigenvectors;
    let sqrt_rho = v * CMatrix::from_diagonal(&roots.map(c)) * v.adjoint();
    #[rustfmt::skip]
    let yy = CMatrix::from_row_slice(4, 4, &[
        c(0.0), c(0.0), c(0.0), c(-1.0),
        c(0.0), c(0.0), c(1.0), c(0.0),
        c(0.0), c(1.0), c(0.0), c(0.0),
        c(-1.0), c(0.0), c(0.0), c(0.0),
    ]);
    let b = &sqrt_rho * yy * sqrt_rho.map(|z| z.conj());
    let mut sv: Vec<f64> = b.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    (sv[0] - sv[1] - sv[2] - sv[3]).max(0.0)
}

/// Werner-type concurrence of `p |Bell><Bell| + (1-p) I/4`.
pub fn werner(p: f64) -> f64 {
    ((3.0 * p - 1.0) / 2.0).max(0.0)
}

/// Pure two-qubit concurrence `|<psi| Y x Y |psi*>|`.
pub fn wootters_pure(psi: &StateVector) -> f64 {
    let a = psi.amplitudes();
    (c(2.0) * (a[0] * a[3] - a[1] * a[2])).norm()
}

pub fn real_state(dims: Vec<usize>, amps: &[f64]) -> StateVector {
    StateVector::from_unnormalized(
        SystemShape::new(dims).unwrap(),
        CVector::from_iterator(amps.len(), amps.iter().map(|&a| c(a))),
    )
    .unwrap()
}
