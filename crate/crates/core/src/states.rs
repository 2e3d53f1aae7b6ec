//! Reference states and seeded random ensembles.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{bail, Result};
use crate::rng::{self, complex_gaussian};
use crate::tensor::{
    local_operator, permute_subsystems, tensor_product, CMatrix, CVector, DensityMatrix, StateVector,
    SystemShape,
};

/// Nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtWeights(Vec<f64>);

impl SchmidtWeights {
    pub fn new(lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.is_empty() {
            bail!(Domain, "no Schmidt weights");
        }
        if lambdas.iter().any(|&l| !(l >= 0.0)) {
            bail!(Domain, "Schmidt weights must be nonnegative: {lambdas:?}");
        }
        let total: f64 = lambdas.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            bail!(Domain, "Schmidt weights sum to {total}");
        }
        Ok(Self(lambdas))
    }

    pub fn uniform(k: usize) -> Result<Self> {
        Self::new(vec![1.0 / k as f64; k])
    }

    /// Flat Dirichlet draw of `k` weights.
    pub fn random(k: usize, seed: u64) -> Result<Self> {
        let mut rng = rng::stream(seed, 0);
        let raw: Vec<f64> = (0..k).map(|_| -rng.random::<f64>().max(f64::MIN_POSITIVE).ln()).collect();
        let total: f64 = raw.iter().sum();
        let mut lambdas: Vec<f64> = raw.iter().map(|x| x / total).collect();
        // push the rounding residue into the largest entry
        let residue = 1.0 - lambdas.iter().sum::<f64>();
        if let Some(max) = lambdas.iter_mut().max_by(|a, b| a.total_cmp(b)) {
            *max += residue;
        }
        Self::new(lambdas)
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.0
    }
}

/// `sum_i sqrt(lambda_i) |i...i>` on `n` qudits of dimension `d`.
pub fn ghz(weights: &SchmidtWeights, n: usize, d: usize) -> Result<StateVector> {
    if n < 2 {
        bail!(Domain, "GHZ state needs at least two parties");
    }
    if weights.lambdas().len() > d {
        bail!(Domain, "{} Schmidt weights for local dimension {d}", weights.lambdas().len());
    }
    let shape = SystemShape::uniform(n, d)?;
    let mut amps = CVector::zeros(shape.total_dim());
    for (i, &l) in weights.lambdas().iter().enumerate() {
        amps[shape.index_of(&vec![i; n])] = Complex64::new(l.sqrt(), 0.0);
    }
    StateVector::normalized(shape, amps)
}

/// Uniform superposition of the `n` single-excitation qubit states.
pub fn w_state(n: usize) -> Result<StateVector> {
    if n < 2 {
        bail!(Domain, "W state needs at least two parties");
    }
    let shape = SystemShape::qubits(n)?;
    let mut amps = CVector::zeros(shape.total_dim());
    let a = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    for k in 0..n {
        amps[1 << k] = a;
    }
    StateVector::normalized(shape, amps)
}

/// `(|00> + |11>)/sqrt 2`.
pub fn bell() -> StateVector {
    ghz(&SchmidtWeights::uniform(2).expect("two weights"), 2, 2).expect("valid GHZ")
}

/// `phi (x) zeta` with subsystem `i` of the product moved to
/// `placement[i]`.
pub fn biseparable(phi: &StateVector, zeta: &StateVector, placement: &[usize]) -> Result<StateVector> {
    permute_subsystems(&tensor_product(phi, zeta), placement)
}

/// Haar-random pure state (normalized complex Gaussian vector).
pub fn random_pure(shape: SystemShape, seed: u64) -> StateVector {
    let mut rng = rng::stream(seed, 0);
    let amps = CVector::from_fn(shape.total_dim(), |_, _| complex_gaussian(&mut rng));
    StateVector::from_unnormalized(shape, amps).expect("Gaussian vector is nonzero")
}

/// `G G^H / Tr(G G^H)` with `G` a `D x rank` complex Gaussian matrix.
pub fn random_density(shape: SystemShape, rank: usize, seed: u64) -> Result<DensityMatrix> {
    let d = shape.total_dim();
    if rank == 0 || rank > d {
        bail!(Domain, "rank {rank} outside 1..={d}");
    }
    let mut rng = rng::stream(seed, 0);
    let g = CMatrix::from_fn(d, rank, |_, _| complex_gaussian(&mut rng));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    let m = m.unscale(tr);
    Ok(DensityMatrix::from_parts(shape, (&m + m.adjoint()).unscale(2.0)))
}

/// `v |psi><psi| + (1 - v) I / D`.
pub fn white_noise_mix(psi: &StateVector, visibility: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&visibility) {
        bail!(Domain, "visibility {visibility} outside [0, 1]");
    }
    let proj = psi.projector()?;
    let mixed = DensityMatrix::maximally_mixed(psi.shape().clone());
    let m = proj.matrix().scale(visibility) + mixed.matrix().scale(1.0 - visibility);
    Ok(DensityMatrix::from_parts(psi.shape().clone(), m))
}

/// Haar-random `n x n` unitary (QR of a Ginibre matrix with the phases of
/// `R`'s diagonal divided out).
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = DMatrix::from_fn(n, n, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Per-subsystem Haar unitaries and their Kronecker product.
pub fn random_local_unitary(shape: &SystemShape, seed: u64) -> (Vec<CMatrix>, CMatrix) {
    let mut rng = rng::stream(seed, 0);
    let factors: Vec<CMatrix> = shape.dims().iter().map(|&d| random_unitary(d, &mut rng)).collect();
    let full = local_operator(&factors).expect("nonempty shape");
    (factors, full)
}

/// `(x)_j rho_j`.
pub fn product_density(factors: &[DensityMatrix]) -> Result<DensityMatrix> {
    let Some(first) = factors.first() else {
        bail!(Domain, "no factors");
    };
    Ok(factors[1..].iter().fold(first.clone(), |acc, f| acc.tensor(f)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ghz_uniform_four_qubits() {
        let psi = ghz(&SchmidtWeights::uniform(2).unwrap(), 4, 2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(psi.amplitudes()[0].re, h, epsilon = 1e-15);
        assert_abs_diff_eq!(psi.amplitudes()[15].re, h, epsilon = 1e-15);
        assert_abs_diff_eq!(psi.norm_sqr(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn ghz_pads_weights_and_rejects_excess() {
        let w = SchmidtWeights::new(vec![0.5, 0.5]).unwrap();
        let psi = ghz(&w, 3, 3).unwrap();
        assert_eq!(psi.shape().dims(), &[3, 3, 3]);
        let too_many = SchmidtWeights::uniform(3).unwrap();
        assert!(ghz(&too_many, 3, 2).is_err());
        assert!(SchmidtWeights::new(vec![0.5, 0.6]).is_err());
        assert!(SchmidtWeights::new(vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn w3_amplitudes() {
        let w = w_state(3).unwrap();
        let a = 1.0 / 3f64.sqrt();
        for idx in [1, 2, 4] {
            assert_abs_diff_eq!(w.amplitudes()[idx].re, a, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(w.norm_sqr(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn random_states_are_reproducible() {
        let s = SystemShape::qubits(3).unwrap();
        let a = random_pure(s.clone(), 7);
        let b = random_pure(s.clone(), 7);
        assert_eq!(a, b);
        assert_ne!(a, random_pure(s.clone(), 8));
        assert_abs_diff_eq!(a.norm_sqr(), 1.0, epsilon = 1e-12);

        let r1 = random_density(s.clone(), 3, 11).unwrap();
        assert_eq!(r1, random_density(s.clone(), 3, 11).unwrap());
        assert!(random_density(s.clone(), 0, 1).is_err());
        assert!(random_density(s, 9, 1).is_err());
    }

    #[test]
    fn random_density_ranks() {
        let s = SystemShape::qubits(2).unwrap();
        let pure = random_density(s.clone(), 1, 3).unwrap();
        assert_abs_diff_eq!(crate::tensor::purity(&pure), 1.0, epsilon = 1e-12);
        let full = random_density(s, 4, 3).unwrap();
        assert_abs_diff_eq!(full.matrix().trace().re, 1.0, epsilon = 1e-12);
        let eig = nalgebra::SymmetricEigen::new(full.matrix().clone());
        assert!(eig.eigenvalues.min() > 1e-6);
    }

    #[test]
    fn noise_endpoints() {
        let b = bell();
        let pure = white_noise_mix(&b, 1.0).unwrap();
        assert!((pure.matrix() - b.projector().unwrap().matrix()).norm() < 1e-15);
        let mixed = white_noise_mix(&b, 0.0).unwrap();
        assert!((mixed.matrix() - CMatrix::identity(4, 4).unscale(4.0)).norm() < 1e-15);
        assert!(white_noise_mix(&b, 1.1).is_err());
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = rng::stream(5, 0);
        let u = random_unitary(4, &mut rng);
        assert!((u.adjoint() * &u - CMatrix::identity(4, 4)).norm() < 1e-12);
    }

    #[test]
    fn dirichlet_weights_sum_to_one() {
        for seed in 0..20 {
            let w = SchmidtWeights::random(3, seed).unwrap();
            assert_abs_diff_eq!(w.lambdas().iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        }
    }
}
