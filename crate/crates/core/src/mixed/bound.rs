use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{bail, Result};
use crate::optim::NelderMead;
use crate::projector::ConcurrenceSpec;
use crate::rng;
use crate::tensor::{CMatrix, CVector, DensityMatrix};

use super::coefficients::tau_unchecked;
use super::{prepare, CoefficientMatrices, ZVector};

/// Descending singular values and `max(0, s_1 - sum_{j>1} s_j)`.
///
/// The unclamped expression can be negative; the infimum it stands for is
/// a sum of absolute values, so it is clamped at zero.
pub fn seminorm_bound(tau: &CMatrix) -> (f64, Vec<f64>) {
    let (raw, sv) = raw_bound(tau);
    (raw.max(0.0), sv)
}

fn raw_bound(tau: &CMatrix) -> (f64, Vec<f64>) {
    let mut sv: Vec<f64> = tau.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let raw = match sv.split_first() {
        Some((first, rest)) => first - rest.iter().sum::<f64>(),
        None => 0.0,
    };
    (raw, sv)
}

#[derive(Debug, Clone)]
pub struct BoundOptions {
    pub restarts: usize,
    /// Termination tolerance on the objective for each local search.
    pub tol: f64,
    pub seed: u64,
}

impl Default for BoundOptions {
    fn default() -> Self {
        Self { restarts: 32, tol: 1e-8, seed: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct BoundReport {
    pub lower_bound: f64,
    pub z_opt: ZVector,
    /// Singular values of `tau(z_opt)`, descending.
    pub singular_values: Vec<f64>,
    pub restarts_used: usize,
    pub converged: bool,
}

impl BoundReport {
    fn at(z: ZVector, t: &CoefficientMatrices, restarts_used: usize, converged: bool) -> Self {
        let (lower_bound, singular_values) = seminorm_bound(&tau_unchecked(z.as_vector().as_slice(), t));
        Self { lower_bound, z_opt: z, singular_values, restarts_used, converged }
    }
}

/// Real parameters -> unit z, with `z_0` real (global phase fixed).
fn z_from_params(x: &[f64], k: usize) -> Vec<Complex64> {
    let mut z = Vec::with_capacity(k);
    z.push(Complex64::new(x[0], 0.0));
    for a in 1..k {
        z.push(Complex64::new(x[2 * a - 1], x[2 * a]));
    }
    let n = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        z.iter_mut().for_each(|c| *c /= n);
    }
    z
}

fn params_from_z(z: &[Complex64]) -> Vec<f64> {
    // rotate so that z_0 is real and nonnegative
    let phase = if z[0].norm() > 0.0 { z[0].conj() / z[0].norm() } else { Complex64::new(1.0, 0.0) };
    let mut x = vec![(z[0] * phase).re];
    for c in &z[1..] {
        let w = c * phase;
        x.push(w.re);
        x.push(w.im);
    }
    x
}

/// The `z` that reproduces the quasi-pure matrix: `z_a ~ conj(T^a_00)`.
fn dominant_start(t: &CoefficientMatrices) -> Option<Vec<Complex64>> {
    let z: Vec<Complex64> = t.mats().iter().map(|m| m[(0, 0)].conj()).collect();
    let n = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    (n > 1e-14).then(|| z.into_iter().map(|c| c / n).collect())
}

struct RestartResult {
    value: f64,
    z: Vec<Complex64>,
    converged: bool,
}

fn local_search(t: &CoefficientMatrices, start: &[Complex64], tol: f64) -> RestartResult {
    let k = t.len();
    let objective = |x: &[f64]| -raw_bound(&tau_unchecked(&z_from_params(x, k), t)).0;
    let nm = NelderMead {
        max_evals: 400 * (2 * k - 1) + 2000,
        f_tol: tol,
        x_tol: tol.sqrt(),
        initial_step: 0.3,
    };
    let mut best = nm.minimize(&objective, &params_from_z(start));
    // one more simplex around the best point
    let polish = NelderMead { initial_step: 0.05, ..nm };
    let again = polish.minimize(&objective, &best.x);
    if again.value <= best.value {
        best = again;
    }
    RestartResult { value: -best.value, z: z_from_params(&best.x, k), converged: best.converged }
}

/// Maximizes `seminorm_bound(tau(z))` over unit `z` by multi-start simplex
/// search.
///
/// Restart 0 starts from the quasi-pure direction; restart `i > 0` from a
/// Gaussian draw on stream `i` of `seed`. Restarts run in parallel and the
/// best value wins, ties going to the lowest restart index, so the result
/// does not depend on scheduling. A single matrix, or `1 x 1` matrices, are
/// solved in closed form.
pub fn optimize_lower_bound(t: &CoefficientMatrices, opts: &BoundOptions) -> Result<BoundReport> {
    if t.is_empty() {
        bail!(Domain, "no coefficient matrices");
    }
    let k = t.len();
    if k == 1 {
        return Ok(BoundReport::at(ZVector::first_axis(1), t, 0, true));
    }
    if t.rank() == 1 {
        let z = match dominant_start(t) {
            Some(z) => ZVector::normalize(CVector::from_vec(z))?,
            None => ZVector::first_axis(k),
        };
        return Ok(BoundReport::at(z, t, 0, true));
    }

    let restarts = opts.restarts.max(1);
    let results: Vec<RestartResult> = (0..restarts)
        .into_par_iter()
        .map(|i| {
            let start = match (i, dominant_start(t)) {
                (0, Some(z)) => z,
                _ => {
                    let mut rng = rng::stream(opts.seed, i as u64);
                    random_unit(k, &mut rng)
                }
            };
            local_search(t, &start, opts.tol)
        })
        .collect();
    let mut best = 0;
    for (i, r) in results.iter().enumerate() {
        if r.value > results[best].value + 1e-12 * results[best].value.abs().max(1.0) {
            best = i;
        }
    }
    let z = ZVector::normalize(CVector::from_vec(results[best].z.clone()))?;
    Ok(BoundReport::at(z, t, restarts, results[best].converged))
}

fn random_unit<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<Complex64> {
    let z: Vec<Complex64> = (0..k).map(|_| rng::complex_gaussian(rng)).collect();
    let n = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    z.into_iter().map(|c| c / n).collect()
}

/// Exact mixed-state value when the operator has a single spectral vector.
pub fn exact_rank_one(rho: &DensityMatrix, spec: &ConcurrenceSpec) -> Result<f64> {
    let (_, chis, t) = prepare(rho, spec)?;
    if chis.len() != 1 {
        bail!(
            Precondition,
            "operator has rank {}; exact evaluation needs rank one (use optimize_lower_bound)",
            chis.len()
        );
    }
    Ok(seminorm_bound(&t.mats()[0]).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn diag(values: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_iterator(
            values.len(),
            values.iter().map(|&v| Complex64::new(v, 0.0)),
        ))
    }

    #[test]
    fn seminorm_examples() {
        assert_abs_diff_eq!(seminorm_bound(&diag(&[1.0])).0, 1.0);
        let (v, sv) = seminorm_bound(&diag(&[0.1, 0.9, 0.2]));
        assert_abs_diff_eq!(v, 0.6, epsilon = 1e-14);
        assert_eq!(sv.len(), 3);
        assert!(sv.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(seminorm_bound(&diag(&[0.2, 0.2, 0.2])).0, 0.0);
    }

    #[test]
    fn params_roundtrip() {
        let z = vec![Complex64::new(0.0, 0.6), Complex64::new(0.8, 0.0)];
        let x = params_from_z(&z);
        let back = z_from_params(&x, 2);
        // same up to a global phase
        let overlap: Complex64 = z.iter().zip(&back).map(|(a, b)| a.conj() * b).sum();
        assert_abs_diff_eq!(overlap.norm(), 1.0, epsilon = 1e-14);
        assert!(back[0].im == 0.0 && back[0].re >= 0.0);
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(CoefficientMatrices::new(vec![]).is_err());
    }
}
