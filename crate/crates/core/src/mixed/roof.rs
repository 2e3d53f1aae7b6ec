use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{bail, Result};
use crate::projector::ConcurrenceSpec;
use crate::pure::evaluate;
use crate::rng::{self, complex_gaussian};
use crate::tensor::{CMatrix, DensityMatrix, StateVector};

use super::{prepare, CoefficientMatrices};

#[derive(Debug, Clone)]
pub struct RoofOptions {
    /// Number of decomposition members; defaults to `min(r^2, 2r)`.
    pub members: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
    /// A known lower bound on the roof (e.g. from `optimize_lower_bound`);
    /// the search stops once it is reached to within [`TARGET_TOL`].
    pub target: Option<f64>,
}

impl Default for RoofOptions {
    fn default() -> Self {
        Self { members: None, restarts: 8, seed: 0, target: None }
    }
}

/// Relative slack for [`RoofOptions::target`].
pub const TARGET_TOL: f64 = 1e-9;

/// A pure-state decomposition and its average concurrence, an upper bound
/// on the roof.
#[derive(Debug, Clone)]
pub struct RoofEstimate {
    pub upper_bound: f64,
    /// `m x r` matrix with orthonormal columns; `psi_i = sum_j V_ij phi_j`.
    pub isometry: CMatrix,
    /// Members with nonzero norm, in row order of the isometry.
    pub decomposition: Vec<StateVector>,
}

/// Smoothing schedule for `sqrt(|g|^2 + eps^2)`; the last stage is nearly
/// exact.
const SMOOTHING: [f64; 5] = [1e-2, 1e-4, 1e-6, 1e-8, 1e-10];
const MAX_DESCENT_STEPS: usize = 400;
/// Relative gain below which a descent step counts as a stall; five in a
/// row end the stage.
const STALL_GAIN: f64 = 1e-11;
const KICKS: usize = 12;
/// Descent steps between checks of the unsmoothed objective against the
/// target.
const TARGET_CHECK: usize = 16;

/// `sum_i sqrt(sum_a |v_i^T S^a v_i|^2 + eps^2)` over the rows `v_i` of V,
/// with `S^a = conj(T^a)`.
struct RoofObjective {
    s: Vec<CMatrix>,
}

impl RoofObjective {
    fn new(t: &CoefficientMatrices) -> Self {
        Self { s: t.mats().iter().map(|m| m.map(|z| z.conj())).collect() }
    }

    fn row_terms(&self, v: &CMatrix, i: usize) -> (Vec<Complex64>, Vec<DVector<Complex64>>) {
        let row: DVector<Complex64> = v.row(i).transpose();
        let mut g = Vec::with_capacity(self.s.len());
        let mut sv = Vec::with_capacity(self.s.len());
        for s in &self.s {
            let x = s * &row;
            g.push(row.dot(&x));
            sv.push(x);
        }
        (g, sv)
    }

    fn value(&self, v: &CMatrix, eps: f64) -> f64 {
        (0..v.nrows())
            .map(|i| {
                let row: DVector<Complex64> = v.row(i).transpose();
                let g2: f64 = self.s.iter().map(|s| row.dot(&(s * &row)).norm_sqr()).sum();
                (g2 + eps * eps).sqrt()
            })
            .sum()
    }

    /// Euclidean gradient for the real inner product `Re tr(A^H B)`.
    fn gradient(&self, v: &CMatrix, eps: f64) -> CMatrix {
        let (m, r) = v.shape();
        let mut grad = CMatrix::zeros(m, r);
        for i in 0..m {
            let (g, sv) = self.row_terms(v, i);
            let f = (g.iter().map(|x| x.norm_sqr()).sum::<f64>() + eps * eps).sqrt();
            if f == 0.0 {
                continue;
            }
            for (ga, x) in g.iter().zip(&sv) {
                for k in 0..r {
                    grad[(i, k)] += ga * x[k].conj() * (2.0 / f);
                }
            }
        }
        grad
    }
}

/// Nearest matrix with orthonormal columns (polar factor).
fn orthonormalize(y: &CMatrix) -> CMatrix {
    let svd = y.clone().svd(true, true);
    svd.u.expect("u requested") * svd.v_t.expect("v_t requested")
}

fn riemannian_descent(
    obj: &RoofObjective,
    mut v: CMatrix,
    eps: f64,
    step: &mut f64,
    reached: &dyn Fn(&CMatrix) -> bool,
) -> CMatrix {
    let mut f = obj.value(&v, eps);
    let mut stalls = 0;
    for n in 0..MAX_DESCENT_STEPS {
        if n % TARGET_CHECK == 0 && reached(&v) {
            break;
        }
        let g = obj.gradient(&v, eps);
        let vg = v.adjoint() * &g;
        let sym = (&vg + vg.adjoint()).unscale(2.0);
        let xi = &g - &v * sym;
        let xi2 = xi.norm_squared();
        if xi2 < 1e-28 {
            break;
        }
        let mut accepted = false;
        for _ in 0..40 {
            let trial = orthonormalize(&(&v - xi.scale(*step)));
            let ft = obj.value(&trial, eps);
            if ft <= f - 1e-4 * *step * xi2 {
                let gain = f - ft;
                v = trial;
                f = ft;
                *step *= 2.0;
                accepted = true;
                stalls = if gain <= STALL_GAIN * f.max(1e-300) { stalls + 1 } else { 0 };
                break;
            }
            *step *= 0.5;
        }
        if !accepted || stalls >= 5 {
            break;
        }
        *step = step.max(1e-12);
    }
    v
}

/// Unitary near the identity by a Cayley transform of a small random
/// Hermitian matrix.
fn small_unitary<R: Rng + ?Sized>(m: usize, scale: f64, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(m, m, |_, _| complex_gaussian(rng));
    let h = (&g + g.adjoint()).scale(0.5 * scale);
    let i_h = h * Complex64::new(0.0, 0.5);
    let id = CMatrix::identity(m, m);
    (&id - &i_h).lu().solve(&(&id + &i_h)).expect("I - iH/2 is invertible")
}

fn random_isometry<R: Rng + ?Sized>(m: usize, r: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(m, r, |_, _| complex_gaussian(rng));
    orthonormalize(&g)
}

fn refine<R: Rng + ?Sized>(
    obj: &RoofObjective,
    mut v: CMatrix,
    rng: &mut R,
    target: Option<f64>,
) -> (CMatrix, f64) {
    let reached = |v: &CMatrix| target.is_some_and(|t| obj.value(v, 0.0) <= t + TARGET_TOL * t.max(1.0));
    let mut step = 0.1;
    for &eps in &SMOOTHING {
        v = riemannian_descent(obj, v, eps, &mut step, &reached);
    }
    let mut best = obj.value(&v, 0.0);
    // random unitary kicks on the decomposition side, kept only on improvement
    let mut scale = 0.3;
    for _ in 0..KICKS {
        if reached(&v) {
            break;
        }
        let u = small_unitary(v.nrows(), scale, rng);
        let mut trial = &u * &v;
        let mut s = 1e-3;
        for &eps in &SMOOTHING[2..] {
            trial = riemannian_descent(obj, trial, eps, &mut s, &reached);
        }
        let ft = obj.value(&trial, 0.0);
        if ft < best {
            best = ft;
            v = trial;
        } else {
            scale *= 0.7;
        }
    }
    (v, best)
}

/// Searches pure-state decompositions `psi_i = sum_j V_ij phi_j` of `rho`
/// for the smallest `sum_i c(psi_i)`.
///
/// Restart 0 starts from the spectral decomposition itself; the others from
/// random isometries. Each start is refined by gradient descent on the
/// manifold of isometries (with the kinks of the objective smoothed away
/// in stages) followed by random unitary perturbations that are kept only
/// when they lower the objective. The result is an upper bound on the
/// convex roof. With a target, restarts after the first are skipped when
/// the first one reaches it.
pub fn roof_direct_search(
    rho: &DensityMatrix,
    spec: &ConcurrenceSpec,
    opts: &RoofOptions,
) -> Result<RoofEstimate> {
    let (ens, _, t) = prepare(rho, spec)?;
    let r = ens.rank();
    let m = opts.members.unwrap_or((2 * r).min(r * r));
    if m < r || m > r * r {
        bail!(Domain, "decomposition size {m} outside {r}..={}", r * r);
    }
    let obj = RoofObjective::new(&t);
    // a pure state has only the trivial decomposition
    let restarts = if r == 1 { 0 } else { opts.restarts.max(1) };
    let run = |i: usize| {
        let mut rng = rng::stream(opts.seed, i as u64);
        let start = if i == 0 {
            CMatrix::identity(m, r)
        } else {
            random_isometry(m, r, &mut rng)
        };
        refine(&obj, start, &mut rng, opts.target)
    };
    let mut results: Vec<(CMatrix, f64)> = Vec::with_capacity(restarts);
    if restarts > 0 {
        results.push(run(0));
        let (_, f0) = &results[0];
        let done = opts.target.is_some_and(|t| *f0 <= t + TARGET_TOL * t.max(1.0));
        if !done {
            results.extend((1..restarts).into_par_iter().map(run).collect::<Vec<_>>());
        }
    }
    // improvements at rounding level do not displace an earlier restart
    let mut best: Option<(CMatrix, f64)> = None;
    for (v, f) in results {
        if best.as_ref().is_none_or(|(_, bf)| f < bf - 1e-12 * bf.abs().max(1.0)) {
            best = Some((v, f));
        }
    }
    let isometry = best.map_or_else(|| CMatrix::identity(m, r), |(v, _)| v);

    let phi = ens.matrix();
    let psi = &phi * isometry.transpose();
    let mut decomposition = Vec::with_capacity(m);
    let mut upper_bound = 0.0;
    for col in psi.column_iter() {
        let amps = col.into_owned();
        if amps.norm_squared() == 0.0 {
            continue;
        }
        let state = StateVector::new(rho.shape().clone(), amps)?;
        upper_bound += evaluate(spec, &state)?;
        decomposition.push(state);
    }
    Ok(RoofEstimate { upper_bound, isometry, decomposition })
}
