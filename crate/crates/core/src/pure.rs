//! Pure-state concurrences.

use crate::error::{bail, Result};
use crate::projector::{even_expectation, ConcurrenceSpec};
use crate::tensor::{matrix_purity, reduced_from_pure, two_copy_reorder, StateVector, SubsystemSubset};

/// Radicands in `[-RADICAND_CLAMP, 0)` are treated as zero.
pub const RADICAND_CLAMP: f64 = 1e-12;

fn clamped_sqrt(radicand: f64, what: &str) -> Result<f64> {
    if radicand >= 0.0 {
        Ok(radicand.sqrt())
    } else if radicand >= -RADICAND_CLAMP {
        Ok(0.0)
    } else {
        bail!(Numerical, "{what}: negative radicand {radicand:e}")
    }
}

/// Two-copy vector `|psi> (x) |psi>` on `x_i (H_i x H_i)`.
pub fn two_copy_vector(psi: &StateVector) -> Result<crate::tensor::CVector> {
    let amps = psi.amplitudes();
    two_copy_reorder(&amps.kronecker(amps), psi.shape())
}

/// `c(psi) = sqrt(<psi psi|A|psi psi>)`.
///
/// Subnormalized inputs are allowed; the value is homogeneous of degree two
/// in the amplitudes. Odd-minus strings are skipped since their expectation
/// on a twofold copy vanishes identically.
pub fn evaluate(spec: &ConcurrenceSpec, psi: &StateVector) -> Result<f64> {
    spec.shape().ensure_same(psi.shape())?;
    let v = two_copy_vector(psi)?;
    clamped_sqrt(even_expectation(spec, &v)?, "two-copy expectation")
}

/// Purities of the reduced states on every subset, indexed by bitmask
/// (entries 0 and `2^N - 1` are unused). Each value is computed from the
/// smaller side of the cut.
pub fn marginal_purities(psi: &StateVector) -> Result<Vec<f64>> {
    let n = psi.shape().arity();
    let full = (1u64 << n) - 1;
    let mut purities = vec![f64::NAN; 1 << n];
    for mask in 1..full {
        if !purities[mask as usize].is_nan() {
            continue;
        }
        let subset = SubsystemSubset::from_mask(mask, n)?;
        let complement = subset.complement(n);
        let dim = |s: &SubsystemSubset| psi.shape().select(s.members()).total_dim();
        let smaller = if dim(&subset) <= dim(&complement) { &subset } else { &complement };
        let p = matrix_purity(&reduced_from_pure(psi, smaller)?);
        purities[mask as usize] = p;
        purities[(full ^ mask) as usize] = p;
    }
    Ok(purities)
}

/// `C_N` from the purities of all reduced density matrices:
/// `2^(1 - N/2) sqrt((2^N - 2) - sum_S Tr rho_S^2)` with `<psi|psi> = 1`.
pub fn closed_form_cn(psi: &StateVector) -> Result<f64> {
    if !psi.is_normalized() {
        bail!(Validation, "closed-form C_N requires a normalized state (norm^2 = {})", psi.norm_sqr());
    }
    let n = psi.shape().arity();
    if n < 2 {
        bail!(Shape, "C_N needs at least two subsystems");
    }
    let purities = marginal_purities(psi)?;
    let norm2 = psi.norm_sqr();
    let count = (1u64 << n) - 2;
    let sum: f64 = purities[1..=count as usize].iter().sum();
    let radicand = count as f64 * norm2 * norm2 - sum;
    Ok(2f64.powf(1.0 - n as f64 / 2.0) * clamped_sqrt(radicand, "closed-form C_N")?)
}

/// `eta(phi) = sqrt(1 - c(phi)^2 / 4)` for a normalized two-party state.
pub fn eta(phi: &StateVector, spec_bipartite: &ConcurrenceSpec) -> Result<f64> {
    if phi.shape().arity() != 2 {
        bail!(Shape, "eta is defined for two-party states");
    }
    if !phi.is_normalized() {
        bail!(Validation, "eta requires a normalized state");
    }
    let c = evaluate(spec_bipartite, phi)?;
    if c > 2.0 + 1e-10 {
        bail!(Numerical, "concurrence {c} exceeds 2");
    }
    Ok((1.0 - c * c / 4.0).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projector::{named_spec, validate_spec, NamedConcurrence};
    use crate::tensor::{tensor_product, CVector, SystemShape};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn state(dims: Vec<usize>, amps: &[f64]) -> StateVector {
        StateVector::from_unnormalized(
            SystemShape::new(dims).unwrap(),
            CVector::from_iterator(amps.len(), amps.iter().map(|&a| Complex64::new(a, 0.0))),
        )
        .unwrap()
    }

    fn bipartite() -> ConcurrenceSpec {
        named_spec(NamedConcurrence::Bipartite, SystemShape::qubits(2).unwrap()).unwrap()
    }

    #[test]
    fn bell_has_unit_concurrence() {
        let bell = state(vec![2, 2], &[1.0, 0.0, 0.0, 1.0]);
        assert_abs_diff_eq!(evaluate(&bipartite(), &bell).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn ghz3_c3() {
        let ghz = state(vec![2, 2, 2], &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let c3 = named_spec(NamedConcurrence::C3, ghz.shape().clone()).unwrap();
        assert_abs_diff_eq!(evaluate(&c3, &ghz).unwrap(), 1.5f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(closed_form_cn(&ghz).unwrap(), 1.5f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn w3_closed_form() {
        let w = state(vec![2, 2, 2], &[0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        assert_abs_diff_eq!(closed_form_cn(&w).unwrap(), 2.0 / 3f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn product_state_closed_form_vanishes() {
        let zero = state(vec![2], &[1.0, 0.0]);
        let plus = state(vec![2], &[1.0, 1.0]);
        let psi = tensor_product(&tensor_product(&zero, &plus), &zero);
        assert_abs_diff_eq!(closed_form_cn(&psi).unwrap(), 0.0, epsilon = 1e-7);
    }

    #[test]
    fn closed_form_rejects_subnormalized() {
        let bell = state(vec![2, 2], &[1.0, 0.0, 0.0, 1.0]).scaled(0.5).unwrap();
        assert!(closed_form_cn(&bell).is_err());
        assert_abs_diff_eq!(evaluate(&bipartite(), &bell).unwrap(), 0.25, epsilon = 1e-14);
    }

    #[test]
    fn odd_only_spec_is_exactly_zero() {
        let (spec, _) =
            validate_spec(SystemShape::qubits(2).unwrap(), [("+-".parse().unwrap(), 1.0)], true).unwrap();
        let bell = state(vec![2, 2], &[1.0, 0.0, 0.3, 1.0]);
        assert_eq!(evaluate(&spec, &bell).unwrap(), 0.0);
    }

    #[test]
    fn eta_values() {
        let spec = bipartite();
        let prod = state(vec![2, 2], &[1.0, 0.0, 0.0, 0.0]);
        assert_abs_diff_eq!(eta(&prod, &spec).unwrap(), 1.0, epsilon = 1e-14);
        let bell = state(vec![2, 2], &[1.0, 0.0, 0.0, 1.0]);
        assert_abs_diff_eq!(eta(&bell, &spec).unwrap(), 3f64.sqrt() / 2.0, epsilon = 1e-14);
        let partial = state(vec![2, 2], &[0.8f64.sqrt(), 0.0, 0.0, 0.2f64.sqrt()]);
        assert_abs_diff_eq!(evaluate(&spec, &partial).unwrap(), 0.8, epsilon = 1e-14);
        assert_abs_diff_eq!(eta(&partial, &spec).unwrap(), 0.84f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let bell = state(vec![2, 2], &[1.0, 0.0, 0.0, 1.0]);
        let spec = named_spec(NamedConcurrence::Bipartite, SystemShape::new(vec![2, 3]).unwrap()).unwrap();
        assert!(evaluate(&spec, &bell).is_err());
    }
}
