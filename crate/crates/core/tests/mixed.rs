mod common;

use common::{werner, wootters};
use mconc::mixed::{prepare, DEFAULT_CUTOFF};
use mconc::states::{bell, ghz, random_density, random_pure, random_unitary, white_noise_mix, SchmidtWeights};
use mconc::tensor::{two_copy_reorder, CMatrix};
use mconc::{
    chi_vectors, coefficient_matrices, evaluate, exact_rank_one, named_spec, optimize_lower_bound,
    quasi_pure, roof_direct_search, seminorm_bound, spectral_ensemble, tau, BoundOptions, DensityMatrix,
    Error, RoofOptions, StateVector, SystemShape, ZVector,
};
use mconc::mixed::coefficient_matrices_from;
use num_complex::Complex64;

fn spec(name: &str, shape: &SystemShape) -> mconc::ConcurrenceSpec {
    named_spec(name.parse().unwrap(), shape.clone()).unwrap()
}

fn q(n: usize) -> SystemShape {
    SystemShape::qubits(n).unwrap()
}

fn bound(rho: &DensityMatrix, s: &mconc::ConcurrenceSpec, restarts: usize, seed: u64) -> mconc::BoundReport {
    let (_, _, t) = prepare(rho, s).unwrap();
    optimize_lower_bound(&t, &BoundOptions { restarts, tol: 1e-10, seed }).unwrap()
}

#[test]
fn rank_two_ensemble_norms() {
    let psi1 = bell();
    let psi2 = common::real_state(vec![2, 2], &[0.0, 1.0, 1.0, 0.0]);
    let rho = DensityMatrix::mixture(&[(0.7, psi1.projector().unwrap()), (0.3, psi2.projector().unwrap())]).unwrap();
    let ens = spectral_ensemble(&rho, DEFAULT_CUTOFF).unwrap();
    assert_eq!(ens.rank(), 2);
    assert!((ens.members()[0].norm_sqr() - 0.7).abs() < 1e-12);
    assert!((ens.members()[1].norm_sqr() - 0.3).abs() < 1e-12);
}

#[test]
fn coefficient_matrix_examples() {
    let bi = spec("bipartite", &q(2));
    let chis = chi_vectors(&bi).unwrap();
    let ens = spectral_ensemble(&bell().projector().unwrap(), DEFAULT_CUTOFF).unwrap();
    let t = coefficient_matrices(&ens, &chis).unwrap();
    assert_eq!(t.len(), 1);
    assert!((t.mats()[0][(0, 0)].norm() - 1.0).abs() < 1e-12);

    let prod = StateVector::basis(q(3), &[0, 1, 0]).unwrap().projector().unwrap();
    let (_, _, t) = prepare(&prod, &spec("C3", &q(3))).unwrap();
    assert!(t.mats().iter().all(|m| m.norm() < 1e-14));

    let rho = random_density(q(3), 3, 9).unwrap();
    let (_, _, t) = prepare(&rho, &spec("C3", &q(3))).unwrap();
    assert_eq!(t.len(), 9);
    assert!(t.mats().iter().all(|m| m.shape() == (3, 3)));
    assert!(t.symmetry_error() < 1e-10);
}

#[test]
fn a_hat_reconstruction() {
    let shape = SystemShape::new(vec![2, 3]).unwrap();
    let rho = random_density(shape.clone(), 3, 4).unwrap();
    let s = spec("bipartite", &shape);
    let (ens, _, t) = prepare(&rho, &s).unwrap();
    let m = ens.members();
    for j in 0..3 {
        for k in 0..3 {
            let left = two_copy_reorder(&m[j].amplitudes().kronecker(m[k].amplitudes()), &shape).unwrap();
            for l in 0..3 {
                for mm in 0..3 {
                    let right =
                        two_copy_reorder(&m[l].amplitudes().kronecker(m[mm].amplitudes()), &shape).unwrap();
                    let direct = left.dotc(&mconc::apply_a(&s, &right).unwrap());
                    assert!((t.a_hat(j, k, l, mm) - direct).norm() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn tau_examples() {
    let rho = random_density(q(3), 3, 21).unwrap();
    let (_, _, t) = prepare(&rho, &spec("C3", &q(3))).unwrap();
    let z0 = ZVector::normalize(mconc::CVector::from_fn(9, |i, _| Complex64::new(i as f64 - 3.0, 0.5))).unwrap();
    let a = tau(&z0, &t).unwrap();
    assert!((&a - a.transpose()).norm() < 1e-10);
    let phase = Complex64::from_polar(1.0, 0.7);
    let z1 = ZVector::new(z0.as_vector() * phase).unwrap();
    let b = tau(&z1, &t).unwrap();
    assert!((&b - &a * phase).norm() < 1e-12);
    let (va, sa) = seminorm_bound(&a);
    let (vb, sb) = seminorm_bound(&b);
    assert!((va - vb).abs() < 1e-12);
    assert!(sa.iter().zip(&sb).all(|(x, y)| (x - y).abs() < 1e-12));
    assert!(tau(&ZVector::first_axis(3), &t).is_err());

    let (_, _, t1) = prepare(&rho, &spec("c3_1", &q(3))).unwrap();
    let single = tau(&ZVector::first_axis(t1.len()), &t1).unwrap();
    assert!((single - &t1.mats()[0]).norm() == 0.0);
}

#[test]
fn optimized_bound_on_two_qubit_references() {
    let bi = spec("bipartite", &q(2));
    let w = white_noise_mix(&bell(), 0.9).unwrap();
    assert!((bound(&w, &bi, 4, 1).lower_bound - 0.85).abs() < 1e-12);
    assert!((bound(&bell().projector().unwrap(), &bi, 4, 1).lower_bound - 1.0).abs() < 1e-12);
    assert!(bound(&DensityMatrix::maximally_mixed(q(2)), &bi, 4, 1).lower_bound.abs() < 1e-12);
}

#[test]
fn report_is_consistent_with_its_z() {
    let rho = random_density(q(3), 2, 5).unwrap();
    let s = spec("C3", &q(3));
    let (_, _, t) = prepare(&rho, &s).unwrap();
    let rep = optimize_lower_bound(&t, &BoundOptions { restarts: 6, tol: 1e-10, seed: 3 }).unwrap();
    let (v, sv) = seminorm_bound(&tau(&rep.z_opt, &t).unwrap());
    assert!((rep.lower_bound - v).abs() < 1e-12);
    assert_eq!(rep.singular_values.len(), sv.len());
    assert_eq!(rep.restarts_used, 6);
    assert!((rep.z_opt.as_vector().norm() - 1.0).abs() < 1e-12);
}

#[test]
fn rank_one_exactness_against_wootters() {
    let bi = spec("bipartite", &q(2));
    for seed in 0..200u64 {
        let rank = 1 + (seed % 4) as usize;
        let rho = random_density(q(2), rank, seed).unwrap();
        let exact = exact_rank_one(&rho, &bi).unwrap();
        assert!((exact - wootters(rho.matrix())).abs() < 1e-8, "seed {seed} rank {rank}");
    }
    for i in 0..=20 {
        let p = i as f64 / 20.0;
        let rho = white_noise_mix(&bell(), p).unwrap();
        assert!((exact_rank_one(&rho, &bi).unwrap() - werner(p)).abs() < 1e-12);
    }
}

#[test]
fn rank_one_exact_path_on_four_qubits() {
    let c4 = spec("C4", &q(4));
    let g = ghz(&SchmidtWeights::uniform(2).unwrap(), 4, 2).unwrap();
    assert!((exact_rank_one(&g.projector().unwrap(), &c4).unwrap() - 1.0).abs() < 1e-12);
    assert!(exact_rank_one(&white_noise_mix(&g, 0.0).unwrap(), &c4).unwrap().abs() < 1e-12);
    let err = exact_rank_one(&g.projector().unwrap(), &spec("CN", &q(4))).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
}

#[test]
fn quasi_pure_examples() {
    let shape = q(3);
    let s = spec("C3", &shape);
    let chis = chi_vectors(&s).unwrap();
    let psi = random_pure(shape.clone(), 17);
    let ens = spectral_ensemble(&psi.projector().unwrap(), DEFAULT_CUTOFF).unwrap();
    let qp = quasi_pure(&ens, &chis).unwrap();
    assert!((qp.value - evaluate(&s, &psi).unwrap()).abs() < 1e-12);

    let bi = spec("bipartite", &q(2));
    let eps = 1e-3;
    let rho = white_noise_mix(&bell(), 1.0 - eps).unwrap();
    let ens = spectral_ensemble(&rho, DEFAULT_CUTOFF).unwrap();
    let qp = quasi_pure(&ens, &chi_vectors(&bi).unwrap()).unwrap();
    assert!((qp.value - werner(1.0 - eps)).abs() < 0.05);

    let g = ghz(&SchmidtWeights::uniform(2).unwrap(), 4, 2).unwrap();
    // dominant eigenvector is a product state orthogonal to the GHZ component
    let prod = StateVector::basis(q(4), &[0, 0, 1, 1]).unwrap();
    let rho = DensityMatrix::mixture(&[(0.6, prod.projector().unwrap()), (0.4, g.projector().unwrap())]).unwrap();
    let c4 = spec("C4", &q(4));
    let ens = spectral_ensemble(&rho, DEFAULT_CUTOFF).unwrap();
    assert!(matches!(quasi_pure(&ens, &chi_vectors(&c4).unwrap()), Err(Error::Precondition(_))));
}

#[test]
fn quasi_pure_with_degenerate_top_eigenvalue() {
    let bi = spec("bipartite", &q(2));
    let prod = StateVector::basis(q(2), &[0, 1]).unwrap();
    let rho =
        DensityMatrix::mixture(&[(0.5, prod.projector().unwrap()), (0.5, bell().projector().unwrap())]).unwrap();
    let ens = spectral_ensemble(&rho, DEFAULT_CUTOFF).unwrap();
    assert_eq!(ens.dominant_degeneracy(), 2);
    let qp = quasi_pure(&ens, &chi_vectors(&bi).unwrap()).unwrap();
    assert!(qp.degenerate);
}

#[test]
fn roof_examples() {
    let bi = spec("bipartite", &q(2));
    let psi = random_pure(q(2), 8);
    let est = roof_direct_search(&psi.projector().unwrap(), &bi, &RoofOptions::default()).unwrap();
    assert!((est.upper_bound - evaluate(&bi, &psi).unwrap()).abs() < 1e-12);
    assert_eq!(est.isometry.shape(), (1, 1));
    assert!((est.isometry[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-12);

    let w = white_noise_mix(&bell(), 0.9).unwrap();
    let est = roof_direct_search(&w, &bi, &RoofOptions { members: Some(4), restarts: 4, seed: 2, target: None }).unwrap();
    assert!((est.upper_bound - 0.85).abs() < 1e-3, "{}", est.upper_bound);

    let mixed = DensityMatrix::maximally_mixed(q(2));
    let est = roof_direct_search(&mixed, &bi, &RoofOptions { members: Some(4), restarts: 4, seed: 2, target: None }).unwrap();
    assert!(est.upper_bound <= 1e-6, "{}", est.upper_bound);

    assert!(roof_direct_search(&w, &bi, &RoofOptions { members: Some(3), ..Default::default() }).is_err());
    assert!(roof_direct_search(&w, &bi, &RoofOptions { members: Some(17), ..Default::default() }).is_err());
}

#[test]
fn roof_estimate_invariants() {
    let s = spec("C3", &q(3));
    let rho = random_density(q(3), 3, 12).unwrap();
    let est = roof_direct_search(&rho, &s, &RoofOptions { members: None, restarts: 3, seed: 1, target: None }).unwrap();
    let v = &est.isometry;
    assert!((v.adjoint() * v - CMatrix::identity(3, 3)).norm() < 1e-10);
    let mut sum = CMatrix::zeros(8, 8);
    let mut total = 0.0;
    for psi in &est.decomposition {
        sum += psi.amplitudes() * psi.amplitudes().adjoint();
        total += evaluate(&s, psi).unwrap();
    }
    assert!((sum - rho.matrix()).norm() < 1e-8);
    assert!((total - est.upper_bound).abs() < 1e-10);
}

#[test]
fn sandwich_and_two_qubit_convergence() {
    let c3 = spec("C3", &q(3));
    for seed in 0..12u64 {
        let rank = 2 + (seed % 3) as usize;
        let rho = random_density(q(3), rank, seed).unwrap();
        let lower = bound(&rho, &c3, 6, seed).lower_bound;
        let upper = roof_direct_search(&rho, &c3, &RoofOptions { members: None, restarts: 3, seed, target: None }).unwrap();
        assert!(lower <= upper.upper_bound + 1e-6, "seed {seed}: {lower} > {}", upper.upper_bound);
    }
    let bi = spec("bipartite", &q(2));
    for seed in 0..12u64 {
        let rank = 1 + (seed % 4) as usize;
        let rho = random_density(q(2), rank, seed + 40).unwrap();
        let exact = wootters(rho.matrix());
        let lower = bound(&rho, &bi, 4, seed).lower_bound;
        assert!((lower - exact).abs() < 1e-8);
        let upper = roof_direct_search(&rho, &bi, &RoofOptions { members: None, restarts: 4, seed, target: None }).unwrap();
        assert!((upper.upper_bound - exact).abs() < 1e-3, "seed {seed} rank {rank}: {} vs {exact}", upper.upper_bound);
    }
}

#[test]
fn ensemble_covariance() {
    let rho = random_density(q(3), 3, 31).unwrap();
    let s = spec("C3", &q(3));
    let (ens, chis, t) = prepare(&rho, &s).unwrap();
    let mut rng = mconc::rng::stream(4, 0);
    let v = random_unitary(3, &mut rng);
    // psi_i = sum_j V_ij phi_j
    let mixed = ens.matrix() * v.transpose();
    let tv = coefficient_matrices_from(&mixed, &chis).unwrap();
    let vc = v.map(|z| z.conj());
    for (a, b) in t.mats().iter().zip(tv.mats()) {
        assert!((&vc * a * vc.transpose() - b).norm() < 1e-10);
    }
    for seed in 0..5 {
        let z = ZVector::normalize(random_pure(SystemShape::new(vec![9]).unwrap(), seed).into_amplitudes()).unwrap();
        let before = seminorm_bound(&tau(&z, &t).unwrap()).0;
        let after = seminorm_bound(&tau(&z, &tv).unwrap()).0;
        assert!((before - after).abs() < 1e-10);
    }
}

#[test]
fn pure_inputs_agree_on_every_path() {
    for (shape, name) in [(q(2), "bipartite"), (q(3), "C3"), (q(3), "c3_2"), (q(4), "C4"), (q(4), "CN")] {
        let s = spec(name, &shape);
        for seed in 0..3 {
            let psi = random_pure(shape.clone(), seed);
            let rho = psi.projector().unwrap();
            let direct = evaluate(&s, &psi).unwrap();
            let (ens, chis, _) = prepare(&rho, &s).unwrap();
            let lower = bound(&rho, &s, 2, seed).lower_bound;
            let qp = quasi_pure(&ens, &chis).unwrap().value;
            let roof = roof_direct_search(&rho, &s, &RoofOptions::default()).unwrap().upper_bound;
            assert!((lower - direct).abs() < 1e-8, "{name}");
            assert!((qp - direct).abs() < 1e-8, "{name}");
            assert!((roof - direct).abs() < 1e-8, "{name}");
            if chis.len() == 1 {
                assert!((exact_rank_one(&rho, &s).unwrap() - direct).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn more_restarts_never_hurt() {
    let rho = random_density(q(3), 4, 77).unwrap();
    let (_, _, t) = prepare(&rho, &spec("C3", &q(3))).unwrap();
    let mut last = f64::NEG_INFINITY;
    for restarts in [1, 2, 4, 8] {
        let v = optimize_lower_bound(&t, &BoundOptions { restarts, tol: 1e-10, seed: 5 }).unwrap().lower_bound;
        assert!(v >= last);
        last = v;
    }
}

#[test]
fn separable_mixtures_have_zero_bound() {
    use mconc::states::product_density;
    let c3 = spec("C3", &q(3));
    for seed in 0..5u64 {
        let parts: Vec<(f64, DensityMatrix)> = (0..3)
            .map(|i| {
                let factors: Vec<DensityMatrix> = (0..3)
                    .map(|j| random_density(q(1), 1 + (i + j) % 2, seed * 100 + (i * 3 + j) as u64).unwrap())
                    .collect();
                (1.0 / 3.0, product_density(&factors).unwrap())
            })
            .collect();
        let rho = DensityMatrix::mixture(&parts).unwrap();
        assert!(bound(&rho, &c3, 4, seed).lower_bound <= 1e-8);
    }
}
