mod common;

use common::*;
use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64 as C64;
use rand::Rng;

use pqse::gevp::solve_plain;
use pqse::harness::{prepare_system, SystemSpec};
use pqse::pauli::parse_pauli_file;
use pqse::pqse::{outer_coeffs, pqse_run, reconstruct_state, Basis, Criterion, KrylovData};
use pqse::simulator::{apply_pauli_sum, basis_state, evolve_state, exact_ground, state_overlap, StateVector};
use pqse::subspace::{compute_moments, default_dt, hankel_matrices, rte_tensors};

fn dvec(v: &StateVector) -> DVector<C64> {
    DVector::from_column_slice(v.amplitudes())
}

fn random_state(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> StateVector {
    let amps = (0..1 << n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    StateVector::new(n, amps).unwrap().normalized().unwrap()
}

/// Condition number of the full Krylov overlap at `order`, used to skip
/// systems whose reference barely leaves an invariant subspace.
fn krylov_condition(h: &pqse::pauli::PauliSum, bits: &str, order: usize, g: Generator) -> f64 {
    let dense = kron_matrix(h);
    let vecs = krylov(&dense, &basis_vector(bits), order, g);
    let (_, s) = pencil(&dense, &vecs);
    let eig = SymmetricEigen::new(s).eigenvalues;
    let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    if lo <= 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

#[test]
fn matvec_matches_kronecker_matrix() {
    let mut rng = rng(11);
    for n in 1..=6 {
        let (h, _) = random_system(&mut rng, n);
        let v = random_state(&mut rng, n);
        let got = dvec(&apply_pauli_sum(&h, &v).unwrap());
        let want = kron_matrix(&h) * dvec(&v);
        assert!((got - want).norm() < 1e-12, "n = {n}");
    }
}

#[test]
fn evolution_matches_taylor_and_composes() {
    let mut rng = rng(12);
    for n in 2..=5 {
        let (h, _) = random_system(&mut rng, n);
        let v = random_state(&mut rng, n);
        let dense = kron_matrix(&h);
        let (t1, t2) = (0.37, 1.21);
        let direct = dvec(&evolve_state(&h, &v, t1 + t2).unwrap());
        let composed = dvec(&evolve_state(&h, &evolve_state(&h, &v, t1).unwrap(), t2).unwrap());
        assert!((&direct - &composed).norm() < 1e-11);
        assert!((&direct - taylor_evolve(&dense, &dvec(&v), t1 + t2)).norm() < 1e-10);
        assert!((direct.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn ground_energy_is_variational_floor() {
    let mut rng = rng(13);
    for n in 2..=6 {
        let (h, _) = random_system(&mut rng, n);
        let spectrum = exact_ground(&h).unwrap();
        let dense = kron_matrix(&h);
        let eig = SymmetricEigen::new(dense.clone()).eigenvalues;
        let lowest = eig.iter().copied().fold(f64::INFINITY, f64::min);
        assert!((spectrum.ground_energy - lowest).abs() < 1e-10);
        for _ in 0..5 {
            let v = random_state(&mut rng, n);
            let (e, var) = energy_variance(&dense, &dvec(&v));
            assert!(e >= spectrum.ground_energy - 1e-12);
            assert!(var >= -1e-12);
        }
    }
}

#[test]
fn hankel_pencils_match_explicit_krylov_vectors() {
    let mut rng = rng(14);
    for n in 3..=5 {
        let (h, bits) = random_system(&mut rng, n);
        let mu = compute_moments(&h, &basis_state(&bits).unwrap(), 10).unwrap();
        let dense = kron_matrix(&h);
        let (bh, bs) = pencil(&dense, &krylov(&dense, &basis_vector(&bits), 5, Generator::Power));
        let p = hankel_matrices(&mu, 5).unwrap();
        let scale = max_abs(&bh).max(max_abs(&bs));
        assert!(max_abs_diff(&p.h, &bh) < 1e-12 * scale);
        assert!(max_abs_diff(&p.s, &bs) < 1e-12 * scale);
    }
}

#[test]
fn evolution_tensors_match_explicit_states() {
    let mut rng = rng(15);
    let (h, bits) = random_system(&mut rng, 4);
    let dt = default_dt(&h).unwrap();
    let t = rte_tensors(&h, &basis_state(&bits).unwrap(), 5, dt).unwrap();
    let dense = kron_matrix(&h);
    let vecs = krylov(&dense, &basis_vector(&bits), 5, Generator::Evolution(dt));
    let (bh, bs) = pencil(&dense, &vecs);
    let hh: Vec<DVector<C64>> = vecs.iter().map(|v| &dense * v).collect();
    let b2 = nalgebra::DMatrix::from_fn(5, 5, |i, j| hh[i].dotc(&hh[j]));
    assert!(max_abs_diff(&t.s, &bs) < 1e-10);
    assert!(max_abs_diff(&t.h1, &bh) < 1e-10 * max_abs(&bh).max(1.0));
    assert!(max_abs_diff(&t.h2, &b2) < 1e-10 * max_abs(&b2).max(1.0));
}

#[test]
fn forced_partitions_match_full_space_both_bases() {
    let mut rng = rng(16);
    let mut checked = 0;
    while checked < 8 {
        let n = rng.random_range(3..=5);
        let (h, bits) = random_system(&mut rng, n);
        let order = rng.random_range(2..=5);
        let dt = match default_dt(&h) {
            Ok(dt) => dt,
            Err(_) => continue,
        };
        if krylov_condition(&h, &bits, order, Generator::Power) > 1e8 {
            continue;
        }
        let partition = random_partition(&mut rng, order);
        for g in [Generator::Power, Generator::Evolution(dt)] {
            let err = forced_walk(&h, &bits, &partition, g);
            assert!(err.worst() < 1e-9, "partition {partition:?}: {err:?}");
        }
        checked += 1;
    }
}

#[test]
fn reconstructed_norm_equals_weighted_moments() {
    let mut rng = rng(17);
    let (h, bits) = random_system(&mut rng, 4);
    let phi0 = basis_state(&bits).unwrap();
    let mu = compute_moments(&h, &phi0, 8).unwrap();
    let b: Vec<C64> = (0..4).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let psi = reconstruct_state(&b, &h, &phi0, Basis::Power).unwrap();
    let o = outer_coeffs(&b).unwrap();
    assert_eq!(o.len(), 2 * b.len() - 1);
    let weighted: f64 = o.iter().zip(mu.values()).map(|(w, m)| w * m).sum();
    let norm_sq = state_overlap(&psi, &psi).unwrap().re;
    assert!((weighted - norm_sq).abs() < 1e-10 * norm_sq.max(1.0));
}

#[test]
fn three_site_ring_converges_to_ground_state() {
    let system = prepare_system(&SystemSpec::SpinRing { n: 3, coupling: 0.5, disorder: 1.0, seed: 4 }, false).unwrap();
    let truth = system.truth();
    let mu = compute_moments(&system.hamiltonian, &system.reference, 16).unwrap();
    let run = pqse_run(KrylovData::Power(&mu), 8, Criterion::Variance).unwrap();
    assert!((run.energy - truth).abs() < 1e-8, "{} vs {truth}", run.energy);
    let psi = reconstruct_state(&run.b, &system.hamiltonian, &system.reference, Basis::Power).unwrap();
    let fid = state_overlap(&system.spectrum.ground_state, &psi).unwrap().norm_sqr() / state_overlap(&psi, &psi).unwrap().re;
    assert!(fid >= 0.999, "fidelity {fid}");
    assert!(run.order() <= 8);
}

#[test]
fn fixture_file_solves_exactly() {
    let text = include_str!("../fixtures/xxz4.pauli");
    let file = parse_pauli_file(text).unwrap();
    assert_eq!(file.reference.as_deref(), Some("1010"));
    let dense = kron_matrix(&file.hamiltonian);
    let lowest = SymmetricEigen::new(dense).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let mu = compute_moments(&file.hamiltonian, &basis_state("1010").unwrap(), 12).unwrap();
    let e = solve_plain(&hankel_matrices(&mu, 6).unwrap()).unwrap().ground_energy();
    assert!((e - lowest).abs() < 1e-9);
}
