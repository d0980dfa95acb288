//! Independent full-space oracles shared by the integration targets.
#![allow(dead_code)]

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pqse::pauli::{Pauli, PauliString, PauliSum};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random real-coefficient Pauli sum plus a random reference bitstring.
pub fn random_system(rng: &mut ChaCha8Rng, n: usize) -> (PauliSum, String) {
    let letters = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    let count = rng.random_range(n..=3 * n);
    let terms: Vec<(f64, PauliString)> = (0..count)
        .map(|_| {
            let s = PauliString::new((0..n).map(|_| letters[rng.random_range(0..4)]).collect()).unwrap();
            (rng.random_range(-1.0..1.0), s)
        })
        .collect();
    let bits: String = (0..n).map(|_| if rng.random_bool(0.5) { '1' } else { '0' }).collect();
    (PauliSum::new(n, terms).unwrap(), bits)
}

/// Random composition of a Krylov order into partition entries.
pub fn random_partition(rng: &mut ChaCha8Rng, order: usize) -> Vec<usize> {
    let mut left = order - 1;
    let mut out = Vec::new();
    while left > 0 {
        let step = rng.random_range(1..=left);
        out.push(step + 1);
        left -= step;
    }
    if out.is_empty() || rng.random_bool(0.2) {
        out.insert(rng.random_range(0..=out.len()), 1);
    }
    out
}

fn single(p: Pauli) -> DMatrix<C64> {
    let (o, l, i) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0));
    match p {
        Pauli::I => DMatrix::from_row_slice(2, 2, &[l, o, o, l]),
        Pauli::X => DMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        Pauli::Y => DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        Pauli::Z => DMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
    }
}

/// Kronecker-product matrix with qubit 0 as the leftmost factor.
pub fn kron_matrix(h: &PauliSum) -> DMatrix<C64> {
    let dim = 1 << h.num_qubits();
    let mut out = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    for (c, s) in h.terms() {
        let mut m = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
        for &p in s.letters() {
            m = m.kronecker(&single(p));
        }
        out += m * C64::new(*c, 0.0);
    }
    out
}

pub fn basis_vector(bits: &str) -> DVector<C64> {
    let index = usize::from_str_radix(bits, 2).unwrap();
    let mut v = DVector::from_element(1 << bits.len(), C64::new(0.0, 0.0));
    v[index] = C64::new(1.0, 0.0);
    v
}

/// `exp(-i t H) v` by scaled Taylor steps.
pub fn taylor_evolve(h: &DMatrix<C64>, v: &DVector<C64>, t: f64) -> DVector<C64> {
    let norm1 = (0..h.ncols()).map(|j| h.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    let steps = ((norm1 * t.abs()) / 0.5).ceil().max(1.0) as usize;
    let m = h * C64::new(0.0, -t / steps as f64);
    let mut out = v.clone();
    for _ in 0..steps {
        let mut term = out.clone();
        let mut acc = out.clone();
        for k in 1..40 {
            term = &m * term / C64::new(k as f64, 0.0);
            acc += &term;
            if term.norm() < 1e-18 * acc.norm() {
                break;
            }
        }
        out = acc;
    }
    out
}

#[derive(Clone, Copy)]
pub enum Generator {
    Power,
    Evolution(f64),
}

pub fn krylov(h: &DMatrix<C64>, psi: &DVector<C64>, q: usize, g: Generator) -> Vec<DVector<C64>> {
    let mut out = vec![psi.clone()];
    for j in 1..q {
        let next = match g {
            Generator::Power => h * &out[j - 1],
            Generator::Evolution(dt) => taylor_evolve(h, psi, j as f64 * dt),
        };
        out.push(next);
    }
    out
}

/// `(H, S)` with `H_ij = <v_i|H|v_j>`, `S_ij = <v_i|v_j>`.
pub fn pencil(h: &DMatrix<C64>, vecs: &[DVector<C64>]) -> (DMatrix<C64>, DMatrix<C64>) {
    let q = vecs.len();
    let hv: Vec<DVector<C64>> = vecs.iter().map(|v| h * v).collect();
    let hh = DMatrix::from_fn(q, q, |i, j| vecs[i].dotc(&hv[j]));
    let ss = DMatrix::from_fn(q, q, |i, j| vecs[i].dotc(&vecs[j]));
    (hh, ss)
}

/// Lowest pencil eigenpair through Cholesky whitening.
pub fn lowest_pair(h: &DMatrix<C64>, s: &DMatrix<C64>) -> (f64, DVector<C64>) {
    let l = Cholesky::new(s.clone()).expect("positive definite overlap").l();
    let linv = l.try_inverse().unwrap();
    let m = &linv * h * linv.adjoint();
    let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(m);
    let k = (0..eig.eigenvalues.len()).min_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b])).unwrap();
    let y = eig.eigenvectors.column(k).into_owned();
    (eig.eigenvalues[k], linv.adjoint() * y)
}

pub fn combine(vecs: &[DVector<C64>], c: &DVector<C64>) -> DVector<C64> {
    let mut out = DVector::from_element(vecs[0].len(), C64::new(0.0, 0.0));
    for (v, &ck) in vecs.iter().zip(c.iter()) {
        out += v * ck;
    }
    out
}

/// Energy and variance of an (unnormalised) state.
pub fn energy_variance(h: &DMatrix<C64>, psi: &DVector<C64>) -> (f64, f64) {
    let hp = h * psi;
    let n = psi.norm_squared();
    let e = psi.dotc(&hp).re / n;
    (e, hp.norm_squared() / n - e * e)
}

pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &DMatrix<C64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `|<a|b>|^2 / (|a|^2 |b|^2)`.
pub fn fidelity(a: &DVector<C64>, b: &DVector<C64>) -> f64 {
    a.dotc(b).norm_sqr() / (a.norm_squared() * b.norm_squared())
}

/// Largest relative discrepancies seen along one forced partition.
#[derive(Debug, Default, Clone, Copy)]
pub struct WalkError {
    pub pencil: f64,
    pub energy: f64,
    pub variance: f64,
    pub state: f64,
}

impl WalkError {
    pub fn worst(&self) -> f64 {
        self.pencil.max(self.energy).max(self.variance).max(self.state)
    }
}

/// Steps through `partition` with the coefficient algebra and, in parallel,
/// with explicit full-space Krylov vectors.
pub fn forced_walk(h: &PauliSum, bits: &str, partition: &[usize], g: Generator) -> WalkError {
    use pqse::pqse::{
        partition_order, reconstruct_state, sub_matrices_power, sub_matrices_rte, Basis, Criterion, KrylovData,
        PartitionState,
    };
    use pqse::simulator::basis_state;
    use pqse::subspace::{compute_moments, rte_tensors};

    let target = partition_order(partition).unwrap();
    let dense = kron_matrix(h);
    let phi0 = basis_state(bits).unwrap();
    let moments;
    let tensors;
    let (data, basis) = match g {
        Generator::Power => {
            moments = compute_moments(h, &phi0, 2 * target).unwrap();
            (KrylovData::Power(&moments), Basis::Power)
        }
        Generator::Evolution(dt) => {
            tensors = rte_tensors(h, &phi0, target, dt).unwrap();
            (KrylovData::Rte(&tensors), Basis::Rte { dt })
        }
    };

    let mut state = PartitionState::initial(data, target, Criterion::SignedVariance).unwrap();
    let mut psi = basis_vector(bits);
    let mut err = WalkError::default();
    let mut ops = 0;
    for &q in partition {
        let vecs = krylov(&dense, &psi, q, g);
        let (bh, bs) = pencil(&dense, &vecs);
        let problem = match data {
            KrylovData::Power(mu) => sub_matrices_power(&state.o, mu, q).unwrap(),
            KrylovData::Rte(t) => sub_matrices_rte(&state.b, t, q).unwrap(),
        };
        let scale = max_abs(&bh).max(max_abs(&bs)).max(1.0);
        err.pencil = err.pencil.max(max_abs_diff(&problem.h, &bh) / scale);
        err.pencil = err.pencil.max(max_abs_diff(&problem.s, &bs) / scale);

        let (e_oracle, c) = lowest_pair(&bh, &bs);
        let next = combine(&vecs, &c);
        let (_, var_oracle) = energy_variance(&dense, &next);
        let cand = state.candidate(data, q, Criterion::SignedVariance, &mut ops).unwrap();
        let e_scale = e_oracle.abs().max(1.0);
        err.energy = err.energy.max((cand.energy - e_oracle).abs() / e_scale);
        if cand.variance.is_finite() {
            err.variance = err.variance.max((cand.variance - var_oracle).abs() / (e_scale * e_scale));
        }
        state.accept(cand);

        let rebuilt = reconstruct_state(&state.b, h, &phi0, basis).unwrap();
        let rebuilt = DVector::from_vec(rebuilt.into_amplitudes());
        err.state = err.state.max((1.0 - fidelity(&rebuilt, &next)).abs());
        err.state = err.state.max((rebuilt.norm() - 1.0).abs());
        psi = &next / C64::new(next.norm(), 0.0);
    }
    err
}
