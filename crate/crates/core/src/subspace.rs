//! Raw subspace data: Hamiltonian moments for the power basis, and
//! overlap/energy tensors for the real-time-evolution basis.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::simulator::{apply_pauli_sum, cached_spectrum, evolve_state, state_overlap, StateVector, C64};

/// Moments beyond this magnitude abort moment generation.
pub const MOMENT_OVERFLOW: f64 = 1e290;

const NORM_TOLERANCE: f64 = 1e-10;

/// `mu_k = <phi0|H^k|phi0>` for `k = 0..=K`, with `mu_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence {
    values: Vec<f64>,
}

impl MomentSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.first() != Some(&1.0) {
            return Err(Error::InvalidInput("moment sequence must start with mu_0 = 1".into()));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Highest available power `K`.
    pub fn max_power(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, k: usize) -> Result<f64> {
        self.values
            .get(k)
            .copied()
            .ok_or(Error::InsufficientMoments { needed: k, available: self.max_power() })
    }

    /// Prefix `mu_0..=mu_k`.
    pub fn truncated(&self, k: usize) -> Result<Self> {
        if k > self.max_power() {
            return Err(Error::InsufficientMoments { needed: k, available: self.max_power() });
        }
        Ok(Self { values: self.values[..=k].to_vec() })
    }
}

/// A Hermitian pencil `(H, S)` of order `dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceProblem {
    pub h: DMatrix<C64>,
    pub s: DMatrix<C64>,
}

impl SubspaceProblem {
    pub fn new(h: DMatrix<C64>, s: DMatrix<C64>) -> Result<Self> {
        if !h.is_square() || h.shape() != s.shape() {
            return Err(Error::DimensionMismatch { expected: h.nrows(), found: s.ncols() });
        }
        Ok(Self { h, s })
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    /// Largest deviation from Hermiticity across both matrices.
    pub fn hermiticity_defect(&self) -> f64 {
        let defect = |m: &DMatrix<C64>| (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        defect(&self.h).max(defect(&self.s))
    }

    /// Leading `r x r` block.
    pub fn leading(&self, r: usize) -> Result<Self> {
        if r == 0 || r > self.dim() {
            return Err(Error::InvalidInput(format!("order {r} outside 1..={}", self.dim())));
        }
        Ok(Self { h: self.h.view((0, 0), (r, r)).into_owned(), s: self.s.view((0, 0), (r, r)).into_owned() })
    }
}

fn check_unit(phi0: &StateVector) -> Result<()> {
    let norm = phi0.norm();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized(norm));
    }
    Ok(())
}

/// Moments through power `k_max` by forward recursion `v_j = H v_{j-1}`.
///
/// Each moment is formed as `<v_a|v_b>` with `a + b = k` and `a = floor(k/2)`,
/// so even moments are squared norms and only `ceil(k_max / 2)` applications
/// of `H` are needed.
pub fn compute_moments(h: &PauliSum, phi0: &StateVector, k_max: usize) -> Result<MomentSequence> {
    check_unit(phi0)?;
    if h.num_qubits() != phi0.num_qubits() {
        return Err(Error::DimensionMismatch { expected: h.num_qubits(), found: phi0.num_qubits() });
    }
    let depth = k_max.div_ceil(2);
    let mut powers = Vec::with_capacity(depth + 1);
    powers.push(phi0.clone());
    for j in 0..depth {
        let next = apply_pauli_sum(h, &powers[j])?;
        powers.push(next);
    }
    let mut values = Vec::with_capacity(k_max + 1);
    values.push(1.0);
    for k in 1..=k_max {
        let a = k / 2;
        let mu = state_overlap(&powers[a], &powers[k - a])?.re;
        if !mu.is_finite() || mu.abs() > MOMENT_OVERFLOW {
            return Err(Error::MomentOverflow { index: k, value: mu });
        }
        values.push(mu);
    }
    Ok(MomentSequence { values })
}

/// Hankel pencil `S_ij = mu_{i+j}`, `H_ij = mu_{i+j+1}` of order `r`.
pub fn hankel_matrices(moments: &MomentSequence, r: usize) -> Result<SubspaceProblem> {
    if r == 0 {
        return Err(Error::InvalidInput("Krylov order must be at least 1".into()));
    }
    let needed = 2 * r - 1;
    if moments.max_power() < needed {
        return Err(Error::InsufficientMoments { needed, available: moments.max_power() });
    }
    let mu = moments.values();
    let s = DMatrix::from_fn(r, r, |i, j| C64::new(mu[i + j], 0.0));
    let h = DMatrix::from_fn(r, r, |i, j| C64::new(mu[i + j + 1], 0.0));
    Ok(SubspaceProblem { h, s })
}

/// Matrix elements between `|psi_j> = exp(-i j dt H)|phi0>`, `j < order`.
#[derive(Debug, Clone, PartialEq)]
pub struct RteTensors {
    /// `<psi_i|psi_j>`
    pub s: DMatrix<C64>,
    /// `<psi_i|H|psi_j>`
    pub h1: DMatrix<C64>,
    /// `<psi_i|H^2|psi_j>`
    pub h2: DMatrix<C64>,
    pub dt: f64,
}

impl RteTensors {
    pub fn order(&self) -> usize {
        self.s.nrows()
    }

    /// Tensors restricted to the first `r` evolution times.
    pub fn leading(&self, r: usize) -> Result<Self> {
        if r == 0 || r > self.order() {
            return Err(Error::InvalidInput(format!("order {r} outside 1..={}", self.order())));
        }
        let cut = |m: &DMatrix<C64>| m.view((0, 0), (r, r)).into_owned();
        Ok(Self { s: cut(&self.s), h1: cut(&self.h1), h2: cut(&self.h2), dt: self.dt })
    }

    /// Plain QSE pencil `(H1, S)`.
    pub fn problem(&self) -> SubspaceProblem {
        SubspaceProblem { h: self.h1.clone(), s: self.s.clone() }
    }
}

/// `pi / ||H||`.
pub fn default_dt(h: &PauliSum) -> Result<f64> {
    let norm = cached_spectrum(h)?.spectral_norm;
    if norm == 0.0 {
        return Err(Error::InvalidInput("zero Hamiltonian has no default timestep".into()));
    }
    Ok(PI / norm)
}

/// Builds the evolution-basis tensors by explicit time evolution.
///
/// Only the upper triangle is evaluated; the lower triangle is its mirror,
/// `S` has an exact unit diagonal and the diagonals of `H1`, `H2` are real.
pub fn rte_tensors(h: &PauliSum, phi0: &StateVector, order: usize, dt: f64) -> Result<RteTensors> {
    check_unit(phi0)?;
    if h.num_qubits() != phi0.num_qubits() {
        return Err(Error::DimensionMismatch { expected: h.num_qubits(), found: phi0.num_qubits() });
    }
    if order == 0 {
        return Err(Error::InvalidInput("Krylov order must be at least 1".into()));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidInput(format!("timestep must be positive, got {dt}")));
    }
    let states = (0..order)
        .map(|j| evolve_state(h, phi0, j as f64 * dt))
        .collect::<Result<Vec<_>>>()?;
    let h_states = states.iter().map(|v| apply_pauli_sum(h, v)).collect::<Result<Vec<_>>>()?;

    let zero = C64::new(0.0, 0.0);
    let mut s = DMatrix::from_element(order, order, zero);
    let mut h1 = s.clone();
    let mut h2 = s.clone();
    for i in 0..order {
        s[(i, i)] = C64::new(1.0, 0.0);
        h1[(i, i)] = C64::new(state_overlap(&states[i], &h_states[i])?.re, 0.0);
        h2[(i, i)] = C64::new(state_overlap(&h_states[i], &h_states[i])?.re, 0.0);
        for j in i + 1..order {
            let sij = state_overlap(&states[i], &states[j])?;
            let h1ij = state_overlap(&states[i], &h_states[j])?;
            let h2ij = state_overlap(&h_states[i], &h_states[j])?;
            s[(i, j)] = sij;
            s[(j, i)] = sij.conj();
            h1[(i, j)] = h1ij;
            h1[(j, i)] = h1ij.conj();
            h2[(i, j)] = h2ij;
            h2[(j, i)] = h2ij.conj();
        }
    }
    Ok(RteTensors { s, h1, h2, dt })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::basis_state;

    fn zz() -> PauliSum {
        PauliSum::new(2, vec![(1.0, "ZZ".parse().unwrap())]).unwrap()
    }

    fn plus_plus() -> StateVector {
        StateVector::new(2, vec![C64::new(0.5, 0.0); 4]).unwrap()
    }

    #[test]
    fn zz_moments_alternate() {
        let mu = compute_moments(&zz(), &plus_plus(), 4).unwrap();
        let expect = [1.0, 0.0, 1.0, 0.0, 1.0];
        for (a, b) in mu.values().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn eigenstate_moments_are_one() {
        let z = PauliSum::new(1, vec![(1.0, "Z".parse().unwrap())]).unwrap();
        let mu = compute_moments(&z, &basis_state("0").unwrap(), 3).unwrap();
        assert_eq!(mu.values(), &[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(compute_moments(&z, &basis_state("0").unwrap(), 0).unwrap().values(), &[1.0]);
    }

    #[test]
    fn unnormalised_reference_rejected() {
        let mut v = plus_plus();
        v.scale(C64::new(1.1, 0.0));
        assert!(matches!(compute_moments(&zz(), &v, 2), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn overflow_guard_trips() {
        let big = PauliSum::new(1, vec![(1e30, "Z".parse().unwrap())]).unwrap();
        let err = compute_moments(&big, &basis_state("0").unwrap(), 12).unwrap_err();
        assert!(matches!(err, Error::MomentOverflow { index: 10, .. }), "{err}");
    }

    #[test]
    fn hankel_from_zz_moments() {
        let mu = MomentSequence::new(vec![1.0, 0.0, 1.0, 0.0]).unwrap();
        let p = hankel_matrices(&mu, 2).unwrap();
        let re = |m: &DMatrix<C64>| m.map(|z| z.re);
        assert_eq!(re(&p.s), DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]));
        assert_eq!(re(&p.h), DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));

        let p1 = hankel_matrices(&mu, 1).unwrap();
        assert_eq!(p1.s[(0, 0)].re, 1.0);
        assert_eq!(p1.h[(0, 0)].re, 0.0);

        let short = MomentSequence::new(vec![1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(hankel_matrices(&short, 2), Err(Error::InsufficientMoments { .. })));
    }

    #[test]
    fn rte_defaults_and_hermiticity() {
        let h = zz();
        let dt = default_dt(&h).unwrap();
        assert!((dt - PI).abs() < 1e-12);
        let t = rte_tensors(&h, &plus_plus(), 3, 0.4).unwrap();
        assert_eq!(t.s[(0, 0)], C64::new(1.0, 0.0));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(t.s[(i, j)], t.s[(j, i)].conj());
                assert_eq!(t.h1[(i, j)], t.h1[(j, i)].conj());
                assert_eq!(t.h2[(i, j)], t.h2[(j, i)].conj());
            }
        }
        assert!(rte_tensors(&h, &plus_plus(), 3, 0.0).is_err());
        assert!(rte_tensors(&h, &basis_state("000").unwrap(), 3, 0.1).is_err());
    }
}
