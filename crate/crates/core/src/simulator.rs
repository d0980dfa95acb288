//! Dense statevector backend standing in for the quantum device.
//!
//! Basis convention: qubit 0 is the most significant bit of the amplitude
//! index, so `basis_state("10")` puts its weight on index 2. Other modules go
//! through [`basis_state`] rather than computing raw indices.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};

/// Largest qubit count accepted by dense diagonalisation.
pub const MAX_DENSE_QUBITS: usize = 14;

pub type C64 = Complex64;

const I_POWERS: [C64; 4] = [
    C64::new(1.0, 0.0),
    C64::new(0.0, 1.0),
    C64::new(-1.0, 0.0),
    C64::new(0.0, -1.0),
];

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(n: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if n == 0 || n > usize::BITS as usize - 2 {
            return Err(Error::InvalidInput(format!("unsupported qubit count {n}")));
        }
        if amplitudes.len() != 1 << n {
            return Err(Error::DimensionMismatch { expected: 1 << n, found: amplitudes.len() });
        }
        Ok(Self { n, amplitudes })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, vec![C64::new(0.0, 0.0); 1 << n])
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&mut self, factor: C64) {
        self.amplitudes.iter_mut().for_each(|a| *a *= factor);
    }

    /// `self += factor * other`.
    pub fn axpy(&mut self, factor: C64, other: &StateVector) -> Result<()> {
        check_dims(self.n, other.n)?;
        for (a, b) in self.amplitudes.iter_mut().zip(&other.amplitudes) {
            *a += factor * b;
        }
        Ok(())
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::InvalidInput("cannot normalise the zero vector".into()));
        }
        let mut out = self.clone();
        out.scale(C64::new(1.0 / norm, 0.0));
        Ok(out)
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Computational basis state; `bits[0]` is qubit 0.
pub fn basis_state(bits: &str) -> Result<StateVector> {
    let n = bits.len();
    if n == 0 {
        return Err(Error::InvalidInput("basis state on zero qubits".into()));
    }
    let mut index = 0usize;
    for c in bits.chars() {
        index = (index << 1)
            | match c {
                '0' => 0,
                '1' => 1,
                other => return Err(Error::InvalidInput(format!("invalid bit {other:?}"))),
            };
    }
    let mut state = StateVector::zeros(n)?;
    state.amplitudes[index] = C64::new(1.0, 0.0);
    Ok(state)
}

fn apply_string_into(coeff: f64, s: &PauliString, input: &[C64], out: &mut [C64]) {
    let (x, z, n_y) = s.masks();
    let phase = I_POWERS[(n_y % 4) as usize] * coeff;
    for (b, &amp) in input.iter().enumerate() {
        if amp == C64::new(0.0, 0.0) {
            continue;
        }
        let sign = if (b & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        out[b ^ x] += phase * sign * amp;
    }
}

/// `H v`, applied term by term.
pub fn apply_pauli_sum(h: &PauliSum, v: &StateVector) -> Result<StateVector> {
    check_dims(h.num_qubits(), v.n)?;
    let mut out = vec![C64::new(0.0, 0.0); v.amplitudes.len()];
    for (c, s) in h.terms() {
        apply_string_into(*c, s, &v.amplitudes, &mut out);
    }
    Ok(StateVector { n: v.n, amplitudes: out })
}

/// `<u|v>`, conjugating `u`.
pub fn state_overlap(u: &StateVector, v: &StateVector) -> Result<C64> {
    check_dims(u.n, v.n)?;
    Ok(u.amplitudes.iter().zip(&v.amplitudes).map(|(a, b)| a.conj() * b).sum())
}

/// `<v|H|v> / <v|v>`.
pub fn expectation(h: &PauliSum, v: &StateVector) -> Result<f64> {
    let norm_sq = state_overlap(v, v)?.re;
    if norm_sq == 0.0 {
        return Err(Error::InvalidInput("expectation in the zero vector".into()));
    }
    let hv = apply_pauli_sum(h, v)?;
    Ok(state_overlap(v, &hv)?.re / norm_sq)
}

/// Dense matrix of `h` in the computational basis.
pub fn dense_matrix(h: &PauliSum) -> Result<DMatrix<C64>> {
    let n = h.num_qubits();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooManyQubits { n, max: MAX_DENSE_QUBITS });
    }
    let dim = 1usize << n;
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for (c, s) in h.terms() {
        let (x, z, n_y) = s.masks();
        let phase = I_POWERS[(n_y % 4) as usize] * *c;
        for b in 0..dim {
            let sign = if (b & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            m[(b ^ x, b)] += phase * sign;
        }
    }
    Ok(m)
}

/// Full eigendecomposition of a Hamiltonian.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub ground_energy: f64,
    pub ground_state: StateVector,
    pub spectral_norm: f64,
    /// Columns are eigenvectors, in the order of `eigenvalues`.
    eigenvectors: DMatrix<C64>,
}

impl Spectrum {
    pub fn eigenvectors(&self) -> &DMatrix<C64> {
        &self.eigenvectors
    }

    /// `exp(-i H t) v` via the eigenbasis.
    pub fn evolve(&self, v: &StateVector, t: f64) -> Result<StateVector> {
        check_dims(self.eigenvectors.nrows(), v.amplitudes.len())?;
        let input = DVector::from_column_slice(&v.amplitudes);
        let mut coords = self.eigenvectors.ad_mul(&input);
        for (c, &lambda) in coords.iter_mut().zip(&self.eigenvalues) {
            *c *= C64::from_polar(1.0, -lambda * t);
        }
        let out = &self.eigenvectors * coords;
        Ok(StateVector { n: v.n, amplitudes: out.as_slice().to_vec() })
    }
}

/// Dense diagonalisation of `h` (at most [`MAX_DENSE_QUBITS`] qubits).
/// Degenerate ground states resolve to the solver's first eigenvector.
pub fn exact_ground(h: &PauliSum) -> Result<Spectrum> {
    let n = h.num_qubits();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooManyQubits { n, max: MAX_DENSE_QUBITS });
    }
    let dense = dense_matrix(h)?;
    let (values, vectors) = if h.is_real() {
        let real = dense.map(|z| z.re);
        let eig = SymmetricEigen::new(real);
        (eig.eigenvalues.as_slice().to_vec(), eig.eigenvectors.map(|x| C64::new(x, 0.0)))
    } else {
        let eig = SymmetricEigen::new(dense);
        (eig.eigenvalues.as_slice().to_vec(), eig.eigenvectors)
    };

    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| values[k]).collect();
    let eigenvectors = DMatrix::from_fn(vectors.nrows(), vectors.ncols(), |r, c| vectors[(r, order[c])]);

    let ground_state = StateVector { n, amplitudes: eigenvectors.column(0).iter().copied().collect() };
    let lo = eigenvalues[0];
    let hi = *eigenvalues.last().expect("non-empty spectrum");
    Ok(Spectrum {
        ground_energy: lo,
        spectral_norm: lo.abs().max(hi.abs()),
        eigenvalues,
        ground_state,
        eigenvectors,
    })
}

type SpectrumKey = (usize, Vec<(u64, PauliString)>);

fn spectrum_cache() -> &'static RwLock<HashMap<SpectrumKey, Arc<Spectrum>>> {
    static CACHE: OnceLock<RwLock<HashMap<SpectrumKey, Arc<Spectrum>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// [`exact_ground`] memoised per Hamiltonian for the life of the process.
pub fn cached_spectrum(h: &PauliSum) -> Result<Arc<Spectrum>> {
    let key = h.cache_key();
    if let Some(hit) = spectrum_cache().read().expect("spectrum cache poisoned").get(&key) {
        return Ok(Arc::clone(hit));
    }
    let fresh = Arc::new(exact_ground(h)?);
    let mut cache = spectrum_cache().write().expect("spectrum cache poisoned");
    Ok(Arc::clone(cache.entry(key).or_insert(fresh)))
}

/// `exp(-i H t) v`, exact up to the eigensolver's accuracy.
pub fn evolve_state(h: &PauliSum, v: &StateVector, t: f64) -> Result<StateVector> {
    check_dims(h.num_qubits(), v.n)?;
    if t == 0.0 {
        return Ok(v.clone());
    }
    cached_spectrum(h)?.evolve(v, t)
}
