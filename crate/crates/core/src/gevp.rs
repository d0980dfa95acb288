//! Generalised Hermitian eigenproblems `H c = E S c` by canonical
//! orthogonalisation, with optional thresholding of the overlap spectrum.
//!
//! Plain QSE is [`solve_gevp`] with `tau = 0`: only non-positive overlap
//! eigenvalues are discarded, so tiny positive ones are still inverted.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::simulator::C64;
use crate::subspace::SubspaceProblem;

/// Bounds of the default threshold-scale grid.
pub const DEFAULT_A_RANGE: (f64, f64) = (-0.5, 5.0);
pub const DEFAULT_A_COUNT: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct GevpSolution {
    /// Ritz values in ascending order.
    pub energies: Vec<f64>,
    /// Ground Ritz vector in the original basis, normalised to `c^dag S c = 1`
    /// on the retained image and phased so its largest entry is real positive.
    pub ground_coeffs: Vec<C64>,
    pub retained_dim: usize,
    pub dropped_eigenvalues: Vec<f64>,
}

impl GevpSolution {
    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }
}

/// How the overlap threshold is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdPolicy {
    None,
    Fixed(f64),
    /// `tau = 10^{-a} sqrt(eta_H^2 + eta_S^2)`.
    Scaled(f64),
}

impl ThresholdPolicy {
    pub fn tau(&self, eta_h: f64, eta_s: f64) -> f64 {
        match *self {
            ThresholdPolicy::None => 0.0,
            ThresholdPolicy::Fixed(tau) => tau.max(0.0),
            ThresholdPolicy::Scaled(a) => 10f64.powf(-a) * eta_h.hypot(eta_s),
        }
    }
}

/// Eigenpairs of a Hermitian matrix in ascending order.
pub(crate) fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Spectral norm of a Hermitian matrix.
pub fn hermitian_norm(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let (values, _) = hermitian_eigen(m);
    values[0].abs().max(values[values.len() - 1].abs())
}

fn fix_phase(c: &mut [C64]) {
    let Some(pivot) = c.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())) else {
        return;
    };
    if pivot.norm() > 0.0 {
        let phase = pivot.conj() / pivot.norm();
        c.iter_mut().for_each(|z| *z *= phase);
    }
}

/// Solves the pencil after projecting onto overlap eigenvectors with
/// eigenvalue strictly above `max(tau, 0)`.
pub fn solve_gevp(problem: &SubspaceProblem, tau: f64) -> Result<GevpSolution> {
    let cut = tau.max(0.0);
    let (d, v) = hermitian_eigen(&problem.s);
    let keep: Vec<usize> = (0..d.len()).filter(|&k| d[k] > cut).collect();
    let dropped_eigenvalues: Vec<f64> = (0..d.len()).filter(|&k| d[k] <= cut).map(|k| d[k]).collect();
    if keep.is_empty() {
        return Err(Error::EmptySubspace { tau: cut });
    }

    // X = V_r D_r^{-1/2}
    let dim = problem.dim();
    let x = DMatrix::from_fn(dim, keep.len(), |r, c| v[(r, keep[c])] / d[keep[c]].sqrt());
    let whitened = x.adjoint() * &problem.h * &x;
    let (energies, y) = hermitian_eigen(&whitened);
    let ground = x * DVector::from_iterator(keep.len(), y.column(0).iter().copied());
    let mut ground_coeffs: Vec<C64> = ground.iter().copied().collect();
    fix_phase(&mut ground_coeffs);

    Ok(GevpSolution { energies, ground_coeffs, retained_dim: keep.len(), dropped_eigenvalues })
}

/// Plain QSE: `solve_gevp` at `tau = 0`.
pub fn solve_plain(problem: &SubspaceProblem) -> Result<GevpSolution> {
    solve_gevp(problem, 0.0)
}

/// `10^{-a} sqrt(||dH||^2 + ||dS||^2)` with exact spectral norms.
pub fn scaled_threshold(delta_h: &DMatrix<C64>, delta_s: &DMatrix<C64>, a: f64) -> Result<f64> {
    if !delta_h.is_square() || delta_h.shape() != delta_s.shape() {
        return Err(Error::DimensionMismatch { expected: delta_h.nrows(), found: delta_s.nrows() });
    }
    Ok(ThresholdPolicy::Scaled(a).tau(hermitian_norm(delta_h), hermitian_norm(delta_s)))
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

pub fn default_a_grid() -> Vec<f64> {
    linspace(DEFAULT_A_RANGE.0, DEFAULT_A_RANGE.1, DEFAULT_A_COUNT)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TqseChoice {
    pub a: f64,
    pub tau: f64,
    pub relative_error: f64,
    pub solution: GevpSolution,
}

/// Threshold scan selecting the `a` with the smallest relative error
/// against `truth`. Unsolvable points are skipped; ties keep the earlier
/// grid point.
pub fn tqse_scan(
    noisy: &SubspaceProblem,
    delta_h: &DMatrix<C64>,
    delta_s: &DMatrix<C64>,
    truth: f64,
    grid: &[f64],
) -> Result<TqseChoice> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty threshold grid".into()));
    }
    if truth == 0.0 {
        return Err(Error::InvalidInput("relative error undefined for zero reference energy".into()));
    }
    let eta_h = hermitian_norm(delta_h);
    let eta_s = hermitian_norm(delta_s);
    let mut best: Option<TqseChoice> = None;
    for &a in grid {
        let tau = ThresholdPolicy::Scaled(a).tau(eta_h, eta_s);
        let Ok(solution) = solve_gevp(noisy, tau) else {
            continue;
        };
        let relative_error = ((solution.ground_energy() - truth) / truth).abs();
        if best.as_ref().is_none_or(|b| relative_error < b.relative_error) {
            best = Some(TqseChoice { a, tau, relative_error, solution });
        }
    }
    best.ok_or(Error::NoSolvableCandidate)
}
