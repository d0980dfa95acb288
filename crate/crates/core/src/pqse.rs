//! Partitioned subspace expansion.
//!
//! A run grows a sequence of small Krylov problems `K_{r_1}, K_{r_2}, ...`,
//! each seeded with the previous ground state, and chooses every `r_k` by
//! minimising the energy variance of the candidate state. Iterates are never
//! materialised: they are tracked as coefficient vectors over the original
//! basis and every matrix element is a linear combination of the measured
//! reference-state data.
//!
//! * Power basis (`A = H`): inner-product weights `o_m` with
//!   `<psi|H^k|psi> = sum_m o_m mu_{k+m}`, `|o| = 2 O(R) - 1`.
//! * Any basis: reconstruction weights `b_m` with `|psi> = sum_m b_m A^m |phi0>`,
//!   `|b| = O(R)`. In the power basis `o_m = sum_{k+l=m} conj(b_k) b_l`.
//!
//! Classical cost per iteration is dominated by building and solving the
//! candidate pencils, `O(R^4)` overall; [`PqseResult::arithmetic_ops`]
//! counts the multiply-adds spent on coefficient algebra and pencil assembly.

use std::ops::{Add, Mul};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::gevp::{solve_plain, GevpSolution};
use crate::pauli::PauliSum;
use crate::simulator::{apply_pauli_sum, evolve_state, StateVector, C64, MAX_DENSE_QUBITS};
use crate::subspace::{MomentSequence, RteTensors, SubspaceProblem};

/// `O(R) = 1 - P + sum_k r_k`.
pub fn partition_order(sequence: &[usize]) -> Result<usize> {
    if sequence.is_empty() {
        return Err(Error::InvalidInput("empty partition sequence".into()));
    }
    if sequence.contains(&0) {
        return Err(Error::InvalidInput("partition entries must be positive".into()));
    }
    Ok(1 + sequence.iter().map(|r| r - 1).sum::<usize>())
}

/// Full discrete convolution.
pub fn convolve_coeffs<T>(a: &[T], b: &[T]) -> Vec<T>
where
    T: Copy + Default + Add<Output = T> + Mul<Output = T>,
{
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![T::default(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = out[i + j] + x * y;
        }
    }
    out
}

/// `o_y = sum_{k+l=y} conj(c_k) c_l`, length `2r - 1`.
pub fn outer_coeffs(c: &[C64]) -> Result<Vec<f64>> {
    if c.is_empty() {
        return Err(Error::InvalidInput("empty coefficient vector".into()));
    }
    let conj: Vec<C64> = c.iter().map(|z| z.conj()).collect();
    let full = convolve_coeffs(&conj, c);
    let scale: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    debug_assert!(full.iter().all(|z| z.im.abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE)));
    Ok(full.into_iter().map(|z| z.re).collect())
}

/// Reconstruction weights after one more iteration with solution `c`.
pub fn b_update(b_old: &[C64], c: &[C64]) -> Vec<C64> {
    convolve_coeffs(b_old, c)
}

/// Order-`q` Hankel pencil of the iterate described by `o`:
/// `S_ij = sum_m o_m mu_{i+j+m}`, `H_ij = sum_m o_m mu_{i+j+m+1}`.
pub fn sub_matrices_power(o: &[f64], moments: &MomentSequence, q: usize) -> Result<SubspaceProblem> {
    if o.is_empty() || q == 0 {
        return Err(Error::InvalidInput("need non-empty weights and q >= 1".into()));
    }
    let needed = 2 * (q - 1) + o.len();
    if moments.max_power() < needed {
        return Err(Error::InsufficientMoments { needed, available: moments.max_power() });
    }
    let mu = moments.values();
    let shifted = |k: usize| o.iter().enumerate().fold(0.0, |acc, (m, w)| acc + w * mu[k + m]);
    let diag_s: Vec<f64> = (0..2 * q - 1).map(shifted).collect();
    let diag_h: Vec<f64> = (0..2 * q - 1).map(|k| shifted(k + 1)).collect();
    Ok(SubspaceProblem {
        s: DMatrix::from_fn(q, q, |i, j| C64::new(diag_s[i + j], 0.0)),
        h: DMatrix::from_fn(q, q, |i, j| C64::new(diag_h[i + j], 0.0)),
    })
}

/// Norm, energy and variance of the power-basis state with weights `o`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateStatistics {
    pub norm: f64,
    pub energy: f64,
    pub variance: f64,
}

/// `N = sum o_m mu_m`, `E = sum o_m mu_{m+1} / N`,
/// `var = sum o_m mu_{m+2} / N - E^2`. The variance is returned raw and may
/// be negative for noisy data.
pub fn candidate_statistics(o: &[f64], moments: &MomentSequence) -> Result<StateStatistics> {
    if o.is_empty() {
        return Err(Error::InvalidInput("empty weights".into()));
    }
    let needed = o.len() + 1;
    if moments.max_power() < needed {
        return Err(Error::InsufficientMoments { needed, available: moments.max_power() });
    }
    let mu = moments.values();
    let form = |shift: usize| o.iter().enumerate().fold(0.0, |acc, (m, w)| acc + w * mu[m + shift]);
    let norm = form(0);
    if !(norm > 0.0) {
        return Err(Error::NonPositiveNorm(norm));
    }
    let energy = form(1) / norm;
    Ok(StateStatistics { norm, energy, variance: form(2) / norm - energy * energy })
}

/// Energy-only statistics (no `H^2` data needed).
fn power_energy(o: &[f64], moments: &MomentSequence) -> Result<(f64, f64)> {
    let needed = o.len();
    if moments.max_power() < needed {
        return Err(Error::InsufficientMoments { needed, available: moments.max_power() });
    }
    let mu = moments.values();
    let form = |shift: usize| o.iter().enumerate().fold(0.0, |acc, (m, w)| acc + w * mu[m + shift]);
    let norm = form(0);
    if !(norm > 0.0) {
        return Err(Error::NonPositiveNorm(norm));
    }
    Ok((norm, form(1) / norm))
}

/// `sum_{m,m'} conj(b_m) b_{m'} T[m+i][m'+j]`.
fn bilinear(b: &[C64], t: &DMatrix<C64>, i: usize, j: usize) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (m, bm) in b.iter().enumerate() {
        let mut row = C64::new(0.0, 0.0);
        for (mp, bmp) in b.iter().enumerate() {
            row += t[(m + i, mp + j)] * bmp;
        }
        acc += bm.conj() * row;
    }
    acc
}

/// Order-`q` pencil of the iterate `sum_m b_m A^m |phi0>` over the evolution
/// tensors.
pub fn sub_matrices_rte(b: &[C64], tensors: &RteTensors, q: usize) -> Result<SubspaceProblem> {
    if b.is_empty() || q == 0 {
        return Err(Error::InvalidInput("need non-empty weights and q >= 1".into()));
    }
    let needed = b.len() + q - 2;
    if needed >= tensors.order() {
        return Err(Error::CoverageExceeded { needed, order: tensors.order() });
    }
    let mut s = DMatrix::from_element(q, q, C64::new(0.0, 0.0));
    let mut h = s.clone();
    for i in 0..q {
        for j in i..q {
            let sij = bilinear(b, &tensors.s, i, j);
            let hij = bilinear(b, &tensors.h1, i, j);
            if i == j {
                s[(i, i)] = C64::new(sij.re, 0.0);
                h[(i, i)] = C64::new(hij.re, 0.0);
            } else {
                s[(i, j)] = sij;
                s[(j, i)] = sij.conj();
                h[(i, j)] = hij;
                h[(j, i)] = hij.conj();
            }
        }
    }
    Ok(SubspaceProblem { h, s })
}

/// Norm, energy and variance of `sum_m b_m A^m |phi0>` from the tensors.
pub fn rte_statistics(b: &[C64], tensors: &RteTensors) -> Result<StateStatistics> {
    if b.is_empty() {
        return Err(Error::InvalidInput("empty weights".into()));
    }
    if b.len() > tensors.order() {
        return Err(Error::CoverageExceeded { needed: b.len() - 1, order: tensors.order() });
    }
    let norm = bilinear(b, &tensors.s, 0, 0).re;
    if !(norm > 0.0) {
        return Err(Error::NonPositiveNorm(norm));
    }
    let energy = bilinear(b, &tensors.h1, 0, 0).re / norm;
    let variance = bilinear(b, &tensors.h2, 0, 0).re / norm - energy * energy;
    Ok(StateStatistics { norm, energy, variance })
}

/// Measured data a run works from.
#[derive(Debug, Clone, Copy)]
pub enum KrylovData<'a> {
    Power(&'a MomentSequence),
    Rte(&'a RteTensors),
}

/// Candidate ranking rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Criterion {
    /// Magnitude of the measured variance. Noise can push the estimate
    /// below zero, most strongly for spurious Ritz values under the spectrum;
    /// ranking by `|var|` treats those as far from an eigenstate.
    #[default]
    Variance,
    /// Measured variance as is, negative values included.
    SignedVariance,
    /// Power basis only: candidates that reach the top power `H^{R-1}` are
    /// ranked by `E^2` so `mu_{2R}` is never needed; others by `|var|`.
    EnergySquared,
}

impl Criterion {
    fn score(self, variance: f64) -> f64 {
        match self {
            Criterion::SignedVariance => variance,
            Criterion::Variance | Criterion::EnergySquared => variance.abs(),
        }
    }
}

/// One evaluated candidate order.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub q: usize,
    pub solution: GevpSolution,
    /// Ground Ritz value of the candidate pencil.
    pub energy: f64,
    /// Raw variance, or `NaN` when it was not needed.
    pub variance: f64,
    /// Value used for ranking and acceptance.
    pub metric: f64,
    /// Inner-product weights of the candidate state (empty for evolution data).
    pub o: Vec<f64>,
    pub b: Vec<C64>,
    /// Candidate norm before renormalisation.
    pub norm: f64,
}

/// Iteration state of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionState {
    pub sequence: Vec<usize>,
    /// Inner-product weights (power basis only; empty otherwise).
    pub o: Vec<f64>,
    pub b: Vec<C64>,
    pub r_max: usize,
    pub energy: f64,
    pub var_history: Vec<f64>,
    target: usize,
}

impl PartitionState {
    /// State at the reference: `o = b = (1)`.
    pub fn initial(data: KrylovData<'_>, target: usize, criterion: Criterion) -> Result<Self> {
        if target == 0 {
            return Err(Error::InvalidInput("target order must be at least 1".into()));
        }
        let (o, stats) = match data {
            KrylovData::Power(mu) => {
                let o = vec![1.0];
                let stats = candidate_statistics(&o, mu)?;
                (o, stats)
            }
            KrylovData::Rte(t) => (Vec::new(), rte_statistics(&[C64::new(1.0, 0.0)], t)?),
        };
        Ok(Self {
            sequence: Vec::new(),
            o,
            b: vec![C64::new(1.0, 0.0)],
            r_max: target,
            energy: stats.energy,
            var_history: vec![criterion.score(stats.variance)],
            target,
        })
    }

    /// `O(R)` of the accepted sequence (1 before any iteration).
    pub fn order(&self) -> usize {
        partition_order(&self.sequence).unwrap_or(1)
    }

    pub fn current_metric(&self) -> f64 {
        *self.var_history.last().expect("history starts non-empty")
    }

    /// Builds, solves and scores the order-`q` problem seeded by the
    /// current iterate.
    pub fn candidate(&self, data: KrylovData<'_>, q: usize, criterion: Criterion, ops: &mut u64) -> Result<Candidate> {
        if q == 0 || q > self.r_max {
            return Err(Error::InvalidInput(format!("candidate order {q} outside 1..={}", self.r_max)));
        }
        let new_order = self.order() + q - 1;
        debug_assert!(new_order <= self.target);
        let terminating = new_order == self.target;
        match data {
            KrylovData::Power(mu) => {
                debug_assert!(2 * (q - 1) + self.o.len() < 2 * self.target);
                let problem = sub_matrices_power(&self.o, mu, q)?;
                *ops += 2 * (2 * q as u64 - 1) * self.o.len() as u64;
                let solution = solve_plain(&problem)?;
                let c = &solution.ground_coeffs;
                let o = convolve_coeffs(&self.o, &outer_coeffs(c)?);
                let b = b_update(&self.b, c);
                *ops += (q * q + self.o.len() * (2 * q - 1) + self.b.len() * q) as u64;
                let energy = solution.ground_energy();
                let (norm, variance, metric) = if terminating && criterion == Criterion::EnergySquared {
                    let (norm, _) = power_energy(&o, mu)?;
                    (norm, f64::NAN, energy * energy)
                } else {
                    debug_assert!(o.len() < 2 * self.target);
                    let stats = candidate_statistics(&o, mu)?;
                    (stats.norm, stats.variance, criterion.score(stats.variance))
                };
                *ops += 3 * o.len() as u64;
                Ok(Candidate { q, solution, energy, variance, metric, o, b, norm })
            }
            KrylovData::Rte(t) => {
                let problem = sub_matrices_rte(&self.b, t, q)?;
                *ops += (2 * q * q * self.b.len() * self.b.len()) as u64;
                let solution = solve_plain(&problem)?;
                let b = b_update(&self.b, &solution.ground_coeffs);
                debug_assert!(b.len() <= self.target);
                let stats = rte_statistics(&b, t)?;
                *ops += (self.b.len() * q + 3 * b.len() * b.len()) as u64;
                Ok(Candidate {
                    q,
                    energy: solution.ground_energy(),
                    solution,
                    variance: stats.variance,
                    metric: criterion.score(stats.variance),
                    o: Vec::new(),
                    b,
                    norm: stats.norm,
                })
            }
        }
    }

    /// Moves to the candidate, renormalising so the iterate has unit norm.
    pub fn accept(&mut self, candidate: Candidate) {
        let Candidate { q, energy, metric, o, b, norm, .. } = candidate;
        self.o = o.into_iter().map(|w| w / norm).collect();
        let scale = 1.0 / norm.sqrt();
        self.b = b.into_iter().map(|z| z * scale).collect();
        self.sequence.push(q);
        self.r_max -= q - 1;
        self.energy = energy;
        self.var_history.push(metric);
        debug_assert_eq!(self.r_max, self.target + 1 - self.order());
    }
}

/// Ranking of all candidate orders at one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationLog {
    /// Metric per `q = 1..=r_max`; `+inf` marks an unsolvable candidate.
    pub candidate_metrics: Vec<f64>,
    pub chosen: usize,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PqseResult {
    /// Energy of the last accepted iterate (the reference energy if none).
    pub energy: f64,
    pub sequence: Vec<usize>,
    pub terminated_early: bool,
    pub final_variance: f64,
    pub b: Vec<C64>,
    pub o: Vec<f64>,
    pub var_history: Vec<f64>,
    pub iterations: Vec<IterationLog>,
    pub arithmetic_ops: u64,
}

impl PqseResult {
    /// `O(R)`; 1 when no iteration was accepted.
    pub fn order(&self) -> usize {
        partition_order(&self.sequence).unwrap_or(1)
    }

    fn from_state(state: PartitionState, iterations: Vec<IterationLog>, ops: u64) -> Self {
        let order = state.order();
        Self {
            energy: state.energy,
            terminated_early: order < state.target,
            final_variance: state.current_metric(),
            sequence: state.sequence,
            b: state.b,
            o: state.o,
            var_history: state.var_history,
            iterations,
            arithmetic_ops: ops,
        }
    }
}

fn check_coverage(data: KrylovData<'_>, target: usize, criterion: Criterion) -> Result<()> {
    if target == 0 {
        return Err(Error::InvalidInput("target order must be at least 1".into()));
    }
    match data {
        KrylovData::Power(mu) => {
            let needed = match criterion {
                Criterion::Variance | Criterion::SignedVariance => 2 * target,
                Criterion::EnergySquared => (2 * target - 1).max(2),
            };
            if mu.max_power() < needed {
                return Err(Error::InsufficientMoments { needed, available: mu.max_power() });
            }
        }
        KrylovData::Rte(t) => {
            if t.order() < target {
                return Err(Error::CoverageExceeded { needed: target - 1, order: t.order() });
            }
        }
    }
    Ok(())
}

/// Runs the variance-guided partition search up to Krylov order `target`.
///
/// Each iteration scores every `q` in `1..=r_max` (unsolvable candidates
/// score `+inf`; ties go to the smallest `q`). The run stops when the order
/// reaches `target`, when the best candidate is `q = 1`, or when the best
/// candidate's metric exceeds the current one, in which case the last
/// accepted iterate is returned.
pub fn pqse_run(data: KrylovData<'_>, target: usize, criterion: Criterion) -> Result<PqseResult> {
    check_coverage(data, target, criterion)?;
    let mut state = PartitionState::initial(data, target, criterion)?;
    let mut iterations = Vec::new();
    let mut ops = 0u64;

    while state.order() < target {
        let mut best: Option<Candidate> = None;
        let mut metrics = Vec::with_capacity(state.r_max);
        for q in 1..=state.r_max {
            match state.candidate(data, q, criterion, &mut ops) {
                Ok(cand) if !cand.metric.is_nan() => {
                    metrics.push(cand.metric);
                    if best.as_ref().is_none_or(|b| cand.metric < b.metric) {
                        best = Some(cand);
                    }
                }
                _ => metrics.push(f64::INFINITY),
            }
        }
        let Some(best) = best else {
            if state.sequence.is_empty() {
                return Err(Error::NoSolvableCandidate);
            }
            break;
        };
        let chosen = best.q;
        let improves = !(state.current_metric() < best.metric);
        let accepted = chosen > 1 && improves;
        iterations.push(IterationLog { candidate_metrics: metrics, chosen, accepted });
        if !accepted {
            break;
        }
        state.accept(best);
    }
    Ok(PqseResult::from_state(state, iterations, ops))
}

/// Runs a prescribed partition with no selection or acceptance test.
pub fn pqse_forced(data: KrylovData<'_>, sequence: &[usize]) -> Result<PqseResult> {
    let target = partition_order(sequence)?;
    check_coverage(data, target, Criterion::Variance)
        .or_else(|_| check_coverage(data, target, Criterion::EnergySquared))?;
    let mut state = PartitionState::initial(data, target, Criterion::SignedVariance)?;
    let mut ops = 0u64;
    let mut iterations = Vec::new();
    for &q in sequence {
        let cand = match state.candidate(data, q, Criterion::SignedVariance, &mut ops) {
            Ok(c) => c,
            // Top-order candidates may lack the H^2 element; score by energy.
            Err(Error::InsufficientMoments { .. }) => state.candidate(data, q, Criterion::EnergySquared, &mut ops)?,
            Err(e) => return Err(e),
        };
        iterations.push(IterationLog { candidate_metrics: vec![cand.metric], chosen: q, accepted: true });
        state.accept(cand);
    }
    Ok(PqseResult::from_state(state, iterations, ops))
}

/// Krylov generator used when materialising iterates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Basis {
    Power,
    Rte { dt: f64 },
}

/// `sum_m b_m A^m |phi0>` in the full space (unnormalised).
pub fn reconstruct_state(b: &[C64], h: &PauliSum, phi0: &StateVector, basis: Basis) -> Result<StateVector> {
    if phi0.num_qubits() > MAX_DENSE_QUBITS {
        return Err(Error::TooManyQubits { n: phi0.num_qubits(), max: MAX_DENSE_QUBITS });
    }
    if b.is_empty() {
        return Err(Error::InvalidInput("empty weights".into()));
    }
    let mut out = StateVector::zeros(phi0.num_qubits())?;
    let mut power = phi0.clone();
    for (m, &bm) in b.iter().enumerate() {
        let term = match basis {
            Basis::Power => {
                if m > 0 {
                    power = apply_pauli_sum(h, &power)?;
                }
                power.clone()
            }
            Basis::Rte { dt } => evolve_state(h, phi0, m as f64 * dt)?,
        };
        out.axpy(bm, &term)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::hankel_matrices;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn partition_orders() {
        assert_eq!(partition_order(&[7]).unwrap(), 7);
        assert_eq!(partition_order(&[3, 4]).unwrap(), 6);
        assert_eq!(partition_order(&[2, 2, 2]).unwrap(), 4);
        assert!(partition_order(&[]).is_err());
        assert!(partition_order(&[2, 0]).is_err());
    }

    #[test]
    fn outer_coefficients() {
        assert_eq!(outer_coeffs(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap(), vec![1.0, 2.0, 1.0]);
        assert_eq!(outer_coeffs(&[c(1.0, 0.0)]).unwrap(), vec![1.0]);
        assert_eq!(outer_coeffs(&[c(1.0, 0.0), c(0.0, 1.0)]).unwrap(), vec![1.0, 0.0, 1.0]);
        assert!(outer_coeffs(&[]).is_err());
    }

    #[test]
    fn convolutions() {
        assert_eq!(convolve_coeffs(&[1.0, 2.0, 1.0], &[1.0]), vec![1.0, 2.0, 1.0]);
        assert_eq!(convolve_coeffs(&[1.0, 1.0], &[1.0, 1.0]), vec![1.0, 2.0, 1.0]);
        assert_eq!(convolve_coeffs(&[1.0, 0.0, 1.0], &[1.0, 0.0, 1.0]), vec![1.0, 0.0, 2.0, 0.0, 1.0]);
    }

    #[test]
    fn b_updates() {
        let first = b_update(&[c(1.0, 0.0)], &[c(0.3, 0.1), c(-2.0, 0.5)]);
        assert_eq!(first, vec![c(0.3, 0.1), c(-2.0, 0.5)]);
        let twice = b_update(&[c(1.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(twice, vec![c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn identity_weights_reduce_to_hankel() {
        let mu = MomentSequence::new(vec![1.0, 0.2, 0.9, -0.1, 1.3, 0.4, 2.0]).unwrap();
        assert_eq!(sub_matrices_power(&[1.0], &mu, 3).unwrap(), hankel_matrices(&mu, 3).unwrap());
        assert!(sub_matrices_power(&[1.0, 0.5], &mu, 3).is_ok());
        assert!(sub_matrices_power(&[1.0, 0.5, 0.25], &mu, 3).is_err());
    }

    #[test]
    fn eigenstate_statistics() {
        // ZZ on |++>: moments alternate 1, 0, 1, 0, ...
        let mu = MomentSequence::new(vec![1.0, 0.0, 1.0, 0.0, 1.0, 0.0]).unwrap();
        let sol = solve_plain(&hankel_matrices(&mu, 2).unwrap()).unwrap();
        let o = outer_coeffs(&sol.ground_coeffs).unwrap();
        let st = candidate_statistics(&o, &mu).unwrap();
        assert!((st.energy + 1.0).abs() < 1e-14);
        assert!(st.variance.abs() < 1e-14);

        let z_eig = MomentSequence::new(vec![1.0, 1.0, 1.0]).unwrap();
        assert_eq!(candidate_statistics(&[1.0], &z_eig).unwrap().variance, 0.0);
        let bad = MomentSequence::new(vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(candidate_statistics(&[-1.0, 0.0], &bad), Err(Error::NonPositiveNorm(_))));
    }

    #[test]
    fn one_step_candidate_matches_identity() {
        let mu = MomentSequence::new(vec![1.0, -0.4, 0.7, -0.5, 0.9]).unwrap();
        let state = PartitionState::initial(KrylovData::Power(&mu), 2, Criterion::Variance).unwrap();
        let mut ops = 0;
        let cand = state.candidate(KrylovData::Power(&mu), 1, Criterion::Variance, &mut ops).unwrap();
        assert!((cand.energy + 0.4).abs() < 1e-15);
        assert!((cand.metric - (0.7 - 0.16)).abs() < 1e-15);
    }
}
