//! Finite-sampling noise on subspace data.
//!
//! Every draw comes from ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded with
//! `seed_from_u64(master_seed)` and positioned on stream
//! `(instance << 8) | stream_id`; normal variates use the ziggurat sampler
//! `rand_distr::StandardNormal`. A `(master_seed, instance)` pair therefore
//! fixes every perturbation, and instances can be generated in any order.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::simulator::C64;
use crate::subspace::{MomentSequence, RteTensors};

const STREAM_MOMENTS: u64 = 1;
const STREAM_RTE_S: u64 = 2;
const STREAM_RTE_H1: u64 = 3;
const STREAM_RTE_H2: u64 = 4;

/// Off-diagonal complex noise puts `sigma / sqrt(2)` on each quadrature so
/// the total standard deviation is `sigma`.
pub const QUADRATURE_SPLIT: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub delta: f64,
    pub master_seed: u64,
    pub instance: u64,
}

impl NoiseSpec {
    pub fn new(delta: f64, master_seed: u64, instance: u64) -> Result<Self> {
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(Error::InvalidInput(format!("noise strength must be >= 0, got {delta}")));
        }
        if instance >= 1 << 56 {
            return Err(Error::InvalidInput(format!("instance index {instance} too large")));
        }
        Ok(Self { delta, master_seed, instance })
    }

    fn rng(&self, stream_id: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.master_seed);
        rng.set_stream((self.instance << 8) | stream_id);
        rng
    }
}

/// Standard deviation of moment `k`: `delta sqrt(max(mu_2k - mu_k^2, 0))`.
pub fn moment_width(clean: &MomentSequence, k: usize, delta: f64) -> Result<f64> {
    let variance = clean.get(2 * k)? - clean.get(k)?.powi(2);
    Ok(delta * variance.max(0.0).sqrt())
}

/// Adds one Gaussian draw per moment index `1..=k_max`; `mu_0` is untouched.
///
/// Because each Hankel anti-diagonal shares a single draw, the implied
/// perturbations of both Hankel matrices are themselves Hankel. Draws are
/// taken in index order, so a shorter request yields a prefix of a longer one.
pub fn perturb_moments(clean: &MomentSequence, k_max: usize, spec: &NoiseSpec) -> Result<MomentSequence> {
    let needed = 2 * k_max;
    if clean.max_power() < needed {
        return Err(Error::InsufficientMoments { needed, available: clean.max_power() });
    }
    let mut rng = spec.rng(STREAM_MOMENTS);
    let mut values = Vec::with_capacity(k_max + 1);
    values.push(1.0);
    for k in 1..=k_max {
        let z: f64 = StandardNormal.sample(&mut rng);
        values.push(clean.get(k)? + moment_width(clean, k, spec.delta)? * z);
    }
    MomentSequence::new(values)
}

/// Perturbs one Hermitian tensor in place, visiting the upper triangle
/// column by column so leading blocks see identical draws.
fn perturb_hermitian(m: &mut DMatrix<C64>, sigma: f64, rng: &mut ChaCha20Rng, skip_origin: bool) {
    for j in 0..m.ncols() {
        for i in 0..=j {
            if i == j {
                if skip_origin && i == 0 {
                    continue;
                }
                let z: f64 = StandardNormal.sample(rng);
                m[(i, i)].re += sigma * z;
            } else {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                let eps = C64::new(re, im) * (sigma * QUADRATURE_SPLIT);
                m[(i, j)] += eps;
                m[(j, i)] += eps.conj();
            }
        }
    }
}

/// Element-wise Hermitian noise on evolution-basis tensors.
///
/// `H1` and `H2` elements get width `delta sqrt(max(mu2 - mu1^2, 0))` (the
/// reference-state energy spread); `S` elements get width `delta`, except
/// `S[0][0]` which stays exactly 1. The three tensors use independent streams.
pub fn perturb_rte_tensors(tensors: &RteTensors, mu1: f64, mu2: f64, spec: &NoiseSpec) -> Result<RteTensors> {
    let sigma_h = spec.delta * (mu2 - mu1 * mu1).max(0.0).sqrt();
    let sigma_s = spec.delta;
    let mut out = tensors.clone();
    perturb_hermitian(&mut out.s, sigma_s, &mut spec.rng(STREAM_RTE_S), true);
    perturb_hermitian(&mut out.h1, sigma_h, &mut spec.rng(STREAM_RTE_H1), false);
    perturb_hermitian(&mut out.h2, sigma_h, &mut spec.rng(STREAM_RTE_H2), false);
    Ok(out)
}
