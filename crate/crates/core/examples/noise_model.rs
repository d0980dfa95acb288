//! Sampling-noise model: empirical spread of perturbed moments against the
//! predicted widths `delta sqrt(mu_2k - mu_k^2)`.

use pqse::harness::{prepare_system, SystemSpec};
use pqse::noise::{moment_width, perturb_moments, NoiseSpec};
use pqse::subspace::compute_moments;

fn main() -> pqse::Result<()> {
    let system = prepare_system(&SystemSpec::SpinRing { n: 6, coupling: 0.2, disorder: 1.0, seed: 3 }, false)?;
    let k_max = 4;
    let delta = 1e-3;
    let clean = compute_moments(&system.hamiltonian, &system.reference, 2 * k_max)?;
    let draws = 5000;
    let mut sum_sq = vec![0.0; k_max + 1];
    for instance in 0..draws {
        let noisy = perturb_moments(&clean, k_max, &NoiseSpec::new(delta, 42, instance)?)?;
        assert_eq!(noisy.values()[0], 1.0);
        for (k, acc) in sum_sq.iter_mut().enumerate().skip(1) {
            *acc += (noisy.values()[k] - clean.values()[k]).powi(2);
        }
    }
    println!(" k  predicted   empirical");
    for (k, acc) in sum_sq.iter().enumerate().skip(1) {
        let predicted = moment_width(&clean, k, delta)?;
        println!("{k:>2}  {predicted:.4e}  {:.4e}", (acc / draws as f64).sqrt());
    }
    Ok(())
}
