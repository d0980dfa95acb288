//! Partitioned QSE in the power basis on noisy moments. Prints the candidate
//! ranking at every iteration, the chosen partition, and the fidelity of the
//! reconstructed iterate.

use pqse::harness::{prepare_system, relative_error, SystemSpec};
use pqse::noise::{perturb_moments, NoiseSpec};
use pqse::pqse::{pqse_run, reconstruct_state, Basis, Criterion, KrylovData};
use pqse::simulator::state_overlap;
use pqse::subspace::compute_moments;

fn main() -> pqse::Result<()> {
    let system = prepare_system(&SystemSpec::SpinRing { n: 10, coupling: 0.1, disorder: 1.0, seed: 17 }, false)?;
    let truth = system.truth();
    let target = 16;
    let clean = compute_moments(&system.hamiltonian, &system.reference, 4 * target)?;
    let noisy = perturb_moments(&clean, 2 * target, &NoiseSpec::new(1e-6, 1, 3)?)?;

    let run = pqse_run(KrylovData::Power(&noisy), target, Criterion::Variance)?;
    for (k, it) in run.iterations.iter().enumerate() {
        let best: Vec<String> = it.candidate_metrics.iter().map(|m| format!("{m:.1e}")).collect();
        println!("iter {k}: chose q={} accepted={} |var| by q: [{}]", it.chosen, it.accepted, best.join(" "));
    }
    println!("partition {:?}  order {}  early stop {}", run.sequence, run.order(), run.terminated_early);
    println!("variance history {:?}", run.var_history.iter().map(|v| format!("{v:.2e}")).collect::<Vec<_>>());
    println!("eps_rel {:.3e}", relative_error(run.energy, truth)?);

    let psi = reconstruct_state(&run.b, &system.hamiltonian, &system.reference, Basis::Power)?;
    let fidelity = state_overlap(&system.spectrum.ground_state, &psi)?.norm_sqr() / state_overlap(&psi, &psi)?.re;
    println!("fidelity {fidelity:.9}");
    println!("coefficient ops {}", run.arithmetic_ops);
    Ok(())
}
