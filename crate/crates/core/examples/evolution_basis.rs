//! Real-time-evolution Krylov basis `exp(-i j dt H)|phi0>`: plain QSE and
//! partitioned QSE on noisy evolution tensors.

use pqse::gevp::solve_plain;
use pqse::harness::{prepare_system, relative_error, SystemSpec};
use pqse::noise::{perturb_rte_tensors, NoiseSpec};
use pqse::pqse::{pqse_run, Criterion, KrylovData};
use pqse::subspace::{default_dt, rte_tensors};

fn main() -> pqse::Result<()> {
    let system = prepare_system(&SystemSpec::SpinRing { n: 8, coupling: 0.1, disorder: 1.0, seed: 17 }, false)?;
    let truth = system.truth();
    let dt = default_dt(&system.hamiltonian)?;
    let clean = rte_tensors(&system.hamiltonian, &system.reference, 12, dt)?;
    let (mu1, mu2) = (clean.h1[(0, 0)].re, clean.h2[(0, 0)].re);
    let noisy = perturb_rte_tensors(&clean, mu1, mu2, &NoiseSpec::new(1e-5, 7, 0)?)?;
    println!("dt = pi/||H|| = {dt:.6}");
    println!(" R  qse        pqse       partition");
    for r in 2..=12 {
        let t = noisy.leading(r)?;
        let qse = relative_error(solve_plain(&t.problem())?.ground_energy(), truth)?;
        let run = pqse_run(KrylovData::Rte(&t), r, Criterion::Variance)?;
        println!("{r:>2}  {qse:.3e}  {:.3e}  {:?}", relative_error(run.energy, truth)?, run.sequence);
    }
    Ok(())
}
