//! Noiseless plain QSE on the ten-site ring: the Ritz estimate converges
//! exponentially with Krylov order until the overlap matrix is numerically
//! singular.

use pqse::gevp::solve_plain;
use pqse::harness::{prepare_system, relative_error, SystemSpec};
use pqse::subspace::{compute_moments, hankel_matrices};

fn main() -> pqse::Result<()> {
    let system = prepare_system(&SystemSpec::SpinRing { n: 10, coupling: 0.1, disorder: 1.0, seed: 17 }, false)?;
    let truth = system.truth();
    let mu = compute_moments(&system.hamiltonian, &system.reference, 32)?;
    println!("exact {truth:.14}");
    println!(" R  E_g                 eps_rel    kept");
    for r in 1..=16 {
        let sol = solve_plain(&hankel_matrices(&mu, r)?)?;
        let e = sol.ground_energy();
        println!("{r:>2}  {e:+.14}  {:.3e}  {}", relative_error(e, truth)?, sol.retained_dim);
    }
    Ok(())
}
