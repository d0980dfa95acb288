//! One noisy instance: plain QSE against thresholded QSE, where the
//! threshold `tau = 10^-a sqrt(||dH||^2 + ||dS||^2)` is scanned over `a`.

use nalgebra::DMatrix;
use pqse::gevp::{default_a_grid, scaled_threshold, solve_gevp, solve_plain, tqse_scan};
use pqse::harness::{prepare_system, relative_error, SystemSpec};
use pqse::noise::{perturb_moments, NoiseSpec};
use pqse::simulator::C64;
use pqse::subspace::{compute_moments, hankel_matrices};

fn main() -> pqse::Result<()> {
    let system = prepare_system(&SystemSpec::SpinRing { n: 10, coupling: 0.1, disorder: 1.0, seed: 17 }, false)?;
    let truth = system.truth();
    let r = 8;
    let clean = compute_moments(&system.hamiltonian, &system.reference, 4 * r)?;
    let noisy = perturb_moments(&clean, 2 * r, &NoiseSpec::new(1e-6, 1, 0)?)?;
    let (cp, np) = (hankel_matrices(&clean, r)?, hankel_matrices(&noisy, r)?);
    let dh: DMatrix<C64> = &np.h - &cp.h;
    let ds: DMatrix<C64> = &np.s - &cp.s;

    let plain = solve_plain(&np)?;
    println!("plain QSE  eps_rel {:.3e}  kept {}", relative_error(plain.ground_energy(), truth)?, plain.retained_dim);

    println!("\n   a    tau         kept  eps_rel");
    for a in [0.0, 1.0, 2.0, 3.0, 4.0] {
        let tau = scaled_threshold(&dh, &ds, a)?;
        match solve_gevp(&np, tau) {
            Ok(sol) => {
                let err = relative_error(sol.ground_energy(), truth)?;
                println!("{a:>4.1}  {tau:.3e}  {:>4}  {err:.3e}", sol.retained_dim);
            }
            Err(e) => println!("{a:>4.1}  {tau:.3e}  {e}"),
        }
    }

    let best = tqse_scan(&np, &dh, &ds, truth, &default_a_grid())?;
    println!("\nbest a {:.3}  tau {:.3e}  eps_rel {:.3e}", best.a, best.tau, best.relative_error);
    Ok(())
}
