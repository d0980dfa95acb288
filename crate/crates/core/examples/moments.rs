//! Hamiltonian moments of a reference state and the Hankel pencils they
//! generate, with the overlap-matrix conditioning at each order.

use nalgebra::SymmetricEigen;
use pqse::pauli::{build_spin_ring, field_only_ground_bits, DisorderSpec, Fields};
use pqse::simulator::basis_state;
use pqse::subspace::{compute_moments, hankel_matrices};

fn main() -> pqse::Result<()> {
    let spec = DisorderSpec { coupling: 0.1, disorder: 1.0, fields: Fields::Seeded(17) };
    let n = 8;
    let h = build_spin_ring(n, &spec)?;
    let phi0 = basis_state(&field_only_ground_bits(&spec.resolve_fields(n)?))?;

    let mu = compute_moments(&h, &phi0, 16)?;
    for (k, m) in mu.values().iter().enumerate() {
        println!("mu_{k:<2} = {m:+.10e}");
    }

    println!("\n R  cond(S)");
    for r in 1..=8 {
        let p = hankel_matrices(&mu, r)?;
        let s = p.s.map(|z| z.re);
        let eig = SymmetricEigen::new(s).eigenvalues;
        let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        println!("{r:>2}  {:.3e}", hi / lo);
    }
    Ok(())
}
