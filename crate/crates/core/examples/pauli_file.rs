//! Loads a Pauli-sum file with a `# ref:` line, solves it with each method
//! and writes it back in canonical form.

use pqse::gevp::solve_plain;
use pqse::pauli::{parse_pauli_file, write_pauli_sum};
use pqse::pqse::{pqse_run, Criterion, KrylovData};
use pqse::simulator::{basis_state, exact_ground, expectation};
use pqse::subspace::{compute_moments, hankel_matrices};

fn main() -> pqse::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/xxz4.pauli").to_string());
    let text = std::fs::read_to_string(&path)?;
    let file = parse_pauli_file(&text)?;
    let bits = file.reference.clone().unwrap_or_else(|| "0".repeat(file.hamiltonian.num_qubits()));
    let h = &file.hamiltonian;
    let phi0 = basis_state(&bits)?;

    println!("{} qubits, {} terms, reference {bits}", h.num_qubits(), h.terms().len());
    println!("<H>_ref {:.12}", expectation(h, &phi0)?);
    println!("exact   {:.12}", exact_ground(h)?.ground_energy);
    let mu = compute_moments(h, &phi0, 12)?;
    for r in 2..=6 {
        let qse = solve_plain(&hankel_matrices(&mu, r)?)?.ground_energy();
        let run = pqse_run(KrylovData::Power(&mu), r, Criterion::Variance)?;
        println!("R={r}  qse {qse:.12}  pqse {:.12} {:?}", run.energy, run.sequence);
    }
    print!("\n{}", write_pauli_sum(h, Some(&bits)));
    Ok(())
}
