//! Builds the disordered Heisenberg ring, diagonalises it exactly and reports
//! how well the field-only reference overlaps the true ground state.
//!
//! ```text
//! cargo run --release --example spin_ring -- 8 0.1 1.0 17
//! ```

use pqse::pauli::{build_spin_ring, field_only_ground_bits, DisorderSpec, Fields};
use pqse::simulator::{basis_state, expectation, exact_ground, state_overlap};

fn main() -> pqse::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |k: usize, default: &str| args.get(k).cloned().unwrap_or_else(|| default.to_string());
    let n: usize = arg(0, "8").parse().expect("n");
    let coupling: f64 = arg(1, "0.1").parse().expect("J");
    let disorder: f64 = arg(2, "1.0").parse().expect("h");
    let seed: u64 = arg(3, "17").parse().expect("seed");

    let spec = DisorderSpec { coupling, disorder, fields: Fields::Seeded(seed) };
    let fields = spec.resolve_fields(n)?;
    let h = build_spin_ring(n, &spec)?;
    let bits = field_only_ground_bits(&fields);
    let reference = basis_state(&bits)?;
    let spectrum = exact_ground(&h)?;

    println!("fields        {:?}", fields.iter().map(|f| (f * 1e4).round() / 1e4).collect::<Vec<_>>());
    println!("terms         {}", h.terms().len());
    println!("reference     {bits}");
    println!("<H>_ref       {:.12}", expectation(&h, &reference)?);
    println!("ground energy {:.12}", spectrum.ground_energy);
    println!("gap           {:.6}", spectrum.eigenvalues[1] - spectrum.eigenvalues[0]);
    println!("||H||         {:.6}", spectrum.spectral_norm);
    println!("overlap^2     {:.6}", state_overlap(&spectrum.ground_state, &reference)?.norm_sqr());
    Ok(())
}
