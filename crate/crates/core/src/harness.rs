//! Experiment engine: sweeps over Krylov order, noise strength and noise
//! instances for each method, producing one [`ExperimentRecord`] per run.
//!
//! Clean data (moments or evolution tensors) is built once per experiment at
//! the largest order and sliced; noisy data is drawn once per
//! `(delta, instance)` at the largest order and sliced, so every order sees
//! the same noise realisation.

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Instant;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gevp::{default_a_grid, solve_gevp, solve_plain, tqse_scan, GevpSolution};
use crate::noise::{perturb_moments, perturb_rte_tensors, NoiseSpec};
use crate::pauli::{build_spin_ring, field_only_ground_bits, parse_pauli_file, DisorderSpec, Fields, PauliSum};
use crate::pqse::{pqse_run, reconstruct_state, Basis, Criterion, KrylovData, PqseResult};
use crate::simulator::{basis_state, cached_spectrum, state_overlap, Spectrum, StateVector, C64};
use crate::subspace::{
    compute_moments, default_dt, hankel_matrices, rte_tensors, MomentSequence, RteTensors, SubspaceProblem,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SystemSpec {
    /// Disordered Heisenberg ring with seeded fields; the reference is the
    /// ground configuration of the fields alone.
    SpinRing { n: usize, coupling: f64, disorder: f64, seed: u64 },
    /// Pauli-sum file; `reference` overrides the file's `# ref:` line.
    PauliFile { path: PathBuf, reference: Option<String> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BasisSpec {
    Power,
    /// `dt = None` selects `pi / ||H||`.
    Rte { dt: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Qse,
    Tqse,
    Pqse,
    PqseAlt,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Qse, Method::Tqse, Method::Pqse, Method::PqseAlt];

    pub fn name(self) -> &'static str {
        match self {
            Method::Qse => "qse",
            Method::Tqse => "tqse",
            Method::Pqse => "pqse",
            Method::PqseAlt => "pqse_alt",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub system: SystemSpec,
    pub basis: BasisSpec,
    pub methods: Vec<Method>,
    pub r_min: usize,
    pub r_max: usize,
    pub deltas: Vec<f64>,
    pub instances: usize,
    pub master_seed: u64,
    pub a_grid: Vec<f64>,
    /// Fixed TQSE threshold; replaces the `a` scan when set.
    pub tqse_tau: Option<f64>,
    /// Divide `H` by its spectral norm before building moments.
    pub rescale: bool,
    /// Record the overlap of each estimate with the exact ground state.
    pub fidelity: bool,
    /// Record wall time per row (makes output non-reproducible).
    pub timing: bool,
    /// Rank partitioned candidates by the signed variance instead of its magnitude.
    pub signed_variance: bool,
}

impl ExperimentConfig {
    pub fn new(system: SystemSpec) -> Self {
        Self {
            system,
            basis: BasisSpec::Power,
            methods: vec![Method::Qse, Method::Tqse, Method::Pqse],
            r_min: 1,
            r_max: 10,
            deltas: vec![0.0],
            instances: 1,
            master_seed: 0,
            a_grid: default_a_grid(),
            tqse_tau: None,
            rescale: false,
            fidelity: false,
            timing: false,
            signed_variance: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::InvalidInput(msg.to_string()));
        if self.instances == 0 {
            return fail("instances must be at least 1");
        }
        if self.r_min == 0 || self.r_min > self.r_max {
            return fail("Krylov order range must be non-empty and start at 1 or above");
        }
        if self.deltas.is_empty() || self.deltas.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) {
            return fail("noise strengths must be a non-empty list of values >= 0");
        }
        if self.methods.is_empty() {
            return fail("no methods selected");
        }
        if self.methods.contains(&Method::Tqse) && self.tqse_tau.is_none() && self.a_grid.is_empty() {
            return fail("empty threshold grid");
        }
        if let Some(tau) = self.tqse_tau {
            if !(tau >= 0.0) {
                return fail("threshold must be >= 0");
            }
        }
        if let BasisSpec::Rte { dt: Some(dt) } = self.basis {
            if !(dt > 0.0) || !dt.is_finite() {
                return fail("timestep must be positive");
            }
        }
        Ok(())
    }
}

/// One `(method, R, delta, instance)` result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub method: Method,
    pub r: usize,
    pub delta: f64,
    pub instance: usize,
    /// `None` on success, the error message otherwise.
    pub error: Option<String>,
    pub energy: Option<f64>,
    pub eps_rel: Option<f64>,
    pub retained_dim: Option<usize>,
    pub best_a: Option<f64>,
    pub sequence: Option<Vec<usize>>,
    pub order: Option<usize>,
    pub terminated_early: Option<bool>,
    pub fidelity: Option<f64>,
    pub wall_time: Option<f64>,
}

impl ExperimentRecord {
    fn empty(method: Method, r: usize, delta: f64, instance: usize) -> Self {
        Self {
            method,
            r,
            delta,
            instance,
            error: None,
            energy: None,
            eps_rel: None,
            retained_dim: None,
            best_a: None,
            sequence: None,
            order: None,
            terminated_early: None,
            fidelity: None,
            wall_time: None,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

/// `|(estimate - truth) / truth|`.
pub fn relative_error(estimate: f64, truth: f64) -> Result<f64> {
    if truth == 0.0 {
        return Err(Error::InvalidInput("relative error undefined for zero reference energy".into()));
    }
    Ok(((estimate - truth) / truth).abs())
}

/// A Hamiltonian with its reference state and exact spectrum.
#[derive(Debug, Clone)]
pub struct PreparedSystem {
    pub hamiltonian: PauliSum,
    pub reference_bits: String,
    pub reference: StateVector,
    pub spectrum: Arc<Spectrum>,
}

impl PreparedSystem {
    pub fn truth(&self) -> f64 {
        self.spectrum.ground_energy
    }
}

pub fn prepare_system(spec: &SystemSpec, rescale: bool) -> Result<PreparedSystem> {
    let (hamiltonian, bits) = match spec {
        SystemSpec::SpinRing { n, coupling, disorder, seed } => {
            let disorder_spec = DisorderSpec { coupling: *coupling, disorder: *disorder, fields: Fields::Seeded(*seed) };
            let fields = disorder_spec.resolve_fields(*n)?;
            let h = build_spin_ring(*n, &disorder_spec)?;
            (h, field_only_ground_bits(&fields))
        }
        SystemSpec::PauliFile { path, reference } => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Io(format!("reading {}: {e}", path.display())))?;
            let file = parse_pauli_file(&text)?;
            let bits = reference
                .clone()
                .or(file.reference)
                .ok_or_else(|| Error::InvalidInput("no reference bitstring given and none in the file".into()))?;
            (file.hamiltonian, bits)
        }
    };
    let hamiltonian = if rescale {
        let norm = cached_spectrum(&hamiltonian)?.spectral_norm;
        if norm == 0.0 {
            return Err(Error::InvalidInput("cannot rescale a zero Hamiltonian".into()));
        }
        hamiltonian.scaled(1.0 / norm)?
    } else {
        hamiltonian
    };
    if bits.len() != hamiltonian.num_qubits() {
        return Err(Error::DimensionMismatch { expected: hamiltonian.num_qubits(), found: bits.len() });
    }
    let reference = basis_state(&bits)?;
    let spectrum = cached_spectrum(&hamiltonian)?;
    Ok(PreparedSystem { hamiltonian, reference_bits: bits, reference, spectrum })
}

/// Noise-free data at the largest order of a sweep.
#[derive(Debug, Clone)]
pub enum CleanData {
    /// Moments through `4 R_max`, enough for noise widths on `mu_{2 R_max}`.
    Power(MomentSequence),
    Rte(RteTensors),
}

/// A validated experiment with its system and clean data built.
pub struct Experiment {
    config: ExperimentConfig,
    system: PreparedSystem,
    clean: CleanData,
    clean_builds: AtomicUsize,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let system = prepare_system(&config.system, config.rescale)?;
        let clean_builds = AtomicUsize::new(0);
        let clean = build_clean(&system, config.basis, config.r_max, &clean_builds)?;
        Ok(Self { config, system, clean, clean_builds })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn system(&self) -> &PreparedSystem {
        &self.system
    }

    pub fn clean(&self) -> &CleanData {
        &self.clean
    }

    /// How many times clean data has been generated (1 after construction).
    pub fn clean_builds(&self) -> usize {
        self.clean_builds.load(Ordering::Relaxed)
    }

    /// Runs every `(method, R, delta, instance)` cell. Output order is by
    /// method, then R, then delta (config order), then instance, regardless
    /// of how work is scheduled.
    pub fn run(&self) -> Vec<ExperimentRecord> {
        let tasks: Vec<(usize, usize)> = (0..self.config.deltas.len())
            .flat_map(|d| (0..self.config.instances).map(move |i| (d, i)))
            .collect();
        let mut rows: Vec<(usize, ExperimentRecord)> =
            tasks.par_iter().flat_map_iter(|&(d, i)| self.run_instance(d, i)).collect();
        let method_rank = |m: Method| self.config.methods.iter().position(|x| *x == m).unwrap_or(usize::MAX);
        rows.sort_by_key(|(d, rec)| (method_rank(rec.method), rec.r, *d, rec.instance));
        rows.into_iter().map(|(_, rec)| rec).collect()
    }

    fn run_instance(&self, delta_index: usize, instance: usize) -> Vec<(usize, ExperimentRecord)> {
        let delta = self.config.deltas[delta_index];
        let spec = match NoiseSpec::new(delta, self.config.master_seed, instance as u64) {
            Ok(s) => s,
            Err(e) => return self.failed_rows(delta_index, instance, &e),
        };
        let noisy = match self.noisy_data(&spec) {
            Ok(n) => n,
            Err(e) => return self.failed_rows(delta_index, instance, &e),
        };
        let mut out = Vec::new();
        for r in self.config.r_min..=self.config.r_max {
            for &method in &self.config.methods {
                let start = Instant::now();
                let mut rec = ExperimentRecord::empty(method, r, delta, instance);
                if let Err(e) = self.solve_cell(&noisy, method, r, &mut rec) {
                    rec = ExperimentRecord::empty(method, r, delta, instance);
                    rec.error = Some(e.to_string());
                }
                if self.config.timing {
                    rec.wall_time = Some(start.elapsed().as_secs_f64());
                }
                out.push((delta_index, rec));
            }
        }
        out
    }

    fn failed_rows(&self, delta_index: usize, instance: usize, err: &Error) -> Vec<(usize, ExperimentRecord)> {
        let delta = self.config.deltas[delta_index];
        let mut out = Vec::new();
        for r in self.config.r_min..=self.config.r_max {
            for &method in &self.config.methods {
                let mut rec = ExperimentRecord::empty(method, r, delta, instance);
                rec.error = Some(err.to_string());
                out.push((delta_index, rec));
            }
        }
        out
    }

    /// Noisy data for one instance at the largest order.
    pub fn noisy_data(&self, spec: &NoiseSpec) -> Result<CleanData> {
        Ok(match &self.clean {
            CleanData::Power(mu) => CleanData::Power(perturb_moments(mu, 2 * self.config.r_max, spec)?),
            CleanData::Rte(t) => {
                CleanData::Rte(perturb_rte_tensors(t, t.h1[(0, 0)].re, t.h2[(0, 0)].re, spec)?)
            }
        })
    }

    /// Clean and noisy order-`r` pencils for plain and thresholded QSE.
    fn pencils(&self, noisy: &CleanData, r: usize) -> Result<(SubspaceProblem, SubspaceProblem)> {
        match (&self.clean, noisy) {
            (CleanData::Power(clean), CleanData::Power(noisy)) => {
                Ok((hankel_matrices(clean, r)?, hankel_matrices(noisy, r)?))
            }
            (CleanData::Rte(clean), CleanData::Rte(noisy)) => {
                Ok((clean.leading(r)?.problem(), noisy.leading(r)?.problem()))
            }
            _ => unreachable!("clean and noisy data share a basis"),
        }
    }

    fn basis(&self, noisy: &CleanData) -> Basis {
        match noisy {
            CleanData::Power(_) => Basis::Power,
            CleanData::Rte(t) => Basis::Rte { dt: t.dt },
        }
    }

    fn fidelity_of(&self, coeffs: &[C64], basis: Basis) -> Result<f64> {
        let state = reconstruct_state(coeffs, &self.system.hamiltonian, &self.system.reference, basis)?;
        let norm_sq = state_overlap(&state, &state)?.re;
        if !(norm_sq > 0.0) {
            return Err(Error::NonPositiveNorm(norm_sq));
        }
        Ok(state_overlap(&self.system.spectrum.ground_state, &state)?.norm_sqr() / norm_sq)
    }

    fn solve_cell(&self, noisy: &CleanData, method: Method, r: usize, rec: &mut ExperimentRecord) -> Result<()> {
        let truth = self.system.truth();
        let basis = self.basis(noisy);
        let coeffs: Vec<C64> = match method {
            Method::Qse => {
                let (_, noisy_p) = self.pencils(noisy, r)?;
                let sol = solve_plain(&noisy_p)?;
                fill_gevp(rec, &sol);
                sol.ground_coeffs
            }
            Method::Tqse => {
                let (clean_p, noisy_p) = self.pencils(noisy, r)?;
                let sol = match self.config.tqse_tau {
                    Some(tau) => solve_gevp(&noisy_p, tau)?,
                    None => {
                        let delta_h: DMatrix<C64> = &noisy_p.h - &clean_p.h;
                        let delta_s: DMatrix<C64> = &noisy_p.s - &clean_p.s;
                        let pick = tqse_scan(&noisy_p, &delta_h, &delta_s, truth, &self.config.a_grid)?;
                        rec.best_a = Some(pick.a);
                        pick.solution
                    }
                };
                fill_gevp(rec, &sol);
                sol.ground_coeffs
            }
            Method::Pqse | Method::PqseAlt => {
                let criterion = match (method, self.config.signed_variance) {
                    (Method::PqseAlt, _) => Criterion::EnergySquared,
                    (_, true) => Criterion::SignedVariance,
                    (_, false) => Criterion::Variance,
                };
                let result = match noisy {
                    CleanData::Power(mu) => pqse_run(KrylovData::Power(mu), r, criterion)?,
                    CleanData::Rte(t) => pqse_run(KrylovData::Rte(&t.leading(r)?), r, criterion)?,
                };
                fill_pqse(rec, &result);
                result.b
            }
        };
        let energy = rec.energy.expect("energy set by solver");
        rec.eps_rel = Some(relative_error(energy, truth)?);
        if self.config.fidelity {
            rec.fidelity = Some(self.fidelity_of(&coeffs, basis)?);
        }
        Ok(())
    }
}

fn fill_gevp(rec: &mut ExperimentRecord, sol: &GevpSolution) {
    rec.energy = Some(sol.ground_energy());
    rec.retained_dim = Some(sol.retained_dim);
}

fn fill_pqse(rec: &mut ExperimentRecord, result: &PqseResult) {
    rec.energy = Some(result.energy);
    rec.sequence = Some(result.sequence.clone());
    rec.order = Some(result.order());
    rec.terminated_early = Some(result.terminated_early);
}

fn build_clean(system: &PreparedSystem, basis: BasisSpec, r_max: usize, counter: &AtomicUsize) -> Result<CleanData> {
    counter.fetch_add(1, Ordering::Relaxed);
    Ok(match basis {
        BasisSpec::Power => CleanData::Power(compute_moments(&system.hamiltonian, &system.reference, 4 * r_max)?),
        BasisSpec::Rte { dt } => {
            let dt = match dt {
                Some(dt) => dt,
                None => default_dt(&system.hamiltonian)?,
            };
            CleanData::Rte(rte_tensors(&system.hamiltonian, &system.reference, r_max, dt)?)
        }
    })
}

/// Builds and runs an experiment.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    Ok(Experiment::new(config.clone())?.run())
}
