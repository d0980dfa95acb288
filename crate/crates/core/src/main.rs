#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pqse::gevp::{linspace, DEFAULT_A_COUNT, DEFAULT_A_RANGE};
use pqse::harness::{prepare_system, BasisSpec, Experiment, ExperimentConfig, Method, SystemSpec};
use pqse::report::{
    aggregate, emit_histograms, format_real, read_records_csv, write_aggregate_csv, write_histograms_csv,
    write_records_csv, write_records_json,
};
use pqse::simulator::MAX_DENSE_QUBITS;
use pqse::subspace::{compute_moments, default_dt, rte_tensors};
use pqse::{Error, Result};

#[derive(Parser)]
#[command(name = "pqse", version, about = "Quantum subspace expansion solvers on an exact statevector backend")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print clean moments (power basis) or evolution matrix elements (rte basis).
    Moments(Common),
    /// Plain QSE.
    Qse(Common),
    /// Thresholded QSE with an `a` scan, or a fixed `--tau`.
    Tqse(Common),
    /// Partitioned QSE.
    Pqse(Common),
    /// Several methods over the full grid, with an optional summary table.
    Sweep(Common),
    /// Partition-order, partition-count and retained-dimension histograms.
    Hist {
        /// Records CSV from an earlier run; if absent, a sweep is run.
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    Power,
    Rte,
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionArg {
    /// Magnitude of the measured variance.
    Variance,
    /// Measured variance with its sign.
    Signed,
    Energy2,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone)]
struct Common {
    /// Disordered Heisenberg ring: n,J,h,seed.
    #[arg(long, value_name = "n,J,h,seed", conflicts_with = "hamiltonian")]
    spin_ring: Option<String>,
    /// Pauli-sum file.
    #[arg(long, value_name = "FILE")]
    hamiltonian: Option<PathBuf>,
    /// Reference bitstring, qubit 0 first; overrides the file's `# ref:` line.
    #[arg(long = "ref", value_name = "BITSTRING")]
    reference: Option<String>,
    #[arg(long, value_enum, default_value = "power")]
    basis: BasisArg,
    /// Evolution timestep: `auto` (pi / ||H||) or a positive number.
    #[arg(long, default_value = "auto")]
    dt: String,
    #[arg(long, default_value_t = 1)]
    rmin: usize,
    #[arg(long, default_value_t = 10)]
    rmax: usize,
    /// Comma-separated noise strengths.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    delta: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Partition selection rule for `pqse`.
    #[arg(long, value_enum, default_value = "variance")]
    criterion: CriterionArg,
    /// Threshold scan grid: lo,hi,count.
    #[arg(long, value_name = "lo,hi,count")]
    a_grid: Option<String>,
    /// Fixed overlap threshold instead of the scan.
    #[arg(long)]
    tau: Option<f64>,
    /// Methods for `sweep` and `hist`, comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "qse,tqse,pqse")]
    methods: Vec<String>,
    /// Divide H by its spectral norm first.
    #[arg(long)]
    rescale: bool,
    /// Record ground-state fidelity of every estimate.
    #[arg(long)]
    fidelity: bool,
    /// Record wall time per row.
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Also write per-(method, R, delta) means and xi as CSV.
    #[arg(long)]
    summary: Option<PathBuf>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str, len: usize) -> Result<Vec<T>> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != len {
        return Err(invalid(format!("{what} expects {len} comma-separated values, got {s:?}")));
    }
    parts.iter().map(|p| p.parse::<T>().map_err(|_| invalid(format!("bad value {p:?} in {what}")))).collect()
}

impl Common {
    fn system(&self) -> Result<SystemSpec> {
        match (&self.spin_ring, &self.hamiltonian) {
            (Some(spec), None) => {
                let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
                if parts.len() != 4 {
                    return Err(invalid(format!("--spin-ring expects n,J,h,seed, got {spec:?}")));
                }
                let n: usize = parts[0].parse().map_err(|_| invalid(format!("bad qubit count {:?}", parts[0])))?;
                if n > MAX_DENSE_QUBITS {
                    return Err(Error::TooManyQubits { n, max: MAX_DENSE_QUBITS });
                }
                let num = |s: &str| s.parse::<f64>().map_err(|_| invalid(format!("bad number {s:?}")));
                Ok(SystemSpec::SpinRing {
                    n,
                    coupling: num(parts[1])?,
                    disorder: num(parts[2])?,
                    seed: parts[3].parse().map_err(|_| invalid(format!("bad seed {:?}", parts[3])))?,
                })
            }
            (None, Some(path)) => Ok(SystemSpec::PauliFile { path: path.clone(), reference: self.reference.clone() }),
            _ => Err(invalid("give exactly one of --spin-ring or --hamiltonian")),
        }
    }

    fn basis(&self) -> Result<BasisSpec> {
        Ok(match self.basis {
            BasisArg::Power => BasisSpec::Power,
            BasisArg::Rte if self.dt == "auto" => BasisSpec::Rte { dt: None },
            BasisArg::Rte => BasisSpec::Rte {
                dt: Some(self.dt.parse().map_err(|_| invalid(format!("--dt expects auto or a number, got {:?}", self.dt)))?),
            },
        })
    }

    fn config(&self, methods: Vec<Method>) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::new(self.system()?);
        cfg.basis = self.basis()?;
        cfg.methods = methods;
        cfg.r_min = self.rmin;
        cfg.r_max = self.rmax;
        cfg.deltas = self.delta.clone();
        cfg.instances = self.instances;
        cfg.master_seed = self.seed;
        cfg.a_grid = match &self.a_grid {
            None => linspace(DEFAULT_A_RANGE.0, DEFAULT_A_RANGE.1, DEFAULT_A_COUNT),
            Some(s) => {
                let (bounds, count) = s.rsplit_once(',').ok_or_else(|| invalid(format!("bad --a-grid {s:?}")))?;
                let lohi: Vec<f64> = parse_list(bounds, "--a-grid", 2)?;
                let count: usize = count.trim().parse().map_err(|_| invalid(format!("bad grid count {count:?}")))?;
                linspace(lohi[0], lohi[1], count)
            }
        };
        cfg.tqse_tau = self.tau;
        cfg.rescale = self.rescale;
        cfg.fidelity = self.fidelity;
        cfg.timing = self.timing;
        cfg.signed_variance = matches!(self.criterion, CriterionArg::Signed);
        Ok(cfg)
    }

    fn pqse_method(&self) -> Method {
        match self.criterion {
            CriterionArg::Variance | CriterionArg::Signed => Method::Pqse,
            CriterionArg::Energy2 => Method::PqseAlt,
        }
    }

    fn sweep_methods(&self) -> Result<Vec<Method>> {
        self.methods.iter().map(|m| Method::parse(m.trim())).collect()
    }

    fn output(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn run_methods(common: &Common, methods: Vec<Method>) -> Result<()> {
    let cfg = common.config(methods)?;
    let experiment = Experiment::new(cfg)?;
    let truth = experiment.system().truth();
    eprintln!("exact ground energy {}", format_real(truth));
    let records = experiment.run();
    let mut out = common.output()?;
    match common.format {
        Format::Csv => write_records_csv(&records, &mut out)?,
        Format::Json => write_records_json(&records, &mut out)?,
    }
    out.flush()?;
    if let Some(path) = &common.summary {
        write_aggregate_csv(&aggregate(&records)?, BufWriter::new(File::create(path)?))?;
    }
    Ok(())
}

fn moments(common: &Common) -> Result<()> {
    let system = prepare_system(&common.system()?, common.rescale)?;
    let mut out = common.output()?;
    match common.basis()? {
        BasisSpec::Power => {
            let mu = compute_moments(&system.hamiltonian, &system.reference, 2 * common.rmax)?;
            writeln!(out, "k,mu")?;
            for (k, m) in mu.values().iter().enumerate() {
                writeln!(out, "{k},{}", format_real(*m))?;
            }
        }
        BasisSpec::Rte { dt } => {
            let dt = match dt {
                Some(dt) => dt,
                None => default_dt(&system.hamiltonian)?,
            };
            let t = rte_tensors(&system.hamiltonian, &system.reference, common.rmax, dt)?;
            writeln!(out, "# dt {}", format_real(dt))?;
            writeln!(out, "tensor,i,j,re,im")?;
            for (name, m) in [("S", &t.s), ("H1", &t.h1), ("H2", &t.h2)] {
                for i in 0..m.nrows() {
                    for j in 0..m.ncols() {
                        let z = m[(i, j)];
                        writeln!(out, "{name},{i},{j},{},{}", format_real(z.re), format_real(z.im))?;
                    }
                }
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn hist(input: Option<&PathBuf>, common: &Common) -> Result<()> {
    let records = match input {
        Some(path) => read_records_csv(File::open(path)?)?,
        None => Experiment::new(common.config(common.sweep_methods()?)?)?.run(),
    };
    let histograms = emit_histograms(&records);
    let mut out = common.output()?;
    match common.format {
        Format::Csv => write_histograms_csv(&histograms, &mut out)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &histograms).map_err(|e| Error::Io(e.to_string()))?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Moments(c) => moments(c),
        Command::Qse(c) => run_methods(c, vec![Method::Qse]),
        Command::Tqse(c) => run_methods(c, vec![Method::Tqse]),
        Command::Pqse(c) => run_methods(c, vec![c.pqse_method()]),
        Command::Sweep(c) => c.sweep_methods().and_then(|m| run_methods(c, m)),
        Command::Hist { input, common } => hist(input.as_ref(), common),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
