//! `magicwit`: local, stabilizer and quantum values of Bell inequalities.
//!
//! Exit codes: 0 success, 1 verification failure, 2 user error, 3 resource limit.

mod report;
mod spec_file;

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use magicwit::algebra::PrimeModulus;
use magicwit::bell::{
    catalog_cglmp, catalog_chsh, catalog_svetlichny_r2, catalog_tilted_chsh, local_bound_with_budget, BellInequality,
};
use magicwit::graphs::enumerate_classes_with_budget;
use magicwit::optimize::{
    gap_scan, heatmap_csv, param_grid, quantum_value_from, scan_csv, stabilizer_value, w_heatmap, OptimizerConfig,
};
use magicwit::verify::{run_all, run_check, Fault, VerifyOptions};
use magicwit::DEFAULT_ENUMERATION_BUDGET;

use report::{BoundsReport, ClassRow, ClassesReport, RunManifest};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] magicwit::Error),

    #[error("invalid inequality file {0}")]
    Spec(String),

    #[error("{0}")]
    Usage(String),

    #[error("cannot access {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(magicwit::Error::ResourceLimit { .. }) => 3,
            _ => 2,
        }
    }
}

#[derive(Parser)]
#[command(name = "magicwit", version, about = "Stabilizer, quantum and local values of multi-qudit Bell inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the local-Clifford classes of graph states on n qudits of prime dimension d.
    Classes {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: u32,
        /// Emit JSON instead of a table.
        #[arg(long)]
        json: bool,
        /// Largest number of adjacency matrices to enumerate.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
        budget: u64,
    },
    /// Compute local, stabilizer and quantum values as JSON.
    Bounds {
        /// Catalog name (chsh, tilted-chsh, cglmp, svetlichny-r2) or a JSON inequality file.
        spec: String,
        /// Tilting parameter for tilted-chsh.
        #[arg(long)]
        alpha: Option<f64>,
        /// Outcome count for cglmp (a prime).
        #[arg(long)]
        d: Option<u32>,
        /// Expected local dimensions, comma separated; checked against the inequality.
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        #[arg(long, value_enum, default_value_t = Which::All)]
        which: Which,
        #[command(flatten)]
        opt: OptArgs,
    },
    /// Scan a parametrized family and print `param,local,stab,quantum,gap` CSV.
    Scan {
        #[arg(value_enum)]
        family: Family,
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long, default_value_t = 2.0)]
        to: f64,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        opt: OptArgs,
    },
    /// Optimized S3+R2 values over the generalized W family as `theta,phi,value` CSV (angles in units of π).
    Heatmap {
        #[arg(long, default_value_t = 13)]
        theta_steps: usize,
        #[arg(long, default_value_t = 13)]
        phi_steps: usize,
        /// Upper end of the θ range in units of π.
        #[arg(long, default_value_t = 0.5)]
        theta_max: f64,
        /// Upper end of the φ range in units of π.
        #[arg(long, default_value_t = 0.5)]
        phi_max: f64,
        /// Also evaluate the W point θ = arccos(1/√3), φ = π/4.
        #[arg(long)]
        w_point: bool,
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        opt: OptArgs,
    },
    /// Run the acceptance checks.
    Verify {
        /// Only the fast checks.
        #[arg(long)]
        quick: bool,
        #[arg(long, env = "MAGICWIT_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Run only these checks (1-8); may be repeated.
        #[arg(long = "check", value_parser = clap::value_parser!(u8).range(1..=8))]
        checks: Vec<u8>,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultArg>,
    },
}

#[derive(Args, Clone)]
struct OptArgs {
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, env = "MAGICWIT_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

impl OptArgs {
    fn config(&self) -> Result<OptimizerConfig, CliError> {
        let cfg = OptimizerConfig {
            restarts: self.restarts,
            max_iters: self.max_iters,
            tol: self.tol,
            seed: self.seed,
            jobs: self.jobs,
            enumeration_budget: DEFAULT_ENUMERATION_BUDGET,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn stamp(&self, m: &mut RunManifest) {
        m.seed = Some(self.seed);
        m.restarts = Some(self.restarts);
        m.max_iters = Some(self.max_iters);
        m.tol = Some(self.tol);
        m.jobs = Some(self.jobs);
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    Local,
    Stab,
    Quantum,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    TiltedChsh,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    Cglmp,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command_line = std::env::args().collect::<Vec<_>>().join(" ");
    let start = Instant::now();
    match run(cli.command, command_line, start) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command, command_line: String, start: Instant) -> Result<u8, CliError> {
    match command {
        Command::Classes { n, d, json, budget } => {
            let d = PrimeModulus::new(d)?;
            let cat = enumerate_classes_with_budget(n, d, budget)?;
            let rows: Vec<ClassRow> = cat
                .representatives
                .iter()
                .zip(&cat.orbit_sizes)
                .enumerate()
                .map(|(index, (a, &orbit_size))| ClassRow {
                    index,
                    edges: a.edges().into_iter().map(|(i, j, w)| [i as u32, j as u32, w]).collect(),
                    orbit_size,
                })
                .collect();
            let mut out = String::new();
            if json {
                let report = ClassesReport { n, d: d.get(), total: cat.total(), classes: rows };
                out.push_str(&to_json(&report));
            } else {
                out.push_str("class\torbit_size\tedges\n");
                for (row, a) in rows.iter().zip(&cat.representatives) {
                    out.push_str(&format!("{}\t{}\t{a}\n", row.index, row.orbit_size));
                }
            }
            emit(&out, None, RunManifest::new(command_line, start.elapsed()))?;
            Ok(0)
        }
        Command::Bounds { spec, alpha, d, dims, which, opt } => {
            let ineq = resolve_inequality(&spec, alpha, d)?;
            if let Some(dims) = dims {
                if dims != ineq.scenario.outcomes {
                    return Err(CliError::Usage(format!(
                        "--dims {dims:?} does not match the inequality's outcome counts {:?}",
                        ineq.scenario.outcomes
                    )));
                }
            }
            let cfg = opt.config()?;
            let wants = |w: Which| which == Which::All || which == w;
            let local = if wants(Which::Local) { Some(local_bound_with_budget(&ineq, cfg.enumeration_budget)?) } else { None };
            let stab = if wants(Which::Stab) { Some(stabilizer_value(&ineq, &cfg)?) } else { None };
            let quantum = if wants(Which::Quantum) { Some(quantum_value_from(&ineq, &cfg, stab.as_ref())?) } else { None };
            let converged = match (&stab, &quantum) {
                (None, None) => None,
                (s, q) => Some(s.as_ref().is_none_or(|r| r.converged) && q.as_ref().is_none_or(|r| r.converged)),
            };
            let report = BoundsReport {
                inequality: ineq.name.clone(),
                outcomes: ineq.scenario.outcomes.clone(),
                settings: ineq.scenario.settings.clone(),
                local,
                stabilizer: stab.as_ref().map(|r| r.value),
                quantum: quantum.as_ref().map(|r| r.value),
                gap: stab.as_ref().zip(quantum.as_ref()).map(|(s, q)| q.value - s.value),
                stabilizer_class: stab.as_ref().and_then(|r| r.best_class.as_ref()).map(|c| c.to_string()),
                converged,
            };
            let mut manifest = RunManifest::new(command_line, start.elapsed());
            opt.stamp(&mut manifest);
            emit(&to_json(&report), None, manifest)?;
            Ok(0)
        }
        Command::Scan { family, from, to, step, output, opt } => {
            let params = param_grid(from, to, step)?;
            let cfg = opt.config()?;
            let rows = match family {
                Family::TiltedChsh => gap_scan(&catalog_tilted_chsh, &params, &cfg)?,
            };
            let mut manifest = RunManifest::new(command_line, start.elapsed());
            opt.stamp(&mut manifest);
            emit(&scan_csv(&rows), output.as_deref(), manifest)?;
            Ok(0)
        }
        Command::Heatmap { theta_steps, phi_steps, theta_max, phi_max, w_point, output, opt } => {
            if theta_steps < 2 || phi_steps < 2 {
                return Err(CliError::Usage("grid sizes must be at least 2".into()));
            }
            for (flag, v) in [("--theta-max", theta_max), ("--phi-max", phi_max)] {
                if !(v > 0.0 && v <= 1.0) {
                    return Err(CliError::Usage(format!("{flag} must lie in (0, 1] (units of π)")));
                }
            }
            let mut thetas = linspace(theta_max * PI, theta_steps);
            let mut phis = linspace(phi_max * PI, phi_steps);
            if w_point {
                insert_sorted(&mut thetas, (1.0 / 3f64.sqrt()).acos());
                insert_sorted(&mut phis, PI / 4.0);
            }
            let cfg = opt.config()?;
            let cells = w_heatmap(&thetas, &phis, &cfg)?;
            let mut manifest = RunManifest::new(command_line, start.elapsed());
            opt.stamp(&mut manifest);
            emit(&heatmap_csv(&cells), output.as_deref(), manifest)?;
            Ok(0)
        }
        Command::Verify { quick, seed, jobs, checks, inject_fault } => {
            let fault = inject_fault.map(|FaultArg::Cglmp| Fault::CorruptCglmp);
            let opts = VerifyOptions { quick, fault, seed, jobs };
            let results = if checks.is_empty() {
                run_all(&opts)
            } else {
                checks.iter().map(|&id| run_check(id, &opts)).collect()
            };
            let mut stdout = std::io::stdout().lock();
            let mut failed = Vec::new();
            for r in &results {
                let status = if r.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(
                    stdout,
                    "[{status}] {} {} ({:.2}s): {}",
                    r.id,
                    r.name,
                    r.elapsed.as_secs_f64(),
                    r.detail
                );
                if !r.passed {
                    failed.push(format!("{} {}", r.id, r.name));
                }
            }
            if failed.is_empty() {
                let _ = writeln!(stdout, "all {} checks passed", results.len());
                Ok(0)
            } else {
                let _ = writeln!(stdout, "failed checks: {}", failed.join(", "));
                Ok(1)
            }
        }
    }
}

fn linspace(max: f64, steps: usize) -> Vec<f64> {
    (0..steps).map(|i| max * i as f64 / (steps - 1) as f64).collect()
}

fn insert_sorted(values: &mut Vec<f64>, v: f64) {
    if values.iter().all(|&x| (x - v).abs() > 1e-12) {
        let pos = values.partition_point(|&x| x < v);
        values.insert(pos, v);
    }
}

fn resolve_inequality(spec: &str, alpha: Option<f64>, d: Option<u32>) -> Result<BellInequality, CliError> {
    let unused = |flag: &str, name: &str| CliError::Usage(format!("{flag} does not apply to {name}"));
    let ineq = match spec {
        "chsh" | "svetlichny-r2" => {
            if alpha.is_some() {
                return Err(unused("--alpha", spec));
            }
            if d.is_some() {
                return Err(unused("--d", spec));
            }
            if spec == "chsh" {
                catalog_chsh()
            } else {
                catalog_svetlichny_r2()
            }
        }
        "tilted-chsh" => {
            if d.is_some() {
                return Err(unused("--d", spec));
            }
            let alpha = alpha.ok_or_else(|| CliError::Usage("tilted-chsh needs --alpha".into()))?;
            catalog_tilted_chsh(alpha)?
        }
        "cglmp" => {
            if alpha.is_some() {
                return Err(unused("--alpha", spec));
            }
            let d = d.ok_or_else(|| CliError::Usage("cglmp needs --d".into()))?;
            catalog_cglmp(PrimeModulus::new(d)?)
        }
        path => {
            let path = Path::new(path);
            if !path.exists() {
                return Err(CliError::Usage(format!(
                    "`{spec}` is neither a catalog name (chsh, tilted-chsh, cglmp, svetlichny-r2) nor an existing file"
                )));
            }
            if alpha.is_some() || d.is_some() {
                return Err(CliError::Usage("--alpha and --d apply to catalog inequalities only".into()));
            }
            spec_file::load(path)?
        }
    };
    Ok(ineq)
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Writes the payload to `output` (or stdout) and the manifest to stderr,
/// plus `<output>.manifest.json` when writing to a file.
fn emit(payload: &str, output: Option<&Path>, manifest: RunManifest) -> Result<(), CliError> {
    let manifest_json = serde_json::to_string(&manifest).expect("manifest serializes");
    match output {
        Some(path) => {
            std::fs::write(path, payload).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
            let mut side = path.as_os_str().to_owned();
            side.push(".manifest.json");
            let side = PathBuf::from(side);
            std::fs::write(&side, format!("{manifest_json}\n")).map_err(|source| CliError::Io { path: side, source })?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(payload.as_bytes())
                .map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })?;
        }
    }
    eprintln!("{manifest_json}");
    Ok(())
}
