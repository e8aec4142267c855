//! Command-line front end: sample noise, apply the linear solve, build the
//! renormalized source term, evaluate energy breakdowns, minimize, estimate
//! norms, and drive the registered studies.
//!
//! Every run that creates files does so inside a fresh output directory
//! (suffix-incremented, never overwritten) containing a `manifest.json`
//! with the fully defaulted configuration echo, the seed, and the code
//! version. Exit codes: 0 success, 2 configuration error naming the field,
//! 3 numerical abort naming the sample index.

use clap::{Args, Parser, Subcommand, ValueEnum};
use ripple::config::RunConfig;
use ripple::energy::{self, CauchyTrace, EnergyBreakdown, Triple};
use ripple::error::{Error, Result};
use ripple::field::Field;
use ripple::io::{self, RunManifest};
use ripple::minimize::{self, DiffQuotTable, MinimizeResult};
use ripple::noise::{EnsembleKind, TransformId};
use ripple::norms::{self, NormEstimate, NormKind, ScanRecord};
use ripple::ops;
use ripple::studies::{self, StudyReport};
use serde_json::json;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "ripple",
    version,
    about = "Pseudo-spectral laboratory for a renormalized variational problem on the 2-torus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every configuration-driven subcommand. Values given
/// here override the config file (if any), which overrides the defaults.
#[derive(Args, Clone, Debug)]
struct ConfigFlags {
    /// JSON configuration file; omitted fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Square grid side (sets both n1 and n2).
    #[arg(short = 'n', long)]
    n: Option<usize>,
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long)]
    n2: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Hölder-exponent offset ε used by ladder freezes and estimates.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, value_enum)]
    ensemble: Option<EnsembleArg>,
    /// Mollification scale for the smoothed ensembles.
    #[arg(long)]
    ell: Option<f64>,
    #[arg(long, value_enum)]
    transform: Option<TransformArg>,
    /// Initial (and maximal) descent step.
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    residual_tol: Option<f64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EnsembleArg {
    White,
    Mollified,
    Lattice,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TransformArg {
    SinShift,
    Identity,
}

/// How to freeze the source term F.
#[derive(Clone, Copy, Debug, ValueEnum)]
enum FreezeMode {
    /// The smooth-case product, no smoothing ladder.
    Exact,
    /// Descend the dyadic ladder until the Cauchy increment stops
    /// decreasing or the resolution floor is reached.
    Limit,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NormArg {
    HolderNeg,
    HolderPos,
    Besov,
    Hnorm,
    Lp,
    Harmonic,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one noise realization and persist it as xi.ripl.
    Noise {
        #[command(flatten)]
        flags: ConfigFlags,
        /// Sample index within the seeded ensemble.
        #[arg(long, default_value_t = 0)]
        index: usize,
    },
    /// Apply the preconditioner: read ξ, write v with 𝓛v = Pξ.
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
    },
    /// Build the source term F from a noise file, with the Cauchy trace.
    BuildF {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = FreezeMode::Limit)]
        mode: FreezeMode,
        #[command(flatten)]
        flags: ConfigFlags,
    },
    /// Print the energy breakdown row for given field files.
    Energy {
        /// Linear-response field file.
        #[arg(long)]
        v: PathBuf,
        /// Competitor field file, or the literal `zero`.
        #[arg(long)]
        w: String,
        /// Source-term file; defaults to the exact product built from v.
        #[arg(long)]
        f: Option<PathBuf>,
        /// Noise file; when given, the total energy of v + w is included.
        #[arg(long)]
        xi: Option<PathBuf>,
    },
    /// Sample, freeze F, minimize the renormalized energy, and persist
    /// the minimizer with its diagnostics.
    Minimize {
        #[command(flatten)]
        flags: ConfigFlags,
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long, value_enum, default_value_t = FreezeMode::Limit)]
        mode: FreezeMode,
    },
    /// Run a registered study and write its points and summary.
    Study {
        /// One of the registered study names.
        name: String,
        #[command(flatten)]
        flags: ConfigFlags,
    },
    /// Estimate a named norm of a field file and print one CSV row.
    Norm {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: NormArg,
        /// Primary exponent (Hölder α or β, Besov or Sobolev s).
        #[arg(long)]
        exponent: Option<f64>,
        /// Integrability parameter where applicable.
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Axis for directional estimators (1 or 2).
        #[arg(long, default_value_t = 1)]
        axis: u8,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli.command) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Noise { flags, index } => cmd_noise(&flags, index),
        Command::Solve { input, output } => cmd_solve(&input, &output),
        Command::BuildF { input, mode, flags } => cmd_build_f(&flags, &input, mode),
        Command::Energy { v, w, f, xi } => cmd_energy(&v, &w, f.as_deref(), xi.as_deref()),
        Command::Minimize { flags, index, mode } => cmd_minimize(&flags, index, mode),
        Command::Study { name, flags } => cmd_study(&name, &flags),
        Command::Norm { input, kind, exponent, p, axis } => {
            cmd_norm(&input, kind, exponent, p, axis)
        }
    }
}

fn command_echo() -> String {
    std::env::args().collect::<Vec<_>>().join(" ")
}

impl ConfigFlags {
    /// Resolve to a validated configuration: defaults (or the study's
    /// pinned defaults), then the config file, then explicit flags.
    fn into_config(&self, base: Option<RunConfig>) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                serde_json::from_str::<RunConfig>(&text).map_err(|e| Error::Config {
                    field: "config".into(),
                    reason: format!("{}: {e}", path.display()),
                })?
            }
            None => base.unwrap_or_default(),
        };
        if let Some(n) = self.n {
            cfg.n1 = n;
            cfg.n2 = n;
        }
        if let Some(n1) = self.n1 {
            cfg.n1 = n1;
        }
        if let Some(n2) = self.n2 {
            cfg.n2 = n2;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(samples) = self.samples {
            cfg.samples = samples;
        }
        if let Some(eps) = self.epsilon {
            cfg.epsilon = eps;
        }
        if let Some(kind) = self.ensemble {
            cfg.ensemble.kind = match kind {
                EnsembleArg::White => EnsembleKind::White,
                EnsembleArg::Mollified => EnsembleKind::GaussianMollified,
                EnsembleArg::Lattice => EnsembleKind::NongaussianLattice,
            };
        }
        if let Some(ell) = self.ell {
            cfg.ensemble.ell = ell;
        }
        if let Some(transform) = self.transform {
            cfg.ensemble.transform = match transform {
                TransformArg::SinShift => TransformId::SinShift,
                TransformArg::Identity => TransformId::Identity,
            };
        }
        if let Some(tau) = self.tau {
            cfg.solver.tau = tau;
        }
        if let Some(iters) = self.max_iters {
            cfg.solver.max_iters = iters;
        }
        if let Some(tol) = self.residual_tol {
            cfg.solver.residual_tol = tol;
        }
        if let Some(dir) = &self.out_dir {
            cfg.out_dir = dir.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Create the run directory `<out_dir>/<stage>-n<n1>x<n2>-seed<seed>` (with
/// a free suffix) and drop the manifest into it.
fn open_run_dir(cfg: &RunConfig, stage: &str) -> Result<PathBuf> {
    let name = format!("{stage}-n{}x{}-seed{}", cfg.n1, cfg.n2, cfg.seed);
    let dir = io::fresh_dir(&cfg.out_dir.join(name))?;
    let manifest = RunManifest::new(command_echo(), serde_json::to_value(cfg)?, cfg.seed);
    io::write_manifest(&dir, &manifest)?;
    Ok(dir)
}

fn cmd_noise(flags: &ConfigFlags, index: usize) -> Result<()> {
    let cfg = flags.into_config(None)?;
    let grid = cfg.grid()?;
    let count = cfg.samples.max(index + 1);
    let spec = cfg.ensemble.spec(grid, cfg.seed, count)?;
    let xi = spec.sample(index)?;
    let dir = open_run_dir(&cfg, "noise")?;
    let path = dir.join("xi.ripl");
    let meta = json!({
        "kind": "noise",
        "ensemble": cfg.ensemble,
        "seed": cfg.seed,
        "index": index,
    });
    io::write_field_with_meta(&path, &xi, &meta)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_solve(input: &Path, output: &Path) -> Result<()> {
    let xi = io::read_field(input)?;
    let v = ops::solve_linear(&xi);
    let meta = json!({
        "kind": "linear_response",
        "command": command_echo(),
        "code_version": env!("CARGO_PKG_VERSION"),
        "input": input.display().to_string(),
    });
    io::write_field_with_meta(output, &v, &meta)?;
    println!("wrote {}", output.display());
    Ok(())
}

fn freeze(xi: &Field, mode: FreezeMode, epsilon: f64) -> Result<(Triple, Option<CauchyTrace>)> {
    match mode {
        FreezeMode::Exact => Ok((Triple::exact(xi)?, None)),
        FreezeMode::Limit => {
            let (triple, trace) = Triple::limit(xi, epsilon, 2.0)?;
            Ok((triple, Some(trace)))
        }
    }
}

fn cmd_build_f(flags: &ConfigFlags, input: &Path, mode: FreezeMode) -> Result<()> {
    let cfg = flags.into_config(None)?;
    let xi = io::read_field(input)?;
    let (triple, trace) = freeze(&xi, mode, cfg.epsilon)?;
    let dir = open_run_dir(&cfg, "build-f")?;
    let path = dir.join("f.ripl");
    let meta = json!({
        "kind": "source_term",
        "input": input.display().to_string(),
        "t_used": triple.t_used,
        "epsilon": cfg.epsilon,
    });
    io::write_field_with_meta(&path, &triple.f, &meta)?;
    if let Some(trace) = &trace {
        io::write_csv(
            &dir.join("cauchy_trace.csv"),
            CauchyTrace::CSV_HEADER,
            &trace.csv_rows(),
        )?;
    }
    println!("wrote {} (frozen at t = {:.3e})", path.display(), triple.t_used);
    Ok(())
}

fn cmd_energy(
    v_path: &Path,
    w_arg: &str,
    f_path: Option<&Path>,
    xi_path: Option<&Path>,
) -> Result<()> {
    let v = io::read_field(v_path)?;
    let w = if w_arg == "zero" {
        Field::zeros(v.grid())
    } else {
        io::read_field(Path::new(w_arg))?
    };
    let f = match f_path {
        Some(path) => io::read_field(path)?,
        None => energy::build_f_exact(&v)?,
    };
    let mut row = energy::e_ren(&v, &f, &w)?;
    if let Some(path) = xi_path {
        let xi = io::read_field(path)?;
        row.e_tot = Some(energy::e_tot(&v.add(&w)?, &xi)?);
    }
    println!("{}", EnergyBreakdown::CSV_HEADER);
    println!("{}", row.csv_row());
    Ok(())
}

fn cmd_minimize(flags: &ConfigFlags, index: usize, mode: FreezeMode) -> Result<()> {
    let cfg = flags.into_config(None)?;
    let grid = cfg.grid()?;
    let count = cfg.samples.max(index + 1);
    let spec = cfg.ensemble.spec(grid, cfg.seed, count)?;
    let xi = spec.sample(index)?;
    let (triple, trace) = freeze(&xi, mode, cfg.epsilon)?;
    let dir = open_run_dir(&cfg, "minimize")?;
    let mut params = cfg.solver.params();
    params.abort_dump = Some(dir.join("abort.ripl"));
    let run = minimize::minimize(&triple.v, &triple.f, &params)?;

    let mut breakdown = energy::e_ren(&triple.v, &triple.f, &run.w_star)?;
    breakdown.e_tot = Some(energy::e_tot(&triple.v.add(&run.w_star)?, &triple.xi)?);
    let diffquot = minimize::diag_diffquot_energy(&run.w_star)?;
    let holder = minimize::holder_of_minimizer(&run.w_star, cfg.epsilon)?;

    let w_path = dir.join("w_star.ripl");
    let meta = json!({
        "kind": "minimizer",
        "index": index,
        "t_used": triple.t_used,
        "converged": run.converged,
        "iters": run.iters,
        "residual_norm": run.residual_norm,
    });
    io::write_field_with_meta(&w_path, &run.w_star, &meta)?;
    io::write_csv(
        &dir.join("trace.csv"),
        MinimizeResult::TRACE_CSV_HEADER,
        &run.trace_csv_rows(),
    )?;
    io::write_csv(
        &dir.join("energy.csv"),
        EnergyBreakdown::CSV_HEADER,
        &format!("{}\n", breakdown.csv_row()),
    )?;
    io::write_csv(&dir.join("diffquot.csv"), DiffQuotTable::CSV_HEADER, &diffquot.csv_rows())?;
    io::write_csv(
        &dir.join("norms.csv"),
        NormEstimate::CSV_HEADER,
        &format!("{}\n", holder.csv_row()),
    )?;
    if let Some(trace) = &trace {
        io::write_csv(&dir.join("cauchy_trace.csv"), CauchyTrace::CSV_HEADER, &trace.csv_rows())?;
    }
    println!(
        "{} after {} iterations: E_ren {:.6e}, residual {:.3e}, outputs in {}",
        if run.converged { "converged" } else { "stopped" },
        run.iters,
        breakdown.e_ren,
        run.residual_norm,
        dir.display(),
    );
    Ok(())
}

fn cmd_study(name: &str, flags: &ConfigFlags) -> Result<()> {
    let base = studies::study_defaults(name)?;
    let cfg = flags.into_config(Some(base))?;
    let report = studies::run_study(name, &cfg)?;
    let dir = open_run_dir(&cfg, name)?;
    let stem = format!("{name}_n{}x{}_seed{}", cfg.n1, cfg.n2, cfg.seed);
    io::write_csv(
        &dir.join(format!("{stem}_points.csv")),
        StudyReport::POINTS_CSV_HEADER,
        &report.points_csv_rows(),
    )?;
    std::fs::write(dir.join(format!("{stem}_summary.txt")), report.summary())?;
    print!("{}", report.summary());
    println!("outputs in {}", dir.display());
    Ok(())
}

fn cmd_norm(input: &Path, kind: NormArg, exponent: Option<f64>, p: f64, axis: u8) -> Result<()> {
    let f = io::read_field(input)?;
    let need_exponent = || {
        exponent.ok_or_else(|| Error::Config {
            field: "exponent".into(),
            reason: "this norm kind requires --exponent".into(),
        })
    };
    let grid = f.grid();
    let estimate = match kind {
        NormArg::HolderNeg => norms::holder_neg(&f, need_exponent()?)?,
        NormArg::HolderPos => norms::holder_pos(&f, need_exponent()?)?,
        NormArg::Besov => norms::besov(&f, need_exponent()?, p, axis)?,
        NormArg::Hnorm => norms::hnorm(&f, need_exponent()?)?,
        NormArg::Lp => NormEstimate {
            kind: NormKind::Lp,
            value: norms::lp_norm(&f, p)?,
            exponent: None,
            p: Some(p),
            axis: None,
            scan: ScanRecord::Spectral,
            grid: (grid.n1(), grid.n2()),
        },
        NormArg::Harmonic => NormEstimate {
            kind: NormKind::Harmonic,
            value: norms::harmonic_energy(&f)?,
            exponent: None,
            p: None,
            axis: None,
            scan: ScanRecord::Spectral,
            grid: (grid.n1(), grid.n2()),
        },
    };
    println!("{}", NormEstimate::CSV_HEADER);
    println!("{}", estimate.csv_row());
    Ok(())
}
