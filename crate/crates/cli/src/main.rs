//! `ellipton`: command-line front end for `ellipton-core`.
//!
//! Exit codes: 0 success, 1 internal failure, 2 domain/contract/parse error
//! (JSON on stderr), 64 usage error.

mod cmd;
mod io;
mod manifest;
mod svg;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cmd::elementary::{GridArgs, WeierInput};
use cmd::{Ctx, Output};
use io::{parse_cx_arg, pretty, CliError, CliResult, Cx};
use manifest::{RunManifest, Tolerances};

const EX_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "ellipton",
    version,
    about = "Elliptic curves, Poncelet closure and D_n constraint checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write a run manifest (input/output digests, tolerances, seed).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Seed for randomised starts.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for tables and grids; never changes the output.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Closure tolerance (profile default 1e-8).
    #[arg(long, global = true)]
    closure_tol: Option<f64>,
    /// Incidence tolerance (profile default 1e-10).
    #[arg(long, global = true)]
    incidence_tol: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Jacobi elliptic functions.
    #[command(subcommand)]
    Special(Special),
    /// Weierstrass lattice data.
    #[command(subcommand)]
    Weier(Weier),
    /// O(4) spectral curves.
    #[command(subcommand)]
    Curve(Curve),
    /// Poncelet chains in a conic pencil.
    #[command(subcommand)]
    Poncelet(Poncelet),
    /// Spherical triangles.
    #[command(subcommand)]
    Sphere(Sphere),
    /// Contour integrals over the cycles of a spectral curve.
    #[command(subcommand)]
    Integrals(Integrals),
    /// D_n constraint equations.
    #[command(subcommand)]
    Dn(Dn),
}

#[derive(Subcommand, Debug)]
enum Special {
    /// CSV of K, K', sn, cn, dn and F(φ = x) over a grid.
    Eval {
        /// Moduli (repeatable or comma separated).
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.3, 0.5, 0.7, 0.9])]
        k: Vec<f64>,
        #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = 12)]
        steps: usize,
    },
}

#[derive(Subcommand, Debug)]
enum Weier {
    /// JSON of e_i, ω, ω', η_i, g2, g3 for (ρ, k) or (g2, g3).
    Report {
        #[arg(long, requires = "k", conflicts_with_all = ["g2", "g3"])]
        rho: Option<f64>,
        #[arg(long, requires = "rho")]
        k: Option<f64>,
        #[arg(long, requires = "g3", allow_hyphen_values = true)]
        g2: Option<f64>,
        #[arg(long, requires = "g2", allow_hyphen_values = true)]
        g3: Option<f64>,
    },
}

#[derive(Subcommand, Debug)]
enum Curve {
    /// JSON report of a multiplet {rho, alpha, beta} or {z, v, x}.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum Poncelet {
    /// Closure verdicts for {A, B, X0, n} or {A, B, chain}.
    Run {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum Sphere {
    /// Legendre addition residual for the triangle with vertices "re,im" or "inf".
    LegendreCheck {
        #[arg(value_parser = parse_cx_arg, allow_hyphen_values = true, num_args = 3)]
        vertices: Vec<Cx>,
    },
}

#[derive(Subcommand, Debug)]
enum Integrals {
    /// CSV of I_m over Γ_1..Γ_3 for m = −2..2.
    Table {
        #[arg(long = "in")]
        input: PathBuf,
        /// Add an adaptive-quadrature column.
        #[arg(long)]
        quadrature: bool,
    },
}

#[derive(Subcommand, Debug)]
enum Dn {
    /// Newton solve of the two Legendre relations.
    Solve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Closure constraint and Poncelet correspondence only.
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        /// Number of seeded starting labels.
        #[arg(long, default_value_t = 5)]
        starts: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Special(_) => "special eval",
            Command::Weier(_) => "weier report",
            Command::Curve(_) => "curve report",
            Command::Poncelet(_) => "poncelet run",
            Command::Sphere(_) => "sphere legendre-check",
            Command::Integrals(_) => "integrals table",
            Command::Dn(Dn::Solve { .. }) => "dn solve",
            Command::Dn(Dn::Check { .. }) => "dn check",
        }
    }
}

fn dispatch(command: Command, ctx: &Ctx) -> CliResult<Output> {
    match command {
        Command::Special(Special::Eval { k, from, to, steps }) => {
            cmd::elementary::special_eval(ctx, &GridArgs { k, from, to, steps })
        }
        Command::Weier(Weier::Report { rho, k, g2, g3 }) => {
            let input = match (rho, k, g2, g3) {
                (Some(rho), Some(k), None, None) => WeierInput::RhoK(rho, k),
                (None, None, Some(g2), Some(g3)) => WeierInput::Invariants(g2, g3),
                _ => return Err(CliError::user("contract", "give --rho and --k, or --g2 and --g3")),
            };
            cmd::elementary::weier_report(input)
        }
        Command::Curve(Curve::Report { input }) => cmd::curve::curve_report(&input),
        Command::Poncelet(Poncelet::Run { input, svg }) => cmd::poncelet::run(ctx, &input, svg),
        Command::Sphere(Sphere::LegendreCheck { vertices }) => {
            cmd::elementary::legendre_check([vertices[0], vertices[1], vertices[2]])
        }
        Command::Integrals(Integrals::Table { input, quadrature }) => {
            cmd::curve::integrals_table(ctx, &input, quadrature)
        }
        Command::Dn(Dn::Solve { input, svg }) => cmd::dn::solve(ctx, &input, svg),
        Command::Dn(Dn::Check { input, starts }) => cmd::dn::check(ctx, &input, starts),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::user("io", format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> CliResult<()> {
    let c = &cli.common;
    let ctx = Ctx {
        tol: Tolerances::resolve(c.closure_tol, c.incidence_tol)?,
        seed: c.seed,
        jobs: c.jobs.max(1),
    };
    let name = cli.command.name();
    let out = dispatch(cli.command, &ctx)?;
    match &c.out {
        Some(p) => write_file(p, &out.body)?,
        None => std::io::stdout()
            .write_all(&out.body)
            .map_err(|e| CliError::internal(format!("stdout: {e}")))?,
    }
    if let Some((p, bytes)) = &out.svg {
        write_file(p, bytes)?;
    }
    if let Some(p) = &c.manifest {
        let m = RunManifest::new(name, out.input.as_deref(), &out.body, ctx.tol, ctx.seed);
        let v = serde_json::to_value(&m).map_err(|e| CliError::internal(e.to_string()))?;
        write_file(p, &pretty(&v))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EX_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result =
        std::panic::catch_unwind(|| run(cli)).unwrap_or_else(|_| Err(CliError::internal("panic during evaluation")));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let mut err = std::io::stderr().lock();
            let _ = err.write_all(&pretty(&e.to_json()));
            ExitCode::from(e.code as u8)
        }
    }
}
