//! Command-line front end: `integrate`, `verify`, `order`, `eig`.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};

use clap::{Args, Parser, Subcommand};

use super::commands::{cmd_eig, cmd_integrate, cmd_order, cmd_verify, ExitStatus};
use super::config::{parse_config_text, Output, RunConfig};
use super::HarnessError;

#[derive(Debug, Parser)]
#[command(
    name = "poisson-integrators",
    version,
    about = "Poisson integrators for Hamilton-Poisson systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate and write the trajectory as CSV.
    Integrate(RunArgs),
    /// Run a structural check (poisson, symplectic2d, drift, tableau).
    Verify(RunArgs),
    /// Estimate the convergence order against the exact rigid-body solution.
    Order(RunArgs),
    /// Eigenvalues of the Lie-Trotter propagator R = M*N*P.
    Eig(RunArgs),
}

#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// `key = value` file read before the flags; flags override it.
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
    /// euler, modified_euler, trapezoid, midpoint, rk, ruth, lie_trotter, strang, yoshidaN
    #[arg(long)]
    pub method: Option<String>,
    /// rigid_body, harmonic_oscillator, example31
    #[arg(long)]
    pub system: Option<String>,
    /// Equal principal moments I1 = I2 (rigid_body).
    #[arg(long = "I1")]
    pub i1: Option<String>,
    /// Third principal moment, 0 < I3 < I1.
    #[arg(long = "I3")]
    pub i3: Option<String>,
    /// example31: H = A x1 + B x2 + C.
    #[arg(long = "A")]
    pub big_a: Option<String>,
    #[arg(long = "B")]
    pub big_b: Option<String>,
    #[arg(long = "C")]
    pub big_c: Option<String>,
    /// example31: one-stage tableau coefficient a.
    #[arg(long = "a-coef")]
    pub a_coef: Option<String>,
    /// example31: one-stage tableau weight b.
    #[arg(long = "b-coef")]
    pub b_coef: Option<String>,
    /// Initial state, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub m0: Option<String>,
    /// Step size.
    #[arg(long)]
    pub h: Option<String>,
    /// Number of steps.
    #[arg(long)]
    pub steps: Option<String>,
    /// Write every n-th step (first and last always written).
    #[arg(long = "sample-every")]
    pub sample_every: Option<String>,
    /// Seed for sampled states.
    #[arg(long)]
    pub seed: Option<String>,
    /// Finite-difference step for Jacobians.
    #[arg(long = "fd-eps")]
    pub fd_eps: Option<String>,
    /// CSV destination for `integrate`; `-` is stdout.
    #[arg(long)]
    pub output: Option<String>,
    /// poisson, symplectic2d, drift[:H|:C], tableau
    #[arg(long)]
    pub check: Option<String>,
    /// H or C, for `--check drift`.
    #[arg(long)]
    pub observable: Option<String>,
    /// Named tableau or inline `a11,a12;a21,a22|b1,b2`.
    #[arg(long, allow_hyphen_values = true)]
    pub tableau: Option<String>,
    /// Decreasing step sizes for `order`, comma separated.
    #[arg(long = "h-list")]
    pub h_list: Option<String>,
    /// Final time for `order`.
    #[arg(long = "T")]
    pub t_final: Option<String>,
    /// Use the frozen propagator M*N*P for Lie-Trotter.
    #[arg(long)]
    pub frozen: bool,
    /// Random states added to m0 by `verify --check poisson|symplectic2d`.
    #[arg(long)]
    pub samples: Option<String>,
    /// fixed_point or newton
    #[arg(long)]
    pub solver: Option<String>,
    /// Implicit solver tolerance, relative to max(1, |y|).
    #[arg(long = "solver-tol")]
    pub solver_tol: Option<String>,
}

impl RunArgs {
    /// Config-file pairs first, then flags, so flags win.
    pub fn to_config(&self) -> Result<RunConfig, HarnessError> {
        let mut pairs = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
                parse_config_text(&text)?
            }
            None => Vec::new(),
        };
        let flags: [(&str, &Option<String>); 22] = [
            ("method", &self.method),
            ("system", &self.system),
            ("I1", &self.i1),
            ("I3", &self.i3),
            ("A", &self.big_a),
            ("B", &self.big_b),
            ("C", &self.big_c),
            ("a_coef", &self.a_coef),
            ("b_coef", &self.b_coef),
            ("m0", &self.m0),
            ("h", &self.h),
            ("steps", &self.steps),
            ("sample_every", &self.sample_every),
            ("seed", &self.seed),
            ("fd_eps", &self.fd_eps),
            ("output", &self.output),
            ("check", &self.check),
            ("observable", &self.observable),
            ("tableau", &self.tableau),
            ("h_list", &self.h_list),
            ("T", &self.t_final),
            ("samples", &self.samples),
        ];
        pairs.extend(
            flags
                .iter()
                .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone()))),
        );
        if let Some(s) = &self.solver {
            pairs.push(("solver".into(), s.clone()));
        }
        if let Some(s) = &self.solver_tol {
            pairs.push(("solver_tol".into(), s.clone()));
        }
        if self.frozen {
            pairs.push(("frozen".into(), "true".into()));
        }
        RunConfig::from_pairs(&pairs)
    }
}

fn dispatch(command: &Command, stdout: &mut dyn Write) -> Result<ExitStatus, HarnessError> {
    match command {
        Command::Integrate(args) => {
            let cfg = args.to_config()?;
            match &cfg.output {
                Output::Stdout => cmd_integrate(&cfg, stdout),
                Output::File(path) => {
                    let file = File::create(path)
                        .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
                    let mut w = BufWriter::new(file);
                    let status = cmd_integrate(&cfg, &mut w);
                    w.flush()?;
                    status
                }
            }
        }
        Command::Verify(args) => cmd_verify(&args.to_config()?, stdout),
        Command::Order(args) => cmd_order(&args.to_config()?, stdout),
        Command::Eig(args) => cmd_eig(&args.to_config()?, stdout),
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() {
                ExitStatus::ConfigError.code()
            } else {
                0
            };
        }
    };
    let status = match dispatch(&cli.command, stdout) {
        Ok(status) => status,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_status()
        }
    };
    let _ = stdout.flush();
    status.code()
}
