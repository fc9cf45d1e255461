//! `ttokit`: experiments on model spaces and truncated Toeplitz operators.

mod commands;
mod input;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use ttokit::{BlaschkeProduct, Complex64, RationalFunction, Tolerances, DEFAULT_GRID_SIZE};

use commands::{CmdResult, Context};
use input::InputError;

const CSV_HELP: &str = "\
Output:
  JSON (default) is a single object with command, version, grid_size, seed,
  tolerances and passed, followed by the command's fields. With --csv the
  same metadata is written as '#' comment lines, then one table:
    basis     k, zero_re, zero_im, norm, value_at_0_re, value_at_0_im
    tto       row, col, re, im
    sarason   trial, kind, membership_distance, sarason_residual, is_member, sarason_member
    theorem   trial, zero_index, a_re, a_im, zeros, dim_S, dim_T,
              projector_distance, sarason_max_residual, passed
    divisors  zeros, degree, symmetry_residual, passed
    crofoot   a_re, a_im, zeros, target_zeros, unitarity, intertwining,
              transport, dim_source, dim_target
    lemma5    n, arc_mass, mass, z0_error, max_pointwise_error,
              max_ratio_error, uniform_sup, h_norm

Exit status: 0 when every check passes, 1 when a check fails or a
computation is rejected, 2 on invalid arguments.

Inner functions are JSON:
  {\"type\":\"blaschke\",\"zeros\":[{\"re\":0.5,\"im\":0.0}]}
  {\"type\":\"singular\",\"atoms\":[{\"angle\":0.0,\"weight\":1.0}]}";

#[derive(Parser)]
#[command(name = "ttokit", version, about, after_help = CSV_HELP)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Boundary grid size (a power of two, at least 32 per zero).
    #[arg(long, global = true, default_value_t = DEFAULT_GRID_SIZE)]
    grid_size: usize,
    /// Relative singular-value threshold for rank decisions.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Threshold for matrix identities such as J J* = I.
    #[arg(long, global = true, default_value_t = 1e-10)]
    identity_tol: f64,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Emit JSON (the default).
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Emit a CSV table instead of JSON.
    #[arg(long, global = true)]
    csv: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Orthonormal basis, conjugation and K_u^0 diagnostics for K_u.
    Basis {
        #[arg(long)]
        u: String,
    },
    /// Matrix of the truncated Toeplitz operator with a trigonometric symbol.
    Tto {
        #[arg(long)]
        u: String,
        /// {"analytic":[c0,c1,..],"coanalytic":[d1,d2,..]} with complex
        /// entries {"re":..,"im":..}; defaults to the shift z.
        #[arg(long)]
        symbol: Option<String>,
    },
    /// Sarason residual against Frobenius distance to T_u on random operators.
    Sarason {
        #[arg(long)]
        u: String,
        /// Trials; each draws one member of T_u and one Gaussian operator.
        #[arg(long, default_value_t = 20)]
        random_trials: usize,
    },
    /// Compare the two-symmetry constraint space with T_u.
    Theorem {
        /// Blaschke product; omit to draw --random-trials products of --degree.
        #[arg(long, required_unless_present = "random_trials")]
        u: Option<String>,
        /// Distinguished zero as re,im.
        #[arg(long, value_parser = input::parse_complex, allow_hyphen_values = true, required_unless_present = "random_trials")]
        a: Option<Complex64>,
        /// Also require dim = 2n-1.
        #[arg(long)]
        degree_check: bool,
        /// Number of random products to check at every zero.
        #[arg(long, conflicts_with_all = ["u", "a"], requires = "degree")]
        random_trials: Option<usize>,
        /// Degree of the random products.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=16))]
        degree: Option<u64>,
        /// Largest modulus of a random zero.
        #[arg(long, default_value_t = 0.9)]
        max_modulus: f64,
    },
    /// C_v-symmetry of the compressions of a random TTO to divisors v.
    Divisors {
        #[arg(long)]
        u: String,
        /// Every non-constant divisor.
        #[arg(long, required_unless_present = "v")]
        all: bool,
        /// A divisor as a Blaschke JSON object; may be repeated.
        #[arg(long, conflicts_with = "all")]
        v: Vec<String>,
    },
    /// Residuals of the unitary K_u -> K_{u o b_a}.
    Crofoot {
        #[arg(long)]
        u: String,
        #[arg(long, value_parser = input::parse_complex, allow_hyphen_values = true)]
        a: Complex64,
    },
    /// Arc-measure diagnostics for an atomic singular inner function.
    Lemma5 {
        /// Singular inner function JSON.
        #[arg(long)]
        nu: String,
        /// Angle of the distinguished atom; defaults to the first atom.
        #[arg(long, allow_hyphen_values = true)]
        eta: Option<f64>,
        /// Largest arc index n.
        #[arg(long, default_value_t = 400)]
        max_n: usize,
        /// Test function {"scale":c,"zeros":[..],"poles":[..]}; defaults to 1.
        #[arg(long)]
        g: Option<String>,
    },
}

#[derive(Serialize)]
struct Envelope<'a, B> {
    command: &'a str,
    version: &'a str,
    grid_size: usize,
    seed: u64,
    tolerances: Tolerances,
    passed: bool,
    #[serde(flatten)]
    body: B,
}

enum Failure {
    Usage(String),
    Compute(String),
    Io(String),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Usage(e.0)
    }
}

impl From<ttokit::Error> for Failure {
    fn from(e: ttokit::Error) -> Self {
        use ttokit::Error as E;
        match e {
            // arguments that violate a precondition
            E::NotAZero { .. }
            | E::NotAnAtom(_)
            | E::NotADivisor
            | E::OutsideDisc { .. }
            | E::InvalidGrid { .. }
            | E::Parse { .. }
            | E::InvalidMeasure(_) => Failure::Usage(e.to_string()),
            _ => Failure::Compute(e.to_string()),
        }
    }
}

struct Printer<'a> {
    name: &'a str,
    ctx: &'a Context,
    csv: bool,
}

impl Printer<'_> {
    fn emit<B: Serialize, R: Serialize>(&self, result: CmdResult<B, R>) -> Result<bool, Failure> {
        let outcome = result?;
        let text = if self.csv {
            self.csv_text(&outcome.rows)?
        } else {
            let env = Envelope {
                command: self.name,
                version: env!("CARGO_PKG_VERSION"),
                grid_size: self.ctx.grid_size,
                seed: self.ctx.seed,
                tolerances: self.ctx.tol,
                passed: outcome.passed,
                body: outcome.body,
            };
            let mut s = serde_json::to_string_pretty(&env).map_err(|e| Failure::Io(e.to_string()))?;
            s.push('\n');
            s
        };
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string()))?;
        Ok(outcome.passed)
    }

    fn csv_text<R: Serialize>(&self, rows: &[R]) -> Result<String, Failure> {
        let t = &self.ctx.tol;
        let mut text = format!(
            "# ttokit {} {}\n# grid_size={} seed={}\n# tol_rank={:e} tol_identity={:e} tol_sarason={:e} tol_symmetry={:e} tol_membership={:e} tol_subspace={:e}\n",
            env!("CARGO_PKG_VERSION"),
            self.name,
            self.ctx.grid_size,
            self.ctx.seed,
            t.rank,
            t.identity,
            t.sarason,
            t.symmetry,
            t.membership,
            t.subspace
        );
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in rows {
            w.serialize(row).map_err(|e| Failure::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
        text.push_str(&String::from_utf8_lossy(&bytes));
        Ok(text)
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let c = &cli.common;
    let ctx = Context {
        grid_size: c.grid_size,
        seed: c.seed,
        tol: Tolerances {
            rank: c.tol,
            identity: c.identity_tol,
            ..Tolerances::default()
        },
    };
    let name = match &cli.command {
        Command::Basis { .. } => "basis",
        Command::Tto { .. } => "tto",
        Command::Sarason { .. } => "sarason",
        Command::Theorem { .. } => "theorem",
        Command::Divisors { .. } => "divisors",
        Command::Crofoot { .. } => "crofoot",
        Command::Lemma5 { .. } => "lemma5",
    };
    let p = Printer {
        name,
        ctx: &ctx,
        csv: c.csv,
    };
    match cli.command {
        Command::Basis { u } => p.emit(commands::basis(&ctx, input::blaschke("--u", &u)?)),
        Command::Tto { u, symbol } => {
            let symbol = match symbol {
                Some(text) => input::symbol(&text)?,
                None => input::TrigSymbol::shift(),
            };
            p.emit(commands::tto(&ctx, input::blaschke("--u", &u)?, symbol))
        }
        Command::Sarason { u, random_trials } => {
            p.emit(commands::sarason(&ctx, input::blaschke("--u", &u)?, random_trials))
        }
        Command::Theorem {
            u,
            a,
            degree_check,
            random_trials,
            degree,
            max_modulus,
        } => match (u, a, random_trials, degree) {
            (Some(u), Some(a), None, _) => {
                p.emit(commands::theorem(&ctx, input::blaschke("--u", &u)?, a, degree_check))
            }
            (None, None, Some(trials), Some(degree)) => {
                if !(0.0..0.99).contains(&max_modulus) {
                    return Err(Failure::Usage("--max-modulus must lie in [0, 0.99)".into()));
                }
                p.emit(commands::theorem_trials(&ctx, degree as usize, trials, max_modulus))
            }
            _ => Err(Failure::Usage(
                "theorem needs either --u and --a, or --random-trials and --degree".into(),
            )),
        },
        Command::Divisors { u, all, v } => {
            let u = input::blaschke("--u", &u)?;
            let list = if all {
                u.divisors()
            } else {
                v.iter()
                    .map(|text| input::blaschke("--v", text))
                    .collect::<Result<Vec<BlaschkeProduct>, _>>()?
            };
            if let Some(bad) = list.iter().find(|v| !v.divides(&u)) {
                return Err(Failure::Usage(format!(
                    "--v: zeros [{}] do not divide u",
                    bad.zeros().iter().map(|z| z.to_string()).collect::<Vec<_>>().join(", ")
                )));
            }
            p.emit(commands::divisors(&ctx, u, list))
        }
        Command::Crofoot { u, a } => p.emit(commands::crofoot(&ctx, input::blaschke("--u", &u)?, a)),
        Command::Lemma5 { nu, eta, max_n, g } => {
            let nu = input::measure("--nu", &nu)?;
            let eta = match eta {
                Some(eta) => eta,
                None => nu
                    .atoms()
                    .first()
                    .map(|a| a.angle)
                    .ok_or_else(|| Failure::Usage("--nu: measure has no atoms".into()))?,
            };
            if nu.atom_at(eta).is_none() {
                return Err(Failure::Usage(format!("--eta: {eta} is not an atom of --nu")));
            }
            let g = match g {
                Some(text) => input::rational(&text)?,
                None => RationalFunction::one(),
            };
            p.emit(commands::lemma5(&ctx, nu, eta, max_n, g))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
