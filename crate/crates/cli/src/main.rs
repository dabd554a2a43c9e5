use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use obspace::field::FieldKind;
use obspace::wigner::Grid;
use obspace_cli::commands::{load_space, parse_pair};
use obspace_cli::{read_file, CliError, ExampleOptions, GroundOptions, KsOptions, Outcome, PermutationDocument, WignerOptions, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "obspace", version, about = "Observation spaces, signed groundings and Wigner verification")]
struct Cli {
    /// Print reports as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Read (or write) scalars in this field: rational, quadratic:<d> or float.
    #[arg(long, global = true, value_parser = parse_field)]
    field: Option<FieldKind>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the consistency requirement; exit 1 on any violation.
    Check { file: PathBuf },
    /// Solve the grounding problem.
    Ground {
        file: PathBuf,
        /// Decide whether a nonnegative grounding exists.
        #[arg(long)]
        nonneg: bool,
        /// List the vertices of the nonnegative polytope.
        #[arg(long)]
        vertices: bool,
        /// Largest null-space dimension accepted by --vertices.
        #[arg(long, default_value_t = obspace::grounding::DEFAULT_MAX_DIM)]
        max_dim: usize,
        /// Restrict to groundings fixed by the permutation in this file.
        #[arg(long, value_name = "PERM_FILE")]
        symmetric: Option<PathBuf>,
    },
    /// Write a fixture as a space document.
    Example {
        /// piponi, feynman2, feynman3, schneider or hardy.
        name: String,
        /// Qubit amplitudes for the Feynman fixtures, e.g. "3/5,4/5 i".
        #[arg(long)]
        state: Option<String>,
        /// Write the fixture's automorphism as a permutation document.
        #[arg(long)]
        automorphism: bool,
        /// Write to this file instead of standard output.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Search a measurement frame for a rigid selection.
    Ks {
        /// Frame document {"bases": [[...], ...]}; Cabello's frame by default.
        #[arg(long)]
        frame: Option<PathBuf>,
        /// Exit 1 when no selection exists.
        #[arg(long)]
        require_selection: bool,
    },
    /// Wigner density, marginals and reconstruction for a one-dimensional state.
    Wigner {
        /// gaussian, hermite:<n> or sampled:<file>.
        #[arg(long, default_value = "gaussian")]
        state: String,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        /// n, lo,hi,n, x_lo,x_hi,n_x,p_lo,p_hi,n_p or default.
        #[arg(long, default_value = "default", value_parser = parse_grid, allow_hyphen_values = true)]
        grid: Grid,
        /// Marginal along a x + b p; repeatable.
        #[arg(long, value_name = "A,B", value_parser = parse_pair, allow_hyphen_values = true)]
        marginal: Vec<(f64, f64)>,
        /// Compare marginals with quantum densities in 16 directions.
        #[arg(long)]
        verify: bool,
        /// Rebuild the density from this many rays of marginal data.
        #[arg(long, value_name = "RAYS")]
        reconstruct: Option<usize>,
        /// Directory for field and density files.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_field(s: &str) -> Result<FieldKind, String> {
    s.parse().map_err(|e: obspace::Error| e.to_string())
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    s.parse().map_err(|e: obspace::Error| e.to_string())
}

fn run(cli: Cli) -> Result<(Outcome, Option<PathBuf>), CliError> {
    let field = cli.field;
    Ok(match cli.command {
        Command::Check { file } => (obspace_cli::check(&load_space(&file)?, field)?, None),
        Command::Ground { file, nonneg, vertices, max_dim, symmetric } => {
            let symmetric = match symmetric {
                Some(p) => Some(PermutationDocument::from_json(&read_file(&p)?)?),
                None => None,
            };
            let opts = GroundOptions { nonneg, vertices, max_dim, symmetric, field };
            (obspace_cli::ground(&load_space(&file)?, &opts)?, None)
        }
        Command::Example { name, state, automorphism, out } => {
            (obspace_cli::example(&ExampleOptions { name, state, automorphism, field })?, out)
        }
        Command::Ks { frame, require_selection } => (obspace_cli::ks(&KsOptions { frame, require_selection })?, None),
        Command::Wigner { state, hbar, grid, marginal, verify, reconstruct, out } => {
            let opts = WignerOptions { state, hbar, grid, marginals: marginal, verify, reconstruct, out };
            (obspace_cli::wigner(&opts)?, None)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok((outcome, target)) => {
            let text = outcome.report.render(json);
            let written = match target {
                Some(path) => std::fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display())),
                None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
