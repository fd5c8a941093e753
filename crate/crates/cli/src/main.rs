mod commands;
mod report;

use clap::{Parser, Subcommand};
use report::{ErrorReport, RunReport};
use std::path::PathBuf;
use std::process::ExitCode;

const MODEL_HELP: &str = "\
Model references use the grammar surface[:algebra][:K=sub][:wall=sub][:bulk2=algebra], e.g.
  torus2x2:z2   torus:s3   sphere:h8   disk:z2:K=full   disk:h8:K=z2z2   wall:s3:wall=(012)
Surfaces: sphere, torus, torusNxM, disk, diskNxM, wheelN, wall. The algebra defaults to z2 and
the subalgebra to full. A path to a JSON model file is accepted in place of a reference.
Algebra references: z2, z4, z2z2, s3, fun:s3, h8, dual:<name>, double:<name>, or an algebra file.

The JSON report goes to stdout, a readable summary to stderr. The exit code is 0 iff every
check passes. QDOUBLE_DENSE_CAP overrides the dense-matrix budget.";

#[derive(Parser)]
#[command(name = "qdouble", version, about = "Hopf-algebraic quantum double lattice models", after_help = MODEL_HELP)]
struct Cli {
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Hopf axioms, Haar integral properties and irrep dimensions.
    Verify {
        algebra: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Ground state degeneracy as the trace of the ground projector.
    Gsd { model: String },
    /// Tensor-network ground state, written as a binary payload plus a JSON header.
    Ground {
        model: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Run a ribbon script on a state (the ground state by default) and report excitations.
    Ribbon {
        model: String,
        script: PathBuf,
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Fail unless exactly this many terms are excited.
        #[arg(long)]
        expect_excited: Option<usize>,
    },
    /// The acceptance criteria.
    Acceptance {
        #[arg(default_value = "core")]
        suite: String,
        #[arg(long)]
        criterion: Option<usize>,
    },
    /// Dense matrix of one Hamiltonian term.
    ExportOp {
        model: String,
        #[arg(long)]
        term: String,
        /// Embed in the full Hilbert space instead of the term's support.
        #[arg(long)]
        full: bool,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Verify { .. } => "verify",
            Cmd::Gsd { .. } => "gsd",
            Cmd::Ground { .. } => "ground",
            Cmd::Ribbon { .. } => "ribbon",
            Cmd::Acceptance { .. } => "acceptance",
            Cmd::ExportOp { .. } => "export-op",
        }
    }

    fn run(&self) -> qdouble::Result<RunReport> {
        match self {
            Cmd::Verify { algebra, tol } => commands::verify(algebra, *tol),
            Cmd::Gsd { model } => commands::gsd(model),
            Cmd::Ground { model, out, tol } => commands::ground(model, out, *tol),
            Cmd::Ribbon { model, script, state, tol, expect_excited } => {
                commands::ribbon(model, script, state.as_deref(), *tol, *expect_excited)
            }
            Cmd::Acceptance { suite, criterion } => commands::acceptance(suite, *criterion),
            Cmd::ExportOp { model, term, full, tol } => commands::export_op(model, term, *full, *tol),
        }
    }
}

fn emit(json: String, to: Option<&PathBuf>) -> ExitCode {
    println!("{json}");
    if let Some(p) = to {
        if let Err(e) = std::fs::write(p, &json) {
            eprintln!("cannot write report {}: {e}", p.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.cmd.name();
    match cli.cmd.run() {
        Ok(mut rep) => {
            rep.finish();
            eprint!("{}", rep.summary());
            let json = serde_json::to_string_pretty(&rep).expect("report serializes");
            let code = emit(json, cli.report.as_ref());
            if code != ExitCode::SUCCESS {
                return code;
            }
            if rep.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            let json = serde_json::to_string_pretty(&ErrorReport::new(name, &e)).expect("report serializes");
            emit(json, cli.report.as_ref());
            ExitCode::from(2)
        }
    }
}
