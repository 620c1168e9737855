use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use markov_elim::cli::{self, table1, CliError, RunConfig};

#[derive(Parser)]
#[command(name = "markov-elim", version, about = "Effective Hamiltonians beyond adiabatic elimination")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate a configured scenario with every requested method and write CSVs.
    Run { config: PathBuf },
    /// Check the closed-form Rabi frequencies of the Lambda system.
    VerifyTable1 {
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        alpha: Vec<f64>,
    },
    /// Rabi frequencies over a range of one scenario parameter.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        param: String,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        points: usize,
        /// Output CSV; defaults to `<output>_sweep_<param>.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Show the built-in scenarios and their parameters.
    ListScenarios,
}

fn execute(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Run { config } => {
            let cfg = RunConfig::load(&config)?;
            let records = cli::run(&cfg)?;
            print!("{}", cli::summary_table(&records));
            Ok(cli::EXIT_OK)
        }
        Command::VerifyTable1 { x, alpha } => {
            let x = if x.is_empty() { table1::DEFAULT_X.to_vec() } else { x };
            let alpha = if alpha.is_empty() { table1::DEFAULT_ALPHA.to_vec() } else { alpha };
            let report = table1::verify_table1(&x, &alpha);
            print!("{report}");
            let failed = report.failures().count();
            println!("{} rows, {failed} failed", report.rows.len());
            Ok(if failed == 0 { cli::EXIT_OK } else { cli::EXIT_CHECK_FAILED })
        }
        Command::Sweep { config, param, from, to, points, out } => {
            let cfg = RunConfig::load(&config)?;
            let rows = cli::sweep(&cfg, &param, from, to, points)?;
            let path = out.unwrap_or_else(|| cli::sweep_output_path(&cfg, &param));
            cli::write_sweep_csv(&path, &param, &rows)?;
            let failed = rows.iter().filter(|r| r.status != "ok").count();
            println!("{} rows written to {} ({failed} failed)", rows.len(), path.display());
            Ok(cli::EXIT_OK)
        }
        Command::ListScenarios => {
            print!("{}", cli::list_scenarios());
            Ok(cli::EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(args.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("markov-elim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
