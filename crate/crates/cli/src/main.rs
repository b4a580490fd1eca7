use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crossfree_cli::{
    cmd_table1, cmd_total, cmd_total_mixed, cmd_verify, parse_ks, CliError, Suite, DEFAULT_DIGITS,
    DEFAULT_SIZE,
};

#[derive(Parser)]
#[command(name = "crossfree", version, about = "Certified lower bounds on crossing-free graph counts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certified lower bound on the growth base for chains of k-point pockets.
    Total {
        #[arg(long, required_unless_present = "pockets")]
        k: Option<usize>,
        /// Comma-separated pocket sizes of one period, e.g. 2,3.
        #[arg(long, value_delimiter = ',', conflicts_with = "k")]
        pockets: Option<Vec<usize>>,
        #[arg(long, default_value_t = DEFAULT_SIZE)]
        size: usize,
        /// Decimal digits in the reported bounds.
        #[arg(long, default_value_t = DEFAULT_DIGITS)]
        precision: u32,
        #[arg(long, conflicts_with = "table")]
        json: bool,
        #[arg(long)]
        table: bool,
    },
    /// Cross-checks matrices against brute-force enumeration.
    Verify {
        /// convex, outer, census, swap, lemma2 or primitivity
        suite: String,
        #[arg(long)]
        max_n: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Census and inner bounds for a range of pocket sizes.
    Table1 {
        #[arg(long, default_value = "2..6")]
        ks: String,
        /// Also compute total bounds at this matrix size.
        #[arg(long)]
        size: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_DIGITS)]
        precision: u32,
        #[arg(long)]
        json: bool,
    },
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Total { k, pockets, size, precision, json, table } => {
            let report = match (k, pockets) {
                (Some(k), _) => cmd_total(k, size, precision)?,
                (None, Some(p)) => cmd_total_mixed(&p, size, precision)?,
                (None, None) => return Err(CliError::Usage("--k or --pockets is required".into())),
            };
            if json || !table {
                println!("{}", report.to_json_string());
            } else {
                print!("{}", report.to_table());
            }
            Ok(true)
        }
        Command::Verify { suite, max_n, json } => {
            let suite: Suite = suite.parse()?;
            let report = cmd_verify(suite, max_n.unwrap_or(suite.default_max_n()))?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                for line in &report.lines {
                    println!("{line}");
                }
                println!("{}: {}", report.suite, if report.passed { "pass" } else { "FAIL" });
            }
            Ok(report.passed)
        }
        Command::Table1 { ks, size, precision, json } => {
            let table = cmd_table1(&parse_ks(&ks)?, size, precision)?;
            if json {
                println!("{}", table.to_json_string());
            } else {
                print!("{}", table.to_text());
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
