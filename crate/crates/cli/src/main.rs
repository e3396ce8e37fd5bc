use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use szabo_cli::{emit_report, load_manifest, parse_grid, parse_point, run_command, CliError, Command, Format, Options};

/// Exact computations for affine connections described by a manifest.
///
/// Exit status: 0 verdict true or computation done, 1 verdict false,
/// 2 input error, 3 internal error.
#[derive(Parser)]
#[command(name = "szabo", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Only use this entry of [directions].
    #[arg(long)]
    direction: Option<String>,
    /// Point bindings, e.g. `u1=1,u2=1/2`.
    #[arg(long)]
    point: Option<String>,
    /// Integer sweep range `lo..hi` for classify-type-a/b.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
}

fn run(args: &Args) -> Result<Option<bool>, CliError> {
    let manifest = load_manifest(&args.manifest)?;
    let opts = Options {
        direction: args.direction.clone(),
        point: args.point.as_deref().map(parse_point).transpose()?.unwrap_or_default(),
        grid: args.grid.as_deref().map(parse_grid).transpose()?,
    };
    let report = run_command(args.command, &manifest, &opts)?;
    let mut stdout = std::io::stdout().lock();
    stdout
        .write_all(&emit_report(&report, args.format))
        .and_then(|()| stdout.flush())?;
    Ok(report.verdict)
}

fn main() -> ExitCode {
    let args = Args::parse();
    std::panic::set_hook(Box::new(|info| eprintln!("internal error: {info}")));
    match catch_unwind(AssertUnwindSafe(|| run(&args))) {
        Ok(Ok(Some(false))) => ExitCode::from(1),
        Ok(Ok(_)) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(_) => ExitCode::from(3),
    }
}
