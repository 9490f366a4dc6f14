use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use engine_cli::{parse_window, run, write_report, Command, Verb};

/// Exact computations in the algebraic models. Exit status: 0 ok, 2 parse
/// or schema error, 3 invariant violation, 4 fixture mismatch.
#[derive(Parser)]
#[command(name = "engine", version)]
struct Args {
    /// One of star-check, homology, hom, ext, bracket, resolve, cover,
    /// split, burnside, restrict, fixtures, selftest.
    verb: String,
    /// Input files (JSON), `gen:<name>` for toral generators, or named
    /// Burnside elements.
    inputs: Vec<String>,
    /// Degree window lo:hi; chosen automatically (and logged) if absent.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    window: Option<(i64, i64)>,
    /// Write the JSON report here; `-` prints it instead of the summary.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Ring operation for burnside: mul (default) or add.
    #[arg(long)]
    op: Option<String>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let Some(verb) = Verb::parse(&args.verb) else {
        eprintln!("unknown verb {:?}", args.verb);
        return ExitCode::from(2);
    };
    let cmd = Command { verb, inputs: args.inputs, window: args.window, op: args.op };
    let report = match run(&cmd) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.code as u8);
        }
    };
    for line in &report.log {
        eprintln!("note: {line}");
    }
    match &args.out {
        Some(p) if p.as_os_str() == "-" => println!("{}", serde_json::to_string_pretty(&report.json).expect("json values serialise")),
        Some(p) => {
            print!("{}", report.text);
            if let Err(e) = write_report(p, &report) {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{}", report.text),
    }
    ExitCode::from(report.status.exit_code() as u8)
}
