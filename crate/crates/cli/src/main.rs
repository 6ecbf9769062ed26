use std::io::Write;
use std::process::ExitCode;

use abelian_imp_cli::{run, Command, Format, Input, RunConfig};
use clap::{Parser, Subcommand, ValueEnum};

/// Ideal membership for affine constraint instances over finite Abelian groups.
#[derive(Parser, Debug)]
#[command(name = "abelian-imp", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Decide whether a polynomial vanishes on every solution.
    Decide(Args),
    /// Decide and print the membership certificate.
    Certify(Args),
    /// Degree-truncated Groebner basis in the original variables.
    Gb(Args),
    /// Find c with sum c_i g_i in the ideal of the instance.
    Ximp(Args),
    /// Find one solution or an infeasibility certificate.
    Solve(Args),
    /// List all solutions.
    Enumerate(Args),
    /// Test every tuple relation for invariance under x - y + z.
    CheckAffine(Args),
    /// Dump the unity basis, the interpolation maps and p'.
    Transform(Args),
    /// Brute-force vanishing test, for cross-checking `decide`.
    Oracle(Args),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FormatArg {
    Json,
    Text,
}

#[derive(clap::Args, Debug)]
struct Args {
    /// Instance file (JSON); `-` reads stdin.
    instance: String,
    /// Polynomial in text syntax, e.g. `x1*x2 - 1`. Repeatable.
    #[arg(short, long = "poly")]
    poly: Vec<String>,
    /// Polynomial file: JSON, a JSON array, or one text polynomial per line.
    #[arg(long = "poly-file")]
    poly_file: Vec<String>,
    /// Truncation degree for `gb`; refuse larger inputs elsewhere.
    #[arg(short, long)]
    degree: Option<u32>,
    /// Cap on enumerated solutions.
    #[arg(long, default_value_t = abelian_imp::instance::DEFAULT_CAP)]
    cap: u64,
    /// Search for a solution where a non-member is nonzero.
    #[arg(short, long)]
    witness: bool,
    /// Fix this coefficient of a `ximp` query to 1.
    #[arg(long)]
    pin: Option<usize>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

fn config(cmd: Cmd) -> RunConfig {
    let (command, a) = match cmd {
        Cmd::Decide(a) => (Command::Decide, a),
        Cmd::Certify(a) => (Command::Certify, a),
        Cmd::Gb(a) => (Command::Gb, a),
        Cmd::Ximp(a) => (Command::Ximp, a),
        Cmd::Solve(a) => (Command::Solve, a),
        Cmd::Enumerate(a) => (Command::Enumerate, a),
        Cmd::CheckAffine(a) => (Command::CheckAffine, a),
        Cmd::Transform(a) => (Command::Transform, a),
        Cmd::Oracle(a) => (Command::Oracle, a),
    };
    RunConfig {
        command,
        instance: Input::from_arg(&a.instance),
        polys: a.poly,
        poly_files: a.poly_file.iter().map(|p| Input::from_arg(p)).collect(),
        degree: a.degree,
        cap: a.cap,
        witness: a.witness,
        pin: a.pin,
        format: match a.format {
            FormatArg::Json => Format::Json,
            FormatArg::Text => Format::Text,
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let report = run(&config(cli.command), &mut std::io::stdin().lock());
    let _ = std::io::stdout().write_all(report.stdout.as_bytes());
    let _ = std::io::stderr().write_all(report.stderr.as_bytes());
    ExitCode::from(report.status as u8)
}
