mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::{Arg, ArgAction};
use commands::{registry, Global};

fn cli() -> clap::Command {
    let mut cmd = clap::Command::new("cuspforge")
        .about("Twisted cohomology, slice coordinates and generalized-cusp types of cusped hyperbolic 3-manifolds")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(Arg::new("json").long("json").global(true).action(ArgAction::SetTrue).help("emit JSON"))
        .arg(
            Arg::new("float")
                .long("float")
                .global(true)
                .action(ArgAction::SetTrue)
                .help("also run in f64 and compare ranks with exact mode"),
        )
        .arg(
            Arg::new("rank-tol")
                .long("rank-tol")
                .global(true)
                .value_parser(clap::value_parser!(f64))
                .help("relative pivot tolerance for float elimination (default 1e-8)"),
        );
    for c in registry() {
        cmd = cmd.subcommand(c.args(clap::Command::new(c.name()).about(c.about())));
    }
    cmd
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let command = registry().into_iter().find(|c| c.name() == name).expect("registered");
    // Global flags are propagated into the subcommand's matches.
    let global = Global {
        json: sub.get_flag("json"),
        float: sub.get_flag("float"),
        rank_tol: sub.get_one::<f64>("rank-tol").copied(),
    };
    match command.run(global, sub) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            // A closed pipe (e.g. `| head`) is not an error.
            let _ = if global.json && name != "lift" {
                writeln!(stdout, "{}", serde_json::to_string_pretty(&out.json).expect("JSON value"))
            } else {
                write!(stdout, "{}", out.text)
            };
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
