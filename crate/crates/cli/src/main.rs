mod args;
mod commands;
mod error;
mod pipeline;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::Context;
use error::{CliError, CliResult};

pub(crate) fn first_line(text: &str) -> String {
    let line = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    line.trim().trim_start_matches("error:").trim().to_owned()
}

pub(crate) fn dispatch(ctx: &Context, command: &Command) -> CliResult<()> {
    match command {
        Command::Ingest(a) => commands::ingest(ctx, a),
        Command::BuildGraph(a) => commands::build_graph(ctx, a),
        Command::Embed(a) => commands::embed(ctx, a),
        Command::Project(a) => commands::project(ctx, a),
        Command::Compose(a) => commands::compose(ctx, a),
        Command::Train(a) => commands::train(ctx, a),
        Command::Evaluate(a) => commands::evaluate(ctx, a),
        Command::Overlap(a) => commands::overlap(ctx, a),
        Command::AnalyzeErrors(a) => commands::analyze_errors(ctx, a),
        Command::Synth(a) => commands::synth(ctx, a),
        Command::Run(a) => {
            let outcomes = pipeline::run(ctx, a)?;
            let rebuilt = outcomes.iter().filter(|o| o.rebuilt).count();
            log::info!("{} stages, {} rebuilt, {} skipped", outcomes.len(), rebuilt, outcomes.len() - rebuilt);
            Ok(())
        }
    }
}

fn init(cli: &Cli) -> CliResult<Context> {
    let level: log::LevelFilter = cli
        .log_level
        .parse()
        .map_err(|_| CliError::usage(format!("unknown log level '{}'", cli.log_level)))?;
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp_millis()
        .target(env_logger::Target::Stderr)
        .init();
    let threads = match cli.threads {
        0 => std::thread::available_parallelism().map(usize::from).unwrap_or(1),
        n => n,
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
        log::debug!("thread pool already configured: {e}");
    }
    Ok(Context {
        data_dir: cli.data_dir.clone(),
        threads,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = e.print();
            return ExitCode::from(error::Category::Usage.exit_code() as u8);
        }
        Err(e) => {
            let err = CliError::usage(first_line(&e.to_string()));
            eprintln!("{err}");
            return ExitCode::from(err.category.exit_code() as u8);
        }
    };
    let result = init(&cli).and_then(|ctx| dispatch(&ctx, &cli.command));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            ExitCode::from(err.category.exit_code() as u8)
        }
    }
}
