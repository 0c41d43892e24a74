use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, ValueEnum};

use nfield::cli::{parse_config, run, Command, RunOptions};
use nfield::convolution::Engine;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Sub {
    Simulate,
    Verify,
    Equilibrium,
    Energy,
    Semicontinuity,
    Bench,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EngineArg {
    Direct,
    Fourier,
}

/// Simulate and certify nonlocal neural-field equations.
#[derive(Debug, Parser)]
#[command(name = "nfield", version)]
struct Args {
    #[arg(value_enum)]
    command: Sub,
    /// Run configuration (`section.key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Directory for CSV, JSON and snapshot output.
    #[arg(long)]
    out: PathBuf,
    /// Grid points per axis for `bench`, comma separated.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    engine: Option<EngineArg>,
    /// Monte-Carlo trials, overriding `analysis.trials`.
    #[arg(long)]
    trials: Option<usize>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            e.exit()
        }
        Err(e) => {
            let _ = e.print();
            eprintln!("\n{}", Args::command().render_usage());
            return ExitCode::from(2);
        }
    };
    let command = match args.command {
        Sub::Simulate => Command::Simulate,
        Sub::Verify => Command::Verify,
        Sub::Equilibrium => Command::Equilibrium,
        Sub::Energy => Command::Energy,
        Sub::Semicontinuity => Command::Semicontinuity,
        Sub::Bench => Command::Bench,
    };
    let options = RunOptions {
        sizes: args.sizes,
        engine: args.engine.map(|e| match e {
            EngineArg::Direct => Engine::Direct,
            EngineArg::Fourier => Engine::Fourier,
        }),
        trials: args.trials,
    };
    let outcome = std::fs::read_to_string(&args.config)
        .map_err(nfield::error::Error::from)
        .and_then(|text| parse_config(&text))
        .and_then(|config| run(command, &config, &args.out, &options));
    match outcome {
        Ok(o) => {
            println!("{}", o.summary);
            for f in &o.files {
                println!("wrote {}", f.display());
            }
            if o.pass {
                ExitCode::SUCCESS
            } else {
                eprintln!("one or more checks failed");
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
