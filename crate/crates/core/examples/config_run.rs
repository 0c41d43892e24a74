//! Drives the library from configuration text, as the binary does.

use nfield::cli::{parse_config, run, Command, RunOptions};

const CONFIG: &str = "\
# contraction regime on a coarse grid
space.points = 257
firing.beta = 1
sim.dt = 0.01
sim.t_end = 3
analysis.t_transient = 5
analysis.t_sample = 1
analysis.trials = 50
";

fn main() -> nfield::error::Result<()> {
    let config = parse_config(CONFIG)?;
    let out = std::env::temp_dir().join("nfield-config-run");
    for command in [Command::Equilibrium, Command::Verify, Command::Energy] {
        let outcome = run(command, &config, &out, &RunOptions::default())?;
        println!(
            "{command:?}: pass = {}\n  {}",
            outcome.pass,
            outcome.summary.replace('\n', "\n  ")
        );
    }
    println!("\nfull configuration:\n{}", config.to_text());
    match parse_config("model.h = -1") {
        Ok(_) => unreachable!(),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
