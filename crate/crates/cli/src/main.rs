use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nanolander_cli::{parse_config, run, ScenarioKind};

#[derive(Parser)]
#[command(
    name = "nanolander",
    version,
    about = "Asteroid nano-lander swarm simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gravity field of a polyhedron sampled on a plane.
    Gravity(Common),
    /// Thrust-propelled hop with attitude hold.
    Hop(Common),
    /// Reaction-wheel tumble or hop about a ground spike.
    Tumble(Common),
    /// Swarm dispersion over the target area.
    Coverage(Common),
    /// Swarm dispersion around an impact site.
    Exclusion(Common),
    /// NSGA-II campaign over swarm parameters.
    Evolve(Common),
}

#[derive(Args)]
struct Common {
    /// TOML config; defaults are used for missing keys or a missing file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("NANOLANDER_LOG", "warn"))
        .init();
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Gravity(a) => (ScenarioKind::Gravity, a),
        Command::Hop(a) => (ScenarioKind::Hop, a),
        Command::Tumble(a) => (ScenarioKind::Tumble, a),
        Command::Coverage(a) => (ScenarioKind::Coverage, a),
        Command::Exclusion(a) => (ScenarioKind::Exclusion, a),
        Command::Evolve(a) => (ScenarioKind::Evolve, a),
    };
    let result = parse_config(kind, args.config.as_deref()).and_then(|mut config| {
        if let Some(seed) = args.seed {
            config.set_seed(seed);
        }
        run(&config, &args.out)
    });
    match result {
        Ok(manifest) if manifest.converged => ExitCode::SUCCESS,
        Ok(_) => {
            eprintln!("{} scenario did not converge", kind.name());
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
