//! Thin command-line front end over `zoge_sim::cli`.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use zoge_sim::cli::{self, RunConfig};
use zoge_sim::error::Error;

#[derive(Parser)]
#[command(
    name = "zoge-sim",
    version,
    about = "Loschmidt-echo / OTOC localization diagnostics on the incommensurate spin chain"
)]
struct Cli {
    /// Output root (default: $ZOGE_SIM_OUT or ./runs)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker pool size (default: all cores)
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Print the task decomposition and time estimate instead of running
    #[arg(long, global = true)]
    estimate: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Equilibrium Q0 versus W for the non-interacting chain
    OnebodySweep(OnebodySweepArgs),
    /// Local density of states by decimation, plus the eigenstate report
    Ldos(LdosArgs),
    /// Gradient-echo spectrum Q_n(t)
    Zoge(ZogeArgs),
    /// Forward-only S^2(t), P00(t), and polarization profiles
    S2Dynamics(S2Args),
    /// Asymptotic S^2 over a (W, U) grid with critical bounds and contour
    PhaseDiagram(PhaseDiagramArgs),
    /// Critical-disorder bracket from a Q0-vs-W (or S^2-vs-W) CSV
    FitCritical(FitCriticalArgs),
    /// Power-law exponents from an s2 CSV
    FitAlpha(FitAlphaArgs),
    /// Run every experiment section of a TOML config file
    Run(RunArgs),
}

#[derive(Args)]
struct ChainArgs {
    /// Site count N
    #[arg(long = "n")]
    n_sites: usize,
    /// Coupling J (energy unit)
    #[arg(long, default_value_t = 1.0)]
    j: f64,
    /// Incommensuration ratio (default: golden ratio)
    #[arg(long)]
    q: Option<f64>,
    /// Base seed for disorder phases and random states
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ChainArgs {
    fn build(&self) -> cli::ChainConfig {
        cli::ChainConfig {
            n_sites: self.n_sites,
            j: self.j,
            u: 0.0,
            q: self.q.unwrap_or(zoge_sim::GOLDEN_RATIO),
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct EvolutionArgs {
    /// Propagation method
    #[arg(long, default_value = "exact", value_parser = ["exact", "trotter"])]
    method: String,
    /// Trotter step in 1/J
    #[arg(long, default_value_t = 0.02)]
    dt: f64,
    /// Accept Trotter steps beyond the safety cap
    #[arg(long)]
    allow_large_dt: bool,
}

impl EvolutionArgs {
    fn build(&self) -> cli::EvolutionConfig {
        cli::EvolutionConfig {
            method: if self.method == "trotter" {
                cli::MethodChoice::Trotter
            } else {
                cli::MethodChoice::Exact
            },
            dt: self.dt,
            allow_large_dt: self.allow_large_dt,
        }
    }
}

fn parse_realizations(count: usize, phases: &Option<String>) -> Result<cli::Realizations, Error> {
    match phases {
        Some(list) => {
            let phases: Result<Vec<f64>, _> = list.split(',').map(|p| p.trim().parse()).collect();
            Ok(cli::Realizations::Explicit {
                phases: phases
                    .map_err(|e| Error::config("phases", format!("bad phase list: {e}")))?,
            })
        }
        None => Ok(cli::Realizations::Sampled { count }),
    }
}

#[derive(Args)]
struct OnebodySweepArgs {
    #[command(flatten)]
    chain: ChainArgs,
    /// W grid as start:stop:step
    #[arg(long)]
    w: String,
    /// Number of sampled disorder phases
    #[arg(long, default_value_t = 10)]
    realizations: usize,
    /// Explicit comma-separated phase list (overrides --realizations)
    #[arg(long)]
    phases: Option<String>,
    /// Excitation site: middle, end, or an index
    #[arg(long, default_value = "middle")]
    excite: String,
    /// Samples for the equilibrium time average
    #[arg(long, default_value_t = 256)]
    samples: usize,
}

#[derive(Args)]
struct LdosArgs {
    #[command(flatten)]
    chain: ChainArgs,
    #[arg(long)]
    w: f64,
    #[arg(long, default_value_t = 0.0)]
    phi: f64,
    /// Probe site: middle, end, or an index
    #[arg(long, default_value = "middle")]
    site: String,
    /// Broadening (default: band-adapted)
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long, default_value_t = 2001)]
    grid_points: usize,
}

#[derive(Args)]
struct ZogeArgs {
    #[command(flatten)]
    chain: ChainArgs,
    #[arg(long)]
    w: f64,
    #[arg(long, default_value_t = 0.0)]
    u: f64,
    #[arg(long, default_value_t = 1)]
    realizations: usize,
    #[arg(long)]
    phases: Option<String>,
    #[arg(long, default_value_t = 4)]
    seeds: usize,
    #[arg(long, default_value = "middle")]
    excite: String,
    /// Up-spin count of the working sector (default: (N+1)/2)
    #[arg(long)]
    ups: Option<u32>,
    /// Echo time grid count:min:max[:lin|log]
    #[arg(long, default_value = "24:0.5:500")]
    times: String,
    /// Kick-angle count (odd; default: next odd >= 4N+1)
    #[arg(long)]
    n_phi: Option<usize>,
    /// Use the exact all-down equilibrium state (single-excitation sector)
    #[arg(long)]
    exact_state: bool,
    #[command(flatten)]
    evolution: EvolutionArgs,
}

#[derive(Args)]
struct S2Args {
    #[command(flatten)]
    chain: ChainArgs,
    #[arg(long)]
    w: f64,
    #[arg(long, default_value_t = 0.0)]
    u: f64,
    #[arg(long, default_value_t = 5)]
    realizations: usize,
    #[arg(long)]
    phases: Option<String>,
    #[arg(long, default_value_t = 4)]
    seeds: usize,
    #[arg(long, default_value = "middle")]
    excite: String,
    #[arg(long)]
    ups: Option<u32>,
    /// Measurement grid count:min:max[:lin|log]
    #[arg(long, default_value = "120:0.1:500")]
    times: String,
    #[arg(long)]
    exact_state: bool,
    #[command(flatten)]
    evolution: EvolutionArgs,
}

#[derive(Args)]
struct PhaseDiagramArgs {
    #[command(flatten)]
    chain: ChainArgs,
    /// W grid start:stop:step
    #[arg(long)]
    w: String,
    /// U grid start:stop:step
    #[arg(long)]
    u: String,
    #[arg(long, default_value_t = 5)]
    realizations: usize,
    #[arg(long)]
    phases: Option<String>,
    #[arg(long, default_value_t = 4)]
    seeds: usize,
    #[arg(long, default_value = "middle")]
    excite: String,
    #[arg(long)]
    ups: Option<u32>,
    /// Horizon for the equilibrium average
    #[arg(long, default_value_t = 500.0)]
    t_max: f64,
    #[arg(long, default_value_t = 32)]
    samples: usize,
    #[command(flatten)]
    evolution: EvolutionArgs,
}

#[derive(Args)]
struct FitCriticalArgs {
    /// CSV with the observable versus W
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "w")]
    x_column: String,
    #[arg(long, default_value = "q0_mean")]
    y_column: String,
}

#[derive(Args)]
struct FitAlphaArgs {
    /// s2 CSV (columns t, s2, p00)
    #[arg(long)]
    input: PathBuf,
    /// Fit window as lo:hi
    #[arg(long, default_value = "10:500")]
    window: String,
    /// W label copied into the output
    #[arg(long, default_value_t = 0.0)]
    w: f64,
    /// U label copied into the output
    #[arg(long, default_value_t = 0.0)]
    u: f64,
}

#[derive(Args)]
struct RunArgs {
    /// TOML file with [[experiment]] sections
    config: PathBuf,
}

fn build_config(command: &Command) -> Result<Vec<RunConfig>, Error> {
    Ok(match command {
        Command::OnebodySweep(a) => vec![RunConfig::OnebodySweep(cli::OnebodySweepConfig {
            chain: a.chain.build(),
            w: cli::Grid::parse(&a.w)?,
            realizations: parse_realizations(a.realizations, &a.phases)?,
            excite: cli::ExcitationSite::parse(&a.excite)?,
            samples: a.samples,
        })],
        Command::Ldos(a) => vec![RunConfig::Ldos(cli::LdosConfig {
            chain: a.chain.build(),
            w: a.w,
            phi: a.phi,
            site: cli::ExcitationSite::parse(&a.site)?,
            eta: a.eta,
            grid_points: a.grid_points,
            edge_threshold_factor: 5.0,
        })],
        Command::Zoge(a) => vec![RunConfig::Zoge(cli::ZogeConfig {
            chain: a.chain.build(),
            w: a.w,
            u: a.u,
            realizations: parse_realizations(a.realizations, &a.phases)?,
            seeds: a.seeds,
            excite: cli::ExcitationSite::parse(&a.excite)?,
            ups: a.ups,
            times: cli::TimeGrid::parse(&a.times)?,
            n_phi: a.n_phi,
            evolution: a.evolution.build(),
            exact_state: a.exact_state,
        })],
        Command::S2Dynamics(a) => vec![RunConfig::S2Dynamics(cli::S2DynamicsConfig {
            chain: a.chain.build(),
            w: a.w,
            u: a.u,
            realizations: parse_realizations(a.realizations, &a.phases)?,
            seeds: a.seeds,
            excite: cli::ExcitationSite::parse(&a.excite)?,
            ups: a.ups,
            times: cli::TimeGrid::parse(&a.times)?,
            evolution: a.evolution.build(),
            exact_state: a.exact_state,
        })],
        Command::PhaseDiagram(a) => vec![RunConfig::PhaseDiagram(cli::PhaseDiagramConfig {
            chain: a.chain.build(),
            w: cli::Grid::parse(&a.w)?,
            u: cli::Grid::parse(&a.u)?,
            realizations: parse_realizations(a.realizations, &a.phases)?,
            seeds: a.seeds,
            excite: cli::ExcitationSite::parse(&a.excite)?,
            ups: a.ups,
            t_max: a.t_max,
            samples: a.samples,
            evolution: a.evolution.build(),
        })],
        Command::FitCritical(a) => vec![RunConfig::FitCritical(cli::FitCriticalConfig {
            input: a.input.clone(),
            x_column: a.x_column.clone(),
            y_column: a.y_column.clone(),
        })],
        Command::FitAlpha(a) => {
            let (lo, hi) = a
                .window
                .split_once(':')
                .ok_or_else(|| Error::config("window", "must be lo:hi"))?;
            vec![RunConfig::FitAlpha(cli::FitAlphaConfig {
                input: a.input.clone(),
                window_lo: lo
                    .parse()
                    .map_err(|_| Error::config("window", "bad lower bound"))?,
                window_hi: hi
                    .parse()
                    .map_err(|_| Error::config("window", "bad upper bound"))?,
                w: a.w,
                u: a.u,
            })]
        }
        Command::Run(a) => {
            let text = std::fs::read_to_string(&a.config)?;
            cli::parse_run_file(&text)?.experiment
        }
    })
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let configs = match build_config(&args.command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(cli::EXIT_CONFIG as u8);
        }
    };

    let mut worst = 0i32;
    for config in &configs {
        if let Err(e) = config.validate() {
            eprintln!("config error: {e}");
            return ExitCode::from(cli::EXIT_CONFIG as u8);
        }
        if args.estimate {
            match cli::estimate_cost(config) {
                Ok(est) => {
                    println!("{} [{}]", config.kind(), config.run_id());
                    print!("{est}");
                }
                Err(e) => {
                    eprintln!("config error: {e}");
                    return ExitCode::from(cli::EXIT_CONFIG as u8);
                }
            }
            continue;
        }
        println!("{} -> {}", config.kind(), config.run_id());
        match cli::run(config, args.out.as_deref(), args.workers) {
            Ok(outcome) => {
                println!("  artifacts in {}", outcome.dir.display());
                if !outcome.failures.is_empty() {
                    eprintln!(
                        "  {} of {} tasks failed (see errors.log)",
                        outcome.failures.len(),
                        outcome.tasks
                    );
                }
                worst = worst.max(outcome.exit_code());
            }
            Err(e) => match e {
                Error::Config { .. } | Error::InvalidArgument(_) => {
                    eprintln!("config error: {e}");
                    return ExitCode::from(cli::EXIT_CONFIG as u8);
                }
                other => {
                    eprintln!("run failed: {other}");
                    worst = worst.max(cli::EXIT_TASK_FAILURE);
                }
            },
        }
    }
    ExitCode::from(worst as u8)
}
