//! Sweep orchestration: configuration, deterministic parallel execution,
//! artifacts, and cost estimation.
//!
//! Every run gets a directory named by a content hash of its config under
//! the output root ($ZOGE_SIM_OUT or ./runs). Completed heavy tasks leave
//! per-task files behind and are never recomputed on resume; re-running an
//! identical config reproduces identical numeric output.

mod config;
mod experiments;

pub use config::{
    default_ups, parse_run_file, ChainConfig, EvolutionConfig, ExcitationSite, FitAlphaConfig,
    FitCriticalConfig, Grid, LdosConfig, MethodChoice, OnebodySweepConfig, PhaseDiagramConfig,
    Realizations, RunConfig, RunFile, S2DynamicsConfig, TimeGrid, ZogeConfig,
};
pub use experiments::ExperimentOutput;

use crate::error::{Error, Result};
use crate::io;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

/// Exit code for invalid configuration.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code for partial task failure.
pub const EXIT_TASK_FAILURE: i32 = 1;

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    kind: &'a str,
    run_id: String,
    code_version: &'a str,
    started_unix: u64,
    elapsed_seconds: f64,
    tasks: usize,
    failures: usize,
    failure_log: &'a [String],
    outputs: Vec<String>,
    config: &'a RunConfig,
}

/// Outcome of one run.
#[derive(Debug)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub tasks: usize,
    pub failures: Vec<String>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            0
        } else {
            EXIT_TASK_FAILURE
        }
    }
}

/// Validates the config, prepares the run directory, executes the
/// experiment, and writes the manifest.
pub fn run(config: &RunConfig, out_root: Option<&Path>, workers: Option<usize>) -> Result<RunOutcome> {
    config.validate()?;
    let root = out_root
        .map(Path::to_path_buf)
        .unwrap_or_else(io::default_out_root);
    let dir = root.join(config.run_id());
    io::ensure_dir(&dir)?;

    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let clock = Instant::now();

    let body = || dispatch(config, &dir);
    let output = match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::invalid(format!("worker pool: {e}")))?
            .install(body),
        None => body(),
    }?;

    let manifest = Manifest {
        kind: config.kind(),
        run_id: config.run_id(),
        code_version: env!("CARGO_PKG_VERSION"),
        started_unix: started,
        elapsed_seconds: clock.elapsed().as_secs_f64(),
        tasks: output.tasks,
        failures: output.failures.len(),
        failure_log: &output.failures,
        outputs: output
            .files
            .iter()
            .map(|p| p.display().to_string())
            .collect(),
        config,
    };
    io::write_json(&dir.join("manifest.json"), &manifest)?;
    if !output.failures.is_empty() {
        io::write_atomic(
            &dir.join("errors.log"),
            output.failures.join("\n").as_bytes(),
        )?;
    }

    for line in &output.summary {
        println!("  {line}");
    }
    Ok(RunOutcome {
        dir,
        files: output.files,
        tasks: output.tasks,
        failures: output.failures,
    })
}

fn dispatch(config: &RunConfig, dir: &Path) -> Result<ExperimentOutput> {
    match config {
        RunConfig::OnebodySweep(c) => experiments::run_onebody_sweep(c, dir),
        RunConfig::Ldos(c) => experiments::run_ldos(c, dir),
        RunConfig::Zoge(c) => experiments::run_zoge(c, dir),
        RunConfig::S2Dynamics(c) => experiments::run_s2_dynamics(c, dir),
        RunConfig::PhaseDiagram(c) => experiments::run_phase_diagram(c, dir),
        RunConfig::FitCritical(c) => experiments::run_fit_critical(c, dir),
        RunConfig::FitAlpha(c) => experiments::run_fit_alpha(c, dir),
    }
}

/// Task decomposition and a calibration-based wall-time estimate.
#[derive(Debug, Clone)]
pub struct CostEstimate {
    pub tasks: usize,
    pub evolutions: usize,
    /// Rough amplitude-update count across the whole run.
    pub amp_ops: f64,
    pub seconds: f64,
    pub lines: Vec<String>,
}

impl std::fmt::Display for CostEstimate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for line in &self.lines {
            writeln!(f, "{line}")?;
        }
        writeln!(f, "tasks: {}", self.tasks)?;
        writeln!(f, "evolutions: {}", self.evolutions)?;
        writeln!(f, "estimated wall time: {:.1} s (single core)", self.seconds)
    }
}

/// Predicts the cost of a run without executing it.
pub fn estimate_cost(config: &RunConfig) -> Result<CostEstimate> {
    config.validate()?;
    let rate = calibrated_amp_rate();
    let est = match config {
        RunConfig::OnebodySweep(c) => {
            let n = c.chain.n_sites as f64;
            let tasks = c.w.values().len() * c.realizations.count();
            // diagonalization ~ 9 n^3, time sampling ~ samples * 6 n^2
            let per_task = 9.0 * n * n * n + c.samples as f64 * 6.0 * n * n;
            CostEstimate {
                tasks,
                evolutions: 0,
                amp_ops: tasks as f64 * per_task,
                seconds: tasks as f64 * per_task / rate,
                lines: vec![format!(
                    "{} W values x {} realizations = {tasks} diagonalizations at N = {}",
                    c.w.values().len(),
                    c.realizations.count(),
                    c.chain.n_sites
                )],
            }
        }
        RunConfig::Ldos(c) => CostEstimate {
            tasks: 1,
            evolutions: 0,
            amp_ops: c.grid_points as f64 * c.chain.n_sites as f64 * 8.0,
            seconds: c.grid_points as f64 * c.chain.n_sites as f64 * 8.0 / rate,
            lines: vec![format!(
                "decimation over {} energies on {} sites",
                c.grid_points, c.chain.n_sites
            )],
        },
        RunConfig::Zoge(c) => {
            let n_phi = c.n_phi.unwrap_or_else(|| crate::zoge::default_n_phi(c.chain.n_sites));
            let seeds = if c.exact_state { 1 } else { c.seeds };
            let tasks = c.realizations.count() * seeds;
            let echoes = c.times.count * n_phi;
            let evolutions = tasks * echoes * 2;
            let mean_t = c.times.values().iter().sum::<f64>() / c.times.count as f64;
            let per_evolution = evolution_amp_ops(c.chain.n_sites, mean_t, &c.evolution, c.exact_state);
            CostEstimate {
                tasks,
                evolutions,
                amp_ops: evolutions as f64 * per_evolution,
                seconds: evolutions as f64 * per_evolution / rate,
                lines: vec![format!(
                    "{} times x {n_phi} kick angles x {} realizations x {seeds} seeds x 2 branches = {evolutions} evolutions",
                    c.times.count,
                    c.realizations.count()
                )],
            }
        }
        RunConfig::S2Dynamics(c) => {
            let seeds = if c.exact_state { 1 } else { c.seeds };
            let tasks = c.realizations.count() * seeds;
            let evolutions = tasks * c.times.count;
            let t_max = c.times.max;
            let per_traj = evolution_amp_ops(c.chain.n_sites, t_max, &c.evolution, c.exact_state);
            CostEstimate {
                tasks,
                evolutions,
                amp_ops: tasks as f64 * per_traj,
                seconds: tasks as f64 * per_traj / rate,
                lines: vec![format!(
                    "{} realizations x {seeds} seeds, forward to t = {t_max}",
                    c.realizations.count()
                )],
            }
        }
        RunConfig::PhaseDiagram(c) => {
            let cells = c.w.values().len() * c.u.values().len();
            let tasks = cells * c.realizations.count();
            let evolutions = tasks * c.seeds;
            let per_traj = evolution_amp_ops(c.chain.n_sites, c.t_max, &c.evolution, false);
            CostEstimate {
                tasks,
                evolutions,
                amp_ops: evolutions as f64 * per_traj,
                seconds: evolutions as f64 * per_traj / rate,
                lines: vec![format!(
                    "{} x {} grid x {} realizations x {} seeds = {evolutions} trajectories",
                    c.w.values().len(),
                    c.u.values().len(),
                    c.realizations.count(),
                    c.seeds
                )],
            }
        }
        RunConfig::FitCritical(_) | RunConfig::FitAlpha(_) => CostEstimate {
            tasks: 1,
            evolutions: 0,
            amp_ops: 1e6,
            seconds: 0.01,
            lines: vec!["fit-only task".into()],
        },
    };
    Ok(est)
}

/// Amplitude updates for one trajectory to time t.
fn evolution_amp_ops(n_sites: usize, t: f64, evo: &EvolutionConfig, sector_exact: bool) -> f64 {
    match evo.method {
        MethodChoice::Trotter => {
            let steps = (t / evo.dt).ceil().max(1.0);
            let gates = 1.5 * n_sites as f64;
            steps * gates * (1u64 << n_sites) as f64
        }
        MethodChoice::Exact => {
            // Chebyshev: ~ (half-width * t + margin) matvecs over the
            // sector dimension
            let dim: f64 = if sector_exact {
                n_sites as f64
            } else {
                crate::manybody::SectorBasis::new(n_sites, ((n_sites + 1) / 2) as u32).dim() as f64
            };
            let half_width = 1.0 + n_sites as f64 / 3.0;
            (half_width * t + 60.0) * dim * n_sites as f64
        }
    }
}

/// Measured amplitude-update throughput, cached after the first call.
fn calibrated_amp_rate() -> f64 {
    use std::sync::OnceLock;
    static RATE: OnceLock<f64> = OnceLock::new();
    *RATE.get_or_init(|| {
        use crate::manybody::{evolve, Direction, ManyBodyState, TrotterPlan};
        let spec = crate::model::ChainSpec::new(12, 1.0, 0.8, 0.3).expect("valid spec");
        let mut state = ManyBodyState::basis_state(12, 0b10101);
        let plan = TrotterPlan::new(0.02).expect("valid plan");
        let clock = Instant::now();
        let t = 4.0;
        evolve(&mut state, &spec, t, &plan, Direction::Forward).expect("benchmark evolve");
        let steps = (t / 0.02_f64).ceil();
        let ops = steps * 1.5 * 12.0 * 4096.0;
        (ops / clock.elapsed().as_secs_f64()).max(1e6)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_s2_config() -> RunConfig {
        RunConfig::S2Dynamics(S2DynamicsConfig {
            chain: ChainConfig {
                n_sites: 7,
                j: 1.0,
                u: 0.0,
                q: crate::model::GOLDEN_RATIO,
                seed: 11,
            },
            w: 0.9,
            u: 0.1,
            realizations: Realizations::Sampled { count: 2 },
            seeds: 2,
            excite: ExcitationSite::Middle,
            ups: None,
            times: TimeGrid {
                count: 6,
                min: 0.5,
                max: 20.0,
                log: true,
            },
            evolution: EvolutionConfig::default(),
            exact_state: false,
        })
    }

    #[test]
    fn identical_configs_reproduce_identical_bytes() {
        let cfg = tiny_s2_config();
        let root = std::env::temp_dir().join("zoge_runner_test");
        std::fs::remove_dir_all(&root).ok();
        let first = run(&cfg, Some(&root), Some(1)).unwrap();
        assert_eq!(first.exit_code(), 0);
        let bytes_a: Vec<Vec<u8>> = first
            .files
            .iter()
            .map(|p| std::fs::read(p).unwrap())
            .collect();
        // wipe only the final outputs; task files stay for the resume path
        for p in &first.files {
            std::fs::remove_file(p).unwrap();
        }
        let second = run(&cfg, Some(&root), Some(2)).unwrap();
        let bytes_b: Vec<Vec<u8>> = second
            .files
            .iter()
            .map(|p| std::fs::read(p).unwrap())
            .collect();
        assert_eq!(bytes_a, bytes_b);
        std::fs::remove_dir_all(&root).ok();
    }

    #[test]
    fn estimate_reports_the_decomposition() {
        let cfg = RunConfig::Zoge(ZogeConfig {
            chain: ChainConfig {
                n_sites: 13,
                j: 1.0,
                u: 0.0,
                q: crate::model::GOLDEN_RATIO,
                seed: 0,
            },
            w: 0.9,
            u: 0.0,
            realizations: Realizations::Sampled { count: 1 },
            seeds: 4,
            excite: ExcitationSite::Middle,
            ups: None,
            times: TimeGrid {
                count: 24,
                min: 0.5,
                max: 500.0,
                log: true,
            },
            n_phi: Some(53),
            evolution: EvolutionConfig::default(),
            exact_state: false,
        });
        let est = estimate_cost(&cfg).unwrap();
        assert_eq!(est.evolutions, 24 * 53 * 4 * 2);
        assert!(est.seconds > 0.0);
    }

    #[test]
    fn invalid_config_fails_validation_with_field_name() {
        let mut cfg = tiny_s2_config();
        if let RunConfig::S2Dynamics(c) = &mut cfg {
            c.seeds = 0;
        }
        let err = run(&cfg, Some(Path::new("/tmp")), None).unwrap_err();
        assert!(err.to_string().contains("seeds"));
    }
}
