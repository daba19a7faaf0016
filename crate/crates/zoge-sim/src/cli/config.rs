//! Run configuration: experiment parameters, grid syntax, validation.

use crate::error::{Error, Result};
use crate::manybody::TrotterPlan;
use crate::model::{ChainSpec, GOLDEN_RATIO};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// `start:stop:step` inclusive grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 0.5).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let bad = || Error::invalid(format!("grid `{text}` must be start:stop:step"));
        match parts.as_slice() {
            [single] => {
                let v: f64 = single.parse().map_err(|_| bad())?;
                Ok(Grid {
                    start: v,
                    stop: v,
                    step: 1.0,
                })
            }
            [start, stop, step] => {
                let g = Grid {
                    start: start.parse().map_err(|_| bad())?,
                    stop: stop.parse().map_err(|_| bad())?,
                    step: step.parse().map_err(|_| bad())?,
                };
                g.validate("grid")?;
                Ok(g)
            }
            _ => Err(bad()),
        }
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        if !(self.step > 0.0) || self.stop < self.start {
            return Err(Error::config(
                field,
                "requires start <= stop and step > 0".to_string(),
            ));
        }
        Ok(())
    }
}

/// Time grid: `count:min:max` with linear or logarithmic spacing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub log: bool,
}

impl TimeGrid {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        (0..self.count)
            .map(|i| {
                let f = i as f64 / (self.count - 1) as f64;
                if self.log {
                    self.min * (self.max / self.min).powf(f)
                } else {
                    self.min + (self.max - self.min) * f
                }
            })
            .collect()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let bad = || Error::invalid(format!("times `{text}` must be count:min:max[:lin|log]"));
        if parts.len() < 3 || parts.len() > 4 {
            return Err(bad());
        }
        let grid = TimeGrid {
            count: parts[0].parse().map_err(|_| bad())?,
            min: parts[1].parse().map_err(|_| bad())?,
            max: parts[2].parse().map_err(|_| bad())?,
            log: match parts.get(3) {
                None => true,
                Some(&"log") => true,
                Some(&"lin") => false,
                Some(_) => return Err(bad()),
            },
        };
        grid.validate("times")?;
        Ok(grid)
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        if self.count == 0 {
            return Err(Error::config(field, "needs at least one sample"));
        }
        if self.max < self.min || self.min < 0.0 {
            return Err(Error::config(field, "needs 0 <= min <= max"));
        }
        if self.log && self.min <= 0.0 && self.count > 1 {
            return Err(Error::config(field, "log spacing needs min > 0"));
        }
        Ok(())
    }
}

/// Excitation-site choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExcitationSite {
    Middle,
    End,
    #[serde(untagged)]
    Index(usize),
}

impl ExcitationSite {
    pub fn resolve(&self, n_sites: usize) -> Result<usize> {
        let site = match self {
            ExcitationSite::Middle => n_sites / 2,
            ExcitationSite::End => 0,
            ExcitationSite::Index(i) => *i,
        };
        if site >= n_sites {
            return Err(Error::config(
                "excite",
                format!("site {site} out of range for {n_sites} sites"),
            ));
        }
        Ok(site)
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "middle" => Ok(ExcitationSite::Middle),
            "end" => Ok(ExcitationSite::End),
            other => other
                .parse::<usize>()
                .map(ExcitationSite::Index)
                .map_err(|_| Error::config("excite", "must be middle, end, or a site index")),
        }
    }
}

/// Disorder realizations: sampled by count + seed, or an explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Realizations {
    Sampled { count: usize },
    Explicit { phases: Vec<f64> },
}

impl Realizations {
    pub fn count(&self) -> usize {
        match self {
            Realizations::Sampled { count } => *count,
            Realizations::Explicit { phases } => phases.len(),
        }
    }

    pub fn phases(&self, base: ChainSpec, seed: u64) -> Result<crate::model::RealizationSet> {
        match self {
            Realizations::Sampled { count } => {
                crate::model::RealizationSet::sample(base, *count, seed)
            }
            Realizations::Explicit { phases } => {
                crate::model::RealizationSet::explicit(base, phases)
            }
        }
    }
}

/// Propagation method selector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    Exact,
    Trotter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub method: MethodChoice,
    /// Trotter step; ignored for the exact method.
    pub dt: f64,
    /// Accept steps beyond the safety cap.
    #[serde(default)]
    pub allow_large_dt: bool,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            method: MethodChoice::Exact,
            dt: 0.02,
            allow_large_dt: false,
        }
    }
}

impl EvolutionConfig {
    pub fn to_method(&self) -> Result<crate::manybody::Method> {
        Ok(match self.method {
            MethodChoice::Exact => crate::manybody::Method::Exact,
            MethodChoice::Trotter => crate::manybody::Method::Trotter(if self.allow_large_dt {
                TrotterPlan::with_override(self.dt)?
            } else {
                TrotterPlan::new(self.dt)?
            }),
        })
    }
}

/// Chain parameters as they appear in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub n_sites: usize,
    #[serde(default = "one")]
    pub j: f64,
    #[serde(default)]
    pub u: f64,
    #[serde(default = "golden")]
    pub q: f64,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> f64 {
    1.0
}
fn golden() -> f64 {
    GOLDEN_RATIO
}

impl ChainConfig {
    pub fn base_spec(&self, w: f64, u: f64) -> Result<ChainSpec> {
        Ok(ChainSpec::new(self.n_sites, self.j, w, u)?.with_q(self.q))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnebodySweepConfig {
    pub chain: ChainConfig,
    pub w: Grid,
    pub realizations: Realizations,
    pub excite: ExcitationSite,
    /// Samples for the equilibrium time average.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    256
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdosConfig {
    pub chain: ChainConfig,
    pub w: f64,
    pub phi: f64,
    pub site: ExcitationSite,
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    /// IPR threshold for the edge report, as a multiple of the median.
    #[serde(default = "default_edge_factor")]
    pub edge_threshold_factor: f64,
}

fn default_grid_points() -> usize {
    2001
}
fn default_edge_factor() -> f64 {
    5.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZogeConfig {
    pub chain: ChainConfig,
    pub w: f64,
    pub u: f64,
    pub realizations: Realizations,
    #[serde(default = "default_seeds")]
    pub seeds: usize,
    pub excite: ExcitationSite,
    /// None = the sector ups count; defaults to (N+1)/2.
    #[serde(default)]
    pub ups: Option<u32>,
    pub times: TimeGrid,
    #[serde(default)]
    pub n_phi: Option<usize>,
    #[serde(default)]
    pub evolution: EvolutionConfig,
    /// Use the exact all-down equilibrium state (single-excitation sector)
    /// instead of random half-filling states.
    #[serde(default)]
    pub exact_state: bool,
}

fn default_seeds() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct S2DynamicsConfig {
    pub chain: ChainConfig,
    pub w: f64,
    pub u: f64,
    pub realizations: Realizations,
    #[serde(default = "default_seeds")]
    pub seeds: usize,
    pub excite: ExcitationSite,
    #[serde(default)]
    pub ups: Option<u32>,
    pub times: TimeGrid,
    #[serde(default)]
    pub evolution: EvolutionConfig,
    #[serde(default)]
    pub exact_state: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagramConfig {
    pub chain: ChainConfig,
    pub w: Grid,
    pub u: Grid,
    pub realizations: Realizations,
    #[serde(default = "default_seeds")]
    pub seeds: usize,
    pub excite: ExcitationSite,
    #[serde(default)]
    pub ups: Option<u32>,
    /// Horizon for the equilibrium average; the window is its latter half.
    #[serde(default = "default_horizon")]
    pub t_max: f64,
    #[serde(default = "default_eq_samples")]
    pub samples: usize,
    #[serde(default)]
    pub evolution: EvolutionConfig,
}

fn default_horizon() -> f64 {
    500.0
}
fn default_eq_samples() -> usize {
    32
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitCriticalConfig {
    pub input: PathBuf,
    /// Column holding the parameter grid (default `w`).
    #[serde(default = "default_x_column")]
    pub x_column: String,
    /// Column holding the observable (default `q0_mean`).
    #[serde(default = "default_y_column")]
    pub y_column: String,
}

fn default_x_column() -> String {
    "w".into()
}
fn default_y_column() -> String {
    "q0_mean".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitAlphaConfig {
    pub input: PathBuf,
    #[serde(default = "default_window_lo")]
    pub window_lo: f64,
    #[serde(default = "default_window_hi")]
    pub window_hi: f64,
    /// Labels written alongside the fit (for sweep bookkeeping).
    #[serde(default)]
    pub w: f64,
    #[serde(default)]
    pub u: f64,
}

fn default_window_lo() -> f64 {
    10.0
}
fn default_window_hi() -> f64 {
    500.0
}

/// One experiment to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RunConfig {
    OnebodySweep(OnebodySweepConfig),
    Ldos(LdosConfig),
    Zoge(ZogeConfig),
    S2Dynamics(S2DynamicsConfig),
    PhaseDiagram(PhaseDiagramConfig),
    FitCritical(FitCriticalConfig),
    FitAlpha(FitAlphaConfig),
}

impl RunConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            RunConfig::OnebodySweep(_) => "onebody-sweep",
            RunConfig::Ldos(_) => "ldos",
            RunConfig::Zoge(_) => "zoge",
            RunConfig::S2Dynamics(_) => "s2-dynamics",
            RunConfig::PhaseDiagram(_) => "phase-diagram",
            RunConfig::FitCritical(_) => "fit-critical",
            RunConfig::FitAlpha(_) => "fit-alpha",
        }
    }

    /// Content hash of the canonical serialized config.
    pub fn run_id(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        format!("{}-{}", self.kind(), crate::io::content_hash(&bytes))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RunConfig::OnebodySweep(c) => {
                validate_chain(&c.chain)?;
                c.w.validate("w")?;
                if c.w.values().is_empty() {
                    return Err(Error::config("w", "grid expands to no values"));
                }
                non_empty_realizations(&c.realizations)?;
                c.excite.resolve(c.chain.n_sites)?;
                if c.samples < 8 {
                    return Err(Error::config("samples", "need at least 8 samples"));
                }
            }
            RunConfig::Ldos(c) => {
                validate_chain(&c.chain)?;
                c.site.resolve(c.chain.n_sites)?;
                if let Some(eta) = c.eta {
                    if !(eta > 0.0) {
                        return Err(Error::config("eta", "must be positive"));
                    }
                }
                if c.grid_points < 3 {
                    return Err(Error::config("grid_points", "need at least 3"));
                }
            }
            RunConfig::Zoge(c) => {
                validate_chain(&c.chain)?;
                non_empty_realizations(&c.realizations)?;
                c.excite.resolve(c.chain.n_sites)?;
                c.times.validate("times")?;
                validate_sector(c.chain.n_sites, c.ups, c.exact_state)?;
                if let Some(n_phi) = c.n_phi {
                    if n_phi % 2 == 0 {
                        return Err(Error::config("n_phi", "must be odd"));
                    }
                }
                if c.seeds == 0 {
                    return Err(Error::config("seeds", "need at least 1"));
                }
                c.evolution.to_method()?;
            }
            RunConfig::S2Dynamics(c) => {
                validate_chain(&c.chain)?;
                non_empty_realizations(&c.realizations)?;
                c.excite.resolve(c.chain.n_sites)?;
                c.times.validate("times")?;
                validate_sector(c.chain.n_sites, c.ups, c.exact_state)?;
                if c.seeds == 0 {
                    return Err(Error::config("seeds", "need at least 1"));
                }
                c.evolution.to_method()?;
            }
            RunConfig::PhaseDiagram(c) => {
                validate_chain(&c.chain)?;
                c.w.validate("w")?;
                c.u.validate("u")?;
                non_empty_realizations(&c.realizations)?;
                c.excite.resolve(c.chain.n_sites)?;
                validate_sector(c.chain.n_sites, c.ups, false)?;
                if c.seeds == 0 {
                    return Err(Error::config("seeds", "need at least 1"));
                }
                if !(c.t_max > 0.0) {
                    return Err(Error::config("t_max", "must be positive"));
                }
                c.evolution.to_method()?;
            }
            RunConfig::FitCritical(c) => {
                if c.input.as_os_str().is_empty() {
                    return Err(Error::config("input", "path required"));
                }
            }
            RunConfig::FitAlpha(c) => {
                if c.input.as_os_str().is_empty() {
                    return Err(Error::config("input", "path required"));
                }
                if !(c.window_lo > 0.0 && c.window_hi > c.window_lo) {
                    return Err(Error::config("window", "needs 0 < lo < hi"));
                }
            }
        }
        Ok(())
    }
}

fn validate_chain(c: &ChainConfig) -> Result<()> {
    if c.n_sites < 2 {
        return Err(Error::config("n_sites", "need at least 2 sites"));
    }
    if !(c.j > 0.0) {
        return Err(Error::config("j", "must be positive"));
    }
    Ok(())
}

fn non_empty_realizations(r: &Realizations) -> Result<()> {
    if r.count() == 0 {
        return Err(Error::config("realizations", "need at least 1 realization"));
    }
    Ok(())
}

fn validate_sector(n_sites: usize, ups: Option<u32>, exact_state: bool) -> Result<()> {
    let u = ups.unwrap_or_else(|| default_ups(n_sites, exact_state));
    if u == 0 || u as usize > n_sites {
        return Err(Error::config(
            "ups",
            format!("sector {u} impossible on {n_sites} sites"),
        ));
    }
    Ok(())
}

/// The working sector: ups = 1 for exact single-excitation runs, otherwise
/// the most-interacting half-filling sector (N+1)/2.
pub fn default_ups(n_sites: usize, exact_state: bool) -> u32 {
    if exact_state {
        1
    } else {
        ((n_sites + 1) / 2) as u32
    }
}

/// A config file: one or more experiment sections.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunFile {
    #[serde(default)]
    pub out_root: Option<PathBuf>,
    pub experiment: Vec<RunConfig>,
}

pub fn parse_run_file(text: &str) -> Result<RunFile> {
    let file: RunFile =
        toml::from_str(text).map_err(|e| Error::config("config file", e.to_string()))?;
    if file.experiment.is_empty() {
        return Err(Error::config("experiment", "config file defines no experiments"));
    }
    for e in &file.experiment {
        e.validate()?;
    }
    Ok(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parse_and_expand() {
        let g = Grid::parse("0.0:2.0:0.5").unwrap();
        assert_eq!(g.values(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        let single = Grid::parse("1.3").unwrap();
        assert_eq!(single.values(), vec![1.3]);
        assert!(Grid::parse("1:0:0.1").is_err());
        assert!(Grid::parse("a:b:c").is_err());
    }

    #[test]
    fn time_grid_log_spacing() {
        let t = TimeGrid::parse("3:1:100").unwrap();
        let v = t.values();
        assert!((v[0] - 1.0).abs() < 1e-12);
        assert!((v[1] - 10.0).abs() < 1e-10);
        assert!((v[2] - 100.0).abs() < 1e-10);
        let lin = TimeGrid::parse("3:0:10:lin").unwrap();
        assert_eq!(lin.values(), vec![0.0, 5.0, 10.0]);
    }

    #[test]
    fn excitation_site_resolution() {
        assert_eq!(ExcitationSite::Middle.resolve(13).unwrap(), 6);
        assert_eq!(ExcitationSite::End.resolve(13).unwrap(), 0);
        assert_eq!(ExcitationSite::Index(3).resolve(13).unwrap(), 3);
        assert!(ExcitationSite::Index(13).resolve(13).is_err());
        assert_eq!(ExcitationSite::parse("middle").unwrap(), ExcitationSite::Middle);
        assert_eq!(ExcitationSite::parse("7").unwrap(), ExcitationSite::Index(7));
    }

    #[test]
    fn run_id_is_deterministic_and_kind_tagged() {
        let cfg = RunConfig::Ldos(LdosConfig {
            chain: ChainConfig {
                n_sites: 10,
                j: 1.0,
                u: 0.0,
                q: GOLDEN_RATIO,
                seed: 0,
            },
            w: 0.5,
            phi: 0.0,
            site: ExcitationSite::Middle,
            eta: None,
            grid_points: 2001,
            edge_threshold_factor: 5.0,
        });
        assert_eq!(cfg.run_id(), cfg.run_id());
        assert!(cfg.run_id().starts_with("ldos-"));
    }

    #[test]
    fn empty_grid_is_a_config_error_naming_the_field() {
        let cfg = RunConfig::OnebodySweep(OnebodySweepConfig {
            chain: ChainConfig {
                n_sites: 10,
                j: 1.0,
                u: 0.0,
                q: GOLDEN_RATIO,
                seed: 0,
            },
            w: Grid {
                start: 1.0,
                stop: 0.0,
                step: 0.1,
            },
            realizations: Realizations::Sampled { count: 2 },
            excite: ExcitationSite::Middle,
            samples: 64,
        });
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("`w`"), "{err}");
    }

    #[test]
    fn run_file_roundtrip() {
        let text = r#"
[[experiment]]
kind = "s2-dynamics"
w = 1.2
u = 0.08
seeds = 4
excite = "middle"
exact_state = false

[experiment.chain]
n_sites = 13
seed = 7

[experiment.realizations]
count = 5

[experiment.times]
count = 40
min = 0.5
max = 500.0
log = true
"#;
        let file = parse_run_file(text).unwrap();
        assert_eq!(file.experiment.len(), 1);
        match &file.experiment[0] {
            RunConfig::S2Dynamics(c) => {
                assert_eq!(c.chain.n_sites, 13);
                assert_eq!(c.seeds, 4);
                assert_eq!(c.realizations.count(), 5);
            }
            other => panic!("wrong kind {other:?}"),
        }
    }

    #[test]
    fn explicit_phases_in_toml() {
        let text = r#"
[[experiment]]
kind = "onebody-sweep"
excite = "middle"

[experiment.chain]
n_sites = 51

[experiment.w]
start = 0.5
stop = 1.5
step = 0.5

[experiment.realizations]
phases = [0.0, 1.0995574287564276]
"#;
        let file = parse_run_file(text).unwrap();
        match &file.experiment[0] {
            RunConfig::OnebodySweep(c) => assert_eq!(c.realizations.count(), 2),
            other => panic!("wrong kind {other:?}"),
        }
    }
}
