//! Chain specification and the incommensurate on-site potential.
//!
//! The chain is N spins 1/2 with flip-flop coupling J, an on-site field
//! eps_n = -W cos(2 pi q n + phi) with q irrational (golden ratio by
//! default), and an optional Ising coupling U. Energies are in units of J
//! and times in units of 1/J throughout; the lattice constant is fixed to 1.
//! Different values of the phase phi play the role of disorder realizations.

use crate::error::{Error, Result};
use crate::rng::SeedPlan;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// The golden ratio (1+sqrt(5))/2, the default incommensuration.
pub const GOLDEN_RATIO: f64 = 1.618_033_988_749_894_8;

/// Physical parameters of one disorder realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    /// Site count, sites indexed 0..n_sites-1.
    pub n_sites: usize,
    /// Flip-flop coupling; sets the unit of energy and inverse time.
    pub j: f64,
    /// Strength of the incommensurate potential.
    pub w: f64,
    /// Ising coupling.
    pub u: f64,
    /// Incommensuration ratio.
    pub q: f64,
    /// Potential phase, normalized into [0, 2 pi).
    pub phi: f64,
}

impl ChainSpec {
    /// A chain with the golden-ratio potential and phase 0.
    pub fn new(n_sites: usize, j: f64, w: f64, u: f64) -> Result<Self> {
        let spec = Self {
            n_sites,
            j,
            w,
            u,
            q: GOLDEN_RATIO,
            phi: 0.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_phase(mut self, phi: f64) -> Self {
        self.phi = normalize_phase(phi);
        self
    }

    /// Override q, e.g. with a commensurate Fibonacci approximant.
    pub fn with_q(mut self, q: f64) -> Self {
        self.q = q;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::invalid("n_sites must be at least 2"));
        }
        if !(self.j > 0.0) {
            return Err(Error::invalid("j must be positive"));
        }
        if self.w < 0.0 || self.u < 0.0 {
            return Err(Error::invalid("w and u must be non-negative"));
        }
        if !(0.0..TAU).contains(&self.phi) {
            return Err(Error::invalid("phi must lie in [0, 2 pi)"));
        }
        Ok(())
    }

    /// On-site energy -W cos(2 pi q n + phi).
    pub fn onsite_potential(&self, n: usize) -> Result<f64> {
        if n >= self.n_sites {
            return Err(Error::SiteOutOfRange {
                index: n,
                n_sites: self.n_sites,
            });
        }
        Ok(-self.w * (TAU * self.q * n as f64 + self.phi).cos())
    }

    /// Index of the central site, the standard excitation point.
    pub fn middle_site(&self) -> usize {
        self.n_sites / 2
    }
}

/// Ratio of consecutive Fibonacci numbers F_{k+1}/F_k, the commensurate
/// approximants to the golden ratio.
pub fn fibonacci_ratio(k: u32) -> f64 {
    let mut a = 1u64;
    let mut b = 1u64;
    for _ in 0..k {
        let next = a + b;
        a = b;
        b = next;
    }
    b as f64 / a as f64
}

fn normalize_phase(phi: f64) -> f64 {
    let mut p = phi.rem_euclid(TAU);
    // rem_euclid can return TAU itself when phi is a tiny negative number
    if p >= TAU {
        p -= TAU;
    }
    p
}

/// The table of on-site energies for one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteFieldTable {
    pub eps: Vec<f64>,
}

impl SiteFieldTable {
    pub fn new(spec: &ChainSpec) -> Self {
        let eps = (0..spec.n_sites)
            .map(|n| spec.onsite_potential(n).expect("index in range"))
            .collect();
        Self { eps }
    }
}

/// A set of disorder realizations: one phase per realization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RealizationSet {
    pub base: ChainSpec,
    pub phases: Vec<f64>,
    pub seed: u64,
}

impl RealizationSet {
    /// Draws `count` phases uniformly from [0, 2 pi) with a seeded generator.
    pub fn sample(spec: ChainSpec, count: usize, seed: u64) -> Result<Self> {
        if count == 0 {
            return Err(Error::invalid("realization count must be at least 1"));
        }
        spec.validate()?;
        let mut rng = SeedPlan::new(seed).realization_rng();
        let phases: Vec<f64> = (0..count).map(|_| rng.gen::<f64>() * TAU).collect();
        let set = Self {
            base: spec,
            phases,
            seed,
        };
        set.check_distinct()?;
        Ok(set)
    }

    /// Uses an explicit phase list, e.g. {0, 7 pi/20}.
    pub fn explicit(spec: ChainSpec, phases: &[f64]) -> Result<Self> {
        if phases.is_empty() {
            return Err(Error::invalid("realization count must be at least 1"));
        }
        spec.validate()?;
        let set = Self {
            base: spec,
            phases: phases.iter().map(|&p| normalize_phase(p)).collect(),
            seed: 0,
        };
        set.check_distinct()?;
        Ok(set)
    }

    fn check_distinct(&self) -> Result<()> {
        let mut sorted = self.phases.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("realization phases must be distinct"));
        }
        Ok(())
    }

    /// Chain spec of realization `i`.
    pub fn spec(&self, i: usize) -> ChainSpec {
        self.base.with_phase(self.phases[i])
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }
}
