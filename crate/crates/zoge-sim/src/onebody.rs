//! Exact single-excitation solver for the non-interacting chain.
//!
//! In the one-excitation subspace the flip-flop chain reduces to a real
//! symmetric tridiagonal Hamiltonian with hopping -J/2 and the on-site
//! energies on the diagonal. At this hopping the self-dual point of the
//! incommensurate potential sits at W = J: eigenstates are extended for
//! W < J and localized for W > J. Everything here is solved by full
//! diagonalization; chains up to ~1000 sites are cheap.

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::ChainSpec;
use num_complex::Complex64;

/// Tridiagonal one-excitation Hamiltonian.
#[derive(Debug, Clone)]
pub struct OneBodyHamiltonian {
    /// On-site energies eps[n].
    pub diag: Vec<f64>,
    /// Hopping amplitudes, all equal to -J/2. Open boundary conditions.
    pub offdiag: Vec<f64>,
}

/// Full eigensystem of a one-excitation Hamiltonian.
#[derive(Debug, Clone)]
pub struct OneBodySolution {
    pub n_sites: usize,
    /// Eigenvalues, ascending.
    pub energies: Vec<f64>,
    /// Row-major eigenvectors: `vectors[k * n_sites + n]` = a_k(n).
    vectors: Vec<f64>,
}

/// Amplitudes c_{n|n0}(t) of an excitation injected at `source`.
#[derive(Debug, Clone)]
pub struct AmplitudeProfile {
    pub t: f64,
    pub source: usize,
    pub c: Vec<Complex64>,
}

pub fn build_onebody_hamiltonian(spec: &ChainSpec) -> Result<OneBodyHamiltonian> {
    spec.validate()?;
    if spec.u != 0.0 {
        eprintln!(
            "warning: one-body solver ignores the Ising coupling (u = {})",
            spec.u
        );
    }
    let diag: Vec<f64> = (0..spec.n_sites)
        .map(|n| spec.onsite_potential(n).expect("index in range"))
        .collect();
    let offdiag = vec![-spec.j / 2.0; spec.n_sites - 1];
    Ok(OneBodyHamiltonian { diag, offdiag })
}

pub fn diagonalize(h: &OneBodyHamiltonian) -> Result<OneBodySolution> {
    let eig = linalg::tridiag_eigen(&h.diag, &h.offdiag)?;
    let n = eig.dim;
    Ok(OneBodySolution {
        n_sites: n,
        vectors: eig.vectors_by_row(),
        energies: eig.values,
    })
}

impl OneBodySolution {
    /// Component a_k(n) of eigenvector k.
    #[inline]
    pub fn amplitude(&self, k: usize, n: usize) -> f64 {
        self.vectors[k * self.n_sites + n]
    }

    /// Eigenvector k as a slice over sites.
    #[inline]
    pub fn eigenvector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.n_sites..(k + 1) * self.n_sites]
    }
}

/// c_n(t) = sum_k exp(-i eps_k t) a_k(n) a_k(n0).
pub fn propagate_amplitudes(sol: &OneBodySolution, n0: usize, t: f64) -> Result<AmplitudeProfile> {
    let n = sol.n_sites;
    if n0 >= n {
        return Err(Error::SiteOutOfRange {
            index: n0,
            n_sites: n,
        });
    }
    if t < 0.0 {
        return Err(Error::invalid("propagation time must be non-negative"));
    }
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n {
        let weight = sol.amplitude(k, n0);
        if weight == 0.0 {
            continue;
        }
        let phase = Complex64::from_polar(weight, -sol.energies[k] * t);
        let row = sol.eigenvector(k);
        for (cn, &a) in c.iter_mut().zip(row.iter()) {
            *cn += phase * a;
        }
    }
    Ok(AmplitudeProfile { t, source: n0, c })
}

/// Dynamical inverse participation ratio sum_n |c_n|^4.
pub fn ipr_t(profile: &AmplitudeProfile) -> f64 {
    profile.c.iter().map(|c| c.norm_sqr().powi(2)).sum()
}

/// Per-eigenstate participation: IPR_k = sum_n a_k(n)^4.
pub fn ipr_eigenstates(sol: &OneBodySolution) -> Vec<f64> {
    (0..sol.n_sites)
        .map(|k| sol.eigenvector(k).iter().map(|a| a.powi(4)).sum())
        .collect()
}

/// Per-site participation over eigenstates: IPR_n = sum_k a_k(n)^4.
pub fn ipr_sites(sol: &OneBodySolution) -> Vec<f64> {
    let mut out = vec![0.0; sol.n_sites];
    for k in 0..sol.n_sites {
        for (o, &a) in out.iter_mut().zip(sol.eigenvector(k)) {
            *o += a.powi(4);
        }
    }
    out
}

/// Probability distribution |c_n|^2 of a profile.
pub fn probability_profile(profile: &AmplitudeProfile) -> Vec<f64> {
    profile.c.iter().map(|c| c.norm_sqr()).collect()
}

/// Time-averaged IPR over the equilibrium window.
///
/// Samples `ipr_t` at `samples` times uniformly spaced in [T/2, T] with
/// T = 10 N / J, several traversal times past the transient.
pub fn ipr_time_average(sol: &OneBodySolution, n0: usize, j: f64, samples: usize) -> Result<f64> {
    let n = sol.n_sites;
    let horizon = 10.0 * n as f64 / j;
    let mut acc = 0.0;
    for s in 0..samples {
        let t = horizon / 2.0 + horizon / 2.0 * (s as f64 + 0.5) / samples as f64;
        acc += ipr_t(&propagate_amplitudes(sol, n0, t)?);
    }
    Ok(acc / samples as f64)
}

/// The IPR series sampled on an arbitrary time grid.
pub fn ipr_series(sol: &OneBodySolution, n0: usize, times: &[f64]) -> Result<Vec<f64>> {
    times
        .iter()
        .map(|&t| propagate_amplitudes(sol, n0, t).map(|p| ipr_t(&p)))
        .collect()
}

/// Local density of states at one site by recursive decimation.
///
/// Neighbors are eliminated one at a time into left/right self-energies
/// Sigma <- v^2 / (z - eps_m - Sigma) with v = -J/2, and the LDOS is
/// -Im G_{ss}(eps + i eta) / pi.
pub fn ldos_decimation(
    spec: &ChainSpec,
    site: usize,
    energies: &[f64],
    eta: f64,
) -> Result<Vec<f64>> {
    spec.validate()?;
    if eta <= 0.0 {
        return Err(Error::invalid("broadening eta must be positive"));
    }
    if site >= spec.n_sites {
        return Err(Error::SiteOutOfRange {
            index: site,
            n_sites: spec.n_sites,
        });
    }
    let eps: Vec<f64> = (0..spec.n_sites)
        .map(|n| spec.onsite_potential(n).expect("index in range"))
        .collect();
    let v2 = Complex64::new(spec.j * spec.j / 4.0, 0.0);
    let ldos = energies
        .iter()
        .map(|&e| {
            let z = Complex64::new(e, eta);
            let mut sigma_left = Complex64::new(0.0, 0.0);
            for m in 0..site {
                sigma_left = v2 / (z - eps[m] - sigma_left);
            }
            let mut sigma_right = Complex64::new(0.0, 0.0);
            for m in ((site + 1)..spec.n_sites).rev() {
                sigma_right = v2 / (z - eps[m] - sigma_right);
            }
            let g = Complex64::new(1.0, 0.0) / (z - eps[site] - sigma_left - sigma_right);
            -g.im / std::f64::consts::PI
        })
        .collect();
    Ok(ldos)
}

/// Default LDOS grid: 2001 points spanning the band plus 5 broadenings.
pub fn ldos_default_grid(spec: &ChainSpec) -> (Vec<f64>, f64) {
    let n_grid = 2001usize;
    let bandwidth = 2.0 * (spec.j + spec.w);
    let eta = 4.0 * bandwidth / n_grid as f64;
    let lo = -spec.j - spec.w - 5.0 * eta;
    let hi = spec.j + spec.w + 5.0 * eta;
    let grid = (0..n_grid)
        .map(|i| lo + (hi - lo) * i as f64 / (n_grid - 1) as f64)
        .collect();
    (grid, eta)
}

/// One localized eigenstate in an edge report.
#[derive(Debug, Clone, Copy)]
pub struct EdgeStateRecord {
    pub k: usize,
    pub energy: f64,
    pub ipr_k: f64,
    /// Probability-weighted center sum_n n a_k(n)^2.
    pub center: f64,
    /// Center within n_sites/10 of either end.
    pub edge: bool,
}

/// Eigenstates whose IPR_k exceeds `threshold`, annotated with their weight
/// centers and an edge flag.
pub fn edge_state_report(sol: &OneBodySolution, threshold: f64) -> Result<Vec<EdgeStateRecord>> {
    let iprs = ipr_eigenstates(sol);
    let median = median_of(&iprs);
    if threshold <= median {
        return Err(Error::invalid(format!(
            "threshold {threshold} must exceed the median IPR_k {median}"
        )));
    }
    let n = sol.n_sites as f64;
    let margin = n / 10.0;
    let mut report = Vec::new();
    for (k, &ipr) in iprs.iter().enumerate() {
        if ipr <= threshold {
            continue;
        }
        let center: f64 = sol
            .eigenvector(k)
            .iter()
            .enumerate()
            .map(|(i, &a)| i as f64 * a * a)
            .sum();
        let edge = center <= margin || center >= (n - 1.0) - margin;
        report.push(EdgeStateRecord {
            k,
            energy: sol.energies[k],
            ipr_k: ipr,
            center,
            edge,
        });
    }
    Ok(report)
}

/// Default edge threshold: five times the median IPR_k.
pub fn default_edge_threshold(sol: &OneBodySolution) -> f64 {
    5.0 * median_of(&ipr_eigenstates(sol))
}

fn median_of(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
