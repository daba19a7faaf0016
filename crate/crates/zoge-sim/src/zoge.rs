//! The gradient-echo protocol and its Fourier analysis.
//!
//! One echo evaluation runs two branches from the pre-excitation state
//! psi_eq: v = Phi_phi(t) S+ psi_eq and w = S+ Phi_phi(t) psi_eq, where
//! Phi_phi(t) = exp(+iHt) kick(phi) exp(-iHt) conjugates a field-gradient
//! kick by the chain dynamics. The reported echo is the detected
//! polarization M(t, phi) = |<w|v>|^2 / norm^2, which equals 1 at phi = 0
//! by construction. Its discrete Fourier transform over a uniform kick-angle
//! grid gives the gradient entanglement amplitudes Q_n; the central
//! coefficient Q_0 is the zeroth-order gradient entanglement and reduces to
//! the dynamical inverse participation ratio sum_n |c_n(t)|^4 when the
//! Ising coupling vanishes.
//!
//! Forward-only observables come from [`polarization_trace`]: the
//! normalized local polarization p_n(t), its square sum S^2(t), and the
//! survival probability P00(t) at the excitation site.

use crate::error::{Error, Result};
use crate::manybody::{
    apply_gradient_kick, apply_two_sz, local_magnetization, lower_at, raise_at, Direction,
    Evolver, ManyBodyState,
};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Echo samples over the kick-angle grid and their Fourier spectrum.
#[derive(Debug, Clone)]
pub struct ZogeRecord {
    pub t: f64,
    /// Kick angles phi_j = 2 pi j / n_phi, j = 0..n_phi-1; n_phi odd.
    pub phases: Vec<f64>,
    /// Echo values M(t, phi_j).
    pub echo: Vec<Complex64>,
    /// Q_n for integer n in [-(n_phi-1)/2, (n_phi-1)/2], stored ascending.
    pub q: Vec<f64>,
    /// Worst imaginary part seen in the echo samples or the spectrum.
    pub imag_residual: f64,
}

impl ZogeRecord {
    pub fn n_phi(&self) -> usize {
        self.phases.len()
    }

    /// Largest spectral index K; q covers n = -K..=K.
    pub fn k_max(&self) -> i64 {
        (self.n_phi() as i64 - 1) / 2
    }

    /// Q_n by signed index.
    pub fn q_at(&self, n: i64) -> f64 {
        self.q[(n + self.k_max()) as usize]
    }

    /// The zeroth-order gradient entanglement Q_0.
    pub fn zoge(&self) -> f64 {
        self.q_at(0)
    }

    /// Sum rule value sum_n Q_n; equals M(t, 0) exactly by DFT inversion.
    pub fn sum(&self) -> f64 {
        self.q.iter().sum()
    }

    /// |Q| mass on the two outermost indices; large values mean the grid
    /// aliases spectral weight beyond K.
    pub fn aliasing_mass(&self) -> f64 {
        self.q[0].abs() + self.q[self.q.len() - 1].abs()
    }

    /// Indices whose Q_n dips below -tol. The values are reported raw, not
    /// clipped.
    pub fn negative_entries(&self, tol: f64) -> Vec<(i64, f64)> {
        let k = self.k_max();
        self.q
            .iter()
            .enumerate()
            .filter(|(_, &v)| v < -tol)
            .map(|(i, &v)| (i as i64 - k, v))
            .collect()
    }
}

/// Next odd integer >= 4 N + 1, the default kick-angle count.
pub fn default_n_phi(n_sites: usize) -> usize {
    let base = 4 * n_sites + 1;
    if base % 2 == 1 {
        base
    } else {
        base + 1
    }
}

/// One echo value M(t, phi) = |<w|v>|^2 / norm^2.
pub fn loschmidt_echo(
    evolver: &mut Evolver,
    psi_eq: &ManyBodyState,
    excitation_site: usize,
    t: f64,
    phi_g: f64,
) -> Result<Complex64> {
    let amp = echo_amplitude(evolver, psi_eq, excitation_site, t, phi_g)?;
    Ok(Complex64::new(amp.norm_sqr(), 0.0))
}

/// The complex two-branch overlap <w|v> / <psi_eq|S- S+|psi_eq>.
pub fn echo_amplitude(
    evolver: &mut Evolver,
    psi_eq: &ManyBodyState,
    excitation_site: usize,
    t: f64,
    phi_g: f64,
) -> Result<Complex64> {
    let excited = checked_excitation(psi_eq, excitation_site)?;
    let mut v = excited;
    evolver.advance(&mut v, t, Direction::Forward)?;
    apply_gradient_kick(&mut v, phi_g);
    evolver.advance(&mut v, t, Direction::Backward)?;

    let mut w_pre = psi_eq.clone();
    evolver.advance(&mut w_pre, t, Direction::Forward)?;
    apply_gradient_kick(&mut w_pre, phi_g);
    evolver.advance(&mut w_pre, t, Direction::Backward)?;
    let w = raise_at(&w_pre, excitation_site)?;

    Ok(w.inner(&v))
}

/// Echo values on the full kick-angle grid at one time, sharing the two
/// forward evolutions across all angles.
pub fn echo_phase_scan(
    evolver: &mut Evolver,
    psi_eq: &ManyBodyState,
    excitation_site: usize,
    t: f64,
    n_phi: usize,
) -> Result<Vec<Complex64>> {
    if n_phi % 2 == 0 || n_phi == 0 {
        return Err(Error::invalid("kick-angle count must be odd"));
    }
    let excited = checked_excitation(psi_eq, excitation_site)?;

    let mut v_fwd = excited;
    evolver.advance(&mut v_fwd, t, Direction::Forward)?;
    let mut w_fwd = psi_eq.clone();
    evolver.advance(&mut w_fwd, t, Direction::Forward)?;

    let mut out = Vec::with_capacity(n_phi);
    for j in 0..n_phi {
        let phi = TAU * j as f64 / n_phi as f64;
        let mut v = v_fwd.clone();
        apply_gradient_kick(&mut v, phi);
        evolver.advance(&mut v, t, Direction::Backward)?;
        let mut w_pre = w_fwd.clone();
        apply_gradient_kick(&mut w_pre, phi);
        evolver.advance(&mut w_pre, t, Direction::Backward)?;
        let w = raise_at(&w_pre, excitation_site)?;
        let amp = w.inner(&v);
        out.push(Complex64::new(amp.norm_sqr(), 0.0));
    }
    Ok(out)
}

/// Echo values on the kick-angle grid from the z-z correlator form:
/// M(t, phi) = <psi| Phi^+ (2 S^z) Phi (2 S^z) |psi> for a fully random
/// thermal state |psi>. The exact trace is real with M(t, 0) = 1; the
/// imaginary part of the estimate is pure sampling noise. This is the
/// production estimator for interacting chains, where it stays tied to the
/// polarization observables; on one-excitation sector states the ladder
/// form of [`echo_phase_scan`] is the same physical echo evaluated without
/// sampling noise.
pub fn echo_phase_scan_zz(
    evolver: &mut Evolver,
    psi: &ManyBodyState,
    site: usize,
    t: f64,
    n_phi: usize,
) -> Result<Vec<Complex64>> {
    if n_phi % 2 == 0 || n_phi == 0 {
        return Err(Error::invalid("kick-angle count must be odd"));
    }
    let norm = psi.norm_sqr();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::invalid("thermal state must be normalized"));
    }
    let mut v_fwd = psi.clone();
    apply_two_sz(&mut v_fwd, site)?;
    evolver.advance(&mut v_fwd, t, Direction::Forward)?;
    let mut w_fwd = psi.clone();
    evolver.advance(&mut w_fwd, t, Direction::Forward)?;

    let mut out = Vec::with_capacity(n_phi);
    for j in 0..n_phi {
        let phi = TAU * j as f64 / n_phi as f64;
        let mut v = v_fwd.clone();
        apply_gradient_kick(&mut v, phi);
        evolver.advance(&mut v, t, Direction::Backward)?;
        let mut w = w_fwd.clone();
        apply_gradient_kick(&mut w, phi);
        evolver.advance(&mut w, t, Direction::Backward)?;
        apply_two_sz(&mut w, site)?;
        out.push(w.inner(&v));
    }
    Ok(out)
}

fn checked_excitation(psi_eq: &ManyBodyState, site: usize) -> Result<ManyBodyState> {
    let excited = raise_at(psi_eq, site)?;
    let norm = excited.norm_sqr();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!(
            "psi_eq has weight {:.3e} on site-{site}-up components; the \
             excitation would annihilate part of the state",
            1.0 - norm
        )));
    }
    Ok(excited)
}

/// Discrete Fourier transform of echo samples on the uniform angle grid:
/// Q_n = (1/n_phi) sum_j M_j exp(-i n phi_j).
pub fn zoge_spectrum(echo: &[Complex64], t: f64) -> Result<ZogeRecord> {
    let n_phi = echo.len();
    if n_phi == 0 || n_phi % 2 == 0 {
        return Err(Error::invalid("echo grid must have an odd number of samples"));
    }
    let k = (n_phi as i64 - 1) / 2;
    let mut q = Vec::with_capacity(n_phi);
    let mut imag_residual = echo.iter().map(|m| m.im.abs()).fold(0.0, f64::max);
    for n in -k..=k {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, m) in echo.iter().enumerate() {
            let phi = TAU * j as f64 / n_phi as f64;
            acc += m * Complex64::from_polar(1.0, -(n as f64) * phi);
        }
        acc /= n_phi as f64;
        imag_residual = imag_residual.max(acc.im.abs());
        q.push(acc.re);
    }
    Ok(ZogeRecord {
        t,
        phases: (0..n_phi).map(|j| TAU * j as f64 / n_phi as f64).collect(),
        echo: echo.to_vec(),
        q,
        imag_residual,
    })
}

/// Runs the full echo protocol at one time and Fourier-transforms it.
pub fn zoge_record(
    evolver: &mut Evolver,
    psi_eq: &ManyBodyState,
    excitation_site: usize,
    t: f64,
    n_phi: usize,
) -> Result<ZogeRecord> {
    let echo = echo_phase_scan(evolver, psi_eq, excitation_site, t, n_phi)?;
    zoge_spectrum(&echo, t)
}

/// Second moment sum_n n^2 Q_n of the spectrum.
pub fn spectrum_variance(record: &ZogeRecord) -> f64 {
    let k = record.k_max();
    record
        .q
        .iter()
        .zip(-k..=k)
        .map(|(&qn, n)| qn * (n * n) as f64)
        .sum()
}

/// Normalized polarization snapshot of one state.
#[derive(Debug, Clone)]
pub struct PolarizationProfile {
    pub t: f64,
    /// p_n(t), normalized so sum_n p_n = 1 and p(excitation, 0) = 1.
    pub p: Vec<f64>,
    /// S^2(t) = sum_n p_n^2.
    pub s2: f64,
    /// Survival probability: p at the excitation site.
    pub p00: f64,
}

/// Normalized local polarization of a sector state.
///
/// p_n = (<S_n^z> - bg) / (1/2 - bg) with bg the background magnetization
/// of the sector, bg = (2 ups - 1 - N) / (2 (N - 1)). In the M = 1/2
/// sector this is exactly 2 <S_n^z>; the total is 1 in every sector.
pub fn polarization_profile(
    state: &ManyBodyState,
    excitation_site: usize,
    t: f64,
) -> Result<PolarizationProfile> {
    let n = state.n_sites;
    if n < 2 {
        return Err(Error::invalid("polarization profile needs at least 2 sites"));
    }
    if excitation_site >= n {
        return Err(Error::SiteOutOfRange {
            index: excitation_site,
            n_sites: n,
        });
    }
    // background magnetization of the unexcited ensemble: sector states
    // carry (ups - 1) up spins over N - 1 sites; the full-space thermal
    // ensemble is unpolarized
    let bg = match state.sector {
        Some(ups) => (2.0 * ups as f64 - 1.0 - n as f64) / (2.0 * (n as f64 - 1.0)),
        None => 0.0,
    };
    let scale = 0.5 - bg;
    let mag = local_magnetization(state);
    let p: Vec<f64> = mag.iter().map(|&m| (m - bg) / scale).collect();
    let s2 = p.iter().map(|x| x * x).sum();
    let p00 = p[excitation_site];
    Ok(PolarizationProfile { t, p, s2, p00 })
}

/// Forward-only evolution with measurement snapshots at each grid time.
pub fn polarization_trace(
    evolver: &mut Evolver,
    psi0: &ManyBodyState,
    excitation_site: usize,
    times: &[f64],
) -> Result<Vec<PolarizationProfile>> {
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::invalid("times must be ascending and non-negative"));
    }
    let mut state = psi0.clone();
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        evolver.advance(&mut state, t - now, Direction::Forward)?;
        now = t;
        out.push(polarization_profile(&state, excitation_site, t)?);
    }
    Ok(out)
}

/// Forward traces for several initial states (e.g. random-state seeds of
/// one realization), with the site profiles averaged *before* squaring.
///
/// S^2 is defined through the ensemble expectation of each local
/// magnetization; squaring a single random-state estimate biases it upward
/// by the shot-noise variance, so the ensemble average belongs inside the
/// square.
pub fn ensemble_polarization_trace(
    evolver: &mut Evolver,
    states: &[ManyBodyState],
    excitation_site: usize,
    times: &[f64],
) -> Result<Vec<PolarizationProfile>> {
    if states.is_empty() {
        return Err(Error::invalid("need at least one state"));
    }
    let n = states[0].n_sites;
    let mut mean_p = vec![vec![0.0f64; n]; times.len()];
    for psi0 in states {
        let trace = polarization_trace(evolver, psi0, excitation_site, times)?;
        for (acc, snap) in mean_p.iter_mut().zip(trace.iter()) {
            for (a, &v) in acc.iter_mut().zip(snap.p.iter()) {
                *a += v;
            }
        }
    }
    let count = states.len() as f64;
    Ok(times
        .iter()
        .zip(mean_p.into_iter())
        .map(|(&t, mut p)| {
            for v in p.iter_mut() {
                *v /= count;
            }
            let s2 = p.iter().map(|x| x * x).sum();
            let p00 = p[excitation_site];
            PolarizationProfile { t, p, s2, p00 }
        })
        .collect())
}

/// Spatial mean and variance of a normalized profile.
pub fn spatial_variance(p: &[f64]) -> f64 {
    let mean: f64 = p.iter().enumerate().map(|(n, &x)| n as f64 * x).sum();
    let msq: f64 = p.iter().enumerate().map(|(n, &x)| (n as f64) * (n as f64) * x).sum();
    msq - mean * mean
}

/// The echo's sibling of [`loschmidt_echo`]: detected polarization of the
/// v branch alone, useful as a cross-check (identical to the echo for
/// exact runs).
pub fn echo_survival(
    evolver: &mut Evolver,
    psi_eq: &ManyBodyState,
    excitation_site: usize,
    t: f64,
    phi_g: f64,
) -> Result<f64> {
    let excited = checked_excitation(psi_eq, excitation_site)?;
    let mut v = excited;
    evolver.advance(&mut v, t, Direction::Forward)?;
    apply_gradient_kick(&mut v, phi_g);
    evolver.advance(&mut v, t, Direction::Backward)?;
    // project back onto the excited manifold of psi_eq
    let lowered = lower_at(&v, excitation_site)?;
    Ok(lowered.inner(psi_eq).norm_sqr())
}
