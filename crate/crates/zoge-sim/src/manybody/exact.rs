//! Exact propagation within magnetization sectors.
//!
//! [H, S^z_total] = 0, so the Hamiltonian is block diagonal over popcount
//! sectors and each block can be treated exactly. Two independent routes are
//! provided: a Chebyshev expansion of exp(-iHt) on the sparse sector matrix
//! (production path, O(dim * nnz) per unit time) and a dense
//! eigendecomposition (reference path for small chains, used as the oracle
//! for Trotter validation).

use super::{binomial, combinations, ManyBodyState};
use crate::error::{Error, Result};
use crate::linalg::{self, bessel_j_sequence, EigenDecomposition};
use crate::model::ChainSpec;
use num_complex::Complex64;
use std::collections::HashMap;

/// Ordered basis of one magnetization sector.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    pub n_sites: usize,
    pub ups: u32,
    /// Ascending basis masks.
    pub masks: Vec<u64>,
}

impl SectorBasis {
    pub fn new(n_sites: usize, ups: u32) -> Self {
        let masks: Vec<u64> = combinations(n_sites, ups as usize).collect();
        debug_assert_eq!(masks.len() as u64, binomial(n_sites, ups as usize));
        Self {
            n_sites,
            ups,
            masks,
        }
    }

    pub fn dim(&self) -> usize {
        self.masks.len()
    }

    pub fn index_of(&self, mask: u64) -> Option<usize> {
        self.masks.binary_search(&mask).ok()
    }
}

/// Sparse sector Hamiltonian. Every off-diagonal element is the same
/// flip-flop amplitude J/2, so only the adjacency structure is stored.
#[derive(Debug, Clone)]
pub struct SectorHamiltonian {
    pub basis: SectorBasis,
    diag: Vec<f64>,
    row_ptr: Vec<u32>,
    cols: Vec<u32>,
    half_j: f64,
}

impl SectorHamiltonian {
    pub fn new(spec: &ChainSpec, basis: SectorBasis) -> Self {
        let n = spec.n_sites;
        let eps: Vec<f64> = (0..n)
            .map(|k| spec.onsite_potential(k).expect("index in range"))
            .collect();
        let dim = basis.dim();
        let mut diag = Vec::with_capacity(dim);
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        row_ptr.push(0u32);
        for &mask in &basis.masks {
            let mut e = 0.0;
            for (site, &eps_site) in eps.iter().enumerate() {
                let sz = if mask >> site & 1 == 1 { 0.5 } else { -0.5 };
                e += eps_site * sz;
            }
            for bond in 0..n - 1 {
                let pair = (mask >> bond) & 0b11;
                e += if pair == 0b00 || pair == 0b11 {
                    spec.u / 4.0
                } else {
                    -spec.u / 4.0
                };
                if pair == 0b01 || pair == 0b10 {
                    let flipped = mask ^ (0b11 << bond);
                    let j = basis.index_of(flipped).expect("flip stays in sector");
                    cols.push(j as u32);
                }
            }
            diag.push(e);
            row_ptr.push(cols.len() as u32);
        }
        Self {
            basis,
            diag,
            row_ptr,
            cols,
            half_j: spec.j / 2.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// y = H x.
    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        for i in 0..self.dim() {
            let mut acc = x[i] * self.diag[i];
            let lo = self.row_ptr[i] as usize;
            let hi = self.row_ptr[i + 1] as usize;
            for &c in &self.cols[lo..hi] {
                acc += x[c as usize] * self.half_j;
            }
            y[i] = acc;
        }
    }

    /// Gershgorin bounds on the sector spectrum.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        let mut lo = f64::MAX;
        let mut hi = f64::MIN;
        for i in 0..self.dim() {
            let degree = (self.row_ptr[i + 1] - self.row_ptr[i]) as f64;
            let radius = degree * self.half_j.abs();
            lo = lo.min(self.diag[i] - radius);
            hi = hi.max(self.diag[i] + radius);
        }
        (lo, hi)
    }

    /// Dense row-major copy, for the eigendecomposition path.
    pub fn to_dense(&self) -> Vec<f64> {
        let d = self.dim();
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            m[i * d + i] = self.diag[i];
            let lo = self.row_ptr[i] as usize;
            let hi = self.row_ptr[i + 1] as usize;
            for &c in &self.cols[lo..hi] {
                m[i * d + c as usize] = self.half_j;
            }
        }
        m
    }
}

/// Chebyshev propagator for one sector: applies exp(-iHt) to packed sector
/// vectors to machine precision.
#[derive(Debug, Clone)]
pub struct SectorPropagator {
    pub h: SectorHamiltonian,
    center: f64,
    half_width: f64,
}

impl SectorPropagator {
    pub fn new(spec: &ChainSpec, basis: SectorBasis) -> Self {
        let h = SectorHamiltonian::new(spec, basis);
        let (lo, hi) = h.spectral_bounds();
        let center = 0.5 * (lo + hi);
        let half_width = (0.5 * (hi - lo)).max(1e-12) * (1.0 + 1e-10);
        Self {
            h,
            center,
            half_width,
        }
    }

    /// In-place x <- exp(-iHt) x; negative t propagates backward.
    pub fn evolve(&self, x: &mut [Complex64], t: f64) {
        if t == 0.0 || self.h.dim() == 0 {
            return;
        }
        let dim = self.h.dim();
        assert_eq!(x.len(), dim);
        let tau = self.half_width * t;
        let k_max = tau.abs().ceil() as usize + 3 * (tau.abs().cbrt().ceil() as usize) + 40;
        let coeff = bessel_j_sequence(tau, k_max);
        let global = Complex64::from_polar(1.0, -self.center * t);

        // recurrence T_{k+1} = 2 H~ T_k - T_{k-1} on the scaled Hamiltonian
        let mut t_prev = x.to_vec();
        let mut t_cur = vec![Complex64::new(0.0, 0.0); dim];
        self.scaled_matvec(&t_prev, &mut t_cur);

        let mut acc: Vec<Complex64> = t_prev.iter().map(|v| v * coeff[0]).collect();
        let mut ik = Complex64::new(0.0, -1.0); // (-i)^k for k = 1
        add_scaled(&mut acc, &t_cur, ik * (2.0 * coeff[1]));

        let mut t_next = vec![Complex64::new(0.0, 0.0); dim];
        let mut tail_small = 0usize;
        for k in 2..=k_max {
            self.scaled_matvec(&t_cur, &mut t_next);
            for i in 0..dim {
                t_next[i] = t_next[i] * 2.0 - t_prev[i];
            }
            std::mem::swap(&mut t_prev, &mut t_cur);
            std::mem::swap(&mut t_cur, &mut t_next);
            ik *= Complex64::new(0.0, -1.0);
            let c = 2.0 * coeff[k];
            add_scaled(&mut acc, &t_cur, ik * c);
            if c.abs() < 1e-16 {
                tail_small += 1;
                if tail_small >= 4 {
                    break;
                }
            } else {
                tail_small = 0;
            }
        }
        for (xi, ai) in x.iter_mut().zip(acc.iter()) {
            *xi = global * ai;
        }
    }

    fn scaled_matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.h.matvec(x, y);
        let inv = 1.0 / self.half_width;
        for (yi, xi) in y.iter_mut().zip(x.iter()) {
            *yi = (*yi - xi * self.center) * inv;
        }
    }
}

fn add_scaled(acc: &mut [Complex64], v: &[Complex64], c: Complex64) {
    for (a, b) in acc.iter_mut().zip(v.iter()) {
        *a += c * b;
    }
}

/// Gathers the sector components of a full state into a packed vector.
fn gather(state: &ManyBodyState, basis: &SectorBasis) -> Vec<Complex64> {
    basis
        .masks
        .iter()
        .map(|&m| state.amp[m as usize])
        .collect()
}

fn scatter(state: &mut ManyBodyState, basis: &SectorBasis, packed: &[Complex64]) {
    for (&m, &v) in basis.masks.iter().zip(packed.iter()) {
        state.amp[m as usize] = v;
    }
}

/// Exact evolution of a full 2^N state by signed time `t`, sector by sector.
///
/// Cost scales with the dimensions of the occupied sectors only.
pub fn evolve_exact(state: &mut ManyBodyState, spec: &ChainSpec, t: f64) -> Result<()> {
    spec.validate()?;
    if state.n_sites != spec.n_sites {
        return Err(Error::invalid("state and spec disagree on the site count"));
    }
    let sectors = match state.sector {
        Some(u) => vec![u],
        None => state.occupied_sectors(0.0),
    };
    for ups in sectors {
        let basis = SectorBasis::new(spec.n_sites, ups);
        let prop = SectorPropagator::new(spec, basis);
        let mut packed = gather(state, &prop.h.basis);
        prop.evolve(&mut packed, t);
        scatter(state, &prop.h.basis, &packed);
    }
    Ok(())
}

/// Evolver with per-sector propagator caching, for repeated legs on the
/// same spec (time traces, echo grids).
pub struct ExactEvolver {
    pub spec: ChainSpec,
    cache: HashMap<u32, SectorPropagator>,
}

impl ExactEvolver {
    pub fn new(spec: ChainSpec) -> Self {
        Self {
            spec,
            cache: HashMap::new(),
        }
    }

    pub fn advance_signed(&mut self, state: &mut ManyBodyState, t: f64) -> Result<()> {
        if state.n_sites != self.spec.n_sites {
            return Err(Error::invalid("state and spec disagree on the site count"));
        }
        let sectors = match state.sector {
            Some(u) => vec![u],
            None => state.occupied_sectors(0.0),
        };
        for ups in sectors {
            let spec = &self.spec;
            let prop = self
                .cache
                .entry(ups)
                .or_insert_with(|| SectorPropagator::new(spec, SectorBasis::new(spec.n_sites, ups)));
            let mut packed = gather(state, &prop.h.basis);
            prop.evolve(&mut packed, t);
            scatter(state, &prop.h.basis, &packed);
        }
        Ok(())
    }
}

/// Maximum chain length accepted by the dense reference propagator.
pub const EXACT_REFERENCE_MAX_SITES: usize = 12;

/// Reference propagator: exp(-iHt) through a dense eigendecomposition of
/// every occupied sector block. Test oracle; refuses long chains.
pub fn exact_evolve_reference(
    spec: &ChainSpec,
    state: &ManyBodyState,
    t: f64,
) -> Result<ManyBodyState> {
    spec.validate()?;
    if state.n_sites != spec.n_sites {
        return Err(Error::invalid("state and spec disagree on the site count"));
    }
    if spec.n_sites > EXACT_REFERENCE_MAX_SITES {
        return Err(Error::ExactRefused(format!(
            "reference propagator is limited to {EXACT_REFERENCE_MAX_SITES} sites, got {}",
            spec.n_sites
        )));
    }
    let mut out = state.clone();
    let sectors = match state.sector {
        Some(u) => vec![u],
        None => state.occupied_sectors(0.0),
    };
    for ups in sectors {
        let basis = SectorBasis::new(spec.n_sites, ups);
        let h = SectorHamiltonian::new(spec, basis);
        let eig = linalg::symmetric_eigen(&h.to_dense(), h.dim())?;
        let packed = gather(state, &h.basis);
        let evolved = eigen_apply_exp(&eig, &packed, t);
        scatter(&mut out, &h.basis, &evolved);
    }
    Ok(out)
}

/// V exp(-i lambda t) V^T x for a real symmetric eigensystem.
pub fn eigen_apply_exp(eig: &EigenDecomposition, x: &[Complex64], t: f64) -> Vec<Complex64> {
    let d = eig.dim;
    let mut modal = vec![Complex64::new(0.0, 0.0); d];
    for i in 0..d {
        let xi = x[i];
        if xi == Complex64::new(0.0, 0.0) {
            continue;
        }
        for k in 0..d {
            modal[k] += xi * eig.component(i, k);
        }
    }
    for (k, m) in modal.iter_mut().enumerate() {
        *m *= Complex64::from_polar(1.0, -eig.values[k] * t);
    }
    let mut out = vec![Complex64::new(0.0, 0.0); d];
    for i in 0..d {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..d {
            acc += modal[k] * eig.component(i, k);
        }
        out[i] = acc;
    }
    out
}
