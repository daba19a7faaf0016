//! Full 2^N state-vector machinery.
//!
//! Basis states are bitmasks with bit n set when spin n points up. All
//! dynamics conserves total magnetization, so states built inside one
//! popcount sector stay there; the `sector` label tracks this. Random-phase
//! sector states implement the quantum-parallelism trick: a single pure
//! state whose expectation values self-average to the infinite-temperature
//! sector ensemble.

mod exact;
mod trotter;

pub use exact::{
    eigen_apply_exp, evolve_exact, exact_evolve_reference, ExactEvolver, SectorBasis,
    SectorHamiltonian, SectorPropagator, EXACT_REFERENCE_MAX_SITES,
};
pub use trotter::{evolve, Direction, TrotterEvolver, TrotterPlan, DT_CAP};

use crate::error::{Error, Result};
use crate::model::ChainSpec;
use num_complex::Complex64;
use rand::Rng;
use std::io::{Read, Write};
use std::path::Path;

/// Choice of propagation backend.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Method {
    /// Second-order symmetric splitting with the given step.
    Trotter(TrotterPlan),
    /// Chebyshev expansion per magnetization sector, exact to machine
    /// precision; cost scales with the occupied sector dimensions.
    Exact,
}

/// Unified propagator handle used by the echo and trace drivers.
pub struct Evolver {
    spec: ChainSpec,
    method: Method,
    exact: Option<ExactEvolver>,
}

impl Evolver {
    pub fn new(spec: ChainSpec, method: Method) -> Self {
        let exact = match method {
            Method::Exact => Some(ExactEvolver::new(spec)),
            Method::Trotter(_) => None,
        };
        Self {
            spec,
            method,
            exact,
        }
    }

    pub fn trotter(spec: ChainSpec, plan: TrotterPlan) -> Self {
        Self::new(spec, Method::Trotter(plan))
    }

    pub fn exact(spec: ChainSpec) -> Self {
        Self::new(spec, Method::Exact)
    }

    pub fn spec(&self) -> &ChainSpec {
        &self.spec
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// Evolves by `duration >= 0` in the given direction.
    pub fn advance(
        &mut self,
        state: &mut ManyBodyState,
        duration: f64,
        direction: Direction,
    ) -> Result<()> {
        match (&self.method, &mut self.exact) {
            (Method::Trotter(plan), _) => {
                trotter::evolve(state, &self.spec, duration, plan, direction)
            }
            (Method::Exact, Some(ev)) => {
                let signed = match direction {
                    Direction::Forward => duration,
                    Direction::Backward => -duration,
                };
                ev.advance_signed(state, signed)
            }
            (Method::Exact, None) => unreachable!("exact evolver initialized in new"),
        }
    }
}

/// Complex amplitude vector over the 2^N computational basis.
#[derive(Debug, Clone)]
pub struct ManyBodyState {
    pub n_sites: usize,
    /// Amplitudes indexed by basis bitmask; bit n set = spin n up.
    pub amp: Vec<Complex64>,
    /// Total-up-spin sector label, if the state lives in one sector.
    pub sector: Option<u32>,
    /// Seed lineage recorded into checkpoints for provenance.
    pub lineage: Vec<u64>,
}

impl ManyBodyState {
    pub fn zero(n_sites: usize) -> Self {
        assert!(n_sites >= 1 && n_sites < 28, "state vector too large");
        Self {
            n_sites,
            amp: vec![Complex64::new(0.0, 0.0); 1 << n_sites],
            sector: None,
            lineage: Vec::new(),
        }
    }

    /// A single computational basis state.
    pub fn basis_state(n_sites: usize, mask: u64) -> Self {
        let mut state = Self::zero(n_sites);
        state.amp[mask as usize] = Complex64::new(1.0, 0.0);
        state.sector = Some(mask.count_ones());
        state
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Inner product <self | other>.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amp
            .iter()
            .zip(other.amp.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Popcount sectors carrying more than `tol` of squared weight.
    pub fn occupied_sectors(&self, tol: f64) -> Vec<u32> {
        let mut weight = vec![0.0f64; self.n_sites + 1];
        for (mask, a) in self.amp.iter().enumerate() {
            weight[(mask as u64).count_ones() as usize] += a.norm_sqr();
        }
        weight
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > tol)
            .map(|(u, _)| u as u32)
            .collect()
    }
}

/// Moment of the gradient field on one basis state:
/// g(mask) = sum_n n * m_n with m_n = +-1/2 by bit n.
#[inline]
pub fn gradient_moment(mask: u64, n_sites: usize) -> f64 {
    let mut up_sum = 0u64;
    let mut m = mask;
    while m != 0 {
        let n = m.trailing_zeros() as u64;
        up_sum += n;
        m &= m - 1;
    }
    let all: u64 = (n_sites as u64 * (n_sites as u64 - 1)) / 2;
    up_sum as f64 - 0.5 * all as f64
}

/// Multiplies each amplitude by exp(-i phi_g g(mask)). Diagonal and exactly
/// unitary; never changes the sector.
pub fn apply_gradient_kick(state: &mut ManyBodyState, phi_g: f64) {
    if phi_g == 0.0 {
        return;
    }
    let n = state.n_sites;
    for (mask, a) in state.amp.iter_mut().enumerate() {
        if a.re == 0.0 && a.im == 0.0 {
            continue;
        }
        let g = gradient_moment(mask as u64, n);
        *a *= Complex64::from_polar(1.0, -phi_g * g);
    }
}

/// S^+ at one site: moves weight from site-down to site-up components;
/// site-up components are annihilated.
pub fn raise_at(state: &ManyBodyState, site: usize) -> Result<ManyBodyState> {
    check_site(state, site)?;
    let bit = 1usize << site;
    let mut out = ManyBodyState::zero(state.n_sites);
    for (mask, &a) in state.amp.iter().enumerate() {
        if mask & bit == 0 && (a.re != 0.0 || a.im != 0.0) {
            out.amp[mask | bit] = a;
        }
    }
    out.sector = state.sector.map(|u| u + 1);
    out.lineage = state.lineage.clone();
    Ok(out)
}

/// S^- at one site, the adjoint of [`raise_at`].
pub fn lower_at(state: &ManyBodyState, site: usize) -> Result<ManyBodyState> {
    check_site(state, site)?;
    let bit = 1usize << site;
    let mut out = ManyBodyState::zero(state.n_sites);
    for (mask, &a) in state.amp.iter().enumerate() {
        if mask & bit != 0 && (a.re != 0.0 || a.im != 0.0) {
            out.amp[mask & !bit] = a;
        }
    }
    out.sector = state.sector.and_then(|u| u.checked_sub(1));
    out.lineage = state.lineage.clone();
    Ok(out)
}

/// Local magnetization <S_n^z> for every site.
pub fn local_magnetization(state: &ManyBodyState) -> Vec<f64> {
    let n = state.n_sites;
    let mut acc = vec![0.0f64; n];
    for (mask, a) in state.amp.iter().enumerate() {
        let w = a.norm_sqr();
        if w == 0.0 {
            continue;
        }
        let mut m = mask;
        while m != 0 {
            let site = m.trailing_zeros() as usize;
            acc[site] += w;
            m &= m - 1;
        }
    }
    let norm = state.norm_sqr();
    acc.iter().map(|&p_up| p_up / norm - 0.5).collect()
}

/// Pre-excitation thermal sector state: the excitation site points down and
/// the remaining N-1 spins carry `ups - 1` up spins in an equal-weight
/// superposition with i.i.d. random phases.
pub fn random_equilibrium_state(
    n_sites: usize,
    ups: u32,
    excitation_site: usize,
    rng: &mut impl Rng,
) -> Result<ManyBodyState> {
    equilibrium_state_impl(n_sites, ups, excitation_site, Some(rng))
}

/// Same superposition with all phases zero, for exact (non-random) runs.
pub fn uniform_equilibrium_state(
    n_sites: usize,
    ups: u32,
    excitation_site: usize,
) -> Result<ManyBodyState> {
    equilibrium_state_impl::<rand_chacha::ChaCha12Rng>(n_sites, ups, excitation_site, None)
}

fn equilibrium_state_impl<R: Rng>(
    n_sites: usize,
    ups: u32,
    excitation_site: usize,
    mut rng: Option<&mut R>,
) -> Result<ManyBodyState> {
    if n_sites < 1 || n_sites > 27 {
        return Err(Error::invalid("n_sites out of supported range"));
    }
    if excitation_site >= n_sites {
        return Err(Error::SiteOutOfRange {
            index: excitation_site,
            n_sites,
        });
    }
    if ups == 0 || ups as usize > n_sites {
        return Err(Error::invalid(format!(
            "sector with {ups} up spins is impossible on {n_sites} sites with one excitation"
        )));
    }
    let rest = ups - 1;
    let mut state = ManyBodyState::zero(n_sites);
    let dim = binomial(n_sites - 1, rest as usize);
    let weight = 1.0 / (dim as f64).sqrt();
    for compact in combinations(n_sites - 1, rest as usize) {
        let mask = expand_around(compact, excitation_site);
        let phase = match rng.as_mut() {
            Some(r) => r.gen::<f64>() * std::f64::consts::TAU,
            None => 0.0,
        };
        state.amp[mask as usize] = Complex64::from_polar(weight, phase);
    }
    state.sector = Some(rest);
    Ok(state)
}

/// The excited pseudo-pure state |Psi_0>: S^+ applied at the excitation
/// site of a random equilibrium state, so the site is up with probability 1
/// and every other site is unpolarized over the phase ensemble.
pub fn random_sector_state(
    n_sites: usize,
    ups: u32,
    excitation_site: usize,
    rng: &mut impl Rng,
) -> Result<ManyBodyState> {
    let eq = random_equilibrium_state(n_sites, ups, excitation_site, rng)?;
    raise_at(&eq, excitation_site)
}

/// Infinite-temperature thermal state over the full space: the excitation
/// site points down, every configuration of the remaining N-1 spins enters
/// with weight 2^-(N-1)/2 and an i.i.d. random phase. This is the
/// equilibrium ensemble behind the echo protocol; it spans all
/// magnetization sectors.
pub fn random_full_equilibrium_state(
    n_sites: usize,
    excitation_site: usize,
    rng: &mut impl Rng,
) -> Result<ManyBodyState> {
    if n_sites < 1 || n_sites > 27 {
        return Err(Error::invalid("n_sites out of supported range"));
    }
    if excitation_site >= n_sites {
        return Err(Error::SiteOutOfRange {
            index: excitation_site,
            n_sites,
        });
    }
    let mut state = ManyBodyState::zero(n_sites);
    let weight = 1.0 / ((1u64 << (n_sites - 1)) as f64).sqrt();
    let bit = 1usize << excitation_site;
    for mask in 0..(1usize << n_sites) {
        if mask & bit != 0 {
            continue;
        }
        let phase = rng.gen::<f64>() * std::f64::consts::TAU;
        state.amp[mask] = Complex64::from_polar(weight, phase);
    }
    state.sector = None;
    Ok(state)
}

/// Fully random infinite-temperature state over all 2^N configurations,
/// the trace estimator behind z-z correlator echoes.
pub fn random_thermal_state(n_sites: usize, rng: &mut impl Rng) -> Result<ManyBodyState> {
    if n_sites < 1 || n_sites > 27 {
        return Err(Error::invalid("n_sites out of supported range"));
    }
    let mut state = ManyBodyState::zero(n_sites);
    let weight = 1.0 / ((1u64 << n_sites) as f64).sqrt();
    for mask in 0..(1usize << n_sites) {
        let phase = rng.gen::<f64>() * std::f64::consts::TAU;
        state.amp[mask] = Complex64::from_polar(weight, phase);
    }
    state.sector = None;
    Ok(state)
}

/// Applies 2 S^z at one site in place: components with the site down flip
/// sign. Exactly unitary and involutory.
pub fn apply_two_sz(state: &mut ManyBodyState, site: usize) -> Result<()> {
    check_site(state, site)?;
    let bit = 1usize << site;
    for (mask, a) in state.amp.iter_mut().enumerate() {
        if mask & bit == 0 {
            *a = -*a;
        }
    }
    Ok(())
}

fn check_site(state: &ManyBodyState, site: usize) -> Result<()> {
    if site >= state.n_sites {
        return Err(Error::SiteOutOfRange {
            index: site,
            n_sites: state.n_sites,
        });
    }
    Ok(())
}

pub(crate) fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut out = 1u64;
    for i in 0..k {
        out = out * (n - i) as u64 / (i + 1) as u64;
    }
    out
}

/// Ascending iterator over n-bit masks with exactly k bits set.
pub(crate) fn combinations(n: usize, k: usize) -> impl Iterator<Item = u64> {
    let first: u64 = if k == 0 { 0 } else { (1 << k) - 1 };
    let limit: u64 = 1 << n;
    std::iter::successors(Some(first), move |&m| {
        if m == 0 {
            return None;
        }
        // Gosper's hack
        let c = m & m.wrapping_neg();
        let r = m + c;
        Some((((r ^ m) >> 2) / c) | r)
    })
    .take_while(move |&m| m < limit)
}

/// Inserts a cleared bit at `site`, shifting higher bits up.
pub(crate) fn expand_around(compact: u64, site: usize) -> u64 {
    let low = compact & ((1u64 << site) - 1);
    let high = (compact >> site) << (site + 1);
    low | high
}

const CHECKPOINT_MAGIC: &[u8; 8] = b"ZOGESTAT";

/// Writes a binary checkpoint: header (N, sector, seed lineage) and the
/// amplitudes as little-endian (re, im) f64 pairs.
pub fn save_checkpoint(state: &ManyBodyState, path: &Path) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(CHECKPOINT_MAGIC)?;
    f.write_all(&1u32.to_le_bytes())?;
    f.write_all(&(state.n_sites as u32).to_le_bytes())?;
    let sector: i32 = state.sector.map_or(-1, |u| u as i32);
    f.write_all(&sector.to_le_bytes())?;
    f.write_all(&(state.lineage.len() as u32).to_le_bytes())?;
    for s in &state.lineage {
        f.write_all(&s.to_le_bytes())?;
    }
    for a in &state.amp {
        f.write_all(&a.re.to_le_bytes())?;
        f.write_all(&a.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<ManyBodyState> {
    let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 8];
    f.read_exact(&mut magic)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(Error::Checkpoint("bad magic".into()));
    }
    let version = read_u32(&mut f)?;
    if version != 1 {
        return Err(Error::Checkpoint(format!("unsupported version {version}")));
    }
    let n_sites = read_u32(&mut f)? as usize;
    if n_sites == 0 || n_sites > 27 {
        return Err(Error::Checkpoint(format!("bad site count {n_sites}")));
    }
    let sector_raw = read_u32(&mut f)? as i32;
    let lineage_len = read_u32(&mut f)? as usize;
    let mut lineage = Vec::with_capacity(lineage_len);
    for _ in 0..lineage_len {
        let mut b = [0u8; 8];
        f.read_exact(&mut b)?;
        lineage.push(u64::from_le_bytes(b));
    }
    let mut amp = Vec::with_capacity(1 << n_sites);
    for _ in 0..(1usize << n_sites) {
        let mut re = [0u8; 8];
        let mut im = [0u8; 8];
        f.read_exact(&mut re)?;
        f.read_exact(&mut im)?;
        amp.push(Complex64::new(f64::from_le_bytes(re), f64::from_le_bytes(im)));
    }
    Ok(ManyBodyState {
        n_sites,
        amp,
        sector: if sector_raw < 0 { None } else { Some(sector_raw as u32) },
        lineage,
    })
}

fn read_u32(f: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    f.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedPlan;
    use std::f64::consts::PI;

    #[test]
    fn single_site_sector_state_is_up() {
        let mut rng = SeedPlan::new(1).state_rng(0, 0);
        let s = random_sector_state(1, 1, 0, &mut rng).unwrap();
        assert!((s.amp[1].norm() - 1.0).abs() < 1e-15);
        assert_eq!(s.sector, Some(1));
    }

    #[test]
    fn three_site_sector_state_amplitudes() {
        let mut rng = SeedPlan::new(1).state_rng(0, 0);
        let s = random_sector_state(3, 2, 1, &mut rng).unwrap();
        let w = 1.0 / 2f64.sqrt();
        assert!((s.amp[0b011].norm() - w).abs() < 1e-14);
        assert!((s.amp[0b110].norm() - w).abs() < 1e-14);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn excitation_site_is_fully_up_and_background_unpolarized() {
        let dim = binomial(12, 6) as f64;
        let bound = 3.0 / dim.sqrt();
        for seed in 0..100u64 {
            let mut rng = SeedPlan::new(seed).state_rng(0, 0);
            let s = random_sector_state(13, 7, 6, &mut rng).unwrap();
            let mag = local_magnetization(&s);
            assert!((mag[6] - 0.5).abs() < 1e-12);
            for (n, &m) in mag.iter().enumerate() {
                if n != 6 {
                    assert!(m.abs() <= bound, "site {n}: {m} vs {bound}");
                }
            }
        }
    }

    #[test]
    fn impossible_sectors_are_rejected() {
        let mut rng = SeedPlan::new(0).state_rng(0, 0);
        assert!(random_sector_state(5, 0, 2, &mut rng).is_err());
        assert!(random_sector_state(5, 6, 2, &mut rng).is_err());
        assert!(random_sector_state(3, 2, 3, &mut rng).is_err());
    }

    #[test]
    fn kick_phase_on_a_single_basis_state() {
        // ups at sites {0, 2} of N=3: g = 0/2 + 2/2 - 1/2 = 1/2, so phi = pi
        // multiplies by exp(-i pi / 2)
        let mut s = ManyBodyState::basis_state(3, 0b101);
        apply_gradient_kick(&mut s, PI);
        let expect = Complex64::from_polar(1.0, -PI / 2.0);
        assert!((s.amp[0b101] - expect).norm() < 1e-14);
    }

    #[test]
    fn kick_zero_is_identity_and_sector_kick_is_global_phase() {
        let mut rng = SeedPlan::new(3).state_rng(0, 0);
        let s = random_sector_state(6, 3, 2, &mut rng).unwrap();
        let mut s0 = s.clone();
        apply_gradient_kick(&mut s0, 0.0);
        assert!(s0.inner(&s).re > 1.0 - 1e-14);
        // 2 pi kick: gradient moments within a sector differ by integers
        let mut s1 = s.clone();
        apply_gradient_kick(&mut s1, 2.0 * PI);
        assert!((s.inner(&s1).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn all_up_magnetization() {
        let n = 5;
        let s = ManyBodyState::basis_state(n, (1 << n) - 1);
        let mag = local_magnetization(&s);
        assert!(mag.iter().all(|&m| (m - 0.5).abs() < 1e-15));
    }

    #[test]
    fn raise_annihilates_up_components_and_adjoints_with_lower() {
        let mut rng = SeedPlan::new(5).state_rng(0, 0);
        let eq = random_equilibrium_state(7, 4, 3, &mut rng).unwrap();
        let up = raise_at(&eq, 3).unwrap();
        assert!((up.norm_sqr() - 1.0).abs() < 1e-12);
        assert_eq!(up.sector, Some(4));
        let down = lower_at(&up, 3).unwrap();
        assert!((down.inner(&eq).re - 1.0).abs() < 1e-12);
        // raising twice on the same site kills the state
        let dead = raise_at(&up, 3).unwrap();
        assert!(dead.norm_sqr() < 1e-30);
    }

    #[test]
    fn combination_enumeration_counts() {
        assert_eq!(combinations(5, 2).count() as u64, binomial(5, 2));
        assert_eq!(combinations(12, 6).count() as u64, binomial(12, 6));
        let all: Vec<u64> = combinations(4, 2).collect();
        assert_eq!(all, vec![0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
    }

    #[test]
    fn expand_around_inserts_a_hole() {
        assert_eq!(expand_around(0b11, 0), 0b110);
        assert_eq!(expand_around(0b11, 1), 0b101);
        assert_eq!(expand_around(0b11, 2), 0b011);
    }

    #[test]
    fn checkpoint_roundtrip() {
        let mut rng = SeedPlan::new(9).state_rng(2, 1);
        let mut s = random_sector_state(9, 5, 4, &mut rng).unwrap();
        s.lineage = vec![9, 2, 1];
        let dir = std::env::temp_dir().join("zoge_ckpt_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("state.bin");
        save_checkpoint(&s, &path).unwrap();
        let back = load_checkpoint(&path).unwrap();
        assert_eq!(back.n_sites, 9);
        assert_eq!(back.sector, Some(5));
        assert_eq!(back.lineage, vec![9, 2, 1]);
        assert_eq!(back.amp, s.amp);
        std::fs::remove_file(&path).ok();
    }
}
