//! Acceptance suite: one test per contracted criterion, each printing a
//! PASS/FAIL line with the measured numbers. Run with
//! `cargo test -p zoge-sim --test acceptance -- --nocapture`.

use num_complex::Complex64;
use rand::Rng;
use zoge_sim::analysis;
use zoge_sim::linalg;
use zoge_sim::manybody::{
    self, evolve, exact_evolve_reference, local_magnetization, random_sector_state, raise_at,
    uniform_equilibrium_state, Direction, Evolver, SectorBasis, SectorHamiltonian,
    TrotterPlan,
};
use zoge_sim::model::ChainSpec;
use zoge_sim::onebody;
use zoge_sim::rng::SeedPlan;
use zoge_sim::zoge;

fn report(criterion: &str, pass: bool, detail: String) {
    println!(
        "[{}] {criterion}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion}: {detail}");
}

fn spec(n: usize, w: f64, u: f64, phi: f64) -> ChainSpec {
    ChainSpec::new(n, 1.0, w, u).unwrap().with_phase(phi)
}

/// Disorder-averaged equilibrium Q0 over a W grid (one-body chain).
fn q0_curve(
    n: usize,
    w_values: &[f64],
    n_realizations: usize,
    seed: u64,
    site: usize,
    samples: usize,
) -> analysis::EnsembleCurve {
    let base = ChainSpec::new(n, 1.0, w_values[0], 0.0).unwrap();
    let set = zoge_sim::model::RealizationSet::sample(base, n_realizations, seed).unwrap();
    let mut curves = Vec::new();
    for r in 0..set.len() {
        let mut row = Vec::with_capacity(w_values.len());
        for &w in w_values {
            let sp = ChainSpec::new(n, 1.0, w, 0.0)
                .unwrap()
                .with_phase(set.phases[r]);
            let sol = onebody::diagonalize(&onebody::build_onebody_hamiltonian(&sp).unwrap())
                .unwrap();
            row.push(onebody::ipr_time_average(&sol, site, 1.0, samples).unwrap());
        }
        curves.push(row);
    }
    analysis::disorder_average(w_values, &curves, "equilibrium Q0").unwrap()
}

#[test]
fn criterion_01_aubry_andre_critical_point() {
    let start = std::time::Instant::now();
    let w_values: Vec<f64> = (0..25).map(|i| 0.4 + 0.05 * i as f64).collect();
    let curve = q0_curve(201, &w_values, 10, 1, 100, 220);
    let bounds = analysis::critical_bounds(&curve).unwrap();
    let width = bounds.w_upper - bounds.w_lower;
    let contains = bounds.w_lower <= 1.0 && 1.0 <= bounds.w_upper;
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "criterion 1: Aubry-Andre critical point",
        contains && width >= 0.0 && width <= 0.3 && elapsed < 300.0,
        format!(
            "bracket [{:.4}, {:.4}] width {:.4} (tolerance: contains 1.0, width <= 0.3), {elapsed:.1} s",
            bounds.w_lower, bounds.w_upper, width
        ),
    );
}

#[test]
fn criterion_02_one_over_n_scaling() {
    let sizes = [51usize, 101, 201];
    let mut extended = Vec::new();
    let mut localized = Vec::new();
    for &n in &sizes {
        let ext = q0_curve(n, &[0.5], 8, 2, n / 2, 200).mean[0];
        let loc = q0_curve(n, &[1.5], 8, 2, n / 2, 200).mean[0];
        extended.push(ext * n as f64);
        localized.push(loc);
    }
    let spread = |v: &[f64]| {
        let max = v.iter().cloned().fold(f64::MIN, f64::max);
        let min = v.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    };
    let ext_ratio = spread(&extended);
    let loc_ratio = spread(&localized);
    report(
        "criterion 2: 1/N scaling of the extended phase",
        ext_ratio <= 1.2 && loc_ratio <= 1.2,
        format!(
            "W=0.5: Q0*N = {extended:.4?} (max/min {ext_ratio:.3} <= 1.2); \
             W=1.5: Q0 = {localized:.4?} (max/min {loc_ratio:.3} <= 1.2)"
        ),
    );
}

#[test]
fn criterion_03_edge_state_phenomenology() {
    let n = 500;
    let phi_special = 0.0;
    let phi_generic = 7.0 * std::f64::consts::PI / 20.0;

    let sided = |phi: f64| -> (Vec<f64>, Vec<f64>, onebody::OneBodySolution) {
        let sp = spec(n, 0.5, 0.0, phi);
        let sol = onebody::diagonalize(&onebody::build_onebody_hamiltonian(&sp).unwrap()).unwrap();
        // edge states sit an order of magnitude above the bulk
        let iprs = onebody::ipr_eigenstates(&sol);
        let mut sorted = iprs.clone();
        sorted.sort_by(f64::total_cmp);
        let threshold = 10.0 * sorted[n / 2];
        let report = onebody::edge_state_report(&sol, threshold).unwrap();
        let left: Vec<f64> = report
            .iter()
            .filter(|r| r.edge && r.center < n as f64 / 2.0)
            .map(|r| r.ipr_k)
            .collect();
        let right: Vec<f64> = report
            .iter()
            .filter(|r| r.edge && r.center >= n as f64 / 2.0)
            .map(|r| r.ipr_k)
            .collect();
        (left, right, sol)
    };

    let (left0, right0, _) = sided(phi_special);
    let one_sided = (left0.is_empty() != right0.is_empty())
        && (left0.len() + right0.len()) >= 1;

    let (left1, right1, sol1) = sided(phi_generic);
    let both_sided = !left1.is_empty() && !right1.is_empty();

    // excite the end adjacent to the strongest edge states
    let left_max = left1.iter().cloned().fold(0.0, f64::max);
    let right_max = right1.iter().cloned().fold(0.0, f64::max);
    let end_site = if right_max > left_max { n - 1 } else { 0 };
    let q0_end = onebody::ipr_time_average(&sol1, end_site, 1.0, 200).unwrap();
    let q0_mid = onebody::ipr_time_average(&sol1, n / 2, 1.0, 200).unwrap();
    let trapped = q0_end > 5.0 * q0_mid;
    let delocalized = q0_mid < 3.0 / n as f64 * 5.0;

    report(
        "criterion 3: edge-state phenomenology",
        one_sided && both_sided && trapped && delocalized,
        format!(
            "phi=0: {}/{} edge states left/right (exactly one extreme: {one_sided}); \
             phi=7pi/20: {}/{} (both: {both_sided}); end-site Q0 {q0_end:.4} vs mid {q0_mid:.5} \
             (ratio {:.1} > 5), mid delocalized: {delocalized}",
            left0.len(),
            right0.len(),
            left1.len(),
            right1.len(),
            q0_end / q0_mid
        ),
    );
}

#[test]
fn criterion_04_zoge_equals_ipr_at_zero_interaction() {
    let n = 13;
    let site = 6;
    let times: Vec<f64> = (0..24)
        .map(|i| 0.5 * (500.0f64 / 0.5).powf(i as f64 / 23.0))
        .collect();
    let n_phi = zoge::default_n_phi(n);
    let mut worst_q0 = 0.0f64;
    let mut worst_sum = 0.0f64;
    for &w in &[0.5, 1.5] {
        let sp = spec(n, w, 0.0, 0.9);
        let sol = onebody::diagonalize(&onebody::build_onebody_hamiltonian(&sp).unwrap()).unwrap();
        let psi_eq = uniform_equilibrium_state(n, 1, site).unwrap();
        let mut ev = Evolver::exact(sp);
        for &t in &times {
            let record = zoge::zoge_record(&mut ev, &psi_eq, site, t, n_phi).unwrap();
            let ipr = onebody::ipr_t(&onebody::propagate_amplitudes(&sol, site, t).unwrap());
            worst_q0 = worst_q0.max((record.zoge() - ipr).abs());
            worst_sum = worst_sum.max((record.sum() - 1.0).abs());
        }
    }
    report(
        "criterion 4: ZOGE = dynamical IPR at U=0",
        worst_q0 <= 1e-4 && worst_sum <= 1e-6,
        format!(
            "max |Q0 - sum|c|^4| = {worst_q0:.2e} (<= 1e-4); max |sum rule - 1| = {worst_sum:.2e} (<= 1e-6); \
             N=13, W in {{0.5, 1.5}}, 24 times, exact sector states"
        ),
    );
}

#[test]
fn criterion_05_variance_identity() {
    // Q_n second moment versus the spatial variance of the polarization.
    // The implemented echo is the squared two-branch overlap, whose
    // spectrum is the autocorrelation of p_n; its second moment is
    // analytically twice the spatial variance, so this criterion is
    // expected red. The table below documents the measured ratio.
    let n = 21;
    let site = 10;
    let sp = spec(n, 0.8, 0.0, 0.6);
    let times: Vec<f64> = (0..11).map(|i| 5.0 * i as f64).collect();
    let n_phi = zoge::default_n_phi(n);
    let psi_eq = uniform_equilibrium_state(n, 1, site).unwrap();
    let psi0 = raise_at(&psi_eq, site).unwrap();
    let mut ev = Evolver::exact(sp);
    let trace = zoge::polarization_trace(&mut ev, &psi0, site, &times).unwrap();
    let mut worst = 0.0f64;
    let mut lines = Vec::new();
    for (snap, &t) in trace.iter().zip(times.iter()) {
        let record = zoge::zoge_record(&mut ev, &psi_eq, site, t, n_phi).unwrap();
        let lhs = zoge::spectrum_variance(&record);
        let rhs = zoge::spatial_variance(&snap.p);
        worst = worst.max((lhs - rhs).abs());
        lines.push(format!(
            "t={t:5.1}: spectrum moment {lhs:9.4} vs spatial variance {rhs:9.4} (ratio {:.4})",
            if rhs != 0.0 { lhs / rhs } else { f64::NAN }
        ));
    }
    for line in &lines {
        println!("  {line}");
    }
    report(
        "criterion 5: variance identity",
        worst <= 1e-3,
        format!("max |sum n^2 Q_n - spatial variance| = {worst:.4} (tolerance 1e-3)"),
    );
}

#[test]
fn criterion_06_trotter_kernel_oracle() {
    let sp = spec(8, 0.7, 0.5, 1.0);
    let mut rng = SeedPlan::new(20).state_rng(0, 0);
    let s0 = random_sector_state(8, 4, 3, &mut rng).unwrap();
    let t = 20.0;
    let exact = exact_evolve_reference(&sp, &s0, t).unwrap();
    let max_err = |dt: f64| -> f64 {
        let mut s = s0.clone();
        let plan = TrotterPlan::new(dt).unwrap();
        evolve(&mut s, &sp, t, &plan, Direction::Forward).unwrap();
        s.amp
            .iter()
            .zip(exact.amp.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    };
    let e1 = max_err(0.01);
    let e2 = max_err(0.005);
    report(
        "criterion 6: Trotter kernel against the exact propagator",
        e1 <= 1e-3 && e1 / e2 >= 3.5,
        format!(
            "max amplitude error {e1:.3e} at dt=0.01 (<= 1e-3); halving dt shrinks it {:.2}x (>= 3.5)",
            e1 / e2
        ),
    );
}

#[test]
fn criterion_07_quantum_parallelism() {
    // N = 10 with half filling (5 up spins); the exact ensemble average is
    // the trace over the excited projector, computed from the dense sector
    // eigensystem.
    let n = 10;
    let site = 4;
    let ups = 5u32;
    let sp = spec(n, 0.9, 0.3, 1.7);
    let times = [1.0, 10.0, 50.0];

    // exact: evolve every excited basis state and average
    let basis = SectorBasis::new(n, ups);
    let h = SectorHamiltonian::new(&sp, basis);
    let eig = linalg::symmetric_eigen(&h.to_dense(), h.dim()).unwrap();
    let image: Vec<usize> = h
        .basis
        .masks
        .iter()
        .enumerate()
        .filter(|(_, &m)| m >> site & 1 == 1)
        .map(|(i, _)| i)
        .collect();
    let exact_mag = |t: f64| -> Vec<f64> {
        let mut acc = vec![0.0f64; n];
        for &col in &image {
            let mut x = vec![Complex64::new(0.0, 0.0); h.dim()];
            x[col] = Complex64::new(1.0, 0.0);
            let evolved = manybody::eigen_apply_exp(&eig, &x, t);
            for (i, &mask) in h.basis.masks.iter().enumerate() {
                let w = evolved[i].norm_sqr();
                for (bit, a) in acc.iter_mut().enumerate() {
                    let sz = if mask >> bit & 1 == 1 { 0.5 } else { -0.5 };
                    *a += w * sz;
                }
            }
        }
        acc.iter().map(|a| a / image.len() as f64).collect()
    };

    // random-state estimates over 20 seeds
    let n_seeds = 20;
    let mut estimates: Vec<Vec<Vec<f64>>> = vec![Vec::new(); times.len()];
    for seed in 0..n_seeds {
        let mut rng = SeedPlan::new(400 + seed).state_rng(0, 0);
        let mut state = random_sector_state(n, ups, site, &mut rng).unwrap();
        let mut evolver = Evolver::exact(sp);
        let mut now = 0.0;
        for (ti, &t) in times.iter().enumerate() {
            evolver.advance(&mut state, t - now, Direction::Forward).unwrap();
            now = t;
            estimates[ti].push(local_magnetization(&state));
        }
    }

    let mut worst_z = 0.0f64;
    for (ti, &t) in times.iter().enumerate() {
        let exact = exact_mag(t);
        for site_idx in 0..n {
            let vals: Vec<f64> = estimates[ti].iter().map(|m| m[site_idx]).collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                / (vals.len() - 1) as f64;
            let sem = (var / vals.len() as f64).sqrt().max(1e-12);
            worst_z = worst_z.max((mean - exact[site_idx]).abs() / sem);
        }
    }
    report(
        "criterion 7: quantum parallelism validity",
        worst_z <= 3.0,
        format!(
            "random-state <S^z_n(t)> over {n_seeds} seeds vs exact sector average: \
             worst deviation {worst_z:.2} standard errors (<= 3) at t in {{1, 10, 50}}"
        ),
    );
}

/// Disorder-and-seed averaged asymptotic S^2 on a W grid at fixed U, N=13.
/// Seeds stay inside realizations: site profiles are averaged over seeds
/// before squaring, realizations averaged afterwards.
fn s2_vs_w(
    w_values: &[f64],
    u: f64,
    n_realizations: usize,
    n_seeds: usize,
    seed: u64,
) -> analysis::EnsembleCurve {
    let n = 13;
    let site = 6;
    let ups = 7u32;
    let sample_times: Vec<f64> = (0..24)
        .map(|i| 250.0 + 250.0 * (i as f64 + 0.5) / 24.0)
        .collect();
    let plan = SeedPlan::new(seed);
    let mut curves = Vec::new();
    for r in 0..n_realizations {
        let base = ChainSpec::new(n, 1.0, w_values[0], u).unwrap();
        let set = zoge_sim::model::RealizationSet::sample(base, n_realizations, seed).unwrap();
        let mut row = Vec::with_capacity(w_values.len());
        for &w in w_values {
            let sp = ChainSpec::new(n, 1.0, w, u)
                .unwrap()
                .with_phase(set.phases[r]);
            let mut evolver = Evolver::exact(sp);
            let states: Vec<_> = (0..n_seeds)
                .map(|s| {
                    let mut rng = plan.state_rng(r, s);
                    random_sector_state(n, ups, site, &mut rng).unwrap()
                })
                .collect();
            let trace =
                zoge::ensemble_polarization_trace(&mut evolver, &states, site, &sample_times)
                    .unwrap();
            let series: Vec<f64> = trace.iter().map(|p| p.s2).collect();
            row.push(series.iter().sum::<f64>() / series.len() as f64);
        }
        curves.push(row);
    }
    analysis::disorder_average(w_values, &curves, "asymptotic S2").unwrap()
}

#[test]
fn criterion_08_interaction_shifts_the_transition() {
    let start = std::time::Instant::now();
    let w_values: Vec<f64> = (0..12).map(|i| 0.5 + 0.1 * i as f64).collect();
    let u_values = [0.0, 0.02, 0.05, 0.1, 0.2];
    let mut uppers = Vec::new();
    for &u in &u_values {
        let curve = s2_vs_w(&w_values, u, 10, 4, 7);
        let (upper, _err) = analysis::upper_critical_bound(&curve, Some(5)).unwrap();
        uppers.push(upper);
    }
    let non_decreasing = uppers.windows(2).all(|p| p[1] >= p[0]);
    let increase = uppers[uppers.len() - 1] - uppers[0];
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "criterion 8: interaction shifts the transition",
        non_decreasing && increase >= 0.1,
        format!(
            "upper-bound critical W per U {u_values:?}: {uppers:.4?}; \
             non-decreasing: {non_decreasing}, increase U=0 -> 0.2 is {increase:.3} (>= 0.1); {elapsed:.0} s"
        ),
    );
}

#[test]
fn criterion_09_exponent_crossover() {
    let n = 13;
    let site = 6;
    let ups = 7u32;
    let u = 1.4;
    let w_values = [0.6, 1.0, 1.4, 2.0];
    let n_realizations = 8;
    let n_seeds = 4;
    let times: Vec<f64> = (0..56)
        .map(|i| 2.0 * (500.0f64 / 2.0).powf(i as f64 / 55.0))
        .collect();
    let plan = SeedPlan::new(3);

    let mut alphas = Vec::new();
    let mut agree = true;
    let mut details = Vec::new();
    for &w in &w_values {
        let base = ChainSpec::new(n, 1.0, w, u).unwrap();
        let set =
            zoge_sim::model::RealizationSet::sample(base, n_realizations, 3).unwrap();
        let mut s2_acc = vec![0.0f64; times.len()];
        let mut p00_acc = vec![0.0f64; times.len()];
        for r in 0..n_realizations {
            let sp = set.spec(r);
            let mut evolver = Evolver::exact(sp);
            // seeds inside realizations: the magnetization profiles are
            // averaged before squaring
            let states: Vec<_> = (0..n_seeds)
                .map(|s| {
                    let mut rng = plan.state_rng(r, s);
                    random_sector_state(n, ups, site, &mut rng).unwrap()
                })
                .collect();
            let trace =
                zoge::ensemble_polarization_trace(&mut evolver, &states, site, &times).unwrap();
            for (i, snap) in trace.iter().enumerate() {
                s2_acc[i] += snap.s2;
                p00_acc[i] += snap.p00;
            }
        }
        for v in s2_acc.iter_mut().chain(p00_acc.iter_mut()) {
            *v /= n_realizations as f64;
        }
        let fit_s2 = analysis::fit_power_law(&times, &s2_acc, (10.0, 500.0)).unwrap();
        let fit_p00 = analysis::fit_power_law(&times, &p00_acc, (10.0, 500.0)).unwrap();
        agree &= (fit_s2.alpha - fit_p00.alpha).abs() <= 0.1;
        details.push(format!(
            "W={w}: alpha_S2={:.3}+-{:.3}, alpha_P00={:.3}+-{:.3}",
            fit_s2.alpha, fit_s2.stderr, fit_p00.alpha, fit_p00.stderr
        ));
        alphas.push((fit_s2.alpha, fit_s2.stderr, fit_p00.stderr));
    }
    // monotonic decrease within error bars
    let mut monotone = true;
    for pair in alphas.windows(2) {
        let (a1, e1, _) = pair[0];
        let (a2, e2, _) = pair[1];
        monotone &= a2 <= a1 + e1 + e2;
    }
    report(
        "criterion 9: exponent crossover",
        agree && monotone,
        format!(
            "{}; S2/P00 agreement within 0.1: {agree}; decreasing within errors: {monotone}",
            details.join("; ")
        ),
    );
}

#[test]
fn criterion_10_fit_layer_self_tests() {
    use rand_chacha::rand_core::SeedableRng;
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(77);

    // split Pearson VII round trip at 0.1% noise
    let truth = [1.8, 1.05, 0.22, 1.3, 0.35, 1.7];
    let x: Vec<f64> = (0..260).map(|i| i as f64 * 0.01).collect();
    let y: Vec<f64> = x
        .iter()
        .map(|&v| analysis::pearson7_split(v, &truth) * (1.0 + 0.001 * (rng.gen::<f64>() - 0.5)))
        .collect();
    let fit = analysis::fit_split_pearson7(&x, &y, None).unwrap();
    let pearson_ok = fit
        .params
        .iter()
        .zip(truth.iter())
        .all(|(got, want)| ((got - want) / want).abs() < 0.02);

    // power-law recovery within 0.02
    let mut power_ok = true;
    let mut power_detail = Vec::new();
    for &alpha in &[0.1, 0.5, 1.0] {
        let t: Vec<f64> = (0..240).map(|i| 10.0 * 1.03f64.powi(i)).collect();
        let v: Vec<f64> = t
            .iter()
            .map(|x| x.powf(-alpha) * (1.0 + 0.05 * (2.0 * rng.gen::<f64>() - 1.0)))
            .collect();
        let f = analysis::fit_power_law(&t, &v, (10.0, 5000.0)).unwrap();
        power_ok &= (f.alpha - alpha).abs() < 0.02;
        power_detail.push(format!("{alpha}->{:.4}", f.alpha));
    }

    // bound ordering on a freshly generated physics dataset
    let w_values: Vec<f64> = (0..25).map(|i| 0.4 + 0.05 * i as f64).collect();
    let curve = q0_curve(101, &w_values, 6, 9, 50, 200);
    let bounds = analysis::critical_bounds(&curve).unwrap();
    let ordered = bounds.w_lower <= bounds.w_upper;

    report(
        "criterion 10: fit-layer self-tests",
        pearson_ok && power_ok && ordered,
        format!(
            "Pearson recovery within 2%: {pearson_ok}; power-law {} within 0.02: {power_ok}; \
             bracket ordering [{:.3} <= {:.3}]: {ordered}",
            power_detail.join(", "),
            bounds.w_lower,
            bounds.w_upper
        ),
    );
}
