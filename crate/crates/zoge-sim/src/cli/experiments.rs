//! Experiment drivers: each expands its config into ordered tasks, runs
//! them on the worker pool, and reduces in a fixed order so identical
//! configs reproduce identical bytes regardless of scheduling.

use super::config::*;
use crate::analysis;
use crate::error::{Error, Result};
use crate::io;
use crate::manybody::{
    random_equilibrium_state, raise_at, uniform_equilibrium_state, Evolver, ManyBodyState,
};
use crate::onebody;
use crate::rng::SeedPlan;
use crate::zoge;
use rayon::prelude::*;
use std::path::{Path, PathBuf};

/// What one experiment produced.
#[derive(Debug, Default)]
pub struct ExperimentOutput {
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
    pub tasks: usize,
    pub failures: Vec<String>,
}

impl ExperimentOutput {
    fn file(&mut self, path: PathBuf) {
        self.files.push(path);
    }
}

pub fn run_onebody_sweep(cfg: &OnebodySweepConfig, dir: &Path) -> Result<ExperimentOutput> {
    let w_values = cfg.w.values();
    let base = cfg.chain.base_spec(w_values[0], 0.0)?;
    let set = cfg.realizations.phases(base, cfg.chain.seed)?;
    let site = cfg.excite.resolve(cfg.chain.n_sites)?;

    // tasks in (w, realization) lexicographic order
    let tasks: Vec<(usize, usize)> = w_values
        .iter()
        .enumerate()
        .flat_map(|(wi, _)| (0..set.len()).map(move |r| (wi, r)))
        .collect();
    let results: Vec<Result<(f64, f64)>> = tasks
        .par_iter()
        .map(|&(wi, r)| {
            let spec = cfg
                .chain
                .base_spec(w_values[wi], 0.0)?
                .with_phase(set.phases[r]);
            let sol = onebody::diagonalize(&onebody::build_onebody_hamiltonian(&spec)?)?;
            let horizon = 10.0 * spec.n_sites as f64 / spec.j;
            let times: Vec<f64> = (0..cfg.samples)
                .map(|s| horizon / 2.0 + horizon / 2.0 * (s as f64 + 0.5) / cfg.samples as f64)
                .collect();
            let series = onebody::ipr_series(&sol, site, &times)?;
            analysis::time_average_equilibrium(&times, &series, 0.0)
        })
        .collect();

    let mut out = ExperimentOutput {
        tasks: tasks.len(),
        ..Default::default()
    };
    let mut rows = Vec::new();
    let mut per_realization: Vec<Vec<f64>> = vec![vec![f64::NAN; w_values.len()]; set.len()];
    for (&(wi, r), res) in tasks.iter().zip(results.into_iter()) {
        match res {
            Ok((q0, err)) => {
                rows.push(vec![w_values[wi], set.phases[r], q0, err]);
                per_realization[r][wi] = q0;
            }
            Err(e) => out
                .failures
                .push(format!("w={} phi={}: {e}", w_values[wi], set.phases[r])),
        }
    }
    let path = dir.join("q0_vs_w.csv");
    io::write_csv(&path, "w,phi,q0,q0_stderr", &rows)?;
    out.file(path);

    if out.failures.is_empty() && set.len() >= 2 {
        let curve = analysis::disorder_average(
            &w_values,
            &per_realization,
            "equilibrium Q0 over disorder phases",
        )?;
        let mean_rows: Vec<Vec<f64>> = (0..w_values.len())
            .map(|i| {
                vec![
                    curve.x[i],
                    curve.mean[i],
                    curve.stderr[i],
                    curve.n_realizations as f64,
                ]
            })
            .collect();
        let path = dir.join("q0_mean.csv");
        io::write_csv(&path, "w,q0_mean,q0_stderr,n_realizations", &mean_rows)?;
        out.file(path);
        out.summary.push(format!(
            "{} W points x {} realizations averaged",
            w_values.len(),
            set.len()
        ));
    }
    Ok(out)
}

pub fn run_ldos(cfg: &LdosConfig, dir: &Path) -> Result<ExperimentOutput> {
    let spec = cfg.chain.base_spec(cfg.w, 0.0)?.with_phase(cfg.phi);
    let site = cfg.site.resolve(cfg.chain.n_sites)?;
    let (grid, eta_default) = onebody::ldos_default_grid(&spec);
    let eta = cfg.eta.unwrap_or(eta_default);
    let grid: Vec<f64> = if cfg.grid_points == grid.len() {
        grid
    } else {
        let (lo, hi) = (grid[0], grid[grid.len() - 1]);
        (0..cfg.grid_points)
            .map(|i| lo + (hi - lo) * i as f64 / (cfg.grid_points - 1) as f64)
            .collect()
    };
    let ldos = onebody::ldos_decimation(&spec, site, &grid, eta)?;

    let mut out = ExperimentOutput {
        tasks: 1,
        ..Default::default()
    };
    let rows: Vec<Vec<f64>> = grid.iter().zip(ldos.iter()).map(|(&e, &l)| vec![e, l]).collect();
    let path = dir.join("ldos.csv");
    io::write_csv(&path, "energy,ldos", &rows)?;
    out.file(path);

    let sol = onebody::diagonalize(&onebody::build_onebody_hamiltonian(&spec)?)?;
    let threshold = cfg.edge_threshold_factor * onebody::default_edge_threshold(&sol) / 5.0;
    let report = onebody::edge_state_report(&sol, threshold)?;
    let iprs = onebody::ipr_eigenstates(&sol);
    let report_rows: Vec<Vec<f64>> = (0..sol.n_sites)
        .map(|k| {
            let rec = report.iter().find(|r| r.k == k);
            let center: f64 = sol
                .eigenvector(k)
                .iter()
                .enumerate()
                .map(|(i, &a)| i as f64 * a * a)
                .sum();
            vec![
                k as f64,
                sol.energies[k],
                iprs[k],
                center,
                rec.map_or(0.0, |r| if r.edge { 1.0 } else { 0.0 }),
            ]
        })
        .collect();
    let path = dir.join("eigen_report.csv");
    io::write_csv(&path, "k,energy,ipr_k,center,edge_flag", &report_rows)?;
    out.file(path);
    out.summary.push(format!(
        "{} localized states above threshold, {} flagged at the edges",
        report.len(),
        report.iter().filter(|r| r.edge).count()
    ));
    Ok(out)
}

/// (equilibrium state, excited state) for one (realization, seed) cell.
fn build_states(
    n_sites: usize,
    ups: u32,
    site: usize,
    exact_state: bool,
    seed_plan: SeedPlan,
    realization: usize,
    seed_index: usize,
) -> Result<(ManyBodyState, ManyBodyState)> {
    let mut eq = if exact_state {
        uniform_equilibrium_state(n_sites, ups, site)?
    } else {
        let mut rng = seed_plan.state_rng(realization, seed_index);
        random_equilibrium_state(n_sites, ups, site, &mut rng)?
    };
    eq.lineage = vec![seed_plan.base, realization as u64, seed_index as u64];
    let excited = raise_at(&eq, site)?;
    Ok((eq, excited))
}

pub fn run_zoge(cfg: &ZogeConfig, dir: &Path) -> Result<ExperimentOutput> {
    let n = cfg.chain.n_sites;
    let ups = cfg.ups.unwrap_or_else(|| default_ups(n, cfg.exact_state));
    let site = cfg.excite.resolve(n)?;
    let n_phi = cfg.n_phi.unwrap_or_else(|| zoge::default_n_phi(n));
    let times = cfg.times.values();
    let base = cfg.chain.base_spec(cfg.w, cfg.u)?;
    let set = cfg.realizations.phases(base, cfg.chain.seed)?;
    let seeds = if cfg.exact_state { 1 } else { cfg.seeds };
    let method = cfg.evolution.to_method()?;
    let seed_plan = SeedPlan::new(cfg.chain.seed);

    let tasks: Vec<(usize, usize)> = (0..set.len())
        .flat_map(|r| (0..seeds).map(move |s| (r, s)))
        .collect();

    // per task: matrix of Q_n over (time, n) plus per-time residuals.
    // Exact mode evaluates the two-branch ladder echo on the all-down
    // equilibrium state (noise-free, single-excitation sector); random mode
    // evaluates the z-z correlator on fully random thermal states.
    type TaskData = (Vec<Vec<f64>>, Vec<f64>);
    let results: Vec<Result<TaskData>> = tasks
        .par_iter()
        .map(|&(r, s)| {
            let spec = set.spec(r);
            let mut evolver = Evolver::new(spec, method);
            let mut q_rows = Vec::with_capacity(times.len());
            let mut residuals = Vec::with_capacity(times.len());
            if cfg.exact_state {
                let (eq, _) = build_states(n, ups, site, true, seed_plan, r, s)?;
                for &t in &times {
                    let record = zoge::zoge_record(&mut evolver, &eq, site, t, n_phi)?;
                    residuals.push(record.imag_residual);
                    q_rows.push(record.q);
                }
            } else {
                let mut rng = seed_plan.state_rng(r, s);
                let mut psi = crate::manybody::random_thermal_state(n, &mut rng)?;
                psi.lineage = vec![seed_plan.base, r as u64, s as u64];
                for &t in &times {
                    let echo = zoge::echo_phase_scan_zz(&mut evolver, &psi, site, t, n_phi)?;
                    let record = zoge::zoge_spectrum(&echo, t)?;
                    residuals.push(record.imag_residual);
                    q_rows.push(record.q);
                }
            }
            Ok((q_rows, residuals))
        })
        .collect();

    let mut out = ExperimentOutput {
        tasks: tasks.len(),
        ..Default::default()
    };
    let mut ok: Vec<TaskData> = Vec::new();
    for (&(r, s), res) in tasks.iter().zip(results.into_iter()) {
        match res {
            Ok(d) => ok.push(d),
            Err(e) => out.failures.push(format!("realization={r} seed={s}: {e}")),
        }
    }
    if ok.is_empty() {
        return Err(Error::invalid("every echo task failed"));
    }

    let k = (n_phi as i64 - 1) / 2;
    let mut rows = Vec::new();
    let mut summary_rows = Vec::new();
    for (ti, &t) in times.iter().enumerate() {
        let residual = ok.iter().map(|d| d.1[ti]).fold(0.0, f64::max);
        let mean_q: Vec<f64> = (0..n_phi)
            .map(|qi| ok.iter().map(|d| d.0[ti][qi]).sum::<f64>() / ok.len() as f64)
            .collect();
        for (qi, &q) in mean_q.iter().enumerate() {
            rows.push(vec![t, (qi as i64 - k) as f64, q, residual]);
        }
        let q0 = mean_q[k as usize];
        let sum: f64 = mean_q.iter().sum();
        let second: f64 = mean_q
            .iter()
            .enumerate()
            .map(|(qi, &q)| q * ((qi as i64 - k) * (qi as i64 - k)) as f64)
            .sum();
        summary_rows.push(vec![t, q0, sum, second, residual]);
    }
    let run_id = io::content_hash(&serde_json::to_vec(cfg).expect("config serializes"));
    let path = dir.join(format!("zoge_{run_id}.csv"));
    io::write_csv(&path, "t,n,q_n,imag_residual", &rows)?;
    out.file(path);
    let path = dir.join(format!("zoge_summary_{run_id}.csv"));
    io::write_csv(&path, "t,q0,sum_rule,second_moment,imag_residual", &summary_rows)?;
    out.file(path);
    out.summary.push(format!(
        "{} times x {n_phi} kick angles x {} tasks; 2 evolutions per echo",
        times.len(),
        ok.len()
    ));
    Ok(out)
}

pub fn run_s2_dynamics(cfg: &S2DynamicsConfig, dir: &Path) -> Result<ExperimentOutput> {
    let n = cfg.chain.n_sites;
    let ups = cfg.ups.unwrap_or_else(|| default_ups(n, cfg.exact_state));
    let site = cfg.excite.resolve(n)?;
    let times = cfg.times.values();
    let base = cfg.chain.base_spec(cfg.w, cfg.u)?;
    let set = cfg.realizations.phases(base, cfg.chain.seed)?;
    let seeds = if cfg.exact_state { 1 } else { cfg.seeds };
    let method = cfg.evolution.to_method()?;
    let seed_plan = SeedPlan::new(cfg.chain.seed);
    let task_dir = dir.join("tasks");
    io::ensure_dir(&task_dir)?;

    let tasks: Vec<(usize, usize)> = (0..set.len())
        .flat_map(|r| (0..seeds).map(move |s| (r, s)))
        .collect();

    let results: Vec<Result<Vec<Vec<f64>>>> = tasks
        .par_iter()
        .map(|&(r, s)| {
            let task_file = task_dir.join(format!("s2_r{r}_s{s}.csv"));
            // completed task outputs are reused on resume
            if task_file.exists() {
                let (_, rows) = io::read_csv(&task_file)?;
                if rows.len() == times.len() {
                    return Ok(rows);
                }
            }
            let spec = set.spec(r);
            let (_, psi0) = build_states(n, ups, site, cfg.exact_state, seed_plan, r, s)?;
            let mut evolver = Evolver::new(spec, method);
            let trace = zoge::polarization_trace(&mut evolver, &psi0, site, &times)?;
            let rows: Vec<Vec<f64>> = trace
                .iter()
                .map(|snap| {
                    let mut row = vec![snap.t, snap.s2, snap.p00];
                    row.extend_from_slice(&snap.p);
                    row
                })
                .collect();
            io::write_csv(&task_file, &s2_header(n), &rows)?;
            Ok(rows)
        })
        .collect();

    let mut out = ExperimentOutput {
        tasks: tasks.len(),
        ..Default::default()
    };
    let mut ok = Vec::new();
    for (&(r, s), res) in tasks.iter().zip(results.into_iter()) {
        match res {
            Ok(rows) => ok.push(rows),
            Err(e) => out.failures.push(format!("realization={r} seed={s}: {e}")),
        }
    }
    if ok.is_empty() {
        return Err(Error::invalid("every dynamics task failed"));
    }

    let cols = 3 + n;
    let mean_rows: Vec<Vec<f64>> = (0..times.len())
        .map(|ti| {
            (0..cols)
                .map(|c| {
                    if c == 0 {
                        times[ti]
                    } else {
                        ok.iter().map(|rows| rows[ti][c]).sum::<f64>() / ok.len() as f64
                    }
                })
                .collect()
        })
        .collect();
    let run_id = io::content_hash(&serde_json::to_vec(cfg).expect("config serializes"));
    let path = dir.join(format!("s2_{run_id}.csv"));
    io::write_csv(&path, &s2_header(n), &mean_rows)?;
    out.file(path);

    // realization/seed dispersion of the two headline observables
    let stat_rows: Vec<Vec<f64>> = (0..times.len())
        .map(|ti| {
            let s2: Vec<f64> = ok.iter().map(|rows| rows[ti][1]).collect();
            let p00: Vec<f64> = ok.iter().map(|rows| rows[ti][2]).collect();
            vec![
                times[ti],
                mean(&s2),
                stderr(&s2),
                mean(&p00),
                stderr(&p00),
            ]
        })
        .collect();
    let path = dir.join(format!("s2_stats_{run_id}.csv"));
    io::write_csv(&path, "t,s2_mean,s2_stderr,p00_mean,p00_stderr", &stat_rows)?;
    out.file(path);
    out.summary
        .push(format!("{} trajectories over {} times", ok.len(), times.len()));
    Ok(out)
}

fn s2_header(n: usize) -> String {
    let mut h = String::from("t,s2,p00");
    for i in 0..n {
        h.push_str(&format!(",p_{i}"));
    }
    h
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn stderr(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
    (var / v.len() as f64).sqrt()
}

pub fn run_phase_diagram(cfg: &PhaseDiagramConfig, dir: &Path) -> Result<ExperimentOutput> {
    let n = cfg.chain.n_sites;
    let ups = cfg.ups.unwrap_or_else(|| default_ups(n, false));
    let site = cfg.excite.resolve(n)?;
    let w_values = cfg.w.values();
    let u_values = cfg.u.values();
    let method = cfg.evolution.to_method()?;
    let seed_plan = SeedPlan::new(cfg.chain.seed);
    let task_dir = dir.join("tasks");
    io::ensure_dir(&task_dir)?;

    // equilibrium window: latter half of the horizon
    let sample_times: Vec<f64> = (0..cfg.samples)
        .map(|i| cfg.t_max / 2.0 + cfg.t_max / 2.0 * (i as f64 + 0.5) / cfg.samples as f64)
        .collect();

    // one task per (w, u, realization); seeds stay inside the task so the
    // sector propagator is shared
    let n_real = cfg.realizations.count();
    let tasks: Vec<(usize, usize, usize)> = w_values
        .iter()
        .enumerate()
        .flat_map(|(wi, _)| {
            let u_len = u_values.len();
            (0..u_len).flat_map(move |ui| (0..n_real).map(move |r| (wi, ui, r)))
        })
        .collect();

    let results: Vec<Result<f64>> = tasks
        .par_iter()
        .map(|&(wi, ui, r)| {
            let task_file = task_dir.join(format!("pd_w{wi}_u{ui}_r{r}.csv"));
            if task_file.exists() {
                let (_, rows) = io::read_csv(&task_file)?;
                if rows.len() == 1 && rows[0].len() == 1 {
                    return Ok(rows[0][0]);
                }
            }
            let base = cfg.chain.base_spec(w_values[wi], u_values[ui])?;
            let set = cfg.realizations.phases(base, cfg.chain.seed)?;
            let spec = set.spec(r);
            let mut evolver = Evolver::new(spec, method);
            let mut seed_means = Vec::with_capacity(cfg.seeds);
            for s in 0..cfg.seeds {
                let (_, psi0) = build_states(n, ups, site, false, seed_plan, r, s)?;
                let trace = zoge::polarization_trace(&mut evolver, &psi0, site, &sample_times)?;
                let series: Vec<f64> = trace.iter().map(|p| p.s2).collect();
                seed_means.push(mean(&series));
            }
            let value = mean(&seed_means);
            io::write_csv(&task_file, "s2", &[vec![value]])?;
            Ok(value)
        })
        .collect();

    let mut out = ExperimentOutput {
        tasks: tasks.len(),
        ..Default::default()
    };
    let n_w = w_values.len();
    let mut cell_values: Vec<Vec<f64>> = vec![Vec::new(); n_w * u_values.len()];
    for (&(wi, ui, r), res) in tasks.iter().zip(results.into_iter()) {
        match res {
            Ok(v) => cell_values[ui * n_w + wi].push(v),
            Err(e) => out.failures.push(format!(
                "w={} u={} realization={r}: {e}",
                w_values[wi], u_values[ui]
            )),
        }
    }

    let mut s2 = vec![f64::NAN; cell_values.len()];
    let mut s2_err = vec![f64::NAN; cell_values.len()];
    let mut rows = Vec::new();
    for ui in 0..u_values.len() {
        for wi in 0..n_w {
            let cell = &cell_values[ui * n_w + wi];
            if !cell.is_empty() {
                s2[ui * n_w + wi] = mean(cell);
                s2_err[ui * n_w + wi] = stderr(cell);
            }
            rows.push(vec![
                w_values[wi],
                u_values[ui],
                s2[ui * n_w + wi],
                s2_err[ui * n_w + wi],
            ]);
        }
    }
    let path = dir.join("phase_diagram.csv");
    io::write_csv(&path, "w,u,s2_mean,s2_err", &rows)?;
    out.file(path);

    let diagram = analysis::PhaseDiagram {
        w: w_values.clone(),
        u: u_values.clone(),
        s2,
        s2_err,
    };

    let mut bound_rows = Vec::new();
    for (ui, &u) in u_values.iter().enumerate() {
        match analysis::critical_bounds(&diagram.w_slice(ui)) {
            Ok(b) => bound_rows.push(vec![u, b.w_lower, b.w_lower_err, b.w_upper, b.w_upper_err]),
            Err(e) => out
                .summary
                .push(format!("critical bounds unavailable at u={u}: {e}")),
        }
    }
    let path = dir.join("critical_bounds.csv");
    io::write_csv(
        &path,
        "u,w_lower,w_lower_err,w_upper,w_upper_err",
        &bound_rows,
    )?;
    out.file(path);

    // contour through the non-interacting critical point
    if let Some(level) = diagram.interpolate_w(0, 1.0) {
        let crossings = analysis::contour_crossings(&diagram, level);
        let contour_rows: Vec<Vec<f64>> = crossings
            .iter()
            .map(|&(u, w)| vec![u, w.unwrap_or(f64::NAN)])
            .collect();
        if crossings.iter().any(|(_, w)| w.is_none()) {
            out.summary.push("contour is partial (some U rows never cross)".into());
        }
        let path = dir.join("contour.csv");
        io::write_csv(&path, "u,w_contour", &contour_rows)?;
        out.file(path);
    }
    out.summary.push(format!(
        "{} x {} grid, {} realizations x {} seeds per cell",
        n_w,
        u_values.len(),
        cfg.realizations.count(),
        cfg.seeds
    ));
    Ok(out)
}

pub fn run_fit_critical(cfg: &FitCriticalConfig, dir: &Path) -> Result<ExperimentOutput> {
    let (names, rows) = io::read_csv(&cfg.input)?;
    let xi = io::column(&names, &cfg.x_column)?;
    let yi = io::column(&names, &cfg.y_column)?;
    let curve = analysis::EnsembleCurve {
        x: rows.iter().map(|r| r[xi]).collect(),
        mean: rows.iter().map(|r| r[yi]).collect(),
        stderr: vec![0.0; rows.len()],
        n_realizations: 0,
        meta: format!("from {}", cfg.input.display()),
    };
    let mut out = ExperimentOutput {
        tasks: 1,
        ..Default::default()
    };
    let bounds = match analysis::critical_bounds(&curve) {
        Ok(b) => b,
        Err(e) => {
            out.failures.push(format!("no transition located: {e}"));
            return Ok(out);
        }
    };
    let path = dir.join("critical_bounds.csv");
    io::write_csv(
        &path,
        "w_lower,w_lower_err,w_upper,w_upper_err,raw_argmax_d2,raw_argmax_d1",
        &[vec![
            bounds.w_lower,
            bounds.w_lower_err,
            bounds.w_upper,
            bounds.w_upper_err,
            bounds.raw_argmax_d2,
            bounds.raw_argmax_d1,
        ]],
    )?;
    out.file(path);
    out.summary.push(format!(
        "critical bracket [{:.4} +- {:.4}, {:.4} +- {:.4}]",
        bounds.w_lower, bounds.w_lower_err, bounds.w_upper, bounds.w_upper_err
    ));
    Ok(out)
}

pub fn run_fit_alpha(cfg: &FitAlphaConfig, dir: &Path) -> Result<ExperimentOutput> {
    let (names, rows) = io::read_csv(&cfg.input)?;
    let ti = io::column(&names, "t")?;
    let s2i = io::column(&names, "s2").or_else(|_| io::column(&names, "s2_mean"))?;
    let p00i = io::column(&names, "p00").or_else(|_| io::column(&names, "p00_mean"))?;
    let t: Vec<f64> = rows.iter().map(|r| r[ti]).collect();
    let s2: Vec<f64> = rows.iter().map(|r| r[s2i]).collect();
    let p00: Vec<f64> = rows.iter().map(|r| r[p00i]).collect();

    let window = (cfg.window_lo, cfg.window_hi);
    let fit_s2 = analysis::fit_power_law(&t, &s2, window)?;
    let fit_p00 = analysis::fit_power_law(&t, &p00, window)?;
    // window sensitivity: shrink either end by a factor 2
    let sens = |v: &[f64], alpha: f64| -> f64 {
        let mut worst: f64 = 0.0;
        for w in [
            (cfg.window_lo * 2.0, cfg.window_hi),
            (cfg.window_lo, cfg.window_hi / 2.0),
        ] {
            if let Ok(f) = analysis::fit_power_law(&t, v, w) {
                worst = worst.max((f.alpha - alpha).abs());
            }
        }
        worst
    };
    let mut out = ExperimentOutput {
        tasks: 1,
        ..Default::default()
    };
    let path = dir.join("alpha.csv");
    io::write_csv(
        &path,
        "u,w,alpha_s2,alpha_s2_err,alpha_p00,alpha_p00_err,window_lo,window_hi,sens_s2,sens_p00",
        &[vec![
            cfg.u,
            cfg.w,
            fit_s2.alpha,
            fit_s2.stderr,
            fit_p00.alpha,
            fit_p00.stderr,
            cfg.window_lo,
            cfg.window_hi,
            sens(&s2, fit_s2.alpha),
            sens(&p00, fit_p00.alpha),
        ]],
    )?;
    out.file(path);
    out.summary.push(format!(
        "alpha(S2) = {:.4} +- {:.4}, alpha(P00) = {:.4} +- {:.4}",
        fit_s2.alpha, fit_s2.stderr, fit_p00.alpha, fit_p00.stderr
    ));
    Ok(out)
}
