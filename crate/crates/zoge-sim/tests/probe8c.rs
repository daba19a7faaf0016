// temporary probe: convergence of the upper bound at the two smallest U
use zoge_sim::analysis;
use zoge_sim::manybody::{random_sector_state, Evolver};
use zoge_sim::model::ChainSpec;
use zoge_sim::rng::SeedPlan;
use zoge_sim::zoge;

fn rows(u: f64, n_real: usize, n_seeds: usize, samples: usize, w_values: &[f64]) -> Vec<Vec<f64>> {
    let n = 13;
    let site = 6;
    let ups = 7u32;
    let sample_times: Vec<f64> = (0..samples)
        .map(|i| 250.0 + 250.0 * (i as f64 + 0.5) / samples as f64)
        .collect();
    let plan = SeedPlan::new(7);
    let base = ChainSpec::new(n, 1.0, 0.5, u).unwrap();
    let set = zoge_sim::model::RealizationSet::sample(base, n_real, 7).unwrap();
    (0..n_real)
        .map(|r| {
            w_values
                .iter()
                .map(|&w| {
                    let sp = ChainSpec::new(n, 1.0, w, u).unwrap().with_phase(set.phases[r]);
                    let mut evolver = Evolver::exact(sp);
                    let states: Vec<_> = (0..n_seeds)
                        .map(|s| {
                            let mut rng = plan.state_rng(r, s);
                            random_sector_state(n, ups, site, &mut rng).unwrap()
                        })
                        .collect();
                    let trace = zoge::ensemble_polarization_trace(
                        &mut evolver,
                        &states,
                        site,
                        &sample_times,
                    )
                    .unwrap();
                    trace.iter().map(|p| p.s2).sum::<f64>() / trace.len() as f64
                })
                .collect()
        })
        .collect()
}

#[test]
#[ignore]
fn probe_small_u_bounds() {
    let w_values: Vec<f64> = (0..15).map(|i| 0.4 + 0.1 * i as f64).collect();
    for &u in &[0.0, 0.02, 0.05] {
        let all = rows(u, 24, 4, 48, &w_values);
        for &take in &[12usize, 24] {
            let curve =
                analysis::disorder_average(&w_values, &all[..take], "probe").unwrap();
            for &(window, label) in &[(Some(5usize), "smooth5"), (None, "raw")] {
                match analysis::upper_critical_bound(&curve, window) {
                    Ok((upper, _)) => {
                        println!("U={u} r={take} {label}: w_upper={upper:.4}")
                    }
                    Err(e) => println!("U={u} r={take} {label}: ERROR {e}"),
                }
            }
        }
    }
}
