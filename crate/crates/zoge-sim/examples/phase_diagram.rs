//! Asymptotic S^2 over the (W, U) plane: the localized region retreats to
//! larger disorder as the interaction grows.
//!
//! Run with: cargo run --release --example phase_diagram

use zoge_sim::analysis;
use zoge_sim::manybody::{random_sector_state, Evolver};
use zoge_sim::model::ChainSpec;
use zoge_sim::rng::SeedPlan;
use zoge_sim::zoge;

fn main() -> zoge_sim::Result<()> {
    let n = 11;
    let site = 5;
    let ups = 6u32;
    let w_values: Vec<f64> = (0..10).map(|i| 0.5 + 0.15 * i as f64).collect();
    let u_values = [0.0, 0.1, 0.3];
    let realizations = 4;
    let seeds = 3;
    let sample_times: Vec<f64> = (0..16).map(|i| 150.0 + 9.375 * (i as f64 + 0.5)).collect();
    let plan = SeedPlan::new(11);

    let mut s2 = Vec::new();
    for &u in &u_values {
        for &w in &w_values {
            let base = ChainSpec::new(n, 1.0, w, u)?;
            let set = zoge_sim::model::RealizationSet::sample(base, realizations, 11)?;
            let mut acc = 0.0;
            for r in 0..realizations {
                let mut evolver = Evolver::exact(set.spec(r));
                let states: Vec<_> = (0..seeds)
                    .map(|s| {
                        let mut rng = plan.state_rng(r, s);
                        random_sector_state(n, ups, site, &mut rng).unwrap()
                    })
                    .collect();
                let trace =
                    zoge::ensemble_polarization_trace(&mut evolver, &states, site, &sample_times)?;
                acc += trace.iter().map(|p| p.s2).sum::<f64>() / trace.len() as f64;
            }
            s2.push(acc / realizations as f64);
        }
    }

    let diagram = analysis::PhaseDiagram {
        w: w_values.clone(),
        u: u_values.to_vec(),
        s2_err: vec![0.0; s2.len()],
        s2,
    };

    println!("# asymptotic S^2(W, U), N = {n}, {realizations} realizations x {seeds} seeds");
    print!("{:>6}", "W\\U");
    for &u in &u_values {
        print!(" {u:>8.2}");
    }
    println!();
    for (wi, &w) in w_values.iter().enumerate() {
        print!("{w:6.2}");
        for ui in 0..u_values.len() {
            print!(" {:8.4}", diagram.value(wi, ui));
        }
        println!();
    }

    if let Some(level) = diagram.interpolate_w(0, 1.0) {
        println!("\niso-contour through (W = 1, U = 0), level S^2 = {level:.4}:");
        for (u, crossing) in analysis::contour_crossings(&diagram, level) {
            match crossing {
                Some(w) => println!("  U = {u:4.2}: W = {w:.3}"),
                None => println!("  U = {u:4.2}: no crossing in range (partial contour)"),
            }
        }
    }
    Ok(())
}
