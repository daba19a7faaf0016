//! Step-size convergence of the symmetric Trotter splitting against the
//! dense exact propagator, and the gate-exact time reversal.
//!
//! Run with: cargo run --release --example trotter_accuracy

use zoge_sim::manybody::{
    evolve, exact_evolve_reference, random_sector_state, Direction, TrotterPlan,
};
use zoge_sim::model::ChainSpec;
use zoge_sim::rng::SeedPlan;

fn main() -> zoge_sim::Result<()> {
    let spec = ChainSpec::new(8, 1.0, 0.7, 0.5)?.with_phase(1.0);
    let mut rng = SeedPlan::new(20).state_rng(0, 0);
    let s0 = random_sector_state(8, 4, 3, &mut rng)?;
    let t = 20.0;
    let exact = exact_evolve_reference(&spec, &s0, t)?;

    println!("# N = 8, W = 0.7, U = 0.5, t = {t}");
    println!("{:>8} {:>14} {:>8}", "dt", "max amp error", "ratio");
    let mut previous: Option<f64> = None;
    for &dt in &[0.04, 0.02, 0.01, 0.005, 0.0025] {
        let mut s = s0.clone();
        evolve(&mut s, &spec, t, &TrotterPlan::new(dt)?, Direction::Forward)?;
        let err = s
            .amp
            .iter()
            .zip(exact.amp.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        match previous {
            Some(p) => println!("{dt:8.4} {err:14.3e} {:8.2}", p / err),
            None => println!("{dt:8.4} {err:14.3e} {:>8}", "-"),
        }
        previous = Some(err);
    }

    // forward then backward is the exact identity gate by gate
    let mut s = s0.clone();
    let plan = TrotterPlan::new(0.02)?;
    evolve(&mut s, &spec, 13.0, &plan, Direction::Forward)?;
    evolve(&mut s, &spec, 13.0, &plan, Direction::Backward)?;
    println!(
        "\ntime-reversal fidelity at dt = 0.02: 1 - {:.2e}",
        1.0 - s.inner(&s0).norm_sqr()
    );
    Ok(())
}
