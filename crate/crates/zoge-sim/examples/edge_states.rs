//! Finite-size edge states of the incommensurate potential below the
//! transition, and how they trap an end-site excitation.
//!
//! Run with: cargo run --release --example edge_states

use std::f64::consts::PI;
use zoge_sim::model::ChainSpec;
use zoge_sim::onebody;

fn main() -> zoge_sim::Result<()> {
    let n = 500;
    let w = 0.5;

    for (label, phi) in [("phi = 0", 0.0), ("phi = 7 pi / 20", 7.0 * PI / 20.0)] {
        let spec = ChainSpec::new(n, 1.0, w, 0.0)?.with_phase(phi);
        let sol = onebody::diagonalize(&onebody::build_onebody_hamiltonian(&spec)?)?;
        let iprs = onebody::ipr_eigenstates(&sol);
        let mut sorted = iprs.clone();
        sorted.sort_by(f64::total_cmp);
        let threshold = 10.0 * sorted[n / 2];
        let report = onebody::edge_state_report(&sol, threshold)?;

        println!("{label}:  (threshold {threshold:.4}, bulk median {:.4})", sorted[n / 2]);
        println!("{:>6} {:>10} {:>8} {:>8} {:>6}", "k", "energy", "IPR_k", "center", "edge");
        for rec in &report {
            println!(
                "{:6} {:10.4} {:8.4} {:8.1} {:>6}",
                rec.k,
                rec.energy,
                rec.ipr_k,
                rec.center,
                if rec.edge { "yes" } else { "no" }
            );
        }
        println!();
    }

    // an excitation on the edge hosting localized states stays put, while
    // the mid-chain excitation spreads over the whole chain
    let spec = ChainSpec::new(n, 1.0, w, 0.0)?.with_phase(7.0 * PI / 20.0);
    let sol = onebody::diagonalize(&onebody::build_onebody_hamiltonian(&spec)?)?;
    let q0_end = onebody::ipr_time_average(&sol, n - 1, 1.0, 200)?;
    let q0_mid = onebody::ipr_time_average(&sol, n / 2, 1.0, 200)?;
    println!("equilibrium Q0 at phi = 7 pi / 20:");
    println!("  end-site excitation: {q0_end:.4}");
    println!("  mid-chain excitation: {q0_mid:.5}  (~ 3/(2N) = {:.5})", 1.5 / n as f64);
    println!("  trapping ratio: {:.1}", q0_end / q0_mid);
    Ok(())
}
