//! Samples explicit shift trajectories through each gate and sets the observed
//! failure rate against the analytic one.
//!
//! ```bash
//! cargo run --release --example monte_carlo_check
//! cargo run --release --example monte_carlo_check -- 2000000
//! ```

use gkp_cluster::cluster_gates::propagate;
use gkp_cluster::shift_mc::simulate;
use gkp_cluster::threshold::p_err_gate;
use gkp_cluster::{CountConvention, Gate, GateSchedule, MCConfig, NoiseModel};

fn main() -> gkp_cluster::Result<()> {
    let samples: u64 = std::env::args().nth(1).map_or(1_000_000, |s| s.parse().expect("sample count"));

    for sigma2 in [0.026, 0.0138] {
        println!("sigma^2 = {sigma2}, {samples} samples");
        println!("{:>4}  {:>10}  {:>10}  {:>10}  {:>6}", "gate", "analytic", "sampled", "std err", "z");
        for gate in Gate::ALL {
            let r = simulate(&MCConfig::new(gate, sigma2, samples))?;
            let analytic = p_err_gate(gate, sigma2)?;
            let z = (r.p_err_hat - analytic) / r.std_err;
            println!("{:>4}  {analytic:>10.5}  {:>10.5}  {:>10.5}  {z:>6.2}", gate.name(), r.p_err_hat, r.std_err);
        }
        println!();
    }

    let sigma2 = 0.02;
    let r = simulate(&MCConfig::new(Gate::CZ, sigma2, samples))?;
    let expected = propagate(&GateSchedule::new(Gate::CZ))?.last().evaluate(&NoiseModel::symmetric(sigma2)?);
    println!("CZ residual shift covariance at sigma^2 = {sigma2} (sampled / analytic):");
    for i in 0..4 {
        let cells: Vec<String> =
            (0..4).map(|j| format!("{:>8.5}/{:<8.5}", r.empirical_eta[i][j], expected[(i, j)])).collect();
        println!("  {}", cells.join(" "));
    }

    println!();
    for convention in [CountConvention::HalfCell, CountConvention::ExactModular] {
        let r = simulate(&MCConfig::new(Gate::F, 0.03, samples).with_convention(convention))?;
        println!("F at sigma^2 = 0.03, {:<13} p_err = {:.5} ± {:.5}", convention.name(), r.p_err_hat, r.std_err);
    }
    Ok(())
}
