//! Exact error matrix of each gate, step by step, followed by the
//! correction variances and the error multipliers they imply.
//!
//! ```bash
//! cargo run --release --example noise_evolution
//! cargo run --release --example noise_evolution -- cz 0.01
//! ```

use gkp_cluster::cluster_gates::{error_multipliers, fixed_point_check, propagate};
use gkp_cluster::{Gate, GateSchedule, NoiseModel};

fn main() -> gkp_cluster::Result<()> {
    let mut args = std::env::args().skip(1);
    let gates: Vec<Gate> = match args.next() {
        Some(g) => vec![g.parse()?],
        None => Gate::ALL.to_vec(),
    };
    let noise = args.next().map(|s| s.parse::<f64>().expect("sigma^2 must be a number"));

    for gate in gates {
        let schedule = GateSchedule::new(gate);
        let trace = propagate(&schedule)?;
        println!("== {gate}  measurement vector {:?}", schedule.measurement_vector);
        for (label, eta) in &trace.rows {
            println!("{label}:");
            println!("{eta}");
        }
        for ev in &trace.err_vars {
            println!("sigma_err^2 after step {} ({}): {}", ev.step, ev.rail.name(), ev.variance);
        }
        println!("multipliers: {:?}", error_multipliers(&schedule)?);
        println!("returns to its corrected form: {}", fixed_point_check(&schedule)?);

        if let Some(sigma2) = noise {
            let model = NoiseModel::symmetric(sigma2)?;
            println!("final matrix at sigma^2 = {sigma2}:");
            println!("{:.6}", trace.last().evaluate(&model));
        }
        println!();
    }
    Ok(())
}
