//! Controlled-Z logical error rate against squeezing, with the per-gate
//! rates at a few reference points.
//!
//! ```bash
//! cargo run --release --example error_curve
//! ```

use gkp_cluster::threshold::{curve, p_err_gate, sigma2_from_db};
use gkp_cluster::Gate;

fn main() -> gkp_cluster::Result<()> {
    println!("{:>6}  {:>12}", "dB", "p_err(CZ)");
    for pt in curve(10.0, 22.0, 25)? {
        let bar = "#".repeat(((-pt.p_err.log10()) * 4.0).round().max(0.0) as usize);
        println!("{:>6.2}  {:>12.4e}  {bar}", pt.squeezing_db, pt.p_err);
    }

    println!();
    println!("{:>6}  {:>10}  {:>10}  {:>10}  {:>10}", "dB", "I", "P", "F", "CZ");
    for db in [12.0, 15.0, 18.0, 21.0] {
        let s2 = sigma2_from_db(db);
        let rates: Vec<String> =
            Gate::ALL.iter().map(|&g| p_err_gate(g, s2).map(|p| format!("{p:>10.3e}"))).collect::<Result<_, _>>()?;
        println!("{db:>6.1}  {}", rates.join("  "));
    }
    Ok(())
}
