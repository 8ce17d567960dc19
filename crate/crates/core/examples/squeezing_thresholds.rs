//! Squeezing needed for a controlled-Z logical error rate to stay below each threshold.
//!
//! ```bash
//! cargo run --release --example squeezing_thresholds
//! ```

use gkp_cluster::threshold::{sigma2_for_threshold, DEFAULT_THRESHOLDS, SQUEEZING_MILESTONES_DB};

fn main() -> gkp_cluster::Result<()> {
    println!("{:>8}  {:>12}  {:>8}", "p_FT", "sigma^2", "dB");
    for p_ft in DEFAULT_THRESHOLDS {
        let row = sigma2_for_threshold(p_ft)?;
        println!("{:>8.0e}  {:>12.6e}  {:>8.2}", row.p_ft, row.sigma2, row.squeezing_db);
    }

    let [record, typical] = SQUEEZING_MILESTONES_DB;
    println!();
    println!("highest squeezing reported in the lab: {record} dB");
    println!("typical squeezing in optical setups:   {typical} dB");
    Ok(())
}
