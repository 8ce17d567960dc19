//! Error and success probabilities of preparing a magic state by counting
//! photons mod 4 on a finitely squeezed GKP state.
//!
//! ```bash
//! cargo run --release --example magic_state_counting
//! ```

use gkp_cluster::magic_distill::{distill_stats, DISTILLATION_THRESHOLD};
use gkp_cluster::threshold::sigma2_from_db;
use gkp_cluster::DistillationConfig;

fn main() -> gkp_cluster::Result<()> {
    println!("{:>6}  {:>10}  {:>10}  {:>8}  {:>5}", "dB", "epsilon", "P(even)", "S_max", "ok");
    for db in [12.0, 14.0, 16.0, 18.0, 20.0, 22.0] {
        let r = distill_stats(&DistillationConfig::new(sigma2_from_db(db)))?;
        let ok = if r.epsilon < DISTILLATION_THRESHOLD { "yes" } else { "no" };
        println!("{db:>6.1}  {:>10.5}  {:>10.5}  {:>8}  {ok:>5}", r.epsilon, r.p_even, r.truncation);
    }

    println!();
    println!("varying the blur x envelope product at 18 dB:");
    println!("{:>8}  {:>10}  {:>10}", "product", "epsilon", "P(even)");
    for product in [0.75, 0.5, 0.25] {
        let cfg = DistillationConfig::new(sigma2_from_db(18.0)).with_product(product);
        let r = distill_stats(&cfg)?;
        println!("{product:>8.2}  {:>10.3e}  {:>10.5}", r.epsilon, r.p_even);
    }
    Ok(())
}
