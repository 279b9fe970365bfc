//! Mean Max-AUC over seeds for each fixture, from memorizer to private.
//!
//! cargo run --release --example privacy_tradeoff -- [seeds]

use synth_audit::audit::{run_suite, AuditConfig};
use synth_audit::harness::make_case;
use synth_audit::quadruple::validate_quadruple;

fn main() -> synth_audit::Result<()> {
    let seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let ladder = ["leaky", "noisy-0.05", "noisy-0.2", "noisy-0.5", "noisy-1", "gaussian", "marginal", "private"];
    println!("{:12} {:>9} {:>11}  most frequent winner", "fixture", "Max-AUC", "TPR@0.01");
    for fixture in ladder {
        let (mut auc, mut tpr) = (0.0, 0.0);
        let mut winners = std::collections::BTreeMap::<String, usize>::new();
        for seed in 0..seeds {
            let case = make_case(fixture, 200, 10, seed)?;
            let quad = validate_quadruple(case.train, case.holdout, case.synthetic, Some(case.reference))?;
            let report = run_suite(&quad, &AuditConfig::with_seed(seed))?;
            auc += report.max_mia["auc"].value;
            tpr += report.max_mia["tpr_at_fpr_0p01"].value;
            *winners.entry(report.max_mia["auc"].argmax.clone()).or_default() += 1;
        }
        let top = winners.iter().max_by_key(|(_, &c)| c).map_or("", |(id, _)| id.as_str());
        println!("{fixture:12} {:>9.3} {:>11.3}  {top}", auc / seeds as f64, tpr / seeds as f64);
    }
    Ok(())
}
