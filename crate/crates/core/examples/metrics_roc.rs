//! ROC-derived metrics and effective epsilon on a hand-made score vector.
//!
//! cargo run --example metrics_roc

use synth_audit::evaluation::{metric_report, roc, EpsilonConfig, EpsilonMode, EvalConfig};
use synth_audit::result::AttackResult;

fn main() -> synth_audit::Result<()> {
    let members = [0.9, 0.8, 0.8, 0.6, 0.4, 0.3];
    let nonmembers = [0.8, 0.5, 0.4, 0.2, 0.1, 0.1, 0.0];
    let result = AttackResult::from_groups(&members, &nonmembers)?;

    let curve = roc(&result);
    println!("{:>10} {:>6} {:>6}", "threshold", "tpr", "fpr");
    for (i, t) in curve.thresholds().iter().enumerate() {
        println!("{t:>10} {:>6.3} {:>6.3}", curve.tpr(i), curve.fpr(i));
    }

    for mode in [EpsilonMode::Point, EpsilonMode::ClopperPearson] {
        let config = EvalConfig {
            epsilon: EpsilonConfig { mode, ..EpsilonConfig::default() },
            ..EvalConfig::default()
        };
        let report = metric_report(&result, &config)?;
        println!("\n{mode} epsilon:");
        for (key, value) in report.values() {
            println!("  {key:20} {value:.4}");
        }
    }
    Ok(())
}
