//! Audit two generators on the same population and diff the reports.
//!
//! cargo run --release --example compare_audits

use synth_audit::audit::{compare_reports, render_comparison, run_suite, AttackSelection, AuditConfig};
use synth_audit::harness::make_case;
use synth_audit::quadruple::validate_quadruple;

fn main() -> synth_audit::Result<()> {
    let config = AuditConfig::with_seed(2).with_attacks(AttackSelection::parse("dcr,dcr_diff,domias,dpi:k=5,mc")?);
    let mut reports = Vec::new();
    for fixture in ["gaussian", "noisy-0.05"] {
        // Same seed, so both cases share train, holdout and reference.
        let case = make_case(fixture, 200, 8, 4)?;
        let quad = validate_quadruple(case.train, case.holdout, case.synthetic, Some(case.reference))?;
        let report = run_suite(&quad, &config)?;
        println!("{fixture:12} Max-AUC {:.3} ({})", report.max_mia["auc"].value, report.max_mia["auc"].argmax);
        reports.push(report);
    }
    println!();
    print!("{}", render_comparison(&compare_reports(&reports[0], &reports[1])));
    Ok(())
}
