//! DCR-Prop next to the DCR attack along the noisy-memorizer ladder.
//!
//! cargo run --release --example dcr_prop

use synth_audit::audit::{run_suite, AttackSelection, AuditConfig};
use synth_audit::harness::make_case;
use synth_audit::quadruple::validate_quadruple;

fn main() -> synth_audit::Result<()> {
    let config = AuditConfig {
        dcr_prop: true,
        ..AuditConfig::with_seed(1).with_attacks(AttackSelection::parse("dcr")?)
    };
    println!("{:>6} {:>10} {:>8} {:>8}", "sigma", "dcr_prop", "leakage", "dcr auc");
    for sigma in [0.0, 0.05, 0.1, 0.2, 0.5, 1.0] {
        let case = make_case(&format!("noisy-{sigma}"), 200, 10, 1)?;
        let quad = validate_quadruple(case.train, case.holdout, case.synthetic, Some(case.reference))?;
        let report = run_suite(&quad, &config)?;
        let prop = report.dcr_prop.as_ref().expect("requested with a reference");
        println!(
            "{sigma:>6} {:>10.3} {:>8.3} {:>8.3}",
            prop.proportion,
            prop.leakage_proportion,
            report.max_mia["auc"].value
        );
    }
    let private = make_case("private", 200, 10, 1)?;
    let quad = validate_quadruple(private.train, private.holdout, private.synthetic, Some(private.reference))?;
    let prop = run_suite(&quad, &config)?.dcr_prop.expect("requested with a reference");
    println!("private {:>9.3}", prop.proportion);
    Ok(())
}
