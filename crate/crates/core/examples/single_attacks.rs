//! Run every attack family once on the same fixture and compare AUCs.
//!
//! cargo run --release --example single_attacks -- [fixture]

use synth_audit::attacks::{run_attack, AttackFamily, AttackInputs};
use synth_audit::audit::fit_transformers;
use synth_audit::evaluation::{auc, tpr_at_fpr};
use synth_audit::harness::make_case;
use synth_audit::preprocess::FitSource;
use synth_audit::quadruple::{build_eval_set, validate_quadruple};
use synth_audit::seed::RandomSeed;

fn main() -> synth_audit::Result<()> {
    let fixture = std::env::args().nth(1).unwrap_or_else(|| "noisy-0.2".into());
    let case = make_case(&fixture, 200, 6, 1)?;
    let quad = validate_quadruple(case.train, case.holdout, case.synthetic, Some(case.reference))?;
    let transformers = fit_transformers(&quad, FitSource::Synthetic)?;
    let eval = build_eval_set(&quad.train, &quad.holdout, 1000, RandomSeed(1))?;
    let inputs = AttackInputs::prepare(&quad, &eval, &transformers)?;

    println!("{fixture}: {} members, {} non-members\n", eval.n_members(), eval.n_nonmembers());
    println!("{:30} {:>6} {:>12}", "instance", "auc", "tpr@fpr=0.1");
    for family in AttackFamily::ALL {
        let spec = family.default_grid().remove(0);
        let result = run_attack(&spec, &inputs, RandomSeed(1))?;
        println!("{:30} {:>6.3} {:>12.3}", spec.id(), auc(&result), tpr_at_fpr(&result, 0.1));
    }
    Ok(())
}
