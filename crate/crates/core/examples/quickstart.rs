//! Audit a toy generator that memorizes its training data.
//!
//! cargo run --release --example quickstart -- [fixture] [n] [seed]

use synth_audit::audit::{render_markdown, run_suite, AuditConfig};
use synth_audit::harness::make_case;
use synth_audit::quadruple::validate_quadruple;

fn main() -> synth_audit::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let fixture = args.first().map_or("leaky", String::as_str);
    let n = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    let seed = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(7);

    let case = make_case(fixture, n, 10, seed)?;
    let quad = validate_quadruple(case.train, case.holdout, case.synthetic, Some(case.reference))?;
    let config = AuditConfig {
        record_timings: true,
        ..AuditConfig::with_seed(seed)
    };
    let report = run_suite(&quad, &config)?;
    print!("{}", render_markdown(&report));
    Ok(())
}
