//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so every criterion reports even when an
//! earlier one fails. Exits non-zero if any criterion fails.

use std::collections::{BTreeSet, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use synth_audit::attacks::{AttackFamily, AttackSpec};
use synth_audit::audit::{fit_transformers, run_suite, AttackSelection, AuditConfig, AuditReport, InstanceStatus};
use synth_audit::data::{Column, DataTable, TableSchema, Value};
use synth_audit::estimators::{KdeModel, Mlp, NeighborIndex, SearchStrategy};
use synth_audit::evaluation::{
    accuracy_best, advantage_and_privacy_gain, auc, effective_epsilon, tpr_at_fpr, tpr_key, EpsilonConfig,
};
use synth_audit::harness::make_case;
use synth_audit::preprocess::{EncodedMatrix, FitSource};
use synth_audit::quadruple::validate_quadruple;
use synth_audit::result::AttackResult;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if $cond {
        } else {
            return Err(format!($($fmt)+));
        }
    };
}

fn audit_case(fixture: &str, n: usize, seed: u64) -> AuditReport {
    let case = make_case(fixture, n, 10, seed).expect("fixture");
    let quad = validate_quadruple(case.train, case.holdout, case.synthetic, Some(case.reference)).expect("quadruple");
    run_suite(&quad, &AuditConfig::with_seed(seed)).expect("audit")
}

fn auc_of(report: &AuditReport, id: &str) -> f64 {
    report.instance(id).and_then(|i| i.metrics.as_ref()).map_or(f64::NAN, |m| m.auc)
}

// ---------------------------------------------------------------- C1

/// (tp, fp) for every threshold in `{+∞} ∪ scores ∪ {−∞}` under `score > γ`.
fn sweep(scores: &[f64], labels: &[bool]) -> Vec<(usize, usize)> {
    let mut gammas = vec![f64::INFINITY, f64::NEG_INFINITY];
    gammas.extend_from_slice(scores);
    gammas
        .iter()
        .map(|&g| {
            let tp = scores.iter().zip(labels).filter(|(&s, &l)| l && s > g).count();
            let fp = scores.iter().zip(labels).filter(|(&s, &l)| !l && s > g).count();
            (tp, fp)
        })
        .collect()
}

fn oracle_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let mut u2: u128 = 0;
    let (mut n1, mut n0) = (0u128, 0u128);
    for (i, &li) in labels.iter().enumerate() {
        if li {
            n1 += 1;
        } else {
            n0 += 1;
        }
        for (j, &lj) in labels.iter().enumerate() {
            if li && !lj {
                u2 += if scores[i] > scores[j] {
                    2
                } else if scores[i] == scores[j] {
                    1
                } else {
                    0
                };
            }
        }
    }
    let pairs2 = 2 * n1 * n0;
    if 2 * u2 <= pairs2 {
        u2 as f64 / pairs2 as f64
    } else {
        1.0 - (pairs2 - u2) as f64 / pairs2 as f64
    }
}

fn oracle_epsilon_side(scores: &[f64], labels: &[bool], delta: f64) -> f64 {
    let n1 = labels.iter().filter(|&&l| l).count() as f64;
    let n0 = labels.len() as f64 - n1;
    let floor = 1.0 / (3.0 * n0);
    let mut best = 0.0f64;
    for (tp, fp) in sweep(scores, labels) {
        let (tpr, fpr) = (tp as f64 / n1, fp as f64 / n0);
        if tpr > delta {
            best = best.max(((tpr - delta) / fpr.max(floor)).ln());
        }
    }
    best
}

fn c1_metric_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    for case in 0..500 {
        let n = rng.random_range(2..=12);
        let levels = rng.random_range(1..=6);
        let mut labels: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        labels[0] = true;
        labels[1] = false;
        let scores: Vec<f64> = (0..n).map(|_| rng.random_range(0..levels) as f64 * 0.5 - 1.0).collect();
        let r = AttackResult::from_scores(scores.clone(), labels.clone()).map_err(|e| e.to_string())?;

        let n1 = labels.iter().filter(|&&l| l).count() as f64;
        let n0 = n as f64 - n1;
        let pts: Vec<(f64, f64)> = sweep(&scores, &labels)
            .into_iter()
            .map(|(tp, fp)| (tp as f64 / n1, fp as f64 / n0))
            .collect();

        ensure!(auc(&r) == oracle_auc(&scores, &labels), "case {case}: auc");
        for alpha in [0.0, 0.1, 0.25, 0.5, 1.0] {
            let want = pts.iter().filter(|p| p.1 <= alpha).map(|p| p.0).fold(0.0, f64::max);
            ensure!(tpr_at_fpr(&r, alpha) == want, "case {case}: tpr_at_fpr({alpha})");
        }
        let adv = pts.iter().map(|p| p.0 - p.1).fold(f64::NEG_INFINITY, f64::max);
        ensure!(advantage_and_privacy_gain(&r).0 == adv, "case {case}: advantage");
        let acc = sweep(&scores, &labels)
            .into_iter()
            .map(|(tp, fp)| tp + (n0 as usize - fp))
            .max()
            .unwrap() as f64
            / n as f64;
        ensure!(accuracy_best(&r) == acc, "case {case}: accuracy_best");
        let negated: Vec<f64> = scores.iter().map(|s| -s).collect();
        for delta in [0.0, 0.1] {
            let want = oracle_epsilon_side(&scores, &labels, delta)
                .max(oracle_epsilon_side(&negated, &labels, delta))
                .max(0.0);
            let cfg = EpsilonConfig {
                delta,
                ..EpsilonConfig::default()
            };
            let got = effective_epsilon(&r, &cfg).map_err(|e| e.to_string())?;
            ensure!(got == want, "case {case}: effective_epsilon(δ={delta}) {got} vs {want}");
        }
    }
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(5), "took {t:?}");
    Ok("500 instances, exact".into())
}

// ---------------------------------------------------------------- C2

fn brute_knn(points: &[Vec<f64>], q: &[f64], k: usize) -> Vec<(usize, f64)> {
    let mut all: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut acc = 0.0;
            for (a, b) in q.iter().zip(p) {
                let d = a - b;
                acc += d * d;
            }
            (acc, i)
        })
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    all.into_iter().take(k).map(|(sq, i)| (i, sq.sqrt())).collect()
}

fn c2_neighbors_density() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..200 {
        let n = rng.random_range(1..=500);
        let m = rng.random_range(1..=20);
        let grid = case % 2 == 0;
        let draw = |rng: &mut ChaCha8Rng| {
            if grid {
                rng.random_range(0..4) as f64 * 0.5
            } else {
                rng.random_range(-1.0..1.0)
            }
        };
        let points: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| draw(&mut rng)).collect()).collect();
        let matrix = EncodedMatrix::from_rows(&points).map_err(|e| e.to_string())?;
        let indexes = [SearchStrategy::BruteForce, SearchStrategy::KdTree, SearchStrategy::Auto]
            .map(|s| NeighborIndex::with_strategy(&matrix, s));
        for _ in 0..5 {
            let q: Vec<f64> = (0..m).map(|_| draw(&mut rng)).collect();
            let k = rng.random_range(1..=n.min(25));
            let radius = rng.random_range(0.1..2.0) * (m as f64).sqrt() * 0.5;
            let want = brute_knn(&points, &q, k);
            let want_count = brute_knn(&points, &q, n).iter().filter(|x| x.1 <= radius).count();
            for index in &indexes {
                let got: Vec<(usize, f64)> = index
                    .knn(&q, k)
                    .map_err(|e| e.to_string())?
                    .into_iter()
                    .map(|nb| (nb.id, nb.distance))
                    .collect();
                ensure!(got == want, "case {case}: knn differs (tree={})", index.uses_tree());
                ensure!(index.nn_distance(&q).map_err(|e| e.to_string())? == want[0].1, "case {case}: nn_distance");
                ensure!(
                    index.radius_count(&q, radius).map_err(|e| e.to_string())? == want_count,
                    "case {case}: radius_count"
                );
            }
        }
    }

    // 1-D densities integrate to one.
    let mut worst = 0.0f64;
    for case in 0..5 {
        let n = rng.random_range(2..=40);
        let support: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random_range(-3.0..3.0) * (case + 1) as f64]).collect();
        let kde = KdeModel::fit(&EncodedMatrix::from_rows(&support).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let h = kde.bandwidth();
        let lo = support.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min) - 8.0 * h;
        let hi = support.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max) + 8.0 * h;
        let steps = 100_000;
        let dx = (hi - lo) / steps as f64;
        let mut total = 0.0;
        for i in 0..=steps {
            let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
            total += w * kde.logpdf(&[lo + i as f64 * dx]).map_err(|e| e.to_string())?.exp();
        }
        let integral = total * dx;
        worst = worst.max((integral - 1.0).abs());
        ensure!((integral - 1.0).abs() <= 1e-3, "kde case {case}: integral {integral}");
    }

    // Backprop against central differences, away from ReLU kinks.
    let mut checked = 0;
    let mut max_rel = 0.0f64;
    while checked < 20 {
        // The first networks are the 5-parameter toy (2 inputs, 1 hidden unit).
        let (input, hidden) = if checked < 10 {
            (2, 1)
        } else {
            (rng.random_range(1..=4), rng.random_range(1..=5))
        };
        let net = Mlp::init(input, hidden, &mut rng);
        let xs: Vec<Vec<f64>> = (0..6).map(|_| (0..input).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let ys: Vec<f64> = (0..6).map(|i| (i % 2) as f64).collect();
        let p = net.params();
        let near_kink = xs.iter().any(|x| {
            (0..hidden).any(|j| {
                let pre: f64 = p[hidden * input + j] + (0..input).map(|i| p[j * input + i] * x[i]).sum::<f64>();
                pre.abs() < 1e-3
            })
        });
        if near_kink {
            continue;
        }
        let refs: Vec<&[f64]> = xs.iter().map(Vec::as_slice).collect();
        let (_, grad) = net.loss_and_gradient(&refs, &ys);
        let eps = 1e-6;
        for (i, &g) in grad.iter().enumerate() {
            let mut plus = p.to_vec();
            plus[i] += eps;
            let mut minus = p.to_vec();
            minus[i] -= eps;
            let lp = Mlp::from_params(input, hidden, plus).loss_and_gradient(&refs, &ys).0;
            let lm = Mlp::from_params(input, hidden, minus).loss_and_gradient(&refs, &ys).0;
            let fd = (lp - lm) / (2.0 * eps);
            let rel = (g - fd).abs() / g.abs().max(fd.abs()).max(1e-4);
            max_rel = max_rel.max(rel);
            ensure!(rel <= 1e-5, "mlp param {i}: backprop {g} vs finite difference {fd}");
        }
        checked += 1;
    }
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(30), "took {t:?}");
    Ok(format!(
        "200 index instances exact; kde |∫−1| ≤ {worst:.1e}; mlp rel err ≤ {max_rel:.1e} over {checked} nets"
    ))
}

// ---------------------------------------------------------------- C3

fn c3_leaky(reports: &mut Vec<AuditReport>) -> Outcome {
    let mut summary = Vec::new();
    for seed in 0..5 {
        let start = Instant::now();
        let case = make_case("leaky", 200, 10, seed).map_err(|e| e.to_string())?;
        let keys: HashSet<Vec<u64>> = case
            .train
            .numeric_rows()
            .unwrap()
            .iter()
            .map(|r| r.iter().map(|v| v.to_bits()).collect())
            .collect();
        ensure!(keys.len() == case.train.n_rows(), "seed {seed}: training draw has duplicates");
        let report = audit_case("leaky", 200, seed);
        let max_auc = report.max_mia["auc"].value;
        let max_tpr0 = report.max_mia[&tpr_key(0.0)].value;
        let dcr_tpr0 = report.instance("dcr").and_then(|i| i.metrics.as_ref()).and_then(|m| m.tpr_at(0.0));
        let t = start.elapsed();
        ensure!(max_auc >= 0.99, "seed {seed}: Max-AUC {max_auc}");
        ensure!(max_tpr0 >= 0.95, "seed {seed}: Max-TPR@FPR=0 {max_tpr0}");
        ensure!(dcr_tpr0 == Some(1.0), "seed {seed}: dcr TPR@FPR=0 {dcr_tpr0:?}");
        ensure!(t < Duration::from_secs(60), "seed {seed}: took {t:?}");
        summary.push(format!("{max_auc:.3}"));
        reports.push(report);
    }
    Ok(format!("Max-AUC per seed [{}], dcr TPR@FPR=0 = 1", summary.join(", ")))
}

// ---------------------------------------------------------------- C4

fn c4_private(reports: &mut Vec<AuditReport>) -> Outcome {
    let start = Instant::now();
    let seeds = 20;
    let mut sums: std::collections::BTreeMap<String, f64> = Default::default();
    let mut max_sum = 0.0;
    for seed in 0..seeds {
        let report = audit_case("private", 500, seed);
        for inst in &report.instances {
            ensure!(inst.status == InstanceStatus::Ok, "seed {seed}: {} failed", inst.id);
            *sums.entry(inst.id.clone()).or_default() += auc_of(&report, &inst.id);
        }
        max_sum += report.max_mia["auc"].value;
        reports.push(report);
    }
    let (lo, hi) = sums.values().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| {
        (lo.min(s / seeds as f64), hi.max(s / seeds as f64))
    });
    for (id, s) in &sums {
        let mean = s / seeds as f64;
        ensure!((0.45..=0.55).contains(&mean), "{id}: mean AUC {mean:.4}");
    }
    let mean_max = max_sum / seeds as f64;
    ensure!(mean_max <= 0.60, "mean Max-AUC {mean_max:.4}");
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(300), "took {t:?}");
    Ok(format!("instance means in [{lo:.3}, {hi:.3}], mean Max-AUC {mean_max:.3}"))
}

// ---------------------------------------------------------------- C5

fn average_ranks(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .map(|&x| {
            let below = xs.iter().filter(|&&y| y < x).count() as f64;
            let equal = xs.iter().filter(|&&y| y == x).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma) * (x - ma)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb) * (y - mb)).sum();
    cov / (va * vb).sqrt()
}

fn c5_tradeoff(reports: &mut Vec<AuditReport>) -> Outcome {
    let sigmas = [0.0, 0.05, 0.1, 0.2, 0.5];
    let mut means = Vec::new();
    for sigma in sigmas {
        let mut total = 0.0;
        for seed in 0..10 {
            let report = audit_case(&format!("noisy-{sigma}"), 200, seed);
            total += report.max_mia["auc"].value;
            if seed == 0 {
                reports.push(report);
            }
        }
        means.push(total / 10.0);
    }
    let inversions = means.windows(2).filter(|w| w[1] > w[0]).count();
    let rho = pearson(&average_ranks(&sigmas), &average_ranks(&means));
    let shown: Vec<String> = means.iter().map(|m| format!("{m:.4}")).collect();
    ensure!(inversions <= 1, "{inversions} inversions in [{}]", shown.join(", "));
    ensure!(rho < -0.7, "Spearman ρ = {rho:.4} for [{}]", shown.join(", "));
    Ok(format!("mean Max-AUC [{}], ρ = {rho:.4}", shown.join(", ")))
}

// ---------------------------------------------------------------- C6

fn c6_no_dominance(reports: &mut Vec<AuditReport>) -> Outcome {
    let mut battery: Vec<(&str, u64)> = Vec::new();
    battery.extend((0..3).map(|s| ("leaky", s)));
    battery.extend((0..3).map(|s| ("noisy-0.5", s)));
    battery.extend((0..6).map(|s| ("gaussian", s)));
    let mut winners: BTreeSet<AttackFamily> = BTreeSet::new();
    for (fixture, seed) in battery {
        let report = audit_case(fixture, 200, seed);
        let best = report.max_mia["auc"].value;
        for inst in &report.instances {
            if inst.metrics.as_ref().is_some_and(|m| m.auc == best) {
                winners.insert(inst.spec.family());
            }
        }
        reports.push(report);
    }
    let names: Vec<&str> = winners.iter().map(|f| f.name()).collect();
    ensure!(winners.len() >= 3, "only {} winning families: {names:?}", winners.len());
    Ok(format!("{} winning families: {}", winners.len(), names.join(", ")))
}

// ---------------------------------------------------------------- C7

fn c7_determinism(reports: &mut Vec<AuditReport>) -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    let p = |name: &str| d.join(name).to_string_lossy().into_owned();
    let code = synth_audit::cli::run_from([
        "synth-audit", "fixtures", "--fixture", "noisy-0.1", "--n", "150", "--d", "6", "--seed", "11", "--out-dir",
        &p(""),
    ]);
    ensure!(code == 0, "fixtures exited {code}");
    let mut outputs = Vec::new();
    for jobs in ["1", "8"] {
        let out = p(&format!("report-{jobs}.json"));
        let code = synth_audit::cli::run_from([
            "synth-audit",
            "audit",
            "--train",
            &p("train.csv"),
            "--holdout",
            &p("holdout.csv"),
            "--synthetic",
            &p("synthetic.csv"),
            "--reference",
            &p("reference.csv"),
            "--seed",
            "5",
            "--dcr-prop",
            "--jobs",
            jobs,
            "--out",
            &out,
        ]);
        ensure!(code == 0, "audit --jobs {jobs} exited {code}");
        outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
    }
    ensure!(outputs[0] == outputs[1], "reports differ between --jobs 1 and --jobs 8");
    let report = AuditReport::from_json(std::str::from_utf8(&outputs[0]).unwrap()).map_err(|e| e.to_string())?;
    let n = report.instances.len();
    reports.push(report);
    Ok(format!("{} bytes identical, {n} instances", outputs[0].len()))
}

// ---------------------------------------------------------------- C8

fn c8_max_dominance(reports: &[AuditReport]) -> Outcome {
    let mut checked = 0;
    for (r, report) in reports.iter().enumerate() {
        let ok: Vec<_> = report.instances.iter().filter_map(|i| i.metrics.as_ref().map(|m| (i, m))).collect();
        let keys: BTreeSet<String> = ok.iter().flat_map(|(_, m)| m.values().into_iter().map(|kv| kv.0)).collect();
        ensure!(
            keys.iter().eq(report.max_mia.keys()),
            "report {r}: max_mia keys differ from the metric keys"
        );
        for key in keys {
            let exact = ok.iter().filter_map(|(_, m)| m.get(&key)).fold(f64::NEG_INFINITY, f64::max);
            let entry = &report.max_mia[&key];
            ensure!(entry.value == exact, "report {r}: {key} max {} vs {exact}", entry.value);
            let arg = report.instance(&entry.argmax).and_then(|i| i.metrics.as_ref()).and_then(|m| m.get(&key));
            ensure!(arg == Some(exact), "report {r}: {key} argmax {} does not attain it", entry.argmax);
            checked += 1;
        }
    }
    Ok(format!("{} reports, {checked} metric maxima exact", reports.len()))
}

// ---------------------------------------------------------------- C9

fn mixed_schema() -> TableSchema {
    TableSchema::new(vec![
        Column::numeric("age"),
        Column::categorical("colour"),
        Column::numeric("income"),
        Column::categorical("region"),
    ])
    .unwrap()
}

fn mixed_rows(max: usize) -> impl Strategy<Value = Vec<Vec<Value>>> {
    let row = (
        -50.0f64..150.0,
        prop::sample::select(vec!["red", "green", "blue", "violet", "teal"]),
        -1e4f64..1e6,
        prop::sample::select(vec!["n", "s", "e", "w", "x", "y"]),
    )
        .prop_map(|(a, c, i, r)| vec![Value::Num(a), Value::Cat(c.into()), Value::Num(i), Value::Cat(r.into())]);
    prop::collection::vec(row, 2..max)
}

fn c9_anti_leakage() -> Outcome {
    let schema = mixed_schema();
    let table = |rows: Vec<Vec<Value>>| DataTable::new(schema.clone(), rows).unwrap();
    let mut runner = TestRunner::new(PropConfig {
        cases: 200,
        failure_persistence: None,
        ..PropConfig::default()
    });
    let tables = (mixed_rows(30), mixed_rows(30), mixed_rows(30), mixed_rows(30), mixed_rows(30), mixed_rows(30));
    runner
        .run(&tables, |(syn, reference, train_a, hold_a, train_b, hold_b)| {
            let (syn, reference) = (table(syn), table(reference));
            let qa = validate_quadruple(table(train_a), table(hold_a), syn.clone(), Some(reference.clone())).unwrap();
            let qb = validate_quadruple(table(train_b), table(hold_b), syn, Some(reference)).unwrap();
            for source in [FitSource::Synthetic, FitSource::Reference] {
                let a = serde_json::to_string(&fit_transformers(&qa, source).unwrap()).unwrap();
                let b = serde_json::to_string(&fit_transformers(&qb, source).unwrap()).unwrap();
                prop_assert_eq!(a, b);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;

    // The digests recorded by a full audit follow the same rule.
    let case_a = make_case("gaussian", 60, 4, 1).map_err(|e| e.to_string())?;
    let case_b = make_case("private", 60, 4, 2).map_err(|e| e.to_string())?;
    let config = AuditConfig::with_seed(3).with_attacks(AttackSelection::Specs(vec![AttackSpec::Dcr]));
    let qa = validate_quadruple(case_a.train, case_a.holdout, case_a.synthetic.clone(), Some(case_a.reference.clone()))
        .map_err(|e| e.to_string())?;
    let qb = validate_quadruple(case_b.train, case_b.holdout, case_a.synthetic, Some(case_a.reference))
        .map_err(|e| e.to_string())?;
    let ra = run_suite(&qa, &config).map_err(|e| e.to_string())?;
    let rb = run_suite(&qb, &config).map_err(|e| e.to_string())?;
    ensure!(ra.provenance.transformers == rb.provenance.transformers, "audit transformer digests differ");
    Ok("200 random train/holdout replacements, both fit sources".into())
}

// ---------------------------------------------------------------- C10

fn c10_epsilon_spots() -> Outcome {
    // Top threshold: 2 of 4 members and 1 of 4 non-members.
    let r = AttackResult::from_groups(&[2.0, 2.0, 0.0, 0.0], &[2.0, 0.0, 0.0, 0.0]).map_err(|e| e.to_string())?;
    let eps = effective_epsilon(&r, &EpsilonConfig::default()).map_err(|e| e.to_string())?;
    ensure!((eps - 2f64.ln()).abs() <= 1e-9, "ε at (0.5, 0.25) = {eps}");

    // Perfect separation: FPR 0 is floored at 1/(3·n0).
    let n0 = 10;
    let r = AttackResult::from_groups(&[1.0; 4], &vec![0.0; n0]).map_err(|e| e.to_string())?;
    let floor = effective_epsilon(&r, &EpsilonConfig::default()).map_err(|e| e.to_string())?;
    let want = (3.0 * n0 as f64).ln();
    ensure!((floor - want).abs() <= 1e-9, "ε at FPR=0 = {floor}, want ln 30");
    Ok(format!("ln 2 -> {eps:.12}, ln(3·n0) -> {floor:.12}"))
}

// ----------------------------------------------------------------

fn main() {
    let mut reports: Vec<AuditReport> = Vec::new();
    let mut failed = 0;
    let mut check = |label: &str, f: &mut dyn FnMut(&mut Vec<AuditReport>) -> Outcome| {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| f(&mut reports)))
            .unwrap_or_else(|p| Err(format!("panicked: {:?}", p.downcast_ref::<String>().map(String::as_str).or(p.downcast_ref::<&str>().copied()))));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {label} ({secs:.2} s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {label} ({secs:.2} s): {detail}");
            }
        }
    };
    check("1 metric oracle", &mut |_| c1_metric_oracle());
    check("2 neighbour/density oracle", &mut |_| c2_neighbors_density());
    check("3 leaky fixture bound", &mut c3_leaky);
    check("4 private fixture null", &mut c4_private);
    check("5 trade-off direction", &mut c5_tradeoff);
    check("6 no attack dominates", &mut c6_no_dominance);
    check("7 determinism across worker counts", &mut c7_determinism);
    check("8 Max-MIA dominance", &mut |r| c8_max_dominance(r));
    check("9 anti-leakage preprocessing", &mut |_| c9_anti_leakage());
    check("10 effective-epsilon spot values", &mut |_| c10_epsilon_spots());
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
