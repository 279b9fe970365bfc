//! Audit orchestration: expand the attack grid, run every instance, and
//! take the per-metric maximum over instances (Max-MIA).
//!
//! Max-MIA is the worst case over the attacks implemented here. It is a lower
//! bound on what a stronger adversary could achieve, not a guarantee.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::attacks::{run_attack, AttackFamily, AttackInputs, AttackSpec};
use crate::dcrprop::{dcr_prop, DcrPropResult};
use crate::evaluation::{metric_report, EvalConfig, MetricReport};
use crate::ingest::fingerprint_hex;
use crate::preprocess::{FitSource, TransformerSet};
use crate::quadruple::{build_eval_set, Quadruple};
use crate::seed::RandomSeed;
use crate::{Error, Result, TOOL_VERSION};

pub const REPORT_VERSION: &str = "1";
pub const DEFAULT_EVAL_CAP: usize = 1000;

/// Which attacks to run: the full default grid or an explicit list.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum AttackSelection {
    #[default]
    All,
    Specs(Vec<AttackSpec>),
}

impl AttackSelection {
    /// Parses a comma list such as `dcr,dpi:k=25,gen_lra` or `all`.
    pub fn parse(list: &str) -> Result<Self> {
        if list.trim() == "all" {
            return Ok(AttackSelection::All);
        }
        let mut specs = Vec::new();
        for entry in list.split(',').filter(|e| !e.trim().is_empty()) {
            specs.extend(AttackSpec::parse_list_entry(entry)?);
        }
        if specs.is_empty() {
            return Err(Error::InvalidArgument("empty attack list".into()));
        }
        Ok(AttackSelection::Specs(specs))
    }
}

impl Serialize for AttackSelection {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            AttackSelection::All => s.serialize_str("all"),
            AttackSelection::Specs(specs) => specs.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for AttackSelection {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Keyword(String),
            Specs(Vec<AttackSpec>),
        }
        match Raw::deserialize(d)? {
            Raw::Keyword(k) if k == "all" => Ok(AttackSelection::All),
            Raw::Keyword(k) => Err(serde::de::Error::custom(format!("expected \"all\", got {k:?}"))),
            Raw::Specs(specs) => Ok(AttackSelection::Specs(specs)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub attacks: AttackSelection,
    pub eval_cap: usize,
    pub seed: RandomSeed,
    pub evaluation: EvalConfig,
    pub fit_source: FitSource,
    pub dcr_prop: bool,
    /// Worker threads; 0 uses the rayon default. Not part of the report.
    #[serde(skip)]
    pub jobs: usize,
    /// Record wall-clock seconds per instance. Off by default so reports
    /// stay byte-identical across runs.
    #[serde(skip)]
    pub record_timings: bool,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            attacks: AttackSelection::All,
            eval_cap: DEFAULT_EVAL_CAP,
            seed: RandomSeed(0),
            evaluation: EvalConfig::default(),
            fit_source: FitSource::Synthetic,
            dcr_prop: false,
            jobs: 0,
            record_timings: false,
        }
    }
}

impl AuditConfig {
    pub fn with_seed(seed: u64) -> Self {
        AuditConfig {
            seed: RandomSeed(seed),
            ..AuditConfig::default()
        }
    }

    pub fn with_attacks(mut self, attacks: AttackSelection) -> Self {
        self.attacks = attacks;
        self
    }
}

/// Instances to run plus warnings for the ones dropped. Calibrated specs
/// are dropped when no reference table is available; repeated ids are
/// dropped after their first occurrence.
pub fn expand_grid(selection: &AttackSelection, calibrated: bool) -> Result<(Vec<AttackSpec>, Vec<String>)> {
    let requested: Vec<AttackSpec> = match selection {
        AttackSelection::All => AttackFamily::ALL.iter().flat_map(|f| f.default_grid()).collect(),
        AttackSelection::Specs(specs) => specs.clone(),
    };
    let mut warnings = Vec::new();
    let mut dropped_families = Vec::new();
    let mut seen = HashSet::new();
    let mut specs = Vec::new();
    for spec in requested {
        if spec.requires_reference() && !calibrated {
            let family = spec.family();
            if !dropped_families.contains(&family) {
                dropped_families.push(family);
                warnings.push(format!("dropped {family}: it needs a reference table"));
            }
            continue;
        }
        if !seen.insert(spec.id()) {
            warnings.push(format!("dropped duplicate instance {}", spec.id()));
            continue;
        }
        specs.push(spec);
    }
    if specs.is_empty() {
        return Err(Error::InvalidArgument(
            "no runnable attack instances (calibrated attacks need --reference)".into(),
        ));
    }
    Ok((specs, warnings))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceStatus {
    Ok,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceReport {
    pub id: String,
    pub spec: AttackSpec,
    pub status: InstanceStatus,
    pub metrics: Option<MetricReport>,
    pub runtime_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxEntry {
    pub value: f64,
    pub argmax: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub fingerprints: BTreeMap<String, String>,
    pub sizes: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    pub seed: RandomSeed,
    pub grid: Vec<String>,
    pub transformers: BTreeMap<String, String>,
    pub fit_source: FitSource,
    pub bandwidth_rule: String,
    pub max_mia_scope: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub version: String,
    pub config: AuditConfig,
    pub datasets: DatasetSummary,
    pub provenance: Provenance,
    pub instances: Vec<InstanceReport>,
    pub max_mia: BTreeMap<String, MaxEntry>,
    pub warnings: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dcr_prop: Option<DcrPropResult>,
}

impl AuditReport {
    pub fn n_failed(&self) -> usize {
        self.instances.iter().filter(|i| i.status == InstanceStatus::Failed).count()
    }

    pub fn instance(&self, id: &str) -> Option<&InstanceReport> {
        self.instances.iter().find(|i| i.id == id)
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Parses a report, rejecting unknown versions before anything else.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let found = value.get("version").and_then(|v| v.as_str()).unwrap_or("");
        if found != REPORT_VERSION {
            return Err(Error::VersionMismatch {
                found: found.to_string(),
                expected: REPORT_VERSION.to_string(),
            });
        }
        Ok(serde_json::from_value(value)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
        Self::from_json(&text).map_err(|e| e.in_file(path))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::from(e).in_file(path))
    }
}

/// Per-metric maximum over successful instances; ties keep the first.
pub fn max_mia(instances: &[InstanceReport]) -> BTreeMap<String, MaxEntry> {
    let mut out: BTreeMap<String, MaxEntry> = BTreeMap::new();
    for inst in instances {
        let Some(metrics) = &inst.metrics else { continue };
        for (key, value) in metrics.values() {
            match out.get_mut(&key) {
                Some(best) if value <= best.value => {}
                Some(best) => {
                    *best = MaxEntry {
                        value,
                        argmax: inst.id.clone(),
                    }
                }
                None => {
                    out.insert(
                        key,
                        MaxEntry {
                            value,
                            argmax: inst.id.clone(),
                        },
                    );
                }
            }
        }
    }
    out
}

fn run_instance(spec: &AttackSpec, inputs: &AttackInputs, config: &AuditConfig) -> InstanceReport {
    let id = spec.id();
    let start = Instant::now();
    let seed = config.seed.child(&format!("attack/{id}"));
    let outcome = run_attack(spec, inputs, seed).and_then(|r| metric_report(&r, &config.evaluation));
    let runtime_s = config.record_timings.then(|| start.elapsed().as_secs_f64());
    match outcome {
        Ok(metrics) => InstanceReport {
            id,
            spec: spec.clone(),
            status: InstanceStatus::Ok,
            metrics: Some(metrics),
            runtime_s,
            error: None,
        },
        Err(e) => InstanceReport {
            id,
            spec: spec.clone(),
            status: InstanceStatus::Failed,
            metrics: None,
            runtime_s,
            error: Some(e.to_string()),
        },
    }
}

/// Fits both encoders on the adversary-visible table named by `fit_source`.
/// Train and holdout rows are never read.
pub fn fit_transformers(quad: &Quadruple, fit_source: FitSource) -> Result<TransformerSet> {
    let table = match fit_source {
        FitSource::Synthetic => &quad.synthetic,
        FitSource::Reference => quad.reference.as_ref().ok_or_else(|| {
            Error::InvalidArgument("encoders fit on the reference table need --reference".into())
        })?,
    };
    TransformerSet::fit(table, fit_source)
}

pub fn run_suite(quad: &Quadruple, config: &AuditConfig) -> Result<AuditReport> {
    config.evaluation.validate()?;
    let (specs, grid_warnings) = expand_grid(&config.attacks, quad.calibrated())?;

    let transformers = fit_transformers(quad, config.fit_source)?;
    let eval = build_eval_set(&quad.train, &quad.holdout, config.eval_cap, config.seed.child("eval"))?;
    let inputs = AttackInputs::prepare(quad, &eval, &transformers)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    let instances: Vec<InstanceReport> =
        pool.install(|| specs.par_iter().map(|s| run_instance(s, &inputs, config)).collect());

    let mut warnings: Vec<String> = quad.warnings().to_vec();
    warnings.extend(grid_warnings);
    for inst in &instances {
        if let Some(err) = &inst.error {
            warnings.push(format!("{} failed and is excluded from max_mia: {err}", inst.id));
        }
    }
    if instances.iter().all(|i| i.status == InstanceStatus::Failed) {
        return Err(Error::AllAttacksFailed);
    }

    let dcr_prop = match (&quad.reference, config.dcr_prop) {
        (Some(reference), true) => Some(dcr_prop(&quad.train, reference, &quad.synthetic, &transformers.onehot)?),
        (None, true) => {
            warnings.push("dcr_prop skipped: it needs a reference table".into());
            None
        }
        _ => None,
    };

    let mut fingerprints = BTreeMap::new();
    let mut sizes = BTreeMap::new();
    let tables = [
        ("train", Some(&quad.train)),
        ("holdout", Some(&quad.holdout)),
        ("synthetic", Some(&quad.synthetic)),
        ("reference", quad.reference.as_ref()),
    ];
    for (role, table) in tables {
        if let Some(t) = table {
            fingerprints.insert(role.to_string(), fingerprint_hex(t));
            sizes.insert(role.to_string(), t.n_rows());
        }
    }
    sizes.insert("eval_members".into(), eval.n_members());
    sizes.insert("eval_nonmembers".into(), eval.n_nonmembers());

    let transformer_digests = BTreeMap::from([
        ("onehot".to_string(), transformers.onehot.digest()),
        ("ordinal".to_string(), transformers.ordinal.digest()),
    ]);

    Ok(AuditReport {
        version: REPORT_VERSION.into(),
        config: config.clone(),
        datasets: DatasetSummary { fingerprints, sizes },
        provenance: Provenance {
            tool_version: TOOL_VERSION.into(),
            seed: config.seed,
            grid: specs.iter().map(AttackSpec::id).collect(),
            transformers: transformer_digests,
            fit_source: config.fit_source,
            bandwidth_rule: "scott".into(),
            max_mia_scope: "maximum over the implemented attack instances".into(),
        },
        max_mia: max_mia(&instances),
        instances,
        warnings,
        dcr_prop,
    })
}

/// Whether a larger value of `metric` means more leakage.
pub fn higher_is_leakier(metric: &str) -> bool {
    !matches!(metric, "privacy_gain" | "brier")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricDelta {
    pub metric: String,
    pub a: f64,
    pub b: f64,
    /// `b − a`.
    pub delta: f64,
    pub leakier: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceDelta {
    pub id: String,
    pub deltas: Vec<MetricDelta>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportComparison {
    pub max_mia: Vec<MetricDelta>,
    pub instances: Vec<InstanceDelta>,
}

impl ReportComparison {
    pub fn is_zero(&self) -> bool {
        self.max_mia
            .iter()
            .chain(self.instances.iter().flat_map(|i| &i.deltas))
            .all(|d| d.delta == 0.0)
    }
}

fn delta(metric: &str, a: f64, b: f64) -> MetricDelta {
    let d = b - a;
    MetricDelta {
        metric: metric.to_string(),
        a,
        b,
        delta: d,
        leakier: if higher_is_leakier(metric) { d > 0.0 } else { d < 0.0 },
    }
}

/// Deltas `b − a` for shared Max-MIA metrics and for instances present in
/// both reports with metrics.
pub fn compare_reports(a: &AuditReport, b: &AuditReport) -> ReportComparison {
    let max_mia = a
        .max_mia
        .iter()
        .filter_map(|(k, va)| b.max_mia.get(k).map(|vb| delta(k, va.value, vb.value)))
        .collect();
    let instances = a
        .instances
        .iter()
        .filter_map(|ia| {
            let ma = ia.metrics.as_ref()?;
            let mb = b.instance(&ia.id)?.metrics.as_ref()?;
            let deltas = ma
                .values()
                .into_iter()
                .filter_map(|(k, va)| mb.get(&k).map(|vb| delta(&k, va, vb)))
                .collect();
            Some(InstanceDelta {
                id: ia.id.clone(),
                deltas,
            })
        })
        .collect();
    ReportComparison { max_mia, instances }
}

fn fmt_num(v: f64) -> String {
    format!("{v:.4}")
}

/// Markdown rendering: summary, Max-MIA block, per-instance table.
pub fn render_markdown(report: &AuditReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Privacy audit\n");
    let _ = writeln!(
        out,
        "seed {} · tool {} · {} instance(s), {} failed\n",
        report.provenance.seed.value(),
        report.provenance.tool_version,
        report.instances.len(),
        report.n_failed()
    );
    let _ = writeln!(out, "| table | rows | fingerprint |\n|---|---:|---|");
    for (role, size) in &report.datasets.sizes {
        let fp = report.datasets.fingerprints.get(role).map_or("", String::as_str);
        let _ = writeln!(out, "| {role} | {size} | {fp} |");
    }

    let _ = writeln!(out, "\n## Max-MIA ({})\n", report.provenance.max_mia_scope);
    let _ = writeln!(out, "| metric | value | attack |\n|---|---:|---|");
    for (metric, entry) in &report.max_mia {
        let _ = writeln!(out, "| {metric} | {} | {} |", fmt_num(entry.value), entry.argmax);
    }

    let keys: Vec<String> = report
        .instances
        .iter()
        .find_map(|i| i.metrics.as_ref())
        .map(|m| m.values().into_iter().map(|(k, _)| k).collect())
        .unwrap_or_default();
    let _ = writeln!(out, "\n## Instances\n");
    let _ = writeln!(out, "| attack | status | {} | runtime_s |", keys.join(" | "));
    let _ = writeln!(out, "|---|---|{}---:|", "---:|".repeat(keys.len()));
    for inst in &report.instances {
        let cells: Vec<String> = keys
            .iter()
            .map(|k| inst.metrics.as_ref().and_then(|m| m.get(k)).map_or("–".into(), fmt_num))
            .collect();
        let runtime = inst.runtime_s.map_or("–".into(), |t| format!("{t:.3}"));
        let status = match inst.status {
            InstanceStatus::Ok => "ok",
            InstanceStatus::Failed => "failed",
        };
        let _ = writeln!(out, "| {} | {status} | {} | {runtime} |", inst.id, cells.join(" | "));
    }

    if let Some(p) = &report.dcr_prop {
        let _ = writeln!(out, "\n## DCR-Prop\n");
        let _ = writeln!(
            out,
            "proportion closer to reference {} (0.5 = balanced, lower = leakier); \
             leakage orientation {}; counts train/reference/ties {}/{}/{}",
            fmt_num(p.proportion),
            fmt_num(p.leakage_proportion),
            p.n_closer_to_train,
            p.n_closer_to_reference,
            p.n_ties
        );
    }
    if !report.warnings.is_empty() {
        let _ = writeln!(out, "\n## Warnings\n");
        for w in &report.warnings {
            let _ = writeln!(out, "- {w}");
        }
    }
    out
}

pub fn render_comparison(cmp: &ReportComparison) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Audit comparison (b − a)\n");
    let _ = writeln!(out, "| metric | a | b | delta | |\n|---|---:|---:|---:|---|");
    for d in &cmp.max_mia {
        let flag = if d.leakier { "leakier" } else { "" };
        let _ = writeln!(
            out,
            "| {} | {} | {} | {:+.4} | {flag} |",
            d.metric,
            fmt_num(d.a),
            fmt_num(d.b),
            d.delta
        );
    }
    let _ = writeln!(out, "\n## Matching instances ({})\n", cmp.instances.len());
    for inst in &cmp.instances {
        let leakier: Vec<&str> = inst.deltas.iter().filter(|d| d.leakier).map(|d| d.metric.as_str()).collect();
        let auc = inst.deltas.iter().find(|d| d.metric == "auc").map_or(0.0, |d| d.delta);
        let _ = writeln!(
            out,
            "- {}: Δauc {:+.4}{}",
            inst.id,
            auc,
            if leakier.is_empty() {
                String::new()
            } else {
                format!(", leakier on {}", leakier.join(", "))
            }
        );
    }
    out
}
