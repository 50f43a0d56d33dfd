use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use super::CampaignError;
use crate::field::Elem;
use crate::protocol::BandwidthReport;

/// Bumped only on incompatible changes to the JSON layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignReport {
    pub schema_version: u32,
    pub artifact_version: String,
    pub campaign: String,
    pub seed: u64,
    pub oracle: String,
    pub configurations: Vec<ConfigRecord>,
    pub converse: Vec<ConverseRecord>,
    pub noise: Vec<NoiseRecord>,
    pub totals: Totals,
    /// Wall-clock data; the only non-deterministic part of a report.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigRecord {
    pub index: usize,
    pub label: String,
    pub n: usize,
    pub k: usize,
    pub alpha: usize,
    pub q: u32,
    pub mds: String,
    pub css: String,
    pub helper_choices: usize,
    /// `exhaustive` or `random`.
    pub message_policy: String,
    pub messages_per_choice: u64,
    pub cases_run: u64,
    pub failures: u64,
    /// Largest eigenstate residual seen by the quantum oracle.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    pub bandwidth: BandwidthReport,
    /// First failures by case index, at most the campaign's failure cap.
    pub failure_items: Vec<FailureItem>,
}

/// Everything needed to replay one failing case.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailureItem {
    pub config: usize,
    pub case: u64,
    pub seed: u64,
    pub helpers: Vec<usize>,
    pub stale: usize,
    pub m: Vec<Elem>,
    pub m_prime: Vec<Elem>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConverseRecord {
    pub config: usize,
    pub label: String,
    pub negative: bool,
    pub checks: usize,
    pub non_injective: usize,
    /// All checks injective for MDS fixtures; at least one failure for
    /// negative fixtures.
    pub pass: bool,
    pub items: Vec<ConverseCheck>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConverseCheck {
    pub helpers: Vec<usize>,
    pub stale: usize,
    /// Helper slot whose data was left free.
    pub helper: usize,
    pub subspace_dim: usize,
    pub image_size: u64,
    pub target: u64,
    pub injective: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseRecord {
    pub config: usize,
    pub label: String,
    pub p: f64,
    pub trials: u64,
    pub successes: u64,
    pub rate: f64,
    /// `p + (1 - p) / q^alpha`.
    pub expected: f64,
    /// Binomial standard deviation of the rate.
    pub sigma: f64,
    pub within_3_sigma: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Totals {
    pub configurations: usize,
    pub cases: u64,
    pub failures: u64,
    pub converse_checks: usize,
    pub converse_failures: usize,
    pub noise_points: usize,
    pub noise_failures: usize,
}

impl Totals {
    pub fn all_passed(&self) -> bool {
        self.failures == 0 && self.converse_failures == 0 && self.noise_failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub total_seconds: f64,
    pub configurations: Vec<ConfigTiming>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigTiming {
    pub index: usize,
    pub seconds: f64,
    pub cases_per_second: f64,
}

impl CampaignReport {
    pub fn empty(campaign: &str, seed: u64, oracle: &str) -> Self {
        CampaignReport {
            schema_version: SCHEMA_VERSION,
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            campaign: campaign.to_string(),
            seed,
            oracle: oracle.to_string(),
            configurations: Vec::new(),
            converse: Vec::new(),
            noise: Vec::new(),
            totals: Totals::default(),
            timing: None,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.totals.all_passed()
    }

    /// The report with its timing block removed.
    pub fn without_timing(&self) -> Self {
        CampaignReport { timing: None, ..self.clone() }
    }

    pub(crate) fn recount(&mut self) {
        self.totals = Totals {
            configurations: self.configurations.len(),
            cases: self.configurations.iter().map(|c| c.cases_run).sum(),
            failures: self.configurations.iter().map(|c| c.failures).sum(),
            converse_checks: self.converse.iter().map(|c| c.checks).sum(),
            converse_failures: self.converse.iter().filter(|c| !c.pass).count(),
            noise_points: self.noise.len(),
            noise_failures: self.noise.iter().filter(|n| !n.within_3_sigma).count(),
        };
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
    Text,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "text" => Ok(ReportFormat::Text),
            _ => Err(format!("expected `json`, `csv` or `text`, got `{s}`")),
        }
    }
}

const CSV_HEADER: &str = "index,label,n,k,alpha,q,mds,css,helper_choices,message_policy,messages_per_choice,cases_run,failures,quantum_bits_equiv,classical_lb_bits,ratio";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn thousands(v: u64) -> String {
    let s = v.to_string();
    let mut out = String::new();
    for (i, c) in s.chars().enumerate() {
        if i > 0 && (s.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

pub fn emit_report(report: &CampaignReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s.into_bytes()
        }
        ReportFormat::Csv => {
            let mut s = String::from(CSV_HEADER);
            s.push('\n');
            for c in &report.configurations {
                writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{:.6},{:.6},{}/{}",
                    c.index,
                    csv_field(&c.label),
                    c.n,
                    c.k,
                    c.alpha,
                    c.q,
                    csv_field(&c.mds),
                    csv_field(&c.css),
                    c.helper_choices,
                    c.message_policy,
                    c.messages_per_choice,
                    c.cases_run,
                    c.failures,
                    c.bandwidth.quantum_bits_equiv,
                    c.bandwidth.classical_lb_bits,
                    c.bandwidth.ratio_num,
                    c.bandwidth.ratio_den
                )
                .unwrap();
            }
            s.into_bytes()
        }
        ReportFormat::Text => text_summary(report).into_bytes(),
    }
}

fn text_summary(r: &CampaignReport) -> String {
    let t = &r.totals;
    let mut s = String::new();
    writeln!(s, "campaign: {} (seed {}, oracle {})", r.campaign, r.seed, r.oracle).unwrap();
    if !r.configurations.is_empty() {
        writeln!(
            s,
            "{} test cases across {} configuration{} with {} failures",
            thousands(t.cases),
            t.configurations,
            if t.configurations == 1 { "" } else { "s" },
            thousands(t.failures)
        )
        .unwrap();
        for c in r.configurations.iter().filter(|c| c.failures > 0) {
            writeln!(s, "  FAILED {}: {} of {} cases", c.label, c.failures, c.cases_run).unwrap();
        }
        writeln!(s, "cases: {}", t.cases).unwrap();
        writeln!(s, "failures: {}", t.failures).unwrap();
    }
    if !r.converse.is_empty() {
        writeln!(s, "converse: {} injectivity checks over {} configurations", t.converse_checks, r.converse.len()).unwrap();
        for c in &r.converse {
            let verdict = if c.pass { "ok" } else { "UNEXPECTED" };
            let kind = if c.negative { "negative fixture" } else { "mds" };
            writeln!(s, "  {verdict} {} [{kind}]: {} of {} checks not injective", c.label, c.non_injective, c.checks).unwrap();
        }
        writeln!(s, "converse failures: {}", t.converse_failures).unwrap();
    }
    if !r.noise.is_empty() {
        for n in &r.noise {
            writeln!(
                s,
                "noise p={}: success rate {:.5} vs expected {:.5} (sigma {:.5}, {} trials) {}",
                n.p,
                n.rate,
                n.expected,
                n.sigma,
                n.trials,
                if n.within_3_sigma { "ok" } else { "OUT OF BOUNDS" }
            )
            .unwrap();
        }
        writeln!(s, "noise failures: {}", t.noise_failures).unwrap();
    }
    writeln!(s, "result: {}", if r.all_passed() { "PASS" } else { "FAIL" }).unwrap();
    s
}

pub fn write_report(report: &CampaignReport, format: ReportFormat, path: &Path) -> Result<(), CampaignError> {
    std::fs::write(path, emit_report(report, format)).map_err(|e| CampaignError::Io(format!("{}: {e}", path.display())))
}
