//! Serializable report documents shared by the text and JSON outputs.
//!
//! Rationals are canonical strings (`"p"` or `"p/q"`) and coalitions are
//! decimal masks, always in ascending order. The text form is rendered
//! from the same document, so both outputs carry the same numbers.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::balance::{BalancednessCertificate, ImbalanceWitness};
use crate::game::{Coalition, Payoff};
use crate::oracle::OracleResult;
use crate::rational::{format_rational, Rational};
use crate::verify::{IterationRecord, VerificationReport};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: String,
    pub command: String,
    pub input: InputEcho,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub iterations: Vec<IterationDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub improving: Option<ImprovingDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checkers: Vec<CheckerDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nucleolus: Option<NucleolusDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bench: Option<BenchDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counters: Option<Counters>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputEcho {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payoff: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paranoid: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checker: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fixtures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationDoc {
    pub k: usize,
    pub epsilon: String,
    pub tight: Vec<u32>,
    pub checked: Vec<u32>,
    pub balanced: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub representative: Option<Vec<u32>>,
    pub h_rank_after: usize,
    pub lp_solves: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateDoc>,
}

/// Weights keyed by coalition mask.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub gamma: BTreeMap<u32, String>,
    pub omega: BTreeMap<u32, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDoc {
    pub y: Vec<String>,
    pub strict_at: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImprovingDoc {
    pub k: usize,
    pub delta: String,
    pub better: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckerDoc {
    pub checker: String,
    pub verdict: String,
    pub lp_solves: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NucleolusDoc {
    pub mode: String,
    pub point: Vec<String>,
    pub stages: Vec<StageDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageDoc {
    pub epsilon: String,
    pub fixed: Vec<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchDoc {
    pub rows: Vec<BenchRow>,
    pub violations: Vec<String>,
    pub assertion: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRow {
    pub label: String,
    pub n: usize,
    pub point: Vec<String>,
    pub runs: Vec<BenchRun>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRun {
    pub algorithm: String,
    pub verdict: String,
    pub iterations: usize,
    pub lp_solves: usize,
    pub stored_coalitions_total: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub lp_solves: usize,
    pub stored_coalitions_total: usize,
    pub iteration_count: usize,
}

impl ReportDocument {
    pub fn new(command: &str, input: InputEcho) -> Self {
        ReportDocument {
            schema_version: SCHEMA_VERSION.into(),
            command: command.into(),
            input,
            ..Default::default()
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Fills verdict, iterations, witness, improving point and counters from a verifier run.
    pub fn record_verification(&mut self, report: &VerificationReport) {
        self.verdict = Some(report.verdict.name().into());
        if let crate::verify::Verdict::NotImputation(status) = &report.verdict {
            self.diagnostic = Some(status.to_string());
            return;
        }
        self.t0 = Some(masks(&report.t0));
        self.iterations = report.iterations.iter().map(iteration_doc).collect();
        if let Some(rej) = &report.rejection {
            self.witness = Some(witness_doc(&rej.witness));
            self.improving = Some(ImprovingDoc {
                k: rej.k,
                delta: format_rational(&rej.delta),
                better: strings(rej.better.shares()),
            });
        }
        self.counters = Some(Counters {
            lp_solves: report.lp_solves,
            stored_coalitions_total: report.stored_coalitions_total,
            iteration_count: report.iteration_count(),
        });
    }
}

pub fn masks(coalitions: &[Coalition]) -> Vec<u32> {
    let mut out: Vec<u32> = coalitions.iter().map(|s| s.mask()).collect();
    out.sort_unstable();
    out.dedup();
    out
}

pub fn strings(values: &[Rational]) -> Vec<String> {
    values.iter().map(format_rational).collect()
}

pub fn certificate_doc(cert: &BalancednessCertificate) -> CertificateDoc {
    let map = |pairs: &[(Coalition, Rational)]| {
        pairs
            .iter()
            .map(|(s, w)| (s.mask(), format_rational(w)))
            .collect()
    };
    CertificateDoc {
        gamma: map(&cert.gamma),
        omega: map(&cert.omega),
    }
}

pub fn witness_doc(witness: &ImbalanceWitness) -> WitnessDoc {
    WitnessDoc {
        y: strings(&witness.y),
        strict_at: witness.strict_at.mask(),
    }
}

fn iteration_doc(it: &IterationRecord) -> IterationDoc {
    IterationDoc {
        k: it.k,
        epsilon: format_rational(&it.tight.epsilon),
        tight: masks(&it.tight.members),
        checked: masks(&it.checked),
        balanced: it.balanced,
        representative: it.representative.as_deref().map(masks),
        h_rank_after: it.h_rank_after,
        lp_solves: it.lp_solves,
        certificate: it.certificate.as_ref().map(certificate_doc),
    }
}

pub fn nucleolus_doc(result: &OracleResult) -> NucleolusDoc {
    NucleolusDoc {
        mode: result.mode.name().into(),
        point: strings(result.point.shares()),
        stages: result
            .stages
            .iter()
            .map(|s| StageDoc {
                epsilon: format_rational(&s.epsilon),
                fixed: masks(&s.fixed),
            })
            .collect(),
    }
}

fn mask_list(masks: &[u32]) -> String {
    let inner: Vec<String> = masks.iter().map(|m| Coalition::from_mask(*m).to_string()).collect();
    format!("[{}]", inner.join(" "))
}

fn weights(map: &BTreeMap<u32, String>) -> String {
    map.iter()
        .map(|(m, w)| format!("{}={w}", Coalition::from_mask(*m)))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn render_text(doc: &ReportDocument) -> String {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "command: {}", doc.command);
    let input = &doc.input;
    if let Some(game) = &input.game {
        let _ = writeln!(w, "game: {game}");
    }
    if let Some(n) = input.n {
        let _ = writeln!(w, "n: {n}");
    }
    if let Some(p) = &input.payoff {
        let _ = writeln!(w, "payoff: ({})", p.join(", "));
    }
    if let Some(a) = &input.algorithm {
        let _ = writeln!(w, "algorithm: {a}");
    }
    if let Some(m) = &input.mode {
        let _ = writeln!(w, "mode: {m}");
    }
    if let Some(t) = &input.t {
        let _ = writeln!(w, "T: {}", mask_list(t));
    }
    if let Some(t0) = &input.t0 {
        let _ = writeln!(w, "T0: {}", mask_list(t0));
    }
    if let Some(c) = &input.checker {
        let _ = writeln!(w, "checker: {c}");
    }
    if let Some(v) = &doc.verdict {
        let _ = writeln!(w, "verdict: {v}");
    }
    if let Some(d) = &doc.diagnostic {
        let _ = writeln!(w, "diagnostic: {d}");
    }
    if let Some(t0) = &doc.t0 {
        let _ = writeln!(w, "tight singletons T0: {}", mask_list(t0));
    }
    for it in &doc.iterations {
        let _ = writeln!(
            w,
            "k={} epsilon={} T={} checked={} {}",
            it.k,
            it.epsilon,
            mask_list(&it.tight),
            mask_list(&it.checked),
            if it.balanced { "balanced" } else { "NOT balanced" }
        );
        if let Some(r) = &it.representative {
            let _ = writeln!(w, "  representative: {}", mask_list(r));
        }
        let _ = writeln!(w, "  rank(H)={} lp_solves={}", it.h_rank_after, it.lp_solves);
        if let Some(c) = &it.certificate {
            write_certificate(w, c, "  ");
        }
    }
    if let Some(c) = &doc.certificate {
        write_certificate(w, c, "");
    }
    if let Some(wit) = &doc.witness {
        let _ = writeln!(
            w,
            "witness y: ({}) strict at {}",
            wit.y.join(", "),
            Coalition::from_mask(wit.strict_at)
        );
    }
    if let Some(imp) = &doc.improving {
        let _ = writeln!(
            w,
            "improving step at k={}: delta={} better=({})",
            imp.k,
            imp.delta,
            imp.better.join(", ")
        );
    }
    for c in &doc.checkers {
        let _ = writeln!(w, "checker {}: {} (lp_solves={})", c.checker, c.verdict, c.lp_solves);
    }
    if let Some(nu) = &doc.nucleolus {
        let _ = writeln!(w, "{}: ({})", nu.mode, nu.point.join(", "));
        for (r, stage) in nu.stages.iter().enumerate() {
            let _ = writeln!(w, "  stage {}: epsilon={} fixed={}", r + 1, stage.epsilon, mask_list(&stage.fixed));
        }
    }
    if let Some(bench) = &doc.bench {
        let _ = writeln!(w, "{:<16} {:>2}  {:<28} {}", "game", "n", "point", "algorithm:verdict/iterations/lps/stored");
        for row in &bench.rows {
            let runs: Vec<String> = row
                .runs
                .iter()
                .map(|r| {
                    format!(
                        "{}:{}/{}/{}/{}",
                        r.algorithm, r.verdict, r.iterations, r.lp_solves, r.stored_coalitions_total
                    )
                })
                .collect();
            let _ = writeln!(
                w,
                "{:<16} {:>2}  {:<28} {}",
                row.label,
                row.n,
                format!("({})", row.point.join(",")),
                runs.join("  ")
            );
        }
        for v in &bench.violations {
            let _ = writeln!(w, "violation: {v}");
        }
        let _ = writeln!(w, "{}", bench.assertion);
    }
    if let Some(c) = &doc.counters {
        let _ = writeln!(
            w,
            "counters: lp_solves={} stored_coalitions_total={} iteration_count={}",
            c.lp_solves, c.stored_coalitions_total, c.iteration_count
        );
    }
    out
}

fn write_certificate(w: &mut String, c: &CertificateDoc, indent: &str) {
    if !c.gamma.is_empty() {
        let _ = writeln!(w, "{indent}gamma: {}", weights(&c.gamma));
    }
    let _ = writeln!(w, "{indent}omega: {}", weights(&c.omega));
}

/// Shares of a payoff as canonical strings.
pub fn payoff_strings(x: &Payoff) -> Vec<String> {
    strings(x.shares())
}
