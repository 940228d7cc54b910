//! JSON report shapes. Schema `ultraprod/1`: field order is fixed by struct
//! declaration order, payloads carry no timestamps, and repeated runs of the
//! same invocation are byte-identical.

use serde::Serialize;

use ultraprod::fol::{SampledTruthSet, TransferReport};
use ultraprod::index_filters::{Provenance, Verdict, VerdictValue};
use ultraprod::proto::Membership;
use ultraprod::ultra::{ForcedOrdering, ResidueReport};

pub const SCHEMA: &str = "ultraprod/1";

#[derive(Serialize)]
pub struct ProvenanceJson {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<u64>,
}

#[derive(Serialize)]
pub struct VerdictJson {
    pub value: &'static str,
    pub decomposition: Option<String>,
    pub provenance: ProvenanceJson,
}

impl From<&Verdict> for VerdictJson {
    fn from(v: &Verdict) -> Self {
        VerdictJson {
            value: match v.value {
                VerdictValue::ForcedTrue => "ForcedTrue",
                VerdictValue::ForcedFalse => "ForcedFalse",
                VerdictValue::Contingent => "Contingent",
            },
            decomposition: v.decomposition.as_ref().map(|d| d.to_string()),
            provenance: match v.provenance {
                Provenance::Exact => ProvenanceJson {
                    kind: "exact",
                    window: None,
                },
                Provenance::Empirical { window } => ProvenanceJson {
                    kind: "empirical",
                    window: Some(window),
                },
            },
        }
    }
}

#[derive(Serialize)]
pub struct EvalReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub family: String,
    pub formula: String,
    pub filter: String,
    pub window: u64,
    pub verdict: VerdictJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_set: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bitmap: Option<Vec<(u64, bool)>>,
}

#[derive(Serialize)]
pub struct ClassifyReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub set: String,
    pub filter: String,
    pub verdict: VerdictJson,
}

#[derive(Serialize)]
pub struct ElemReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub expression: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub element: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ordering: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residues: Option<ResidueJson>,
}

#[derive(Serialize)]
pub struct ResidueJson {
    pub modulus: u64,
    pub classes: Vec<(u64, u64)>,
    pub forced: Option<u64>,
}

impl From<&ResidueReport> for ResidueJson {
    fn from(r: &ResidueReport) -> Self {
        ResidueJson {
            modulus: r.modulus,
            classes: r.table.iter().map(|(&c, &v)| (c, v)).collect(),
            forced: r.forced,
        }
    }
}

pub fn ordering_str(o: ForcedOrdering) -> &'static str {
    match o {
        ForcedOrdering::Less => "ForcedLess",
        ForcedOrdering::Equal => "ForcedEqual",
        ForcedOrdering::Greater => "ForcedGreater",
    }
}

#[derive(Serialize)]
pub struct MembershipJson {
    pub filtration: &'static str,
    pub accepted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl MembershipJson {
    pub fn new(filtration: &'static str, m: &Membership) -> Self {
        match m {
            Membership::Accepted { step } => MembershipJson {
                filtration,
                accepted: true,
                step: Some(*step),
                reason: None,
            },
            Membership::Rejected { reason } => MembershipJson {
                filtration,
                accepted: false,
                step: None,
                reason: Some(reason.clone()),
            },
        }
    }
}

#[derive(Serialize)]
pub struct ProtoReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub input: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub memberships: Option<Vec<MembershipJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<u64>,
}

#[derive(Serialize)]
pub struct TransferJson {
    pub schema: &'static str,
    pub command: &'static str,
    pub family_a: String,
    pub family_b: String,
    pub formula: String,
    pub window: u64,
    pub verdict_a: VerdictJson,
    pub verdict_b: VerdictJson,
    pub exact_a: Option<String>,
    pub exact_b: Option<String>,
    pub exceptional_primes: Vec<u64>,
    pub asymptotically_equivalent: Option<bool>,
    pub agree_on_top_half: bool,
}

pub fn transfer_json(
    report: &TransferReport,
    family_a: String,
    family_b: String,
    formula: String,
) -> TransferJson {
    TransferJson {
        schema: SCHEMA,
        command: "transfer",
        family_a,
        family_b,
        formula,
        window: report.window,
        verdict_a: (&report.verdict_a).into(),
        verdict_b: (&report.verdict_b).into(),
        exact_a: exact_str(&report.truth_a),
        exact_b: exact_str(&report.truth_b),
        exceptional_primes: report.exceptions.clone(),
        asymptotically_equivalent: report.asymptotically_equivalent,
        agree_on_top_half: report.agree_on_top_half,
    }
}

fn exact_str(ts: &SampledTruthSet) -> Option<String> {
    ts.exact.as_ref().map(|s| s.to_string())
}

#[derive(Serialize)]
pub struct SelftestSuite {
    pub name: &'static str,
    pub cases: usize,
    pub passed: bool,
}

#[derive(Serialize)]
pub struct SelftestReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub window: u64,
    pub suites: Vec<SelftestSuite>,
    pub all_passed: bool,
}

#[derive(Serialize)]
pub struct SessionReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub results: Vec<serde_json::Value>,
}

// ---- text renderings ----

impl VerdictJson {
    pub fn text(&self) -> String {
        let mut out = self.value.to_string();
        if let Some(d) = &self.decomposition {
            out.push_str(&format!(" on {d}"));
        }
        match self.provenance.window {
            Some(w) => out.push_str(&format!(" [empirical <= {w}]")),
            None => out.push_str(" [exact]"),
        }
        out
    }
}

impl EvalReport {
    pub fn text(&self) -> String {
        let mut out = format!(
            "{} over {} under {}: {}",
            self.formula,
            self.family,
            self.filter,
            self.verdict.text()
        );
        if let Some(set) = &self.exact_set {
            out.push_str(&format!("\nexact truth set: {set}"));
        }
        if let Some(bits) = &self.bitmap {
            let marks: Vec<String> = bits
                .iter()
                .map(|(p, b)| format!("{p}:{}", if *b { "T" } else { "F" }))
                .collect();
            out.push_str(&format!("\nbitmap: {}", marks.join(" ")));
        }
        out
    }
}

impl ClassifyReport {
    pub fn text(&self) -> String {
        format!("{} under {}: {}", self.set, self.filter, self.verdict.text())
    }
}

impl ElemReport {
    pub fn text(&self) -> String {
        let mut parts = Vec::new();
        if let Some(v) = &self.verdict {
            parts.push(v.text());
        }
        if let Some(w) = &self.witness {
            parts.push(format!("witness {w}"));
        }
        if let Some(e) = &self.element {
            parts.push(e.clone());
        }
        if let Some(o) = &self.ordering {
            parts.push(o.clone());
        }
        if let Some(c) = &self.constant {
            parts.push(c.clone());
        }
        if let Some(r) = &self.residues {
            let entries: Vec<String> = r
                .classes
                .iter()
                .map(|(c, v)| format!("{c} mod {} -> {v}", r.modulus))
                .collect();
            parts.push(match r.forced {
                Some(v) => format!("ForcedValue({v}) {{{}}}", entries.join(", ")),
                None => format!("Contingent {{{}}}", entries.join(", ")),
            });
        }
        parts.join("; ")
    }
}

impl MembershipJson {
    pub fn text(&self) -> String {
        if self.accepted {
            format!("{}: accept(step {})", self.filtration, self.step.unwrap_or(0))
        } else {
            format!(
                "{}: reject ({})",
                self.filtration,
                self.reason.as_deref().unwrap_or("unbounded")
            )
        }
    }
}

impl ProtoReport {
    pub fn text(&self) -> String {
        if let Some(ms) = &self.memberships {
            ms.iter().map(MembershipJson::text).collect::<Vec<_>>().join("\n")
        } else {
            let step = self
                .step
                .map(|s| format!(" (step {s})"))
                .unwrap_or_default();
            format!("{}{step}", self.result.as_deref().unwrap_or(""))
        }
    }
}

impl TransferJson {
    pub fn text(&self) -> String {
        let mut out = format!(
            "{} over {} vs {} (window {}):\n  A: {}\n  B: {}",
            self.formula,
            self.family_a,
            self.family_b,
            self.window,
            self.verdict_a.text(),
            self.verdict_b.text(),
        );
        out.push_str(&format!(
            "\n  exceptional primes: {:?}",
            self.exceptional_primes
        ));
        match self.asymptotically_equivalent {
            Some(true) => out.push_str("\n  asymptotically equivalent for this sentence"),
            Some(false) => out.push_str("\n  NOT asymptotically equivalent for this sentence"),
            None => out.push_str(&format!(
                "\n  no exact conclusion; top-half agreement: {}",
                self.agree_on_top_half
            )),
        }
        out
    }
}

impl SelftestReport {
    pub fn text(&self) -> String {
        let mut lines: Vec<String> = self
            .suites
            .iter()
            .map(|s| {
                format!(
                    "{}: {} ({} cases)",
                    s.name,
                    if s.passed { "PASS" } else { "FAIL" },
                    s.cases
                )
            })
            .collect();
        lines.push(format!(
            "selftest (seed {}): {}",
            self.seed,
            if self.all_passed { "PASS" } else { "FAIL" }
        ));
        lines.join("\n")
    }
}
