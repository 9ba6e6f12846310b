//! Machine-readable and human-readable reports.

use serde::{Deserialize, Serialize};

use cr_nondeg::engine::{NondegeneracyReport, Verdict};

pub const TOOL_NAME: &str = "cr-nondeg";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReportVerdict {
    Nondegenerate { k0: u32 },
    DegenerateUpTo { max_order: u32 },
}

impl From<&Verdict> for ReportVerdict {
    fn from(v: &Verdict) -> Self {
        match v {
            Verdict::Nondegenerate { k0 } => ReportVerdict::Nondegenerate { k0: *k0 },
            Verdict::DegenerateUpTo { k_max } => ReportVerdict::DegenerateUpTo { max_order: *k_max },
        }
    }
}

impl std::fmt::Display for ReportVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReportVerdict::Nondegenerate { k0 } => write!(f, "{k0}-nondegenerate (k0 = {k0})"),
            ReportVerdict::DegenerateUpTo { max_order } => {
                write!(f, "degenerate up to order {max_order}")
            }
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct ReportWitness {
    pub alpha: Vec<u32>,
    /// 1-based index of the defining function whose gradient row was used.
    pub l: usize,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct AnalysisReport {
    pub tool: String,
    pub version: String,
    pub max_order: u32,
    pub working_order: u32,
    /// Dimension N' of the target ambient space; the map is nondegenerate
    /// exactly when the ladder reaches it.
    pub target_dim: usize,
    pub verdict: ReportVerdict,
    /// dims[k] = dim E_k(0).
    pub dims: Vec<usize>,
    /// Number of multiindices with 1 <= |alpha| <= k, per k.
    pub multiindex_counts: Vec<usize>,
    /// Spanning certificate: one (alpha, l) per basis row, insertion order.
    pub witnesses: Vec<ReportWitness>,
    pub tangency: String,
    pub timing_ms: u64,
}

impl AnalysisReport {
    pub fn from_engine(
        report: &NondegeneracyReport,
        max_order: u32,
        working_order: u32,
        timing_ms: u64,
    ) -> AnalysisReport {
        AnalysisReport {
            tool: TOOL_NAME.to_string(),
            version: TOOL_VERSION.to_string(),
            max_order,
            working_order,
            target_dim: report.ladder.target_dim,
            verdict: (&report.verdict).into(),
            dims: report.ladder.dims.clone(),
            multiindex_counts: report.ladder.multiindex_counts.clone(),
            witnesses: report
                .ladder
                .witnesses
                .iter()
                .map(|w| ReportWitness {
                    alpha: w.alpha.clone(),
                    l: w.rho_index + 1,
                })
                .collect(),
            tangency: "verified".to_string(),
            timing_ms,
        }
    }

    pub fn render_human(&self, witnesses: bool) -> String {
        let mut out = String::new();
        out.push_str(" k | dim E_k\n");
        for (k, d) in self.dims.iter().enumerate() {
            out.push_str(&format!("{k:>2} | {d}\n"));
        }
        out.push_str(&format!("verdict: {}\n", self.verdict));
        if witnesses {
            out.push_str("spanning witnesses (multiindex alpha; defining function l):\n");
            for w in &self.witnesses {
                out.push_str(&format!(
                    "  alpha = ({}), l = {}\n",
                    w.alpha
                        .iter()
                        .map(|e| e.to_string())
                        .collect::<Vec<_>>()
                        .join(", "),
                    w.l
                ));
            }
        }
        out
    }

    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            ReportVerdict::Nondegenerate { .. } => 0,
            ReportVerdict::DegenerateUpTo { .. } => 2,
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct TrialResult {
    pub trial: u32,
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct InvarianceReport {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub trials: u32,
    pub max_order: u32,
    pub all_hold: bool,
    pub results: Vec<TrialResult>,
    pub timing_ms: u64,
}

impl InvarianceReport {
    pub fn render_human(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "transformation-law trials: {} (seed {})\n",
            self.trials, self.seed
        ));
        for r in &self.results {
            out.push_str(&format!(
                "  trial {:>2}: {}{}\n",
                r.trial,
                if r.holds { "row spaces match" } else { "VIOLATION" },
                r.detail
                    .as_ref()
                    .map(|d| format!(" ({d})"))
                    .unwrap_or_default()
            ));
        }
        out.push_str(if self.all_hold {
            "all trials hold\n"
        } else {
            "transformation law violated\n"
        });
        out
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct CorpusResult {
    pub name: String,
    pub expected: String,
    pub got: String,
    pub dims: Vec<usize>,
    pub pass: bool,
    pub timing_ms: u64,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct CorpusReport {
    pub tool: String,
    pub version: String,
    pub all_pass: bool,
    pub results: Vec<CorpusResult>,
    pub timing_ms: u64,
}

impl CorpusReport {
    pub fn render_human(&self) -> String {
        let name_w = self
            .results
            .iter()
            .map(|r| r.name.len())
            .max()
            .unwrap_or(4)
            .max(4);
        let exp_w = self
            .results
            .iter()
            .map(|r| r.expected.len())
            .max()
            .unwrap_or(8)
            .max(8);
        let mut out = format!(
            "{:<name_w$}  {:<exp_w$}  {:<exp_w$}  result\n",
            "job", "expected", "got"
        );
        for r in &self.results {
            out.push_str(&format!(
                "{:<name_w$}  {:<exp_w$}  {:<exp_w$}  {}\n",
                r.name,
                r.expected,
                r.got,
                if r.pass { "pass" } else { "FAIL" }
            ));
        }
        out.push_str(if self.all_pass {
            "all corpus jobs pass\n"
        } else {
            "corpus FAILED\n"
        });
        out
    }
}
