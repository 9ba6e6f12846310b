//! Built-in corpus of worked examples with their expected verdicts.
//!
//! The expectations are embedded in the binary so the corpus cannot drift
//! from the code; `cr-nondeg corpus` replays every job through the same path
//! as user job files.

use std::time::Instant;

use crate::job::JobFile;
use crate::report::{AnalysisReport, CorpusReport, CorpusResult, ReportVerdict, TOOL_NAME, TOOL_VERSION};
use crate::run::{run_analyze, AnalyzeOptions};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expected {
    Nondegenerate {
        k0: u32,
        /// Full dimension ladder, when pinned.
        dims: Option<Vec<usize>>,
    },
    DegenerateUpTo {
        k_max: u32,
        /// Largest dimension the ladder may reach.
        max_dim: usize,
    },
}

impl std::fmt::Display for Expected {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Expected::Nondegenerate { k0, .. } => write!(f, "k0 = {k0}"),
            Expected::DegenerateUpTo { k_max, .. } => write!(f, "degenerate up to {k_max}"),
        }
    }
}

/// Does an analysis report satisfy the expectation?
pub fn expected_matches(expected: &Expected, report: &AnalysisReport) -> bool {
    match expected {
        Expected::Nondegenerate { k0, dims } => {
            report.verdict == ReportVerdict::Nondegenerate { k0: *k0 }
                && dims.as_ref().map(|d| d == &report.dims).unwrap_or(true)
        }
        Expected::DegenerateUpTo { k_max, max_dim } => {
            report.verdict == ReportVerdict::DegenerateUpTo { max_order: *k_max }
                && report.dims.iter().max().copied().unwrap_or(0) <= *max_dim
        }
    }
}

pub struct CorpusJob {
    pub name: &'static str,
    pub description: &'static str,
    pub json: &'static str,
    pub expected: Expected,
}

impl CorpusJob {
    pub fn job(&self) -> JobFile {
        JobFile::from_json(self.json).expect("built-in corpus job is valid JSON")
    }
}

pub fn corpus_jobs() -> Vec<CorpusJob> {
    vec![
        CorpusJob {
            name: "quartic-to-quadric",
            description: "H(z,w) = (z^2, w) from Im w = |z|^4 into Im w = |z|^2",
            json: r#"{
                "source": {"type": "graph", "vars": ["z", "w"], "s_vars": ["s"],
                           "phi": ["z^2*conj(z)^2"]},
                "target": {"type": "graph", "vars": ["zp", "wp"], "s_vars": ["t"],
                           "phi": ["zp*conj(zp)"]},
                "map": {"components": ["z^2", "w"]}
            }"#,
            expected: Expected::Nondegenerate {
                k0: 2,
                dims: Some(vec![1, 1, 2]),
            },
        },
        CorpusJob {
            name: "quadric-double-embedding",
            description: "H(z,w) = (z, w, w) into the codimension-two quadric Im w1 = Im w2 = |z'|^2",
            json: r#"{
                "source": {"type": "graph", "vars": ["z", "w"], "s_vars": ["s"],
                           "phi": ["z*conj(z)"]},
                "target": {"type": "graph", "vars": ["zp", "w1", "w2"], "s_vars": ["t1", "t2"],
                           "phi": ["zp*conj(zp)", "zp*conj(zp)"]},
                "map": {"components": ["z", "w", "w"]}
            }"#,
            expected: Expected::Nondegenerate {
                k0: 1,
                dims: Some(vec![2, 3]),
            },
        },
        CorpusJob {
            name: "sphere-faran-h1",
            description: "Faran map (z1, z1 z2, z2^2) from the sphere in C^2 to the sphere in C^3 at (1,0)",
            json: r#"{
                "source": {"type": "extrinsic", "vars": ["Z1", "Z2"],
                           "rho": ["Z1*conj(Z1) + Z2*conj(Z2) - 1"],
                           "basepoint": ["1", "0"]},
                "target": {"type": "extrinsic", "vars": ["W1", "W2", "W3"],
                           "rho": ["W1*conj(W1) + W2*conj(W2) + W3*conj(W3) - 1"],
                           "basepoint": ["1", "0", "0"]},
                "map": {"components": ["Z1", "Z1*Z2", "Z2^2"]}
            }"#,
            expected: Expected::Nondegenerate { k0: 2, dims: None },
        },
        CorpusJob {
            name: "sphere-faran-h2",
            description: "Faran map (z1^2, sqrt(2) z1 z2, z2^2) between the same spheres",
            json: r#"{
                "source": {"type": "extrinsic", "vars": ["Z1", "Z2"],
                           "rho": ["Z1*conj(Z1) + Z2*conj(Z2) - 1"],
                           "basepoint": ["1", "0"]},
                "target": {"type": "extrinsic", "vars": ["W1", "W2", "W3"],
                           "rho": ["W1*conj(W1) + W2*conj(W2) + W3*conj(W3) - 1"],
                           "basepoint": ["1", "0", "0"]},
                "map": {"components": ["Z1^2", "sqrt(2)*Z1*Z2", "Z2^2"]}
            }"#,
            expected: Expected::Nondegenerate { k0: 2, dims: None },
        },
        CorpusJob {
            name: "sphere-faran-h3",
            description: "Faran map (z1^3, sqrt(3) z1 z2, z2^3) between the same spheres",
            json: r#"{
                "source": {"type": "extrinsic", "vars": ["Z1", "Z2"],
                           "rho": ["Z1*conj(Z1) + Z2*conj(Z2) - 1"],
                           "basepoint": ["1", "0"]},
                "target": {"type": "extrinsic", "vars": ["W1", "W2", "W3"],
                           "rho": ["W1*conj(W1) + W2*conj(W2) + W3*conj(W3) - 1"],
                           "basepoint": ["1", "0", "0"]},
                "map": {"components": ["Z1^3", "sqrt(3)*Z1*Z2", "Z2^3"]}
            }"#,
            expected: Expected::Nondegenerate { k0: 3, dims: None },
        },
        CorpusJob {
            name: "sphere-linear-embedding",
            description: "linear inclusion of the sphere in C^3 into the sphere in C^4; never nondegenerate",
            json: r#"{
                "truncation_order": 6,
                "source": {"type": "extrinsic", "vars": ["Z1", "Z2", "Z3"],
                           "rho": ["Z1*conj(Z1) + Z2*conj(Z2) + Z3*conj(Z3) - 1"],
                           "basepoint": ["1", "0", "0"]},
                "target": {"type": "extrinsic", "vars": ["W1", "W2", "W3", "W4"],
                           "rho": ["W1*conj(W1) + W2*conj(W2) + W3*conj(W3) + W4*conj(W4) - 1"],
                           "basepoint": ["1", "0", "0", "0"]},
                "map": {"components": ["Z1", "Z2", "Z3", "0"]}
            }"#,
            expected: Expected::DegenerateUpTo {
                k_max: 6,
                max_dim: 3,
            },
        },
        CorpusJob {
            name: "sheared-hyperquadric",
            description: "(z^2, z, 0) into the sheared hyperquadric Im tau = |zeta1 + zeta2 - zeta2^2|^2 - |zeta2|^2",
            json: r#"{
                "truncation_order": 6,
                "source": {"type": "graph", "vars": ["z", "w"], "s_vars": ["s"],
                           "phi": ["z*conj(z)"]},
                "target": {"type": "extrinsic", "vars": ["zeta1", "zeta2", "tau"],
                           "rho": ["-1/2*i*(tau - conj(tau)) - (zeta1 + zeta2 - zeta2^2)*conj(zeta1 + zeta2 - zeta2^2) + zeta2*conj(zeta2)"]},
                "map": {"components": ["z^2", "z", "0"]}
            }"#,
            expected: Expected::DegenerateUpTo {
                k_max: 6,
                max_dim: 2,
            },
        },
        CorpusJob {
            name: "quartic-identity",
            description: "identity map of Im w = |z|^4; the manifold is not finitely nondegenerate at 0",
            json: r#"{
                "truncation_order": 6,
                "source": {"type": "graph", "vars": ["z", "w"], "s_vars": ["s"],
                           "phi": ["z^2*conj(z)^2"]},
                "target": {"type": "graph", "vars": ["zp", "wp"], "s_vars": ["t"],
                           "phi": ["zp^2*conj(zp)^2"]},
                "map": {"components": ["z", "w"]}
            }"#,
            expected: Expected::DegenerateUpTo {
                k_max: 6,
                max_dim: 1,
            },
        },
    ]
}

pub fn run_corpus() -> CorpusReport {
    let t0 = Instant::now();
    let mut results = Vec::new();
    let mut all_pass = true;
    for cj in corpus_jobs() {
        let job_t0 = Instant::now();
        let outcome = run_analyze(&cj.job(), &AnalyzeOptions::default());
        let (got, dims, pass) = match &outcome {
            Ok(report) => (
                report.verdict.to_string(),
                report.dims.clone(),
                expected_matches(&cj.expected, report),
            ),
            Err(e) => (format!("error: {e}"), Vec::new(), false),
        };
        all_pass &= pass;
        results.push(CorpusResult {
            name: cj.name.to_string(),
            expected: cj.expected.to_string(),
            got,
            dims,
            pass,
            timing_ms: job_t0.elapsed().as_millis() as u64,
        });
    }
    CorpusReport {
        tool: TOOL_NAME.to_string(),
        version: TOOL_VERSION.to_string(),
        all_pass,
        results,
        timing_ms: t0.elapsed().as_millis() as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_jobs_parse() {
        for cj in corpus_jobs() {
            let _ = cj.job();
        }
        assert_eq!(corpus_jobs().len(), 8);
    }

    #[test]
    fn wrong_expectation_is_detected() {
        // harness self-test: a deliberately wrong expectation must not pass
        let cj = &corpus_jobs()[0];
        let report = run_analyze(&cj.job(), &AnalyzeOptions::default()).unwrap();
        assert!(expected_matches(&cj.expected, &report));
        let wrong = Expected::Nondegenerate {
            k0: 5,
            dims: None,
        };
        assert!(!expected_matches(&wrong, &report));
        let wrong_dims = Expected::Nondegenerate {
            k0: 2,
            dims: Some(vec![1, 2, 2]),
        };
        assert!(!expected_matches(&wrong_dims, &report));
    }
}
