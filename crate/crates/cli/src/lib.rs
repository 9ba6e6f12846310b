//! Job loading, reporting and the built-in corpus for the `cr-nondeg` CLI.

pub mod corpus;
pub mod job;
pub mod report;
pub mod run;

pub use job::{CliError, JobFile, ManifoldBlock, MapBlock};
pub use report::{AnalysisReport, CorpusReport, InvarianceReport, ReportVerdict};
pub use run::{prepare, run_analyze, run_invariance, AnalyzeOptions, PreparedJob};
