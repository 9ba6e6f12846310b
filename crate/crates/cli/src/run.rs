//! Drivers connecting job files to the engine.

use std::time::Instant;

use cr_nondeg::engine::{check_transformation_law_with_base, random_biholomorphism, Pipeline};
use cr_nondeg::rng::SplitMix64;

use crate::job::{lower_job, CliError, JobFile};
use crate::report::{AnalysisReport, InvarianceReport, TrialResult, TOOL_NAME, TOOL_VERSION};

#[derive(Clone, Debug)]
pub struct AnalyzeOptions {
    pub max_order: Option<u32>,
    /// Spare truncation orders on top of the ladder depth and input degrees.
    pub order_margin: u32,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            max_order: None,
            order_margin: 1,
        }
    }
}

pub struct PreparedJob {
    pub pipeline: Pipeline,
    pub k_max: u32,
    pub working_order: u32,
}

/// Lower a job and run all input validation, recentering, graph conversion
/// and tangency verification.
pub fn prepare(job: &JobFile, opts: &AnalyzeOptions) -> Result<PreparedJob, CliError> {
    let lowered = lower_job(job, opts.max_order, opts.order_margin)?;
    let pipeline = Pipeline::prepare(lowered.source, lowered.target, lowered.map)?;
    Ok(PreparedJob {
        pipeline,
        k_max: lowered.k_max,
        working_order: lowered.working_order,
    })
}

pub fn run_analyze(job: &JobFile, opts: &AnalyzeOptions) -> Result<AnalysisReport, CliError> {
    let t0 = Instant::now();
    let prepared = prepare(job, opts)?;
    let report = prepared.pipeline.run(prepared.k_max, true)?;
    Ok(AnalysisReport::from_engine(
        &report,
        prepared.k_max,
        prepared.working_order,
        t0.elapsed().as_millis() as u64,
    ))
}

pub fn run_invariance(
    job: &JobFile,
    seed: u64,
    trials: u32,
    opts: &AnalyzeOptions,
) -> Result<InvarianceReport, CliError> {
    let t0 = Instant::now();
    let prepared = prepare(job, opts)?;
    let base = prepared.pipeline.run(prepared.k_max, false)?;
    let mut rng = SplitMix64::new(seed);
    let mut results = Vec::with_capacity(trials as usize);
    let mut all_hold = true;
    for trial in 0..trials {
        let f = random_biholomorphism(
            prepared.pipeline.target.space(),
            prepared.working_order,
            &mut rng,
        );
        let check =
            check_transformation_law_with_base(&prepared.pipeline, &base, &f, prepared.k_max)?;
        all_hold &= check.holds;
        results.push(TrialResult {
            trial,
            holds: check.holds,
            detail: check.failure,
        });
    }
    Ok(InvarianceReport {
        tool: TOOL_NAME.to_string(),
        version: TOOL_VERSION.to_string(),
        seed,
        trials,
        max_order: prepared.k_max,
        all_hold,
        results,
        timing_ms: t0.elapsed().as_millis() as u64,
    })
}
