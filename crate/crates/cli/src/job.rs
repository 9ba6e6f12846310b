//! Job files: JSON descriptions of a source manifold, a target manifold and
//! a polynomial map, with expressions as strings in the input grammar.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use cr_nondeg::engine::{EngineError, ManifoldInput};
use cr_nondeg::expr::{self, Expr, ParseError};
use cr_nondeg::jet::{Jet, VarSpace};
use cr_nondeg::manifold::{CrMap, ExtrinsicManifold, GraphManifold};
use cr_nondeg::scalar::Complex;

/// Hard cap on the derived jet working order; guards against degree blowups.
pub const MAX_WORKING_ORDER: u32 = 64;

pub const DEFAULT_MAX_ORDER: u32 = 10;

/// Environment variable overriding the built-in default maximum derivative
/// order (a job file's `truncation_order` still wins over it).
pub const MAX_ORDER_ENV: &str = "CR_NONDEG_MAX_ORDER";

#[derive(Debug)]
pub enum CliError {
    Io(std::io::Error),
    Json(serde_json::Error),
    Job(String),
    Expr { context: String, err: ParseError },
    Engine(EngineError),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Json(e) => write!(f, "invalid job file: {e}"),
            CliError::Job(s) => write!(f, "invalid job: {s}"),
            CliError::Expr { context, err } => write!(f, "in {context}: {err}"),
            CliError::Engine(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Json(e)
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        CliError::Engine(e)
    }
}

impl From<cr_nondeg::manifold::ManifoldError> for CliError {
    fn from(e: cr_nondeg::manifold::ManifoldError) -> Self {
        CliError::Engine(EngineError::Manifold(e))
    }
}

// =============================================================================
// Schema
// =============================================================================

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct JobFile {
    /// Maximum derivative order for the span ladder (default 10).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation_order: Option<u32>,
    pub source: ManifoldBlock,
    pub target: ManifoldBlock,
    pub map: MapBlock,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ManifoldBlock {
    /// Defining functions rho(Z, conj Z) = 0 with a base point on the
    /// manifold (default: the origin).
    Extrinsic {
        vars: Vec<String>,
        rho: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        basepoint: Option<Vec<String>>,
    },
    /// Graph form Im w = phi(z, conj z, Re w), centered at the origin.
    /// `vars` lists the ambient holomorphic coordinates (CR variables first,
    /// then the normal ones); `s_vars` names Re w inside the phi expressions.
    Graph {
        vars: Vec<String>,
        s_vars: Vec<String>,
        phi: Vec<String>,
    },
}

impl ManifoldBlock {
    pub fn vars(&self) -> &[String] {
        match self {
            ManifoldBlock::Extrinsic { vars, .. } | ManifoldBlock::Graph { vars, .. } => vars,
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct MapBlock {
    pub components: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_basepoint: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_basepoint: Option<Vec<String>>,
}

impl JobFile {
    pub fn from_json(text: &str) -> Result<JobFile, CliError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &std::path::Path) -> Result<JobFile, CliError> {
        JobFile::from_json(&std::fs::read_to_string(path)?)
    }
}

// =============================================================================
// Validation and lowering to engine inputs
// =============================================================================

const RESERVED: [&str; 3] = ["i", "conj", "sqrt"];

fn check_names(context: &str, names: &[String]) -> Result<(), CliError> {
    if names.is_empty() {
        return Err(CliError::Job(format!("{context}: no variables declared")));
    }
    for name in names {
        let mut chars = name.chars();
        let head_ok = chars
            .next()
            .map(|c| c.is_ascii_alphabetic() || c == '_')
            .unwrap_or(false);
        if !head_ok || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(CliError::Job(format!(
                "{context}: `{name}` is not a valid variable name"
            )));
        }
        if RESERVED.contains(&name.as_str()) {
            return Err(CliError::Job(format!(
                "{context}: `{name}` is reserved in the expression grammar"
            )));
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    for name in names {
        if !seen.insert(name) {
            return Err(CliError::Job(format!(
                "{context}: variable `{name}` declared twice"
            )));
        }
    }
    Ok(())
}

fn parse_all(
    context: &str,
    texts: &[String],
    space: &Arc<VarSpace>,
) -> Result<Vec<Expr>, CliError> {
    texts
        .iter()
        .enumerate()
        .map(|(k, t)| {
            expr::parse(t, space).map_err(|err| CliError::Expr {
                context: format!("{context}[{k}]"),
                err,
            })
        })
        .collect()
}

fn constant_value(context: &str, e: &Expr, space: &Arc<VarSpace>) -> Result<Complex, CliError> {
    let jet = expr::to_jet(e, space, 1);
    if jet.max_degree() > 0 {
        return Err(CliError::Job(format!(
            "{context}: base point coordinates must be constants"
        )));
    }
    Ok(jet.eval0())
}

struct LoweredManifold {
    asts: Vec<Expr>,
    space: Arc<VarSpace>,
    ambient: Arc<VarSpace>,
    basepoint: Vec<Complex>,
}

fn lower_manifold(context: &str, block: &ManifoldBlock) -> Result<LoweredManifold, CliError> {
    match block {
        ManifoldBlock::Extrinsic {
            vars,
            rho,
            basepoint,
        } => {
            check_names(context, vars)?;
            if rho.is_empty() {
                return Err(CliError::Job(format!(
                    "{context}: at least one defining function required"
                )));
            }
            let space = ExtrinsicManifold::make_space(vars);
            let asts = parse_all(&format!("{context}.rho"), rho, &space)?;
            let basepoint = match basepoint {
                None => vec![Complex::zero(); vars.len()],
                Some(coords) => {
                    if coords.len() != vars.len() {
                        return Err(CliError::Job(format!(
                            "{context}: base point has {} coordinates for {} variables",
                            coords.len(),
                            vars.len()
                        )));
                    }
                    let bp_asts = parse_all(&format!("{context}.basepoint"), coords, &space)?;
                    bp_asts
                        .iter()
                        .map(|e| constant_value(context, e, &space))
                        .collect::<Result<_, _>>()?
                }
            };
            Ok(LoweredManifold {
                asts,
                ambient: space.clone(),
                space,
                basepoint,
            })
        }
        ManifoldBlock::Graph { vars, s_vars, phi } => {
            check_names(context, vars)?;
            check_names(&format!("{context}.s_vars"), s_vars)?;
            let d = s_vars.len();
            if vars.len() <= d {
                return Err(CliError::Job(format!(
                    "{context}: need more ambient variables than graph equations"
                )));
            }
            if phi.len() != d {
                return Err(CliError::Job(format!(
                    "{context}: {} phi expressions for {} Re-w variables",
                    phi.len(),
                    d
                )));
            }
            let n = vars.len() - d;
            let mut all_names = vars.clone();
            all_names.extend(s_vars.iter().cloned());
            check_names(context, &all_names)?;
            let cr: Vec<String> = vars[..n].to_vec();
            let s_list = s_vars.clone();
            let graph_space = GraphManifold::make_graph_space(&cr, &s_list);
            let ambient = ExtrinsicManifold::make_space(vars);
            let asts = parse_all(&format!("{context}.phi"), phi, &graph_space)?;
            Ok(LoweredManifold {
                asts,
                space: graph_space,
                ambient,
                basepoint: vec![Complex::zero(); vars.len()],
            })
        }
    }
}

/// Everything an analysis needs, jets evaluated at the derived working order.
#[derive(Debug)]
pub struct LoweredJob {
    pub source: ManifoldInput,
    pub target: ManifoldInput,
    pub map: CrMap,
    pub k_max: u32,
    pub working_order: u32,
}

/// Resolution for the maximum derivative order: CLI flag, then the job file,
/// then the environment default, then 10.
pub fn resolve_max_order(job: &JobFile, flag: Option<u32>) -> u32 {
    flag.or(job.truncation_order)
        .or_else(|| {
            std::env::var(MAX_ORDER_ENV)
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(DEFAULT_MAX_ORDER)
}

pub fn lower_job(
    job: &JobFile,
    max_order_flag: Option<u32>,
    order_margin: u32,
) -> Result<LoweredJob, CliError> {
    let k_max = resolve_max_order(job, max_order_flag);
    let source = lower_manifold("source", &job.source)?;
    let target = lower_manifold("target", &job.target)?;

    let map_asts = parse_all("map.components", &job.map.components, &source.ambient)?;
    if map_asts.len() != target.ambient.holomorphic().len() {
        return Err(CliError::Job(format!(
            "map has {} components but the target has {} coordinates",
            map_asts.len(),
            target.ambient.holomorphic().len()
        )));
    }
    let map_source_bp = match &job.map.source_basepoint {
        None => source.basepoint.clone(),
        Some(coords) => parse_all("map.source_basepoint", coords, &source.ambient)?
            .iter()
            .map(|e| constant_value("map.source_basepoint", e, &source.ambient))
            .collect::<Result<_, _>>()?,
    };
    let map_target_bp = match &job.map.target_basepoint {
        None => target.basepoint.clone(),
        Some(coords) => parse_all("map.target_basepoint", coords, &target.ambient)?
            .iter()
            .map(|e| constant_value("map.target_basepoint", e, &target.ambient))
            .collect::<Result<_, _>>()?,
    };

    // working order: one spare order on top of the requested ladder depth and
    // the input degrees
    let mut max_deg = 0u32;
    for ast in source
        .asts
        .iter()
        .chain(target.asts.iter())
        .chain(map_asts.iter())
    {
        max_deg = max_deg.max(expr::degree_bound(ast));
    }
    let working_order = k_max.max(max_deg).saturating_add(order_margin);
    if working_order > MAX_WORKING_ORDER {
        return Err(CliError::Job(format!(
            "derived working order {working_order} exceeds the limit {MAX_WORKING_ORDER}; lower the truncation order or the input degrees"
        )));
    }

    let build_manifold = |lowered: &LoweredManifold,
                          block: &ManifoldBlock|
     -> Result<ManifoldInput, CliError> {
        let jets: Vec<Jet> = lowered
            .asts
            .iter()
            .map(|e| expr::to_jet(e, &lowered.space, working_order))
            .collect();
        match block {
            ManifoldBlock::Extrinsic { vars, .. } => Ok(ManifoldInput::Extrinsic(
                ExtrinsicManifold::new(vars.clone(), jets, lowered.basepoint.clone())?,
            )),
            ManifoldBlock::Graph { vars, s_vars, .. } => {
                let n = vars.len() - s_vars.len();
                Ok(ManifoldInput::Graph(GraphManifold::new(
                    vars[..n].to_vec(),
                    vars[n..].to_vec(),
                    s_vars.clone(),
                    jets,
                )?))
            }
        }
    };

    let source_input = build_manifold(&source, &job.source)?;
    let target_input = build_manifold(&target, &job.target)?;
    let map_jets: Vec<Jet> = map_asts
        .iter()
        .map(|e| expr::to_jet(e, &source.ambient, working_order))
        .collect();
    let map = CrMap::new(map_jets, map_source_bp, map_target_bp)?;

    Ok(LoweredJob {
        source: source_input,
        target: target_input,
        map,
        k_max,
        working_order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_job() -> JobFile {
        JobFile::from_json(
            r#"{
              "source": {"type": "graph", "vars": ["z", "w"], "s_vars": ["s"], "phi": ["z*conj(z)"]},
              "target": {"type": "graph", "vars": ["zp", "wp"], "s_vars": ["t"], "phi": ["zp*conj(zp)"]},
              "map": {"components": ["z", "w"]}
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn lowers_a_graph_job() {
        let job = minimal_job();
        let lowered = lower_job(&job, None, 1).unwrap();
        assert_eq!(lowered.k_max, DEFAULT_MAX_ORDER);
        assert_eq!(lowered.working_order, 11);
    }

    #[test]
    fn flag_overrides_job_order() {
        let mut job = minimal_job();
        job.truncation_order = Some(6);
        assert_eq!(resolve_max_order(&job, None), 6);
        assert_eq!(resolve_max_order(&job, Some(4)), 4);
    }

    #[test]
    fn rejects_reserved_names() {
        let json = r#"{
          "source": {"type": "graph", "vars": ["i", "w"], "s_vars": ["s"], "phi": ["0"]},
          "target": {"type": "graph", "vars": ["zp", "wp"], "s_vars": ["t"], "phi": ["0"]},
          "map": {"components": ["w", "w"]}
        }"#;
        let job = JobFile::from_json(json).unwrap();
        let err = lower_job(&job, None, 1).unwrap_err();
        assert!(matches!(err, CliError::Job(_)));
    }

    #[test]
    fn rejects_nonconstant_basepoint() {
        let json = r#"{
          "source": {"type": "extrinsic", "vars": ["z", "w"],
                     "rho": ["-1/2*i*(w - conj(w)) - z*conj(z)"],
                     "basepoint": ["z", "0"]},
          "target": {"type": "graph", "vars": ["zp", "wp"], "s_vars": ["t"], "phi": ["zp*conj(zp)"]},
          "map": {"components": ["z", "w"]}
        }"#;
        let job = JobFile::from_json(json).unwrap();
        let err = lower_job(&job, None, 1).unwrap_err();
        assert!(err.to_string().contains("constant"));
    }

    #[test]
    fn rejects_component_count_mismatch() {
        let json = r#"{
          "source": {"type": "graph", "vars": ["z", "w"], "s_vars": ["s"], "phi": ["z*conj(z)"]},
          "target": {"type": "graph", "vars": ["zp", "wp"], "s_vars": ["t"], "phi": ["zp*conj(zp)"]},
          "map": {"components": ["z", "w", "w"]}
        }"#;
        let job = JobFile::from_json(json).unwrap();
        let err = lower_job(&job, None, 1).unwrap_err();
        assert!(err.to_string().contains("components"));
    }

    #[test]
    fn caps_the_derived_working_order() {
        let json = r#"{
          "source": {"type": "graph", "vars": ["z", "w"], "s_vars": ["s"], "phi": ["z^40*conj(z)^40"]},
          "target": {"type": "graph", "vars": ["zp", "wp"], "s_vars": ["t"], "phi": ["zp*conj(zp)"]},
          "map": {"components": ["z", "w"]}
        }"#;
        let job = JobFile::from_json(json).unwrap();
        let err = lower_job(&job, None, 1).unwrap_err();
        assert!(err.to_string().contains("working order"), "{err}");
    }

    #[test]
    fn expression_errors_carry_context() {
        let json = r#"{
          "source": {"type": "graph", "vars": ["z", "w"], "s_vars": ["s"], "phi": ["z*conj(q)"]},
          "target": {"type": "graph", "vars": ["zp", "wp"], "s_vars": ["t"], "phi": ["zp*conj(zp)"]},
          "map": {"components": ["z", "w"]}
        }"#;
        let job = JobFile::from_json(json).unwrap();
        let err = lower_job(&job, None, 1).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("source.phi[0]"), "message: {msg}");
        assert!(msg.contains("unknown variable"), "message: {msg}");
    }
}
