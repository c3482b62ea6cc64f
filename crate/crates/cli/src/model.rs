//! JSON model files.
//!
//! ```json
//! {
//!   "states": 2,
//!   "pi": [0.5, 0.5],
//!   "kernels": [[[0.9, 0.1], [0.1, 0.9]], [[0.6, 0.4], [0.4, 0.6]]],
//!   "f": [1, -1],
//!   "lambda_grid": [0.5, 0.9],
//!   "simulation": { "steps": 4096, "replicas": 200, "seed": 1 }
//! }
//! ```
//!
//! `states` is either a count or a list of distinct labels.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use scanvar::hilbert::{validate_family_with, DiagnosticsReport};
use scanvar::tolerance::{TAU_REV, TAU_STOCH};
use scanvar::{Dist, Kernel, KernelFamily, ObsFunction, StateSpace};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum States {
    Count(usize),
    Labels(Vec<String>),
}

impl States {
    pub fn n(&self) -> usize {
        match self {
            States::Count(n) => *n,
            States::Labels(l) => l.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSpec {
    pub steps: Option<usize>,
    pub replicas: Option<usize>,
    pub seed: Option<u64>,
}

/// The file as written, before any checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModel {
    pub states: States,
    pub pi: Vec<f64>,
    pub kernels: Vec<Vec<Vec<f64>>>,
    pub f: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSpec>,
}

/// A model that passed every check.
#[derive(Debug, Clone)]
pub struct ModelFile {
    pub family: KernelFamily,
    pub f: ObsFunction,
    pub lambda_grid: Option<Vec<f64>>,
    pub simulation: SimulationSpec,
}

impl ModelFile {
    pub fn n(&self) -> usize {
        self.family.n()
    }

    pub fn k(&self) -> usize {
        self.family.k()
    }
}

/// Shape problems and, when the shapes are consistent, the numerical
/// diagnostics of the family.
#[derive(Debug, Clone)]
pub struct ModelCheck {
    pub problems: Vec<String>,
    pub diagnostics: Option<DiagnosticsReport>,
}

impl ModelCheck {
    pub fn passed(&self) -> bool {
        self.problems.is_empty() && self.diagnostics.as_ref().is_some_and(|d| d.passed)
    }

    pub fn summary(&self) -> String {
        let mut lines: Vec<String> = self.problems.iter().map(|p| format!("violation: {p}")).collect();
        if let Some(d) = &self.diagnostics {
            lines.push(d.to_string());
        }
        lines.join("\n")
    }
}

pub fn read_raw(path: &Path) -> Result<RawModel> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        CliError::Parse {
            path: path.to_path_buf(),
            detail: if field == "." {
                inner.to_string()
            } else {
                format!("field `{field}`: {inner}")
            },
        }
    })
}

fn to_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), rows.first().map_or(0, Vec::len), |i, j| rows[i][j])
}

pub fn check_model(raw: &RawModel, stoch_tol: f64, rev_tol: f64) -> ModelCheck {
    let n = raw.states.n();
    let mut problems = Vec::new();
    if n == 0 {
        problems.push("states: the state space is empty".into());
    }
    if let States::Labels(labels) = &raw.states {
        if let Err(e) = StateSpace::with_labels(labels.clone()) {
            problems.push(format!("states: {e}"));
        }
    }
    if raw.pi.len() != n {
        problems.push(format!("pi has {} entries, expected n = {n}", raw.pi.len()));
    }
    if raw.f.len() != n {
        problems.push(format!("f has {} entries, expected n = {n}", raw.f.len()));
    }
    if raw.kernels.is_empty() {
        problems.push("kernels is empty".into());
    }
    for (i, k) in raw.kernels.iter().enumerate() {
        if k.len() != n {
            problems.push(format!("kernels[{i}] has {} rows, expected n = {n}", k.len()));
        }
        for (r, row) in k.iter().enumerate() {
            if row.len() != n {
                problems.push(format!("kernels[{i}][{r}] has {} entries, expected n = {n}", row.len()));
            }
        }
    }
    for (i, l) in raw.lambda_grid.iter().flatten().enumerate() {
        if !(0.0..1.0).contains(l) {
            problems.push(format!("lambda_grid[{i}] = {l} is outside [0, 1)"));
        }
    }
    if let Some(sim) = &raw.simulation {
        if sim.steps == Some(0) {
            problems.push("simulation.steps must be at least 1".into());
        }
        if sim.replicas.is_some_and(|r| r < 2) {
            problems.push("simulation.replicas must be at least 2".into());
        }
    }
    let shapes_ok = raw.pi.len() == n && raw.kernels.iter().all(|k| k.len() == n && k.iter().all(|r| r.len() == n));
    let diagnostics = shapes_ok.then(|| {
        let mats: Vec<DMatrix<f64>> = raw.kernels.iter().map(|k| to_matrix(k)).collect();
        validate_family_with(&raw.pi, &mats, stoch_tol, rev_tol)
    });
    ModelCheck { problems, diagnostics }
}

/// Parses and validates a model at the library's default tolerances. The
/// validation error lists every violated invariant.
pub fn load_model(path: &Path) -> Result<ModelFile> {
    let raw = read_raw(path)?;
    let check = check_model(&raw, TAU_STOCH, TAU_REV);
    if !check.passed() {
        return Err(CliError::Validation(format!(
            "model {} is invalid:\n{}",
            path.display(),
            check.summary()
        )));
    }
    build(raw)
}

fn build(raw: RawModel) -> Result<ModelFile> {
    let space = match &raw.states {
        States::Count(n) => StateSpace::new(*n)?,
        States::Labels(l) => StateSpace::with_labels(l.clone())?,
    };
    let pi = Dist::new(raw.pi)?;
    let kernels = raw
        .kernels
        .iter()
        .map(|k| Kernel::new(to_matrix(k)))
        .collect::<scanvar::Result<Vec<_>>>()?;
    Ok(ModelFile {
        family: KernelFamily::with_space(space, pi, kernels)?,
        f: ObsFunction::new(raw.f)?,
        lambda_grid: raw.lambda_grid,
        simulation: raw.simulation.unwrap_or_default(),
    })
}

/// The two-state, two-kernel example with closed-form variances.
pub fn demo_model() -> RawModel {
    RawModel {
        states: States::Count(2),
        pi: vec![0.5, 0.5],
        kernels: vec![vec![vec![0.9, 0.1], vec![0.1, 0.9]], vec![vec![0.6, 0.4], vec![0.4, 0.6]]],
        f: vec![1.0, -1.0],
        lambda_grid: Some(vec![0.1, 0.3, 0.5, 0.7, 0.9, 0.99]),
        simulation: None,
    }
}

pub fn write_model(path: &Path, raw: &RawModel) -> Result<()> {
    let mut text = serde_json::to_string_pretty(raw).expect("model serialises");
    text.push('\n');
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
