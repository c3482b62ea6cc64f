use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use scanvar::ordering::{check_peskun_ordering, BetaPath, PeskunOrderingReport};
use scanvar::simulate::estimate_variance;
use scanvar::tolerance::{TAU_NUM, TAU_REV, TAU_STOCH};
use scanvar::variance::{
    finite_m_variance_exact, summability_check, var_limit, variance_report, DEFAULT_SERIES_TERMS,
};
use scanvar::{Error, Scheme, SchemeSelector, VarianceMethod};

use crate::error::{CliError, Result};
use crate::model::{check_model, demo_model, load_model, read_raw, write_model, ModelFile};
use crate::report::{compare_csv, csv, fmt_num, ReportRow, PESKUN_HEADER, SIMULATE_HEADER};
use crate::{Flags, MethodArg};

pub const DEFAULT_LAMBDAS: [f64; 6] = [0.1, 0.3, 0.5, 0.7, 0.9, 0.99];
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_STEPS: usize = 4096;
pub const DEFAULT_REPLICAS: usize = 200;
/// Monte Carlo estimates further than this many standard errors from the
/// exact value fail `simulate`.
pub const Z_LIMIT: f64 = 3.0;
pub const DEMO_MODEL_PATH: &str = "demo_model.json";

const BETA_GRID_POINTS: usize = 11;

fn require_model(path: &Option<PathBuf>, flag: &str) -> Result<PathBuf> {
    path.clone()
        .ok_or_else(|| CliError::Usage(format!("missing required flag {flag} <path>")))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

fn lambdas(flags: &Flags, model: &ModelFile) -> Vec<f64> {
    flags
        .lambda
        .clone()
        .or_else(|| model.lambda_grid.clone())
        .unwrap_or_else(|| DEFAULT_LAMBDAS.to_vec())
}

fn method(flags: &Flags) -> VarianceMethod {
    match flags.method {
        Some(MethodArg::Series) => VarianceMethod::Series,
        _ => VarianceMethod::Resolvent,
    }
}

fn tol(flags: &Flags) -> Result<f64> {
    let t = flags.tol.unwrap_or(DEFAULT_TOL);
    if t.is_finite() && t >= 0.0 {
        Ok(t)
    } else {
        Err(CliError::Usage(format!("--tol must be a nonnegative number, got {t}")))
    }
}

pub fn validate(flags: &Flags) -> Result<()> {
    let path = require_model(&flags.model, "--model")?;
    let raw = read_raw(&path)?;
    let (stoch, rev) = flags.tol.map_or((TAU_STOCH, TAU_REV), |t| (t, t));
    let check = check_model(&raw, stoch, rev);
    emit(&flags.out, &format!("{}\n", check.summary()))?;
    if check.passed() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("model {} failed validation", path.display())))
    }
}

/// Rows for `compare`: one per λ, then the limit when the family is summable.
pub fn compare_rows(model: &ModelFile, grid: &[f64], method: VarianceMethod, series_terms: usize) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::with_capacity(grid.len() + 1);
    for &lambda in grid {
        let r = variance_report(&model.family, &model.f, lambda, method, series_terms)?;
        rows.push(ReportRow::from(&r));
    }
    let summ = summability_check(&model.family, &model.f)?;
    if summ.absolutely_summable {
        rows.push(ReportRow::limit(
            var_limit(&model.family, &model.f, SchemeSelector::Strat)?,
            var_limit(&model.family, &model.f, SchemeSelector::Rand)?,
        ));
    } else {
        eprintln!(
            "note: no limit row; full-cycle contraction {} is not below 1",
            summ.cycle_contraction
        );
    }
    Ok(rows)
}

/// The two-kernel ordering and its lower bound, row by row.
pub fn ordering_failures(rows: &[ReportRow], tol: f64) -> Vec<String> {
    let mut failures = Vec::new();
    for r in rows {
        let at = if r.is_limit() { "the limit".to_string() } else { format!("lambda = {}", fmt_num(r.lambda)) };
        if r.gap < -tol {
            failures.push(format!(
                "k=2 ordering var_rand >= var_strat violated at {at}: var_rand - var_strat = {:e} < -{tol:e}",
                r.gap
            ));
        }
        if let Some(b) = r.gap_lower_bound {
            if r.gap < b - tol {
                failures.push(format!(
                    "gap lower bound violated at {at}: var_rand - var_strat = {:e} < bound {b:e} - {tol:e}",
                    r.gap
                ));
            }
            if b < -tol {
                failures.push(format!("gap lower bound is negative at {at}: {b:e} < -{tol:e}"));
            }
        }
    }
    failures
}

pub fn compare(flags: &Flags) -> Result<()> {
    let path = require_model(&flags.model, "--model")?;
    compare_model(&path, flags)
}

fn compare_model(path: &Path, flags: &Flags) -> Result<()> {
    let model = load_model(path)?;
    let tol = tol(flags)?;
    let rows = compare_rows(
        &model,
        &lambdas(flags, &model),
        method(flags),
        flags.series_terms.unwrap_or(DEFAULT_SERIES_TERMS),
    )?;
    emit(&flags.out, &compare_csv(&rows))?;
    if model.k() != 2 {
        eprintln!("note: k = {}; the ordering is only asserted for k = 2", model.k());
        return Ok(());
    }
    let failures = ordering_failures(&rows, tol);
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Assertion(failures))
    }
}

fn peskun_csv(report: &PeskunOrderingReport) -> String {
    csv(
        PESKUN_HEADER,
        report.rows.iter().map(|r| {
            vec![
                fmt_num(r.lambda),
                fmt_num(r.var_strat_a),
                fmt_num(r.var_strat_b),
                fmt_num(r.gap),
                if r.lambda == 1.0 { "limit" } else { "resolvent" }.to_string(),
            ]
        }),
    )
}

pub fn peskun(flags: &Flags) -> Result<()> {
    let a = load_model(&require_model(&flags.model, "--model")?)?;
    let b = load_model(&require_model(&flags.model_b, "--model-b")?)?;
    let f_diff = (a.f.values() - b.f.values()).amax();
    if a.n() != b.n() || f_diff > TAU_NUM {
        return Err(CliError::Validation(
            "--model and --model-b must share the state space and the function f".into(),
        ));
    }
    let tol = tol(flags)?;
    let grid = lambdas(flags, &a);
    let report = match check_peskun_ordering(&a.family, &b.family, &a.f, &grid, tol) {
        Ok(r) => r,
        Err(Error::PreconditionNotMet {
            failing,
            min_eigenvalue,
            report,
        }) => {
            emit(&flags.out, &peskun_csv(&report))?;
            return Err(CliError::Validation(format!(
                "dominance hypothesis fails for kernel(s) {failing:?}: the symmetrised Pi_b - Pi_a has eigenvalue {min_eigenvalue:e} < 0; rows are exploratory only"
            )));
        }
        Err(e) => return Err(e.into()),
    };
    emit(&flags.out, &peskun_csv(&report))?;

    let mut failures: Vec<String> = report
        .rows
        .iter()
        .filter(|r| !r.holds)
        .map(|r| {
            format!(
                "deterministic-scan Peskun ordering violated at lambda = {}: var_strat(a) - var_strat(b) = {:e} > {tol:e}",
                fmt_num(r.lambda),
                -r.gap
            )
        })
        .collect();
    let path = BetaPath::new(&a.family, &b.family)?;
    let mut min_derivative = f64::INFINITY;
    for &lambda in &grid {
        for i in 0..BETA_GRID_POINTS {
            let beta = i as f64 / (BETA_GRID_POINTS - 1) as f64;
            let d = path.derivative(&a.f, lambda, beta)?;
            min_derivative = min_derivative.min(d);
            if d < -tol {
                failures.push(format!(
                    "path derivative negative at lambda = {}, beta = {}: {d:e} < -{tol:e}",
                    fmt_num(lambda),
                    fmt_num(beta)
                ));
            }
        }
    }
    eprintln!(
        "dominance: smallest eigenvalue of symmetrised Pi_b - Pi_a = {:e}; smallest path derivative = {:e}",
        report.comparison.min_dirichlet_gap_eigenvalue, min_derivative
    );
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Assertion(failures))
    }
}

pub fn limit(flags: &Flags) -> Result<()> {
    let model = load_model(&require_model(&flags.model, "--model")?)?;
    let tol = tol(flags)?;
    let summ = summability_check(&model.family, &model.f)?;
    eprintln!(
        "full-cycle contraction on centred functions: {} (absolutely summable: {})",
        summ.cycle_contraction,
        if summ.absolutely_summable { "yes" } else { "no" }
    );
    if !summ.absolutely_summable {
        return Err(CliError::Validation(format!(
            "the deterministic-scan covariance series is not absolutely summable (contraction {} >= 1); no limit exists",
            summ.cycle_contraction
        )));
    }
    let row = ReportRow::limit(
        var_limit(&model.family, &model.f, SchemeSelector::Strat)?,
        var_limit(&model.family, &model.f, SchemeSelector::Rand)?,
    );
    emit(&flags.out, &compare_csv(std::slice::from_ref(&row)))?;
    if model.k() == 2 {
        let failures = ordering_failures(&[row], tol);
        if !failures.is_empty() {
            return Err(CliError::Assertion(failures));
        }
    }
    Ok(())
}

pub fn simulate(flags: &Flags) -> Result<()> {
    let model = load_model(&require_model(&flags.model, "--model")?)?;
    let steps = flags.steps.or(model.simulation.steps).unwrap_or(DEFAULT_STEPS);
    let replicas = flags.replicas.or(model.simulation.replicas).unwrap_or(DEFAULT_REPLICAS);
    let seed = flags.seed.or(model.simulation.seed).unwrap_or(0);
    if steps == 0 || replicas < 2 {
        return Err(CliError::Usage("--steps must be >= 1 and --replicas >= 2".into()));
    }
    let fam = &model.family;
    let summable = summability_check(fam, &model.f)?.absolutely_summable;
    let mut lines = Vec::new();
    let mut failures = Vec::new();
    for (name, scheme, selector) in [
        ("strat", Scheme::Strat, SchemeSelector::Strat),
        ("rand", Scheme::Rand, SchemeSelector::Rand),
        ("embedded", Scheme::Embedded, SchemeSelector::Strat),
    ] {
        let est = estimate_variance(fam, &model.f, steps, replicas, seed, scheme)?;
        let exact = finite_m_variance_exact(fam, &model.f, steps, selector)?;
        let limit = match selector {
            SchemeSelector::Strat if !summable => f64::NAN,
            _ => var_limit(fam, &model.f, selector).unwrap_or(f64::NAN),
        };
        let z = est.z_score(exact);
        if z.is_nan() || z.abs() > Z_LIMIT {
            failures.push(format!(
                "{name}: estimate {} is {z:.3} standard errors from the exact value {} (limit {Z_LIMIT})",
                fmt_num(est.point),
                fmt_num(exact)
            ));
        }
        lines.push(vec![
            name.to_string(),
            steps.to_string(),
            replicas.to_string(),
            seed.to_string(),
            fmt_num(est.point),
            fmt_num(est.standard_error),
            fmt_num(exact),
            fmt_num(limit),
            fmt_num(z),
        ]);
    }
    emit(&flags.out, &csv(SIMULATE_HEADER, lines))?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Assertion(failures))
    }
}

pub fn demo(flags: &Flags) -> Result<()> {
    let path = flags.model.clone().unwrap_or_else(|| PathBuf::from(DEMO_MODEL_PATH));
    write_model(&path, &demo_model())?;
    eprintln!("wrote {}", path.display());
    compare_model(&path, flags)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(lambda: f64, gap: f64, bound: Option<f64>) -> ReportRow {
        ReportRow {
            lambda,
            var_strat: 1.0,
            var_rand: 1.0 + gap,
            gap,
            gap_lower_bound: bound,
            method: "resolvent".into(),
        }
    }

    #[test]
    fn ordering_failures_flag_each_violation() {
        assert!(ordering_failures(&[row(0.5, 0.1, Some(0.05)), row(0.9, -1e-12, Some(0.0))], 1e-9).is_empty());
        let f = ordering_failures(&[row(0.5, -1e-6, Some(0.0))], 1e-9);
        // below zero is also below a zero bound
        assert_eq!(f.len(), 2);
        assert!(f[0].contains("k=2 ordering") && f[0].contains("lambda = 0.5"));
        let f = ordering_failures(&[row(0.5, 0.01, Some(0.02))], 1e-9);
        assert!(f[0].contains("gap lower bound violated"));
        let f = ordering_failures(&[ReportRow::limit(2.0, 1.0)], 1e-9);
        assert!(f[0].contains("the limit"));
        assert_eq!(CliError::Assertion(f).exit_code(), 2);
    }
}
