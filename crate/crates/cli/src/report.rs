//! CSV emission. Numbers use nine significant digits in `%g` style so that
//! identical runs produce byte-identical files.

use scanvar::VarianceReport;

pub const COMPARE_HEADER: &str = "lambda,var_strat,var_rand,gap,gap_lower_bound,method";
pub const PESKUN_HEADER: &str = "lambda,var_strat_a,var_strat_b,gap,method";
pub const SIMULATE_HEADER: &str =
    "scheme,steps,replicas,seed,estimate,standard_error,exact_finite_m,exact_limit,z_score";

const SIG_DIGITS: i32 = 9;

/// `%.9g`: fixed notation for exponents in `[-5, 9)`, scientific otherwise,
/// trailing zeros removed.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // round first so that e.g. 9.999999999 moves to the next decade
    let sci = format!("{:.*e}", (SIG_DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..SIG_DIGITS).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (SIG_DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub lambda: f64,
    pub var_strat: f64,
    pub var_rand: f64,
    pub gap: f64,
    /// Only defined for two-kernel families.
    pub gap_lower_bound: Option<f64>,
    pub method: String,
}

impl ReportRow {
    pub fn limit(var_strat: f64, var_rand: f64) -> Self {
        Self {
            lambda: 1.0,
            var_strat,
            var_rand,
            gap: var_rand - var_strat,
            gap_lower_bound: None,
            method: "limit".into(),
        }
    }

    pub fn is_limit(&self) -> bool {
        self.method == "limit"
    }

    fn fields(&self) -> Vec<String> {
        vec![
            fmt_num(self.lambda),
            fmt_num(self.var_strat),
            fmt_num(self.var_rand),
            fmt_num(self.gap),
            fmt_num(self.gap_lower_bound.unwrap_or(f64::NAN)),
            self.method.clone(),
        ]
    }
}

impl From<&VarianceReport> for ReportRow {
    fn from(r: &VarianceReport) -> Self {
        Self {
            lambda: r.lambda,
            var_strat: r.var_strat,
            var_rand: r.var_rand,
            gap: r.gap,
            gap_lower_bound: r.gap_lower_bound,
            method: r.method.as_str().into(),
        }
    }
}

/// Header plus one line per row, LF-terminated.
pub fn csv<I>(header: &str, rows: I) -> String
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn compare_csv(rows: &[ReportRow]) -> String {
    csv(COMPARE_HEADER, rows.iter().map(ReportRow::fields))
}
