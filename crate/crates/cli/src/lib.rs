//! Front end for classifying catalog metrics: configuration, the run itself and
//! the catalog listing. The binary in `main.rs` only parses flags.

use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use landsberg_core::catalog::{build_finsler, catalog_entries, ClassId, ClassParams, MetricClassSpec};
use landsberg_core::verify::{classify, ClassificationReport, SamplePlan, ToleranceProfile, Verdict};
use landsberg_core::{parse_expr, QuadraticForm, ScalarFunction, SprayField};

/// Exit status when the verdict matches the expected one.
pub const EXIT_OK: i32 = 0;
/// Exit status for configuration and evaluation errors.
pub const EXIT_ERROR: i32 = 1;
/// Exit status when the verdict differs from the expected one.
pub const EXIT_MISMATCH: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] landsberg_core::Error),
    #[error("f(x1) = {value} is not positive at x1 = {x1}")]
    NonPositiveF { x1: f64, value: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub metric: String,
    pub params: Vec<(String, f64)>,
    pub f: String,
    /// Preset name or a row-major matrix; the entry's own form when absent.
    pub quadratic: Option<String>,
    pub dim: Option<usize>,
    pub points: usize,
    pub seed: u64,
    pub x_range: (f64, f64),
    pub expect: Option<Verdict>,
    pub out: Option<PathBuf>,
    pub csv: bool,
    pub oracle_ad: bool,
    pub tol_profile: String,
    pub verbosity: u8,
}

impl Default for RunConfig {
    fn default() -> Self {
        let plan = SamplePlan::default();
        RunConfig {
            metric: String::new(),
            params: Vec::new(),
            f: "exp(x1)".into(),
            quadratic: None,
            dim: None,
            points: plan.n_points,
            seed: plan.seed,
            x_range: plan.x_range,
            expect: None,
            out: None,
            csv: false,
            oracle_ad: false,
            tol_profile: "default".into(),
            verbosity: 1,
        }
    }
}

/// The finished run: the report, the verdict it was held against and the exit status.
#[derive(Debug)]
pub struct Outcome {
    pub report: ClassificationReport,
    pub expected: Verdict,
    pub exit_code: i32,
}

impl RunConfig {
    pub fn plan(&self) -> Result<SamplePlan, CliError> {
        let plan = SamplePlan {
            n_points: self.points,
            seed: self.seed,
            x_range: self.x_range,
            tolerances: ToleranceProfile::named(&self.tol_profile)?,
            ..SamplePlan::default()
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn spec(&self) -> Result<MetricClassSpec, CliError> {
        let class: ClassId = self.metric.parse()?;
        let params = ClassParams::from_pairs(class, &self.params)?;
        let f: Arc<dyn ScalarFunction> = Arc::new(parse_expr(&self.f).map_err(landsberg_core::Error::from)?);
        let (form, n) = match (&self.quadratic, class.fixed_form()) {
            (None, Some((form, n))) => (form, self.dim.unwrap_or(n)),
            (Some(q), _) => {
                let form: QuadraticForm = q.parse()?;
                let n = match (form.natural_dim(), self.dim) {
                    (Some(a), Some(b)) if a != b => {
                        return Err(CliError::Config(format!("quadratic form `{q}` lives in dimension {a}, not {b}")))
                    }
                    (Some(a), _) => a,
                    (None, d) => d.unwrap_or(3),
                };
                (form, n)
            }
            (None, None) => (QuadraticForm::Product, self.dim.unwrap_or(3)),
        };
        Ok(MetricClassSpec::new(class, params, f, form, n)?)
    }
}

fn check_f_positive(f: &dyn ScalarFunction, (lo, hi): (f64, f64)) -> Result<(), CliError> {
    const GRID: usize = 100;
    for i in 0..=GRID {
        let x1 = lo + (hi - lo) * i as f64 / GRID as f64;
        let (value, _) = f.value_and_derivative(x1)?;
        if !(value > 0.0 && value.is_finite()) {
            return Err(CliError::NonPositiveF { x1, value });
        }
    }
    Ok(())
}

fn write(path: PathBuf, text: &str) -> Result<(), CliError> {
    fs::write(&path, text).map_err(|source| CliError::Io { path, source })
}

/// Classifies the configured metric, writes the report and decides the exit status.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    let spec = config.spec()?;
    let plan = config.plan()?;
    check_f_positive(spec.f.as_ref(), plan.x_range)?;
    let metric = build_finsler(&spec)?;
    let closed = if config.oracle_ad { None } else { spec.closed_form_spray().ok() };
    let spray = closed.as_ref().map(|s| s as &dyn SprayField);
    let report = classify(&metric, spray, &plan)?.with_params(spec.params.to_map());

    let expected = config.expect.unwrap_or_else(|| spec.expected_verdict());
    let exit_code = if report.verdict == expected { EXIT_OK } else { EXIT_MISMATCH };

    let json = report.to_json();
    match &config.out {
        Some(path) => {
            write(path.clone(), &json)?;
            if config.csv {
                write(path.with_extension("csv"), &report.to_csv())?;
            }
        }
        None if config.csv => print!("{}", report.to_csv()),
        None => println!("{json}"),
    }
    if config.verbosity > 0 {
        eprintln!("{}: {} (expected {})", spec.label(), report.verdict, expected);
    }
    if config.verbosity > 1 {
        let r = &report.residuals;
        eprintln!(
            "landsberg {:.3e}  berwald {:.3e}  metrizability {:.3e}  euler {:.3e}  spray match {:.3e}  ({:.2?})",
            r.landsberg.max, r.berwald.max, r.metrizability.max, r.euler.max, r.spray_match.max, report.wall_time
        );
    }
    Ok(Outcome { report, expected, exit_code })
}

/// One row per catalog entry: id, parameters, description, expected verdict.
pub fn list_catalog() -> String {
    let rows: Vec<[String; 4]> = catalog_entries()
        .into_iter()
        .map(|e| [e.id.to_string(), e.constraints.to_string(), e.description.to_string(), e.expected.to_string()])
        .collect();
    let header = ["id", "params", "location", "expected"].map(String::from);
    let mut widths = [0usize; 4];
    for row in std::iter::once(&header).chain(&rows) {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let fmt_row = |row: &[String; 4]| {
        let cells: Vec<String> = row
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        cells.join(" | ").trim_end().to_string()
    };
    let mut out = fmt_row(&header);
    out.push('\n');
    out.push_str(&widths.map(|w| "-".repeat(w)).join("-+-"));
    out.push('\n');
    for row in &rows {
        out.push_str(&fmt_row(row));
        out.push('\n');
    }
    out
}
