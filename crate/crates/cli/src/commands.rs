use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use stiefel_core::experiments::{
    closed_geodesic_search_with, curvature_bound_experiment, injectivity_probe, klingenberg_bound, ExperimentReport,
    ProbeOptions, Value,
};
use stiefel_core::frenet::{
    curvature_profile, geodesic_frenet_curvatures, minimal_period_with, normal_form_with, Period, ProfileOptions,
};
use stiefel_core::stiefel::{geodesic_curve, stiefel_log, LogOptions, StiefelError, StiefelPoint, TangentVector};
use stiefel_core::Mat;

use crate::config::{Config, Format};
use crate::error::CliError;
use crate::io::{fmt_f64, read_matrix, write_matrix};

fn load_point(path: &Path, cfg: &Config) -> Result<StiefelPoint, CliError> {
    Ok(StiefelPoint::with_tolerance(read_matrix(path)?, cfg.tolerances.orth)?)
}

fn load_tangent(base: &Path, delta: &Path, cfg: &Config) -> Result<TangentVector, CliError> {
    let u = load_point(base, cfg)?;
    let d = read_matrix(delta)?;
    Ok(TangentVector::with_tolerance(u, d, cfg.tolerances.tan)?)
}

fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn csv_text(header: &[String], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn exp(base: &Path, tangent: &Path, t: f64, out: Option<&Path>, cfg: &Config) -> Result<(), CliError> {
    let tv = load_tangent(base, tangent, cfg)?;
    let point = geodesic_curve(&tv).evaluate_mat(t);
    write_matrix(&point, out)
}

#[derive(Debug, Serialize)]
struct LogDiagnostic {
    status: &'static str,
    ambiguous: bool,
    iterations: Option<usize>,
    residual: Option<f64>,
    norm: Option<f64>,
    starts: Option<usize>,
    converged_starts: Option<usize>,
    solution_norms: Vec<f64>,
    solution_files: Vec<PathBuf>,
}

impl LogDiagnostic {
    fn csv(&self) -> Result<String, CliError> {
        let opt = |x: Option<String>| x.unwrap_or_default();
        let header = [
            "status",
            "ambiguous",
            "iterations",
            "residual",
            "norm",
            "starts",
            "converged_starts",
            "solutions",
        ]
        .map(String::from);
        let row = vec![
            self.status.to_string(),
            self.ambiguous.to_string(),
            opt(self.iterations.map(|x| x.to_string())),
            opt(self.residual.map(fmt_f64)),
            opt(self.norm.map(fmt_f64)),
            opt(self.starts.map(|x| x.to_string())),
            opt(self.converged_starts.map(|x| x.to_string())),
            self.solution_norms.len().to_string(),
        ];
        csv_text(&header, &[row])
    }
}

pub struct LogArgs<'a> {
    pub base: &'a Path,
    pub target: &'a Path,
    pub out: Option<&'a Path>,
    pub report: Option<&'a Path>,
    pub restarts: usize,
    pub seed: u64,
    pub max_iter: usize,
}

/// Candidate file for solution `k` of an ambiguous logarithm: `<stem>_<k>.csv`
/// next to `out`, or `log_solution_<k>.csv` in the output directory.
fn solution_path(out: Option<&Path>, k: usize, cfg: &Config) -> PathBuf {
    match out {
        Some(p) => {
            let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("log");
            p.with_file_name(format!("{stem}_{k}.csv"))
        }
        None => cfg.output_dir.join(format!("log_solution_{k}.csv")),
    }
}

pub fn log(args: &LogArgs, format: Format, cfg: &Config) -> Result<(), CliError> {
    let u = load_point(args.base, cfg)?;
    let v = load_point(args.target, cfg)?;
    if u.as_mat().shape() != v.as_mat().shape() {
        return Err(StiefelError::Shape {
            expected: u.as_mat().shape(),
            got: v.as_mat().shape(),
        }
        .into());
    }
    let opts = LogOptions {
        tol: cfg.tolerances.shoot,
        restarts: args.restarts,
        seed: args.seed,
        max_iter: args.max_iter,
        ..LogOptions::default()
    };
    let write_diag = |d: &LogDiagnostic| -> Result<(), CliError> {
        let text = match format {
            Format::Json => serde_json::to_string_pretty(d)? + "\n",
            Format::Csv => d.csv()?,
        };
        match args.report {
            Some(p) => std::fs::write(p, text)?,
            None => std::io::stderr().write_all(text.as_bytes())?,
        }
        Ok(())
    };
    match stiefel_log(&u, &v, &opts) {
        Ok(outcome) => {
            write_matrix(outcome.tangent.delta(), args.out)?;
            write_diag(&LogDiagnostic {
                status: "ok",
                ambiguous: false,
                iterations: Some(outcome.iterations),
                residual: Some(outcome.residual),
                norm: Some(outcome.tangent.norm()),
                starts: Some(outcome.starts),
                converged_starts: Some(outcome.converged_starts),
                solution_norms: outcome.solutions.iter().map(Mat::norm).collect(),
                solution_files: Vec::new(),
            })
        }
        Err(StiefelError::Ambiguous { solutions }) => {
            let mut files = Vec::new();
            for (k, s) in solutions.iter().enumerate() {
                let path = solution_path(args.out, k, cfg);
                write_matrix(s, Some(&path))?;
                files.push(path);
            }
            write_diag(&LogDiagnostic {
                status: "ambiguous",
                ambiguous: true,
                iterations: None,
                residual: None,
                norm: solutions.first().map(Mat::norm),
                starts: Some(args.restarts + 1),
                converged_starts: None,
                solution_norms: solutions.iter().map(Mat::norm).collect(),
                solution_files: files,
            })?;
            Err(CliError::Ambiguous { count: solutions.len() })
        }
        Err(StiefelError::NoConvergence {
            iterations,
            best_residual,
            best,
        }) => {
            write_diag(&LogDiagnostic {
                status: "no_convergence",
                ambiguous: false,
                iterations: Some(iterations),
                residual: Some(best_residual),
                norm: Some(best.norm()),
                starts: Some(args.restarts + 1),
                converged_starts: Some(0),
                solution_norms: Vec::new(),
                solution_files: Vec::new(),
            })?;
            Err(CliError::NoConvergence(format!(
                "best residual {best_residual:.3e} after {iterations} iterations"
            )))
        }
        Err(e) => Err(e.into()),
    }
}

pub struct FrenetArgs<'a> {
    pub base: &'a Path,
    pub tangent: &'a Path,
    pub order: usize,
    pub grid: usize,
    pub t_max: f64,
    pub out: Option<&'a Path>,
}

/// Finite-difference curvature table along `t -> Exp_U(t D)` next to the
/// analytic curvatures of the unit-speed reparametrization.
pub fn frenet(args: &FrenetArgs, cfg: &Config) -> Result<(), CliError> {
    let tv = load_tangent(args.base, args.tangent, cfg)?;
    let speed = tv.norm();
    if speed == 0.0 {
        return Err(CliError::Precondition(
            "zero tangent: the geodesic is a constant curve".into(),
        ));
    }
    if args.grid == 0 {
        return Err(CliError::Precondition("grid must have at least one point".into()));
    }
    let unit = tv.scaled(1.0 / speed);
    let split = unit.split();
    let p = split.a.rows();
    let analytic = geodesic_frenet_curvatures(&split.a, &split.b, args.order.min(2 * p * p))?;
    let curve = geodesic_curve(&tv);
    let grid: Vec<f64> = if args.grid == 1 {
        vec![0.0]
    } else {
        (0..args.grid)
            .map(|k| args.t_max * k as f64 / (args.grid - 1) as f64)
            .collect()
    };
    let opts = ProfileOptions {
        order: args.order,
        time_scale: 1.0 / speed,
        ..ProfileOptions::default()
    };
    let prof = curvature_profile(|t| curve.evaluate_mat(t).vectorize(), &grid, &opts)?;
    let cols = analytic.curvatures.len().min(args.order.saturating_sub(1));
    let mut header = vec!["t".to_string()];
    header.extend((1..=cols).map(|j| format!("kappa_{j}")));
    header.extend((1..=cols).map(|j| format!("analytic_kappa_{j}")));
    header.extend(["max_abs_dev", "effective_dim", "frame_defect"].map(String::from));
    let mut rows = Vec::with_capacity(grid.len());
    let mut worst = 0.0f64;
    for (k, &t) in prof.t.iter().enumerate() {
        let measured = &prof.curvatures[k][..cols];
        let dev = measured
            .iter()
            .zip(&analytic.curvatures)
            .map(|(m, a)| (m - a).abs())
            .fold(0.0, f64::max);
        worst = worst.max(dev);
        let mut row = vec![fmt_f64(t)];
        row.extend(measured.iter().map(|&x| fmt_f64(x)));
        row.extend(analytic.curvatures[..cols].iter().map(|&x| fmt_f64(x)));
        row.push(fmt_f64(dev));
        row.push(prof.effective_dim[k].to_string());
        row.push(fmt_f64(prof.frame_defect[k]));
        rows.push(row);
    }
    emit(&csv_text(&header, &rows)?, args.out)?;
    let analytic_text: Vec<String> = analytic.curvatures[..cols].iter().map(|&x| fmt_f64(x)).collect();
    eprintln!(
        "analytic curvatures [{}], effective dimension {}, max deviation {worst:e}",
        analytic_text.join(", "),
        analytic.effective_dim
    );
    Ok(())
}

#[derive(Debug, Serialize)]
struct NormalFormComponent {
    amplitude: f64,
    frequency: f64,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum PeriodField {
    Closed(f64),
    Open(&'static str),
}

#[derive(Debug, Serialize)]
struct NormalFormReport {
    components: Vec<NormalFormComponent>,
    dc_offset_norm: f64,
    speed: f64,
    /// `null` for the constant curve.
    period: Option<PeriodField>,
    harmonics: Option<Vec<u64>>,
}

pub fn normal_form(
    base: &Path,
    tangent: &Path,
    out: Option<&Path>,
    format: Format,
    cfg: &Config,
) -> Result<(), CliError> {
    let tv = load_tangent(base, tangent, cfg)?;
    let split = tv.split();
    let nf = normal_form_with(&split.a, &split.b, &cfg.tolerances)?;
    let (period, harmonics) = if nf.components.is_empty() {
        (None, None)
    } else {
        match minimal_period_with(&nf, &cfg.tolerances)? {
            Period::Closed { period, harmonics, .. } => (Some(PeriodField::Closed(period)), Some(harmonics)),
            Period::NotClosed => (Some(PeriodField::Open("not closed")), None),
        }
    };
    let report = NormalFormReport {
        components: nf
            .components
            .iter()
            .map(|c| NormalFormComponent {
                amplitude: c.amplitude,
                frequency: c.frequency,
            })
            .collect(),
        dc_offset_norm: nf.dc_offset_norm(),
        speed: tv.norm(),
        period,
        harmonics,
    };
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&report)? + "\n",
        Format::Csv => {
            let header = ["component", "amplitude", "frequency", "dc_offset_norm", "period"].map(String::from);
            let period = match &report.period {
                Some(PeriodField::Closed(t)) => fmt_f64(*t),
                Some(PeriodField::Open(s)) => s.to_string(),
                None => String::new(),
            };
            let rows: Vec<Vec<String>> = report
                .components
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    vec![
                        (i + 1).to_string(),
                        fmt_f64(c.amplitude),
                        fmt_f64(c.frequency),
                        fmt_f64(report.dc_offset_norm),
                        period.clone(),
                    ]
                })
                .collect();
            csv_text(&header, &rows)?
        }
    };
    emit(&text, out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ExperimentName {
    CurvatureBound,
    ClosedGeoSearch,
    InjectivityProbe,
    Klingenberg,
}

impl ExperimentName {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentName::CurvatureBound => "curvature-bound",
            ExperimentName::ClosedGeoSearch => "closed-geo-search",
            ExperimentName::InjectivityProbe => "injectivity-probe",
            ExperimentName::Klingenberg => "klingenberg",
        }
    }
}

pub struct ExperimentArgs {
    pub name: ExperimentName,
    pub n: usize,
    pub p: usize,
    pub samples: usize,
    pub seed: u64,
    pub radii: Vec<f64>,
    pub starts: usize,
    pub c: f64,
    pub l: f64,
    pub out_dir: PathBuf,
}

#[derive(Debug, Serialize)]
struct KlingenbergReport {
    name: &'static str,
    c: f64,
    l: f64,
    bound: f64,
}

fn cell(v: &Value) -> String {
    match v {
        Value::Float(x) => fmt_f64(*x),
        other => other.to_string(),
    }
}

fn report_csv(report: &ExperimentReport) -> Result<String, CliError> {
    let cols = report.columns();
    let rows: Vec<Vec<String>> = report
        .records
        .iter()
        .map(|r| cols.iter().map(|c| r.get(c).map(cell).unwrap_or_default()).collect())
        .collect();
    csv_text(&cols, &rows)
}

/// Runs the experiment, writes `<name>_<n>x<p>_<seed>.json` and `.csv` into
/// the output directory and returns the one-line verdict.
pub fn experiment(args: &ExperimentArgs, cfg: &Config) -> Result<String, CliError> {
    std::fs::create_dir_all(&args.out_dir)?;
    let stem = format!("{}_{}x{}_{}", args.name.as_str(), args.n, args.p, args.seed);
    let json_path = args.out_dir.join(format!("{stem}.json"));
    let csv_path = args.out_dir.join(format!("{stem}.csv"));
    let report = match args.name {
        ExperimentName::Klingenberg => {
            let bound = klingenberg_bound(args.c, args.l)?;
            let rep = KlingenbergReport {
                name: "klingenberg",
                c: args.c,
                l: args.l,
                bound,
            };
            std::fs::write(&json_path, serde_json::to_string_pretty(&rep)? + "\n")?;
            let row = vec![fmt_f64(args.c), fmt_f64(args.l), fmt_f64(bound)];
            std::fs::write(&csv_path, csv_text(&["c", "l", "bound"].map(String::from), &[row])?)?;
            return Ok(format!("klingenberg (C = {}, l = {}): {bound}", args.c, args.l));
        }
        ExperimentName::CurvatureBound => curvature_bound_experiment(args.n, args.p, args.samples, args.seed)?,
        ExperimentName::ClosedGeoSearch => {
            closed_geodesic_search_with(args.n, args.p, args.samples, args.seed, &cfg.tolerances)?
        }
        ExperimentName::InjectivityProbe => {
            let opts = ProbeOptions {
                starts: args.starts,
                ..ProbeOptions::default()
            };
            injectivity_probe(args.n, args.p, &args.radii, args.samples, args.seed, &opts)?
        }
    };
    std::fs::write(&json_path, serde_json::to_string_pretty(&report)? + "\n")?;
    std::fs::write(&csv_path, report_csv(&report)?)?;
    let failed: Vec<&str> = report
        .verdicts
        .iter()
        .filter(|v| !v.pass)
        .map(|v| v.criterion.as_str())
        .collect();
    let line = format!(
        "{} St({}, {}) seed {}: {} ({} of {} checks passed)",
        args.name.as_str(),
        args.n,
        args.p,
        args.seed,
        if failed.is_empty() { "PASS" } else { "FAIL" },
        report.verdicts.len() - failed.len(),
        report.verdicts.len()
    );
    if failed.is_empty() {
        Ok(line)
    } else {
        println!("{line}");
        Err(CliError::Verdict(failed.join(", ")))
    }
}
