//! The named experiments. Each computes a [`Report`]; [`write_report`] turns
//! it into files.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rayon::prelude::*;
use zeno_core::euclidean::{dirichlet_series_kernel, heat_step_kernel, kernel_distance, wiener_product};
use zeno_core::operators::{analytic_spectrum, HERMITIAN_TOL};
use zeno_core::zeno::{
    convergence_sweep, leakage_exponent_probe, least_squares_line, log_spaced, periodic_zeno_check,
    translation_absorb_oracle, zeno_evolve, Regime, ZenoPlan,
};
use zeno_core::{
    Boundary, Complex64, Grid, HamiltonianOperator, HamiltonianSpec, Propagator, Region, StateVector, ZenoError,
};

use crate::config::{Experiment, ExperimentConfig};
use crate::svg::{line_plot, small_multiples, Panel};
use crate::table::{emit_csv, ResultTable};
use crate::LabError;

/// An internal consistency check whose failure makes the run exit nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self { name: name.to_string(), passed, detail }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub experiment: Experiment,
    pub tables: Vec<ResultTable>,
    /// `(file stem, document)`.
    pub plots: Vec<(String, String)>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn table(&self, name: &str) -> Option<&ResultTable> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report, LabError> {
    cfg.validate()?;
    let name = cfg.experiment.name();
    let wrap = |e: ZenoError| LabError::Core { experiment: name.to_string(), source: e };
    let mut report = match cfg.experiment {
        Experiment::Fig1 => fig1(cfg),
        Experiment::ZenoConvergence => zeno_convergence(cfg),
        Experiment::Spectrum => spectrum(cfg),
        Experiment::Euclid => euclid(cfg),
        Experiment::LeakExponent => leak_exponent(cfg),
        Experiment::Twolevel => twolevel(cfg),
    }
    .map_err(|e| match e {
        Failure::Core(e) => wrap(e),
        Failure::Lab(e) => e,
    })?;
    if !cfg.svg {
        report.plots.clear();
    }
    Ok(report)
}

/// Writes every table (and plot, if present) into `out_dir`.
pub fn write_report(report: &Report, out_dir: &Path) -> Result<Vec<PathBuf>, LabError> {
    fs::create_dir_all(out_dir).map_err(|source| LabError::Io { path: out_dir.to_path_buf(), source })?;
    let mut written = Vec::new();
    for table in &report.tables {
        let path = out_dir.join(format!("{}.csv", table.name));
        emit_csv(table, &path)?;
        written.push(path);
    }
    for (stem, doc) in &report.plots {
        let path = out_dir.join(format!("{stem}.svg"));
        fs::write(&path, doc).map_err(|source| LabError::Io { path: path.clone(), source })?;
        written.push(path);
    }
    Ok(written)
}

enum Failure {
    Core(ZenoError),
    Lab(LabError),
}

impl From<ZenoError> for Failure {
    fn from(e: ZenoError) -> Self {
        Failure::Core(e)
    }
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        Failure::Lab(e)
    }
}

type Outcome = Result<Report, Failure>;

fn report(cfg: &ExperimentConfig, tables: Vec<ResultTable>, plots: Vec<(String, String)>, checks: Vec<Check>) -> Outcome {
    Ok(Report { experiment: cfg.experiment, tables, plots, checks })
}

fn fig1(cfg: &ExperimentConfig) -> Outcome {
    let s = &cfg.settings;
    let grid = Grid::periodic(s.x_min, s.x_max, s.points)?;
    let region = Region::new(s.a, s.b)?;
    let psi = StateVector::gaussian_packet(grid, s.x0, s.sigma, s.k0)?;
    let stride = s.steps / (s.panels - 1);
    let plan = ZenoPlan::new(&HamiltonianSpec::momentum(), grid, region, psi.clone(), s.time, s.steps)?
        .with_snapshots(stride)?;
    let trace = zeno_evolve(&plan)?;
    let regime = Regime::classify(plan.step_time(), grid.spacing(), 1.0);
    let times: Vec<f64> = trace.snapshots.iter().map(|(t, _)| *t).collect();
    let labels: Vec<String> = times.iter().map(|t| format!("density_t{t:.4}")).collect();

    let mut natural = ResultTable::with_columns("fig1_natural", [vec!["x".to_string()], labels.clone()].concat());
    let densities: Vec<Vec<f64>> = trace.snapshots.iter().map(|(_, st)| st.density()).collect();
    for (j, x) in grid.positions().into_iter().enumerate() {
        natural.push(std::iter::once(x).chain(densities.iter().map(|d| d[j])).collect())?;
    }

    // The same interval closed into a circle, sampled with the box spacing.
    let circle_points = ((s.b - s.a) / grid.spacing()).round() as usize;
    let circle = Grid::periodic(s.a, s.b, circle_points)?;
    let circle_psi = StateVector::gaussian_packet(circle, s.x0, s.sigma, s.k0)?;
    let circle_prop =
        Propagator::new(HamiltonianOperator::build(circle, &HamiltonianSpec::momentum_periodic(s.alpha)?)?)?;
    let circle_states = times.iter().map(|&t| circle_prop.evolve(&circle_psi, t)).collect::<Result<Vec<_>, _>>()?;
    let circle_rows = periodic_zeno_check(&circle_psi, s.alpha, &times)?;
    let mut periodic = ResultTable::with_columns("fig1_periodic", [vec!["x".to_string()], labels.clone()].concat());
    let circle_dens: Vec<Vec<f64>> = circle_states.iter().map(|st| st.density()).collect();
    for (j, x) in circle.positions().into_iter().enumerate() {
        periodic.push(std::iter::once(x).chain(circle_dens.iter().map(|d| d[j])).collect())?;
    }

    let mut summary = ResultTable::new(
        "fig1_summary",
        &["t", "natural_survival", "oracle_survival", "natural_oracle_distance", "periodic_norm", "periodic_modulus_mismatch"],
    );
    for (k, ((t, state), row)) in trace.snapshots.iter().zip(&circle_rows).enumerate() {
        let oracle = translation_absorb_oracle(&psi, &region, *t)?;
        summary.push(vec![
            *t,
            trace.survival[k * stride],
            oracle.norm_sqr(),
            state.distance(&oracle)?,
            row.norm,
            row.modulus_mismatch,
        ])?;
    }

    let notes = vec![
        format!("regime: {} ({:.3} cells per step)", regime.as_str(), plan.step_time() / grid.spacing()),
        format!("circle: {circle_points} points on [{}, {}], alpha = {}", s.a, s.b, s.alpha),
    ];
    for t in [&mut natural, &mut periodic, &mut summary] {
        t.stamp(cfg, &notes);
    }

    let checks = vec![
        Check::new(
            "natural survival is non-increasing",
            trace.survival.windows(2).all(|w| w[1] <= w[0] + 1e-12),
            format!("final survival {:.6e}", trace.final_survival()),
        ),
        Check::new(
            "periodic evolution is unitary",
            circle_rows.iter().all(|r| (r.norm - 1.0).abs() < 1e-10),
            format!("max |norm - 1| = {:.3e}", circle_rows.iter().map(|r| (r.norm - 1.0).abs()).fold(0.0, f64::max)),
        ),
        Check::new(
            "periodic modulus follows rigid translation",
            circle_rows.iter().all(|r| r.modulus_mismatch < 1e-8),
            format!("max mismatch {:.3e}", circle_rows.iter().map(|r| r.modulus_mismatch).fold(0.0, f64::max)),
        ),
    ];

    let panels = |xs: Vec<f64>, dens: &[Vec<f64>], tag: &str| -> Vec<Panel> {
        times
            .iter()
            .zip(dens)
            .map(|(t, d)| Panel { title: format!("{tag} t = {t:.3}"), xs: xs.clone(), ys: d.clone() })
            .collect()
    };
    let doc = small_multiples(
        "|psi|^2: projected H = p (top), periodic extension (bottom)",
        &[panels(grid.positions(), &densities, "natural"), panels(circle.positions(), &circle_dens, "periodic")],
    );
    report(cfg, vec![natural, periodic, summary], vec![("fig1".into(), doc)], checks)
}

fn zeno_convergence(cfg: &ExperimentConfig) -> Outcome {
    let s = &cfg.settings;
    let grid = Grid::periodic(s.x_min, s.x_max, s.points)?;
    let region = Region::new(s.a, s.b)?;
    let psi = StateVector::gaussian_packet(grid, s.x0, s.sigma, s.k0)?;
    let plan = ZenoPlan::new(&HamiltonianSpec::free_line(s.mass)?, grid, region, psi, s.time, s.steps_list[0])?;
    let rows = convergence_sweep(&plan, &s.steps_list)?;
    let mut table = ResultTable::new("zeno-convergence", &["N", "survival", "distance_to_limit"]);
    for r in &rows {
        table.push(vec![r.steps as f64, r.survival, r.distance_to_limit])?;
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.survival < 1.0)
        .map(|r| ((r.steps as f64).ln(), (1.0 - r.survival).ln()))
        .collect();
    let mut notes = Vec::new();
    if pts.len() >= 2 {
        notes.push(format!("fitted slope of ln(1 - survival) against ln N: {:.6}", least_squares_line(&pts).0));
    }
    table.stamp(cfg, &notes);
    let checks = vec![Check::new(
        "survival lies in [0, 1]",
        rows.iter().all(|r| (-1e-12..=1.0 + 1e-12).contains(&r.survival)),
        format!("{} rows", rows.len()),
    )];
    let ns: Vec<f64> = rows.iter().map(|r| r.steps as f64).collect();
    let ds: Vec<f64> = rows.iter().map(|r| r.distance_to_limit).collect();
    let doc = line_plot("Distance to the Zeno limit", "N", "distance", &ns, &ds, true);
    report(cfg, vec![table], vec![("zeno-convergence".into(), doc)], checks)
}

fn spectrum(cfg: &ExperimentConfig) -> Outcome {
    let s = &cfg.settings;
    let len = s.b - s.a;
    let (op, analytic) = match s.model.as_str() {
        "compressed-free" => {
            let grid = Grid::periodic(s.x_min, s.x_max, s.points)?;
            let full = HamiltonianOperator::build(grid, &HamiltonianSpec::free_line(s.mass)?)?;
            let op = full.compress(&Region::new(s.a, s.b)?)?;
            let analytic = analytic_spectrum(&HamiltonianSpec::free_dirichlet(s.mass)?, s.count)?;
            (op, analytic.into_iter().map(|e| e / (len * len)).collect::<Vec<_>>())
        }
        "momentum-quadratic" => {
            let grid = Grid::dirichlet(s.a, s.b, s.points)?;
            let spec = HamiltonianSpec::momentum_quadratic(Boundary::Dirichlet)?;
            let analytic = analytic_spectrum(&spec, s.count)?;
            (HamiltonianOperator::build(grid, &spec)?, analytic.into_iter().map(|e| (e + 0.25) / (len * len) - 0.25).collect())
        }
        _ => {
            let grid = Grid::dirichlet(s.a, s.b, s.points)?;
            let spec = HamiltonianSpec::free_dirichlet(s.mass)?;
            let analytic = analytic_spectrum(&spec, s.count)?;
            (HamiltonianOperator::build(grid, &spec)?, analytic.into_iter().map(|e| e / (len * len)).collect())
        }
    };
    let spectrum = op.eigendecompose()?;
    if spectrum.dim() < s.count {
        return Err(LabError::Usage(format!("count {} exceeds the {} available eigenvalues", s.count, spectrum.dim())).into());
    }
    let mut table = ResultTable::new("spectrum", &["n", "numeric", "analytic", "rel_error"]);
    for (n, (num, exact)) in spectrum.eigenvalues().iter().zip(&analytic).enumerate() {
        table.push(vec![(n + 1) as f64, *num, *exact, (num - exact) / exact])?;
    }
    table.stamp(cfg, &[format!("matrix dimension {}", spectrum.dim())]);
    let defect = op.hermiticity_defect();
    let residual = spectrum.reconstruction_residual(&op)?;
    let checks = vec![
        Check::new("operator is Hermitian", defect <= HERMITIAN_TOL, format!("defect {defect:.3e}")),
        Check::new(
            "eigendecomposition reconstructs the operator",
            residual < 1e-8 * spectrum.eigenvalues().iter().fold(1.0, |m: f64, e| m.max(e.abs())),
            format!("residual {residual:.3e}"),
        ),
    ];
    let ns = table.column("n").unwrap_or_default();
    let errs = table.column("rel_error").unwrap_or_default();
    let doc = line_plot("Relative eigenvalue error", "n", "|rel_error|", &ns, &errs, true);
    report(cfg, vec![table], vec![("spectrum".into(), doc)], checks)
}

fn euclid(cfg: &ExperimentConfig) -> Outcome {
    let s = &cfg.settings;
    let grid = Grid::dirichlet(s.a, s.b, s.points)?;
    let region = Region::new(s.a, s.b)?;
    let series = dirichlet_series_kernel(grid, region, s.tau, s.mass, s.terms)?;
    let mid = 0.5 * (s.a + s.b);
    let rows = s
        .steps_list
        .par_iter()
        .map(|&n| {
            let prod = wiener_product(&heat_step_kernel(grid, region, s.tau / n as f64, s.mass)?, n)?;
            Ok((n, kernel_distance(&prod, &series)?, prod.diagonal_value(mid), prod.min_entry()))
        })
        .collect::<Result<Vec<_>, ZenoError>>()?;
    let mut table = ResultTable::new("euclid", &["N", "kernel_distance", "diag_value"]);
    for &(n, dist, diag, _) in &rows {
        table.push(vec![n as f64, dist, diag])?;
    }
    table.stamp(cfg, &[format!("series diagonal at x = {mid}: {:.14e}", series.diagonal_value(mid))]);
    let min = rows.iter().map(|r| r.3).fold(f64::INFINITY, f64::min);
    let checks = vec![Check::new("restricted kernels are non-negative", min >= 0.0, format!("min entry {min:.3e}"))];
    let ns: Vec<f64> = rows.iter().map(|r| r.0 as f64).collect();
    let ds: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let doc = line_plot("Distance to the Dirichlet heat kernel", "N", "kernel_distance", &ns, &ds, true);
    report(cfg, vec![table], vec![("euclid".into(), doc)], checks)
}

fn leak_exponent(cfg: &ExperimentConfig) -> Outcome {
    let s = &cfg.settings;
    let grid = Grid::periodic(s.x_min, s.x_max, s.points)?;
    let region = Region::new(s.a, s.b)?;
    let psi = StateVector::gaussian_packet(grid, s.x0, s.sigma, s.k0)?;
    let spec = if s.model == "momentum" { HamiltonianSpec::momentum() } else { HamiltonianSpec::free_line(s.mass)? };
    let prop = Propagator::new(HamiltonianOperator::build(grid, &spec)?)?;
    let times = log_spaced(s.t_min, s.t_max, s.t_count);
    let fit = leakage_exponent_probe(&prop, &region, &psi, &times)?;
    let mut table = ResultTable::new("leak-exponent", &["t", "leakage"]);
    for &(t, l) in &fit.leakage {
        table.push(vec![t, l])?;
    }
    let mut fitted = ResultTable::new("leak-exponent_fit", &["exponent", "intercept", "residual"]);
    fitted.push(vec![fit.exponent, fit.intercept, fit.residual])?;
    let notes = vec![format!("fitted exponent {:.6}", fit.exponent)];
    table.stamp(cfg, &notes);
    fitted.stamp(cfg, &notes);
    let checks = vec![Check::new(
        "leakage is a probability change",
        fit.leakage.iter().all(|&(_, l)| (0.0..=1.0).contains(&l)),
        format!("{} times", fit.leakage.len()),
    )];
    let (ts, ls): (Vec<f64>, Vec<f64>) = fit.leakage.iter().copied().unzip();
    let doc = line_plot("Short-time leakage", "t", "leakage", &ts, &ls, true);
    report(cfg, vec![table, fitted], vec![("leak-exponent".into(), doc)], checks)
}

/// Pauli-x on two sites of unit spacing, measured on the first site.
pub fn two_level_plan(total_time: f64, steps: usize) -> Result<ZenoPlan, ZenoError> {
    let g = Grid::periodic(0.0, 2.0, 2)?;
    let (z, o) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    let op = HamiltonianOperator::from_matrix(g, DMatrix::from_row_slice(2, 2, &[z, o, o, z]))?;
    let up = StateVector::new(g, vec![o, z])?;
    ZenoPlan::with_operator(op, Region::new(0.0, 0.4)?, up, total_time, steps)
}

fn twolevel(cfg: &ExperimentConfig) -> Outcome {
    let s = &cfg.settings;
    let mut table = ResultTable::new("twolevel", &["N", "survival", "closed_form", "abs_error"]);
    let mut worst: f64 = 0.0;
    for &n in &s.steps_list {
        let survival = zeno_evolve(&two_level_plan(s.time, n)?)?.final_survival();
        let closed = (s.time / n as f64).cos().powf(2.0 * n as f64);
        worst = worst.max((survival - closed).abs());
        table.push(vec![n as f64, survival, closed, (survival - closed).abs()])?;
    }
    table.stamp(cfg, &[]);
    let checks = vec![Check::new("survival matches cos(T/N)^(2N)", worst < 1e-10, format!("max error {worst:.3e}"))];
    let ns = table.column("N").unwrap_or_default();
    let ps = table.column("survival").unwrap_or_default();
    let doc = line_plot("Two-level survival", "N", "survival", &ns, &ps, false);
    report(cfg, vec![table], vec![("twolevel".into(), doc)], checks)
}
