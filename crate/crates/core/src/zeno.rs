//! Zeno products, their limit and the diagnostics built on them.
//!
//! A plan alternates exact evolution over `dt = T/N` with the interval
//! projector, `psi <- E U(dt) psi`, starting from `E psi0`. Survival is the
//! cumulative squared norm; nothing is renormalized between steps.
//!
//! On a finite grid `N -> infinity` always confines: the limit is
//! `exp(-iT EHE) E` with `EHE` Hermitian. The continuum leak of `H = p` is
//! therefore only visible while each step translates by several cells; see
//! [`Regime`].

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{param, Result, ZenoError};
use crate::fourier::{wavenumbers, FourierPlan};
use crate::grid::{Grid, Region, StateVector};
use crate::operators::{HamiltonianOperator, HamiltonianSpec};
use crate::propagator::Propagator;

/// Initial states must satisfy `||E psi0||^2 = 1` to this tolerance.
pub const PREPARATION_TOL: f64 = 1e-10;

/// Cells translated per step above which an `H = p` product is treated as
/// probing the continuum rather than the finite-grid confinement limit.
pub const PHYSICAL_CELLS_PER_STEP: f64 = 4.0;

#[derive(Debug, Clone)]
pub struct ZenoPlan {
    operator: HamiltonianOperator,
    region: Region,
    initial: StateVector,
    total_time: f64,
    steps: usize,
    snapshot_stride: Option<usize>,
}

impl ZenoPlan {
    pub fn new(
        spec: &HamiltonianSpec,
        grid: Grid,
        region: Region,
        initial: StateVector,
        total_time: f64,
        steps: usize,
    ) -> Result<Self> {
        let op = HamiltonianOperator::build(grid, spec)?;
        Self::with_operator(op, region, initial, total_time, steps)
    }

    pub fn with_operator(
        operator: HamiltonianOperator,
        region: Region,
        initial: StateVector,
        total_time: f64,
        steps: usize,
    ) -> Result<Self> {
        operator.grid().ensure_same(initial.grid())?;
        if !total_time.is_finite() {
            return param(format!("total time must be finite, got {total_time}"));
        }
        if steps == 0 {
            return param("at least one measurement step is required");
        }
        let norm = initial.norm_sqr();
        let inside = initial.survival(&region)?;
        if (norm - 1.0).abs() > PREPARATION_TOL || (inside - 1.0).abs() > PREPARATION_TOL {
            return param(format!(
                "initial state must be normalized and prepared in the region (norm^2 {norm:.3e}, inside {inside:.3e})"
            ));
        }
        let initial = initial.project(&region)?;
        Ok(Self { operator, region, initial, total_time, steps, snapshot_stride: None })
    }

    /// Record the state every `stride` steps (and at step 0).
    pub fn with_snapshots(mut self, stride: usize) -> Result<Self> {
        if stride == 0 {
            return param("snapshot stride must be positive");
        }
        self.snapshot_stride = Some(stride);
        Ok(self)
    }

    pub fn with_steps(&self, steps: usize) -> Result<Self> {
        if steps == 0 {
            return param("at least one measurement step is required");
        }
        Ok(Self { steps, ..self.clone() })
    }

    pub fn operator(&self) -> &HamiltonianOperator {
        &self.operator
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    /// `E psi0`.
    pub fn initial(&self) -> &StateVector {
        &self.initial
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step_time(&self) -> f64 {
        self.total_time / self.steps as f64
    }

    pub fn grid(&self) -> &Grid {
        self.operator.grid()
    }
}

/// Which limit an `H = p` product on a grid is probing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Each step moves the packet by at least [`PHYSICAL_CELLS_PER_STEP`] cells.
    Physical,
    /// Steps are short enough for the grid's own Zeno confinement to set in.
    ConfinementCrossover,
}

impl Regime {
    /// `speed` is the translation velocity (1 for `H = p`).
    pub fn classify(step_time: f64, spacing: f64, speed: f64) -> Self {
        if (speed * step_time).abs() >= PHYSICAL_CELLS_PER_STEP * spacing {
            Regime::Physical
        } else {
            Regime::ConfinementCrossover
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Physical => "physical",
            Regime::ConfinementCrossover => "confinement-crossover",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ZenoTrace {
    /// `||V_j psi0||^2` for `j = 0..=N`.
    pub survival: Vec<f64>,
    /// `V_N psi0`, unnormalized.
    pub final_state: StateVector,
    pub snapshots: Vec<(f64, StateVector)>,
}

impl ZenoTrace {
    pub fn final_survival(&self) -> f64 {
        *self.survival.last().expect("trace always holds step 0")
    }
}

pub fn zeno_evolve(plan: &ZenoPlan) -> Result<ZenoTrace> {
    let propagator = Propagator::new(plan.operator.clone())?;
    zeno_evolve_with(&propagator, plan)
}

/// [`zeno_evolve`] with a prebuilt propagator for `plan.operator()`.
pub fn zeno_evolve_with(propagator: &Propagator, plan: &ZenoPlan) -> Result<ZenoTrace> {
    let dt = plan.step_time();
    let mut psi = plan.initial.clone();
    let mut survival = Vec::with_capacity(plan.steps + 1);
    survival.push(psi.norm_sqr());
    let mut snapshots = Vec::new();
    if plan.snapshot_stride.is_some() {
        snapshots.push((0.0, psi.clone()));
    }
    for step in 1..=plan.steps {
        psi = propagator.evolve(&psi, dt)?.project(&plan.region)?;
        survival.push(psi.norm_sqr());
        if let Some(stride) = plan.snapshot_stride {
            if step % stride == 0 {
                snapshots.push((step as f64 * dt, psi.clone()));
            }
        }
    }
    Ok(ZenoTrace { survival, final_state: psi, snapshots })
}

/// The limit dynamics `exp(-it EHE) E` for one operator and region.
#[derive(Debug, Clone)]
pub struct ZenoLimit {
    region: Region,
    propagator: Propagator,
}

impl ZenoLimit {
    pub fn new(operator: &HamiltonianOperator, region: Region) -> Result<Self> {
        let propagator = Propagator::new(operator.compress(&region)?)?;
        Ok(Self { region, propagator })
    }

    /// The compressed generator `EHE`.
    pub fn generator(&self) -> &HamiltonianOperator {
        self.propagator.source()
    }

    pub fn evolve(&self, state: &StateVector, t: f64) -> Result<StateVector> {
        self.propagator.evolve(&state.project(&self.region)?, t)
    }
}

/// `exp(-iT EHE) E psi0`.
pub fn zeno_limit(plan: &ZenoPlan) -> Result<StateVector> {
    ZenoLimit::new(&plan.operator, plan.region)?.evolve(&plan.initial, plan.total_time)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub steps: usize,
    pub survival: f64,
    pub distance_to_limit: f64,
}

/// Survival and distance to the limit for each `N` in `steps` (strictly
/// ascending). Rows come back in input order.
pub fn convergence_sweep(plan: &ZenoPlan, steps: &[usize]) -> Result<Vec<SweepRow>> {
    if steps.is_empty() || steps.windows(2).any(|w| w[0] >= w[1]) || steps[0] == 0 {
        return param("step counts must be positive and strictly ascending");
    }
    let propagator = Propagator::new(plan.operator.clone())?;
    let limit = zeno_limit(plan)?;
    steps
        .par_iter()
        .map(|&n| {
            let trace = zeno_evolve_with(&propagator, &plan.with_steps(n)?)?;
            Ok(SweepRow {
                steps: n,
                survival: trace.final_survival(),
                distance_to_limit: trace.final_state.distance(&limit)?,
            })
        })
        .collect()
}

/// The "not survived" branch `(1 - E) U(dt) psi`.
pub fn leak_state(
    state: &StateVector,
    region: &Region,
    dt: f64,
    propagator: &Propagator,
) -> Result<StateVector> {
    propagator.evolve(state, dt)?.project_complement(region)
}

/// Rigid translation `psi(x) -> psi(x - shift)` on a periodic grid: an index
/// roll when `shift` is a whole number of cells, band-limited Fourier
/// interpolation otherwise.
pub fn translate(state: &StateVector, shift: f64) -> Result<StateVector> {
    let grid = *state.grid();
    if !grid.is_periodic() {
        return Err(ZenoError::Configuration("translation needs a periodic grid".into()));
    }
    let n = grid.len();
    let cells = shift / grid.spacing();
    if (cells - cells.round()).abs() < 1e-9 {
        let s = (cells.round() as i64).rem_euclid(n as i64) as usize;
        let src = state.amplitudes();
        let rolled = (0..n).map(|j| src[(j + n - s) % n]).collect();
        return StateVector::new(grid, rolled);
    }
    let plan = FourierPlan::new(n);
    let mut data = state.amplitudes().to_vec();
    plan.forward(&mut data);
    for (d, k) in data.iter_mut().zip(wavenumbers(&grid)) {
        *d *= Complex64::from_polar(1.0, -k * shift);
    }
    plan.inverse(&mut data);
    StateVector::new(grid, data)
}

/// Exact continuum Zeno state for unit-speed rightward translation inside
/// `[a, b]`: `chi_[a+T, b](x) (E psi0)(x - T)`.
pub fn translation_absorb_oracle(initial: &StateVector, region: &Region, t: f64) -> Result<StateVector> {
    if !(t >= 0.0) {
        return param(format!("translation oracle needs T >= 0, got {t}"));
    }
    let prepared = initial.project(region)?;
    if region.a() + t > region.b() {
        return Ok(StateVector::zeros(*initial.grid()));
    }
    let moved = translate(&prepared, t)?;
    if t == 0.0 {
        return Ok(moved);
    }
    let window = Region::new(region.a() + t, region.b())?;
    moved.project(&window)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicCheckRow {
    pub time: f64,
    pub norm: f64,
    /// Max modulus mismatch against the rigid translation: per sample when
    /// `cell_aligned`, per Fourier mode (Parseval-scaled) otherwise.
    pub modulus_mismatch: f64,
    pub cell_aligned: bool,
}

/// Evolves `initial` under the phase-periodic momentum extension and compares
/// each `|psi(t)|` with `|psi0((x - t) mod L)|`.
pub fn periodic_zeno_check(initial: &StateVector, alpha: f64, times: &[f64]) -> Result<Vec<PeriodicCheckRow>> {
    let grid = *initial.grid();
    let op = HamiltonianOperator::build(grid, &HamiltonianSpec::momentum_periodic(alpha)?)?;
    let propagator = Propagator::new(op)?;
    let n = grid.len();
    let h = grid.spacing();
    let twist = alpha / grid.length();
    let x0 = grid.x_min();
    let plan = FourierPlan::new(n);
    let moduli = |s: &StateVector| {
        let mut data = s.with_phase(|x| twist * (x - x0)).into_amplitudes();
        plan.forward(&mut data);
        data.into_iter().map(|c| c.norm() * (h / n as f64).sqrt()).collect::<Vec<_>>()
    };
    let reference = moduli(initial);
    times
        .iter()
        .map(|&t| {
            let out = propagator.evolve(initial, t)?;
            let cells = t / h;
            let cell_aligned = (cells - cells.round()).abs() < 1e-9;
            let modulus_mismatch = if cell_aligned {
                let rolled = translate(initial, t)?;
                out.amplitudes()
                    .iter()
                    .zip(rolled.amplitudes())
                    .map(|(a, b)| (a.norm() - b.norm()).abs())
                    .fold(0.0, f64::max)
            } else {
                moduli(&out).iter().zip(&reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
            };
            Ok(PeriodicCheckRow { time: t, norm: out.norm(), modulus_mismatch, cell_aligned })
        })
        .collect()
}

/// Leakage below this level carries no usable signal.
pub const LEAKAGE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentFit {
    pub exponent: f64,
    pub intercept: f64,
    /// RMS residual of the log-log fit.
    pub residual: f64,
    /// `(t, |P(0) - P(t)|)` for every probed time.
    pub leakage: Vec<(f64, f64)>,
}

/// Short-time scaling of the change in survival after one free evolution,
/// `|P(0) - P(t)|` with `P(t) = ||E U(t) psi0||^2`, fitted as `c t^exponent`.
/// `initial` is typically not prepared in the region: it straddles a wall.
pub fn leakage_exponent_probe(
    propagator: &Propagator,
    region: &Region,
    initial: &StateVector,
    times: &[f64],
) -> Result<ExponentFit> {
    if times.len() < 2 || times.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
        return param("exponent probe needs at least two positive finite times");
    }
    let p0 = initial.survival(region)?;
    let leakage = times
        .iter()
        .map(|&t| Ok((t, (p0 - propagator.evolve(initial, t)?.survival(region)?).abs())))
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<(f64, f64)> = leakage
        .iter()
        .filter(|(_, l)| *l > LEAKAGE_FLOOR)
        .map(|(t, l)| (t.ln(), l.ln()))
        .collect();
    if points.len() < 2 {
        return Err(ZenoError::InsufficientSignal(format!(
            "leakage at or below {LEAKAGE_FLOOR:e} for all but {} of {} times",
            points.len(),
            times.len()
        )));
    }
    let (exponent, intercept) = least_squares_line(&points);
    let residual = (points.iter().map(|(x, y)| (y - intercept - exponent * x).powi(2)).sum::<f64>()
        / points.len() as f64)
        .sqrt();
    Ok(ExponentFit { exponent, intercept, residual, leakage })
}

/// Slope and intercept of the least-squares line through `points`.
pub fn least_squares_line(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// `count` logarithmically spaced times from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

/// `sqrt(2/L) sin(n pi (x - a)/L)` evaluated on the grid.
pub fn sine_mode(grid: Grid, a: f64, b: f64, n: usize) -> StateVector {
    let len = b - a;
    StateVector::from_fn(grid, move |x| {
        if x < a || x > b {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new((2.0 / len).sqrt() * (n as f64 * PI * (x - a) / len).sin(), 0.0)
        }
    })
}
