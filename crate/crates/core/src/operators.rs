//! Discrete Hamiltonians, their compression onto a region, and spectra.
//!
//! Two realizations cover every model. Periodic boxes use a diagonal
//! multiplier in Fourier space (optionally twisted for the phase-periodic
//! momentum extension). Dirichlet intervals, compressed operators and
//! user-supplied matrices are dense blocks: a square matrix acting on a
//! contiguous run of grid sites starting at `offset`, and as zero elsewhere.
//! The infinite wall outside a region is never a large number; it is the
//! restriction to the block.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{param, Result, ZenoError};
use crate::fourier::{wavenumbers, FourierPlan};
use crate::grid::{Grid, Region, StateVector};
use crate::DENSE_LIMIT;

/// Tolerance on `max |H - H^dagger|` for a matrix to count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    /// `p^2 / 2m` on a box standing in for the real line.
    FreeLine { mass: f64 },
    /// `p = -i d/dx`.
    Momentum,
    /// `p^2 + p` (mass 1/2).
    MomentumQuadratic,
    /// `-d^2/dx^2 / 2m` with zero boundary values.
    FreeDirichlet { mass: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    /// Periodic box large enough to emulate the real line.
    FullLineBox,
    /// Zero boundary values at the ends of a Dirichlet grid.
    Dirichlet,
    /// `phi(x_min) = phi(x_max) e^{i alpha}`; momentum only.
    PeriodicPhase(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianSpec {
    pub model: Model,
    pub boundary: Boundary,
}

impl HamiltonianSpec {
    pub fn new(model: Model, boundary: Boundary) -> Result<Self> {
        let spec = Self { model, boundary };
        spec.validate()?;
        Ok(spec)
    }

    pub fn free_line(mass: f64) -> Result<Self> {
        Self::new(Model::FreeLine { mass }, Boundary::FullLineBox)
    }

    pub fn momentum() -> Self {
        Self { model: Model::Momentum, boundary: Boundary::FullLineBox }
    }

    pub fn momentum_periodic(alpha: f64) -> Result<Self> {
        Self::new(Model::Momentum, Boundary::PeriodicPhase(alpha))
    }

    pub fn momentum_quadratic(boundary: Boundary) -> Result<Self> {
        Self::new(Model::MomentumQuadratic, boundary)
    }

    pub fn free_dirichlet(mass: f64) -> Result<Self> {
        Self::new(Model::FreeDirichlet { mass }, Boundary::Dirichlet)
    }

    pub fn validate(&self) -> Result<()> {
        if let Model::FreeLine { mass } | Model::FreeDirichlet { mass } = self.model {
            if !(mass > 0.0) || !mass.is_finite() {
                return param(format!("mass must be positive, got {mass}"));
            }
        }
        match (self.model, self.boundary) {
            (Model::FreeLine { .. }, Boundary::FullLineBox)
            | (Model::Momentum, Boundary::FullLineBox)
            | (Model::MomentumQuadratic, Boundary::FullLineBox | Boundary::Dirichlet)
            | (Model::FreeDirichlet { .. }, Boundary::Dirichlet) => Ok(()),
            (Model::Momentum, Boundary::PeriodicPhase(alpha)) => {
                if !(0.0..2.0 * PI).contains(&alpha) {
                    return param(format!("phase alpha must lie in [0, 2pi), got {alpha}"));
                }
                Ok(())
            }
            (m, b) => Err(ZenoError::Configuration(format!("{m:?} does not support {b:?}"))),
        }
    }

    fn wants_periodic_grid(&self) -> bool {
        !matches!(self.boundary, Boundary::Dirichlet)
    }
}

#[derive(Debug, Clone)]
pub enum Realization {
    /// `e^{-i twist (x - x_min)} F^{-1} diag(values) F e^{i twist (x - x_min)}`.
    Multiplier { values: Vec<f64>, twist: f64 },
    /// Square block on sites `offset..offset + matrix.nrows()`.
    Dense { matrix: DMatrix<Complex64>, offset: usize },
}

#[derive(Debug, Clone)]
pub struct HamiltonianOperator {
    grid: Grid,
    realization: Realization,
    hermitian: bool,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl HamiltonianOperator {
    pub fn build(grid: Grid, spec: &HamiltonianSpec) -> Result<Self> {
        spec.validate()?;
        if grid.is_periodic() != spec.wants_periodic_grid() {
            return Err(ZenoError::Configuration(format!(
                "{:?} needs a {} grid",
                spec.boundary,
                if spec.wants_periodic_grid() { "periodic" } else { "Dirichlet (interior-point)" }
            )));
        }
        let k = wavenumbers(&grid);
        let multiplier = |f: &dyn Fn(f64) -> f64, twist: f64| Self {
            grid,
            realization: Realization::Multiplier {
                values: k.iter().map(|&kq| f(kq - twist)).collect(),
                twist,
            },
            hermitian: true,
        };
        let op = match (spec.model, spec.boundary) {
            (Model::FreeLine { mass }, _) => multiplier(&|k| k * k / (2.0 * mass), 0.0),
            (Model::Momentum, Boundary::FullLineBox) => multiplier(&|k| k, 0.0),
            (Model::Momentum, Boundary::PeriodicPhase(alpha)) => {
                multiplier(&|k| k, alpha / grid.length())
            }
            (Model::MomentumQuadratic, Boundary::FullLineBox) => multiplier(&|k| k * k + k, 0.0),
            (Model::MomentumQuadratic, Boundary::Dirichlet) => {
                // -d^2/dx^2 - i d/dx, central differences for both terms.
                let h = grid.spacing();
                let off = c(-1.0 / (h * h), -1.0 / (2.0 * h));
                Self::tridiagonal(grid, c(2.0 / (h * h), 0.0), off)?
            }
            (Model::FreeDirichlet { mass }, _) => {
                let h = grid.spacing();
                let kin = 1.0 / (2.0 * mass * h * h);
                Self::tridiagonal(grid, c(2.0 * kin, 0.0), c(-kin, 0.0))?
            }
            (m, b) => {
                return Err(ZenoError::Configuration(format!("{m:?} does not support {b:?}")))
            }
        };
        Ok(op)
    }

    /// Hermitian tridiagonal Toeplitz matrix with `upper` on the superdiagonal.
    fn tridiagonal(grid: Grid, diag: Complex64, upper: Complex64) -> Result<Self> {
        let n = grid.len();
        if n > DENSE_LIMIT {
            return Err(ZenoError::Resource(format!(
                "Dirichlet grid of {n} points exceeds the dense limit {DENSE_LIMIT}"
            )));
        }
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = diag;
            if i + 1 < n {
                m[(i, i + 1)] = upper;
                m[(i + 1, i)] = upper.conj();
            }
        }
        Ok(Self { grid, realization: Realization::Dense { matrix: m, offset: 0 }, hermitian: true })
    }

    /// Wraps an arbitrary `n x n` matrix acting on every site of `grid`.
    pub fn from_matrix(grid: Grid, matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != grid.len() || matrix.ncols() != grid.len() {
            return Err(ZenoError::Shape(format!(
                "matrix is {}x{}, grid has {} points",
                matrix.nrows(),
                matrix.ncols(),
                grid.len()
            )));
        }
        let hermitian = hermiticity_defect(&matrix) < HERMITIAN_TOL;
        Ok(Self { grid, realization: Realization::Dense { matrix, offset: 0 }, hermitian })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn realization(&self) -> &Realization {
        &self.realization
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Fourier multiplier values in FFT order, if this is a spectral operator.
    pub fn multipliers(&self) -> Option<&[f64]> {
        match &self.realization {
            Realization::Multiplier { values, .. } => Some(values),
            Realization::Dense { .. } => None,
        }
    }

    /// `max |H - H^dagger|` over the stored block. Multipliers are real, so 0.
    pub fn hermiticity_defect(&self) -> f64 {
        match &self.realization {
            Realization::Multiplier { .. } => 0.0,
            Realization::Dense { matrix, .. } => hermiticity_defect(matrix),
        }
    }

    /// Sites on which the operator can be non-zero.
    pub fn support(&self) -> RangeInclusive<usize> {
        match &self.realization {
            Realization::Multiplier { .. } => 0..=self.grid.len() - 1,
            Realization::Dense { matrix, offset } => *offset..=offset + matrix.nrows() - 1,
        }
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        self.grid.ensure_same(state.grid())?;
        match &self.realization {
            Realization::Multiplier { values, twist } => {
                let plan = FourierPlan::new(self.grid.len());
                let x0 = self.grid.x_min();
                let twisted = state.with_phase(|x| twist * (x - x0));
                let mut data = twisted.into_amplitudes();
                plan.forward(&mut data);
                data.iter_mut().zip(values).for_each(|(d, v)| *d *= v);
                plan.inverse(&mut data);
                StateVector::new(self.grid, data).map(|s| s.with_phase(|x| -twist * (x - x0)))
            }
            Realization::Dense { matrix, offset } => {
                let d = matrix.nrows();
                let block = DVector::from_column_slice(&state.amplitudes()[*offset..offset + d]);
                let out = matrix * block;
                let mut result = StateVector::zeros(self.grid);
                result.amplitudes_mut()[*offset..offset + d].copy_from_slice(out.as_slice());
                Ok(result)
            }
        }
    }

    /// `<psi| H |psi>`.
    pub fn expectation(&self, state: &StateVector) -> Result<Complex64> {
        state.inner(&self.apply(state)?)
    }

    /// Matrix elements `H_{ij}` for `i, j` in `range`.
    pub fn dense_block(&self, range: RangeInclusive<usize>) -> Result<DMatrix<Complex64>> {
        let (lo, hi) = (*range.start(), *range.end());
        if hi >= self.grid.len() || lo > hi {
            return Err(ZenoError::Shape(format!("block {lo}..={hi} outside grid")));
        }
        let d = hi - lo + 1;
        if d > DENSE_LIMIT {
            return Err(ZenoError::Resource(format!(
                "dense block of dimension {d} exceeds the limit {DENSE_LIMIT}"
            )));
        }
        match &self.realization {
            Realization::Multiplier { values, twist } => {
                let n = self.grid.len();
                // H is circulant up to the twist phases: H_ij = e^{-i t x_i} col[i - j] e^{i t x_j}.
                let mut col: Vec<Complex64> = values.iter().map(|&v| c(v, 0.0)).collect();
                FourierPlan::new(n).inverse(&mut col);
                // Real multipliers give col[-m] = conj(col[m]); impose it so
                // blocks are Hermitian to the bit, not just to FFT roundoff.
                let col: Vec<Complex64> =
                    (0..n).map(|m| (col[m] + col[(n - m) % n].conj()) * 0.5).collect();
                let h = self.grid.spacing();
                Ok(DMatrix::from_fn(d, d, |i, j| {
                    let (gi, gj) = (lo + i, lo + j);
                    let entry = col[(gi + n - gj) % n];
                    if *twist == 0.0 {
                        entry
                    } else {
                        entry * Complex64::from_polar(1.0, twist * h * (gj as f64 - gi as f64))
                    }
                }))
            }
            Realization::Dense { matrix, offset } => {
                let top = offset + matrix.nrows();
                Ok(DMatrix::from_fn(d, d, |i, j| {
                    let (gi, gj) = (lo + i, lo + j);
                    if gi >= *offset && gi < top && gj >= *offset && gj < top {
                        matrix[(gi - offset, gj - offset)]
                    } else {
                        c(0.0, 0.0)
                    }
                }))
            }
        }
    }

    /// Full `n x n` matrix.
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        self.dense_block(0..=self.grid.len() - 1)
    }

    /// `E_A H E_A`, stored as the block on the region's sites.
    pub fn compress(&self, region: &Region) -> Result<Self> {
        let range = region.indices(&self.grid)?;
        if range.is_empty() {
            return param("compression onto an empty region");
        }
        if *range.start() == 0 && *range.end() == self.grid.len() - 1 {
            return Ok(self.clone());
        }
        let offset = *range.start();
        let matrix = self.dense_block(range)?;
        // Congruence by a 0/1 mask keeps the Hermitian property exactly.
        Ok(Self { grid: self.grid, realization: Realization::Dense { matrix, offset }, hermitian: self.hermitian })
    }

    pub fn eigendecompose(&self) -> Result<Spectrum> {
        if !self.hermitian {
            return Err(ZenoError::Refused(format!(
                "eigendecomposition needs a Hermitian operator (defect {:.3e})",
                self.hermiticity_defect()
            )));
        }
        let (matrix, offset) = match &self.realization {
            Realization::Dense { matrix, offset } => (matrix.clone(), *offset),
            Realization::Multiplier { .. } => (self.to_dense()?, 0),
        };
        Spectrum::of_hermitian(self.grid, matrix, offset)
    }
}

/// `max |M - M^dagger|`.
pub fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    if n != m.ncols() {
        return f64::INFINITY;
    }
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Ascending eigenvalues and orthonormal eigenvectors of a Hermitian block.
#[derive(Debug, Clone)]
pub struct Spectrum {
    grid: Grid,
    offset: usize,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl Spectrum {
    fn of_hermitian(grid: Grid, matrix: DMatrix<Complex64>, offset: usize) -> Result<Self> {
        let d = matrix.nrows();
        if d > DENSE_LIMIT {
            return Err(ZenoError::Resource(format!(
                "dimension {d} exceeds the dense limit {DENSE_LIMIT}"
            )));
        }
        let real = matrix.iter().all(|z| z.im == 0.0);
        let (values, vectors) = if real {
            let eig = nalgebra::SymmetricEigen::new(matrix.map(|z| z.re));
            (eig.eigenvalues, eig.eigenvectors.map(|v| c(v, 0.0)))
        } else {
            let eig = nalgebra::SymmetricEigen::new(matrix);
            (eig.eigenvalues, eig.eigenvectors)
        };
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let eigenvalues = order.iter().map(|&i| values[i]).collect();
        let eigenvectors = DMatrix::from_fn(d, d, |r, col| vectors[(r, order[col])]);
        Ok(Self { grid, offset, eigenvalues, eigenvectors })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Columns are eigenvectors in the Euclidean (unweighted) inner product.
    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    /// `max |H - Q diag(lambda) Q^dagger|` against the block it came from.
    pub fn reconstruction_residual(&self, op: &HamiltonianOperator) -> Result<f64> {
        let block = op.dense_block(self.offset..=self.offset + self.dim() - 1)?;
        let lambda = DMatrix::from_diagonal(&DVector::from_iterator(
            self.dim(),
            self.eigenvalues.iter().map(|&v| c(v, 0.0)),
        ));
        let rebuilt = &self.eigenvectors * lambda * self.eigenvectors.adjoint();
        Ok((block - rebuilt).iter().map(|z| z.norm()).fold(0.0, f64::max))
    }

    /// `max |Q^dagger Q - I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let gram = self.eigenvectors.adjoint() * &self.eigenvectors;
        let eye = DMatrix::<Complex64>::identity(self.dim(), self.dim());
        (gram - eye).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Closed-form eigenvalues on the unit interval `[0, 1]`:
/// `n^2 pi^2 / 2m` for the Dirichlet free particle, `n^2 pi^2 - 1/4` for
/// `p^2 + p` with Dirichlet walls (the phase `e^{-ix/2}` maps it onto `p^2 - 1/4`),
/// and the `count` twisted momenta `2 pi n - alpha` of smallest magnitude,
/// sorted ascending.
pub fn analytic_spectrum(spec: &HamiltonianSpec, count: usize) -> Result<Vec<f64>> {
    spec.validate()?;
    let squares = |f: &dyn Fn(f64) -> f64| (1..=count).map(|n| f((n as f64 * PI).powi(2))).collect();
    match (spec.model, spec.boundary) {
        (Model::FreeDirichlet { mass }, Boundary::Dirichlet) => Ok(squares(&|s| s / (2.0 * mass))),
        (Model::MomentumQuadratic, Boundary::Dirichlet) => Ok(squares(&|s| s - 0.25)),
        (Model::Momentum, Boundary::PeriodicPhase(alpha)) => {
            let reach = count as i64 + 1;
            let mut values: Vec<f64> =
                (-reach..=reach).map(|n| 2.0 * PI * n as f64 - alpha).collect();
            values.sort_by(|a, b| a.abs().total_cmp(&b.abs()).then(a.total_cmp(b)));
            values.truncate(count);
            values.sort_by(f64::total_cmp);
            Ok(values)
        }
        _ => param(format!("no closed-form spectrum for {spec:?}")),
    }
}
