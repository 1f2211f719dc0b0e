//! Uniform 1D lattices, complex state vectors and interval projectors.
//!
//! Two sampling conventions exist. A periodic grid samples `[x_min, x_max)`
//! with spacing `L / n`. A Dirichlet grid samples interior points only, with
//! spacing `L / (n + 1)`; the zero boundary values at `x_min` and `x_max` are
//! implicit.

use std::ops::RangeInclusive;

use num_complex::Complex64;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{param, Result, ZenoError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
    periodic: bool,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize, periodic: bool) -> Result<Self> {
        if !x_min.is_finite() || !x_max.is_finite() {
            return param(format!("grid bounds must be finite, got [{x_min}, {x_max}]"));
        }
        if x_min >= x_max {
            return param(format!("grid requires x_min < x_max, got [{x_min}, {x_max}]"));
        }
        if n_points < 2 {
            return param(format!("grid needs at least 2 points, got {n_points}"));
        }
        Ok(Self { x_min, x_max, n_points, periodic })
    }

    pub fn periodic(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        Self::new(x_min, x_max, n_points, true)
    }

    pub fn dirichlet(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        Self::new(x_min, x_max, n_points, false)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn spacing(&self) -> f64 {
        if self.periodic {
            self.length() / self.n_points as f64
        } else {
            self.length() / (self.n_points + 1) as f64
        }
    }

    /// Position of sample `j`.
    pub fn position(&self, j: usize) -> f64 {
        let offset = if self.periodic { 0.0 } else { 1.0 };
        self.x_min + (j as f64 + offset) * self.spacing()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.position(j)).collect()
    }

    /// Index of the sample nearest to `x`, clamped to the grid.
    pub fn nearest_index(&self, x: f64) -> usize {
        let first = self.position(0);
        let raw = ((x - first) / self.spacing()).round();
        raw.clamp(0.0, (self.n_points - 1) as f64) as usize
    }

    pub(crate) fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self != other {
            return Err(ZenoError::Shape(format!("grid mismatch: {self:?} vs {other:?}")));
        }
        Ok(())
    }
}

/// A closed interval `[a, b]` inside a grid box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    a: f64,
    b: f64,
}

impl Region {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || a >= b {
            return param(format!("region requires finite a < b, got [{a}, {b}]"));
        }
        Ok(Self { a, b })
    }

    /// The whole box of `grid`.
    pub fn whole(grid: &Grid) -> Self {
        Self { a: grid.x_min(), b: grid.x_max() }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Inclusive index range after snapping both endpoints to the nearest
    /// grid sample.
    pub fn indices(&self, grid: &Grid) -> Result<RangeInclusive<usize>> {
        let tol = 1e-12 * grid.length().max(1.0);
        if self.a < grid.x_min() - tol || self.b > grid.x_max() + tol {
            return param(format!(
                "region [{}, {}] lies outside grid box [{}, {}]",
                self.a,
                self.b,
                grid.x_min(),
                grid.x_max()
            ));
        }
        Ok(grid.nearest_index(self.a)..=grid.nearest_index(self.b))
    }

    /// The interval actually covered by grid samples after snapping.
    pub fn snapped(&self, grid: &Grid) -> Result<(f64, f64)> {
        let r = self.indices(grid)?;
        Ok((grid.position(*r.start()), grid.position(*r.end())))
    }

    /// Characteristic function sampled on `grid`: exactly 0.0 or 1.0.
    pub fn mask(&self, grid: &Grid) -> Result<Vec<f64>> {
        let r = self.indices(grid)?;
        Ok((0..grid.len()).map(|j| if r.contains(&j) { 1.0 } else { 0.0 }).collect())
    }
}

/// Complex amplitudes on a grid. The squared norm is `sum |psi_j|^2 h`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    grid: Grid,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(grid: Grid, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(ZenoError::Shape(format!(
                "expected {} amplitudes, got {}",
                grid.len(),
                amplitudes.len()
            )));
        }
        Ok(Self { grid, amplitudes })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, amplitudes: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let amplitudes = grid.positions().into_iter().map(f).collect();
        Self { grid, amplitudes }
    }

    /// Gaussian packet `exp(-(x-x0)^2/(4 sigma^2) + i k0 x)`, so that `|psi|^2`
    /// has standard deviation `sigma`, normalized on the grid.
    pub fn gaussian_packet(grid: Grid, x0: f64, sigma: f64, k0: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return param(format!("packet width must be positive, got {sigma}"));
        }
        if !x0.is_finite() || !k0.is_finite() {
            return param("packet centre and wavenumber must be finite");
        }
        if x0 < grid.x_min() || x0 > grid.x_max() {
            return param(format!("packet centre {x0} outside grid box"));
        }
        let outside = {
            let density = Normal::new(x0, sigma).map_err(|e| ZenoError::Parameter(e.to_string()))?;
            density.cdf(grid.x_min()) + density.sf(grid.x_max())
        };
        if outside > 1e-8 {
            log::warn!("gaussian packet has mass {outside:.3e} outside the grid box");
        }
        let mut psi = Self::from_fn(grid, |x| {
            let d = x - x0;
            Complex64::from_polar((-d * d / (4.0 * sigma * sigma)).exp(), k0 * x)
        });
        psi.normalize()?;
        Ok(psi)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// `|psi_j|^2` at every sample.
    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.grid.ensure_same(&other.grid)?;
        let sum: Complex64 =
            self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum();
        Ok(sum * self.grid.spacing())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.spacing()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return param("cannot normalize a zero or non-finite state");
        }
        self.amplitudes.iter_mut().for_each(|c| *c /= n);
        Ok(())
    }

    /// L2 distance `||self - other||`.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        let s: f64 =
            self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| (a - b).norm_sqr()).sum();
        Ok((s * self.grid.spacing()).sqrt())
    }

    /// Mass `sum |psi_j|^2 h` over the inclusive index range.
    pub fn mass_in(&self, range: RangeInclusive<usize>) -> f64 {
        self.amplitudes[range].iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.spacing()
    }

    /// Pointwise multiplication by `exp(i phase(x))`.
    pub fn with_phase(&self, phase: impl Fn(f64) -> f64) -> Self {
        let amplitudes = self
            .amplitudes
            .iter()
            .zip(self.grid.positions())
            .map(|(c, x)| c * Complex64::from_polar(1.0, phase(x)))
            .collect();
        Self { grid: self.grid, amplitudes }
    }

    /// `E_A psi`: amplitudes outside the snapped region set to zero.
    pub fn project(&self, region: &Region) -> Result<Self> {
        let r = region.indices(&self.grid)?;
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(j, c)| if r.contains(&j) { *c } else { Complex64::new(0.0, 0.0) })
            .collect();
        Ok(Self { grid: self.grid, amplitudes })
    }

    /// `(1 - E_A) psi`.
    pub fn project_complement(&self, region: &Region) -> Result<Self> {
        let r = region.indices(&self.grid)?;
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(j, c)| if r.contains(&j) { Complex64::new(0.0, 0.0) } else { *c })
            .collect();
        Ok(Self { grid: self.grid, amplitudes })
    }

    /// `||E_A psi||^2`.
    pub fn survival(&self, region: &Region) -> Result<f64> {
        Ok(self.mass_in(region.indices(&self.grid)?))
    }
}
