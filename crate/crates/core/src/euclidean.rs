//! Imaginary-time kernels: restricted Gaussian steps, their N-fold products,
//! and the Dirichlet heat-kernel series they converge to.
//!
//! Entries carry the midpoint quadrature weight, `K_ij = W(x_i, tau; x_j) h`,
//! so composing kernels is a plain matrix product. The characteristic
//! function multiplies rows only; masking the initial point is left to the
//! caller.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{param, Result, ZenoError};
use crate::grid::{Grid, Region};
use crate::DENSE_LIMIT;

#[derive(Debug, Clone)]
pub struct KernelMatrix {
    grid: Grid,
    region: Region,
    tau_step: f64,
    steps: usize,
    entries: DMatrix<f64>,
}

fn check_dim(grid: &Grid) -> Result<()> {
    if grid.len() > DENSE_LIMIT {
        return Err(ZenoError::Resource(format!(
            "kernel of dimension {} exceeds the dense limit {DENSE_LIMIT}",
            grid.len()
        )));
    }
    Ok(())
}

/// One restricted step: `chi_A(x_i) sqrt(m / 2 pi tau) exp(-m (x_i - x_j)^2 / 2 tau) h`.
pub fn heat_step_kernel(grid: Grid, region: Region, tau: f64, mass: f64) -> Result<KernelMatrix> {
    if !(tau > 0.0) || !tau.is_finite() {
        return param(format!("imaginary time step must be positive, got {tau}"));
    }
    if !(mass > 0.0) || !mass.is_finite() {
        return param(format!("mass must be positive, got {mass}"));
    }
    let h = grid.spacing();
    let width = (tau / mass).sqrt();
    if width < 2.0 * h {
        return Err(ZenoError::Resolution(format!(
            "kernel width sqrt(tau/m) = {width:.3e} is below two grid cells ({:.3e})",
            2.0 * h
        )));
    }
    check_dim(&grid)?;
    let mask = region.mask(&grid)?;
    let x = grid.positions();
    let norm = (mass / (2.0 * PI * tau)).sqrt() * h;
    let entries = DMatrix::from_fn(grid.len(), grid.len(), |i, j| {
        let d = x[i] - x[j];
        mask[i] * norm * (-mass * d * d / (2.0 * tau)).exp()
    });
    Ok(KernelMatrix { grid, region, tau_step: tau, steps: 1, entries })
}

/// `K^N`, the N-step kernel at total imaginary time `N tau`.
pub fn wiener_product(kernel: &KernelMatrix, steps: usize) -> Result<KernelMatrix> {
    if steps == 0 {
        return param("wiener product needs N >= 1");
    }
    let mut result: Option<DMatrix<f64>> = None;
    let mut base = kernel.entries.clone();
    let mut remaining = steps;
    loop {
        if remaining & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => &r * &base,
            });
        }
        remaining >>= 1;
        if remaining == 0 {
            break;
        }
        base = &base * &base;
    }
    Ok(KernelMatrix {
        entries: result.expect("steps >= 1"),
        steps: kernel.steps * steps,
        ..kernel.clone()
    })
}

/// Dirichlet heat kernel on `[a, b]`:
/// `(2/L) sum_n sin(n pi (x-a)/L) sin(n pi (y-a)/L) exp(-tau n^2 pi^2 / (2 m L^2))`.
pub fn dirichlet_heat_series_on(a: f64, b: f64, x: f64, y: f64, tau: f64, mass: f64, terms: usize) -> f64 {
    let len = b - a;
    let (u, v) = ((x - a) / len, (y - a) / len);
    (1..=terms)
        .map(|n| {
            let k = n as f64 * PI;
            (k * u).sin() * (k * v).sin() * (-tau * k * k / (2.0 * mass * len * len)).exp()
        })
        .sum::<f64>()
        * 2.0
        / len
}

/// [`dirichlet_heat_series_on`] for the unit interval.
pub fn dirichlet_heat_series(x: f64, y: f64, tau: f64, mass: f64, terms: usize) -> f64 {
    dirichlet_heat_series_on(0.0, 1.0, x, y, tau, mass, terms)
}

/// The series sampled on the grid with the same weight convention as the
/// step kernels; zero outside the region.
pub fn dirichlet_series_kernel(
    grid: Grid,
    region: Region,
    total_tau: f64,
    mass: f64,
    terms: usize,
) -> Result<KernelMatrix> {
    if terms == 0 {
        return param("series needs at least one term");
    }
    check_dim(&grid)?;
    let (a, b) = (region.a(), region.b());
    let inside = region.indices(&grid)?;
    let x = grid.positions();
    let h = grid.spacing();
    let entries = DMatrix::from_fn(grid.len(), grid.len(), |i, j| {
        if inside.contains(&i) && inside.contains(&j) && (a..=b).contains(&x[i]) && (a..=b).contains(&x[j]) {
            dirichlet_heat_series_on(a, b, x[i], x[j], total_tau, mass, terms) * h
        } else {
            0.0
        }
    });
    Ok(KernelMatrix { grid, region, tau_step: total_tau, steps: 1, entries })
}

/// `max |K1 - K2|` over entries.
pub fn kernel_distance(k1: &KernelMatrix, k2: &KernelMatrix) -> Result<f64> {
    if k1.grid != k2.grid || k1.region != k2.region {
        return Err(ZenoError::Shape("kernels live on different grids or regions".into()));
    }
    Ok((&k1.entries - &k2.entries).iter().map(|v| v.abs()).fold(0.0, f64::max))
}

impl KernelMatrix {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn tau_step(&self) -> f64 {
        self.tau_step
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn total_time(&self) -> f64 {
        self.tau_step * self.steps as f64
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Kernel density `W(x, T; x)` at the sample nearest `x` (entry over `h`).
    pub fn diagonal_value(&self, x: f64) -> f64 {
        let i = self.grid.nearest_index(x);
        self.entries[(i, i)] / self.grid.spacing()
    }

    pub fn row_mass(&self, i: usize) -> f64 {
        self.entries.row(i).sum()
    }

    pub fn min_entry(&self) -> f64 {
        self.entries.min()
    }

    /// `max |K - K^T|`.
    pub fn asymmetry(&self) -> f64 {
        (&self.entries - self.entries.transpose()).iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Decay rates `-ln(mu) / T` of the positive eigenvalues `mu` of the
    /// symmetric part, ascending.
    pub fn decay_rates(&self) -> Vec<f64> {
        let sym = (&self.entries + self.entries.transpose()) * 0.5;
        let eig = nalgebra::SymmetricEigen::new(sym);
        let t = self.total_time();
        let mut rates: Vec<f64> =
            eig.eigenvalues.iter().filter(|&&mu| mu > 0.0).map(|&mu| -mu.ln() / t).collect();
        rates.sort_by(f64::total_cmp);
        rates
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Interior samples `j / 512` of the unit interval.
    fn unit_grid() -> Grid {
        Grid::dirichlet(0.0, 1.0, 511).unwrap()
    }

    #[test]
    fn series_values() {
        let v = dirichlet_heat_series(0.5, 0.5, 0.1, 1.0, 5);
        // Odd n only: 2 (e^{-0.05 pi^2} + e^{-0.45 pi^2} + e^{-1.25 pi^2}).
        let odd = 2.0 * [1.0f64, 9.0, 25.0].iter().map(|n2| (-0.05 * n2 * PI * PI).exp()).sum::<f64>();
        assert_relative_eq!(v, odd, max_relative = 1e-14);
        assert_relative_eq!(v, 1.2445655329425716, max_relative = 1e-12);
        assert_eq!(dirichlet_heat_series(0.0, 0.3, 0.1, 1.0, 10), 0.0);
        assert_eq!(dirichlet_heat_series(0.3, 0.0, 0.1, 1.0, 10), 0.0);

        let one = dirichlet_heat_series(0.3, 0.6, 1.0, 1.0, 1);
        let many = dirichlet_heat_series(0.3, 0.6, 1.0, 1.0, 50);
        assert!(((one - many) / many).abs() < 1e-6);
    }

    #[test]
    fn step_kernel_properties() {
        let g = Grid::periodic(-2.0, 2.0, 400).unwrap();
        let whole = heat_step_kernel(g, Region::whole(&g), 0.01, 1.0).unwrap();
        assert!(whole.asymmetry() < 1e-12);
        assert!((whole.row_mass(200) - 1.0).abs() < 1e-4);
        assert!(whole.min_entry() >= 0.0);

        let region = Region::new(0.0, 1.0).unwrap();
        let k = heat_step_kernel(g, region, 0.01, 1.0).unwrap();
        assert!(k.entries().row(10).iter().all(|&v| v == 0.0));
        assert!((0..g.len()).all(|i| k.row_mass(i) <= 1.0 + 1e-9));

        assert!(matches!(
            heat_step_kernel(g, region, 1e-6, 1.0),
            Err(ZenoError::Resolution(_))
        ));
        assert!(heat_step_kernel(g, region, -0.1, 1.0).is_err());
    }

    #[test]
    fn chapman_kolmogorov() {
        let g = Grid::periodic(-3.0, 3.0, 600).unwrap();
        let whole = Region::whole(&g);
        let tau = 0.01;
        let two = wiener_product(&heat_step_kernel(g, whole, tau, 1.0).unwrap(), 2).unwrap();
        let direct = heat_step_kernel(g, whole, 2.0 * tau, 1.0).unwrap();
        // Compare away from the truncated box edges, in density units.
        let h = g.spacing();
        let mut worst = 0.0f64;
        for i in 200..400 {
            for j in 200..400 {
                worst = worst.max((two.entries()[(i, j)] - direct.entries()[(i, j)]).abs() / h);
            }
        }
        assert!(worst < 1e-3, "{worst}");
        assert_eq!(two.total_time(), 2.0 * tau);
    }

    #[test]
    fn product_of_one_is_identity_operation() {
        let g = unit_grid();
        let k = heat_step_kernel(g, Region::whole(&g), 0.01, 1.0).unwrap();
        let one = wiener_product(&k, 1).unwrap();
        assert_eq!(kernel_distance(&k, &one).unwrap(), 0.0);
        assert!(wiener_product(&k, 0).is_err());
    }

    #[test]
    fn restricted_product_converges_to_series() {
        let g = unit_grid();
        let region = Region::new(0.0, 1.0).unwrap();
        let total = 0.1;
        let series = dirichlet_series_kernel(g, region, total, 1.0, 200).unwrap();
        let mut last = f64::INFINITY;
        for n in [8usize, 16, 32, 64] {
            let k = heat_step_kernel(g, region, total / n as f64, 1.0).unwrap();
            let prod = wiener_product(&k, n).unwrap();
            assert!(prod.min_entry() >= 0.0);
            let d = kernel_distance(&prod, &series).unwrap();
            assert!(d < last);
            last = d;
            if n == 64 {
                let oracle = dirichlet_heat_series(0.5, 0.5, total, 1.0, 5);
                assert_relative_eq!(prod.diagonal_value(0.5), oracle, max_relative = 1e-2);
            }
        }
    }

    #[test]
    fn decay_rates_approach_dirichlet_spectrum() {
        let g = unit_grid();
        let region = Region::whole(&g);
        // The absorbing wall sits O(sqrt(tau)) outside the interval, so the
        // rates only match the Dirichlet spectrum for steps near the
        // resolution limit sqrt(tau) = 2h.
        let h = g.spacing();
        let coarse = wiener_product(&heat_step_kernel(g, region, 0.1 / 64.0, 1.0).unwrap(), 64).unwrap();
        let fine_tau = 4.0 * h * h;
        let steps = (0.1 / fine_tau).round() as usize;
        let fine = wiener_product(&heat_step_kernel(g, region, fine_tau, 1.0).unwrap(), steps).unwrap();
        let exact = PI * PI / 2.0;
        let coarse_err = (coarse.decay_rates()[0] - exact).abs() / exact;
        let fine_err = (fine.decay_rates()[0] - exact).abs() / exact;
        assert!(fine_err < 1e-2, "{fine_err}");
        assert!(fine_err < coarse_err);
        let second = fine.decay_rates()[1];
        assert_relative_eq!(second, 4.0 * exact, max_relative = 3e-2);
    }

    #[test]
    fn more_walls_absorb_more() {
        let g = Grid::periodic(-1.0, 2.0, 600).unwrap();
        let region = Region::new(0.0, 1.0).unwrap();
        let total = 0.05;
        let single = heat_step_kernel(g, region, total, 1.0).unwrap();
        let many = wiener_product(&heat_step_kernel(g, region, total / 16.0, 1.0).unwrap(), 16).unwrap();
        for i in region.indices(&g).unwrap() {
            assert!(many.row_mass(i) <= single.row_mass(i) + 1e-9);
        }
        for i in 0..100 {
            assert!(many.entries().row(i).iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn distance_requires_matching_kernels() {
        let g = unit_grid();
        let a = heat_step_kernel(g, Region::whole(&g), 0.01, 1.0).unwrap();
        let other = Grid::dirichlet(0.0, 1.0, 255).unwrap();
        let b = heat_step_kernel(other, Region::whole(&other), 0.01, 1.0).unwrap();
        assert!(matches!(kernel_distance(&a, &b), Err(ZenoError::Shape(_))));
    }
}
