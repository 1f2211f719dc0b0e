//! Thin wrapper over rustfft with the normalization used across the crate:
//! `forward` is unnormalized, `inverse` divides by `n`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::Grid;

#[derive(Clone)]
pub(crate) struct FourierPlan {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    n: usize,
}

impl std::fmt::Debug for FourierPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierPlan").field("n", &self.n).finish()
    }
}

impl FourierPlan {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n), n }
    }

    pub(crate) fn forward(&self, data: &mut [Complex64]) {
        self.forward.process(data);
    }

    pub(crate) fn inverse(&self, data: &mut [Complex64]) {
        self.inverse.process(data);
        let scale = 1.0 / self.n as f64;
        data.iter_mut().for_each(|c| *c *= scale);
    }
}

/// Angular wavenumbers `2 pi q / L` in FFT order, `q` signed; the Nyquist
/// mode of an even grid is taken as negative.
pub(crate) fn wavenumbers(grid: &Grid) -> Vec<f64> {
    let n = grid.len() as i64;
    let base = 2.0 * PI / grid.length();
    (0..n)
        .map(|q| {
            let signed = if q < n - n / 2 { q } else { q - n };
            base * signed as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fft_order_and_roundtrip() {
        let g = Grid::periodic(0.0, 4.0, 8).unwrap();
        let k = wavenumbers(&g);
        let q: Vec<f64> = k.iter().map(|v| v * 4.0 / (2.0 * PI)).collect();
        assert_eq!(q, vec![0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0]);
        let odd = Grid::periodic(0.0, 1.0, 5).unwrap();
        let q: Vec<i64> = wavenumbers(&odd).iter().map(|v| (v / (2.0 * PI)).round() as i64).collect();
        assert_eq!(q, vec![0, 1, 2, -2, -1]);

        let plan = FourierPlan::new(8);
        let orig: Vec<Complex64> = (0..8).map(|j| Complex64::new(j as f64, -(j as f64).sqrt())).collect();
        let mut data = orig.clone();
        plan.forward(&mut data);
        plan.inverse(&mut data);
        for (a, b) in data.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-13);
        }
    }
}
