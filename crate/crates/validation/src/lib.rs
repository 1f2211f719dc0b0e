//! Oracles that do not go through the solvers under test, plus the
//! bookkeeping used by the `acceptance` target.

use std::time::Duration;

use nalgebra::DMatrix;
use rand::Rng;
use statrs::distribution::{ContinuousCDF, Normal};
use zeno_core::Complex64;

/// `exp(A)` by Taylor series with scaling and squaring. Independent of any
/// eigensolver.
pub fn expm_taylor(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let norm: f64 = a.iter().map(|z| z.norm()).sum();
    let squarings = (norm.max(1e-300).log2() + 2.0).max(0.0).ceil() as u32;
    let scaled = a / Complex64::new(2f64.powi(squarings as i32), 0.0);
    let n = a.nrows();
    let mut term = DMatrix::<Complex64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &scaled / Complex64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `(A + A^dagger) / 2` with entries of `A` uniform in the unit square.
pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(dim, dim, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Diagonal projector with the given mask.
pub fn diagonal_projector(mask: &[bool]) -> DMatrix<Complex64> {
    let d: Vec<Complex64> = mask.iter().map(|&m| Complex64::new(if m { 1.0 } else { 0.0 }, 0.0)).collect();
    DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d))
}

pub fn frobenius(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Standard normal CDF.
pub fn phi(x: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("unit normal").cdf(x)
}

/// One line per criterion: `criterion N PASS|FAIL title: detail`.
#[derive(Debug, Default)]
pub struct Scorecard {
    results: Vec<(u32, bool)>,
}

impl Scorecard {
    pub fn record(&mut self, id: u32, title: &str, passed: bool, detail: &str, elapsed: Duration) {
        let status = if passed { "PASS" } else { "FAIL" };
        println!("criterion {id} {status} {title}: {detail} [{:.2} s]", elapsed.as_secs_f64());
        self.results.push((id, passed));
    }

    pub fn failures(&self) -> Vec<u32> {
        self.results.iter().filter(|r| !r.1).map(|r| r.0).collect()
    }
}
