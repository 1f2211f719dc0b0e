//! Exact unitary evolution `U(t) = exp(-iHt)`.
//!
//! Fourier multipliers are exponentiated mode by mode; dense blocks go
//! through their eigenbasis. No time stepping is involved, so `evolve(t)` is
//! exact up to roundoff for every `t`.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Result, ZenoError};
use crate::fourier::FourierPlan;
use crate::grid::StateVector;
use crate::operators::{HamiltonianOperator, Realization, Spectrum};

#[derive(Debug, Clone)]
enum Method {
    Spectral(FourierPlan),
    Eigenbasis(Spectrum),
}

#[derive(Debug, Clone)]
pub struct Propagator {
    source: HamiltonianOperator,
    method: Method,
}

impl Propagator {
    pub fn new(source: HamiltonianOperator) -> Result<Self> {
        let method = match source.realization() {
            Realization::Multiplier { .. } => Method::Spectral(FourierPlan::new(source.grid().len())),
            Realization::Dense { .. } => Method::Eigenbasis(source.eigendecompose()?),
        };
        Ok(Self { source, method })
    }

    pub fn source(&self) -> &HamiltonianOperator {
        &self.source
    }

    pub fn method_name(&self) -> &'static str {
        match self.method {
            Method::Spectral(_) => "spectral-multiplier",
            Method::Eigenbasis(_) => "eigenbasis",
        }
    }

    pub fn spectrum(&self) -> Option<&Spectrum> {
        match &self.method {
            Method::Eigenbasis(s) => Some(s),
            Method::Spectral(_) => None,
        }
    }

    pub fn evolve(&self, state: &StateVector, t: f64) -> Result<StateVector> {
        let grid = *self.source.grid();
        grid.ensure_same(state.grid())?;
        if !t.is_finite() {
            return Err(ZenoError::Parameter(format!("evolution time must be finite, got {t}")));
        }
        match (&self.method, self.source.realization()) {
            (Method::Spectral(plan), Realization::Multiplier { values, twist }) => {
                let x0 = grid.x_min();
                let mut data = state.with_phase(|x| twist * (x - x0)).into_amplitudes();
                plan.forward(&mut data);
                data.iter_mut()
                    .zip(values)
                    .for_each(|(d, v)| *d *= Complex64::from_polar(1.0, -v * t));
                plan.inverse(&mut data);
                let out = StateVector::new(grid, data)?;
                Ok(if *twist == 0.0 { out } else { out.with_phase(|x| -twist * (x - x0)) })
            }
            (Method::Eigenbasis(spec), _) => {
                let (o, d) = (spec.offset(), spec.dim());
                let q = spec.eigenvectors();
                let block = DVector::from_column_slice(&state.amplitudes()[o..o + d]);
                let mut coeffs = q.ad_mul(&block);
                coeffs
                    .iter_mut()
                    .zip(spec.eigenvalues())
                    .for_each(|(cf, &e)| *cf *= Complex64::from_polar(1.0, -e * t));
                let advanced = q * coeffs;
                // exp(0) = 1 on sites outside the block.
                let mut out = state.clone();
                out.amplitudes_mut()[o..o + d].copy_from_slice(advanced.as_slice());
                Ok(out)
            }
            _ => unreachable!("method is derived from the realization"),
        }
    }

    /// `||U(-t) U(t) psi - psi||`.
    pub fn reverse_check(&self, state: &StateVector, t: f64) -> Result<f64> {
        if !self.source.is_hermitian() {
            return Err(ZenoError::Refused("time-reversal check needs a Hermitian source".into()));
        }
        let there = self.evolve(state, t)?;
        let back = self.evolve(&there, -t)?;
        back.distance(state)
    }
}
