//! Brute-force time stepping with the truncated Taylor series of
//! `exp(-i H dt)`.
//!
//! Shares nothing with the eigendecomposition path beyond the Hamiltonian
//! matrix itself. Used to cross-check `dynamics::evolve` and to measure the
//! short-time fidelity law.

use num_complex::Complex64;

use crate::model::HermitianMatrix;

/// Upper bound on `||H|| dt` for one Taylor step.
const STEP_NORM: f64 = 0.5;
const MAX_TERMS: usize = 64;

#[derive(Debug, Clone)]
pub struct TaylorPropagator<'a> {
    h: &'a HermitianMatrix,
    max_step: f64,
}

impl<'a> TaylorPropagator<'a> {
    pub fn new(h: &'a HermitianMatrix) -> Self {
        // max absolute column sum bounds the spectral radius
        let norm = (0..h.dim())
            .map(|j| (0..h.dim()).map(|i| h.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max);
        let max_step = if norm > 0.0 {
            STEP_NORM / norm
        } else {
            f64::INFINITY
        };
        Self { h, max_step }
    }

    fn step(&self, psi: &[Complex64], dt: f64) -> Vec<Complex64> {
        let mut acc = psi.to_vec();
        let mut term = psi.to_vec();
        for k in 1..=MAX_TERMS {
            let factor = Complex64::new(0.0, -dt / k as f64);
            term = self
                .h
                .matvec(&term)
                .into_iter()
                .map(|z| z * factor)
                .collect();
            let mut small = 0.0;
            for (a, t) in acc.iter_mut().zip(&term) {
                *a += t;
                small += t.norm_sqr();
            }
            if small.sqrt() < 1e-18 {
                break;
            }
        }
        acc
    }

    /// `exp(-i H dt) psi`, split into substeps of bounded norm.
    pub fn advance(&self, psi: &[Complex64], dt: f64) -> Vec<Complex64> {
        if dt == 0.0 {
            return psi.to_vec();
        }
        let substeps = (dt.abs() / self.max_step).ceil().max(1.0) as usize;
        let h = dt / substeps as f64;
        let mut state = psi.to_vec();
        for _ in 0..substeps {
            state = self.step(&state, h);
        }
        state
    }

    /// States at ascending `times`, each advanced from the previous one.
    pub fn trajectory(&self, psi0: &[Complex64], times: &[f64]) -> Vec<Vec<Complex64>> {
        let mut out = Vec::with_capacity(times.len());
        let mut state = psi0.to_vec();
        let mut now = 0.0;
        for &t in times {
            state = self.advance(&state, t - now);
            now = t;
            out.push(state.clone());
        }
        out
    }
}
