//! Physical parameters and the one-excitation Hamiltonian.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::sector::RegisterShape;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("qubit splitting must be positive and finite, got {0}")]
    Epsilon(f64),
    #[error("coupling strength must be finite, got {0}")]
    CouplingStrength(f64),
    #[error("coherence length must be positive and finite, got {0}")]
    CoherenceLength(f64),
    #[error("explicit coupling matrix has {got} entries, expected N_b x N = {expected}")]
    CouplingShape { got: usize, expected: usize },
    #[error("explicit coupling matrix contains a non-finite entry")]
    CouplingNotFinite,
    #[error("explicit dispersion has {got} frequencies, expected N_b = {expected}")]
    DispersionLength { got: usize, expected: usize },
    #[error("mode frequency {index} must be positive and finite, got {value}")]
    Frequency { index: usize, value: f64 },
}

/// Register-bath coupling `g_k(i)`.
#[derive(Debug, Clone, PartialEq)]
pub enum CouplingSpec {
    /// Same coupling for every mode and qubit (Dicke limit).
    Uniform { g0: f64 },
    /// `g0 cos(omega_k x_i / xi)` with site coordinate `x_i = i - 1`.
    CosineProfile { g0: f64, xi: f64 },
    /// Row-major `N_b x N` matrix, row = mode, column = qubit.
    Explicit { g: Vec<Complex64> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Dispersion {
    /// `omega_n = 2 pi n / N_b`, `n = 1..N_b`.
    Linear,
    Explicit {
        omegas: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    shape: RegisterShape,
    epsilon: f64,
    coupling: CouplingSpec,
    dispersion: Dispersion,
}

impl ModelParams {
    pub fn new(
        shape: RegisterShape,
        epsilon: f64,
        coupling: CouplingSpec,
        dispersion: Dispersion,
    ) -> Result<Self, ModelError> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(ModelError::Epsilon(epsilon));
        }
        match &coupling {
            CouplingSpec::Uniform { g0 } => {
                if !g0.is_finite() {
                    return Err(ModelError::CouplingStrength(*g0));
                }
            }
            CouplingSpec::CosineProfile { g0, xi } => {
                if !g0.is_finite() {
                    return Err(ModelError::CouplingStrength(*g0));
                }
                if !(*xi > 0.0 && xi.is_finite()) {
                    return Err(ModelError::CoherenceLength(*xi));
                }
            }
            CouplingSpec::Explicit { g } => {
                let expected = shape.n_modes() * shape.n_qubits();
                if g.len() != expected {
                    return Err(ModelError::CouplingShape {
                        got: g.len(),
                        expected,
                    });
                }
                if g.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(ModelError::CouplingNotFinite);
                }
            }
        }
        if let Dispersion::Explicit { omegas } = &dispersion {
            if omegas.len() != shape.n_modes() {
                return Err(ModelError::DispersionLength {
                    got: omegas.len(),
                    expected: shape.n_modes(),
                });
            }
            for (index, &value) in omegas.iter().enumerate() {
                if !(value > 0.0 && value.is_finite()) {
                    return Err(ModelError::Frequency {
                        index: index + 1,
                        value,
                    });
                }
            }
        }
        Ok(Self {
            shape,
            epsilon,
            coupling,
            dispersion,
        })
    }

    /// Uniform coupling, linear dispersion.
    pub fn uniform(shape: RegisterShape, epsilon: f64, g0: f64) -> Result<Self, ModelError> {
        Self::new(
            shape,
            epsilon,
            CouplingSpec::Uniform { g0 },
            Dispersion::Linear,
        )
    }

    pub fn shape(&self) -> RegisterShape {
        self.shape
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn coupling(&self) -> &CouplingSpec {
        &self.coupling
    }

    pub fn dispersion(&self) -> &Dispersion {
        &self.dispersion
    }

    /// Frequency of mode `n` (1-based).
    pub fn omega(&self, mode: usize) -> f64 {
        debug_assert!((1..=self.shape.n_modes()).contains(&mode));
        match &self.dispersion {
            Dispersion::Linear => 2.0 * PI * mode as f64 / self.shape.n_modes() as f64,
            Dispersion::Explicit { omegas } => omegas[mode - 1],
        }
    }

    pub fn omegas(&self) -> Vec<f64> {
        (1..=self.shape.n_modes()).map(|n| self.omega(n)).collect()
    }

    /// `g_n(i)` for mode `n` and qubit `i`, both 1-based.
    pub fn coupling_value(&self, mode: usize, qubit: usize) -> Complex64 {
        debug_assert!((1..=self.shape.n_qubits()).contains(&qubit));
        match &self.coupling {
            CouplingSpec::Uniform { g0 } => Complex64::new(*g0, 0.0),
            CouplingSpec::CosineProfile { g0, xi } => {
                let site = (qubit - 1) as f64;
                Complex64::new(g0 * (self.omega(mode) * site / xi).cos(), 0.0)
            }
            CouplingSpec::Explicit { g } => g[(mode - 1) * self.shape.n_qubits() + (qubit - 1)],
        }
    }

    /// Per-mode coupling when it does not depend on the qubit, `None`
    /// otherwise. Exact comparison: only genuinely qubit-independent
    /// couplings qualify.
    pub fn qubit_independent_couplings(&self) -> Option<Vec<Complex64>> {
        let n = self.shape.n_qubits();
        (1..=self.shape.n_modes())
            .map(|mode| {
                let first = self.coupling_value(mode, 1);
                (2..=n)
                    .all(|i| self.coupling_value(mode, i) == first)
                    .then_some(first)
            })
            .collect()
    }
}

/// Dense Hermitian matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl HermitianMatrix {
    /// Builds from the upper triangle `f(i, j)`, `i <= j`; the lower
    /// triangle is the exact conjugate mirror and the diagonal is made real.
    pub fn from_upper(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(f(i, i).re, 0.0);
            for j in i + 1..dim {
                let z = f(i, j);
                entries[i * dim + j] = z;
                entries[j * dim + i] = z.conj();
            }
        }
        Self { dim, entries }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_upper(dim, |i, j| {
            Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn row(&self, row: usize) -> &[Complex64] {
        &self.entries[row * self.dim..(row + 1) * self.dim]
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i).re).sum()
    }

    /// `P H P^T` for the permutation sending basis index `i` to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.dim);
        let mut entries = vec![Complex64::new(0.0, 0.0); self.entries.len()];
        for i in 0..self.dim {
            for j in 0..self.dim {
                entries[perm[i] * self.dim + perm[j]] = self.get(i, j);
            }
        }
        Self {
            dim: self.dim,
            entries,
        }
    }
}

/// One-excitation Hamiltonian in the basis `|1>..|N>, |k_1>..|k_Nb>`.
///
/// Energies are measured from the reference state `|0>`: spin flips sit at
/// `epsilon`, single bosons at `omega_k`, and the only off-diagonal block is
/// `<k|H|alpha> = g_k(alpha)`.
pub fn build_h1(params: &ModelParams) -> HermitianMatrix {
    let n = params.shape().n_qubits();
    let omegas = params.omegas();
    let dim = params.shape().one_excitation_dim();
    HermitianMatrix::from_upper(dim, |i, j| {
        let zero = Complex64::new(0.0, 0.0);
        match (i < n, j < n) {
            (true, true) if i == j => Complex64::new(params.epsilon(), 0.0),
            (true, true) => zero,
            // upper triangle element <alpha|H|k> = conj(g_k(alpha))
            (true, false) => params.coupling_value(j - n + 1, i + 1).conj(),
            (false, false) if i == j => Complex64::new(omegas[i - n], 0.0),
            _ => zero,
        }
    })
}
