//! Hilbert-space bookkeeping for the excitation sectors.
//!
//! The conserved excitation number splits the register+bath space into
//! finite sectors. This module counts and enumerates their bases, evaluates
//! the su(2) irrep multiplicities of the register and builds the
//! distinguished one-excitation spin vectors (symmetric, momentum and
//! partial superpositions).

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SectorError {
    #[error(
        "register needs at least one qubit and one bath mode (got N={n_qubits}, N_b={n_modes})"
    )]
    EmptyShape { n_qubits: usize, n_modes: usize },
    #[error("sector dimension overflows 128-bit arithmetic")]
    Overflow,
    #[error("total spin 2S={twice_spin} is not admissible for N={n_qubits} qubits")]
    InadmissibleSpin { twice_spin: u32, n_qubits: u32 },
    #[error("momentum index n={index} out of range 1..={max}")]
    MomentumIndex { index: usize, max: usize },
    #[error("superposition size M={m} out of range 1..={n_qubits}")]
    SuperpositionSize { m: usize, n_qubits: usize },
    #[error("spin vector has zero norm")]
    ZeroNorm,
}

/// Number of qubits `N` and bath modes `N_b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RegisterShape {
    n_qubits: usize,
    n_modes: usize,
}

impl RegisterShape {
    pub fn new(n_qubits: usize, n_modes: usize) -> Result<Self, SectorError> {
        if n_qubits == 0 || n_modes == 0 {
            return Err(SectorError::EmptyShape { n_qubits, n_modes });
        }
        Ok(Self { n_qubits, n_modes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Dimension of the one-excitation sector, `N + N_b`.
    pub fn one_excitation_dim(&self) -> usize {
        self.n_qubits + self.n_modes
    }
}

/// A product state of an excitation sector: which qubits are flipped and
/// which bath modes are occupied (with repetition).
///
/// Indices are 1-based. Spins are strictly increasing, bosons nondecreasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisLabel {
    pub spin_excitations: Vec<usize>,
    pub boson_occupations: Vec<usize>,
}

impl BasisLabel {
    pub fn excitations(&self) -> usize {
        self.spin_excitations.len() + self.boson_occupations.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorBasis {
    pub shape: RegisterShape,
    pub excitation_number: usize,
    pub labels: Vec<BasisLabel>,
}

impl SectorBasis {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Exact binomial coefficient, `None` on overflow.
pub(crate) fn binomial(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc == C(n, i) here, so the division is exact
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Dimension of the `I`-excitation sector:
/// `d_I = sum_l C(N, l) * C(I - l + N_b - 1, N_b - 1)`.
pub fn dimension(shape: RegisterShape, excitations: usize) -> Result<u128, SectorError> {
    let n = shape.n_qubits as u128;
    let nb = shape.n_modes as u128;
    let i = excitations as u128;
    let mut total: u128 = 0;
    for l in 0..=n.min(i) {
        let spins = binomial(n, l).ok_or(SectorError::Overflow)?;
        let bosons = binomial(i - l + nb - 1, nb - 1).ok_or(SectorError::Overflow)?;
        let term = spins.checked_mul(bosons).ok_or(SectorError::Overflow)?;
        total = total.checked_add(term).ok_or(SectorError::Overflow)?;
    }
    Ok(total)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        let remaining = k - current.len();
        for v in start..=n {
            if n - v + 1 < remaining {
                break;
            }
            current.push(v);
            rec(v + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(1, n, k, &mut current, &mut out);
    out
}

fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for v in start..=n {
            current.push(v);
            rec(v, n, k, current, out);
            current.pop();
        }
    }
    rec(1, n, k, &mut current, &mut out);
    out
}

/// Enumerates the product basis of the `I`-excitation sector.
///
/// Labels are grouped by spin-excitation count in descending order (so the
/// one-excitation basis reads `|1>..|N>, |k_1>..|k_Nb>`), lexicographic on
/// `(spins, bosons)` within each group.
pub fn enumerate_basis(shape: RegisterShape, excitations: usize) -> SectorBasis {
    let mut labels = Vec::new();
    for n_spins in (0..=excitations.min(shape.n_qubits)).rev() {
        let spin_sets = combinations(shape.n_qubits, n_spins);
        let boson_sets = multisets(shape.n_modes, excitations - n_spins);
        for spins in &spin_sets {
            for bosons in &boson_sets {
                labels.push(BasisLabel {
                    spin_excitations: spins.clone(),
                    boson_occupations: bosons.clone(),
                });
            }
        }
    }
    SectorBasis {
        shape,
        excitation_number: excitations,
        labels,
    }
}

/// Total spin `S` stored as the integer `2S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TwiceSpin(pub u32);

impl TwiceSpin {
    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }
}

/// Admissible total spins of `N` qubits, ascending: `s, s+1, .., N/2`.
pub fn spin_ladder(n_qubits: u32) -> impl Iterator<Item = TwiceSpin> {
    ((n_qubits % 2)..=n_qubits).step_by(2).map(TwiceSpin)
}

/// Number of times the spin-`S` irrep occurs in `N` spin-1/2 replicas,
/// `N! (2S+1) / ((N/2+S+1)! (N/2-S)!)`, evaluated as `C(N,a) - C(N,a-1)`
/// with `a = N/2 - S`.
pub fn su2_multiplicity(spin: TwiceSpin, n_qubits: u32) -> Result<u128, SectorError> {
    let TwiceSpin(twice) = spin;
    if twice > n_qubits || !(n_qubits - twice).is_multiple_of(2) {
        return Err(SectorError::InadmissibleSpin {
            twice_spin: twice,
            n_qubits,
        });
    }
    let n = u128::from(n_qubits);
    let a = u128::from((n_qubits - twice) / 2);
    let upper = binomial(n, a).ok_or(SectorError::Overflow)?;
    let lower = if a == 0 {
        0
    } else {
        binomial(n, a - 1).ok_or(SectorError::Overflow)?
    };
    Ok(upper - lower)
}

/// One-excitation register state `sum_j a_j sigma_j^+ |0>`, stored by
/// 0-based site.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinVector(Vec<Complex64>);

impl SpinVector {
    /// Normalizes the given amplitudes.
    pub fn from_amplitudes(mut amplitudes: Vec<Complex64>) -> Result<Self, SectorError> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(SectorError::ZeroNorm);
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(Self(amplitudes))
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inner(&self, other: &SpinVector) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Linear combination `ca * a + cb * b`, renormalized.
    pub fn combine(
        ca: Complex64,
        a: &SpinVector,
        cb: Complex64,
        b: &SpinVector,
    ) -> Result<Self, SectorError> {
        let amps = a.0.iter().zip(&b.0).map(|(x, y)| ca * x + cb * y).collect();
        Self::from_amplitudes(amps)
    }
}

/// `N^{-1/2} S^+ |0>`.
pub fn symmetric_state(n_qubits: usize) -> SpinVector {
    let a = Complex64::new((n_qubits as f64).sqrt().recip(), 0.0);
    SpinVector(vec![a; n_qubits])
}

/// Spin wave with momentum `k = 2 pi n / N`; site `j` (1-based) carries
/// `N^{-1/2} e^{i k j}`. These span the complement of the symmetric state.
pub fn momentum_state(n_qubits: usize, index: usize) -> Result<SpinVector, SectorError> {
    if n_qubits < 2 || index == 0 || index >= n_qubits {
        return Err(SectorError::MomentumIndex {
            index,
            max: n_qubits.saturating_sub(1),
        });
    }
    let scale = (n_qubits as f64).sqrt().recip();
    let amps = (1..=n_qubits)
        .map(|j| {
            // reduce n*j mod N first so the phase is exact at the lattice points
            let turns = (index * j) % n_qubits;
            let k = 2.0 * PI * turns as f64 / n_qubits as f64;
            Complex64::from_polar(scale, k)
        })
        .collect();
    Ok(SpinVector(amps))
}

/// Equal superposition of the first `M` single flips.
pub fn m_superposition(n_qubits: usize, m: usize) -> Result<SpinVector, SectorError> {
    if m == 0 || m > n_qubits {
        return Err(SectorError::SuperpositionSize { m, n_qubits });
    }
    let a = Complex64::new((m as f64).sqrt().recip(), 0.0);
    let mut amps = vec![Complex64::new(0.0, 0.0); n_qubits];
    amps[..m].fill(a);
    Ok(SpinVector(amps))
}
