//! Unitary evolution in the one-excitation sector and the register
//! observables derived from it.
//!
//! The global state stays pure. Tracing out the bath leaves the register
//! in `P1 |psi_s><psi_s| + P0 |0><0|`, so every observable here reduces to
//! the spin block of the amplitude vector and its norm.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::model::{build_h1, ModelParams};
use crate::sector::{RegisterShape, SpinVector};
use crate::spectral::{diagonalize, SpectralDecomposition, SpectralError};

/// Fraction of the grid, measured from the end, that counts as "late".
pub const LATE_WINDOW_FRACTION: f64 = 0.25;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("preparation has {got} amplitudes, register has {expected} qubits")]
    PreparationLength { got: usize, expected: usize },
    #[error("state dimension {got} does not match decomposition dimension {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error(
        "time grid needs t_max > 0 and at least 2 steps (got t_max={t_max}, n_steps={n_steps})"
    )]
    Grid { t_max: f64, n_steps: usize },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Amplitudes over `|1>..|N>, |k_1>..|k_Nb>`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeVector {
    n_qubits: usize,
    c: Vec<Complex64>,
}

impl AmplitudeVector {
    pub fn new(n_qubits: usize, c: Vec<Complex64>) -> Self {
        assert!(n_qubits <= c.len());
        Self { n_qubits, c }
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.c
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn spin_block(&self) -> &[Complex64] {
        &self.c[..self.n_qubits]
    }

    pub fn boson_block(&self) -> &[Complex64] {
        &self.c[self.n_qubits..]
    }

    pub fn norm(&self) -> f64 {
        self.c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }
}

/// `|psi_0^s> (x) |0>_b`.
pub fn initial_amplitudes(
    prep: &SpinVector,
    shape: RegisterShape,
) -> Result<AmplitudeVector, DynamicsError> {
    if prep.len() != shape.n_qubits() {
        return Err(DynamicsError::PreparationLength {
            got: prep.len(),
            expected: shape.n_qubits(),
        });
    }
    let mut c = prep.amplitudes().to_vec();
    c.resize(shape.one_excitation_dim(), Complex64::new(0.0, 0.0));
    Ok(AmplitudeVector::new(shape.n_qubits(), c))
}

/// Evolves one initial state under a fixed eigensystem. The projection onto
/// the eigenbasis is done once; each time point is then a single
/// matrix-vector product.
#[derive(Debug, Clone)]
pub struct Propagator<'a> {
    sd: &'a SpectralDecomposition,
    n_qubits: usize,
    weights: Vec<Complex64>,
}

impl<'a> Propagator<'a> {
    pub fn new(sd: &'a SpectralDecomposition, c0: &AmplitudeVector) -> Result<Self, DynamicsError> {
        if c0.len() != sd.dim() {
            return Err(DynamicsError::DimensionMismatch {
                got: c0.len(),
                expected: sd.dim(),
            });
        }
        Ok(Self {
            sd,
            n_qubits: c0.n_qubits(),
            weights: sd.project(c0.as_slice()),
        })
    }

    /// `C_gamma(t) = sum_i c_i^0 <gamma|phi_i> e^{-i E_i t}`.
    pub fn at(&self, t: f64) -> AmplitudeVector {
        let rotated: Vec<Complex64> = self
            .weights
            .iter()
            .zip(self.sd.eigenvalues())
            .map(|(w, &e)| {
                let (s, c) = (e * t).sin_cos();
                w * Complex64::new(c, -s)
            })
            .collect();
        let c = (0..self.sd.dim())
            .map(|g| {
                self.sd
                    .basis_row(g)
                    .iter()
                    .zip(&rotated)
                    .map(|(v, r)| v * r)
                    .sum()
            })
            .collect();
        AmplitudeVector::new(self.n_qubits, c)
    }
}

pub fn evolve(
    sd: &SpectralDecomposition,
    c0: &AmplitudeVector,
    t: f64,
) -> Result<AmplitudeVector, DynamicsError> {
    Ok(Propagator::new(sd, c0)?.at(t))
}

/// Register state after tracing out the bath.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedState {
    /// Probability that the register still holds the excitation.
    pub p1: f64,
    /// Probability that the excitation sits in the bath.
    pub p0: f64,
    /// Unnormalized `C_alpha`; their outer product is the excited block.
    pub spin_amplitudes: Vec<Complex64>,
}

impl ReducedState {
    /// `rho_s` in the basis `|0>_s, |1>, .., |N>`, row-major.
    pub fn density_matrix(&self) -> Vec<Complex64> {
        let n = self.spin_amplitudes.len() + 1;
        let mut rho = vec![Complex64::new(0.0, 0.0); n * n];
        rho[0] = Complex64::new(self.p0, 0.0);
        for (a, ca) in self.spin_amplitudes.iter().enumerate() {
            for (b, cb) in self.spin_amplitudes.iter().enumerate() {
                rho[(a + 1) * n + b + 1] = ca * cb.conj();
            }
        }
        rho
    }
}

pub fn reduce(c: &AmplitudeVector) -> ReducedState {
    let p1 = c.spin_block().iter().map(|z| z.norm_sqr()).sum();
    let p0 = c.boson_block().iter().map(|z| z.norm_sqr()).sum();
    ReducedState {
        p1,
        p0,
        spin_amplitudes: c.spin_block().to_vec(),
    }
}

/// `D(t) = sum_alpha C_alpha(t) conj(C_alpha(0))`.
pub fn decoherence_function(c0: &AmplitudeVector, ct: &AmplitudeVector) -> Complex64 {
    ct.spin_block()
        .iter()
        .zip(c0.spin_block())
        .map(|(a, b)| a * b.conj())
        .sum()
}

/// `F(t) = <psi_0^s| rho_s(t) |psi_0^s> = |D(t)|^2` for spin-block initial data.
pub fn fidelity(c0: &AmplitudeVector, ct: &AmplitudeVector) -> f64 {
    decoherence_function(c0, ct).norm_sqr()
}

/// `<psi_0^s| rho_s(t) |0>_s` for the preparation
/// `(|0>_s + |psi_0^s>) / sqrt 2`. The vacuum is stationary at zero
/// energy, so the coherence is `D(t) / 2`.
pub fn vacuum_coherence(d: Complex64) -> Complex64 {
    d * 0.5
}

fn plogp(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p * p.log2()
    }
}

/// von Neumann entropy of the reduced register state, in bits.
pub fn entropy(rs: &ReducedState) -> f64 {
    let p1 = rs.p1.clamp(0.0, 1.0);
    let p0 = rs.p0.clamp(0.0, 1.0);
    (-(plogp(p0) + plogp(p1))).max(0.0)
}

/// Bath, conditional and mutual entropies of the pure global state, with
/// the sign convention `S(S|B) = -S_s`, `S(B:S) = -2 S_s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelatedEntropies {
    pub bath: f64,
    pub conditional: f64,
    pub mutual: f64,
}

pub fn related_entropies(rs: &ReducedState) -> RelatedEntropies {
    let s = entropy(rs);
    RelatedEntropies {
        bath: s,
        conditional: -s,
        mutual: -2.0 * s,
    }
}

/// Uniform grid `t_j = j t_max / (n_steps - 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_max: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, n_steps: usize) -> Result<Self, DynamicsError> {
        if !(t_max > 0.0 && t_max.is_finite()) || n_steps < 2 {
            return Err(DynamicsError::Grid { t_max, n_steps });
        }
        Ok(Self { t_max, n_steps })
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.t_max / (self.n_steps - 1) as f64
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_steps).map(|j| self.time(j))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSeriesRecord {
    pub t: f64,
    pub fidelity: f64,
    pub entropy_bits: f64,
    pub p0: f64,
    pub p1: f64,
    pub d_re: f64,
    pub d_im: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub records: Vec<TimeSeriesRecord>,
    /// Mean fidelity over the last quarter of the grid.
    pub late_fidelity: f64,
    /// Mean entropy (bits) over the last quarter of the grid.
    pub late_entropy: f64,
}

impl TimeSeries {
    fn from_records(records: Vec<TimeSeriesRecord>) -> Self {
        let t_max = records.last().map_or(0.0, |r| r.t);
        let cutoff = (1.0 - LATE_WINDOW_FRACTION) * t_max;
        let late: Vec<_> = records.iter().filter(|r| r.t >= cutoff).collect();
        let n = late.len() as f64;
        let late_fidelity = late.iter().map(|r| r.fidelity).sum::<f64>() / n;
        let late_entropy = late.iter().map(|r| r.entropy_bits).sum::<f64>() / n;
        Self {
            records,
            late_fidelity,
            late_entropy,
        }
    }

    /// Mean fidelity over the whole grid.
    pub fn mean_fidelity(&self) -> f64 {
        self.records.iter().map(|r| r.fidelity).sum::<f64>() / self.records.len() as f64
    }

    /// Mean fidelity over records with `t` in `[from, to)`.
    pub fn mean_fidelity_between(&self, from: f64, to: f64) -> Option<f64> {
        let sel: Vec<f64> = self
            .records
            .iter()
            .filter(|r| r.t >= from && r.t < to)
            .map(|r| r.fidelity)
            .collect();
        (!sel.is_empty()).then(|| sel.iter().sum::<f64>() / sel.len() as f64)
    }
}

/// Records for one preparation under an existing eigensystem.
pub fn time_series_from(
    sd: &SpectralDecomposition,
    shape: RegisterShape,
    prep: &SpinVector,
    grid: TimeGrid,
) -> Result<TimeSeries, DynamicsError> {
    let c0 = initial_amplitudes(prep, shape)?;
    let propagator = Propagator::new(sd, &c0)?;
    let records = (0..grid.n_steps())
        .into_par_iter()
        .map(|j| {
            let t = grid.time(j);
            let ct = propagator.at(t);
            let rs = reduce(&ct);
            let d = decoherence_function(&c0, &ct);
            TimeSeriesRecord {
                t,
                fidelity: d.norm_sqr(),
                entropy_bits: entropy(&rs),
                p0: rs.p0,
                p1: rs.p1,
                d_re: d.re,
                d_im: d.im,
            }
        })
        .collect();
    Ok(TimeSeries::from_records(records))
}

/// Builds and diagonalizes the Hamiltonian once, then samples the grid.
pub fn run_time_series(
    params: &ModelParams,
    prep: &SpinVector,
    grid: TimeGrid,
) -> Result<TimeSeries, DynamicsError> {
    let sd = diagonalize(&build_h1(params))?;
    time_series_from(&sd, params.shape(), prep, grid)
}

/// Fidelity band used to locate the exponential decay segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationWindow {
    pub upper: f64,
    pub lower: f64,
}

impl RelaxationWindow {
    /// Monotone decay segment used for relaxation-time scaling.
    pub const DECAY: Self = Self {
        upper: 0.8,
        lower: 0.2,
    };
    /// Onset of the decay, past the quadratic regime; the only segment that
    /// is exponential when the fidelity saturates at a finite value.
    pub const ONSET: Self = Self {
        upper: 0.97,
        lower: 0.90,
    };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RelaxationFit {
    Exponential {
        tau: f64,
        /// Number of records inside the fitted segment.
        points: usize,
    },
    /// Fidelity revives inside the record span; no single decay time.
    Oscillatory,
    /// The fidelity never crosses the window.
    Insufficient,
}

impl RelaxationFit {
    pub fn tau(&self) -> Option<f64> {
        match self {
            Self::Exponential { tau, .. } => Some(*tau),
            _ => None,
        }
    }
}

/// Least-squares fit of `ln F = a - t / tau` over the first passage of `F`
/// through `[lower, upper]`.
pub fn fit_relaxation(records: &[TimeSeriesRecord], window: RelaxationWindow) -> RelaxationFit {
    let Some(start) = records.iter().position(|r| r.fidelity <= window.upper) else {
        return RelaxationFit::Insufficient;
    };
    let Some(len) = records[start..]
        .iter()
        .position(|r| r.fidelity < window.lower)
    else {
        return RelaxationFit::Insufficient;
    };
    let end = start + len;
    if records[end..].iter().any(|r| r.fidelity > window.upper) {
        return RelaxationFit::Oscillatory;
    }
    let segment = &records[start..end];
    if segment.len() < 3 {
        return RelaxationFit::Insufficient;
    }
    let n = segment.len() as f64;
    let (mut st, mut sy, mut stt, mut sty) = (0.0, 0.0, 0.0, 0.0);
    for r in segment {
        let y = r.fidelity.ln();
        st += r.t;
        sy += y;
        stt += r.t * r.t;
        sty += r.t * y;
    }
    let slope = (n * sty - st * sy) / (n * stt - st * st);
    if slope.is_nan() || slope >= 0.0 {
        return RelaxationFit::Oscillatory;
    }
    RelaxationFit::Exponential {
        tau: -1.0 / slope,
        points: segment.len(),
    }
}

/// Fits `F(t) - 1 = c2 t^2 + c4 t^4` by least squares and returns `c2`.
pub fn short_time_coefficient(samples: &[(f64, f64)]) -> f64 {
    let (mut s44, mut s46, mut s88, mut s4y, mut s8y) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(t, f) in samples {
        let x2 = t * t;
        let x4 = x2 * x2;
        let y = f - 1.0;
        s44 += x2 * x2;
        s46 += x2 * x4;
        s88 += x4 * x4;
        s4y += x2 * y;
        s8y += x4 * y;
    }
    let det = s44 * s88 - s46 * s46;
    (s4y * s88 - s8y * s46) / det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CouplingSpec, Dispersion};
    use crate::sector::{m_superposition, momentum_state, symmetric_state};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn jc(g: f64) -> (ModelParams, SpectralDecomposition) {
        let p = ModelParams::new(
            RegisterShape::new(1, 1).unwrap(),
            1.0,
            CouplingSpec::Uniform { g0: g },
            Dispersion::Explicit { omegas: vec![1.0] },
        )
        .unwrap();
        let sd = diagonalize(&build_h1(&p)).unwrap();
        (p, sd)
    }

    #[test]
    fn initial_amplitude_layout() {
        let shape = RegisterShape::new(2, 3).unwrap();
        let s = 0.5f64.sqrt();
        let a = initial_amplitudes(&symmetric_state(2), shape).unwrap();
        assert_eq!(a.len(), 5);
        assert!((a.as_slice()[0].re - s).abs() < 1e-15 && (a.as_slice()[1].re - s).abs() < 1e-15);
        assert!(a.boson_block().iter().all(|z| z.norm() == 0.0));
        let m = initial_amplitudes(&momentum_state(2, 1).unwrap(), shape).unwrap();
        assert!((m.as_slice()[0].re + s).abs() < 1e-15);
        let shape4 = RegisterShape::new(4, 3).unwrap();
        let ms = initial_amplitudes(&m_superposition(4, 2).unwrap(), shape4).unwrap();
        assert_eq!(ms.as_slice()[2], c(0.0, 0.0));
        assert!(initial_amplitudes(&symmetric_state(3), shape).is_err());
    }

    #[test]
    fn evolution_at_zero_is_identity() {
        let p = ModelParams::uniform(RegisterShape::new(3, 8).unwrap(), 1.0, 0.05).unwrap();
        let sd = diagonalize(&build_h1(&p)).unwrap();
        let c0 = initial_amplitudes(&m_superposition(3, 2).unwrap(), p.shape()).unwrap();
        let ct = evolve(&sd, &c0, 0.0).unwrap();
        for (a, b) in ct.as_slice().iter().zip(c0.as_slice()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn eigenvector_is_stationary() {
        let p = ModelParams::uniform(RegisterShape::new(2, 5).unwrap(), 1.0, 0.1).unwrap();
        let sd = diagonalize(&build_h1(&p)).unwrap();
        let i = 3;
        let v = AmplitudeVector::new(2, sd.eigenvector(i));
        let t = 17.3;
        let ct = evolve(&sd, &v, t).unwrap();
        let phase = Complex64::from_polar(1.0, -sd.eigenvalues()[i] * t);
        for (a, b) in ct.as_slice().iter().zip(v.as_slice()) {
            assert!((a - b * phase).norm() < 1e-12);
        }
        let d = decoherence_function(&v, &ct);
        let spin_weight: f64 = v.spin_block().iter().map(|z| z.norm_sqr()).sum();
        assert!((d.norm() - spin_weight).abs() < 1e-12);
    }

    #[test]
    fn resonant_rabi_oscillation() {
        let g = 0.05;
        let (p, sd) = jc(g);
        let c0 = initial_amplitudes(&symmetric_state(1), p.shape()).unwrap();
        for t in [
            0.0,
            std::f64::consts::FRAC_PI_4 / g,
            std::f64::consts::FRAC_PI_2 / g,
        ] {
            let ct = evolve(&sd, &c0, t).unwrap();
            let expected = (g * t).cos().powi(2);
            assert!((ct.as_slice()[0].norm_sqr() - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn reduce_limits() {
        let shape = RegisterShape::new(3, 4).unwrap();
        let c0 = initial_amplitudes(&m_superposition(3, 3).unwrap(), shape).unwrap();
        let rs = reduce(&c0);
        assert!((rs.p1 - 1.0).abs() < 1e-15 && rs.p0 == 0.0);
        let mut bath = vec![c(0.0, 0.0); 7];
        bath[5] = c(0.6, 0.0);
        bath[6] = c(0.0, 0.8);
        let rs = reduce(&AmplitudeVector::new(3, bath));
        assert_eq!(rs.p1, 0.0);
        assert!((rs.p0 - 1.0).abs() < 1e-15);
        let rho = rs.density_matrix();
        assert!((rho[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(rho[1..].iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn reduced_density_matrix_structure() {
        let rs = ReducedState {
            p1: 0.36,
            p0: 0.64,
            spin_amplitudes: vec![c(0.3, 0.3), c(0.0, -(0.36f64 - 0.18).sqrt())],
        };
        let rho = rs.density_matrix();
        let n = 3;
        let trace: f64 = (0..n).map(|i| rho[i * n + i].re).sum();
        assert!((trace - 1.0).abs() < 1e-12);
        for i in 0..n {
            for j in 0..n {
                assert!((rho[i * n + j] - rho[j * n + i].conj()).norm() < 1e-15);
            }
        }
        // the excited block is rank one with eigenvalue p1: rho_ex * C = p1 * C
        for a in 0..2 {
            let v: Complex64 = (0..2)
                .map(|b| rho[(a + 1) * n + b + 1] * rs.spin_amplitudes[b])
                .sum();
            assert!((v - rs.spin_amplitudes[a] * rs.p1).norm() < 1e-12);
        }
    }

    #[test]
    fn fidelity_limits() {
        let shape = RegisterShape::new(2, 3).unwrap();
        let c0 = initial_amplitudes(&symmetric_state(2), shape).unwrap();
        assert!((fidelity(&c0, &c0) - 1.0).abs() < 1e-15);
        assert!((decoherence_function(&c0, &c0) - c(1.0, 0.0)).norm() < 1e-15);
        let bath = AmplitudeVector::new(
            2,
            vec![
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(1.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
            ],
        );
        assert_eq!(fidelity(&c0, &bath), 0.0);
    }

    #[test]
    fn momentum_preparation_is_decoherence_free() {
        let p = ModelParams::uniform(RegisterShape::new(3, 20).unwrap(), 1.0, 0.05).unwrap();
        let sd = diagonalize(&build_h1(&p)).unwrap();
        let c0 = initial_amplitudes(&momentum_state(3, 2).unwrap(), p.shape()).unwrap();
        for t in [1.0, 50.0, 500.0] {
            let ct = evolve(&sd, &c0, t).unwrap();
            assert!((fidelity(&c0, &ct) - 1.0).abs() < 1e-10);
            assert!(entropy(&reduce(&ct)) < 1e-10);
        }
    }

    #[test]
    fn entropy_values() {
        let rs = |p1: f64| ReducedState {
            p1,
            p0: 1.0 - p1,
            spin_amplitudes: vec![],
        };
        assert_eq!(entropy(&rs(1.0)), 0.0);
        assert_eq!(entropy(&rs(0.0)), 0.0);
        assert!((entropy(&rs(0.5)) - 1.0).abs() < 1e-15);
        let expected = -0.75 * 0.75f64.log2() - 0.25 * 0.25f64.log2();
        assert!((entropy(&rs(0.75)) - expected).abs() < 1e-15);
        assert!((expected - 0.8113).abs() < 1e-4);

        assert_eq!(
            related_entropies(&rs(1.0)),
            RelatedEntropies {
                bath: 0.0,
                conditional: 0.0,
                mutual: 0.0
            }
        );
        let half = related_entropies(&rs(0.5));
        assert!((half.bath - 1.0).abs() < 1e-15);
        assert!((half.conditional + 1.0).abs() < 1e-15);
        assert!((half.mutual + 2.0).abs() < 1e-15);
    }

    #[test]
    fn vacuum_coherence_is_half_of_d() {
        assert_eq!(vacuum_coherence(c(0.4, -0.2)), c(0.2, -0.1));
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(10.0, 1).is_err());
        assert!(TimeGrid::new(0.0, 10).is_err());
        let g = TimeGrid::new(10.0, 11).unwrap();
        assert_eq!(g.times().collect::<Vec<_>>()[3], 3.0);
        assert_eq!(g.time(10), 10.0);
    }

    #[test]
    fn time_series_starts_pure() {
        let p = ModelParams::uniform(RegisterShape::new(2, 30).unwrap(), 1.0, 0.02).unwrap();
        let ts =
            run_time_series(&p, &symmetric_state(2), TimeGrid::new(50.0, 101).unwrap()).unwrap();
        let r0 = ts.records[0];
        assert_eq!(r0.t, 0.0);
        assert!((r0.fidelity - 1.0).abs() < 1e-12);
        assert!(r0.entropy_bits.abs() < 1e-12);
        assert!((r0.p1 - 1.0).abs() < 1e-12);
        for r in &ts.records {
            assert!((r.fidelity - (r.d_re * r.d_re + r.d_im * r.d_im)).abs() < 1e-12);
            assert!((0.0..=1.0).contains(&r.entropy_bits));
        }
    }

    #[test]
    fn global_phase_does_not_change_observables() {
        let p = ModelParams::new(
            RegisterShape::new(3, 12).unwrap(),
            1.0,
            CouplingSpec::CosineProfile { g0: 0.05, xi: 2.0 },
            Dispersion::Linear,
        )
        .unwrap();
        let sd = diagonalize(&build_h1(&p)).unwrap();
        let prep = m_superposition(3, 2).unwrap();
        let phase = Complex64::from_polar(1.0, 0.7);
        let rotated =
            SpinVector::from_amplitudes(prep.amplitudes().iter().map(|a| a * phase).collect())
                .unwrap();
        let grid = TimeGrid::new(40.0, 21).unwrap();
        let a = time_series_from(&sd, p.shape(), &prep, grid).unwrap();
        let b = time_series_from(&sd, p.shape(), &rotated, grid).unwrap();
        for (x, y) in a.records.iter().zip(&b.records) {
            assert!((x.fidelity - y.fidelity).abs() < 1e-13);
            assert!((x.entropy_bits - y.entropy_bits).abs() < 1e-13);
        }
    }

    #[test]
    fn relaxation_fit_on_synthetic_exponential() {
        let records: Vec<_> = (0..400)
            .map(|j| {
                let t = j as f64 * 0.25;
                TimeSeriesRecord {
                    t,
                    fidelity: (-t / 12.5).exp(),
                    entropy_bits: 0.0,
                    p0: 0.0,
                    p1: 1.0,
                    d_re: 0.0,
                    d_im: 0.0,
                }
            })
            .collect();
        let tau = fit_relaxation(&records, RelaxationWindow::DECAY)
            .tau()
            .unwrap();
        assert!((tau - 12.5).abs() < 1e-9);
        assert_eq!(
            fit_relaxation(&records[..3], RelaxationWindow::DECAY),
            RelaxationFit::Insufficient
        );

        let mut revived = records.clone();
        revived.last_mut().unwrap().fidelity = 0.95;
        assert_eq!(
            fit_relaxation(&revived, RelaxationWindow::DECAY),
            RelaxationFit::Oscillatory
        );
    }

    #[test]
    fn short_time_fit_recovers_polynomial() {
        let samples: Vec<_> = (0..51)
            .map(|j| {
                let t = j as f64 * 0.01;
                (t, 1.0 - 0.04 * t * t + 0.01 * t.powi(4))
            })
            .collect();
        assert!((short_time_coefficient(&samples) + 0.04).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn reduce_conserves_probability(seed in any::<u64>(), n in 1usize..6, nb in 1usize..10) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut v: Vec<Complex64> = (0..n + nb)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.iter_mut().for_each(|z| *z /= norm);
            let rs = reduce(&AmplitudeVector::new(n, v));
            prop_assert!((rs.p0 + rs.p1 - 1.0).abs() < 1e-12);
            let spin: f64 = rs.spin_amplitudes.iter().map(|z| z.norm_sqr()).sum();
            prop_assert!((rs.p1 - spin).abs() < 1e-12);
            let s = entropy(&rs);
            prop_assert!((0.0..=1.0).contains(&s));
            let rel = related_entropies(&rs);
            prop_assert_eq!(rel.mutual, 2.0 * rel.conditional);
        }

        #[test]
        fn phases_compose(seed in any::<u64>(), t1 in 0.0f64..200.0, t2 in 0.0f64..200.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let shape = RegisterShape::new(2, 6).unwrap();
            let g = (0..12).map(|_| c(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1))).collect();
            let p = ModelParams::new(shape, 1.0, CouplingSpec::Explicit { g }, Dispersion::Linear).unwrap();
            let sd = diagonalize(&build_h1(&p)).unwrap();
            let c0 = initial_amplitudes(&m_superposition(2, 1).unwrap(), shape).unwrap();
            let direct = evolve(&sd, &c0, t1 + t2).unwrap();
            let composed = evolve(&sd, &evolve(&sd, &c0, t1).unwrap(), t2).unwrap();
            for (a, b) in direct.as_slice().iter().zip(composed.as_slice()) {
                prop_assert!((a - b).norm() < 1e-9);
            }
            prop_assert!((direct.norm() - 1.0).abs() < 1e-10);
        }
    }
}
