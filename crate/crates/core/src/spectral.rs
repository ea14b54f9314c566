//! Dense Hermitian eigensolver and the secular-equation spectrum of the
//! symmetric sector.
//!
//! `diagonalize` reduces the matrix to Hermitian tridiagonal form with
//! Householder reflections, gauges the off-diagonal phases away to get a
//! real symmetric tridiagonal matrix, and finishes with implicit QL
//! (tql2-style) sweeps. Everything is sequential and deterministic.
//!
//! `secular_roots` solves `E - eps - N sum_k |g_k|^2 / (E - omega_k) = 0`
//! by bisection in the pole-delimited brackets. It never touches the
//! matrix, so it serves as an independent check of `diagonalize`.

use num_complex::Complex64;
use thiserror::Error;

use crate::model::{HermitianMatrix, ModelParams};
use crate::sector::symmetric_state;

const MAX_QL_ITERATIONS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error(
        "QL iteration did not converge for eigenvalue {index} after {MAX_QL_ITERATIONS} sweeps"
    )]
    NoConvergence { index: usize },
    #[error("matrix contains non-finite entries")]
    NotFinite,
    #[error("secular equation requires a coupling that is the same for every qubit")]
    QubitDependentCoupling,
    #[error("secular bracket {interval} shows no sign change")]
    NoSignChange { interval: usize },
}

/// Eigenvalues in ascending order with the matching orthonormal
/// eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    // row-major, column i is eigenvector i
    vectors: Vec<Complex64>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `<gamma|phi_i>`.
    pub fn component(&self, gamma: usize, i: usize) -> Complex64 {
        self.vectors[gamma * self.dim() + i]
    }

    pub fn eigenvector(&self, i: usize) -> Vec<Complex64> {
        (0..self.dim()).map(|g| self.component(g, i)).collect()
    }

    /// Row `gamma` of the eigenvector matrix.
    pub(crate) fn basis_row(&self, gamma: usize) -> &[Complex64] {
        let d = self.dim();
        &self.vectors[gamma * d..(gamma + 1) * d]
    }

    /// `c_i = <phi_i|v>`.
    pub fn project(&self, v: &[Complex64]) -> Vec<Complex64> {
        let d = self.dim();
        assert_eq!(v.len(), d);
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        for (g, &vg) in v.iter().enumerate() {
            if vg == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (o, c) in out.iter_mut().zip(self.basis_row(g)) {
                *o += c.conj() * vg;
            }
        }
        out
    }

    /// `max_i ||H v_i - E_i v_i||`.
    pub fn max_residual(&self, h: &HermitianMatrix) -> f64 {
        (0..self.dim())
            .map(|i| {
                let v = self.eigenvector(i);
                let e = self.eigenvalues[i];
                h.matvec(&v)
                    .iter()
                    .zip(&v)
                    .map(|(hv, x)| (hv - x * e).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// `max |V^dag V - 1|` entrywise.
    pub fn orthonormality_error(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                let g: Complex64 = (0..d)
                    .map(|r| self.component(r, i).conj() * self.component(r, j))
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }
}

/// Full eigendecomposition of a Hermitian matrix.
pub fn diagonalize(h: &HermitianMatrix) -> Result<SpectralDecomposition, SpectralError> {
    let n = h.dim();
    if h.entries()
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(SpectralError::NotFinite);
    }
    let (diag, offdiag, unitary) = tridiagonalize(h);
    let (eigenvalues, rotation) = tql2(diag, offdiag)?;

    // eigenvectors = unitary * rotation
    let mut vectors = vec![Complex64::new(0.0, 0.0); n * n];
    for r in 0..n {
        let urow = &unitary[r * n..(r + 1) * n];
        let out = &mut vectors[r * n..(r + 1) * n];
        for (k, u) in urow.iter().enumerate() {
            if *u == Complex64::new(0.0, 0.0) {
                continue;
            }
            let zrow = &rotation[k * n..(k + 1) * n];
            for (o, z) in out.iter_mut().zip(zrow) {
                *o += u * z;
            }
        }
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        vectors,
    })
}

/// Householder reduction `H = U T U^dag` with `T` real symmetric
/// tridiagonal. Returns `(diag(T), subdiag(T) padded with a trailing 0, U)`.
fn tridiagonalize(h: &HermitianMatrix) -> (Vec<f64>, Vec<f64>, Vec<Complex64>) {
    let n = h.dim();
    let zero = Complex64::new(0.0, 0.0);
    let mut a = h.entries().to_vec();
    let mut q = vec![zero; n * n];
    for i in 0..n {
        q[i * n + i] = Complex64::new(1.0, 0.0);
    }

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let x: Vec<Complex64> = (k + 1..n).map(|i| a[i * n + k]).collect();
        let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let xnorm = (x[0].norm_sqr() + tail).sqrt();
        let phase = if x[0] == zero {
            Complex64::new(1.0, 0.0)
        } else {
            x[0] / x[0].norm()
        };
        let beta = -phase * xnorm;
        let mut w = x;
        w[0] -= beta;
        let vnorm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let scale = std::f64::consts::SQRT_2 / vnorm;
        for z in &mut w {
            *z *= scale;
        }

        // trailing block: A <- (I - w w^dag) A (I - w w^dag)
        let off = k + 1;
        let p: Vec<Complex64> = (0..m)
            .map(|i| {
                let row = &a[(off + i) * n + off..(off + i) * n + n];
                row.iter().zip(&w).map(|(x, y)| x * y).sum()
            })
            .collect();
        let half_wp = 0.5
            * w.iter()
                .zip(&p)
                .map(|(x, y)| x.conj() * y)
                .sum::<Complex64>()
                .re;
        let qv: Vec<Complex64> = p.iter().zip(&w).map(|(pi, wi)| pi - wi * half_wp).collect();
        for i in 0..m {
            let row = &mut a[(off + i) * n + off..(off + i) * n + n];
            for (j, aij) in row.iter_mut().enumerate() {
                *aij -= qv[i] * w[j].conj() + w[i] * qv[j].conj();
            }
        }
        a[off * n + k] = beta;
        a[k * n + off] = beta.conj();
        for i in off + 1..n {
            a[i * n + k] = zero;
            a[k * n + i] = zero;
        }

        // U <- U (I - w w^dag) on columns k+1..n
        for r in 0..n {
            let row = &mut q[r * n + off..r * n + n];
            let s: Complex64 = row.iter().zip(&w).map(|(x, y)| x * y).sum();
            for (x, wj) in row.iter_mut().zip(&w) {
                *x -= s * wj.conj();
            }
        }
    }

    // Gauge the complex subdiagonal to |e_i| with a diagonal unitary D:
    // T = D T' D^dag, so U <- U D.
    let diag: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    let mut offdiag = vec![0.0; n];
    let mut phase = Complex64::new(1.0, 0.0);
    let mut phases = Vec::with_capacity(n);
    phases.push(phase);
    for i in 0..n.saturating_sub(1) {
        let e = a[(i + 1) * n + i];
        let mag = e.norm();
        offdiag[i] = mag;
        if mag > 0.0 {
            phase *= e / mag;
        }
        phases.push(phase);
    }
    for r in 0..n {
        for (c, ph) in phases.iter().enumerate() {
            q[r * n + c] *= ph;
        }
    }
    (diag, offdiag, q)
}

/// Implicit QL on a real symmetric tridiagonal matrix. `e[i]` couples
/// `i` and `i + 1`; `e[n-1]` is ignored. Returns ascending eigenvalues and
/// the row-major rotation whose columns are the eigenvectors.
fn tql2(mut d: Vec<f64>, mut e: Vec<f64>) -> Result<(Vec<f64>, Vec<f64>), SpectralError> {
    let n = d.len();
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    if n == 0 {
        return Ok((d, z));
    }
    e[n - 1] = 0.0;

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }

        if m > l {
            let mut iterations = 0;
            loop {
                iterations += 1;
                if iterations > MAX_QL_ITERATIONS {
                    return Err(SpectralError::NoConvergence { index: l });
                }
                // implicit Wilkinson-like shift
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let zi = z[k * n + i];
                        let zi1 = z[k * n + i + 1];
                        z[k * n + i + 1] = s * zi + c * zi1;
                        z[k * n + i] = c * zi - s * zi1;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // selection sort keeps the permutation deterministic
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        for j in i + 1..n {
            if d[j] < d[k] {
                k = j;
            }
        }
        if k != i {
            d.swap(i, k);
            for r in 0..n {
                z.swap(r * n + i, r * n + k);
            }
        }
    }
    Ok((d, z))
}

/// `P(E) = E - eps - sum_j w_j / (E - p_j)` over merged poles.
struct SecularFunction<'a> {
    epsilon: f64,
    poles: &'a [(f64, f64)],
}

impl SecularFunction<'_> {
    fn eval(&self, e: f64) -> f64 {
        e - self.epsilon - self.poles.iter().map(|&(p, w)| w / (e - p)).sum::<f64>()
    }

    /// Bisection on an open bracket where `P(lo+) < 0 < P(hi-)`, carried
    /// to floating-point resolution.
    fn bisect(&self, mut lo: f64, mut hi: f64) -> f64 {
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return mid;
            }
            let v = self.eval(mid);
            if v == 0.0 {
                return mid;
            }
            if v < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
}

/// The `N_b + 1` energies of the symmetric one-excitation sector, ascending.
///
/// Degenerate frequencies are merged into one pole carrying the summed
/// weight; each merge contributes `omega` as a root with multiplicity
/// `group size - 1`. A mode group with zero total coupling cancels its pole
/// and returns `omega` itself.
pub fn secular_roots(params: &ModelParams) -> Result<Vec<f64>, SpectralError> {
    let couplings = params
        .qubit_independent_couplings()
        .ok_or(SpectralError::QubitDependentCoupling)?;
    let n = params.shape().n_qubits() as f64;
    let epsilon = params.epsilon();

    let mut modes: Vec<(f64, f64)> = params
        .omegas()
        .into_iter()
        .zip(&couplings)
        .map(|(w, g)| (w, n * g.norm_sqr()))
        .collect();
    modes.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut roots = Vec::with_capacity(modes.len() + 1);
    let mut poles: Vec<(f64, f64)> = Vec::new();
    let mut i = 0;
    while i < modes.len() {
        let omega = modes[i].0;
        let mut j = i;
        let mut weight = 0.0;
        while j < modes.len() && modes[j].0 == omega {
            weight += modes[j].1;
            j += 1;
        }
        let size = j - i;
        roots.extend(std::iter::repeat_n(omega, size - 1));
        if weight > 0.0 {
            poles.push((omega, weight));
        } else {
            roots.push(omega);
        }
        i = j;
    }

    let p = SecularFunction {
        epsilon,
        poles: &poles,
    };
    if poles.is_empty() {
        roots.push(epsilon);
    } else {
        let first = poles[0].0;
        let last = poles[poles.len() - 1].0;

        let mut step = 1.0 + (epsilon - first).abs();
        let mut lo = first - step;
        let mut expansions = 0;
        while p.eval(lo) >= 0.0 {
            step *= 2.0;
            lo = first - step;
            expansions += 1;
            if expansions > 2000 || !lo.is_finite() {
                return Err(SpectralError::NoSignChange { interval: 0 });
            }
        }
        roots.push(p.bisect(lo, first));

        for (k, pair) in poles.windows(2).enumerate() {
            let root = p.bisect(pair[0].0, pair[1].0);
            if !(root > pair[0].0 && root < pair[1].0) {
                return Err(SpectralError::NoSignChange { interval: k + 1 });
            }
            roots.push(root);
        }

        let mut step = 1.0 + (epsilon - last).abs();
        let mut hi = last + step;
        let mut expansions = 0;
        while p.eval(hi) <= 0.0 {
            step *= 2.0;
            hi = last + step;
            expansions += 1;
            if expansions > 2000 || !hi.is_finite() {
                return Err(SpectralError::NoSignChange {
                    interval: poles.len(),
                });
            }
        }
        roots.push(p.bisect(last, hi));
    }
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

/// Eigenvalues split by the su(2) content of their eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorSpectrum {
    /// Eigenvalues whose eigenvectors live in the symmetric sector.
    pub symmetric: Vec<f64>,
    /// Eigenvalues whose eigenvectors live in the orthogonal spin complement.
    pub antisymmetric: Vec<f64>,
}

/// Classifies each eigenvector by its weight on the spin states orthogonal
/// to `|psi_sym>`; weight above one half puts it in the antisymmetric
/// sector. Only meaningful for qubit-independent coupling.
pub fn classify_by_symmetry(sd: &SpectralDecomposition, n_qubits: usize) -> SectorSpectrum {
    let sym = symmetric_state(n_qubits);
    let mut out = SectorSpectrum {
        symmetric: Vec::new(),
        antisymmetric: Vec::new(),
    };
    for i in 0..sd.dim() {
        let spin: Vec<Complex64> = (0..n_qubits).map(|a| sd.component(a, i)).collect();
        let spin_weight: f64 = spin.iter().map(|z| z.norm_sqr()).sum();
        let overlap: Complex64 = sym
            .amplitudes()
            .iter()
            .zip(&spin)
            .map(|(s, c)| s.conj() * c)
            .sum();
        let anti_weight = spin_weight - overlap.norm_sqr();
        if anti_weight > 0.5 {
            out.antisymmetric.push(sd.eigenvalues()[i]);
        } else {
            out.symmetric.push(sd.eigenvalues()[i]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_h1, CouplingSpec, Dispersion};
    use crate::sector::RegisterShape;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn check_invariants(h: &HermitianMatrix, sd: &SpectralDecomposition) {
        let bound = 1e-10 * h.frobenius_norm().max(1.0);
        assert!(
            sd.max_residual(h) <= bound,
            "residual {}",
            sd.max_residual(h)
        );
        assert!(sd.orthonormality_error() <= 1e-10);
        assert!(sd.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> HermitianMatrix {
        HermitianMatrix::from_upper(n, |i, j| {
            if i == j {
                c(rng.gen_range(-2.0..2.0), 0.0)
            } else {
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            }
        })
    }

    #[test]
    fn identity_spectrum() {
        let h = HermitianMatrix::identity(5);
        let sd = diagonalize(&h).unwrap();
        assert_eq!(sd.eigenvalues(), &[1.0; 5]);
        check_invariants(&h, &sd);
    }

    #[test]
    fn two_by_two_resonant() {
        let h =
            HermitianMatrix::from_upper(2, |i, j| if i == j { c(1.0, 0.0) } else { c(0.1, 0.0) });
        let sd = diagonalize(&h).unwrap();
        assert!((sd.eigenvalues()[0] - 0.9).abs() < 1e-14);
        assert!((sd.eigenvalues()[1] - 1.1).abs() < 1e-14);
        check_invariants(&h, &sd);
    }

    #[test]
    fn detuned_jaynes_cummings_closed_form() {
        let (w, g) = (1.5, 0.05);
        let h = HermitianMatrix::from_upper(2, |i, j| match (i, j) {
            (0, 0) => c(1.0, 0.0),
            (1, 1) => c(w, 0.0),
            _ => c(g, 0.0),
        });
        let mean = (1.0 + w) / 2.0;
        let split = ((1.0f64 - w).powi(2) / 4.0 + g * g).sqrt();
        let sd = diagonalize(&h).unwrap();
        assert!((sd.eigenvalues()[0] - (mean - split)).abs() < 1e-12);
        assert!((sd.eigenvalues()[1] - (mean + split)).abs() < 1e-12);
    }

    #[test]
    fn complex_hermitian_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 3, 4, 7, 16, 33, 60] {
            let h = random_hermitian(&mut rng, n);
            let sd = diagonalize(&h).unwrap();
            check_invariants(&h, &sd);
            let sum: f64 = sd.eigenvalues().iter().sum();
            assert!((sum - h.trace()).abs() < 1e-10 * (1.0 + h.trace().abs()));
        }
    }

    #[test]
    fn already_tridiagonal_and_diagonal_inputs() {
        let h = HermitianMatrix::from_upper(4, |i, j| match j as isize - i as isize {
            0 => c(i as f64, 0.0),
            1 => c(0.0, 0.5),
            _ => c(0.0, 0.0),
        });
        check_invariants(&h, &diagonalize(&h).unwrap());
        let d = HermitianMatrix::from_upper(4, |i, j| {
            c(if i == j { 3.0 - i as f64 } else { 0.0 }, 0.0)
        });
        let sd = diagonalize(&d).unwrap();
        assert_eq!(sd.eigenvalues(), &[0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn rejects_non_finite() {
        let h = HermitianMatrix::from_upper(2, |_, _| c(f64::NAN, 0.0));
        assert_eq!(diagonalize(&h), Err(SpectralError::NotFinite));
    }

    #[test]
    fn deterministic_output() {
        let p = ModelParams::uniform(RegisterShape::new(3, 40).unwrap(), 1.0, 0.02).unwrap();
        let h = build_h1(&p);
        let a = diagonalize(&h).unwrap();
        let b = diagonalize(&h).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn trace_identity_on_model() {
        let p = ModelParams::uniform(RegisterShape::new(4, 100).unwrap(), 1.0, 0.01).unwrap();
        let sd = diagonalize(&build_h1(&p)).unwrap();
        let expected = 4.0 + p.omegas().iter().sum::<f64>();
        let sum: f64 = sd.eigenvalues().iter().sum();
        assert!((sum - expected).abs() <= 1e-9 * expected);
    }

    #[test]
    fn secular_resonant_single_mode() {
        let p = ModelParams::new(
            RegisterShape::new(1, 1).unwrap(),
            1.0,
            CouplingSpec::Uniform { g0: 0.1 },
            Dispersion::Explicit { omegas: vec![1.0] },
        )
        .unwrap();
        let r = secular_roots(&p).unwrap();
        assert!((r[0] - 0.9).abs() < 1e-14 && (r[1] - 1.1).abs() < 1e-14);
    }

    #[test]
    fn secular_collective_rescaling() {
        let shape4 = RegisterShape::new(4, 30).unwrap();
        let shape1 = RegisterShape::new(1, 30).unwrap();
        let four = secular_roots(&ModelParams::uniform(shape4, 1.0, 0.03).unwrap()).unwrap();
        let one = secular_roots(&ModelParams::uniform(shape1, 1.0, 0.06).unwrap()).unwrap();
        for (a, b) in four.iter().zip(&one) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn secular_matches_symmetric_eigenvalues() {
        let p = ModelParams::uniform(RegisterShape::new(2, 3).unwrap(), 1.0, 0.05).unwrap();
        let roots = secular_roots(&p).unwrap();
        let omegas = p.omegas();
        assert!(roots[0] < omegas[0]);
        for k in 0..3 {
            assert!(omegas[k] < roots[k + 1]);
        }
        let sd = diagonalize(&build_h1(&p)).unwrap();
        let split = classify_by_symmetry(&sd, 2);
        assert_eq!(split.antisymmetric.len(), 1);
        assert!((split.antisymmetric[0] - 1.0).abs() < 1e-12);
        for (a, b) in roots.iter().zip(&split.symmetric) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn secular_zero_coupling_returns_bare_energies() {
        let p = ModelParams::uniform(RegisterShape::new(2, 4).unwrap(), 1.0, 0.0).unwrap();
        let mut expected = p.omegas();
        expected.push(1.0);
        expected.sort_by(f64::total_cmp);
        assert_eq!(secular_roots(&p).unwrap(), expected);
    }

    #[test]
    fn secular_degenerate_modes_are_merged() {
        let omegas = vec![0.5, 2.0, 0.5, 3.0, 2.0, 2.0];
        let p = ModelParams::new(
            RegisterShape::new(2, 6).unwrap(),
            1.0,
            CouplingSpec::Uniform { g0: 0.1 },
            Dispersion::Explicit {
                omegas: omegas.clone(),
            },
        )
        .unwrap();
        let roots = secular_roots(&p).unwrap();
        assert_eq!(roots.len(), 7);
        let sd = diagonalize(&build_h1(&p)).unwrap();
        let split = classify_by_symmetry(&sd, 2);
        // the degenerate roots are exact bare frequencies
        assert_eq!(roots.iter().filter(|&&r| r == 0.5).count(), 1);
        assert_eq!(roots.iter().filter(|&&r| r == 2.0).count(), 2);
        for (a, b) in roots.iter().zip(&split.symmetric) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn secular_rejects_qubit_dependent_coupling() {
        let p = ModelParams::new(
            RegisterShape::new(2, 4).unwrap(),
            1.0,
            CouplingSpec::CosineProfile { g0: 0.1, xi: 1.0 },
            Dispersion::Linear,
        )
        .unwrap();
        assert_eq!(
            secular_roots(&p),
            Err(SpectralError::QubitDependentCoupling)
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn secular_roots_interlace(n in 1usize..6, nb in 1usize..25, g in 0.001f64..0.3, eps in 0.2f64..5.0) {
            let p = ModelParams::uniform(RegisterShape::new(n, nb).unwrap(), eps, g).unwrap();
            let roots = secular_roots(&p).unwrap();
            let omegas = p.omegas();
            prop_assert_eq!(roots.len(), nb + 1);
            prop_assert!(roots[0] < omegas[0]);
            for k in 0..nb {
                prop_assert!(omegas[k] < roots[k + 1]);
                if k + 1 < nb {
                    prop_assert!(roots[k + 1] < omegas[k + 1]);
                }
            }
        }

        #[test]
        fn random_hermitian_invariants(seed in any::<u64>(), n in 1usize..24) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random_hermitian(&mut rng, n);
            let sd = diagonalize(&h).unwrap();
            let bound = 1e-10 * h.frobenius_norm().max(1.0);
            prop_assert!(sd.max_residual(&h) <= bound);
            prop_assert!(sd.orthonormality_error() <= 1e-10);
        }
    }
}
