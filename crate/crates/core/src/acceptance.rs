//! Self-check suite. Each criterion runs a desk-scale computation against a
//! closed form or an independent oracle and reports the measured values
//! next to their tolerances.

use std::f64::consts::PI;
use std::fmt;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Preparation;
use crate::dynamics::{
    decoherence_function, evolve, fit_relaxation, initial_amplitudes, short_time_coefficient,
    time_series_from, AmplitudeVector, Propagator, RelaxationFit, RelaxationWindow, TimeGrid,
    TimeSeries,
};
use crate::model::{build_h1, CouplingSpec, Dispersion, ModelParams};
use crate::oracle::TaylorPropagator;
use crate::sector::{
    dimension, enumerate_basis, m_superposition, momentum_state, spin_ladder, su2_multiplicity,
    symmetric_state, RegisterShape, SpinVector,
};
use crate::spectral::{classify_by_symmetry, diagonalize, secular_roots, SpectralDecomposition};

/// Outcome of one criterion.
#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {}: {} ({:.2} s, limit {} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs()
        )
    }
}

type Outcome = Result<(bool, String), String>;

fn timed(
    id: u8,
    name: &'static str,
    limit_s: u64,
    body: impl FnOnce() -> Outcome,
) -> CriterionReport {
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(limit_s);
    let (ok, mut detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    let in_time = elapsed < limit;
    if !in_time {
        detail.push_str("; runtime limit exceeded");
    }
    CriterionReport {
        id,
        name,
        passed: ok && in_time,
        detail,
        elapsed,
        limit,
    }
}

fn binary_entropy(p: f64) -> f64 {
    [p, 1.0 - p]
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum()
}

fn err<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

fn uniform(n: usize, nb: usize, g0: f64) -> Result<ModelParams, String> {
    let shape = RegisterShape::new(n, nb).map_err(err)?;
    ModelParams::uniform(shape, 1.0, g0).map_err(err)
}

fn cosine(n: usize, nb: usize, g0: f64, xi: f64) -> Result<ModelParams, String> {
    let shape = RegisterShape::new(n, nb).map_err(err)?;
    ModelParams::new(
        shape,
        1.0,
        CouplingSpec::CosineProfile { g0, xi },
        Dispersion::Linear,
    )
    .map_err(err)
}

fn series(
    sd: &SpectralDecomposition,
    model: &ModelParams,
    prep: &SpinVector,
    t_max: f64,
    n_steps: usize,
) -> Result<TimeSeries, String> {
    let grid = TimeGrid::new(t_max, n_steps).map_err(err)?;
    time_series_from(sd, model.shape(), prep, grid).map_err(err)
}

fn random_unit(rng: &mut ChaCha8Rng, len: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..len)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Sector dimensions against enumeration, and the su(2) multiplicity sum.
pub fn criterion_1() -> CriterionReport {
    timed(1, "dimension/enumeration equivalence", 1, || {
        let mut checked = 0;
        for n in 1..=4 {
            for nb in 1..=4 {
                let shape = RegisterShape::new(n, nb).map_err(err)?;
                for i in 0..=4 {
                    let dim = dimension(shape, i).map_err(err)?;
                    let enumerated = enumerate_basis(shape, i).len() as u128;
                    if dim != enumerated {
                        return Ok((
                            false,
                            format!("N={n} N_b={nb} I={i}: formula {dim}, enumerated {enumerated}"),
                        ));
                    }
                    checked += 1;
                }
            }
        }
        for n in 1..=12u32 {
            let total: u128 = spin_ladder(n)
                .map(|s| su2_multiplicity(s, n).map(|m| m * (s.0 as u128 + 1)))
                .sum::<Result<u128, _>>()
                .map_err(err)?;
            if total != 1u128 << n {
                return Ok((
                    false,
                    format!("N={n}: sum n(S)(2S+1) = {total}, expected {}", 1u128 << n),
                ));
            }
        }
        Ok((
            true,
            format!("{checked} sectors exact; sum n(S)(2S+1) = 2^N for N <= 12"),
        ))
    })
}

/// Single qubit, single resonant mode: vacuum Rabi oscillation.
pub fn criterion_2() -> CriterionReport {
    timed(2, "Jaynes-Cummings limit", 1, || {
        let g = 0.05;
        let shape = RegisterShape::new(1, 1).map_err(err)?;
        let model = ModelParams::new(
            shape,
            1.0,
            CouplingSpec::Uniform { g0: g },
            Dispersion::Explicit { omegas: vec![1.0] },
        )
        .map_err(err)?;
        let sd = diagonalize(&build_h1(&model)).map_err(err)?;
        let ev = sd.eigenvalues();
        let ev_err = (ev[0] - (1.0 - g)).abs().max((ev[1] - (1.0 + g)).abs());

        let c0 = initial_amplitudes(&symmetric_state(1), shape).map_err(err)?;
        let prop = Propagator::new(&sd, &c0).map_err(err)?;
        let grid = TimeGrid::new(2.0 * PI / g, 100).map_err(err)?;
        let pop_err = grid
            .times()
            .map(|t| (prop.at(t).spin_block()[0].norm_sqr() - (g * t).cos().powi(2)).abs())
            .fold(0.0, f64::max);
        Ok((
            pop_err <= 1e-10 && ev_err <= 1e-12,
            format!("max |P - cos^2(gt)| = {pop_err:.1e} (tol 1e-10), eigenvalue error {ev_err:.1e} (tol 1e-12)"),
        ))
    })
}

/// Momentum states do not couple to a uniform bath.
pub fn criterion_3() -> CriterionReport {
    timed(3, "decoherence-free subspace", 10, || {
        let model = uniform(2, 200, 0.01)?;
        let sd = diagonalize(&build_h1(&model)).map_err(err)?;
        let prep = momentum_state(2, 1).map_err(err)?;
        let s = series(&sd, &model, &prep, 2000.0, 4001)?;
        let f_dev = s
            .records
            .iter()
            .map(|r| (r.fidelity - 1.0).abs())
            .fold(0.0, f64::max);
        let s_max = s.records.iter().map(|r| r.entropy_bits).fold(0.0, f64::max);
        Ok((
            f_dev <= 1e-8 && s_max <= 1e-8,
            format!("max |F - 1| = {f_dev:.1e}, max S = {s_max:.1e} bits (tol 1e-8)"),
        ))
    })
}

/// Late-window averages for M-excitation superpositions of four qubits.
pub fn criterion_4() -> CriterionReport {
    timed(4, "asymptotic fidelity/entropy", 30, || {
        let model = uniform(4, 200, 0.01)?;
        let sd = diagonalize(&build_h1(&model)).map_err(err)?;
        let mut ok = true;
        let mut parts = Vec::new();
        for m in 1..=3 {
            let prep = m_superposition(4, m).map_err(err)?;
            let s = series(&sd, &model, &prep, 2000.0, 8001)?;
            let retained = 1.0 - m as f64 / 4.0;
            let f_target = retained * retained;
            let s_target = binary_entropy(retained);
            let f_ok = (s.late_fidelity - f_target).abs() <= 0.05;
            let s_ok = (s.late_entropy - s_target).abs() <= 0.05;
            ok &= f_ok && s_ok;
            // one recurrence period is 2 pi / (2 pi / N_b) = N_b
            let before = s.mean_fidelity_between(100.0, 200.0).unwrap_or(f64::NAN);
            parts.push(format!(
                "M={m}: F={:.4} (target {f_target:.4} +-0.05{}) S={:.4} (target {s_target:.4} +-0.05{}) [F over 100..200: {before:.4}]",
                s.late_fidelity,
                if f_ok { "" } else { ", out" },
                s.late_entropy,
                if s_ok { "" } else { ", out" },
            ));
        }
        Ok((ok, parts.join("; ")))
    })
}

/// Secular roots against the symmetric part of the dense spectrum.
pub fn criterion_5() -> CriterionReport {
    timed(5, "secular/diagonalization cross-check", 5, || {
        let mut ok = true;
        let mut parts = Vec::new();
        for (n, nb) in [(2, 50), (4, 100)] {
            let model = uniform(n, nb, 0.01)?;
            let sd = diagonalize(&build_h1(&model)).map_err(err)?;
            let split = classify_by_symmetry(&sd, n);
            let roots = secular_roots(&model).map_err(err)?;
            let root_err = if roots.len() == split.symmetric.len() {
                roots
                    .iter()
                    .zip(&split.symmetric)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            } else {
                f64::INFINITY
            };
            let at_eps = sd
                .eigenvalues()
                .iter()
                .filter(|&&e| (e - 1.0).abs() <= 1e-9)
                .count();
            let anti_at_eps = split.antisymmetric.iter().all(|&e| (e - 1.0).abs() <= 1e-9);
            let omegas = model.omegas();
            let interlaced = roots.len() == nb + 1
                && (0..nb).all(|k| roots[k] < omegas[k] && omegas[k] < roots[k + 1]);
            let pass = root_err <= 1e-8 && at_eps == n - 1 && anti_at_eps && interlaced;
            ok &= pass;
            parts.push(format!(
                "N={n} N_b={nb}: max |root - eigenvalue| = {root_err:.1e} (tol 1e-8), multiplicity of eps = {at_eps} (expected {}), interlacing {}",
                n - 1,
                if interlaced { "strict" } else { "violated" }
            ));
        }
        Ok((ok, parts.join("; ")))
    })
}

/// Norm conservation and the group property of the propagator.
pub fn criterion_6() -> CriterionReport {
    timed(6, "norm/unitarity suite", 30, || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
        let times = [1.0, 10.0, 100.0, 1000.0];
        let (mut norm_dev, mut comp_dev) = (0.0f64, 0.0f64);
        let models = 100;
        let per_model = 10;
        for _ in 0..models {
            let n = rng.gen_range(1..=4);
            let nb = rng.gen_range(1..=24);
            let g: Vec<Complex64> = (0..n * nb)
                .map(|_| {
                    Complex64::from_polar(rng.gen_range(0.0..0.1), rng.gen_range(0.0..2.0 * PI))
                })
                .collect();
            let shape = RegisterShape::new(n, nb).map_err(err)?;
            let eps = rng.gen_range(0.5..2.0);
            let model =
                ModelParams::new(shape, eps, CouplingSpec::Explicit { g }, Dispersion::Linear)
                    .map_err(err)?;
            let sd = diagonalize(&build_h1(&model)).map_err(err)?;
            for _ in 0..per_model {
                let c0 = AmplitudeVector::new(n, random_unit(&mut rng, n + nb));
                let prop = Propagator::new(&sd, &c0).map_err(err)?;
                for t in times {
                    norm_dev = norm_dev.max((prop.at(t).norm() - 1.0).abs());
                }
                let t1 = rng.gen_range(0.0..500.0);
                let t2 = rng.gen_range(0.0..500.0);
                let stepped = evolve(&sd, &prop.at(t1), t2).map_err(err)?;
                comp_dev = comp_dev.max(max_diff(stepped.as_slice(), prop.at(t1 + t2).as_slice()));
            }
        }
        Ok((
            norm_dev <= 1e-10 && comp_dev <= 1e-9,
            format!(
                "{} vectors: max | ||C(t)|| - 1 | = {norm_dev:.1e} (tol 1e-10), max composition error {comp_dev:.1e} (tol 1e-9)",
                models * per_model
            ),
        ))
    })
}

/// `c2` of `F - 1 = c2 t^2 + c4 t^4` from samples on `[0, t_end]`, for the
/// eigen path and the Taylor oracle.
fn short_time_pair(model: &ModelParams, t_end: f64) -> Result<(f64, f64), String> {
    let n = model.shape().n_qubits();
    let h = build_h1(model);
    let sd = diagonalize(&h).map_err(err)?;
    let prep = symmetric_state(n);
    let grid = TimeGrid::new(t_end, 51).map_err(err)?;
    let times: Vec<f64> = grid.times().collect();

    let s = time_series_from(&sd, model.shape(), &prep, grid).map_err(err)?;
    let eigen: Vec<(f64, f64)> = s.records.iter().map(|r| (r.t, r.fidelity)).collect();

    let c0 = initial_amplitudes(&prep, model.shape()).map_err(err)?;
    let oracle: Vec<(f64, f64)> = TaylorPropagator::new(&h)
        .trajectory(c0.as_slice(), &times)
        .into_iter()
        .zip(&times)
        .map(|(psi, &t)| {
            let ct = AmplitudeVector::new(n, psi);
            (t, decoherence_function(&c0, &ct).norm_sqr())
        })
        .collect();
    Ok((
        short_time_coefficient(&eigen),
        short_time_coefficient(&oracle),
    ))
}

/// Curvature of the fidelity at `t = 0` against the brute-force oracle.
pub fn criterion_7() -> CriterionReport {
    timed(7, "short-time quadratic law", 5, || {
        let mut ok = true;
        let mut parts = Vec::new();
        for n in [2, 4] {
            let model = uniform(n, 200, 0.01)?;
            let (c2, c2_oracle) = short_time_pair(&model, 0.5)?;
            let rel = (c2 / c2_oracle - 1.0).abs();
            let n_delta = n as f64 * 200.0 * 0.01f64.powi(2);
            ok &= rel <= 0.05;
            parts.push(format!(
                "N={n}: c2 = {c2:.6e}, oracle {c2_oracle:.6e}, rel diff {rel:.1e} (tol 5%), c2/(-N Delta) = {:.4}",
                c2 / -n_delta
            ));
        }
        // strong coupling, window shrunk to the same N Delta t^2
        let strong = uniform(2, 200, 0.5)?;
        let n_delta = 2.0 * 200.0 * 0.25;
        let (c2, c2_oracle) = short_time_pair(&strong, 0.5 * (0.04f64 / n_delta).sqrt())?;
        let rel = (c2 / c2_oracle - 1.0).abs();
        ok &= rel <= 0.05;
        parts.push(format!(
            "g=0.5: rel diff {rel:.1e} (tol 5%), c2/(-N Delta) = {:.4}",
            c2 / -n_delta
        ));
        Ok((ok, parts.join("; ")))
    })
}

fn describe_fit(fit: RelaxationFit) -> String {
    match fit {
        RelaxationFit::Exponential { tau, points } => format!("tau {tau:.3} ({points} pts)"),
        RelaxationFit::Oscillatory => "oscillatory regime, fit skipped".to_owned(),
        RelaxationFit::Insufficient => "no decay through the window".to_owned(),
    }
}

/// Relaxation time against coupling strength and initial symmetric weight.
pub fn criterion_8() -> CriterionReport {
    timed(8, "relaxation scaling", 20, || {
        let (t_max, n_steps) = (150.0, 15001);
        let fit_at = |g0: f64,
                      prep: &SpinVector,
                      window: RelaxationWindow|
         -> Result<RelaxationFit, String> {
            let model = uniform(2, 200, g0)?;
            let sd = diagonalize(&build_h1(&model)).map_err(err)?;
            let s = series(&sd, &model, prep, t_max, n_steps)?;
            Ok(fit_relaxation(&s.records, window))
        };
        let sym = symmetric_state(2);

        let weak = fit_at(0.01, &sym, RelaxationWindow::DECAY)?;
        let stronger = fit_at(0.02, &sym, RelaxationWindow::DECAY)?;
        let ratio = match (weak.tau(), stronger.tau()) {
            (Some(a), Some(b)) => a / b,
            _ => f64::NAN,
        };
        let ratio_ok = (ratio / 4.0 - 1.0).abs() <= 0.10;

        let cs = std::f64::consts::FRAC_1_SQRT_2;
        let mix = Preparation::BellMix {
            cs: Complex64::new(cs, 0.0),
            ca: Complex64::new(cs, 0.0),
        }
        .spin_vector(2)?;
        let tau_one = fit_at(0.01, &sym, RelaxationWindow::ONSET)?;
        let tau_mix = fit_at(0.01, &mix, RelaxationWindow::ONSET)?;
        let scaled = match (tau_mix.tau(), tau_one.tau()) {
            (Some(a), Some(b)) => a * cs * cs / b,
            _ => f64::NAN,
        };
        let mix_ok = (scaled - 1.0).abs() <= 0.10;

        let strong = fit_at(0.5, &sym, RelaxationWindow::DECAY)?;

        Ok((
            ratio_ok && mix_ok,
            format!(
                "g=0.01 {}, g=0.02 {}: ratio {ratio:.3} (target 4 +-10%); |c_s|^2=0.5 onset {} vs {}: tau(c_s)|c_s|^2/tau(1) = {scaled:.3} (target 1 +-10%); g=0.5: {}",
                describe_fit(weak),
                describe_fit(stronger),
                describe_fit(tau_mix),
                describe_fit(tau_one),
                describe_fit(strong)
            ),
        ))
    })
}

/// Site-dependent coupling: symmetry, coherence length, and the uniform limit.
pub fn criterion_9() -> CriterionReport {
    timed(9, "replica-dependent coupling", 30, || {
        let (t_max, n_steps) = (2000.0, 8001);
        let anti = momentum_state(2, 1).map_err(err)?;
        let sym = symmetric_state(2);

        let model = cosine(2, 200, 0.01, 1.0)?;
        let sd = diagonalize(&build_h1(&model)).map_err(err)?;
        let f_anti = series(&sd, &model, &anti, t_max, n_steps)?.mean_fidelity();
        let f_sym = series(&sd, &model, &sym, t_max, n_steps)?.mean_fidelity();
        let a_ok = f_anti > f_sym;

        let mut late = Vec::new();
        let mut decays = true;
        for xi in [1.0, 5.0, 10.0] {
            let model = cosine(2, 200, 0.01, xi)?;
            let sd = diagonalize(&build_h1(&model)).map_err(err)?;
            let s = series(&sd, &model, &anti, t_max, n_steps)?;
            let f_min = s.records.iter().map(|r| r.fidelity).fold(1.0, f64::min);
            decays &= f_min < 1.0 - 1e-4;
            late.push(s.late_fidelity);
        }
        let monotone = late.windows(2).all(|w| w[0] <= w[1]);

        let model = cosine(2, 200, 0.01, 1e8)?;
        let sd = diagonalize(&build_h1(&model)).map_err(err)?;
        let s = series(&sd, &model, &anti, t_max, 4001)?;
        let f_dev = s
            .records
            .iter()
            .map(|r| (r.fidelity - 1.0).abs())
            .fold(0.0, f64::max);
        let s_max = s.records.iter().map(|r| r.entropy_bits).fold(0.0, f64::max);
        let c_ok = f_dev <= 1e-6 && s_max <= 1e-6;

        Ok((
            a_ok && decays && monotone && c_ok,
            format!(
                "xi=1: mean F antisym {f_anti:.4} vs sym {f_sym:.4}; late F at xi=1,5,10: {:.4}, {:.4}, {:.4} ({}{}); xi=1e8: max |F-1| = {f_dev:.1e}, max S = {s_max:.1e} (tol 1e-6)",
                late[0],
                late[1],
                late[2],
                if monotone { "nondecreasing" } else { "not monotone" },
                if decays { "" } else { ", no decay" }
            ),
        ))
    })
}

/// Eigen-path evolution against direct Taylor stepping.
pub fn criterion_10() -> CriterionReport {
    timed(10, "brute-force evolution oracle", 1, || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0010);
        let (n, nb) = (2, 3);
        let g: Vec<Complex64> = (0..n * nb)
            .map(|_| Complex64::new(rng.gen_range(-0.1..0.1), 0.0))
            .collect();
        let shape = RegisterShape::new(n, nb).map_err(err)?;
        let model = ModelParams::new(shape, 1.0, CouplingSpec::Explicit { g }, Dispersion::Linear)
            .map_err(err)?;
        let h = build_h1(&model);
        let sd = diagonalize(&h).map_err(err)?;
        let c0 = AmplitudeVector::new(n, random_unit(&mut rng, n + nb));
        let prop = Propagator::new(&sd, &c0).map_err(err)?;
        let times = [1.0, 10.0, 100.0];
        let oracle = TaylorPropagator::new(&h).trajectory(c0.as_slice(), &times);
        let dev = times
            .iter()
            .zip(&oracle)
            .map(|(&t, psi)| max_diff(prop.at(t).as_slice(), psi))
            .fold(0.0, f64::max);
        Ok((
            dev <= 1e-8,
            format!("max |C_eig - C_taylor| = {dev:.1e} (tol 1e-8)"),
        ))
    })
}

/// Runs every criterion in order.
pub fn run_all() -> Vec<CriterionReport> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_helper() {
        assert_eq!(binary_entropy(0.5), 1.0);
        assert!((binary_entropy(0.75) - 0.811_278_124_459_132_8).abs() < 1e-15);
        assert_eq!(binary_entropy(1.0), 0.0);
    }

    #[test]
    fn report_line_format() {
        let r = timed(3, "demo", 1, || Ok((true, "ok".into())));
        assert!(r.to_string().starts_with("[PASS]  3 demo: ok"));
        let r = timed(4, "demo", 1, || Err("boom".into()));
        assert!(!r.passed);
        assert!(r.to_string().contains("error: boom"));
    }
}
