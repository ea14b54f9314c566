//! C interface to `qregister`.
//!
//! A `QrSimulator` owns one model together with its diagonalized
//! Hamiltonian. Every function returns a `QrStatus`; on failure the message
//! is kept per thread and can be copied out with `qr_last_error`. Panics are
//! caught at the boundary and reported as `QR_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use qregister::config::{parse_config, RunConfig};
use qregister::dynamics::{time_series_from, TimeGrid, TimeSeriesRecord};
use qregister::model::{build_h1, CouplingSpec, Dispersion, ModelParams};
use qregister::sector::{dimension, RegisterShape, SpinVector};
use qregister::spectral::{diagonalize, secular_roots, SpectralDecomposition, SpectralError};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Numerical = 4,
    BufferTooSmall = 5,
    Unsupported = 6,
    Panic = 7,
}

/// One time-series row; same columns as the CSV output.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QrRecord {
    pub t: f64,
    pub fidelity: f64,
    pub entropy_bits: f64,
    pub p0: f64,
    pub p1: f64,
    pub d_re: f64,
    pub d_im: f64,
}

impl From<&TimeSeriesRecord> for QrRecord {
    fn from(r: &TimeSeriesRecord) -> Self {
        Self {
            t: r.t,
            fidelity: r.fidelity,
            entropy_bits: r.entropy_bits,
            p0: r.p0,
            p1: r.p1,
            d_re: r.d_re,
            d_im: r.d_im,
        }
    }
}

/// Opaque simulator handle.
pub struct QrSimulator {
    model: ModelParams,
    sd: SpectralDecomposition,
    config: Option<RunConfig>,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

struct Failure(QrStatus, String);

impl Failure {
    fn new(status: QrStatus, msg: impl ToString) -> Self {
        Self(status, msg.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> QrStatus {
    let outcome = catch_unwind(AssertUnwindSafe(body)).unwrap_or_else(|payload| {
        let msg = payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic".to_owned());
        Err(Failure(QrStatus::Panic, msg))
    });
    match outcome {
        Ok(()) => {
            LAST_ERROR.with(|e| e.borrow_mut().clear());
            QrStatus::Ok
        }
        Err(Failure(status, msg)) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = msg);
            status
        }
    }
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure::new(
            QrStatus::NullPointer,
            format!("{what} is null"),
        ))
    } else {
        Ok(())
    }
}

fn spectral_failure(e: SpectralError) -> Failure {
    Failure::new(QrStatus::Numerical, e)
}

fn build(
    model: ModelParams,
    config: Option<RunConfig>,
    out: *mut *mut QrSimulator,
) -> Result<(), Failure> {
    let sd = diagonalize(&build_h1(&model)).map_err(spectral_failure)?;
    let sim = Box::new(QrSimulator { model, sd, config });
    // SAFETY: checked non-null by every caller.
    unsafe { *out = Box::into_raw(sim) };
    Ok(())
}

fn shape(n_qubits: usize, n_modes: usize) -> Result<RegisterShape, Failure> {
    RegisterShape::new(n_qubits, n_modes).map_err(|e| Failure::new(QrStatus::InvalidArgument, e))
}

/// Size of the excitation sector `I` of an `N`-qubit, `N_b`-mode register.
///
/// # Safety
/// `out` must be valid for writing one `uint64_t`.
#[no_mangle]
pub unsafe extern "C" fn qr_sector_dimension(
    n_qubits: usize,
    n_modes: usize,
    excitations: usize,
    out: *mut u64,
) -> QrStatus {
    guard(|| {
        non_null(out, "out")?;
        let d = dimension(shape(n_qubits, n_modes)?, excitations)
            .map_err(|e| Failure::new(QrStatus::InvalidArgument, e))?;
        let d = u64::try_from(d).map_err(|_| {
            Failure::new(
                QrStatus::InvalidArgument,
                format!("dimension {d} exceeds 64 bits"),
            )
        })?;
        unsafe { *out = d };
        Ok(())
    })
}

/// Uniform coupling `g0` to every mode, linear dispersion.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn qr_simulator_new_uniform(
    n_qubits: usize,
    n_modes: usize,
    epsilon: f64,
    g0: f64,
    out: *mut *mut QrSimulator,
) -> QrStatus {
    guard(|| {
        non_null(out, "out")?;
        let model = ModelParams::new(
            shape(n_qubits, n_modes)?,
            epsilon,
            CouplingSpec::Uniform { g0 },
            Dispersion::Linear,
        )
        .map_err(|e| Failure::new(QrStatus::InvalidArgument, e))?;
        build(model, None, out)
    })
}

/// Cosine coupling profile with coherence length `xi`, linear dispersion.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn qr_simulator_new_cosine(
    n_qubits: usize,
    n_modes: usize,
    epsilon: f64,
    g0: f64,
    xi: f64,
    out: *mut *mut QrSimulator,
) -> QrStatus {
    guard(|| {
        non_null(out, "out")?;
        let model = ModelParams::new(
            shape(n_qubits, n_modes)?,
            epsilon,
            CouplingSpec::CosineProfile { g0, xi },
            Dispersion::Linear,
        )
        .map_err(|e| Failure::new(QrStatus::InvalidArgument, e))?;
        build(model, None, out)
    })
}

/// Parses a configuration document. Relative file references resolve
/// against `base_dir`, which may be null.
///
/// # Safety
/// `text` and a non-null `base_dir` must be NUL-terminated UTF-8 strings;
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn qr_simulator_from_config(
    text: *const c_char,
    base_dir: *const c_char,
    out: *mut *mut QrSimulator,
) -> QrStatus {
    guard(|| {
        non_null(text, "text")?;
        non_null(out, "out")?;
        let utf8 = |p: *const c_char| {
            unsafe { CStr::from_ptr(p) }
                .to_str()
                .map_err(|e| Failure::new(QrStatus::InvalidArgument, e))
        };
        let text = utf8(text)?;
        let base = if base_dir.is_null() {
            None
        } else {
            Some(std::path::Path::new(utf8(base_dir)?))
        };
        let cfg = parse_config(text, base).map_err(|e| Failure::new(QrStatus::Config, e))?;
        build(cfg.model.clone(), Some(cfg), out)
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `sim` must come from a constructor of this library and not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn qr_simulator_free(sim: *mut QrSimulator) {
    if !sim.is_null() {
        drop(unsafe { Box::from_raw(sim) });
    }
}

unsafe fn handle<'a>(sim: *const QrSimulator) -> Result<&'a QrSimulator, Failure> {
    non_null(sim, "simulator")?;
    Ok(unsafe { &*sim })
}

unsafe fn output<'a, T>(buf: *mut T, len: usize, needed: usize) -> Result<&'a mut [T], Failure> {
    if len < needed {
        return Err(Failure::new(
            QrStatus::BufferTooSmall,
            format!("buffer holds {len}, need {needed}"),
        ));
    }
    if needed == 0 {
        return Ok(&mut []);
    }
    non_null(buf, "buffer")?;
    Ok(unsafe { std::slice::from_raw_parts_mut(buf, needed) })
}

/// Dimension `N + N_b` of the one-excitation space.
///
/// # Safety
/// `sim` must be a live handle; `out` valid for one `size_t`.
#[no_mangle]
pub unsafe extern "C" fn qr_simulator_dimension(
    sim: *const QrSimulator,
    out: *mut usize,
) -> QrStatus {
    guard(|| {
        let sim = unsafe { handle(sim)? };
        non_null(out, "out")?;
        unsafe { *out = sim.sd.dim() };
        Ok(())
    })
}

/// Copies the ascending eigenvalues into `buf`, which must hold at least
/// `qr_simulator_dimension` values.
///
/// # Safety
/// `sim` must be a live handle; `buf` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qr_simulator_eigenvalues(
    sim: *const QrSimulator,
    buf: *mut f64,
    len: usize,
) -> QrStatus {
    guard(|| {
        let sim = unsafe { handle(sim)? };
        let ev = sim.sd.eigenvalues();
        unsafe { output(buf, len, ev.len())? }.copy_from_slice(ev);
        Ok(())
    })
}

/// Copies the `N_b + 1` symmetric-sector energies into `buf`. Fails with
/// `QR_STATUS_UNSUPPORTED` when the couplings depend on the qubit.
///
/// # Safety
/// `sim` must be a live handle; `buf` valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qr_simulator_secular_roots(
    sim: *const QrSimulator,
    buf: *mut f64,
    len: usize,
) -> QrStatus {
    guard(|| {
        let sim = unsafe { handle(sim)? };
        let roots = secular_roots(&sim.model).map_err(|e| match e {
            SpectralError::QubitDependentCoupling => Failure::new(QrStatus::Unsupported, e),
            e => spectral_failure(e),
        })?;
        unsafe { output(buf, len, roots.len())? }.copy_from_slice(&roots);
        Ok(())
    })
}

fn run_into(
    sim: &QrSimulator,
    prep: &SpinVector,
    grid: TimeGrid,
    out: *mut QrRecord,
    out_len: usize,
) -> Result<(), Failure> {
    let slots = unsafe { output(out, out_len, grid.n_steps())? };
    let series = time_series_from(&sim.sd, sim.model.shape(), prep, grid)
        .map_err(|e| Failure::new(QrStatus::Numerical, e))?;
    for (slot, r) in slots.iter_mut().zip(&series.records) {
        *slot = r.into();
    }
    Ok(())
}

/// Evolves the register from the spin amplitudes `re[i] + i im[i]`
/// (renormalized) on the grid `t_j = j t_max / (n_steps - 1)` and writes
/// `n_steps` records.
///
/// # Safety
/// `sim` must be a live handle; `re` and `im` valid for `n_amplitudes`
/// doubles; `out` valid for `out_len` records.
#[no_mangle]
pub unsafe extern "C" fn qr_simulator_run(
    sim: *const QrSimulator,
    re: *const f64,
    im: *const f64,
    n_amplitudes: usize,
    t_max: f64,
    n_steps: usize,
    out: *mut QrRecord,
    out_len: usize,
) -> QrStatus {
    guard(|| {
        let sim = unsafe { handle(sim)? };
        non_null(re, "re")?;
        non_null(im, "im")?;
        let n = sim.model.shape().n_qubits();
        if n_amplitudes != n {
            return Err(Failure::new(
                QrStatus::InvalidArgument,
                format!("{n_amplitudes} amplitudes for {n} qubits"),
            ));
        }
        let (re, im) = unsafe {
            (
                std::slice::from_raw_parts(re, n_amplitudes),
                std::slice::from_raw_parts(im, n_amplitudes),
            )
        };
        let amps = re
            .iter()
            .zip(im)
            .map(|(&a, &b)| Complex64::new(a, b))
            .collect();
        let prep = SpinVector::from_amplitudes(amps)
            .map_err(|e| Failure::new(QrStatus::InvalidArgument, e))?;
        let grid = TimeGrid::new(t_max, n_steps)
            .map_err(|e| Failure::new(QrStatus::InvalidArgument, e))?;
        run_into(sim, &prep, grid, out, out_len)
    })
}

/// Runs the preparation and grid of the configuration the handle was
/// created from. `out` must hold `grid.n_steps` records.
///
/// # Safety
/// `sim` must be a live handle; `out` valid for `out_len` records.
#[no_mangle]
pub unsafe extern "C" fn qr_simulator_run_config(
    sim: *const QrSimulator,
    out: *mut QrRecord,
    out_len: usize,
) -> QrStatus {
    guard(|| {
        let sim = unsafe { handle(sim)? };
        let cfg = sim.config.as_ref().ok_or_else(|| {
            Failure::new(
                QrStatus::Unsupported,
                "handle was not created from a configuration",
            )
        })?;
        run_into(sim, &cfg.prep_state, cfg.grid, out, out_len)
    })
}

/// Copies the calling thread's last error message, NUL-terminated and
/// truncated to `len - 1` bytes. Returns the full message length without
/// the terminator, so a return value `>= len` signals truncation.
///
/// # Safety
/// A non-null `buf` must be valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn qr_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            unsafe {
                ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
        }
        msg.len()
    })
}
