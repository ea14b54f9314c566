use std::ffi::{c_char, CStr, CString};
use std::ptr;

use qregister_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 512];
    unsafe { qr_last_error(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }
        .to_string_lossy()
        .into_owned()
}

struct Sim(*mut QrSimulator);

impl Drop for Sim {
    fn drop(&mut self) {
        unsafe { qr_simulator_free(self.0) };
    }
}

#[test]
fn sector_dimension_and_overflow() {
    let mut d = 0u64;
    assert_eq!(
        unsafe { qr_sector_dimension(4, 4, 2, &mut d) },
        QrStatus::Ok
    );
    // C(4,2) + 4 * 4 + C(5,2)
    assert_eq!(d, 6 + 4 * 4 + 10);
    assert_eq!(
        unsafe { qr_sector_dimension(0, 4, 2, &mut d) },
        QrStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { qr_sector_dimension(200, 200, 150, &mut d) },
        QrStatus::InvalidArgument
    );
    assert!(last_error().contains("64 bits") || last_error().contains("overflow"));
    assert_eq!(
        unsafe { qr_sector_dimension(2, 2, 1, ptr::null_mut()) },
        QrStatus::NullPointer
    );
}

#[test]
fn uniform_handle_matches_core() {
    let mut raw = ptr::null_mut();
    assert_eq!(
        unsafe { qr_simulator_new_uniform(2, 30, 1.0, 0.03, &mut raw) },
        QrStatus::Ok
    );
    let sim = Sim(raw);
    let mut n = 0usize;
    assert_eq!(
        unsafe { qr_simulator_dimension(sim.0, &mut n) },
        QrStatus::Ok
    );
    assert_eq!(n, 32);

    let mut ev = vec![0.0; n];
    assert_eq!(
        unsafe { qr_simulator_eigenvalues(sim.0, ev.as_mut_ptr(), n) },
        QrStatus::Ok
    );
    let params =
        qregister::ModelParams::uniform(qregister::RegisterShape::new(2, 30).unwrap(), 1.0, 0.03)
            .unwrap();
    let core = qregister::diagonalize(&qregister::build_h1(&params)).unwrap();
    assert_eq!(ev, core.eigenvalues());

    let mut roots = vec![0.0; 31];
    assert_eq!(
        unsafe { qr_simulator_secular_roots(sim.0, roots.as_mut_ptr(), 31) },
        QrStatus::Ok
    );
    assert_eq!(roots, qregister::secular_roots(&params).unwrap());

    let re = [1.0, 1.0];
    let im = [0.0, 0.0];
    let mut recs = vec![QrRecord::default(); 21];
    let status = unsafe {
        qr_simulator_run(
            sim.0,
            re.as_ptr(),
            im.as_ptr(),
            2,
            20.0,
            21,
            recs.as_mut_ptr(),
            recs.len(),
        )
    };
    assert_eq!(status, QrStatus::Ok);
    assert!((recs[0].fidelity - 1.0).abs() < 1e-14);
    assert!(recs[20].fidelity < 0.999);
    for r in &recs {
        assert!((r.p0 + r.p1 - 1.0).abs() < 1e-12);
    }
    assert_eq!(
        unsafe {
            qr_simulator_run(
                sim.0,
                re.as_ptr(),
                im.as_ptr(),
                3,
                20.0,
                21,
                recs.as_mut_ptr(),
                recs.len(),
            )
        },
        QrStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { qr_simulator_run_config(sim.0, recs.as_mut_ptr(), recs.len()) },
        QrStatus::Unsupported
    );
}

#[test]
fn cosine_handle_has_no_secular_roots() {
    let mut raw = ptr::null_mut();
    assert_eq!(
        unsafe { qr_simulator_new_cosine(2, 10, 1.0, 0.01, 1.0, &mut raw) },
        QrStatus::Ok
    );
    let sim = Sim(raw);
    let mut roots = vec![0.0; 11];
    assert_eq!(
        unsafe { qr_simulator_secular_roots(sim.0, roots.as_mut_ptr(), 11) },
        QrStatus::Unsupported
    );
    assert_eq!(
        unsafe { qr_simulator_new_cosine(2, 10, 1.0, 0.01, -1.0, &mut raw) },
        QrStatus::InvalidArgument
    );
}

#[test]
fn config_handle_runs_its_grid() {
    let text = CString::new(
        "register.n_qubits = 2\nregister.n_modes = 16\ncoupling.type = uniform\ncoupling.g0 = 0.02\n\
         prep.type = bell_mix\nprep.cs = 0.6\nprep.ca = 0.8\ngrid.t_max = 40\ngrid.n_steps = 41\noutput.path = x.csv\n",
    )
    .unwrap();
    let mut raw = ptr::null_mut();
    assert_eq!(
        unsafe { qr_simulator_from_config(text.as_ptr(), ptr::null(), &mut raw) },
        QrStatus::Ok
    );
    let sim = Sim(raw);
    let mut recs = vec![QrRecord::default(); 40];
    assert_eq!(
        unsafe { qr_simulator_run_config(sim.0, recs.as_mut_ptr(), 40) },
        QrStatus::BufferTooSmall
    );
    recs.push(QrRecord::default());
    assert_eq!(
        unsafe { qr_simulator_run_config(sim.0, recs.as_mut_ptr(), 41) },
        QrStatus::Ok
    );
    assert_eq!(recs[40].t, 40.0);

    let cfg = qregister::parse_config(text.to_str().unwrap(), None).unwrap();
    let series = qregister::run_time_series(&cfg.model, &cfg.prep_state, cfg.grid).unwrap();
    for (a, b) in recs.iter().zip(&series.records) {
        assert_eq!(a.fidelity, b.fidelity);
        assert_eq!(a.d_im, b.d_im);
    }
}

#[test]
fn config_errors_carry_line_numbers() {
    let text = CString::new("register.n_qubits = 2\nregister.n_modez = 3\n").unwrap();
    let mut raw = ptr::null_mut();
    assert_eq!(
        unsafe { qr_simulator_from_config(text.as_ptr(), ptr::null(), &mut raw) },
        QrStatus::Config
    );
    assert!(raw.is_null());
    let msg = last_error();
    assert!(
        msg.contains("line 2") && msg.contains("register.n_modez"),
        "{msg}"
    );
}

#[test]
fn null_handles_are_rejected() {
    let mut n = 0usize;
    assert_eq!(
        unsafe { qr_simulator_dimension(ptr::null(), &mut n) },
        QrStatus::NullPointer
    );
    assert!(last_error().contains("simulator"));
    unsafe { qr_simulator_free(ptr::null_mut()) };
}
