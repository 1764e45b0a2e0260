//! C ABI for the leachate simulator.
//!
//! Configs and results are opaque heap handles owned by the caller and
//! released with the matching `_free` function. Every fallible call returns a
//! [`LeachateStatus`]; on failure [`leachate_last_error_message`] describes the
//! most recent error on the calling thread. Fields are row-major with index
//! `j * nx + i`, row `j = 0` at the surface.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use leachate::analytical::ogata_profile_1d;
use leachate::engine::{run, stability_diagnostics, SimulationResult};
use leachate::io::{parse_config, write_profiles_csv};
use leachate::scenario::load_scenario;
use leachate::special::erfc;
use leachate::{Error, Retardation, SimulationConfig, Species, TransportParams};

/// Outcome of an API call. Values 2 to 5 match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeachateStatus {
    Ok = 0,
    NullPointer = 1,
    Config = 2,
    Unstable = 3,
    BlowUp = 4,
    Io = 5,
    OutOfRange = 6,
    Panic = 7,
}

/// Explicit-scheme stability numbers for a config.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LeachateStability {
    pub r_x: f64,
    pub r_z: f64,
    pub courant_x: f64,
    pub courant_z: f64,
    pub peclet_x: f64,
    pub peclet_z: f64,
    pub stable: bool,
}

/// Opaque simulation configuration.
pub struct LeachateConfig(SimulationConfig);

/// Opaque simulation result holding every output snapshot.
pub struct LeachateResult(SimulationResult);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: impl Into<Vec<u8>>) {
    let mut bytes = msg.into();
    bytes.retain(|&b| b != 0);
    let msg = CString::new(bytes).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> LeachateStatus {
    match e.exit_code() {
        3 => LeachateStatus::Unstable,
        4 => LeachateStatus::BlowUp,
        5 => LeachateStatus::Io,
        _ => LeachateStatus::Config,
    }
}

fn fail(status: LeachateStatus, msg: impl Into<Vec<u8>>) -> LeachateStatus {
    set_last_error(msg);
    status
}

fn guard(f: impl FnOnce() -> Result<(), LeachateStatus>) -> LeachateStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            LeachateStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => fail(LeachateStatus::Panic, "internal panic"),
    }
}

fn lift<T>(r: leachate::Result<T>) -> Result<T, LeachateStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, LeachateStatus> {
    if p.is_null() {
        return Err(fail(LeachateStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(LeachateStatus::Config, format!("{what} is not valid UTF-8")))
}

unsafe fn non_null<'a, T>(p: *const T, what: &str) -> Result<&'a T, LeachateStatus> {
    p.as_ref()
        .ok_or_else(|| fail(LeachateStatus::NullPointer, format!("{what} is null")))
}

unsafe fn non_null_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, LeachateStatus> {
    p.as_mut()
        .ok_or_else(|| fail(LeachateStatus::NullPointer, format!("{what} is null")))
}

/// Message for the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next API call on the same thread.
#[no_mangle]
pub extern "C" fn leachate_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Complementary error function, accurate to about 1e-15 relative.
#[no_mangle]
pub extern "C" fn leachate_erfc(x: f64) -> f64 {
    erfc(x)
}

/// One-dimensional analytical concentration at depth `z` (cm) and time `t`
/// (day). `d` in cm²/day, `v` in cm/day, `r` the retardation factor.
///
/// # Safety
/// `out` must be null or point to writable memory for one `double`.
#[no_mangle]
pub unsafe extern "C" fn leachate_ogata_1d(
    z: f64,
    t: f64,
    d: f64,
    v: f64,
    c0: f64,
    background: f64,
    r: f64,
    out: *mut f64,
) -> LeachateStatus {
    guard(|| {
        let out = non_null_mut(out, "out")?;
        let mut species = Species::conservative("solute", "");
        species.retardation = Retardation::Explicit(r);
        let params = TransportParams {
            d,
            v,
            theta: 0.3,
            c0,
            background,
            species,
        };
        *out = lift(ogata_profile_1d(z, t, &params, r))?;
        Ok(())
    })
}

fn boxed_config(cfg: SimulationConfig, out: &mut *mut LeachateConfig) {
    *out = Box::into_raw(Box::new(LeachateConfig(cfg)));
}

/// Creates a config from a built-in preset (`landfill-cl`, `landfill-k`).
///
/// # Safety
/// `name` must be null or a NUL-terminated string; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn leachate_config_from_preset(
    name: *const c_char,
    out: *mut *mut LeachateConfig,
) -> LeachateStatus {
    guard(|| {
        let out = non_null_mut(out, "out")?;
        *out = ptr::null_mut();
        let name = text(name, "name")?;
        boxed_config(lift(load_scenario(name))?, out);
        Ok(())
    })
}

/// Parses a config document.
///
/// # Safety
/// `document` must be null or a NUL-terminated string; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn leachate_config_from_str(
    document: *const c_char,
    out: *mut *mut LeachateConfig,
) -> LeachateStatus {
    guard(|| {
        let out = non_null_mut(out, "out")?;
        *out = ptr::null_mut();
        let document = text(document, "document")?;
        boxed_config(lift(parse_config(document))?, out);
        Ok(())
    })
}

/// # Safety
/// `config` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn leachate_config_free(config: *mut LeachateConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Sets the time step in days. The config is unchanged on failure.
///
/// # Safety
/// `config` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn leachate_config_set_dt(config: *mut LeachateConfig, dt: f64) -> LeachateStatus {
    guard(|| {
        let config = non_null_mut(config, "config")?;
        let mut next = config.0.clone();
        next.dt = dt;
        lift(next.validate())?;
        config.0 = next;
        Ok(())
    })
}

/// Sets the final time in days, dropping output times beyond it.
///
/// # Safety
/// `config` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn leachate_config_set_t_end(config: *mut LeachateConfig, t_end: f64) -> LeachateStatus {
    guard(|| {
        let config = non_null_mut(config, "config")?;
        let mut next = config.0.clone();
        next.t_end = t_end;
        next.snapshot_times.retain(|&t| t <= t_end);
        lift(next.validate())?;
        config.0 = next;
        Ok(())
    })
}

/// # Safety
/// `config` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn leachate_config_stability(
    config: *const LeachateConfig,
    out: *mut LeachateStability,
) -> LeachateStatus {
    guard(|| {
        let config = non_null(config, "config")?;
        let out = non_null_mut(out, "out")?;
        let s = stability_diagnostics(&config.0);
        *out = LeachateStability {
            r_x: s.r_x,
            r_z: s.r_z,
            courant_x: s.courant_x,
            courant_z: s.courant_z,
            peclet_x: s.peclet_x,
            peclet_z: s.peclet_z,
            stable: s.stable,
        };
        Ok(())
    })
}

/// Runs the simulation. `*out` is null on failure.
///
/// # Safety
/// `config` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn leachate_run(config: *const LeachateConfig, out: *mut *mut LeachateResult) -> LeachateStatus {
    guard(|| {
        let out = non_null_mut(out, "out")?;
        *out = ptr::null_mut();
        let config = non_null(config, "config")?;
        let result = lift(run(&config.0))?;
        *out = Box::into_raw(Box::new(LeachateResult(result)));
        Ok(())
    })
}

/// # Safety
/// `result` must be null or a handle from [`leachate_run`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn leachate_result_free(result: *mut LeachateResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Number of stored snapshots, 0 for a null handle.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn leachate_result_snapshot_count(result: *const LeachateResult) -> usize {
    result.as_ref().map_or(0, |r| r.0.snapshots.len())
}

/// # Safety
/// `result` must be null or a live handle; `nx` and `nz` null or writable.
#[no_mangle]
pub unsafe extern "C" fn leachate_result_dims(
    result: *const LeachateResult,
    nx: *mut usize,
    nz: *mut usize,
) -> LeachateStatus {
    guard(|| {
        let result = non_null(result, "result")?;
        let grid = result.0.final_field().grid;
        *non_null_mut(nx, "nx")? = grid.nx;
        *non_null_mut(nz, "nz")? = grid.nz;
        Ok(())
    })
}

/// # Safety
/// `result` must be null or a live handle; `t` null or writable.
#[no_mangle]
pub unsafe extern "C" fn leachate_result_snapshot_time(
    result: *const LeachateResult,
    index: usize,
    t: *mut f64,
) -> LeachateStatus {
    guard(|| {
        let result = non_null(result, "result")?;
        let t = non_null_mut(t, "t")?;
        let field = result.0.snapshots.get(index).ok_or_else(|| {
            fail(
                LeachateStatus::OutOfRange,
                format!("snapshot {index} of {}", result.0.snapshots.len()),
            )
        })?;
        *t = field.t;
        Ok(())
    })
}

/// Copies snapshot `index` into `buffer`, which must hold at least
/// `nx * nz` values.
///
/// # Safety
/// `result` must be null or a live handle; `buffer` null or valid for
/// `len` writes.
#[no_mangle]
pub unsafe extern "C" fn leachate_result_copy_snapshot(
    result: *const LeachateResult,
    index: usize,
    buffer: *mut f64,
    len: usize,
) -> LeachateStatus {
    guard(|| {
        let result = non_null(result, "result")?;
        if buffer.is_null() {
            return Err(fail(LeachateStatus::NullPointer, "buffer is null"));
        }
        let field = result.0.snapshots.get(index).ok_or_else(|| {
            fail(
                LeachateStatus::OutOfRange,
                format!("snapshot {index} of {}", result.0.snapshots.len()),
            )
        })?;
        let values = field.values();
        if len < values.len() {
            return Err(fail(
                LeachateStatus::OutOfRange,
                format!("buffer holds {len} values, snapshot has {}", values.len()),
            ));
        }
        std::slice::from_raw_parts_mut(buffer, values.len()).copy_from_slice(values);
        Ok(())
    })
}

/// Writes every snapshot as profile CSV to `path`.
///
/// # Safety
/// `result` must be null or a live handle; `path` null or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn leachate_result_write_csv(
    result: *const LeachateResult,
    path: *const c_char,
) -> LeachateStatus {
    guard(|| {
        let result = non_null(result, "result")?;
        let path = Path::new(text(path, "path")?);
        let file = lift(std::fs::File::create(path).map_err(Error::from))?;
        lift(write_profiles_csv(&result.0, std::io::BufWriter::new(file)))?;
        Ok(())
    })
}
