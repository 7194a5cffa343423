//! C ABI over the ensemble-cavity model.
//!
//! Every fallible call returns an [`EcavStatus`]. On failure the message is
//! kept per thread and can be read with [`ecav_last_error`]. Handles are
//! opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ensemble_cavity::error::{DynamicsError, Error};
use ensemble_cavity::io::csv;
use ensemble_cavity::model::{
    initial_state, preset_params, validate_params, ConfigurationLabel, Moment, Scenario,
    SystemParams, Tolerances, MOMENT_COUNT,
};
use ensemble_cavity::runner::{run_scenario, table_matrix, SignMatrix, TableOptions};
use ensemble_cavity::{Trajectory, WitnessRecord, WitnessSeries};

pub const ECAV_DEFAULT_ABS_TOL: f64 = 1e-10;
pub const ECAV_DEFAULT_REL_TOL: f64 = 1e-9;
pub const ECAV_DEFAULT_THRESHOLD: f64 = 1e-4;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EcavStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numeric = 3,
    Io = 4,
    OutOfRange = 5,
    Panic = 6,
}

/// Model parameters, field for field.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EcavParams {
    pub delta_a: f64,
    pub delta_b: f64,
    pub delta_c: f64,
    pub g_a: f64,
    pub g_b: f64,
    pub chi: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub gamma_c: f64,
    pub n_a: f64,
    pub n_b: f64,
    pub n_c: f64,
}

impl From<SystemParams> for EcavParams {
    fn from(p: SystemParams) -> Self {
        EcavParams {
            delta_a: p.delta_a,
            delta_b: p.delta_b,
            delta_c: p.delta_c,
            g_a: p.g_a,
            g_b: p.g_b,
            chi: p.chi,
            gamma_a: p.gamma_a,
            gamma_b: p.gamma_b,
            gamma_c: p.gamma_c,
            n_a: p.n_a,
            n_b: p.n_b,
            n_c: p.n_c,
        }
    }
}

impl From<EcavParams> for SystemParams {
    fn from(p: EcavParams) -> Self {
        SystemParams {
            delta_a: p.delta_a,
            delta_b: p.delta_b,
            delta_c: p.delta_c,
            g_a: p.g_a,
            g_b: p.g_b,
            chi: p.chi,
            gamma_a: p.gamma_a,
            gamma_b: p.gamma_b,
            gamma_c: p.gamma_c,
            n_a: p.n_a,
            n_b: p.n_b,
            n_c: p.n_c,
        }
    }
}

/// One cell of the sign matrix. `config` indexes AA, AN, NA, NN in that order.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EcavTableCell {
    pub config: u32,
    pub chi: f64,
    pub tick: bool,
    pub min: f64,
    pub argmin: f64,
}

/// Result of a single-scenario run.
pub struct EcavSimulation {
    trajectory: Trajectory,
    series: WitnessSeries,
}

/// Sign matrix over all configurations.
pub struct EcavTable {
    matrix: SignMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(EcavStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Model(_) | Error::Config(_) | Error::Dynamics(DynamicsError::Model(_)) => {
                EcavStatus::InvalidArgument
            }
            Error::Io(_) => EcavStatus::Io,
            _ => EcavStatus::Numeric,
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: EcavStatus, msg: impl Into<String>) -> Failure {
    Failure(status, msg.into())
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EcavStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            EcavStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            EcavStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| fail(EcavStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| fail(EcavStatus::NullPointer, format!("{what} is null")))
}

unsafe fn string<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(EcavStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(EcavStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

/// Copies `text` into `buf` (NUL-terminated, truncated to fit) and returns
/// the full length without the terminator.
unsafe fn copy_out(text: &str, buf: *mut c_char, len: usize) -> usize {
    if !buf.is_null() && len > 0 {
        let n = text.len().min(len - 1);
        ptr::copy_nonoverlapping(text.as_ptr().cast::<c_char>(), buf, n);
        *buf.add(n) = 0;
    }
    text.len()
}

/// Message of the last failed call on this thread. Returns the message
/// length; 0 when the last call succeeded.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ecav_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match &*e.borrow() {
        Some(msg) => copy_out(msg.to_str().unwrap_or(""), buf, len),
        None => copy_out("", buf, len),
    })
}

/// Parameters of the preset `label` ("AA", "AN", "NA" or "NN") with drive `chi`.
///
/// # Safety
/// `label` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ecav_preset_params(
    label: *const c_char,
    chi: f64,
    out_params: *mut EcavParams,
) -> EcavStatus {
    guard(|| {
        let label: ConfigurationLabel =
            string(label, "label")?
                .parse()
                .map_err(|e: ensemble_cavity::error::ModelError| {
                    fail(EcavStatus::InvalidArgument, e.to_string())
                })?;
        *out(out_params, "out_params")? = preset_params(label, chi).into();
        Ok(())
    })
}

/// Checks finiteness and sign constraints.
///
/// # Safety
/// `params` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ecav_validate_params(params: *const EcavParams) -> EcavStatus {
    guard(|| {
        let p: SystemParams = (*deref(params, "params")?).into();
        validate_params(&p).map_err(|e| fail(EcavStatus::InvalidArgument, e.to_string()))
    })
}

/// Integrates one scenario from occupations `init_n[0..3]` and evaluates
/// every witness at `samples` evenly spaced times in [0, t_max].
///
/// # Safety
/// `params` must be valid, `init_n` must point to three doubles and `out_sim`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn ecav_simulate(
    params: *const EcavParams,
    init_n: *const f64,
    t_max: f64,
    samples: usize,
    abs_tol: f64,
    rel_tol: f64,
    out_sim: *mut *mut EcavSimulation,
) -> EcavStatus {
    guard(|| {
        let slot = out(out_sim, "out_sim")?;
        *slot = ptr::null_mut();
        let p: SystemParams = (*deref(params, "params")?).into();
        if init_n.is_null() {
            return Err(fail(EcavStatus::NullPointer, "init_n is null"));
        }
        let n = std::slice::from_raw_parts(init_n, 3);
        let initial = initial_state(n[0], n[1], n[2]).map_err(Error::from)?;
        let tolerances = Tolerances {
            abs: abs_tol,
            rel: rel_tol,
        };
        let scenario =
            Scenario::new(p, initial, t_max, samples, tolerances).map_err(Error::from)?;
        let (trajectory, series) = run_scenario(&scenario)?;
        *slot = Box::into_raw(Box::new(EcavSimulation { trajectory, series }));
        Ok(())
    })
}

/// Number of samples; 0 for a null handle.
///
/// # Safety
/// `sim` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ecav_simulation_len(sim: *const EcavSimulation) -> usize {
    sim.as_ref().map_or(0, |s| s.trajectory.len())
}

unsafe fn sample<'a>(sim: *const EcavSimulation, k: usize) -> Result<&'a EcavSimulation, Failure> {
    let s = deref(sim, "sim")?;
    if k >= s.trajectory.len() {
        return Err(fail(
            EcavStatus::OutOfRange,
            format!("sample {k} out of range (len {})", s.trajectory.len()),
        ));
    }
    Ok(s)
}

/// # Safety
/// `sim` must be a live handle and `out_t` writable.
#[no_mangle]
pub unsafe extern "C" fn ecav_simulation_time(
    sim: *const EcavSimulation,
    k: usize,
    out_t: *mut f64,
) -> EcavStatus {
    guard(|| {
        let s = sample(sim, k)?;
        *out(out_t, "out_t")? = s.trajectory.times[k];
        Ok(())
    })
}

/// Moment `moment` (see [`ecav_moment_name`]) at sample `k`.
///
/// # Safety
/// `sim` must be a live handle; `out_re` and `out_im` writable.
#[no_mangle]
pub unsafe extern "C" fn ecav_simulation_moment(
    sim: *const EcavSimulation,
    k: usize,
    moment: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> EcavStatus {
    guard(|| {
        let s = sample(sim, k)?;
        if moment >= MOMENT_COUNT {
            return Err(fail(
                EcavStatus::OutOfRange,
                format!("moment {moment} out of range"),
            ));
        }
        let z = s.trajectory.states[k].0[moment];
        *out(out_re, "out_re")? = z.re;
        *out(out_im, "out_im")? = z.im;
        Ok(())
    })
}

/// Witness column `column` (see [`ecav_witness_column_name`]) at sample `k`.
/// Undefined values come back as NaN.
///
/// # Safety
/// `sim` must be a live handle and `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn ecav_simulation_witness(
    sim: *const EcavSimulation,
    k: usize,
    column: usize,
    out_value: *mut f64,
) -> EcavStatus {
    guard(|| {
        let s = sample(sim, k)?;
        if column >= WitnessRecord::COLUMN_COUNT {
            return Err(fail(
                EcavStatus::OutOfRange,
                format!("column {column} out of range"),
            ));
        }
        *out(out_value, "out_value")? = s.series.records[k].values()[column];
        Ok(())
    })
}

fn create(path: &str) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| fail(EcavStatus::Io, format!("{path}: {e}")))
}

fn io_failure(e: std::io::Error) -> Failure {
    fail(EcavStatus::Io, e.to_string())
}

/// Writes the moment trajectory (`moments` true) or every witness column as CSV.
///
/// # Safety
/// `sim` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ecav_simulation_write_csv(
    sim: *const EcavSimulation,
    path: *const c_char,
    moments: bool,
) -> EcavStatus {
    guard(|| {
        let s = deref(sim, "sim")?;
        let mut w = create(string(path, "path")?)?;
        if moments {
            csv::write_trajectory(&mut w, &s.trajectory).map_err(io_failure)?;
        } else {
            let all: Vec<usize> = (0..WitnessRecord::COLUMN_COUNT).collect();
            csv::write_witness_series(&mut w, &s.series, &all).map_err(io_failure)?;
        }
        w.flush().map_err(io_failure)
    })
}

/// # Safety
/// `sim` must be null or a handle from [`ecav_simulate`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ecav_simulation_free(sim: *mut EcavSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

#[no_mangle]
pub extern "C" fn ecav_moment_count() -> usize {
    MOMENT_COUNT
}

/// Name of moment `index`; returns its length, or 0 when out of range.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ecav_moment_name(index: usize, buf: *mut c_char, len: usize) -> usize {
    match Moment::ALL.get(index) {
        Some(m) => copy_out(m.name(), buf, len),
        None => copy_out("", buf, len),
    }
}

#[no_mangle]
pub extern "C" fn ecav_witness_column_count() -> usize {
    WitnessRecord::COLUMN_COUNT
}

/// Name of witness column `index`; returns its length, or 0 when out of range.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ecav_witness_column_name(
    index: usize,
    buf: *mut c_char,
    len: usize,
) -> usize {
    let names = WitnessRecord::column_names();
    copy_out(names.get(index).map_or("", String::as_str), buf, len)
}

/// Sign matrix for every configuration at chi = 0 and 0.2.
///
/// # Safety
/// `out_table` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ecav_table(
    t_max: f64,
    samples: usize,
    threshold: f64,
    init_n: f64,
    out_table: *mut *mut EcavTable,
) -> EcavStatus {
    guard(|| {
        let slot = out(out_table, "out_table")?;
        *slot = ptr::null_mut();
        let options = TableOptions {
            t_max,
            samples,
            threshold,
            init: [init_n; 3],
            ..TableOptions::default()
        };
        let matrix = table_matrix(&options)?;
        *slot = Box::into_raw(Box::new(EcavTable { matrix }));
        Ok(())
    })
}

/// Number of cells; 0 for a null handle.
///
/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ecav_table_len(table: *const EcavTable) -> usize {
    table.as_ref().map_or(0, |t| t.matrix.cells.len())
}

unsafe fn cell<'a>(
    table: *const EcavTable,
    i: usize,
) -> Result<&'a ensemble_cavity::runner::SignCell, Failure> {
    let t = deref(table, "table")?;
    t.matrix.cells.get(i).ok_or_else(|| {
        fail(
            EcavStatus::OutOfRange,
            format!("cell {i} out of range (len {})", t.matrix.cells.len()),
        )
    })
}

/// # Safety
/// `table` must be a live handle and `out_cell` writable.
#[no_mangle]
pub unsafe extern "C" fn ecav_table_cell(
    table: *const EcavTable,
    i: usize,
    out_cell: *mut EcavTableCell,
) -> EcavStatus {
    guard(|| {
        let c = cell(table, i)?;
        let config = ConfigurationLabel::ALL
            .iter()
            .position(|&l| l == c.config)
            .expect("known configuration") as u32;
        *out(out_cell, "out_cell")? = EcavTableCell {
            config,
            chi: c.chi,
            tick: c.tick,
            min: c.min,
            argmin: c.argmin,
        };
        Ok(())
    })
}

/// Witness label of cell `i` (for example `steering_AB`); returns its
/// length, or 0 when out of range.
///
/// # Safety
/// `table` must be a live handle; `buf` null or `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ecav_table_cell_label(
    table: *const EcavTable,
    i: usize,
    buf: *mut c_char,
    len: usize,
) -> usize {
    match table.as_ref().and_then(|t| t.matrix.cells.get(i)) {
        Some(c) => copy_out(&c.label, buf, len),
        None => copy_out("", buf, len),
    }
}

/// # Safety
/// `table` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ecav_table_write_csv(
    table: *const EcavTable,
    path: *const c_char,
) -> EcavStatus {
    guard(|| {
        let t = deref(table, "table")?;
        let mut w = create(string(path, "path")?)?;
        csv::write_sign_matrix(&mut w, &t.matrix).map_err(io_failure)?;
        w.flush().map_err(io_failure)
    })
}

/// # Safety
/// `table` must be null or a handle from [`ecav_table`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ecav_table_free(table: *mut EcavTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}
