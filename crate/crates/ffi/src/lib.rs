//! C ABI over `markov_elim`.
//!
//! Objects are opaque handles created by `me_scenario_*`, `me_model_build`
//! and `me_evolve_*`, released with the matching `*_free`. Every fallible call returns a
//! [`MeStatus`]; on failure the message is kept per thread and can be read
//! with [`me_last_error_message`]. Matrices cross the boundary as separate
//! row-major real and imaginary arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use markov_elim::dynamics::{evolve_effective, evolve_exact, rabi_effective, rabi_exact_relevant, TimeGrid, Trajectory};
use markov_elim::elimination::{EffectiveModel, Order};
use markov_elim::model::{PartitionPlan, Preset, Scenario};
use markov_elim::numkernel::{check_hermitian, ComplexMatrix, C64};
use markov_elim::picture::{effective_for_plan, ConditionKind};
use markov_elim::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotHermitian = 3,
    NoConvergence = 4,
    SingularBlock = 5,
    NotPositiveDefinite = 6,
    DimensionMismatch = 7,
    NonFinite = 8,
    InvalidScenario = 9,
    UnsupportedOrder = 10,
    SearchFailed = 11,
    InvalidState = 12,
    InvalidGrid = 13,
    BufferTooSmall = 14,
    Panic = 15,
}

/// Truncation order of the effective Hamiltonian.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeOrder {
    Markov0 = 0,
    Markov1 = 1,
    Markov1Dressed = 2,
}

/// How the picture shift is chosen. `Fixed` uses the `fixed_shift` argument.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeCondition {
    TraceZero = 0,
    MinOpNorm = 1,
    MinTraceNorm = 2,
    Fixed = 3,
}

/// A Hamiltonian with labels and a relevant/irrelevant split.
pub struct MeScenario(Scenario);

/// An effective Hamiltonian on the relevant states.
pub struct MeModel(EffectiveModel);

/// Sampled amplitudes of a propagated state.
pub struct MeTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_last_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into_bytes());
}

struct Failure(MeStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e.root() {
            Error::NotHermitian { .. } => MeStatus::NotHermitian,
            Error::NoConvergence { .. } => MeStatus::NoConvergence,
            Error::SingularBlock { .. } => MeStatus::SingularBlock,
            Error::NotPositiveDefinite { .. } => MeStatus::NotPositiveDefinite,
            Error::DimensionMismatch(_) => MeStatus::DimensionMismatch,
            Error::NonFinite { .. } => MeStatus::NonFinite,
            Error::DegenerateAdjacentLevels { .. } | Error::InvalidLadder(_) | Error::IndexError(_) => MeStatus::InvalidScenario,
            Error::UnsupportedOrder(_) => MeStatus::UnsupportedOrder,
            Error::SearchFailed => MeStatus::SearchFailed,
            Error::InitialStateOutsideRelevant { .. } | Error::NotNormalized { .. } => MeStatus::InvalidState,
            Error::GridTooCoarse { .. } | Error::InvalidGrid(_) | Error::GridMismatch(_) => MeStatus::InvalidGrid,
            Error::AtStage { .. } => unreachable!(),
        };
        Failure(status, e.to_string())
    }
}

fn fail<T>(status: MeStatus, msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, msg.into()))
}

/// Runs `f`, records any error or panic, and returns the status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error(String::new());
            MeStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("internal panic: {msg}"));
            MeStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().map_or_else(|| fail(MeStatus::NullPointer, format!("{what} is null")), Ok)
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        Ok(&[])
    } else if p.is_null() {
        fail(MeStatus::NullPointer, format!("{what} is null"))
    } else {
        Ok(std::slice::from_raw_parts(p, len))
    }
}

unsafe fn out_slice<'a, T>(p: *mut T, len: usize, need: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if len < need {
        return fail(MeStatus::BufferTooSmall, format!("{what} holds {len} values, {need} needed"));
    }
    if need == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return fail(MeStatus::NullPointer, format!("{what} is null"));
    }
    Ok(std::slice::from_raw_parts_mut(p, need))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return fail(MeStatus::NullPointer, "output handle pointer is null");
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn complex_vector(re: *const f64, im: *const f64, len: usize) -> Result<Vec<C64>, Failure> {
    let re = slice(re, len, "real part")?;
    let im = if im.is_null() { None } else { Some(slice(im, len, "imaginary part")?) };
    Ok((0..len).map(|i| C64::new(re[i], im.map_or(0.0, |v| v[i]))).collect())
}

fn write_complex(values: impl ExactSizeIterator<Item = C64>, re: &mut [f64], im: Option<&mut [f64]>) {
    let n = values.len();
    let mut scratch = Vec::new();
    let im = im.unwrap_or_else(|| {
        scratch.resize(n, 0.0);
        &mut scratch
    });
    for (i, z) in values.enumerate() {
        re[i] = z.re;
        im[i] = z.im;
    }
}

/// Copies the message of the last failed call on this thread into `buf`
/// (NUL-terminated, truncated to `len`). Returns the full message length
/// excluding the terminator; 0 when the last call succeeded.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn me_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Static, NUL-terminated name of a status code.
#[no_mangle]
pub extern "C" fn me_status_name(status: MeStatus) -> *const c_char {
    let s: &'static CStr = match status {
        MeStatus::Ok => c"ok",
        MeStatus::NullPointer => c"null_pointer",
        MeStatus::InvalidArgument => c"invalid_argument",
        MeStatus::NotHermitian => c"not_hermitian",
        MeStatus::NoConvergence => c"no_convergence",
        MeStatus::SingularBlock => c"singular_block",
        MeStatus::NotPositiveDefinite => c"not_positive_definite",
        MeStatus::DimensionMismatch => c"dimension_mismatch",
        MeStatus::NonFinite => c"non_finite",
        MeStatus::InvalidScenario => c"invalid_scenario",
        MeStatus::UnsupportedOrder => c"unsupported_order",
        MeStatus::SearchFailed => c"search_failed",
        MeStatus::InvalidState => c"invalid_state",
        MeStatus::InvalidGrid => c"invalid_grid",
        MeStatus::BufferTooSmall => c"buffer_too_small",
        MeStatus::Panic => c"panic",
    };
    s.as_ptr()
}

/// Builds a named preset (`lambda`, `four_level`, `rydberg`, `two_atom`)
/// from its parameters in declaration order.
///
/// # Safety
/// `name` must be a NUL-terminated string, `params` valid for `n_params`
/// values and `out` a writable handle pointer.
#[no_mangle]
pub unsafe extern "C" fn me_scenario_preset(
    name: *const c_char,
    params: *const f64,
    n_params: usize,
    out: *mut *mut MeScenario,
) -> MeStatus {
    guard(|| {
        if name.is_null() {
            return fail(MeStatus::NullPointer, "scenario name is null");
        }
        let name =
            CStr::from_ptr(name).to_str().map_err(|_| Failure(MeStatus::InvalidArgument, "scenario name is not UTF-8".into()))?;
        let preset =
            Preset::from_name(name).map_or_else(|| fail(MeStatus::InvalidArgument, format!("unknown scenario {name:?}")), Ok)?;
        let params = slice(params, n_params, "params")?;
        if params.len() != preset.params().len() {
            return fail(
                MeStatus::InvalidArgument,
                format!(
                    "{name} takes {} parameters ({}), got {}",
                    preset.params().len(),
                    preset.params().join(", "),
                    params.len()
                ),
            );
        }
        store(out, MeScenario(preset.build(params)?))
    })
}

/// Wraps a `dim`×`dim` Hermitian matrix (row-major; `im` may be null for a
/// real matrix) with the given relevant states; all others are eliminated
/// in one step.
///
/// # Safety
/// `re` and `im` (if non-null) must hold `dim*dim` values, `relevant`
/// `n_relevant` indices, and `out` must be a writable handle pointer.
#[no_mangle]
pub unsafe extern "C" fn me_scenario_from_matrix(
    dim: usize,
    re: *const f64,
    im: *const f64,
    relevant: *const usize,
    n_relevant: usize,
    out: *mut *mut MeScenario,
) -> MeStatus {
    guard(|| {
        let entries = complex_vector(re, im, dim * dim)?;
        let matrix = ComplexMatrix::from_row_major(dim, dim, entries)?;
        check_hermitian(&matrix)?;
        let relevant = slice(relevant, n_relevant, "relevant")?.to_vec();
        let irrelevant: Vec<usize> = (0..dim).filter(|i| !relevant.contains(i)).collect();
        let plan = PartitionPlan::one_shot(relevant, irrelevant);
        plan.validate(dim)?;
        let labels = (0..dim).map(|i| i.to_string()).collect();
        store(out, MeScenario(Scenario { name: "custom".into(), matrix, labels, plan, alt_plan: None }))
    })
}

/// # Safety
/// `scenario` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn me_scenario_free(scenario: *mut MeScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Dimension of the full Hilbert space, 0 for a null handle.
///
/// # Safety
/// `scenario` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn me_scenario_dim(scenario: *const MeScenario) -> usize {
    scenario.as_ref().map_or(0, |s| s.0.dim())
}

/// Number of relevant states, 0 for a null handle.
///
/// # Safety
/// `scenario` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn me_scenario_relevant_count(scenario: *const MeScenario) -> usize {
    scenario.as_ref().map_or(0, |s| s.0.plan.relevant.len())
}

/// Copies the full Hamiltonian (row-major, `dim*dim` entries) into `re`/`im`.
///
/// # Safety
/// `re` must hold `len` values; `im` may be null or hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn me_scenario_matrix(scenario: *const MeScenario, re: *mut f64, im: *mut f64, len: usize) -> MeStatus {
    guard(|| {
        let s = &deref(scenario, "scenario")?.0;
        let d = s.dim();
        let re = out_slice(re, len, d * d, "re")?;
        let im = if im.is_null() { None } else { Some(out_slice(im, len, d * d, "im")?) };
        write_complex((0..d * d).map(|k| s.matrix[(k / d, k % d)]), re, im);
        Ok(())
    })
}

/// Oscillation frequency of the exact dynamics: the smallest gap among the
/// eigenstates with the most weight on the relevant states.
///
/// # Safety
/// `scenario` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn me_scenario_rabi_exact(scenario: *const MeScenario, out: *mut f64) -> MeStatus {
    guard(|| {
        let s = &deref(scenario, "scenario")?.0;
        let rabi = rabi_exact_relevant(&s.matrix, &s.plan.relevant)?;
        if out.is_null() {
            return fail(MeStatus::NullPointer, "out is null");
        }
        *out = rabi;
        Ok(())
    })
}

/// Eliminates the scenario's irrelevant states. Inner stages of a
/// multi-step split use zeroth order; `order` applies to the final stage.
///
/// # Safety
/// `scenario` must be a live handle and `out` a writable handle pointer.
#[no_mangle]
pub unsafe extern "C" fn me_model_build(
    scenario: *const MeScenario,
    order: MeOrder,
    condition: MeCondition,
    fixed_shift: f64,
    out: *mut *mut MeModel,
) -> MeStatus {
    guard(|| {
        let s = &deref(scenario, "scenario")?.0;
        let last = match order {
            MeOrder::Markov0 => Order::M0,
            MeOrder::Markov1 => Order::M1,
            MeOrder::Markov1Dressed => Order::M1D,
        };
        let kind = match condition {
            MeCondition::TraceZero => ConditionKind::TraceZero,
            MeCondition::MinOpNorm => ConditionKind::MinOpNorm,
            MeCondition::MinTraceNorm => ConditionKind::MinTraceNorm,
            MeCondition::Fixed if fixed_shift.is_finite() => ConditionKind::Fixed(fixed_shift),
            MeCondition::Fixed => return fail(MeStatus::InvalidArgument, "fixed shift is not finite"),
        };
        let mut orders = vec![Order::M0; s.plan.stages.len()];
        *orders.last_mut().expect("validated plan has a stage") = last;
        store(out, MeModel(effective_for_plan(&s.matrix, &s.labels, &s.plan, &orders, kind)?))
    })
}

/// # Safety
/// `model` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn me_model_free(model: *mut MeModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of relevant states, 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn me_model_dim(model: *const MeModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.m())
}

/// Picture shift used by the model, NaN for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn me_model_shift(model: *const MeModel) -> f64 {
    model.as_ref().map_or(f64::NAN, |m| m.0.shift())
}

/// Copies the effective Hamiltonian (row-major, `m*m` entries). For the
/// undressed first order this is the non-Hermitian generator.
///
/// # Safety
/// `re` must hold `len` values; `im` may be null or hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn me_model_h_eff(model: *const MeModel, re: *mut f64, im: *mut f64, len: usize) -> MeStatus {
    guard(|| {
        let h = deref(model, "model")?.0.h_eff();
        let m = h.rows();
        let re = out_slice(re, len, m * m, "re")?;
        let im = if im.is_null() { None } else { Some(out_slice(im, len, m * m, "im")?) };
        write_complex((0..m * m).map(|k| h[(k / m, k % m)]), re, im);
        Ok(())
    })
}

/// Smallest gap of the effective spectrum.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn me_model_rabi(model: *const MeModel, out: *mut f64) -> MeStatus {
    guard(|| {
        let rabi = rabi_effective(&deref(model, "model")?.0)?;
        if out.is_null() {
            return fail(MeStatus::NullPointer, "out is null");
        }
        *out = rabi;
        Ok(())
    })
}

/// Propagates `psi0` (full dimension; `im` may be null) with the exact
/// Hamiltonian on `steps + 1` equally spaced times in `[0, t_max]`.
///
/// # Safety
/// `psi_re`/`psi_im` must hold `dim` values and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn me_evolve_exact(
    scenario: *const MeScenario,
    psi_re: *const f64,
    psi_im: *const f64,
    dim: usize,
    t_max: f64,
    steps: usize,
    out: *mut *mut MeTrajectory,
) -> MeStatus {
    guard(|| {
        let s = &deref(scenario, "scenario")?.0;
        let psi = complex_vector(psi_re, psi_im, dim)?;
        let grid = TimeGrid::new(t_max, steps)?;
        store(out, MeTrajectory(evolve_exact(&s.matrix, &s.labels, &psi, &grid)?))
    })
}

/// Propagates `psi0` (full dimension, supported on the relevant states)
/// with an effective model. Irrelevant amplitudes are estimated.
///
/// # Safety
/// `psi_re`/`psi_im` must hold `dim` values and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn me_evolve_effective(
    model: *const MeModel,
    psi_re: *const f64,
    psi_im: *const f64,
    dim: usize,
    t_max: f64,
    steps: usize,
    out: *mut *mut MeTrajectory,
) -> MeStatus {
    guard(|| {
        let m = &deref(model, "model")?.0;
        let psi = complex_vector(psi_re, psi_im, dim)?;
        let grid = TimeGrid::new(t_max, steps)?;
        store(out, MeTrajectory(evolve_effective(m, &psi, &grid)?))
    })
}

/// # Safety
/// `traj` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn me_trajectory_free(traj: *mut MeTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Number of time samples, 0 for a null handle.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn me_trajectory_len(traj: *const MeTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.len())
}

/// Number of basis states per sample, 0 for a null handle.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn me_trajectory_dim(traj: *const MeTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.dim())
}

/// Copies the sample times (`len` of them).
///
/// # Safety
/// `out` must hold `cap` values.
#[no_mangle]
pub unsafe extern "C" fn me_trajectory_times(traj: *const MeTrajectory, out: *mut f64, cap: usize) -> MeStatus {
    guard(|| {
        let t = &deref(traj, "trajectory")?.0;
        out_slice(out, cap, t.times.len(), "out")?.copy_from_slice(&t.times);
        Ok(())
    })
}

/// Copies populations as a row-major `len × dim` array.
///
/// # Safety
/// `out` must hold `cap` values.
#[no_mangle]
pub unsafe extern "C" fn me_trajectory_populations(traj: *const MeTrajectory, out: *mut f64, cap: usize) -> MeStatus {
    guard(|| {
        let t = &deref(traj, "trajectory")?.0;
        let d = t.dim();
        let dst = out_slice(out, cap, t.len() * d, "out")?;
        for (row, p) in dst.chunks_mut(d.max(1)).zip(&t.populations) {
            row.copy_from_slice(p);
        }
        Ok(())
    })
}

/// Copies amplitudes as row-major `len × dim` arrays; `im` may be null.
///
/// # Safety
/// `re` must hold `cap` values; `im` may be null or hold `cap` values.
#[no_mangle]
pub unsafe extern "C" fn me_trajectory_amplitudes(traj: *const MeTrajectory, re: *mut f64, im: *mut f64, cap: usize) -> MeStatus {
    guard(|| {
        let t = &deref(traj, "trajectory")?.0;
        let need = t.len() * t.dim();
        let re = out_slice(re, cap, need, "re")?;
        let im = if im.is_null() { None } else { Some(out_slice(im, cap, need, "im")?) };
        write_complex(t.amplitudes.iter().flatten().copied().collect::<Vec<_>>().into_iter(), re, im);
        Ok(())
    })
}

/// Norm of the state in the propagation metric at each sample (1 for exact
/// and zeroth-order runs).
///
/// # Safety
/// `out` must hold `cap` values.
#[no_mangle]
pub unsafe extern "C" fn me_trajectory_conserved_norm(traj: *const MeTrajectory, out: *mut f64, cap: usize) -> MeStatus {
    guard(|| {
        let t = &deref(traj, "trajectory")?.0;
        out_slice(out, cap, t.conserved_norm.len(), "out")?.copy_from_slice(&t.conserved_norm);
        Ok(())
    })
}
