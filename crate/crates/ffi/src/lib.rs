//! C ABI for the satshare simulator.
//!
//! Every fallible call returns a [`SatshareStatus`]; on failure the message
//! is available from [`satshare_last_error`] on the same thread. Strings
//! handed out by the library must be released with [`satshare_string_free`],
//! handles with their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use satshare::consensus::dump_trace;
use satshare::geometry::{deviation_angle, EarthModel};
use satshare::ledger::dump::dump_chain;
use satshare::market::{best_response_power, optimal_price, satellite_utility, Binding};
use satshare::sim::{audit_chain, run_scenario, RunReport, ScenarioConfig, SimError};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SatshareStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Simulation = 4,
    Domain = 5,
    InvalidChain = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SatshareBinding {
    Interior = 0,
    QosFloor = 1,
    IncumbentCap = 2,
    Infeasible = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SatsharePricing {
    pub pi_star: f64,
    pub u_s_star: f64,
    pub expected_payment: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SatshareBestResponse {
    pub p_c_star: f64,
    pub feasible: bool,
    pub binding: SatshareBinding,
}

/// Parsed and validated scenario.
pub struct SatshareScenario {
    config: ScenarioConfig,
}

/// Result of a scenario run.
pub struct SatshareReport {
    report: RunReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

type Outcome = Result<(), (SatshareStatus, String)>;

fn guard(f: impl FnOnce() -> Outcome) -> SatshareStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SatshareStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SatshareStatus::Panic
        }
    }
}

fn null(what: &str) -> (SatshareStatus, String) {
    (SatshareStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, (SatshareStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| (SatshareStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Outcome {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Outcome {
    let c = CString::new(s).map_err(|e| (SatshareStatus::Simulation, e.to_string()))?;
    write(out, c.into_raw(), "out")
}

unsafe fn as_scenario<'a>(
    p: *const SatshareScenario,
) -> Result<&'a SatshareScenario, (SatshareStatus, String)> {
    p.as_ref().ok_or_else(|| null("scenario"))
}

unsafe fn as_report<'a>(
    p: *const SatshareReport,
) -> Result<&'a SatshareReport, (SatshareStatus, String)> {
    p.as_ref().ok_or_else(|| null("report"))
}

fn config_err(e: impl std::fmt::Display) -> (SatshareStatus, String) {
    (SatshareStatus::Config, e.to_string())
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn satshare_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn satshare_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `toml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn satshare_scenario_from_toml(
    toml: *const c_char,
    out: *mut *mut SatshareScenario,
) -> SatshareStatus {
    guard(|| {
        let config = ScenarioConfig::from_toml_str(text(toml, "toml")?).map_err(config_err)?;
        write(
            out,
            Box::into_raw(Box::new(SatshareScenario { config })),
            "out",
        )
    })
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn satshare_scenario_from_json(
    json: *const c_char,
    out: *mut *mut SatshareScenario,
) -> SatshareStatus {
    guard(|| {
        let config = ScenarioConfig::from_json_str(text(json, "json")?).map_err(config_err)?;
        write(
            out,
            Box::into_raw(Box::new(SatshareScenario { config })),
            "out",
        )
    })
}

/// # Safety
/// `scenario` must be NULL or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn satshare_scenario_free(scenario: *mut SatshareScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// # Safety
/// `scenario` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn satshare_scenario_set_seed(
    scenario: *mut SatshareScenario,
    seed: u64,
) -> SatshareStatus {
    guard(|| {
        let s = scenario.as_mut().ok_or_else(|| null("scenario"))?;
        s.config.seed = seed;
        Ok(())
    })
}

/// # Safety
/// `scenario` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn satshare_run_scenario(
    scenario: *const SatshareScenario,
    out: *mut *mut SatshareReport,
) -> SatshareStatus {
    guard(|| {
        let s = as_scenario(scenario)?;
        let report = run_scenario(&s.config).map_err(|e| match e {
            SimError::Config(c) => config_err(c),
            other => (SatshareStatus::Simulation, other.to_string()),
        })?;
        write(
            out,
            Box::into_raw(Box::new(SatshareReport { report })),
            "out",
        )
    })
}

/// # Safety
/// `report` must be NULL or a handle from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn satshare_report_free(report: *mut SatshareReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `handle` must be a live report; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn satshare_report_chain_height(
    handle: *const SatshareReport,
    out: *mut u64,
) -> SatshareStatus {
    guard(|| write(out, as_report(handle)?.report.chain_height, "out"))
}

/// Hex trace hash. Free the string with `satshare_string_free`.
///
/// # Safety
/// `handle` must be a live report; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn satshare_report_trace_hash(
    handle: *const SatshareReport,
    out: *mut *mut c_char,
) -> SatshareStatus {
    guard(|| write_string(out, as_report(handle)?.report.trace_hash.to_hex()))
}

/// Hex digest of the committed chain.
///
/// # Safety
/// `handle` must be a live report; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn satshare_report_chain_digest(
    handle: *const SatshareReport,
    out: *mut *mut c_char,
) -> SatshareStatus {
    guard(|| write_string(out, as_report(handle)?.report.chain_digest.to_hex()))
}

/// Full report as JSON.
///
/// # Safety
/// `handle` must be a live report; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn satshare_report_json(
    handle: *const SatshareReport,
    out: *mut *mut c_char,
) -> SatshareStatus {
    guard(|| {
        let json = serde_json::to_string(&as_report(handle)?.report)
            .map_err(|e| (SatshareStatus::Simulation, e.to_string()))?;
        write_string(out, json)
    })
}

/// Tab-separated chain dump accepted by `satshare_audit_chain_dump`.
///
/// # Safety
/// `handle` must be a live report; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn satshare_report_chain_dump(
    handle: *const SatshareReport,
    out: *mut *mut c_char,
) -> SatshareStatus {
    guard(|| write_string(out, dump_chain(&as_report(handle)?.report.chain)))
}

/// Line-delimited message trace.
///
/// # Safety
/// `handle` must be a live report; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn satshare_report_trace(
    handle: *const SatshareReport,
    out: *mut *mut c_char,
) -> SatshareStatus {
    guard(|| write_string(out, dump_trace(&as_report(handle)?.report.trace)))
}

/// Per-epoch summary as CSV with the given ASCII delimiter.
///
/// # Safety
/// `handle` must be a live report; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn satshare_report_epochs_csv(
    handle: *const SatshareReport,
    delim: c_char,
    out: *mut *mut c_char,
) -> SatshareStatus {
    guard(|| {
        write_string(
            out,
            as_report(handle)?.report.epochs_csv(delim as u8 as char),
        )
    })
}

/// Reputation table as CSV with the given ASCII delimiter.
///
/// # Safety
/// `handle` must be a live report; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn satshare_report_reputation_csv(
    handle: *const SatshareReport,
    delim: c_char,
    out: *mut *mut c_char,
) -> SatshareStatus {
    guard(|| {
        write_string(
            out,
            as_report(handle)?.report.table.to_csv(delim as u8 as char),
        )
    })
}

/// Profit-maximising price for the scenario's market.
///
/// # Safety
/// `handle` must be a live scenario; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn satshare_optimal_price(
    handle: *const SatshareScenario,
    out: *mut SatsharePricing,
) -> SatshareStatus {
    guard(|| {
        let c = &as_scenario(handle)?.config;
        let sol = optimal_price(&c.market, c.pricing.range(), c.pricing.grid)
            .map_err(|e| (SatshareStatus::Domain, e.to_string()))?;
        write(
            out,
            SatsharePricing {
                pi_star: sol.pi_star,
                u_s_star: sol.u_s_star,
                expected_payment: sol.expected_payment,
            },
            "out",
        )
    })
}

/// Satellite profit at price `pi`.
///
/// # Safety
/// `handle` must be a live scenario; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn satshare_satellite_utility(
    handle: *const SatshareScenario,
    pi: f64,
    out: *mut f64,
) -> SatshareStatus {
    guard(|| {
        let c = &as_scenario(handle)?.config;
        if !(pi > 0.0 && pi.is_finite()) {
            return Err((
                SatshareStatus::Domain,
                format!("price must be positive, got {pi}"),
            ));
        }
        write(out, satellite_utility(&c.market, pi), "out")
    })
}

/// Entrant best response at price `pi` and preference `theta`.
///
/// # Safety
/// `handle` must be a live scenario; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn satshare_best_response(
    handle: *const SatshareScenario,
    pi: f64,
    theta: f64,
    out: *mut SatshareBestResponse,
) -> SatshareStatus {
    guard(|| {
        let c = &as_scenario(handle)?.config;
        let br = best_response_power(&c.market, pi, theta);
        let binding = match br.binding {
            Binding::Interior => SatshareBinding::Interior,
            Binding::QosFloor => SatshareBinding::QosFloor,
            Binding::IncumbentCap => SatshareBinding::IncumbentCap,
            Binding::Infeasible => SatshareBinding::Infeasible,
        };
        write(
            out,
            SatshareBestResponse {
                p_c_star: br.p_c_star,
                feasible: br.feasible,
                binding,
            },
            "out",
        )
    })
}

/// Deviation angle in radians between a user and its cell centre line.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn satshare_deviation_angle(
    cell_to_sat_km: f64,
    user_to_sat_km: f64,
    user_to_center_km: f64,
    earth_radius_km: f64,
    out: *mut f64,
) -> SatshareStatus {
    guard(|| {
        let domain = |e: satshare::geometry::GeometryError| (SatshareStatus::Domain, e.to_string());
        let earth = EarthModel::new(earth_radius_km).map_err(domain)?;
        let angle = deviation_angle(cell_to_sat_km, user_to_sat_km, user_to_center_km, &earth)
            .map_err(domain)?;
        write(out, angle, "out")
    })
}

/// Audits a chain dump. `scenario` may be NULL for a structure-only check.
/// `invalid_height` receives -1 for a valid chain, -2 for a dump that does
/// not parse, else the first invalid height. Anything but a valid chain
/// returns `InvalidChain`.
///
/// # Safety
/// `dump` must be a NUL-terminated string, `scenario` NULL or a live
/// handle, `invalid_height` writable.
#[no_mangle]
pub unsafe extern "C" fn satshare_audit_chain_dump(
    dump: *const c_char,
    scenario: *const SatshareScenario,
    invalid_height: *mut i64,
) -> SatshareStatus {
    guard(|| {
        let text = text(dump, "dump")?;
        if invalid_height.is_null() {
            return Err(null("invalid_height"));
        }
        let config = scenario.as_ref().map(|s| &s.config);
        let verdict = match audit_chain(text, config) {
            Ok(v) => v,
            Err(e) => {
                write(invalid_height, -2, "invalid_height")?;
                return Err((SatshareStatus::InvalidChain, e.to_string()));
            }
        };
        match verdict.invalid_height() {
            None => write(invalid_height, -1, "invalid_height"),
            Some(h) => {
                write(invalid_height, h as i64, "invalid_height")?;
                Err((SatshareStatus::InvalidChain, format!("{verdict:?}")))
            }
        }
    })
}
