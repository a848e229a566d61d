use std::ffi::{c_char, CStr, CString};
use std::ptr;

use satshare_ffi::*;

const SCENARIO: &str = include_str!("../../../scenarios/default.toml");

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { satshare_string_free(s) };
    out
}

fn last_error() -> String {
    let p = satshare_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn load() -> *mut SatshareScenario {
    let text = CString::new(SCENARIO).unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { satshare_scenario_from_toml(text.as_ptr(), &mut s) },
        SatshareStatus::Ok
    );
    s
}

#[test]
fn run_report_and_audit() {
    let s = load();
    let mut r = ptr::null_mut();
    unsafe {
        assert_eq!(satshare_run_scenario(s, &mut r), SatshareStatus::Ok);
        let mut height = 0;
        assert_eq!(
            satshare_report_chain_height(r, &mut height),
            SatshareStatus::Ok
        );
        assert_eq!(height, 30);
        let mut p = ptr::null_mut();
        assert_eq!(satshare_report_trace_hash(r, &mut p), SatshareStatus::Ok);
        let hash = take(p);
        assert_eq!(hash.len(), 64);
        let expected = satshare::sim::run_scenario(
            &satshare::sim::ScenarioConfig::from_toml_str(SCENARIO).unwrap(),
        )
        .unwrap()
        .trace_hash
        .to_hex();
        assert_eq!(hash, expected);

        assert_eq!(satshare_report_json(r, &mut p), SatshareStatus::Ok);
        assert!(take(p).contains("\"chain_height\":30"));
        assert_eq!(
            satshare_report_epochs_csv(r, b';' as c_char, &mut p),
            SatshareStatus::Ok
        );
        assert!(take(p).starts_with("epoch;leader"));
        assert_eq!(
            satshare_report_reputation_csv(r, b',' as c_char, &mut p),
            SatshareStatus::Ok
        );
        assert!(take(p).starts_with("operator_id,node_id"));
        assert_eq!(satshare_report_trace(r, &mut p), SatshareStatus::Ok);
        assert!(take(p).starts_with("tick\t"));

        assert_eq!(satshare_report_chain_dump(r, &mut p), SatshareStatus::Ok);
        let dump = CString::new(take(p)).unwrap();
        let mut bad = -2i64;
        assert_eq!(
            satshare_audit_chain_dump(dump.as_ptr(), s, &mut bad),
            SatshareStatus::Ok
        );
        assert_eq!(bad, -1);
        assert_eq!(
            satshare_audit_chain_dump(dump.as_ptr(), ptr::null(), &mut bad),
            SatshareStatus::Ok
        );

        // replace the tip's miner signature
        let text = dump.to_str().unwrap();
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let last = lines.pop().unwrap();
        let mut cols: Vec<&str> = last.split('\t').collect();
        cols[7] = "00";
        lines.push(cols.join("\t"));
        let broken = CString::new(lines.join("\n") + "\n").unwrap();
        assert_eq!(
            satshare_audit_chain_dump(broken.as_ptr(), s, &mut bad),
            SatshareStatus::InvalidChain
        );
        assert_eq!(bad, 30);
        let garbage = CString::new("not a dump\n").unwrap();
        assert_eq!(
            satshare_audit_chain_dump(garbage.as_ptr(), s, &mut bad),
            SatshareStatus::InvalidChain
        );
        assert_eq!(bad, -2);

        satshare_report_free(r);
        satshare_scenario_free(s);
    }
}

#[test]
fn market_queries() {
    let s = load();
    unsafe {
        let mut sol = SatsharePricing::default();
        assert_eq!(satshare_optimal_price(s, &mut sol), SatshareStatus::Ok);
        let direct = satshare::market::optimal_price(
            &satshare::market::MarketParams::default(),
            satshare::market::PriceRange::default(),
            200,
        )
        .unwrap();
        assert_eq!(sol.pi_star, direct.pi_star);
        let mut u = 0.0;
        assert_eq!(
            satshare_satellite_utility(s, sol.pi_star, &mut u),
            SatshareStatus::Ok
        );
        assert_eq!(u, sol.u_s_star);
        assert_eq!(
            satshare_satellite_utility(s, -1.0, &mut u),
            SatshareStatus::Domain
        );

        let mut br = SatshareBestResponse {
            p_c_star: 0.0,
            feasible: false,
            binding: SatshareBinding::Infeasible,
        };
        assert_eq!(
            satshare_best_response(s, 1e3, 1.0, &mut br),
            SatshareStatus::Ok
        );
        assert!(br.feasible);
        assert_eq!(br.binding, SatshareBinding::QosFloor);
        satshare_scenario_free(s);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(
            satshare_scenario_from_toml(ptr::null(), &mut s),
            SatshareStatus::NullPointer
        );
        let bad = CString::new("seed = 1\nwhat = 2\n").unwrap();
        assert_eq!(
            satshare_scenario_from_toml(bad.as_ptr(), &mut s),
            SatshareStatus::Config
        );
        assert!(last_error().contains("what"));
        assert!(s.is_null());
        let json = CString::new("{\"seed\": 1}").unwrap();
        assert_eq!(
            satshare_scenario_from_json(json.as_ptr(), &mut s),
            SatshareStatus::Config
        );
        let mut h = 0;
        assert_eq!(
            satshare_report_chain_height(ptr::null(), &mut h),
            SatshareStatus::NullPointer
        );
        let mut angle = 0.0;
        assert_eq!(
            satshare_deviation_angle(1.0, 1.0, 0.0, 6371.0, &mut angle),
            SatshareStatus::Ok
        );
        assert_eq!(angle, 0.0);
        assert_eq!(
            satshare_deviation_angle(1.0, 1.0, 500.0, 6371.0, &mut angle),
            SatshareStatus::Domain
        );
        satshare_scenario_free(ptr::null_mut());
        satshare_report_free(ptr::null_mut());
        satshare_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_the_api() {
    let header = include_str!("../include/satshare.h");
    for name in [
        "satshare_scenario_from_toml",
        "satshare_scenario_from_json",
        "satshare_run_scenario",
        "satshare_report_trace_hash",
        "satshare_optimal_price",
        "satshare_audit_chain_dump",
        "satshare_last_error",
        "typedef struct SatshareScenario SatshareScenario",
        "SATSHARE_STATUS_INVALID_CHAIN = 6",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

/// Compiles and runs a small C program against the header and static
/// library when a C compiler is on the path.
#[test]
fn c_program_links_and_runs() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found, skipping");
        return;
    };
    let deps = std::env::current_exe().unwrap();
    let target = deps.parent().unwrap().parent().unwrap();
    let lib = target.join("libsatshare_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built, skipping", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let manifest = env!("CARGO_MANIFEST_DIR");
    let status = std::process::Command::new(cc)
        .arg(format!("{manifest}/tests/smoke.c"))
        .arg(format!("-I{manifest}/include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = std::process::Command::new(&exe)
        .arg(format!("{manifest}/../../scenarios/default.toml"))
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("height 30"));
}

fn which_cc() -> Result<&'static str, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if std::process::Command::new(cc)
            .arg("--version")
            .output()
            .is_ok()
        {
            return Ok(cc);
        }
    }
    Err(())
}
