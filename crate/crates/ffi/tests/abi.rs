use std::ffi::{c_char, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use spherecode_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    let n = unsafe { sc_last_error(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    let bytes: Vec<u8> = buf.iter().take_while(|&&c| c != 0).map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

#[test]
fn preset_encode_decode_round_trip() {
    let name = CString::new("n12code2").unwrap();
    let mut code = ptr::null_mut();
    unsafe {
        assert_eq!(sc_code_new_preset(name.as_ptr(), &mut code), ScStatus::Ok);
        assert_eq!(sc_code_length(code), 12);
        let mut bits = 0.0;
        assert_eq!(sc_code_size_log2(code, &mut bits), ScStatus::Ok);
        assert!((bits - 110_880f64.log2()).abs() < 1e-12);
        let idx = CString::new("65535").unwrap();
        let mut amps = [0u32; 12];
        assert_eq!(sc_code_encode(code, idx.as_ptr(), amps.as_mut_ptr(), 12), ScStatus::Ok);
        assert_eq!(amps, [3, 5, 1, 3, 1, 1, 1, 3, 5, 1, 5, 7]);
        let mut buf = [0 as c_char; 32];
        assert_eq!(sc_code_decode(code, amps.as_ptr(), 12, buf.as_mut_ptr(), 32), ScStatus::Ok);
        assert_eq!(buf[..6].iter().map(|&c| c as u8).collect::<Vec<_>>(), b"65535\0");
        assert_eq!(sc_code_decode(code, amps.as_ptr(), 12, buf.as_mut_ptr(), 3), ScStatus::BufferTooSmall);
        sc_code_free(code);
    }
}

#[test]
fn errors_are_reported_not_raised() {
    let mut code = ptr::null_mut();
    unsafe {
        assert_eq!(sc_code_new_shell(2, 3, 2, 0, &mut code), ScStatus::EmptyCode);
        assert!(last_error().contains("no codewords"));
        assert_eq!(sc_code_new_shell(8, 32, 3, 0, &mut code), ScStatus::InvalidArgument);
        assert_eq!(sc_code_new_preset(ptr::null(), &mut code), ScStatus::NullPointer);
        let bad = CString::new("nope").unwrap();
        assert_eq!(sc_code_new_preset(bad.as_ptr(), &mut code), ScStatus::InvalidArgument);
        assert_eq!(sc_code_length(ptr::null()), 0);
        sc_code_free(ptr::null_mut());
        let missing = CString::new("/no/such.alist").unwrap();
        let mut h = ptr::null_mut();
        assert_eq!(sc_ldpc_load(missing.as_ptr(), &mut h), ScStatus::Io);
    }
}

#[test]
fn worked_example_llrs() {
    let name = CString::new("demo-8").unwrap();
    let y = [3.1, 1.2, 1.1, 2.5, 1.7, 2.6, -0.9, 3.2];
    let mut code = ptr::null_mut();
    unsafe {
        assert_eq!(sc_code_new_preset(name.as_ptr(), &mut code), ScStatus::Ok);
        let mut llr = [0.0; 16];
        for (m, want) in [
            (ScDemapper::Exact, 0.6906),
            (ScDemapper::SymbolBySymbol, -0.2521),
            (ScDemapper::OrbitFrozen, 0.2004),
        ] {
            assert_eq!(sc_llr(code, m, y.as_ptr(), 8, 1.0, llr.as_mut_ptr(), 16), ScStatus::Ok);
            assert!((llr[1] - want).abs() < 1e-4, "{m:?}: {}", llr[1]);
        }
        assert_eq!(sc_llr(code, ScDemapper::Exact, y.as_ptr(), 8, 1.0, llr.as_mut_ptr(), 15), ScStatus::BufferTooSmall);
        assert_eq!(sc_llr(code, ScDemapper::Exact, y.as_ptr(), 7, 1.0, llr.as_mut_ptr(), 16), ScStatus::InvalidArgument);
        sc_code_free(code);
    }
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data").join(name)
}

#[test]
fn ldpc_decodes_the_zero_word() {
    let path = CString::new(fixture("ira648_r34.alist").to_str().unwrap()).unwrap();
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(sc_ldpc_load(path.as_ptr(), &mut h), ScStatus::Ok);
        assert_eq!(sc_ldpc_length(h), 648);
        let mut llr = vec![4.0; 648];
        llr[5] = -1.0;
        let mut bits = vec![9u8; 648];
        let mut conv = 0;
        assert_eq!(sc_ldpc_decode(h, llr.as_ptr(), 648, 50, bits.as_mut_ptr(), &mut conv), ScStatus::Ok);
        assert_eq!(conv, 1);
        assert!(bits.iter().all(|&b| b == 0));
        sc_ldpc_free(h);
    }
}

#[test]
fn header_compiles_and_links_from_c() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(root.join("include/spherecode.h")).unwrap();
    for f in ["sc_code_new_shell", "sc_llr", "sc_ldpc_decode", "sc_last_error", "SC_STATUS_OK"] {
        assert!(header.contains(f), "{f} missing from header");
    }
    // target/<profile>/deps/<test binary> -> target/<profile>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libspherecode_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!("skipping C link check: no cc or no static library at {}", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "spherecode.h"
int main(void) {
    ScCode *code = NULL;
    if (sc_code_new_shell(8, 32, 4, 0, &code) != SC_STATUS_OK) return 1;
    unsigned amps[8];
    if (sc_code_encode(code, "63", amps, 8) != SC_STATUS_OK) return 2;
    char buf[16];
    if (sc_code_decode(code, amps, 8, buf, sizeof buf) != SC_STATUS_OK) return 3;
    printf("%s\n", buf);
    sc_code_free(code);
    return sc_code_new_shell(2, 3, 2, 0, &code) == SC_STATUS_EMPTY_CODE ? 0 : 4;
}
"#,
    )
    .unwrap();
    let exe_out = dir.path().join("main");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(root.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe_out)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe_out).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "63");
}
