use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn spherecode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spherecode")).args(args).output().unwrap()
}

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn census_row_counts_and_exit_codes() {
    let o = spherecode(&["census", "-n", "8", "-E", "32", "-p", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 3);
    let o = spherecode(&["census", "-n", "50", "-E", "530", "-p", "4"]);
    assert_eq!(stdout(&o).lines().count(), 114);
    let o = spherecode(&["census", "-n", "2", "-E", "3", "-p", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).is_empty());
    assert_eq!(spherecode(&["census", "--bogus"]).status.code(), Some(2));
    assert_eq!(spherecode(&["census", "-n", "8", "-E", "32", "-p", "3"]).status.code(), Some(2));
}

#[test]
fn llr_demo_prints_every_bit() {
    let o = spherecode(&["llr-demo", "--code", "n12code2", "--sigma", "0.8", "--method", "bcjr", "--seed", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 1 + 12 * 3);
}

fn sim(dir: &Path, out: &str, extra: &[&str]) -> Output {
    let out = dir.join(out);
    let mut args = vec!["simulate"];
    args.extend_from_slice(extra);
    args.extend_from_slice(&["-o", out.to_str().unwrap()]);
    spherecode(&args)
}

#[test]
fn mi_campaign_is_deterministic_and_resumable() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["mi", "--code", "n12code2", "--snr", "6:1:18", "--trials", "16", "-L", "8", "--seed", "5"];
    assert_eq!(sim(dir.path(), "a.csv", &args).status.code(), Some(0));
    assert_eq!(sim(dir.path(), "b.csv", &args).status.code(), Some(0));
    let a = fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, fs::read_to_string(dir.path().join("b.csv")).unwrap());
    assert_eq!(a.lines().count(), 14);
    assert!(a.starts_with("snr_db,snr_norm_db,metric,value,std_err\n"));

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("a.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["seed"], 5);
    assert_eq!(manifest["code"]["size"], "110880");
    assert_eq!(manifest["code"]["census_sha256"].as_str().unwrap().len(), 64);

    // cut the run short and resume it
    let partial: String = a.lines().take(6).map(|l| format!("{l}\n")).collect();
    fs::write(dir.path().join("b.csv"), partial).unwrap();
    assert_eq!(sim(dir.path(), "b.csv", &args).status.code(), Some(0));
    assert_eq!(a, fs::read_to_string(dir.path().join("b.csv")).unwrap());

    // a different configuration may not reuse the file
    let mut other = args.to_vec();
    other[9] = "6";
    assert_eq!(sim(dir.path(), "b.csv", &other).status.code(), Some(2));
}

#[test]
fn bmd_campaign_has_one_metric_per_demapper() {
    let dir = tempfile::tempdir().unwrap();
    let o = sim(
        dir.path(),
        "bmd.csv",
        &["bmd", "--code", "n12code2", "--snr", "8,12", "--trials", "50", "--demapper", "orbit", "--demapper", "sbs"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("bmd.csv")).unwrap();
    let metrics: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(metrics, ["bmd_orbit", "bmd_sbs", "bmd_orbit", "bmd_sbs"]);
}

#[test]
fn bler_configuration_errors() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["bler", "--code", "n12code2", "--snr", "14", "--frames", "2", "--demapper", "sbs"];
    assert_eq!(sim(dir.path(), "x.csv", &base).status.code(), Some(2));
    let mut half = base.to_vec();
    let r12 = data("ira648_r12.alist");
    half.extend(["--ldpc", &r12]);
    let o = sim(dir.path(), "y.csv", &half);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot hold 432 amplitude bits"));
    let mut ok = base.to_vec();
    let r34 = data("ira648_r34.alist");
    ok.extend(["--ldpc", &r34]);
    let o = sim(dir.path(), "z.csv", &ok);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let mut bad = base.to_vec();
    bad.extend(["--demapper", "fancy"]);
    assert_eq!(sim(dir.path(), "w.csv", &bad).status.code(), Some(2));
}

#[test]
fn unwritable_output_is_a_runtime_failure() {
    let o = spherecode(&["simulate", "mi", "--code", "demo-8", "--snr", "5", "--trials", "2", "-o", "/nonexistent/dir/out.csv"]);
    assert_eq!(o.status.code(), Some(1));
}
