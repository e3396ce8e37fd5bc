//! End-to-end runs of the `szabo` binary.

use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn szabo(args: &[&str], manifest: &PathBuf) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_szabo"))
        .args(args)
        .arg("--manifest")
        .arg(manifest)
        .output()
        .unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json(args: &[&str], manifest: &PathBuf) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let run = szabo(&all, manifest);
    (run.code, serde_json::from_str(&run.stdout).expect(&run.stderr))
}

fn temp_manifest(text: &str) -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.manifest");
    std::fs::write(&path, text).unwrap();
    (dir, path)
}

#[test]
fn json_reports_have_the_documented_keys() {
    for cmd in [
        "curvature",
        "ricci",
        "cov-ricci",
        "torsion",
        "cyclic-parallel",
        "szabo",
        "char-poly",
        "check-szabo",
    ] {
        let (_, v) = json(&[cmd], &fixture("diagonal.manifest"));
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys, ["command", "data", "timing_ms", "verdict"], "{cmd}");
        assert_eq!(v["command"], cmd);
        assert!(v["timing_ms"].is_number());
    }
}

#[test]
fn output_is_deterministic_apart_from_timing() {
    let strip = |s: String| -> String { s.lines().filter(|l| !l.contains("timing_ms")).collect::<Vec<_>>().join("\n") };
    for (cmd, file) in [
        ("check-szabo", "diagonal.manifest"),
        ("extend", "extension.manifest"),
        ("classify-type-a", "type_a.manifest"),
    ] {
        for format in ["text", "json"] {
            let a = szabo(&[cmd, "--format", format], &fixture(file)).stdout;
            let b = szabo(&[cmd, "--format", format], &fixture(file)).stdout;
            assert_eq!(strip(a), strip(b), "{cmd} {format}");
        }
    }
}

#[test]
fn check_szabo_reports_sigma_lines_and_exit_status() {
    let run = szabo(&["check-szabo"], &fixture("diagonal.manifest"));
    assert_eq!(run.code, 1, "the diagonal example is not Szabo");
    assert!(run.stdout.contains("verdict: false"));
    assert!(run
        .stdout
        .lines()
        .any(|l| l == "sigma_1 = 2*u1*a1^2*a2 + 2*u1*a1*a2^2 + 2*u2*a1^2*a2 + 2*u2*a1*a2^2 + 2*a1*a2^2"));
    assert!(run.stdout.lines().any(|l| l == "sigma_2 = 0"));

    let run = szabo(&["check-szabo", "--point", "u1=1,u2=-1"], &fixture("diagonal.manifest"));
    assert!(run.stdout.lines().any(|l| l == "sigma_1 = 2*a1*a2^2"));

    let (code, v) = json(&["check-szabo"], &fixture("upper.manifest"));
    assert_eq!(code, 1);
    assert_eq!(v["data"]["sigma"][0], "-2*u2*a2^3 + a2^3");

    let (code, v) = json(&["check-szabo"], &fixture("flat3.manifest"));
    assert_eq!((code, &v["verdict"]), (0, &Value::Bool(true)));
}

#[test]
fn compute_only_commands_exit_zero() {
    for cmd in ["curvature", "ricci", "cov-ricci", "szabo", "char-poly"] {
        let (code, v) = json(&[cmd], &fixture("diagonal.manifest"));
        assert_eq!(code, 0, "{cmd}");
        assert!(v["verdict"].is_null());
    }
    let (_, v) = json(&["curvature"], &fixture("upper.manifest"));
    assert_eq!(v["data"]["components"]["R^1_212"], "-u2^2 + u2");
    let (_, v) = json(&["ricci"], &fixture("diagonal.manifest"));
    assert_eq!(v["data"]["components"]["Ric_12"], "-1");
    assert_eq!(v["data"]["symmetric"], true);
}

#[test]
fn family_classification() {
    let (code, v) = json(&["classify-type-a"], &fixture("type_a.manifest"));
    assert_eq!(code, 1);
    assert_eq!(v["data"]["components"]["Ric_22;1"], "2");
    assert_eq!(v["data"]["consistent"], true);
    assert_eq!(v["data"]["szabo"], false);

    let (code, v) = json(&["classify-type-b"], &fixture("type_b.manifest"));
    assert_eq!((code, &v["verdict"]), (0, &Value::Bool(true)));

    let (code, v) = json(&["classify-type-a", "--grid", "-1..0"], &fixture("diagonal.manifest"));
    assert_eq!(code, 0);
    assert_eq!(v["data"]["total"], 64);
    assert_eq!(v["data"]["disagreements"], Value::Array(vec![]));

    let (code, v) = json(&["classify-type-b", "--grid", "0..1"], &fixture("diagonal.manifest"));
    assert_eq!(code, 0);
    assert_eq!(v["data"]["total"], 32);
}

#[test]
fn killing_fields() {
    let (code, v) = json(&["killing"], &fixture("type_b.manifest"));
    assert_eq!(code, 0);
    assert_eq!(v["data"]["fields"]["Scale"]["killing"], true);

    let (_d, path) = temp_manifest("[meta]\ndim = 2\nfamily = typeB\nparams = 1,0,0,0,0,0\n[directions]\nX = 1, 0\n");
    let (code, v) = json(&["killing"], &path);
    assert_eq!(code, 1);
    assert_eq!(v["data"]["fields"]["X"]["killing"], false);
}

#[test]
fn extension_commands() {
    let (code, v) = json(&["extend"], &fixture("extension.manifest"));
    assert_eq!(code, 0);
    assert_eq!(v["data"]["compatible"], true);
    assert_eq!(v["data"]["torsion_free"], true);
    assert_eq!(v["data"]["christoffel"]["Gamma^3_13"], "-u1 - u2");
    assert_eq!(v["data"]["metric"]["g_13"], "1");

    let (code, v) = json(&["extend-szabo"], &fixture("extension.manifest"));
    assert_eq!(code, 1, "the extension of a non-Szabo base is not Szabo");
    let degrees: Vec<_> = v["data"]["nilpotency"].as_array().unwrap().iter().map(|d| d["degree"].clone()).collect();
    assert_eq!(degrees, [Value::from(3), Value::from(3)]);

    // Φ = 0 fixes the metric, so the pseudo-norms are numbers
    let text = std::fs::read_to_string(fixture("extension.manifest")).unwrap().replace("phi = generic", "");
    let (_d, path) = temp_manifest(&text);
    let (_, v) = json(&["extend-szabo"], &path);
    assert_eq!(v["data"]["pseudo_norms"]["X1"], "1");
    let (_, v) = json(&["extend-szabo", "--direction", "X2", "--point", "u2'=1/4"], &path);
    assert_eq!(v["data"]["nilpotency"].as_array().unwrap().len(), 1);
    // t·u2' = 1 with t = u1 + u2 + 1 = 4: X2 drops to two-step
    assert_eq!(v["data"]["nilpotency"][0]["degree"], 2);
}

#[test]
fn nilpotency_of_base_directions() {
    let (code, v) = json(&["nilpotency"], &fixture("flat3.manifest"));
    assert_eq!(code, 0);
    assert_eq!(v["data"]["nilpotency"][0]["degree"], 1);
}

#[test]
fn input_errors_exit_with_two() {
    let bad = [
        "[meta]\ndim = 2\n[christoffel]\n3,1,1 = u1\n",
        "[meta]\ndim = 2\n[christoffel]\n1,1,1 = (u1\n",
        "[meta]\ndim = 2\nfamily = typeB\nparams = 0,0,1,0,0,0\n",
    ];
    for (text, cmd) in bad.iter().zip(["curvature", "curvature", "classify-type-b"]) {
        let (_d, path) = temp_manifest(text);
        let run = szabo(&[cmd], &path);
        assert_eq!(run.code, 2, "{text}: {}", run.stderr);
        assert!(run.stdout.is_empty());
        assert!(!run.stderr.is_empty());
    }
    let run = szabo(&["curvature"], &fixture("absent.manifest"));
    assert_eq!(run.code, 2);
    assert_eq!(szabo(&["classify-type-a"], &fixture("diagonal.manifest")).code, 2);
    assert_eq!(szabo(&["killing"], &fixture("diagonal.manifest")).code, 2);
    assert_eq!(szabo(&["check-szabo", "--point", "zz=1"], &fixture("diagonal.manifest")).code, 2);
    assert_eq!(szabo(&["nonsense"], &fixture("diagonal.manifest")).code, 2);
}
