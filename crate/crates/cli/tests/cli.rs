use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn cone_lab(args: &[&str], threads: Option<&str>) -> Output {
    cone_lab_in(Path::new("."), args, threads)
}

fn cone_lab_in(cwd: &Path, args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cone-lab"));
    cmd.current_dir(cwd).args(args);
    match threads {
        Some(t) => cmd.env("CONE_LAB_THREADS", t),
        None => cmd.env_remove("CONE_LAB_THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn digest(path: &Path) -> Vec<u8> {
    Sha256::digest(fs::read(path).unwrap()).to_vec()
}

/// Runs `args` inside a fresh subdirectory `tag` of `dir` with relative
/// output paths (the report records them), returning the JSON and CSV digests.
fn run_hashed(dir: &TempDir, tag: &str, args: &[&str], threads: Option<&str>) -> (Vec<u8>, Vec<u8>) {
    let cwd = dir.path().join(tag);
    fs::create_dir(&cwd).unwrap();
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--out", "report.json", "--csv", "report.csv"]);
    let out = cone_lab_in(&cwd, &full, threads);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    (digest(&cwd.join("report.json")), digest(&cwd.join("report.csv")))
}

#[test]
fn equivalence_matrix_agrees_on_standard_families() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("eq.json");
    let out = cone_lab(
        &[
            "equivalence-matrix",
            "--family",
            "affine-ellipsoidal:3-4:count=2",
            "--family",
            "kgon:3:k=3|6",
            "--out",
            out_path.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&out_path).unwrap();
    assert!(text.contains("\"status\": \"success\""));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 4 * 3);
    assert!(stdout.lines().any(|l| l.starts_with("kgon-k3\tcss\t")));
}

#[test]
fn disagreement_exits_one() {
    // Between the fbi and fit defects of this cone, so only fbi passes.
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("eq.json");
    let out = cone_lab(
        &[
            "equivalence-matrix",
            "--family",
            "perturbed-ellipsoidal:3:eta=0.001",
            "--tol",
            "5e-4",
            "--out",
            out_path.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(code(&out), 1, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(fs::read_to_string(&out_path).unwrap().contains("\"status\": \"disagreement\""));
}

#[test]
fn unreachable_tolerance_exits_three() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("c.json");
    let out = cone_lab(
        &[
            "centroid-search",
            "--family",
            "kgon:3:k=5",
            "--interior-points",
            "3",
            "--tol",
            "1e-300",
            "--out",
            out_path.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(fs::read_to_string(&out_path).unwrap().contains("budget-exhausted"));
}

#[test]
fn invalid_inputs_exit_two() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.json");
    let out = out.to_str().unwrap();
    let bad_json = dir.path().join("bad.json");
    fs::write(&bad_json, "{\"variant\": \"quadratic\", \"dim\": 3").unwrap();
    let wrong_variant = dir.path().join("wrong.json");
    fs::write(&wrong_variant, "{\"variant\": \"cylinder\", \"dim\": 3}").unwrap();
    let missing = dir.path().join("missing.json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["fbi-sweep", "--family", "simplex:3", "--out", out],
        vec!["fbi-sweep", "--family", "kgon:3:k=2", "--out", out],
        vec!["fbi-sweep", "--cone", bad_json.to_str().unwrap(), "--out", out],
        vec!["fbi-sweep", "--cone", wrong_variant.to_str().unwrap(), "--out", out],
        vec!["fbi-sweep", "--cone", missing.to_str().unwrap(), "--out", out],
        vec!["fbi-sweep", "--family", "kgon:3", "--samples", "2", "--out", out],
        vec!["fbi-sweep", "--family", "kgon:3", "--tol", "-1", "--out", out],
        vec!["fbi-sweep", "--out", out],
        vec!["no-such-experiment", "--family", "kgon:3", "--out", out],
    ];
    for args in cases {
        let result = cone_lab(&args, None);
        assert_eq!(code(&result), 2, "{args:?}: {}", String::from_utf8_lossy(&result.stderr));
    }
    let result = cone_lab(&["fbi-sweep", "--family", "kgon:3", "--out", out], Some("zero"));
    assert_eq!(code(&result), 2);
}

#[test]
fn cone_files_are_accepted() {
    let dir = TempDir::new().unwrap();
    let lorentz = dir.path().join("lorentz.json");
    fs::write(
        &lorentz,
        r#"{"variant": "quadratic", "dim": 3, "Q": [[1, 0, 0], [0, -1, 0], [0, 0, -1]], "time_axis": [1, 0, 0]}"#,
    )
    .unwrap();
    let square = dir.path().join("square.json");
    fs::write(
        &square,
        r#"{"variant": "polyhedral", "dim": 3, "rays": [[1, 1, 1], [1, -1, 1], [1, -1, -1], [1, 1, -1]]}"#,
    )
    .unwrap();
    let out_path = dir.path().join("fbi.json");
    let out = cone_lab(
        &[
            "fbi-sweep",
            "--cone",
            lorentz.to_str().unwrap(),
            "--cone",
            square.to_str().unwrap(),
            "--out",
            out_path.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let verdicts: Vec<&str> = stdout.lines().map(|l| l.rsplit('\t').next().unwrap()).collect();
    assert_eq!(verdicts, ["Pass", "Fail"]);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let experiments = [
        "fbi-sweep",
        "css-sweep",
        "equivalence-matrix",
        "gamma-dump",
        "hammer-stress",
        "centroid-search",
    ];
    for (i, e) in experiments.iter().enumerate() {
        let args = [
            *e,
            "--family",
            "affine-ellipsoidal:3-4:count=2",
            "--family",
            "kgon:3:k=4|5",
            "--seed",
            "17",
            "--interior-points",
            "3",
            "--hyperplanes",
            "4",
        ];
        let first = run_hashed(&dir, &format!("{i}a"), &args, None);
        let second = run_hashed(&dir, &format!("{i}b"), &args, None);
        let single = run_hashed(&dir, &format!("{i}c"), &args, Some("1"));
        assert_eq!(first, second, "{e}");
        assert_eq!(first, single, "{e} with one thread");
    }
}

#[test]
fn seeds_change_random_members() {
    let dir = TempDir::new().unwrap();
    let args = |seed: &'static str| ["fbi-sweep", "--family", "affine-ellipsoidal:3:count=2", "--seed", seed];
    let a = run_hashed(&dir, "s1", &args("1"), None);
    let b = run_hashed(&dir, "s2", &args("2"), None);
    assert_ne!(a.0, b.0);
}

#[test]
fn trace_is_written_for_centroid_search() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("c.json");
    let trace = dir.path().join("trace.json");
    let out = cone_lab(
        &[
            "centroid-search",
            "--family",
            "affine-ellipsoidal:3:count=1",
            "--interior-points",
            "2",
            "--out",
            out_path.to_str().unwrap(),
            "--trace",
            trace.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&trace).unwrap();
    assert!(text.contains("\"iterates\""));
}
