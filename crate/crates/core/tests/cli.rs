use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn qsnom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsnom"))
        .args(args)
        .env("QSNOM_LOG", "quiet")
        .output()
        .expect("spawn qsnom")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn file(&self, name: &str, body: &str) -> String {
        let p = self.dir.path().join(name);
        fs::write(&p, body).unwrap();
        p.to_str().unwrap().to_string()
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const WORKED: &str = "epsilon_d = 3\nR_nm = 0.5\nomega_eV = 1\nkappa = 1\n";

#[test]
fn simulate_reports_worked_point() {
    let ws = Workspace::new();
    let cfg = ws.file("worked.cfg", WORKED);
    let out = qsnom(&["simulate", "--config", &cfg]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(
        text.contains("delta_e_eV       = -2.0000000000000001e-1"),
        "{text}"
    );
    assert!(
        text.contains("omega_s          = 8.0000000000000004e-1"),
        "{text}"
    );
    assert!(
        text.contains("amplitude        = 9.2000000000000004e-1"),
        "{text}"
    );
    assert!(text.contains("near_field       = pass"), "{text}");
}

#[test]
fn simulate_vacuum_is_neutral() {
    let out = qsnom(&["simulate", "--set", "epsilon_d=1"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(
        text.contains("delta_e_eV       = 0.0000000000000000e0"),
        "{text}"
    );
    assert!(
        text.contains("omega_s          = 1.0000000000000000e0"),
        "{text}"
    );
}

#[test]
fn overrides_beat_the_file() {
    let ws = Workspace::new();
    let cfg = ws.file("worked.cfg", WORKED);
    let out = qsnom(&["simulate", "--config", &cfg, "--set", "epsilon_d=1"]);
    assert!(stdout(&out).contains("delta_e_eV       = 0.0000000000000000e0"));
}

#[test]
fn validation_errors_exit_2() {
    let out = qsnom(&["simulate", "--set", "R_nm=-1"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains('R'), "{}", stderr(&out));

    for bad in ["no_such_key=1", "epsilon_d=0.5", "kappa=abc"] {
        assert_eq!(code(&qsnom(&["simulate", "--set", bad])), 2, "{bad}");
    }
    let out = qsnom(&[
        "invert",
        "--set",
        "observed_omega_s=0.9",
        "--set",
        "tol_rel=0",
    ]);
    assert_eq!(code(&out), 2);
    assert_eq!(
        code(&qsnom(&["simulate", "--config", "/nonexistent/run.cfg"])),
        2
    );
    assert_eq!(
        code(&qsnom(&[
            "sweep",
            "--set",
            "sweep_axis=R",
            "--set",
            "sweep_values=1,2"
        ])),
        2
    );
    assert_eq!(code(&qsnom(&["bogus"])), 2);
}

#[test]
fn duplicate_file_keys_are_rejected() {
    let ws = Workspace::new();
    let cfg = ws.file("dup.cfg", "kappa = 1\nkappa = 2\n");
    assert_eq!(code(&qsnom(&["simulate", "--config", &cfg])), 2);
}

#[test]
fn invert_round_trip_and_range_diagnostic() {
    let ws = Workspace::new();
    let cfg = ws.file("worked.cfg", WORKED);
    let observed = 1.0 - 0.36 / 1.36; // omega_s at eps = 4, alpha = 0.6
    let set = format!("observed_omega_s={observed}");
    let out = qsnom(&["invert", "--config", &cfg, "--set", &set]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let line = stdout(&out)
        .lines()
        .find(|l| l.starts_with("epsilon_d"))
        .unwrap()
        .to_string();
    let eps: f64 = line.split('=').nth(1).unwrap().trim().parse().unwrap();
    assert!((eps - 4.0).abs() < 1e-6, "{line}");

    let out = qsnom(&["invert", "--config", &cfg, "--set", "observed_omega_s=1.2"]);
    assert_eq!(code(&out), 3);
    assert!(
        stderr(&out).contains("attainable omega_s range"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn sweep_header_is_stable() {
    let ws = Workspace::new();
    let cfg = ws.file(
        "sweep.cfg",
        "sweep_axis = epsilon_d\nsweep_values = 1,2,3\n",
    );
    let out = ws.path("eps.csv");
    assert_eq!(
        code(&qsnom(&["sweep", "--config", &cfg, "--out", s(&out)])),
        0
    );
    let body = fs::read_to_string(&out).unwrap();
    let mut lines = body.lines();
    assert_eq!(
        lines.next().unwrap(),
        "epsilon_d,alpha,g_eV,delta_e_paper_eV,delta_e_oracle_eV,omega_s,amplitude,near_field_ratio,warnings,error"
    );
    assert_eq!(lines.count(), 3);
    assert!(body.ends_with('\n') && !body.contains('\r'));
}

#[test]
fn log_height_sweep_follows_inverse_cube() {
    let ws = Workspace::new();
    let cfg = ws.file(
        "r.cfg",
        "epsilon_d = 3\nsweep_axis = R\nsweep_start = 0.5\nsweep_stop = 4\nsweep_count = 4\nsweep_spacing = log\nsweep_outputs = delta_e_paper_eV\n",
    );
    let out = ws.path("r.csv");
    assert_eq!(
        code(&qsnom(&["sweep", "--config", &cfg, "--out", s(&out)])),
        0
    );
    let mut reader = csv::Reader::from_path(&out).unwrap();
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        ["R_nm", "delta_e_paper_eV", "warnings", "error"]
    );
    let shifts: Vec<f64> = reader
        .records()
        .map(|r| r.unwrap()[1].parse().unwrap())
        .collect();
    assert_eq!(shifts.len(), 4);
    for w in shifts.windows(2) {
        assert!((w[0] / w[1] - 8.0).abs() < 1e-12);
    }
}

#[test]
fn identical_configs_give_identical_bytes() {
    let ws = Workspace::new();
    let cfg = ws.file(
        "sweep.cfg",
        "sweep_axis = kappa\nsweep_start = 0.01\nsweep_stop = 0.5\nsweep_count = 7\n",
    );
    let (a, b) = (ws.path("a.csv"), ws.path("b.csv"));
    for out in [&a, &b] {
        assert_eq!(
            code(&qsnom(&["sweep", "--config", &cfg, "--out", s(out)])),
            0
        );
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn sidecar_records_resolved_config() {
    let ws = Workspace::new();
    let cfg = ws.file("sweep.cfg", "sweep_axis = epsilon_d\nsweep_values = 2,4\n");
    let out = ws.path("run.csv");
    let res = qsnom(&[
        "sweep",
        "--config",
        &cfg,
        "--set",
        "kappa=0.2",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&res), 0);
    let meta = fs::read_to_string(ws.path("run.meta")).unwrap();
    assert!(meta.contains(&format!("qsnom_version = {}", env!("CARGO_PKG_VERSION"))));
    assert!(meta.contains("command = sweep"));
    assert!(meta.contains("kappa = 0.2"), "{meta}");
    assert!(meta.contains("sweep_axis = epsilon_d"), "{meta}");
}

#[test]
fn unwritable_output_exits_4() {
    let ws = Workspace::new();
    let cfg = ws.file("sweep.cfg", "sweep_axis = epsilon_d\nsweep_values = 2,4\n");
    let out = qsnom(&["sweep", "--config", &cfg, "--out", s(ws.dir.path())]);
    assert_eq!(code(&out), 4);
    let missing = ws.path("no/such/dir/out.csv");
    assert_eq!(
        code(&qsnom(&["sweep", "--config", &cfg, "--out", s(&missing)])),
        4
    );
}

#[test]
fn oracle_check_table_and_exponents() {
    let ws = Workspace::new();
    let out = ws.path("oracle.csv");
    let res = qsnom(&["oracle-check", "--out", s(&out)]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let mut reader = csv::Reader::from_path(&out).unwrap();
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        qsnom::harness::output::ORACLE_HEADER
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 8);
    for row in rows.iter().filter(|r| &r[0] == "0.0000000000000000e0") {
        for col in 6..9 {
            assert_eq!(row[col].parse::<f64>().unwrap(), 0.0);
        }
    }
    let half = rows
        .iter()
        .find(|r| &r[0] == "5.0000000000000000e-1")
        .unwrap();
    let paper: f64 = half[13].parse().unwrap();
    let oracle: f64 = half[14].parse().unwrap();
    assert!((paper + 3.0).abs() < 1e-9);
    assert!((oracle + 6.0).abs() < 0.01);
    assert_eq!(&half[16], "true");
}

#[test]
fn oracle_check_degenerate_rows() {
    let ws = Workspace::new();
    let out = ws.path("oracle.csv");
    let res = qsnom(&[
        "oracle-check",
        "--set",
        "oracle_alphas=0.5,0.9999999999999",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let body = fs::read_to_string(&out).unwrap();
    assert!(
        body.lines()
            .skip(1)
            .any(|l| l.starts_with("9.9999") && l.contains("degenerate")),
        "{body}"
    );

    let res = qsnom(&[
        "oracle-check",
        "--set",
        "oracle_alphas=0.9999999999999",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&res), 3);
    assert!(stderr(&res).contains("0.9999999999999"), "{}", stderr(&res));
}

#[test]
fn sidecar_counts_regime_warnings() {
    let ws = Workspace::new();
    let cfg = ws.file(
        "strong.cfg",
        "R_nm = 0.5\nkappa = 1\nsweep_axis = epsilon_d\nsweep_values = 1,3,10\n",
    );
    let out = ws.path("strong.csv");
    assert_eq!(
        code(&qsnom(&["sweep", "--config", &cfg, "--out", s(&out)])),
        0
    );
    let meta = fs::read_to_string(ws.path("strong.meta")).unwrap();
    assert!(
        meta.contains("warning = 2 of 3 sweep points: non_perturbative"),
        "{meta}"
    );
    let body = fs::read_to_string(&out).unwrap();
    assert_eq!(body.matches(",non_perturbative,").count(), 2);
}
