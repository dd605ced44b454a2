use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use std::f64::consts::PI;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qdchoice"))
}

fn pulses(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("pulses")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_csv(path: &Path) -> (String, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    (
        header,
        lines
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect(),
    )
}

#[test]
fn sweep_two_alphas() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["sweep", "--alphas", "0,pi", "--thetas", "17", "--out", out]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = read_csv(&dir.path().join("sweep.csv"));
    assert_eq!(header, "alpha_rad,theta_rad,level,p");
    assert_eq!(rows.len(), 34);
    for row in &rows[..17] {
        assert!(row[3].parse::<f64>().unwrap().abs() < 1e-12);
    }
    let fits: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fits.json")).unwrap())
            .unwrap();
    assert!((fits[1]["amplitude"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert!(fits[0]["amplitude"].as_f64().unwrap().abs() < 1e-12);
    let svg = std::fs::read_to_string(dir.path().join("fringes.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.matches("<polyline").count() == 2);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["command"], "sweep");
    assert!(manifest["created"].is_string());
}

#[test]
fn sweep_pulse_level_matches_gate_level() {
    let (g, p) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for (dir, level) in [(&g, "gate"), (&p, "pulse")] {
        let o = run(&[
            "sweep",
            "--level",
            level,
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let (_, gr) = read_csv(&g.path().join("sweep.csv"));
    let (_, pr) = read_csv(&p.path().join("sweep.csv"));
    assert_eq!(gr.len(), 5 * 17);
    for (a, b) in gr.iter().zip(&pr) {
        assert_eq!(a[..2], b[..2]);
        assert_eq!((a[2].as_str(), b[2].as_str()), ("gate", "pulse"));
        let dp = a[3].parse::<f64>().unwrap() - b[3].parse::<f64>().unwrap();
        assert!(dp.abs() <= 1e-9);
    }
}

#[test]
fn sweep_json_format() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "sweep",
        "--format",
        "json",
        "--alphas",
        "pi/2",
        "--thetas",
        "5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let recs: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep.json")).unwrap())
            .unwrap();
    assert_eq!(recs.as_array().unwrap().len(), 5);
    assert_eq!(recs[0]["level"], "gate");
    assert!((recs[0]["p"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!(!dir.path().join("sweep.csv").exists());
}

#[test]
fn sweep_degenerate_fit_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "sweep",
        "--thetas",
        "0,pi,2pi",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("degenerate fit"));
    assert!(!dir.path().join("sweep.csv").exists());
}

#[test]
fn sweep_bad_flags_exit_2() {
    for args in [
        &["sweep", "--alphas", "0,pie"][..],
        &["sweep", "--alphas", "4"],
        &["sweep", "--thetas", "1"],
        &["sweep", "--samples", "4"],
        &["sweep", "--dephase", "gradient", "--samples", "1"],
        &["sweep", "--noise", "-0.1"],
        &["sweep", "--dephase", "weak"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn sweep_gradient_dephasing_matches_ideal() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let base = ["sweep", "--alphas", "pi/3,pi", "--thetas", "9"];
    let o = run(&[&base[..], &["--out", a.path().to_str().unwrap()]].concat());
    assert!(o.status.success());
    let o = run(&[
        &base[..],
        &[
            "--dephase",
            "gradient",
            "--samples",
            "3",
            "--out",
            b.path().to_str().unwrap(),
        ],
    ]
    .concat());
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, ra) = read_csv(&a.path().join("sweep.csv"));
    let (_, rb) = read_csv(&b.path().join("sweep.csv"));
    for (x, y) in ra.iter().zip(&rb) {
        let d = x[3].parse::<f64>().unwrap() - y[3].parse::<f64>().unwrap();
        assert!(d.abs() < 1e-12);
    }
}

#[test]
fn config_file_is_merged_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("out");
    std::fs::write(
        &cfg,
        format!(
            "seed = 4\nout = {:?}\n[sweep]\nalphas = \"pi\"\nthetas = 5\nlevel = \"pulse\"\nnoise = 0.01\n",
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "sweep", "--thetas", "9"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (_, rows) = read_csv(&out.join("sweep.csv"));
    assert_eq!(rows.len(), 9);
    assert!(rows
        .iter()
        .all(|r| r[2] == "pulse" && r[0] == PI.to_string()));

    std::fs::write(&cfg, "[sweep]\nunknown_key = 1\n").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "sweep"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_corpus() {
    let cases = [
        ("cnot_hc.pul", "cnot", 0),
        ("cnot_hc.pul", "cnot-ideal", 1),
        ("ch_hc.pul", "ch", 0),
        ("empty.pul", "identity", 0),
        ("measure.pul", "identity", 1),
    ];
    for (file, target, code) in cases {
        let o = run(&["verify", pulses(file).to_str().unwrap(), "--target", target]);
        assert_eq!(
            o.status.code(),
            Some(code),
            "{file} vs {target}: {}",
            stderr(&o)
        );
    }
}

#[test]
fn verify_reports_json() {
    let o = run(&[
        "verify",
        pulses("cnot_hc.pul").to_str().unwrap(),
        "--target",
        "cnot",
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["events"], 9);
    assert!((v["global_phase"].as_f64().unwrap() + PI / 4.0).abs() < 1e-12);
    assert!((v["duration_s"].as_f64().unwrap() - 1.0 / (2.0 * 215.1)).abs() < 1e-15);
}

#[test]
fn verify_parse_error_exits_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.pul");
    std::fs::write(&file, "rot Q y 90\n").unwrap();
    let o = run(&["verify", file.to_str().unwrap(), "--target", "cnot"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("unknown spin label 'Q' at line 1"),
        "{}",
        stderr(&o)
    );

    std::fs::write(&file, "# ok\nrot C y 90\njevolve 1/2J extra\n").unwrap();
    let o = run(&["verify", file.to_str().unwrap(), "--target", "cnot"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"));
}

#[test]
fn verify_usage_errors() {
    let p = pulses("empty.pul");
    let p = p.to_str().unwrap();
    assert_eq!(run(&["verify", p]).status.code(), Some(2));
    assert_eq!(
        run(&["verify", p, "--target", "swap"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["verify", "/nonexistent.pul", "--target", "identity"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn tomo_writes_matrix_and_tomogram() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "tomo",
        "--alpha",
        "pi/2",
        "--theta",
        "0",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("tomo.json")).unwrap())
            .unwrap();
    let re = |r: usize, c: usize| v["real"][r][c].as_f64().unwrap();
    let im = |r: usize, c: usize| v["imag"][r][c].as_f64().unwrap();
    for (k, want) in [0.25, 0.25, 0.5, 0.0].iter().enumerate() {
        assert!((re(k, k) - want).abs() < 1e-10);
    }
    for r in 0..2 {
        for c in 2..4 {
            assert!(re(r, c).abs() <= 1e-10 && im(r, c).abs() <= 1e-10);
            assert!(re(c, r).abs() <= 1e-10 && im(c, r).abs() <= 1e-10);
        }
    }
    let trace: f64 = (0..4).map(|k| re(k, k)).sum();
    assert!((trace - 1.0).abs() < 1e-9);
    assert!(std::fs::read_to_string(dir.path().join("tomo.svg"))
        .unwrap()
        .contains("<polygon"));
}

#[test]
fn tomo_particle_block() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "tomo",
        "--alpha",
        "0",
        "--theta",
        "pi/3",
        "--level",
        "pulse",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("tomo.json")).unwrap())
            .unwrap();
    let t = PI / 3.0;
    // |particle⟩⟨particle| = ½[[1, e^{−iθ}], [e^{iθ}, 1]]
    assert!((v["real"][0][1].as_f64().unwrap() - t.cos() / 2.0).abs() < 1e-10);
    assert!((v["imag"][0][1].as_f64().unwrap() + t.sin() / 2.0).abs() < 1e-10);
    assert!((v["imag"][1][0].as_f64().unwrap() - t.sin() / 2.0).abs() < 1e-10);
    assert!((v["real"][1][1].as_f64().unwrap() - 0.5).abs() < 1e-10);
}

#[test]
fn tomo_bad_flags_exit_2() {
    assert_eq!(run(&["tomo", "--alpha", "pi/x"]).status.code(), Some(2));
    assert_eq!(run(&["tomo", "--theta", "7"]).status.code(), Some(2));
    assert_eq!(run(&["tomo", "--noise", "-1"]).status.code(), Some(2));
}

#[test]
fn show_state_formats() {
    let o = run(&["show-state", "--alpha", "pi", "--theta", "0"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("|10⟩    1.000000"), "{text}");

    let o = run(&[
        "show-state",
        "--format",
        "csv",
        "--alpha",
        "pi/2",
        "--theta",
        "0",
    ]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("row,col,re,im"));
    assert_eq!(text.lines().count(), 17);

    let o = run(&["show-state", "--format", "json", "--epsilon", "0.001"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    // ρ = I/4 + ε(Δρ − I/4) at α = π/2, θ = 0: diag Δρ = (¼, ¼, ½, 0)
    let diag = v["full_density_diagonal"].as_array().unwrap();
    assert!((diag[2].as_f64().unwrap() - (0.25 + 0.001 * 0.25)).abs() < 1e-15);
}

#[test]
fn global_flags_are_validated() {
    assert_eq!(
        run(&["show-state", "--j-coupling", "-3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["show-state", "--epsilon", "0.5"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}
