//! The `qdchoice` command-line tool.
//!
//! [`run`] is the whole program: it parses arguments, merges an optional
//! TOML config (flags win), executes one subcommand, and returns the exit
//! code — 0 on success, 1 on a domain failure, 2 on a usage or parse error.

pub mod angle;
pub mod svg;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::channels::{DephaseSpec, DEFAULT_GRADIENT_SAMPLES};
use crate::error::Error;
use crate::experiment::{
    add_detection_noise, detection_probability, expected_dephased_deviation, fit_fringes,
    ideal_final_state, run_circuit, run_sweep, DelayedChoiceConfig, Level,
};
use crate::numcore::{gates, ComplexMatrix};
use crate::pulselang::{parse_sequence, verify_sequence, GateName};
use crate::spinmodel::{full_density, SpinSystem, DEFAULT_EPSILON, DEFAULT_J_HZ};
use crate::tomo::{measure_expectations, perturb, reconstruct};

const ANGLE_HELP: &str = "\
Angles take radians or pi-expressions: [-][k][*]pi[/d], e.g. pi, pi/2, 3pi/4, 2*pi/3, 0.25.
A --thetas value that is a bare integer N means N points from 0 to 2pi inclusive.

Exit codes: 0 success, 1 domain failure, 2 usage or parse error.";

const DEFAULT_ALPHAS: &str = "0,pi/4,pi/2,3pi/4,pi";
const DEFAULT_THETAS: &str = "17";
const DEFAULT_VERIFY_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "qdchoice", version, about = "Quantum delayed-choice simulator for a two-spin NMR processor", after_help = ANGLE_HELP)]
struct Cli {
    /// Scalar J coupling in Hz [default: 215.1]
    #[arg(long, global = true, value_name = "HZ")]
    j_coupling: Option<f64>,
    /// Pseudo-pure polarization ε [default: 1e-5]
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Seed for noise injection [default: 0]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for files [default: .]
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Table format for sweeps; json also switches stdout reports to JSON
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// TOML file mirroring these flags; flags win on conflict
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum DephaseArg {
    Ideal,
    Gradient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum LevelArg {
    Gate,
    Pulse,
}

impl From<LevelArg> for Level {
    fn from(l: LevelArg) -> Self {
        match l {
            LevelArg::Gate => Level::Gate,
            LevelArg::Pulse => Level::Pulse,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep (α, θ), fit fringes, write CSV/JSON, fits and an SVG plot
    Sweep(SweepArgs),
    /// Check a pulse file against a target gate up to global phase
    Verify(VerifyArgs),
    /// Reconstruct the final deviation matrix and render a tomogram
    Tomo(TomoArgs),
    /// Print the pre-measurement state and the dephased deviation matrix
    ShowState(ShowStateArgs),
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// Gate matrices or compiled pulse sequences [default: gate]
    #[arg(long, value_enum)]
    level: Option<LevelArg>,
    /// Ideal ancilla dephasing or the gradient emulation [default: ideal]
    #[arg(long, value_enum)]
    dephase: Option<DephaseArg>,
    /// Gradient phase samples [default: 8]
    #[arg(long)]
    samples: Option<usize>,
    /// Omit the π_x refocusing pulse between the gradients
    #[arg(long)]
    no_refocus: bool,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Comma-separated α values [default: 0,pi/4,pi/2,3pi/4,pi]
    #[arg(long, allow_hyphen_values = true)]
    alphas: Option<String>,
    /// Point count over [0, 2pi] or comma-separated θ values [default: 17]
    #[arg(long, allow_hyphen_values = true)]
    thetas: Option<String>,
    #[command(flatten)]
    exp: ExperimentArgs,
    /// Gaussian noise σ added to each p [default: 0]
    #[arg(long)]
    noise: Option<f64>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Pulse file
    file: PathBuf,
    /// identity, cnot, cnot-ideal, ch, pseudo-h or pi-x-s
    #[arg(long)]
    target: Option<String>,
    /// Pass threshold on the global-phase distance [default: 1e-9]
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
struct TomoArgs {
    /// Ancilla preparation angle [default: pi/2]
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Interferometer phase [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    #[command(flatten)]
    exp: ExperimentArgs,
    /// Gaussian noise σ added to each Pauli expectation [default: 0]
    #[arg(long)]
    noise: Option<f64>,
}

#[derive(Debug, Args)]
struct ShowStateArgs {
    /// Ancilla preparation angle [default: pi/2]
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Interferometer phase [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
}

// ---- config file ----

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Scalar {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Scalar {
    fn as_text(&self) -> String {
        match self {
            Scalar::Int(i) => i.to_string(),
            Scalar::Float(f) => f.to_string(),
            Scalar::Text(s) => s.clone(),
        }
    }
}

// Shared by the sweep and tomo tables.
#[derive(Debug, Default)]
struct ExperimentFile {
    level: Option<LevelArg>,
    dephase: Option<DephaseArg>,
    samples: Option<usize>,
    refocus: Option<bool>,
}

macro_rules! experiment_file {
    ($t:ty) => {
        impl $t {
            fn exp(&self) -> ExperimentFile {
                ExperimentFile {
                    level: self.level,
                    dephase: self.dephase,
                    samples: self.samples,
                    refocus: self.refocus,
                }
            }
        }
    };
}
experiment_file!(SweepFile);
experiment_file!(TomoFile);

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    alphas: Option<Scalar>,
    thetas: Option<Scalar>,
    noise: Option<f64>,
    level: Option<LevelArg>,
    dephase: Option<DephaseArg>,
    samples: Option<usize>,
    refocus: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct VerifyFile {
    target: Option<String>,
    tol: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TomoFile {
    alpha: Option<Scalar>,
    theta: Option<Scalar>,
    noise: Option<f64>,
    level: Option<LevelArg>,
    dephase: Option<DephaseArg>,
    samples: Option<usize>,
    refocus: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShowStateFile {
    alpha: Option<Scalar>,
    theta: Option<Scalar>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    j_coupling: Option<f64>,
    epsilon: Option<f64>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<Format>,
    #[serde(default)]
    sweep: SweepFile,
    #[serde(default)]
    verify: VerifyFile,
    #[serde(default)]
    tomo: TomoFile,
    #[serde(default, rename = "show-state")]
    show_state: ShowStateFile,
}

// ---- failures ----

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Usage(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Domain(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::InvalidParameter(_) => Failure::Usage(e.to_string()),
            other => Failure::Domain(other.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Domain(format!("{}: {e}", path.display()))
}

// ---- resolved settings ----

#[derive(Debug, Serialize)]
struct Globals {
    j_coupling: f64,
    epsilon: f64,
    seed: u64,
    out: PathBuf,
    format: Option<Format>,
}

impl Globals {
    fn system(&self) -> Result<SpinSystem, Failure> {
        SpinSystem::new(self.j_coupling, self.epsilon).map_err(Failure::from)
    }
}

#[derive(Debug, Serialize)]
struct ExperimentSettings {
    level: Level,
    dephase: DephaseSpec,
}

fn resolve_experiment(
    flags: &ExperimentArgs,
    file: &ExperimentFile,
) -> Result<ExperimentSettings, Failure> {
    let level = flags.level.or(file.level).unwrap_or(LevelArg::Gate).into();
    let samples = flags.samples.or(file.samples);
    let refocus = !flags.no_refocus && file.refocus.unwrap_or(true);
    let dephase = match flags.dephase.or(file.dephase).unwrap_or(DephaseArg::Ideal) {
        DephaseArg::Ideal => {
            if samples.is_some() {
                return Err(Failure::Usage(
                    "--samples requires --dephase gradient".into(),
                ));
            }
            DephaseSpec::ideal()
        }
        DephaseArg::Gradient => DephaseSpec::gradient(samples.unwrap_or(DEFAULT_GRADIENT_SAMPLES))?,
    }
    .with_refocus(refocus);
    Ok(ExperimentSettings { level, dephase })
}

fn angle_arg(
    flag: &Option<String>,
    file: &Option<Scalar>,
    default: &str,
    name: &str,
) -> Result<f64, Failure> {
    let text = flag
        .clone()
        .or_else(|| file.as_ref().map(Scalar::as_text))
        .unwrap_or_else(|| default.to_string());
    angle::parse_angle(&text).map_err(|e| Failure::Usage(format!("--{name}: {e}")))
}

fn checked_noise(sigma: Option<f64>) -> Result<f64, Failure> {
    let sigma = sigma.unwrap_or(0.0);
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Failure::Usage(format!(
            "--noise must be a non-negative number, got {sigma}"
        )));
    }
    Ok(sigma)
}

/// Named unitaries accepted by `verify --target`.
pub fn target_unitary(name: &str) -> Option<ComplexMatrix> {
    let u = match name.to_ascii_lowercase().as_str() {
        "identity" | "id" => gates::identity(),
        // the equivalence class the compiled CNOT lands in
        "cnot" | "cnot-as" => GateName::CnotAs.pulse_class_unitary(),
        "cnot-ideal" => GateName::CnotAs.ideal_unitary(),
        "ch" | "ch-as" => GateName::ChAs.ideal_unitary(),
        "pseudo-h" => GateName::PseudoHS.ideal_unitary(),
        "pi-x-s" => GateName::PiXS.ideal_unitary(),
        _ => return None,
    };
    Some(u)
}

pub const TARGET_NAMES: [&str; 6] = ["identity", "cnot", "cnot-ideal", "ch", "pseudo-h", "pi-x-s"];

// ---- output helpers ----

#[derive(Serialize)]
struct Manifest<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    created: String,
    globals: &'a Globals,
    settings: &'a T,
    files: Vec<String>,
}

fn write_outputs<T: Serialize>(
    g: &Globals,
    command: &'static str,
    settings: &T,
    files: Vec<(String, String)>,
) -> Result<(), Failure> {
    fs::create_dir_all(&g.out).map_err(|e| io_failure(&g.out, e))?;
    let manifest = Manifest {
        tool: "qdchoice",
        version: env!("CARGO_PKG_VERSION"),
        command,
        created: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        globals: g,
        settings,
        files: files.iter().map(|(n, _)| n.clone()).collect(),
    };
    let manifest = to_json(&manifest)?;
    for (name, body) in files
        .iter()
        .chain([("manifest.json".to_string(), manifest)].iter())
    {
        let path = g.out.join(name);
        fs::write(&path, body).map_err(|e| io_failure(&path, e))?;
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(v)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Failure::Domain(e.to_string()))
}

fn real_imag(m: &ComplexMatrix) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n = m.dim();
    let re = (0..n)
        .map(|r| (0..n).map(|c| m.get(r, c).re).collect())
        .collect();
    let im = (0..n)
        .map(|r| (0..n).map(|c| m.get(r, c).im).collect())
        .collect();
    (re, im)
}

/// Rounding noise below display precision prints as a plain zero, not `-0.000000`.
fn clean_zero(v: f64) -> f64 {
    if v.abs() < 5e-7 {
        0.0
    } else {
        v
    }
}

fn matrix_table(m: &ComplexMatrix, part: fn(num_complex::Complex64) -> f64) -> String {
    let labels = ["00", "01", "10", "11"];
    let mut s = String::from("         |00⟩       |01⟩       |10⟩       |11⟩\n");
    for (r, label) in labels.iter().enumerate() {
        s.push_str(&format!("⟨{label}|"));
        for col in 0..4 {
            let v = clean_zero(part(m.get(r, col)));
            s.push_str(&format!(" {v:>10.6}"));
        }
        s.push('\n');
    }
    s
}

// ---- commands ----

fn cmd_sweep(
    g: &Globals,
    args: &SweepArgs,
    file: &SweepFile,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let alphas_text = args
        .alphas
        .clone()
        .or_else(|| file.alphas.as_ref().map(Scalar::as_text))
        .unwrap_or_else(|| DEFAULT_ALPHAS.into());
    let thetas_text = args
        .thetas
        .clone()
        .or_else(|| file.thetas.as_ref().map(Scalar::as_text))
        .unwrap_or_else(|| DEFAULT_THETAS.into());
    let alphas = angle::parse_angle_list(&alphas_text)
        .map_err(|e| Failure::Usage(format!("--alphas: {e}")))?;
    let thetas = angle::parse_theta_grid(&thetas_text)
        .map_err(|e| Failure::Usage(format!("--thetas: {e}")))?;
    let exp = resolve_experiment(&args.exp, &file.exp())?;
    let noise = checked_noise(args.noise.or(file.noise))?;
    let sys = g.system()?;

    let mut records = run_sweep(&alphas, &thetas, exp.level, exp.dephase, &sys)?;
    add_detection_noise(&mut records, noise, g.seed)?;
    let fits = fit_fringes(&records)?;

    let format = g.format.unwrap_or(Format::Csv);
    let table = match format {
        Format::Csv => {
            let mut csv = String::from("alpha_rad,theta_rad,level,p\n");
            for r in &records {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    r.alpha,
                    r.theta,
                    r.level.as_str(),
                    r.p
                ));
            }
            ("sweep.csv".to_string(), csv)
        }
        Format::Json => ("sweep.json".to_string(), to_json(&records)?),
    };
    let files = vec![
        table,
        ("fits.json".to_string(), to_json(&fits)?),
        ("fringes.svg".to_string(), svg::fringe_plot(&records, &fits)),
    ];

    #[derive(Serialize)]
    struct Settings<'a> {
        alphas: &'a [f64],
        thetas: &'a [f64],
        #[serde(flatten)]
        exp: &'a ExperimentSettings,
        noise: f64,
    }
    let settings = Settings {
        alphas: &alphas,
        thetas: &thetas,
        exp: &exp,
        noise,
    };
    write_outputs(g, "sweep", &settings, files)?;

    let _ = writeln!(
        out,
        "{} points ({} alpha x {} theta), level {}, written to {}",
        records.len(),
        alphas.len(),
        thetas.len(),
        exp.level.as_str(),
        g.out.display()
    );
    let _ = writeln!(
        out,
        "{:>10} {:>12} {:>12} {:>12} {:>10}",
        "alpha", "amplitude", "expected", "offset", "rms"
    );
    for f in &fits {
        let _ = writeln!(
            out,
            "{:>10.6} {:>12.9} {:>12.9} {:>12.9} {:>10.2e}",
            f.alpha, f.fit.amplitude, f.expected_amplitude, f.fit.offset, f.fit.rms_residual
        );
    }
    Ok(())
}

fn cmd_verify(
    g: &Globals,
    args: &VerifyArgs,
    file: &VerifyFile,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let target_name = args
        .target
        .clone()
        .or_else(|| file.target.clone())
        .ok_or_else(|| {
            Failure::Usage(format!(
                "--target is required (one of: {})",
                TARGET_NAMES.join(", ")
            ))
        })?;
    let target = target_unitary(&target_name).ok_or_else(|| {
        Failure::Usage(format!(
            "unknown target '{target_name}' (expected one of: {})",
            TARGET_NAMES.join(", ")
        ))
    })?;
    let tol = args.tol.or(file.tol).unwrap_or(DEFAULT_VERIFY_TOL);
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Failure::Usage(format!(
            "--tol must be a non-negative number, got {tol}"
        )));
    }
    let text = fs::read_to_string(&args.file)
        .map_err(|e| Failure::Usage(format!("{}: {e}", args.file.display())))?;
    let name = args
        .file
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let seq = parse_sequence(&text)
        .map_err(|e| Failure::Usage(format!("{}: {e}", args.file.display())))?
        .with_name(name);
    let sys = g.system()?;
    let report = verify_sequence(&seq, &target, &sys, tol)?;

    if g.format == Some(Format::Json) {
        #[derive(Serialize)]
        struct Out<'a> {
            target: &'a str,
            duration_s: f64,
            #[serde(flatten)]
            report: &'a crate::pulselang::VerificationReport,
        }
        let body = to_json(&Out {
            target: &target_name,
            duration_s: seq.duration(&sys),
            report: &report,
        })?;
        let _ = out.write_all(body.as_bytes());
    } else {
        let _ = writeln!(out, "target: {target_name}");
        let _ = writeln!(out, "duration: {:.6} ms", seq.duration(&sys) * 1e3);
        let _ = write!(out, "{report}");
    }
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Domain(format!(
            "verification failed: gp_distance {:.3e} > tol {:.1e}",
            report.gp_distance, tol
        )))
    }
}

fn cmd_tomo(
    g: &Globals,
    args: &TomoArgs,
    file: &TomoFile,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let alpha = angle_arg(&args.alpha, &file.alpha, "pi/2", "alpha")?;
    let theta = angle_arg(&args.theta, &file.theta, "0", "theta")?;
    let exp = resolve_experiment(&args.exp, &file.exp())?;
    let noise = checked_noise(args.noise.or(file.noise))?;
    let sys = g.system()?;

    let cfg = DelayedChoiceConfig::new(alpha, theta, exp.level, exp.dephase)?;
    let state = run_circuit(&cfg, &sys)?;
    let expectations = perturb(&measure_expectations(&state)?, noise, g.seed)?;
    let rec = reconstruct(&expectations)?;
    let (real, imag) = real_imag(rec.matrix());

    #[derive(Serialize)]
    struct TomoOut<'a> {
        alpha: f64,
        theta: f64,
        normalization: crate::spinmodel::Normalization,
        trace: f64,
        min_eigenvalue: f64,
        detection_probability: f64,
        real: Vec<Vec<f64>>,
        imag: Vec<Vec<f64>>,
        expectations: &'a crate::tomo::PauliExpectations,
    }
    let body = TomoOut {
        alpha,
        theta,
        normalization: rec.normalization(),
        trace: rec.trace(),
        min_eigenvalue: rec.min_eigenvalue(),
        detection_probability: rec.matrix().get(2, 2).re,
        real,
        imag,
        expectations: &expectations,
    };
    let json = to_json(&body)?;
    let title = format!("Re Δρ  (α = {alpha:.4}, θ = {theta:.4})");
    let files = vec![
        ("tomo.json".to_string(), json.clone()),
        ("tomo.svg".to_string(), svg::tomogram(rec.matrix(), &title)),
    ];
    #[derive(Serialize)]
    struct Settings<'a> {
        alpha: f64,
        theta: f64,
        #[serde(flatten)]
        exp: &'a ExperimentSettings,
        noise: f64,
    }
    write_outputs(
        g,
        "tomo",
        &Settings {
            alpha,
            theta,
            exp: &exp,
            noise,
        },
        files,
    )?;

    if g.format == Some(Format::Json) {
        let _ = out.write_all(json.as_bytes());
    } else {
        let _ = writeln!(
            out,
            "alpha = {alpha}, theta = {theta}, level {}",
            exp.level.as_str()
        );
        let _ = writeln!(out, "Re Δρ:");
        let _ = write!(out, "{}", matrix_table(rec.matrix(), |z| z.re));
        let _ = writeln!(out, "Im Δρ:");
        let _ = write!(out, "{}", matrix_table(rec.matrix(), |z| z.im));
        let _ = writeln!(
            out,
            "trace {:.12}, min eigenvalue {:.3e}",
            rec.trace(),
            rec.min_eigenvalue()
        );
    }
    Ok(())
}

fn cmd_show_state(
    g: &Globals,
    args: &ShowStateArgs,
    file: &ShowStateFile,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let alpha = angle_arg(&args.alpha, &file.alpha, "pi/2", "alpha")?;
    let theta = angle_arg(&args.theta, &file.theta, "0", "theta")?;
    DelayedChoiceConfig::gate(alpha, theta)?;
    let sys = g.system()?;
    let ket = ideal_final_state(alpha, theta);
    let d = expected_dephased_deviation(alpha, theta);
    let rho = full_density(&sys, &d)?;
    let p = detection_probability(&d)?;

    match g.format {
        Some(Format::Json) => {
            let (real, imag) = real_imag(d.matrix());
            #[derive(Serialize)]
            struct KetOut {
                real: Vec<f64>,
                imag: Vec<f64>,
            }
            #[derive(Serialize)]
            struct Out {
                alpha: f64,
                theta: f64,
                state: KetOut,
                deviation: [Vec<Vec<f64>>; 2],
                full_density_diagonal: Vec<f64>,
                detection_probability: f64,
            }
            let body = Out {
                alpha,
                theta,
                state: KetOut {
                    real: ket.0.iter().map(|z| z.re).collect(),
                    imag: ket.0.iter().map(|z| z.im).collect(),
                },
                deviation: [real, imag],
                full_density_diagonal: (0..4).map(|k| rho.get(k, k).re).collect(),
                detection_probability: p,
            };
            let _ = out.write_all(to_json(&body)?.as_bytes());
        }
        Some(Format::Csv) => {
            let _ = writeln!(out, "row,col,re,im");
            for r in 0..4 {
                for col in 0..4 {
                    let z = d.matrix().get(r, col);
                    let _ = writeln!(out, "{r},{col},{},{}", z.re, z.im);
                }
            }
        }
        None => {
            let _ = writeln!(out, "alpha = {alpha}, theta = {theta}");
            let _ = writeln!(out, "state before the ancilla measurement (|a s⟩):");
            for (k, z) in ket.0.iter().enumerate() {
                let (re, im) = (clean_zero(z.re), clean_zero(z.im));
                let _ = writeln!(out, "  |{}{}⟩  {re:>10.6} {im:+.6}i", k / 2, k % 2);
            }
            let _ = writeln!(out, "deviation matrix after the measurement, real part:");
            let _ = write!(out, "{}", matrix_table(d.matrix(), |z| z.re));
            let _ = writeln!(out, "imaginary part:");
            let _ = write!(out, "{}", matrix_table(d.matrix(), |z| z.im));
            let _ = writeln!(out, "Tr(Δρ |10⟩⟨10|) = {p:.12}");
            let diag: Vec<String> = (0..4).map(|k| format!("{:.9}", rho.get(k, k).re)).collect();
            let _ = writeln!(
                out,
                "full density diagonal (ε = {}): {}",
                sys.epsilon(),
                diag.join(" ")
            );
        }
    }
    Ok(())
}

fn load_config(path: Option<&Path>) -> Result<FileConfig, Failure> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let file = load_config(cli.config.as_deref())?;
    let g = Globals {
        j_coupling: cli.j_coupling.or(file.j_coupling).unwrap_or(DEFAULT_J_HZ),
        epsilon: cli.epsilon.or(file.epsilon).unwrap_or(DEFAULT_EPSILON),
        seed: cli.seed.or(file.seed).unwrap_or(0),
        out: cli.out.or(file.out).unwrap_or_else(|| PathBuf::from(".")),
        format: cli.format.or(file.format),
    };
    match &cli.command {
        Command::Sweep(a) => cmd_sweep(&g, a, &file.sweep, out),
        Command::Verify(a) => cmd_verify(&g, a, &file.verify, out),
        Command::Tomo(a) => cmd_tomo(&g, a, &file.tomo, out),
        Command::ShowState(a) => cmd_show_state(&g, a, &file.show_state, out),
    }
}

/// Runs the tool on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}
