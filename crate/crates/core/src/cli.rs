//! Command-line front end: config ingestion, scan execution, property
//! suite runners, and CSV/JSON emission.
//!
//! Exit codes are a stable contract:
//!   0 success, 1 no-signaling violation found, 2 bad config or usage,
//!   3 numerical-integrity error, 4 framework violation (a map probed
//!   linear yet flagged signaling).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interferometer::{
    angle_grid, full_space, probe_map_preset, scan, InterferometerParams, ScanResult,
};
use crate::maps::{random_kraus_channel, sub_rng, HmMap, KrausChannel, QuantumMap, Split};
use crate::signaling::{classify, reduced_deviation, MapClassification};
use crate::{linalg::ComplexMatrix, maps::lift_local};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_FRAMEWORK: i32 = 4;

/// Maps an error to the exit-code contract.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::NumericalIntegrity(_) => EXIT_NUMERICAL,
        Error::FrameworkViolation(_) => EXIT_FRAMEWORK,
        _ => EXIT_USAGE,
    }
}

/// Nested arrays of [re, im] pairs, row-major.
pub type MatrixData = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_data(m: &ComplexMatrix) -> MatrixData {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn data_to_matrix(data: &MatrixData) -> Result<ComplexMatrix> {
    let rows = data.len();
    if rows == 0 {
        return Err(Error::InvalidArgument("matrix has no rows".into()));
    }
    let cols = data[0].len();
    if cols == 0 || data.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidArgument(
            "matrix rows must be nonempty and of equal length".into(),
        ));
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| {
        Complex64::new(data[i][j][0], data[i][j][1])
    }))
}

/// On-disk map description: {"kind": "kraus"|"hm", "dim": n,
/// "operators"/"T": nested arrays of [re, im] pairs}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapFile {
    pub kind: String,
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub operators: Option<Vec<MatrixData>>,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub t: Option<MatrixData>,
}

impl MapFile {
    pub fn from_map(map: &QuantumMap) -> Result<Self> {
        match map {
            QuantumMap::Identity { dim } => Ok(Self {
                kind: "kraus".into(),
                dim: *dim,
                operators: Some(vec![matrix_to_data(&ComplexMatrix::identity(*dim, *dim))]),
                t: None,
            }),
            QuantumMap::Kraus(ch) => Ok(Self {
                kind: "kraus".into(),
                dim: ch.dim(),
                operators: Some(ch.operators().iter().map(matrix_to_data).collect()),
                t: None,
            }),
            QuantumMap::Hm(m) => Ok(Self {
                kind: "hm".into(),
                dim: m.dim(),
                operators: None,
                t: Some(matrix_to_data(m.transform())),
            }),
            QuantumMap::General { .. } => Err(Error::InvalidArgument(
                "black-box maps have no file representation".into(),
            )),
        }
    }

    pub fn into_map(self) -> Result<QuantumMap> {
        match self.kind.as_str() {
            "kraus" => {
                let data = self.operators.ok_or_else(|| {
                    Error::InvalidArgument("kraus map file needs an \"operators\" field".into())
                })?;
                let ops = data
                    .iter()
                    .map(data_to_matrix)
                    .collect::<Result<Vec<_>>>()?;
                if ops.iter().any(|op| op.nrows() != self.dim) {
                    return Err(Error::DimensionMismatch {
                        expected: self.dim,
                        got: ops[0].nrows(),
                    });
                }
                Ok(QuantumMap::Kraus(KrausChannel::new(ops)?))
            }
            "hm" => {
                let data = self
                    .t
                    .ok_or_else(|| Error::InvalidArgument("hm map file needs a \"T\" field".into()))?;
                let t = data_to_matrix(&data)?;
                if t.nrows() != self.dim {
                    return Err(Error::DimensionMismatch {
                        expected: self.dim,
                        got: t.nrows(),
                    });
                }
                Ok(QuantumMap::Hm(HmMap::new(t)?))
            }
            other => Err(Error::InvalidArgument(format!("unknown map kind {other:?}"))),
        }
    }
}

pub fn load_map_file(path: &Path) -> Result<QuantumMap> {
    let text = fs::read_to_string(path)?;
    let file: MapFile = serde_json::from_str(&text)?;
    file.into_map()
}

pub fn write_map_file(path: &Path, map: &QuantumMap) -> Result<()> {
    let file = MapFile::from_map(map)?;
    atomic_write(path, serde_json::to_string_pretty(&file)?.as_bytes())
}

/// Resolves a named preset ("identity", "hm-eq12", "kraus:<file>") or a
/// map-description file path.
pub fn parse_map_spec(spec: &str) -> Result<QuantumMap> {
    match spec {
        "identity" => Ok(QuantumMap::Identity { dim: 3 }),
        "hm-eq12" => Ok(QuantumMap::Hm(probe_map_preset())),
        other => {
            if let Some(path) = other.strip_prefix("kraus:") {
                let map = load_map_file(Path::new(path))?;
                if !matches!(map, QuantumMap::Kraus(_)) {
                    return Err(Error::InvalidArgument(format!(
                        "{path} does not describe a kraus map"
                    )));
                }
                Ok(map)
            } else {
                load_map_file(Path::new(other))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

fn default_complex() -> [f64; 2] {
    [0.1, 0.0]
}
fn default_steps() -> usize {
    8
}
fn default_format() -> OutputFormat {
    OutputFormat::Csv
}
fn default_map_spec() -> String {
    "identity".into()
}

/// Scan configuration; every field has a default and command-line flags
/// override file values.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default = "default_complex")]
    pub v: [f64; 2],
    #[serde(default = "default_complex")]
    pub f1: [f64; 2],
    #[serde(default = "default_complex")]
    pub f2: [f64; 2],
    #[serde(default = "default_steps")]
    pub phi_steps: usize,
    #[serde(default = "default_steps")]
    pub theta_steps: usize,
    #[serde(default = "default_map_spec")]
    pub map: String,
    #[serde(default)]
    pub seed: u64,
    /// Output file path; "-" or absent means standard output.
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default = "default_format")]
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            v: default_complex(),
            f1: default_complex(),
            f2: default_complex(),
            phi_steps: default_steps(),
            theta_steps: default_steps(),
            map: default_map_spec(),
            seed: 0,
            out: None,
            format: default_format(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    fn validate(&self) -> Result<()> {
        if self.phi_steps == 0 || self.theta_steps == 0 {
            return Err(Error::InvalidArgument("step counts must be >= 1".into()));
        }
        Ok(())
    }
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp = match dir {
        Some(d) => d.join(format!(
            ".{}.tmp",
            path.file_name().unwrap_or_default().to_string_lossy()
        )),
        None => PathBuf::from(format!(
            ".{}.tmp",
            path.file_name().unwrap_or_default().to_string_lossy()
        )),
    };
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn emit(out: Option<&str>, bytes: &[u8]) -> Result<()> {
    match out {
        None | Some("-") => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
        Some(path) => atomic_write(Path::new(path), bytes),
    }
}

/// CSV with header `phi,theta,p_A,p_B,signal`; values printed with Rust's
/// shortest round-trip float formatting, so they re-parse bit-exactly.
pub fn scan_to_csv(result: &ScanResult) -> String {
    let mut s = String::from("phi,theta,p_A,p_B,signal\n");
    for row in &result.rows {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            row.phi, row.theta, row.p_a, row.p_b, row.signal
        ));
    }
    s
}

pub fn scan_to_json(result: &ScanResult) -> serde_json::Value {
    serde_json::json!({
        "metadata": {
            "v": [result.v.re, result.v.im],
            "f1": [result.f1.re, result.f1.im],
            "f2": [result.f2.re, result.f2.im],
            "map": result.map_description,
            "phi_points": result.phi_points,
            "theta_points": result.theta_points,
        },
        "rows": result.rows.iter().map(|r| serde_json::json!({
            "phi": r.phi, "theta": r.theta,
            "p_A": r.p_a, "p_B": r.p_b, "signal": r.signal,
        })).collect::<Vec<_>>(),
    })
}

/// Runs a (phi, theta) scan per the config and emits it.
pub fn cmd_scan(config: &RunConfig) -> Result<()> {
    config.validate()?;
    let base = InterferometerParams::from_theta(
        Complex64::new(config.v[0], config.v[1]),
        Complex64::new(config.f1[0], config.f1[1]),
        Complex64::new(config.f2[0], config.f2[1]),
        0.0,
        0.0,
    );
    if let Some(warning) = base.regime_warning() {
        eprintln!("warning: truncation regime strained: {warning}");
    }
    let map = parse_map_spec(&config.map)?;
    let result = scan(
        &base,
        &angle_grid(config.phi_steps),
        &angle_grid(config.theta_steps),
        &map,
    )?;
    let bytes = match config.format {
        OutputFormat::Csv => scan_to_csv(&result).into_bytes(),
        OutputFormat::Json => serde_json::to_string_pretty(&scan_to_json(&result))?.into_bytes(),
    };
    emit(config.out.as_deref(), &bytes)
}

/// JSON report of the randomized no-signaling suite.
#[derive(Clone, Debug, Serialize)]
pub struct NoSignalReport {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_deviation: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_channel: Option<MapFile>,
}

/// Draws random probe-side channels and checks that the laboratory reduced
/// state never moves, over both random bipartite states and the structured
/// output-state family. Returns the report; `pass` is false when any
/// deviation exceeds tol.
pub fn verify_nosignal(samples: usize, seed: u64, tol: f64) -> Result<NoSignalReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be >= 1".into()));
    }
    let space = full_space();
    let mut max_dev: f64 = 0.0;
    let mut worst: Option<QuantumMap> = None;

    // A small structured family alongside the random states.
    let grid: Vec<_> = [(0.0, 0.0), (1.1, 0.6), (2.3, 1.9), (4.0, 2.7)]
        .iter()
        .map(|&(phi, theta)| {
            crate::interferometer::build_output_state(&InterferometerParams::real(
                0.1, 0.1, 0.1, phi, theta,
            ))
            .expect("canonical params")
            .to_density()
        })
        .collect();

    for i in 0..samples {
        let mut rng = sub_rng(seed, i as u64);
        let ch = QuantumMap::Kraus(random_kraus_channel(3, &mut rng));
        let lifted = lift_local(&ch, &space, 2)?;
        let state = if i % 2 == 0 {
            crate::maps::random_pure(space.clone(), &mut rng).to_density()
        } else {
            crate::maps::random_density(space.clone(), &mut rng)
        };
        let mut dev = reduced_deviation(&lifted, &state, &[0, 1])?;
        dev = dev.max(reduced_deviation(&lifted, &grid[i % grid.len()], &[0, 1])?);
        if dev > max_dev {
            max_dev = dev;
            worst = Some(ch);
        }
    }

    let pass = max_dev < tol;
    Ok(NoSignalReport {
        samples,
        seed,
        tol,
        max_deviation: max_dev,
        pass,
        worst_channel: if pass {
            None
        } else {
            worst.as_ref().map(MapFile::from_map).transpose()?
        },
    })
}

pub fn cmd_verify_nosignal(
    samples: usize,
    seed: u64,
    tol: f64,
    out: Option<&str>,
) -> Result<NoSignalReport> {
    let report = verify_nosignal(samples, seed, tol)?;
    let bytes = serde_json::to_string_pretty(&report)?.into_bytes();
    emit(out, &bytes)?;
    Ok(report)
}

/// Classifies a map file or preset over the interferometer bipartition.
pub fn cmd_classify(
    map_spec: &str,
    samples: usize,
    seed: u64,
    out: Option<&str>,
) -> Result<MapClassification> {
    let map = parse_map_spec(map_spec)?;
    let space = full_space();
    let split = Split::at(&space, 2)?;
    let cls = classify(
        &map,
        &space,
        &split,
        samples,
        crate::signaling::TOL_SIGNALING,
        seed,
    )?;
    let bytes = serde_json::to_string_pretty(&cls)?.into_bytes();
    emit(out, &bytes)?;
    Ok(cls)
}

/// Emits the linear and nonlinear-probe signal surfaces side by side on a
/// 64x64 grid at V = 0.1, f1 = f2 = 0.1, ready for external plotting.
pub fn cmd_demo(out_dir: &Path) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(out_dir)?;
    let base = InterferometerParams::real(0.1, 0.1, 0.1, 0.0, 0.0);
    let phi = angle_grid(64);
    let theta = angle_grid(64);

    let linear = scan(&base, &phi, &theta, &QuantumMap::Identity { dim: 3 })?;
    let nonlinear = scan(&base, &phi, &theta, &QuantumMap::Hm(probe_map_preset()))?;

    let linear_path = out_dir.join("demo_linear.csv");
    let hm_path = out_dir.join("demo_hm.csv");
    atomic_write(&linear_path, scan_to_csv(&linear).as_bytes())?;
    atomic_write(&hm_path, scan_to_csv(&nonlinear).as_bytes())?;
    Ok((linear_path, hm_path))
}

#[derive(Parser, Debug)]
#[command(
    name = "qcausality",
    about = "Interferometric tests for signaling (non-causal) quantum maps",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a (phi, theta) interference scan and emit CSV or JSON.
    Scan {
        /// JSON config file; flags override its values.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        phi_steps: Option<usize>,
        #[arg(long)]
        theta_steps: Option<usize>,
        /// Map preset (identity, hm-eq12, kraus:<file>) or map file path.
        #[arg(long)]
        map: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output path; "-" for standard output.
        #[arg(long)]
        out: Option<String>,
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
    },
    /// Randomized check that linear probe-side channels never move the
    /// laboratory reduced state.
    VerifyNosignal {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Classify a map as linear, nonlinear-nonsignaling, or signaling.
    Classify {
        /// Map preset or map file path.
        #[arg(long)]
        map: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Emit the linear and nonlinear-probe demo surfaces (64x64 CSVs).
    Demo {
        /// Directory for demo_linear.csv and demo_hm.csv.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

/// Executes a parsed command line; diagnostics go to standard error and
/// the return value is the process exit code.
pub fn run(cli: Cli) -> i32 {
    let outcome: Result<i32> = (|| match cli.command {
        Command::Scan {
            config,
            phi_steps,
            theta_steps,
            map,
            seed,
            out,
            format,
        } => {
            let mut cfg = match config {
                Some(path) => RunConfig::load(&path)?,
                None => RunConfig::default(),
            };
            if let Some(n) = phi_steps {
                cfg.phi_steps = n;
            }
            if let Some(n) = theta_steps {
                cfg.theta_steps = n;
            }
            if let Some(m) = map {
                cfg.map = m;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if out.is_some() {
                cfg.out = out;
            }
            if let Some(f) = format {
                cfg.format = f;
            }
            cmd_scan(&cfg)?;
            Ok(EXIT_OK)
        }
        Command::VerifyNosignal {
            samples,
            seed,
            tol,
            out,
        } => {
            let report = cmd_verify_nosignal(samples, seed, tol, out.as_deref())?;
            if report.pass {
                Ok(EXIT_OK)
            } else {
                eprintln!(
                    "no-signaling violation: max deviation {:e} over {} samples",
                    report.max_deviation, report.samples
                );
                Ok(EXIT_VIOLATION)
            }
        }
        Command::Classify {
            map,
            samples,
            seed,
            out,
        } => {
            cmd_classify(&map, samples, seed, out.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Demo { out } => {
            let (a, b) = cmd_demo(&out)?;
            eprintln!("wrote {} and {}", a.display(), b.display());
            Ok(EXIT_OK)
        }
    })();
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}
