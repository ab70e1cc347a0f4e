//! Command-line front end.
//!
//! Exit codes: `check` returns 0 when the channel is not
//! epsilon-symmetrizable and 2 when it is; every error returns 1.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::avc::Avc;
use crate::bosonic::{build_mpsk_avc, eta_scan, write_eta_csv, BosonicParams, DEFAULT_QUAD_TOL};
use crate::discretize::{convergence_scan, write_convergence_csv};
use crate::random::{psym_surface, write_scan_csv, ScanConfig, SAMPLING_DISTRIBUTION};
use crate::sym::{f_value, is_epsilon_symmetrizable};

pub const DEFAULT_EPSILON: f64 = 1.0 / 1024.0;

#[derive(Debug, Parser)]
#[command(name = "avcsym", version, about = "Symmetrizability of arbitrarily varying channels")]
pub struct Cli {
    /// Worker threads for parallel cells (defaults to all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide epsilon-symmetrizability of a channel file.
    Check {
        #[arg(long)]
        input: PathBuf,
        /// Threshold, as a number or `2^k`.
        #[arg(long, value_parser = parse_epsilon, default_value = "2^-10")]
        epsilon: f64,
    },
    /// Minimal symmetrization defect of a channel file.
    Fvalue {
        #[arg(long)]
        input: PathBuf,
    },
    /// Fraction of random channels that are epsilon-symmetrizable.
    RandomScan(RandomScanArgs),
    /// Defect of the phase-shift-keyed channel across transmittivities.
    BosonicScan(BosonicScanArgs),
    /// Defect of grid approximations of a continuous jammer.
    DiscretizeScan(DiscretizeScanArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct RandomScanArgs {
    #[arg(long, default_value_t = 4)]
    pub x: usize,
    #[arg(long, default_value_t = 4)]
    pub y: usize,
    /// Jammer alphabet sizes `start:stop:step`.
    #[arg(long, default_value = "2:14:1", allow_hyphen_values = true)]
    pub s: String,
    /// Base-2 exponents of epsilon, `start:stop:step`.
    #[arg(long, default_value = "-15:-3:1", allow_hyphen_values = true)]
    pub eps_exp: String,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, env = "AVCSYM_SEED", default_value_t = 0)]
    pub seed: u64,
    /// CSV destination; a `.json` sidecar is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct BosonicScanArgs {
    #[arg(long, default_value_t = 6)]
    pub m: usize,
    #[arg(long, default_value_t = 16.0)]
    pub energy: f64,
    #[arg(long, default_value_t = 1.0)]
    pub na: f64,
    #[arg(long, default_value_t = 1.0)]
    pub ns: f64,
    /// Transmittivities `start:stop:step`.
    #[arg(long, default_value = "0:1:0.02", allow_hyphen_values = true)]
    pub eta: String,
    #[arg(long, default_value_t = DEFAULT_QUAD_TOL)]
    pub quad_tol: f64,
    /// Directory receiving the channel of every transmittivity as JSON.
    #[arg(long)]
    pub avc_dir: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct DiscretizeScanArgs {
    #[arg(long, default_value_t = 6)]
    pub m: usize,
    #[arg(long, default_value_t = 16.0)]
    pub energy: f64,
    /// Jammer energy limit.
    #[arg(long, default_value_t = 16.0)]
    pub es: f64,
    #[arg(long, default_value_t = 1.0)]
    pub na: f64,
    #[arg(long, default_value_t = 1.0)]
    pub ns: f64,
    #[arg(long, default_value_t = 0.7)]
    pub eta: f64,
    /// Pitches `start:stop:step`; `halving` as step halves down to `stop`.
    #[arg(long, default_value = "2:0.25:halving", allow_hyphen_values = true)]
    pub delta: String,
    #[arg(long, default_value_t = DEFAULT_QUAD_TOL)]
    pub quad_tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `v` or `2^k`.
pub fn parse_epsilon(text: &str) -> Result<f64, String> {
    let value = match text.strip_prefix("2^") {
        Some(exp) => exp
            .parse::<i32>()
            .map(|k| 2f64.powi(k))
            .map_err(|e| format!("bad exponent in {text}: {e}"))?,
        None => text.parse::<f64>().map_err(|e| format!("bad number {text}: {e}"))?,
    };
    if !(value > 0.0) || !value.is_finite() {
        return Err(format!("epsilon must be positive, got {text}"));
    }
    Ok(value)
}

/// Expands `start:stop:step` (inclusive of `stop`). A bare number is a
/// one-element range; the step `halving` repeatedly halves `start`.
pub fn parse_range(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| -> Result<f64> {
        let v: f64 = s
            .trim()
            .parse()
            .with_context(|| format!("bad number {s:?} in range {text:?}"))?;
        if !v.is_finite() {
            bail!("non-finite value in range {text:?}");
        }
        Ok(v)
    };
    match parts.as_slice() {
        [single] => Ok(vec![num(single)?]),
        [start, stop, "halving"] => {
            let (start, stop) = (num(start)?, num(stop)?);
            if !(start > 0.0 && stop > 0.0 && stop <= start) {
                bail!("halving range {text:?} needs 0 < stop <= start");
            }
            let mut out = vec![start];
            let mut v = start;
            while v / 2.0 >= stop * (1.0 - 1e-12) {
                v /= 2.0;
                out.push(v);
            }
            Ok(out)
        }
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if step == 0.0 || (stop - start) * step < 0.0 {
                bail!("step of range {text:?} does not lead from start to stop");
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|k| start + k as f64 * step).collect())
        }
        _ => bail!("range {text:?} is not start:stop:step"),
    }
}

fn parse_usize_range(text: &str) -> Result<Vec<usize>> {
    parse_range(text)?
        .into_iter()
        .map(|v| {
            if v < 0.0 || v.fract() != 0.0 {
                bail!("range {text:?} must contain non-negative integers");
            }
            Ok(v as usize)
        })
        .collect()
}

fn read_avc(path: &Path) -> Result<Avc> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Avc::from_json(&text).with_context(|| format!("cannot parse channel in {}", path.display()))
}

/// Opens the CSV destination before any computation starts.
fn open_output(out: &Option<PathBuf>) -> Result<Option<BufWriter<File>>> {
    out.as_ref()
        .map(|p| {
            File::create(p)
                .map(BufWriter::new)
                .with_context(|| format!("cannot write {}", p.display()))
        })
        .transpose()
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

fn write_sidecar<T: Serialize>(out: &Option<PathBuf>, meta: &T) -> Result<()> {
    if let Some(p) = out {
        let path = sidecar_path(p);
        let text = serde_json::to_string_pretty(meta)?;
        std::fs::write(&path, text + "\n").with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

/// Sends CSV bytes to the opened file or to standard output.
fn emit(file: Option<BufWriter<File>>, bytes: &[u8], stdout: &mut dyn Write) -> Result<()> {
    match file {
        Some(mut f) => {
            f.write_all(bytes)?;
            f.flush()?;
        }
        None => stdout.write_all(bytes)?,
    }
    Ok(())
}

#[derive(Serialize)]
struct RandomMeta<'a> {
    command: &'static str,
    distribution: &'static str,
    workers: Option<usize>,
    args: &'a RandomScanArgs,
    s_values: &'a [usize],
    eps_values: &'a [f64],
}

#[derive(Serialize)]
struct ScanMeta<'a, T: Serialize> {
    command: &'static str,
    workers: Option<usize>,
    args: &'a T,
    values: &'a [f64],
}

/// Runs the command; standard output is collected into `stdout`.
fn execute(cli: Cli, stdout: &mut Vec<u8>) -> Result<i32> {
    let workers = cli.workers;
    match cli.command {
        Command::Check { input, epsilon } => {
            let avc = read_avc(&input)?;
            let result = is_epsilon_symmetrizable(&avc, epsilon)?;
            writeln!(stdout, "{}", result.to_json())?;
            Ok(if result.is_eps_symmetrizable == Some(true) {
                2
            } else {
                0
            })
        }
        Command::Fvalue { input } => {
            let avc = read_avc(&input)?;
            writeln!(stdout, "{}", f_value(&avc)?.to_json())?;
            Ok(0)
        }
        Command::RandomScan(args) => {
            let s_values = parse_usize_range(&args.s)?;
            let eps_values: Vec<f64> = parse_range(&args.eps_exp)?.into_iter().map(|k| k.exp2()).collect();
            let config = ScanConfig {
                x_size: args.x,
                y_size: args.y,
                s_values: s_values.clone(),
                eps_values: eps_values.clone(),
                samples_per_cell: args.samples,
                seed: args.seed,
            };
            config.validate()?;
            let file = open_output(&args.out)?;
            let cells = psym_surface(&config)?;
            let mut buf = Vec::new();
            write_scan_csv(&mut buf, &cells, args.seed)?;
            emit(file, &buf, stdout)?;
            write_sidecar(
                &args.out,
                &RandomMeta {
                    command: "random-scan",
                    distribution: SAMPLING_DISTRIBUTION,
                    workers,
                    args: &args,
                    s_values: &s_values,
                    eps_values: &eps_values,
                },
            )?;
            Ok(0)
        }
        Command::BosonicScan(args) => {
            let etas = parse_range(&args.eta)?;
            let params = BosonicParams {
                quad_tol: args.quad_tol,
                ..BosonicParams::new(args.m, args.energy, args.na, args.ns, etas[0])
            };
            if let Some(bad) = etas.iter().find(|e| !(0.0..=1.0).contains(*e)) {
                bail!("transmittivity {bad} outside [0, 1]");
            }
            params.validate()?;
            if let Some(dir) = &args.avc_dir {
                if !dir.is_dir() {
                    bail!("{} is not a directory", dir.display());
                }
            }
            let file = open_output(&args.out)?;
            let points = eta_scan(&params, &etas)?;
            if let Some(dir) = &args.avc_dir {
                for &eta in &etas {
                    let avc = build_mpsk_avc(&BosonicParams { eta, ..params })?;
                    std::fs::write(dir.join(format!("avc_eta_{eta}.json")), avc.to_json())?;
                }
            }
            let mut buf = Vec::new();
            write_eta_csv(&mut buf, &points)?;
            emit(file, &buf, stdout)?;
            write_sidecar(
                &args.out,
                &ScanMeta {
                    command: "bosonic-scan",
                    workers,
                    args: &args,
                    values: &etas,
                },
            )?;
            Ok(0)
        }
        Command::DiscretizeScan(args) => {
            let deltas = parse_range(&args.delta)?;
            let params = BosonicParams {
                quad_tol: args.quad_tol,
                ..BosonicParams::new(args.m, args.energy, args.na, args.ns, args.eta)
            };
            params.validate()?;
            let file = open_output(&args.out)?;
            let rows = convergence_scan(&params, args.es, &deltas)?;
            let mut buf = Vec::new();
            write_convergence_csv(&mut buf, &rows)?;
            emit(file, &buf, stdout)?;
            write_sidecar(
                &args.out,
                &ScanMeta {
                    command: "discretize-scan",
                    workers,
                    args: &args,
                    values: &deltas,
                },
            )?;
            Ok(0)
        }
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let mut buf = Vec::new();
    let outcome = match cli.workers {
        Some(0) => Err(anyhow!("--workers must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(anyhow::Error::from)
            .and_then(|pool| pool.install(|| execute(cli, &mut buf))),
        None => execute(cli, &mut buf),
    };
    let outcome = outcome.and_then(|code| {
        stdout.write_all(&buf)?;
        stdout.flush()?;
        Ok(code)
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            1
        }
    }
}
