use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use repchan::circulant::{circulant_spec, default_min_margin, default_spectrum, generic_phases};
use repchan::dim2::{analyze2, sigma_x_channel};
use repchan::fixed_point::{analyze_superoperator, iterate_superoperator};
use repchan::format::{fmt_float, from_json_str, to_json_string, write_trajectory_csv, Analyze2Json, MatrixJson, ReportJson, SpecJson};
use repchan::linalg::{density_defect, haar_unitary, rng_from_seed, RankPolicy};
use repchan::{CMatrix, Phases, Real, Spec, SuperOp};

use crate::{AnalyzeArgs, ApplyArgs, CirculantArgs, HaarArgs, IterateArgs, MakeCommand, SigmaxxArgs, SweepArgs};

#[derive(Debug)]
pub enum CliError {
    /// Malformed flag values or unreadable input.
    Parse(String),
    Lib(repchan::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(msg) => write!(f, "{msg}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<repchan::Error> for CliError {
    fn from(e: repchan::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Lib(e.into())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Lib(e.into())
    }
}

type CliResult<T = ()> = std::result::Result<T, CliError>;

pub fn exit_code(e: &CliError) -> u8 {
    match e {
        CliError::Parse(_) => 2,
        CliError::Lib(e) if e.is_parse() => 2,
        CliError::Lib(e) if e.is_validation() => 3,
        CliError::Lib(_) => 4,
    }
}

fn read_input(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))
}

fn read_spec(path: &Path) -> CliResult<(Spec, Option<u64>)> {
    let json: SpecJson = from_json_str(&read_input(path)?)?;
    let spec = json.to_spec()?;
    Ok((spec, json.seed))
}

/// Reads a matrix JSON and requires it to be a density matrix.
fn read_state(path: &Path, n: usize) -> CliResult<CMatrix> {
    let json: MatrixJson = from_json_str(&read_input(path)?)?;
    let q: CMatrix = json.to_matrix()?;
    if q.rows() != n || q.cols() != n {
        return Err(repchan::Error::Dimension(format!("state must be {n}x{n}, got {}x{}", q.rows(), q.cols())).into());
    }
    if let Some(defect) = density_defect(&q, f64::validation_tol()) {
        return Err(repchan::Error::NotDensity(defect.to_string()).into());
    }
    Ok(q)
}

fn write_output(out: &Option<PathBuf>, text: &str) -> CliResult {
    match out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn sink(out: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(io::BufWriter::new(fs::File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn parse_list<T>(flag: &str, raw: &str, parse: impl Fn(&str) -> Option<T>) -> CliResult<Vec<T>> {
    raw.split(',')
        .map(str::trim)
        .map(|tok| parse(tok).ok_or_else(|| CliError::Parse(format!("--{flag}: cannot parse {tok:?}"))))
        .collect()
}

/// `i`, `-i`, `1`, `0.6+0.8i`, ...
fn parse_phase(tok: &str) -> Option<Complex64> {
    tok.parse::<Complex64>().ok()
}

fn spectrum_or_default(raw: &Option<String>, n: usize) -> CliResult<Vec<f64>> {
    match raw {
        Some(s) => parse_list("spectrum", s, |t| t.parse::<f64>().ok()),
        None => Ok(default_spectrum(n)),
    }
}

fn policy(rank_tol: Option<f64>) -> RankPolicy<f64> {
    match rank_tol {
        Some(t) => RankPolicy::Absolute(t),
        None => RankPolicy::Relative,
    }
}

pub fn make(cmd: MakeCommand) -> CliResult {
    match cmd {
        MakeCommand::Circulant(a) => make_circulant(a),
        MakeCommand::Haar(a) => make_haar(a),
        MakeCommand::Sigmaxx(a) => make_sigmaxx(a),
    }
}

fn make_circulant(a: CirculantArgs) -> CliResult {
    let (phases, seed) = match (&a.phases, &a.angles) {
        (Some(p), _) => (Phases::from_phases(parse_list("phases", p, parse_phase)?)?, None),
        (None, Some(t)) => (Phases::from_angles(parse_list("angles", t, |x| x.parse::<f64>().ok())?)?, None),
        (None, None) => (generic_phases(a.n, a.seed, default_min_margin(a.n))?, Some(a.seed)),
    };
    if phases.m != a.n * a.n {
        return Err(repchan::Error::Dimension(format!("n = {} needs {} phases, got {}", a.n, a.n * a.n, phases.m)).into());
    }
    let spec = circulant_spec(&phases, a.n, spectrum_or_default(&a.spectrum, a.n)?)?;
    eprintln!("phase margin {}", fmt_float(phases.margin));
    write_output(&a.output.out, &to_json_string(&SpecJson::from_spec(&spec, seed))?)
}

fn make_haar(a: HaarArgs) -> CliResult {
    let spec = Spec::from_spectrum(haar_unitary(a.n * a.n, a.seed), spectrum_or_default(&a.spectrum, a.n)?)?;
    write_output(&a.output.out, &to_json_string(&SpecJson::from_spec(&spec, Some(a.seed)))?)
}

fn make_sigmaxx(a: SigmaxxArgs) -> CliResult {
    let spec = sigma_x_channel(a.theta, a.p1)?;
    write_output(&a.output.out, &to_json_string(&SpecJson::from_spec(&spec, None))?)
}

pub fn apply(a: ApplyArgs) -> CliResult {
    let (spec, _) = read_spec(&a.spec)?;
    let q = read_state(&a.state, spec.n())?;
    let out = spec.apply(&q)?;
    write_output(&a.output.out, &to_json_string(&MatrixJson::from_matrix(&out))?)
}

#[derive(Serialize)]
struct AnalyzeJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    n: usize,
    #[serde(flatten)]
    report: ReportJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    dim2: Option<Analyze2Json>,
}

pub fn analyze(a: AnalyzeArgs) -> CliResult {
    let (spec, seed) = read_spec(&a.spec)?;
    let sup = SuperOp::from_spec(&spec)?;
    let report = analyze_superoperator(&sup, policy(a.rank_tol))?;
    let dim2 = if a.dim2 {
        if spec.n() != 2 {
            return Err(repchan::Error::InvalidArgument(format!("--dim2 needs n = 2, got n = {}", spec.n())).into());
        }
        Some(Analyze2Json::from_analysis(&analyze2(&spec, a.tol)?))
    } else {
        None
    };
    let json = AnalyzeJson {
        seed,
        n: spec.n(),
        report: ReportJson::from_report(&report),
        dim2,
    };
    write_output(&a.output.out, &to_json_string(&json)?)
}

#[derive(Serialize)]
struct IterateSummary {
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    converged: bool,
    steps: usize,
    #[serde(rename = "final")]
    final_state: MatrixJson,
}

/// CSV trajectory to `--out` (or stdout); a JSON summary line to stderr.
pub fn iterate(a: IterateArgs) -> CliResult {
    let (spec, seed) = read_spec(&a.spec)?;
    let q0 = read_state(&a.state, spec.n())?;
    let traj = iterate_superoperator(&SuperOp::from_spec(&spec)?, &q0, a.steps, a.tol)?;
    write_trajectory_csv(&traj.rows()?, sink(&a.output.out)?)?;
    let summary = IterateSummary {
        seed,
        converged: traj.converged,
        steps: traj.steps,
        final_state: MatrixJson::from_matrix(traj.last()),
    };
    eprint!("{}", to_json_string(&summary)?);
    Ok(())
}

struct SampleRow {
    sample: usize,
    seed: u64,
    rank: usize,
    kernel_dim: usize,
    unique: bool,
    spectral_gap: f64,
    residual: f64,
}

#[derive(Serialize)]
struct GapStats {
    min: f64,
    mean: f64,
    max: f64,
}

#[derive(Serialize)]
struct SweepSummary {
    n: usize,
    samples: usize,
    seed: u64,
    spectrum: Vec<f64>,
    unique_fraction: f64,
    /// `rank -> count`
    rank_histogram: BTreeMap<usize, usize>,
    spectral_gap: GapStats,
}

fn sweep_sample(n: usize, spectrum: &[f64], policy: RankPolicy<f64>, sample: usize, seed: u64) -> CliResult<SampleRow> {
    let spec = Spec::from_spectrum(haar_unitary(n * n, seed), spectrum.to_vec())?;
    let r = analyze_superoperator(&SuperOp::from_spec(&spec)?, policy)?;
    Ok(SampleRow {
        sample,
        seed,
        rank: r.rank,
        kernel_dim: r.kernel_dim,
        unique: r.unique,
        spectral_gap: r.spectral_gap,
        residual: r.residual,
    })
}

pub fn sweep(a: SweepArgs) -> CliResult {
    if a.samples == 0 {
        return Err(repchan::Error::InvalidArgument("--samples must be at least 1".into()).into());
    }
    if a.n < 2 {
        return Err(repchan::Error::InvalidArgument(format!("--n must be at least 2, got {}", a.n)).into());
    }
    let spectrum = spectrum_or_default(&a.spectrum, a.n)?;
    // validate once up front so a bad spectrum is a single clear error
    Spec::from_spectrum(CMatrix::identity(a.n * a.n), spectrum.clone())?;

    let mut rng = rng_from_seed(a.seed);
    let seeds: Vec<u64> = (0..a.samples).map(|_| rng.next_u64()).collect();
    let pol = policy(a.rank_tol);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = a.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| repchan::Error::InvalidArgument(format!("thread pool: {e}")))?;
    let rows: Vec<SampleRow> = pool.install(|| {
        seeds
            .par_iter()
            .enumerate()
            .map(|(i, &s)| sweep_sample(a.n, &spectrum, pol, i, s))
            .collect::<CliResult<Vec<_>>>()
    })?;

    let mut w = csv::Writer::from_writer(sink(&a.output.out)?);
    w.write_record(["sample", "seed", "rank", "kernel_dim", "unique", "spectral_gap", "residual"])?;
    for r in &rows {
        w.write_record([
            r.sample.to_string(),
            r.seed.to_string(),
            r.rank.to_string(),
            r.kernel_dim.to_string(),
            r.unique.to_string(),
            fmt_float(r.spectral_gap),
            fmt_float(r.residual),
        ])?;
    }
    w.flush()?;

    let mut rank_histogram = BTreeMap::new();
    for r in &rows {
        *rank_histogram.entry(r.rank).or_insert(0) += 1;
    }
    let gaps = rows.iter().map(|r| r.spectral_gap);
    let summary = SweepSummary {
        n: a.n,
        samples: a.samples,
        seed: a.seed,
        unique_fraction: rows.iter().filter(|r| r.unique).count() as f64 / a.samples as f64,
        rank_histogram,
        spectral_gap: GapStats {
            min: gaps.clone().fold(f64::INFINITY, f64::min),
            mean: gaps.clone().sum::<f64>() / a.samples as f64,
            max: gaps.fold(f64::NEG_INFINITY, f64::max),
        },
        spectrum,
    };
    let text = to_json_string(&summary)?;
    match &a.summary {
        Some(path) => fs::write(path, text)?,
        None => eprint!("{text}"),
    }
    Ok(())
}
