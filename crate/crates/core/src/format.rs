//! JSON and CSV encodings.
//!
//! Matrices are `{"rows": R, "cols": C, "entries": [[re, im], ...]}` in row-major
//! order. Floats are written with 17 significant digits so that output is
//! byte-for-byte reproducible and round-trips through `f64` exactly.

use std::io::{self, Write};

use serde::ser::Serialize;
use serde::{Deserialize, Serialize as SerializeDerive};
use serde_json::ser::Formatter;

use crate::channel::ChannelSpec;
use crate::circulant::PhaseVector;
use crate::dim2::{Dim2Analysis, Dim2Coefficients};
use crate::error::{Error, Result};
use crate::fixed_point::{FixedPointReport, TrajectoryRow};
use crate::linalg::ComplexMatrix;
use crate::scalar::{Complex, Real};

#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix<T: Real>(m: &ComplexMatrix<T>) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.entries().iter().map(|z| [z.re.as_f64(), z.im.as_f64()]).collect(),
        }
    }

    pub fn to_matrix<T: Real>(&self) -> Result<ComplexMatrix<T>> {
        let data = self
            .entries
            .iter()
            .map(|&[re, im]| Complex::new(T::lit(re), T::lit(im)))
            .collect();
        ComplexMatrix::from_row_major(self.rows, self.cols, data)
    }
}

/// `beta` is either a full matrix or `{"spectrum": [...]}` (diagonal).
#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
#[serde(untagged)]
pub enum BetaJson {
    Spectrum { spectrum: Vec<f64> },
    Matrix(MatrixJson),
}

#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
pub struct SpecJson {
    pub n: usize,
    pub beta: BetaJson,
    #[serde(rename = "U")]
    pub u: MatrixJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl SpecJson {
    pub fn from_spec<T: Real>(spec: &ChannelSpec<T>, seed: Option<u64>) -> Self {
        let beta = match spec.spectrum() {
            Some(s) => BetaJson::Spectrum {
                spectrum: s.iter().map(|x| x.as_f64()).collect(),
            },
            None => BetaJson::Matrix(MatrixJson::from_matrix(spec.beta())),
        };
        Self {
            n: spec.n(),
            beta,
            u: MatrixJson::from_matrix(spec.unitary()),
            seed,
        }
    }

    pub fn to_spec<T: Real>(&self) -> Result<ChannelSpec<T>> {
        let u = self.u.to_matrix()?;
        let spec = match &self.beta {
            BetaJson::Spectrum { spectrum } => {
                ChannelSpec::from_spectrum(u, spectrum.iter().map(|&x| T::lit(x)).collect())?
            }
            BetaJson::Matrix(m) => ChannelSpec::new(u, m.to_matrix()?)?,
        };
        if spec.n() != self.n {
            return Err(Error::Dimension(format!(
                "declared n = {} but the environment state is {}x{}",
                self.n,
                spec.n(),
                spec.n()
            )));
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
pub struct ReportJson {
    pub rank: usize,
    pub kernel_dim: usize,
    pub unique: bool,
    pub fixed_density: Option<MatrixJson>,
    pub residual: f64,
    pub spectral_gap: f64,
}

impl ReportJson {
    pub fn from_report<T: Real>(r: &FixedPointReport<T>) -> Self {
        Self {
            rank: r.rank,
            kernel_dim: r.kernel_dim,
            unique: r.unique,
            fixed_density: r.fixed_density.as_ref().map(MatrixJson::from_matrix),
            residual: r.residual.as_f64(),
            spectral_gap: r.spectral_gap.as_f64(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
pub struct PhaseJson {
    pub n: usize,
    pub angles: Vec<f64>,
}

impl PhaseJson {
    pub fn from_phases<T: Real>(n: usize, p: &PhaseVector<T>) -> Self {
        Self {
            n,
            angles: p.angles.iter().map(|a| a.as_f64()).collect(),
        }
    }

    pub fn to_phases<T: Real>(&self) -> Result<PhaseVector<T>> {
        if self.angles.len() != self.n * self.n {
            return Err(Error::Dimension(format!(
                "n = {} needs {} angles, got {}",
                self.n,
                self.n * self.n,
                self.angles.len()
            )));
        }
        PhaseVector::from_angles(self.angles.iter().map(|&a| T::lit(a)).collect())
    }
}

fn pair<T: Real>(z: Complex<T>) -> [f64; 2] {
    [z.re.as_f64(), z.im.as_f64()]
}

#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
pub struct CoefficientsJson {
    pub alpha1: f64,
    pub beta1: f64,
    pub alpha2: [f64; 2],
    pub beta2: [f64; 2],
    pub a11: [f64; 2],
    pub a12: [f64; 2],
    pub a21: [f64; 2],
    pub a22: [f64; 2],
    pub p1: f64,
    pub p2: f64,
}

impl CoefficientsJson {
    pub fn from_coefficients<T: Real>(c: &Dim2Coefficients<T>) -> Self {
        Self {
            alpha1: c.alpha1.as_f64(),
            beta1: c.beta1.as_f64(),
            alpha2: pair(c.alpha2),
            beta2: pair(c.beta2),
            a11: pair(c.a11),
            a12: pair(c.a12),
            a21: pair(c.a21),
            a22: pair(c.a22),
            p1: c.p1.as_f64(),
            p2: c.p2.as_f64(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
pub struct Analyze2Json {
    pub coefficients: CoefficientsJson,
    #[serde(rename = "detK")]
    pub det_k: [f64; 2],
    pub z0: Option<[f64; 2]>,
    #[serde(rename = "detReal")]
    pub det_real: f64,
    pub branch: String,
    pub unique: bool,
    pub fixed_point: Option<MatrixJson>,
}

impl Analyze2Json {
    pub fn from_analysis<T: Real>(a: &Dim2Analysis<T>) -> Self {
        Self {
            coefficients: CoefficientsJson::from_coefficients(&a.coefficients),
            det_k: pair(a.certificate.det_k),
            z0: a.certificate.z0.map(pair),
            det_real: a.certificate.det_real.as_f64(),
            branch: format!("{:?}", a.certificate.branch),
            unique: a.certificate.unique,
            fixed_point: a.fixed_point.as_ref().map(MatrixJson::from_matrix),
        }
    }
}

/// Compact JSON formatter that prints every float as `{:.16e}`.
#[derive(Debug, Default, Clone, Copy)]
pub struct FixedDigits;

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        write!(writer, "{value:.8e}")
    }
}

/// Serializes with [`FixedDigits`], one line terminated by a newline.
/// Non-finite floats become `null` (matrices cannot hold them).
pub fn to_json_string<S: Serialize>(value: &S) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigits);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("JSON output is UTF-8"))
}

pub fn from_json_str<'a, D: Deserialize<'a>>(s: &'a str) -> Result<D> {
    Ok(serde_json::from_str(s)?)
}

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `step,delta,trace,min_eigenvalue` rows.
pub fn write_trajectory_csv<T: Real, W: Write>(rows: &[TrajectoryRow<T>], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "delta", "trace", "min_eigenvalue"])?;
    for r in rows {
        w.write_record([
            r.step.to_string(),
            fmt_float(r.delta.as_f64()),
            fmt_float(r.trace.as_f64()),
            fmt_float(r.min_eigenvalue.as_f64()),
        ])?;
    }
    w.flush()?;
    Ok(())
}
