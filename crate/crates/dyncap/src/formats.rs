//! File formats: Kraus and ensemble JSON, the boundary CSV, number printing.
//!
//! Invalid contents of an input file are reported as format errors, so they
//! exit as validation failures rather than invariant violations.

use std::fs;
use std::io::Write;
use std::path::Path;

use dyncap_core::channel::KrausChannel;
use dyncap_core::cqstate::CqEnsemble;
use dyncap_core::qmat::{DensityOperator, Matrix, C64};
use dyncap_core::region::BoundarySample;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// A complex matrix as `[re, im]` pairs, either nested by rows or flat in
/// row-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixJson {
    Nested(Vec<Vec<[f64; 2]>>),
    Flat(Vec<[f64; 2]>),
}

impl MatrixJson {
    pub fn from_matrix(m: &Matrix) -> Self {
        MatrixJson::Nested(
            (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect(),
        )
    }

    /// Converts with an expected shape; `None` infers it (flat input must
    /// then be square).
    pub fn to_matrix(&self, shape: Option<(usize, usize)>) -> Result<Matrix, String> {
        let (rows, cols, data): (usize, usize, Vec<C64>) = match self {
            MatrixJson::Nested(r) => {
                let rows = r.len();
                let cols = r.first().map_or(0, Vec::len);
                if r.iter().any(|row| row.len() != cols) {
                    return Err("matrix rows have different lengths".into());
                }
                (rows, cols, r.iter().flatten().map(|&[a, b]| C64::new(a, b)).collect())
            }
            MatrixJson::Flat(v) => {
                let (rows, cols) = match shape {
                    Some(s) => s,
                    None => {
                        let n = (v.len() as f64).sqrt().round() as usize;
                        (n, n)
                    }
                };
                (rows, cols, v.iter().map(|&[a, b]| C64::new(a, b)).collect())
            }
        };
        if rows * cols != data.len() || rows == 0 || cols == 0 {
            return Err(format!(
                "matrix has {} entries, which is not a {rows}x{cols} matrix",
                data.len()
            ));
        }
        if let Some((r, c)) = shape {
            if (r, c) != (rows, cols) {
                return Err(format!("expected a {r}x{c} matrix, got {rows}x{cols}"));
            }
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err("matrix entries must be finite".into());
        }
        Matrix::from_vec(rows, cols, data).map_err(|e| e.to_string())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KrausFile {
    pub in_dim: usize,
    pub out_dim: usize,
    pub kraus: Vec<MatrixJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnsembleEntry {
    pub p: f64,
    pub rho: MatrixJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnsembleFile {
    pub entries: Vec<EnsembleEntry>,
}

/// A single state; `dims` splits it into subsystems.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub rho: MatrixJson,
    #[serde(default)]
    pub dims: Option<Vec<usize>>,
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn format_error(path: &Path, message: impl Into<String>) -> CliError {
    CliError::Format {
        path: path.display().to_string(),
        message: message.into(),
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read_text(path)?).map_err(|e| format_error(path, e.to_string()))
}

impl KrausFile {
    pub fn from_channel(ch: &KrausChannel) -> Self {
        KrausFile {
            in_dim: ch.in_dim(),
            out_dim: ch.out_dim(),
            kraus: ch.kraus().iter().map(MatrixJson::from_matrix).collect(),
        }
    }

    pub fn to_channel(&self) -> Result<KrausChannel, CliError> {
        let ops = self
            .kraus
            .iter()
            .enumerate()
            .map(|(k, m)| {
                m.to_matrix(Some((self.out_dim, self.in_dim)))
                    .map_err(|e| CliError::usage(format!("Kraus operator {k}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(KrausChannel::new(self.in_dim, self.out_dim, ops)?)
    }
}

pub fn read_kraus(path: &Path) -> Result<KrausChannel, CliError> {
    let file: KrausFile = parse_json(path)?;
    file.to_channel().map_err(|e| format_error(path, e.to_string()))
}

impl EnsembleFile {
    pub fn from_ensemble(ens: &CqEnsemble) -> Self {
        EnsembleFile {
            entries: ens
                .entries()
                .iter()
                .map(|(p, rho)| EnsembleEntry {
                    p: *p,
                    rho: MatrixJson::from_matrix(rho.matrix()),
                })
                .collect(),
        }
    }

    pub fn to_ensemble(&self) -> Result<CqEnsemble, CliError> {
        let entries = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let m = e
                    .rho
                    .to_matrix(None)
                    .map_err(|msg| CliError::usage(format!("entry {i}: {msg}")))?;
                Ok((e.p, DensityOperator::from_matrix(m)?))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(CqEnsemble::new(entries)?)
    }
}

pub fn read_ensemble(path: &Path) -> Result<CqEnsemble, CliError> {
    let file: EnsembleFile = parse_json(path)?;
    file.to_ensemble().map_err(|e| format_error(path, e.to_string()))
}

pub fn read_state(path: &Path) -> Result<DensityOperator, CliError> {
    let file: StateFile = parse_json(path)?;
    let m = file.rho.to_matrix(None).map_err(|e| format_error(path, e))?;
    let d = m.rows();
    let dims = file.dims.unwrap_or_else(|| vec![d]);
    DensityOperator::new(m, dims).map_err(|e| format_error(path, e.to_string()))
}

/// `%.9g`-style formatting: 9 significant digits, trailing zeros trimmed,
/// exponent form outside `[1e-5, 1e9)`.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        format!(
            "{}e{}{:02}",
            trim_zeros(mantissa),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub const CSV_HEADER: &str = "param,cq_bound,qe_bound,cqe_bound,cef_c,cef_q,cef_e";

pub fn write_boundary_csv(out: &mut dyn Write, samples: &[BoundarySample]) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for s in samples {
        let fields = [
            s.param,
            s.bounds.cq_bound,
            s.bounds.qe_bound,
            s.bounds.cqe_bound,
            s.cef.c,
            s.cef.q,
            s.cef.e,
        ];
        let line: Vec<String> = fields.iter().map(|&v| sig9(v)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

/// One parsed CSV row, columns in header order.
pub type CsvRow = [f64; 7];

pub fn parse_boundary_csv(text: &str) -> Result<Vec<CsvRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        Some(h) => return Err(format!("unexpected header '{h}'")),
        None => return Err("empty CSV".into()),
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let vals: Vec<f64> = l
                .split(',')
                .map(|f| f.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| format!("row {}: {e}", i + 1))?;
            vals.try_into()
                .map_err(|v: Vec<f64>| format!("row {}: expected 7 columns, got {}", i + 1, v.len()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig9_matches_printf() {
        assert_eq!(sig9(1.5310070360), "1.53100704");
        assert_eq!(sig9(0.5), "0.5");
        assert_eq!(sig9(-0.25), "-0.25");
        assert_eq!(sig9(2.0), "2");
        assert_eq!(sig9(1e-7), "1e-07");
        assert_eq!(sig9(123456789012.0), "1.23456789e+11");
        assert_eq!(sig9(0.000123456789123), "0.000123456789");
        assert_eq!(sig9(0.0), "0");
    }

    #[test]
    fn matrix_json_shapes() {
        let nested: MatrixJson = serde_json::from_str("[[[1,0],[0,0]],[[0,0],[0,0]]]").unwrap();
        let flat: MatrixJson = serde_json::from_str("[[1,0],[0,0],[0,0],[0,0]]").unwrap();
        assert_eq!(nested.to_matrix(None).unwrap(), flat.to_matrix(None).unwrap());
        assert!(flat.to_matrix(Some((3, 2))).is_err());
        let ragged: MatrixJson = serde_json::from_str("[[[1,0]],[[0,0],[0,0]]]").unwrap();
        assert!(ragged.to_matrix(None).is_err());
    }

    #[test]
    fn kraus_round_trip() {
        let ch = dyncap_core::channel::erasure(0.3).unwrap();
        let text = serde_json::to_string(&KrausFile::from_channel(&ch)).unwrap();
        let back: KrausFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_channel().unwrap(), ch);
    }

    #[test]
    fn csv_round_trip() {
        let s = dyncap_core::region::Surface::erasure(0.25).unwrap();
        let samples = dyncap_core::region::sample_boundary(&s, 5).unwrap();
        let mut buf = Vec::new();
        write_boundary_csv(&mut buf, &samples).unwrap();
        let rows = parse_boundary_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(rows.len(), 5);
        assert!((rows[4][1] - 1.5).abs() < 1e-9);
    }
}
