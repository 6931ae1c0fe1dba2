//! Array files: matrix CSV, `T3` tensor text, and binary 8-bit PGM.
//!
//! CSV and `T3` values are written with 17 significant digits (integers verbatim), so a
//! write followed by a read returns the same bits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ibpdca_core::problems::SamplingMask;
use ibpdca_core::{Array, DenseMatrix, Tensor3};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("malformed header: {0}")]
    Header(String),
    #[error("dimension mismatch: {0}")]
    Dimensions(String),
    #[error("cannot parse value {0:?}")]
    Value(String),
    #[error("non-finite value {0}")]
    NonFinite(f64),
    #[error("unknown file format for {0}")]
    UnknownFormat(String),
    #[error(transparent)]
    Array(#[from] ibpdca_core::Error),
}

pub type Result<T> = std::result::Result<T, FormatError>;

/// A matrix or a tensor read from disk.
#[derive(Debug, Clone, PartialEq)]
pub enum Data {
    Matrix(DenseMatrix),
    Tensor(Tensor3),
}

impl Data {
    pub fn dims(&self) -> [usize; 3] {
        match self {
            Data::Matrix(m) => m.dims(),
            Data::Tensor(t) => t.dims(),
        }
    }

    pub fn values(&self) -> &[f64] {
        match self {
            Data::Matrix(m) => m.values(),
            Data::Tensor(t) => t.values(),
        }
    }

    /// Nonzero entries are observed.
    pub fn to_mask(&self) -> Result<SamplingMask> {
        Ok(match self {
            Data::Matrix(m) => SamplingMask::from_indicator(m)?,
            Data::Tensor(t) => SamplingMask::from_indicator(t)?,
        })
    }

    pub fn from_mask(mask: &SamplingMask) -> Self {
        let [n1, n2, n3] = mask.dims();
        let v = mask
            .observed()
            .iter()
            .map(|&o| if o { 1.0 } else { 0.0 })
            .collect();
        if n3 == 1 {
            Data::Matrix(DenseMatrix::new(n1, n2, v).expect("mask dims are valid"))
        } else {
            Data::Tensor(Tensor3::new(n1, n2, n3, v).expect("mask dims are valid"))
        }
    }
}

fn format_value(out: &mut String, v: f64) {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        write!(out, "{v}").unwrap();
    } else {
        write!(out, "{v:.16e}").unwrap();
    }
}

fn parse_value(s: &str) -> Result<f64> {
    let v: f64 = s.parse().map_err(|_| FormatError::Value(s.to_string()))?;
    if !v.is_finite() {
        return Err(FormatError::NonFinite(v));
    }
    Ok(v)
}

pub fn matrix_to_csv(m: &DenseMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if j > 0 {
                out.push(',');
            }
            format_value(&mut out, m.get(i, j));
        }
        out.push('\n');
    }
    out
}

/// Comma-separated rows without a header. Blank lines are skipped.
pub fn matrix_from_csv(text: &str) -> Result<DenseMatrix> {
    let mut cols = None;
    let mut data = Vec::new();
    let mut rows = 0;
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let before = data.len();
        for cell in line.split(',') {
            data.push(parse_value(cell.trim())?);
        }
        let n = data.len() - before;
        match cols {
            None => cols = Some(n),
            Some(c) if c != n => {
                return Err(FormatError::Dimensions(format!(
                    "line {} has {n} values, expected {c}",
                    ln + 1
                )))
            }
            _ => {}
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| FormatError::Dimensions("empty CSV".into()))?;
    Ok(DenseMatrix::new(rows, cols, data)?)
}

pub fn tensor_to_t3(t: &Tensor3) -> String {
    let mut out = format!("T3 {} {} {}\n", t.n1(), t.n2(), t.n3());
    for k in 0..t.n3() {
        for i in 0..t.n1() {
            for j in 0..t.n2() {
                if j > 0 {
                    out.push(' ');
                }
                format_value(&mut out, t.get(i, j, k));
            }
            out.push('\n');
        }
    }
    out
}

/// `T3 <n1> <n2> <n3>` then `n1·n2·n3` whitespace-separated values, slice by slice.
pub fn tensor_from_t3(text: &str) -> Result<Tensor3> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 4 || parts[0] != "T3" {
        return Err(FormatError::Header(header.to_string()));
    }
    let mut dims = [0usize; 3];
    for (d, p) in dims.iter_mut().zip(&parts[1..]) {
        *d = p
            .parse()
            .map_err(|_| FormatError::Header(header.to_string()))?;
    }
    let data = lines
        .flat_map(str::split_whitespace)
        .map(parse_value)
        .collect::<Result<Vec<f64>>>()?;
    let want = dims[0] * dims[1] * dims[2];
    if data.len() != want {
        return Err(FormatError::Dimensions(format!(
            "{} values for a {}x{}x{} tensor",
            data.len(),
            dims[0],
            dims[1],
            dims[2]
        )));
    }
    Ok(Tensor3::new(dims[0], dims[1], dims[2], data)?)
}

/// Values are rounded and clamped to `0..=255`.
pub fn matrix_to_pgm(m: &DenseMatrix) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", m.cols(), m.rows()).into_bytes();
    out.extend(m.values().iter().map(|v| v.round().clamp(0.0, 255.0) as u8));
    out
}

/// Binary P5 with `maxval ≤ 255`. Pixel values are returned as is, without normalization.
pub fn matrix_from_pgm(bytes: &[u8]) -> Result<DenseMatrix> {
    let mut pos = 0;
    let mut fields = Vec::new();
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(FormatError::Header("truncated PGM header".into()));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    if fields[0] != "P5" {
        return Err(FormatError::Header(format!(
            "magic {:?}, expected P5",
            fields[0]
        )));
    }
    let num = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| FormatError::Header(format!("bad PGM field {s:?}")))
    };
    let (w, h, maxval) = (num(&fields[1])?, num(&fields[2])?, num(&fields[3])?);
    if maxval == 0 || maxval > 255 {
        return Err(FormatError::Header(format!("maxval {maxval} is not 8-bit")));
    }
    // One whitespace byte separates the header from the raster.
    let raster = &bytes[(pos + 1).min(bytes.len())..];
    if raster.len() != w * h {
        return Err(FormatError::Dimensions(format!(
            "{} pixel bytes for a {w}x{h} image",
            raster.len()
        )));
    }
    Ok(DenseMatrix::new(
        h,
        w,
        raster.iter().map(|&b| b as f64).collect(),
    )?)
}

fn extension(path: &Path) -> String {
    path.extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase()
}

/// Reads by extension: `.csv`, `.t3`, `.pgm`.
pub fn read_data(path: &Path) -> Result<Data> {
    match extension(path).as_str() {
        "csv" => Ok(Data::Matrix(matrix_from_csv(&fs::read_to_string(path)?)?)),
        "t3" => Ok(Data::Tensor(tensor_from_t3(&fs::read_to_string(path)?)?)),
        "pgm" => Ok(Data::Matrix(matrix_from_pgm(&fs::read(path)?)?)),
        _ => Err(FormatError::UnknownFormat(path.display().to_string())),
    }
}

/// Writes by extension. Matrices go to `.csv` or `.pgm`, tensors to `.t3`.
pub fn write_data(path: &Path, data: &Data) -> Result<()> {
    match (extension(path).as_str(), data) {
        ("csv", Data::Matrix(m)) => fs::write(path, matrix_to_csv(m))?,
        ("pgm", Data::Matrix(m)) => fs::write(path, matrix_to_pgm(m))?,
        ("t3", Data::Tensor(t)) => fs::write(path, tensor_to_t3(t))?,
        _ => return Err(FormatError::UnknownFormat(path.display().to_string())),
    }
    Ok(())
}

/// File extension matching the data kind for text output.
pub fn text_extension(data: &Data) -> &'static str {
    match data {
        Data::Matrix(_) => "csv",
        Data::Tensor(_) => "t3",
    }
}
