//! File formats.
//!
//! Binary grid format:
//!
//! ```text
//! SCHURSCAPE-GRID 1\n
//! rows <r>\n
//! cols <c>\n
//! dtype complex128 | float64\n
//! <key> <value>\n        (zero or more metadata lines, keys without spaces)
//! end\n
//! <payload>
//! ```
//!
//! The payload is row-major, little-endian IEEE-754 doubles; complex entries are
//! interleaved `(re, im)`. Metadata floats are written with Rust's shortest
//! round-trip formatting so that files can be read back bit-exactly.

use std::io::{BufRead, BufReader, Read, Write};

use crate::linalg::C64;
use crate::{Error, Result};

const MAGIC: &str = "SCHURSCAPE-GRID 1";

#[derive(Clone, Debug, PartialEq)]
pub struct GridHeader {
    pub rows: usize,
    pub cols: usize,
    pub meta: Vec<(String, String)>,
}

impl GridHeader {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self { rows, cols, meta: Vec::new() }
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GridData {
    Complex(Vec<C64>),
    Real(Vec<f64>),
}

impl GridData {
    fn len(&self) -> usize {
        match self {
            GridData::Complex(v) => v.len(),
            GridData::Real(v) => v.len(),
        }
    }
}

pub fn write_grid<W: Write>(mut w: W, header: &GridHeader, data: &GridData) -> Result<()> {
    if data.len() != header.rows * header.cols {
        return Err(Error::DimensionMismatch { expected: header.rows * header.cols, found: data.len() });
    }
    let dtype = match data {
        GridData::Complex(_) => "complex128",
        GridData::Real(_) => "float64",
    };
    let mut text = format!("{MAGIC}\nrows {}\ncols {}\ndtype {dtype}\n", header.rows, header.cols);
    for (k, v) in &header.meta {
        if k.is_empty() || k.contains(char::is_whitespace) || v.contains('\n') || k == "end" {
            return Err(Error::Format(format!("invalid metadata entry {k:?}")));
        }
        text.push_str(&format!("{k} {v}\n"));
    }
    text.push_str("end\n");
    w.write_all(text.as_bytes())?;

    let mut buf = Vec::with_capacity(16 * data.len());
    match data {
        GridData::Complex(v) => {
            for z in v {
                buf.extend_from_slice(&z.re.to_le_bytes());
                buf.extend_from_slice(&z.im.to_le_bytes());
            }
        }
        GridData::Real(v) => {
            for x in v {
                buf.extend_from_slice(&x.to_le_bytes());
            }
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_grid<R: Read>(r: R) -> Result<(GridHeader, GridData)> {
    let mut reader = BufReader::new(r);
    let mut line = String::new();
    let mut next_line = |reader: &mut BufReader<R>| -> Result<String> {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            return Err(Error::Format("unexpected end of header".into()));
        }
        Ok(line.trim_end_matches('\n').to_string())
    };

    if next_line(&mut reader)? != MAGIC {
        return Err(Error::Format("not a grid file".into()));
    }
    let mut rows = None;
    let mut cols = None;
    let mut dtype = None;
    let mut meta = Vec::new();
    loop {
        let l = next_line(&mut reader)?;
        if l == "end" {
            break;
        }
        let (k, v) = l
            .split_once(' ')
            .ok_or_else(|| Error::Format(format!("bad header line {l:?}")))?;
        let parse_dim = |v: &str| v.parse::<usize>().map_err(|e| Error::Format(e.to_string()));
        match k {
            "rows" if rows.is_none() => rows = Some(parse_dim(v)?),
            "cols" if cols.is_none() => cols = Some(parse_dim(v)?),
            "dtype" if dtype.is_none() => dtype = Some(v.to_string()),
            _ => meta.push((k.to_string(), v.to_string())),
        }
    }
    let rows = rows.ok_or_else(|| Error::Format("missing rows".into()))?;
    let cols = cols.ok_or_else(|| Error::Format("missing cols".into()))?;
    let count = rows * cols;

    let mut payload = Vec::new();
    reader.read_to_end(&mut payload)?;
    let read_f64 = |i: usize| f64::from_le_bytes(payload[8 * i..8 * i + 8].try_into().unwrap());
    let data = match dtype.as_deref() {
        Some("complex128") => {
            if payload.len() != 16 * count {
                return Err(Error::Format("payload size does not match header".into()));
            }
            GridData::Complex((0..count).map(|i| C64::new(read_f64(2 * i), read_f64(2 * i + 1))).collect())
        }
        Some("float64") => {
            if payload.len() != 8 * count {
                return Err(Error::Format("payload size does not match header".into()));
            }
            GridData::Real((0..count).map(read_f64).collect())
        }
        other => return Err(Error::Format(format!("unknown dtype {other:?}"))),
    };
    Ok((GridHeader { rows, cols, meta }, data))
}

/// Formats a float with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Writes an 8-bit binary PGM image. `values` is row-major with `height` rows;
/// the grey level is linear between `lo` (black) and `hi` (white).
pub fn write_pgm<W: Write>(
    mut w: W,
    width: usize,
    height: usize,
    values: &[f64],
    lo: f64,
    hi: f64,
) -> Result<()> {
    if values.len() != width * height {
        return Err(Error::DimensionMismatch { expected: width * height, found: values.len() });
    }
    write!(w, "P5\n{width} {height}\n255\n")?;
    let span = if hi > lo { hi - lo } else { 1.0 };
    let bytes: Vec<u8> = values
        .iter()
        .map(|&v| {
            let t = ((v - lo) / span).clamp(0.0, 1.0);
            (t * 255.0).round() as u8
        })
        .collect();
    w.write_all(&bytes)?;
    Ok(())
}
