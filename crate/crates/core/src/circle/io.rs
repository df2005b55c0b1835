//! Columnar CSV for sampled functions plus a JSON header describing them.
//!
//! The CSV has one row per node: `theta`, then `re_i_k,im_i_k` for every
//! matrix entry in row-major order. Numbers carry 17 significant digits so a
//! write/read cycle is lossless.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{CircleError, CircleGrid, SampledMatrixFunction};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Circle(#[from] CircleError),
}

/// Self-describing header written next to a CSV body.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleHeader {
    #[serde(rename = "N")]
    pub grid_size: usize,
    pub n: usize,
    pub generator: String,
    pub parameters: serde_json::Value,
}

pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn to_csv(f: &SampledMatrixFunction) -> String {
    let n = f.dim();
    let mut out = String::from("theta");
    for i in 0..n {
        for k in 0..n {
            let _ = write!(out, ",re_{i}_{k},im_{i}_{k}");
        }
    }
    out.push('\n');
    for (j, m) in f.nodes().enumerate() {
        out.push_str(&format_number(f.grid().node(j)));
        for z in m {
            out.push(',');
            out.push_str(&format_number(z.re));
            out.push(',');
            out.push_str(&format_number(z.im));
        }
        out.push('\n');
    }
    out
}

/// Parses the CSV body. Line numbers in errors are 1-based and count the
/// header.
pub fn from_csv(text: &str) -> Result<SampledMatrixFunction, IoError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(IoError::Parse {
        line: 1,
        message: "empty input".into(),
    })?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    if columns.first() != Some(&"theta") || columns.len() < 3 || (columns.len() - 1) % 2 != 0 {
        return Err(IoError::Parse {
            line: 1,
            message: "header must be theta followed by re/im column pairs".into(),
        });
    }
    let entries = (columns.len() - 1) / 2;
    let n = (entries as f64).sqrt().round() as usize;
    if n * n != entries {
        return Err(IoError::Parse {
            line: 1,
            message: format!("{entries} entries per node is not a square matrix"),
        });
    }
    let mut thetas = Vec::new();
    let mut data = Vec::new();
    for (index, line) in lines {
        let line_no = index + 1;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != columns.len() {
            return Err(IoError::Parse {
                line: line_no,
                message: format!("expected {} fields, found {}", columns.len(), fields.len()),
            });
        }
        let mut numbers = Vec::with_capacity(fields.len());
        for field in &fields {
            let x: f64 = field.parse().map_err(|_| IoError::Parse {
                line: line_no,
                message: format!("not a number: {field:?}"),
            })?;
            numbers.push(x);
        }
        thetas.push((line_no, numbers[0]));
        for pair in numbers[1..].chunks(2) {
            data.push(Complex64::new(pair[0], pair[1]));
        }
    }
    let grid = CircleGrid::new(thetas.len()).map_err(|e| IoError::Parse {
        line: text.lines().count(),
        message: e.to_string(),
    })?;
    let tolerance = 1e-9 * grid.step();
    for (j, &(line, theta)) in thetas.iter().enumerate() {
        if (theta - grid.node(j)).abs() > tolerance {
            return Err(IoError::Parse {
                line,
                message: format!("theta {theta} is not grid node {j}"),
            });
        }
    }
    Ok(SampledMatrixFunction::new(grid, n, data)?)
}

/// Writes `<stem>.csv` and `<stem>.json`.
pub fn write_sampled(
    dir: &Path,
    stem: &str,
    f: &SampledMatrixFunction,
    generator: &str,
    parameters: serde_json::Value,
) -> Result<(), IoError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(format!("{stem}.csv")), to_csv(f))?;
    let header = SampleHeader {
        grid_size: f.grid().size(),
        n: f.dim(),
        generator: generator.to_string(),
        parameters,
    };
    fs::write(
        dir.join(format!("{stem}.json")),
        serde_json::to_string_pretty(&header)?,
    )?;
    Ok(())
}

pub fn read_sampled(path: &Path) -> Result<SampledMatrixFunction, IoError> {
    from_csv(&fs::read_to_string(path)?)
}
