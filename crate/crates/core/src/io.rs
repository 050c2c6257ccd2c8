//! CSV ingestion and the built-in York block design.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigenvalues, unit_length_scale, Matrix};
use crate::regression::{Dataset, INTERCEPT_NAME};

/// Which CSV columns make up the model.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvSchema {
    pub response: String,
    pub regressors: Vec<String>,
    pub add_intercept: bool,
}

impl CsvSchema {
    pub fn new(response: impl Into<String>, regressors: Vec<String>) -> Result<Self> {
        let response = response.into();
        if regressors.is_empty() {
            return Err(Error::InvalidArgument("at least one regressor is required".into()));
        }
        if regressors.contains(&response) {
            return Err(Error::InvalidArgument(format!(
                "response '{response}' also listed as a regressor"
            )));
        }
        Ok(Self {
            response,
            regressors,
            add_intercept: true,
        })
    }

    pub fn without_intercept(mut self) -> Self {
        self.add_intercept = false;
        self
    }
}

pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema) -> Result<Dataset> {
    let path = path.as_ref();
    let mut file = File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::FileNotFound(path.display().to_string()),
        _ => Error::Io(e.to_string()),
    })?;
    let mut text = String::new();
    file.read_to_string(&mut text).map_err(|e| Error::Io(e.to_string()))?;
    parse_csv(&text, schema)
}

/// Comma separated, header row first, `.` as decimal separator.
pub fn parse_csv(text: &str, schema: &CsvSchema) -> Result<Dataset> {
    if text.trim().is_empty() {
        return Err(Error::EmptyFile);
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Io(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let locate = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let y_idx = locate(&schema.response)?;
    let x_idx = schema
        .regressors
        .iter()
        .map(|r| locate(r))
        .collect::<Result<Vec<_>>>()?;

    let mut y = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); x_idx.len()];
    for (r, record) in reader.records().enumerate() {
        // 1-based line number in the file, header is line 1
        let row = r + 2;
        let record = record.map_err(|e| Error::Io(e.to_string()))?;
        let cell = |idx: usize, name: &str| -> Result<f64> {
            let raw = record.get(idx).unwrap_or("");
            match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::Parse {
                    row,
                    column: name.to_string(),
                    value: raw.to_string(),
                }),
            }
        };
        y.push(cell(y_idx, &schema.response)?);
        for (c, (&idx, name)) in x_idx.iter().zip(&schema.regressors).enumerate() {
            columns[c].push(cell(idx, name)?);
        }
    }
    if y.is_empty() {
        return Err(Error::EmptyFile);
    }

    let regressors = Matrix::from_columns(&columns)?;
    if schema.add_intercept {
        Dataset::with_intercept(y, &regressors, &schema.regressors)
    } else {
        Dataset::new(y, regressors, schema.regressors.clone(), false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct YorkParams {
    m: usize,
}

impl YorkParams {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("block multiplier m must be >= 1".into()));
        }
        Ok(Self { m })
    }

    pub fn m(&self) -> usize {
        self.m
    }
}

/// The `100·m × 3` binary design: `49m` rows of `(1,0,0)`, `m` of `(1,1,0)`,
/// `m` of `(1,0,1)` and `49m` of `(1,1,1)`.
pub fn york_design(params: YorkParams) -> Matrix {
    let m = params.m;
    let blocks: [(usize, [f64; 3]); 4] = [
        (49 * m, [1.0, 0.0, 0.0]),
        (m, [1.0, 1.0, 0.0]),
        (m, [1.0, 0.0, 1.0]),
        (49 * m, [1.0, 1.0, 1.0]),
    ];
    let mut data = Vec::with_capacity(300 * m);
    for (count, row) in blocks {
        for _ in 0..count {
            data.extend_from_slice(&row);
        }
    }
    Matrix::new(100 * m, 3, data).expect("york design is well formed")
}

pub fn york_column_names() -> Vec<String> {
    vec![INTERCEPT_NAME.to_string(), "x1".to_string(), "x2".to_string()]
}

/// Unit-length cross-product matrix, its eigenvalues and the condition
/// number of the York design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YorkAnalysis {
    pub m: usize,
    pub n: usize,
    pub gram: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub cn: f64,
}

pub fn york_analysis(params: YorkParams) -> Result<YorkAnalysis> {
    let x = york_design(params);
    let scaled = unit_length_scale(&x)?;
    let gram = scaled.gram();
    let eigenvalues = symmetric_eigenvalues(&gram)?;
    let cn = (eigenvalues[0] / eigenvalues[eigenvalues.len() - 1]).sqrt();
    Ok(YorkAnalysis {
        m: params.m,
        n: x.rows(),
        gram: (0..gram.rows()).map(|i| gram.row(i).to_vec()).collect(),
        eigenvalues,
        cn,
    })
}
