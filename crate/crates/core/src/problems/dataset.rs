//! CSV ingestion for the robust-regression experiments: numeric feature
//! columns plus one two-class label column, standardized to zero mean and
//! unit variance per feature.

use std::path::Path;

use nalgebra::DVector;

use crate::core::Vector;
use crate::error::{Error, Result};

/// Which column holds the label.
#[derive(Debug, Clone)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
}

#[derive(Debug, Clone)]
pub struct Dataset {
    /// Standardized feature rows `a_i`.
    pub features: Vec<Vector>,
    /// Labels in `{-1, +1}`.
    pub labels: Vec<f64>,
    pub n_rows: usize,
    pub n_features: usize,
    /// Feature columns whose variance vanished; unit scale was substituted.
    pub constant_columns: Vec<usize>,
    /// The two raw label values mapped to `-1` and `+1`, in that order.
    pub label_values: (String, String),
}

pub fn load_csv(path: &Path, label: &LabelColumn) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)?;
    parse_csv(&text, label)
}

pub fn parse_csv(text: &str, label: &LabelColumn) -> Result<Dataset> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::CsvParse {
        line: 1,
        message: "empty file".into(),
    })?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let label_idx = match label {
        LabelColumn::Index(i) => {
            if *i >= columns.len() {
                return Err(Error::CsvParse {
                    line: 1,
                    message: format!("label index {i} out of range ({} columns)", columns.len()),
                });
            }
            *i
        }
        LabelColumn::Name(name) => columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::CsvParse {
                line: 1,
                message: format!("label column '{name}' not found"),
            })?,
    };
    let n_features = columns.len() - 1;
    if n_features == 0 {
        return Err(Error::CsvParse {
            line: 1,
            message: "no feature columns".into(),
        });
    }

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut raw_labels: Vec<String> = Vec::new();
    for (lineno, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != columns.len() {
            return Err(Error::CsvParse {
                line: lineno + 1,
                message: format!(
                    "expected {} fields, got {}",
                    columns.len(),
                    fields.len()
                ),
            });
        }
        let mut row = Vec::with_capacity(n_features);
        for (ci, field) in fields.iter().enumerate() {
            if ci == label_idx {
                raw_labels.push((*field).to_string());
                continue;
            }
            let value: f64 = field.parse().map_err(|_| Error::CsvParse {
                line: lineno + 1,
                message: format!("non-numeric feature '{field}' in column {ci}"),
            })?;
            if !value.is_finite() {
                return Err(Error::CsvParse {
                    line: lineno + 1,
                    message: format!("non-finite feature in column {ci}"),
                });
            }
            row.push(value);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Dataset("no data rows".into()));
    }

    // two-class label mapping, first-seen order -> (-1, +1)
    let mut classes: Vec<String> = Vec::new();
    for l in &raw_labels {
        if !classes.contains(l) {
            classes.push(l.clone());
        }
    }
    if classes.len() != 2 {
        return Err(Error::Dataset(format!(
            "expected exactly 2 label classes, found {}",
            classes.len()
        )));
    }
    let labels: Vec<f64> = raw_labels
        .iter()
        .map(|l| if *l == classes[0] { -1.0 } else { 1.0 })
        .collect();

    // standardize features
    let n = rows.len() as f64;
    let mut constant_columns = Vec::new();
    for c in 0..n_features {
        let mean: f64 = rows.iter().map(|r| r[c]).sum::<f64>() / n;
        let var: f64 = rows.iter().map(|r| (r[c] - mean).powi(2)).sum::<f64>() / n;
        let scale = if var > 0.0 { var.sqrt() } else { 1.0 };
        if var == 0.0 {
            constant_columns.push(c);
        }
        for r in rows.iter_mut() {
            r[c] = (r[c] - mean) / scale;
        }
    }
    if !constant_columns.is_empty() {
        eprintln!(
            "warning: {} constant feature column(s) kept at unit scale: {:?}",
            constant_columns.len(),
            constant_columns
        );
    }

    let features: Vec<Vector> = rows.into_iter().map(DVector::from_vec).collect();
    Ok(Dataset {
        n_rows: features.len(),
        n_features,
        features,
        labels,
        constant_columns,
        label_values: (classes[0].clone(), classes[1].clone()),
    })
}
