//! Headered comma-separated matrices and the response schema file.

use std::path::Path;

use mtmbsp::model::{expand_multinomial, labels_to_counts, ResponseKind, ResponseSchema, Trials};
use nalgebra::DMatrix;
use serde::Deserialize;

use crate::error::{CliError, Result};

/// A numeric table with its column names.
#[derive(Clone, Debug)]
pub struct Table {
    pub names: Vec<String>,
    pub values: DMatrix<f64>,
}

/// Reads a comma-separated file with a header row. Errors name the file,
/// line and column of the offending field.
pub fn read_table(path: &Path) -> Result<Table> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(file);
    let names: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    if names.is_empty() {
        return Err(CliError::validation(format!("{}: missing header row", path.display())));
    }
    let mut rows: Vec<f64> = Vec::new();
    let mut n = 0;
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        for (c, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                CliError::validation(format!(
                    "{}:{line}: column {} ({}): cannot parse {field:?} as a number",
                    path.display(),
                    c + 1,
                    names[c]
                ))
            })?;
            if !v.is_finite() {
                return Err(CliError::validation(format!(
                    "{}:{line}: column {} ({}): non-finite value",
                    path.display(),
                    c + 1,
                    names[c]
                )));
            }
            rows.push(v);
        }
        n += 1;
    }
    if n == 0 {
        return Err(CliError::validation(format!("{}: no data rows", path.display())));
    }
    Ok(Table { values: DMatrix::from_row_slice(n, names.len(), &rows), names })
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    let at = e.position().map(|p| format!(":{}", p.line())).unwrap_or_default();
    match e.kind() {
        csv::ErrorKind::Io(_) => CliError::Io(format!("{}{at}: {e}", path.display())),
        _ => CliError::Validation(format!("{}{at}: {e}", path.display())),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemaFile {
    column: Vec<ColumnSpec>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Encoding {
    /// One Y column of class labels `1..=classes`.
    #[default]
    Labels,
    /// `classes` Y columns of counts.
    Counts,
}

/// One entry of the schema file.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ColumnSpec {
    Gaussian,
    Bernoulli,
    Binomial {
        trials: u32,
    },
    #[serde(rename = "negbinomial", rename_all = "kebab-case")]
    NegBinomial {
        r_init: Option<f64>,
        c1: Option<f64>,
        c2: Option<f64>,
    },
    Multinomial {
        classes: u32,
        #[serde(default = "one")]
        trials: u32,
        #[serde(default)]
        encoding: Encoding,
    },
}

fn one() -> u32 {
    1
}

impl ColumnSpec {
    /// Columns of the Y file this entry consumes.
    fn width(&self) -> usize {
        match self {
            ColumnSpec::Multinomial { classes, encoding: Encoding::Counts, .. } => *classes as usize,
            _ => 1,
        }
    }
}

pub fn parse_schema(text: &str, origin: &str) -> Result<Vec<ColumnSpec>> {
    let file: SchemaFile = toml::from_str(text).map_err(|e| CliError::validation(format!("{origin}: {e}")))?;
    if file.column.is_empty() {
        return Err(CliError::validation(format!("{origin}: no [[column]] entries")));
    }
    Ok(file.column)
}

pub fn read_schema(path: &Path) -> Result<Vec<ColumnSpec>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_schema(&text, &path.display().to_string())
}

/// Responses ready for the sampler: multinomial entries are expanded into
/// binomial pseudo-columns.
#[derive(Clone, Debug)]
pub struct Responses {
    pub names: Vec<String>,
    pub values: DMatrix<f64>,
    pub schema: ResponseSchema,
}

/// Applies `specs` to the Y table. Negative-binomial priors default to
/// `c1 = 10`, `c2 = 1` and start the dispersion at `c1 / c2`.
pub fn build_responses(specs: &[ColumnSpec], y: &Table, origin: &str) -> Result<Responses> {
    let declared: usize = specs.iter().map(ColumnSpec::width).sum();
    if declared != y.values.ncols() {
        return Err(CliError::validation(format!(
            "{origin}: schema describes {declared} columns but Y has {} columns",
            y.values.ncols()
        )));
    }
    let n = y.values.nrows();
    let mut names = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut kinds = Vec::new();
    let mut at = 0;
    for spec in specs {
        let width = spec.width();
        let name = &y.names[at];
        let col = |c: usize| -> Vec<f64> { y.values.column(c).iter().copied().collect() };
        match spec {
            ColumnSpec::Gaussian => kinds.push(ResponseKind::Gaussian),
            ColumnSpec::Bernoulli => kinds.push(ResponseKind::Bernoulli),
            ColumnSpec::Binomial { trials } => kinds.push(ResponseKind::Binomial { trials: Trials::Fixed(*trials) }),
            ColumnSpec::NegBinomial { r_init, c1, c2 } => {
                let (c1, c2) = (c1.unwrap_or(10.0), c2.unwrap_or(1.0));
                kinds.push(ResponseKind::NegBinomial { r_init: r_init.unwrap_or(c1 / c2), c1, c2 })
            }
            ColumnSpec::Multinomial { classes, trials, encoding } => {
                let counts = match encoding {
                    Encoding::Labels => {
                        if *trials != 1 {
                            return Err(CliError::validation(format!(
                                "{origin}: column {name}: label encoding needs trials = 1"
                            )));
                        }
                        let labels = integers(&col(at), origin, name)?;
                        labels_to_counts(&labels, *classes)
                            .map_err(|e| CliError::validation(format!("{origin}: column {name}: {e}")))?
                    }
                    Encoding::Counts => {
                        let cols: Vec<Vec<u32>> = (at..at + width)
                            .map(|c| integers(&col(c), origin, &y.names[c]))
                            .collect::<Result<_>>()?;
                        (0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
                    }
                };
                let expanded = expand_multinomial(&counts, *trials)
                    .map_err(|e| CliError::validation(format!("{origin}: column {name}: {e}")))?;
                for (l, b) in expanded.into_iter().enumerate() {
                    names.push(format!("{name}[{}]", l + 1));
                    columns.push(b.counts.iter().map(|&c| c as f64).collect());
                    kinds.push(b.kind);
                }
                at += width;
                continue;
            }
        }
        names.push(name.clone());
        columns.push(col(at));
        at += width;
    }
    let schema = ResponseSchema::new(kinds)?;
    let values = DMatrix::from_fn(n, columns.len(), |i, k| columns[k][i]);
    Ok(Responses { names, values, schema })
}

fn integers(values: &[f64], origin: &str, name: &str) -> Result<Vec<u32>> {
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if v.fract() == 0.0 && (0.0..=u32::MAX as f64).contains(&v) {
                Ok(v as u32)
            } else {
                Err(CliError::validation(format!(
                    "{origin}: column {name}, data row {}: expected a nonnegative integer, got {v}",
                    i + 1
                )))
            }
        })
        .collect()
}

/// Optional preprocessing of the design: z-scoring of non-constant columns
/// and an appended intercept column.
pub fn prepare_design(x: &Table, standardize: bool, intercept: bool) -> Table {
    let mut values = x.values.clone();
    let mut names = x.names.clone();
    if standardize {
        let n = values.nrows() as f64;
        for mut c in values.column_iter_mut() {
            let mean = c.sum() / n;
            let sd = (c.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
            if sd > 0.0 {
                c.apply(|v| *v = (*v - mean) / sd);
            }
        }
    }
    if intercept {
        let p = values.ncols();
        values = values.insert_column(p, 1.0);
        names.push("(intercept)".into());
    }
    Table { names, values }
}
