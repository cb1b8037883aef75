//! Response schema, the exponent pair `(f1, f2)` of the logistic-family
//! likelihood `exp(theta)^f1 / (1 + exp(theta))^f2`, and dataset validation.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, wide, Real};

/// Number of trials of a binomial column, either shared or per row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Trials {
    Fixed(u32),
    PerRow(Vec<u32>),
}

impl Trials {
    pub fn at(&self, row: usize) -> u32 {
        match self {
            Trials::Fixed(m) => *m,
            Trials::PerRow(v) => v[row],
        }
    }
}

/// Distribution family of one response column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ResponseKind {
    Gaussian,
    Bernoulli,
    Binomial { trials: Trials },
    /// Negative binomial with success probability `logistic(theta)`; the
    /// dispersion `r` gets a Gamma(c1, c2) prior and starts at `r_init`.
    #[serde(rename = "negbinomial", rename_all = "kebab-case")]
    NegBinomial { r_init: f64, c1: f64, c2: f64 },
}

impl ResponseKind {
    pub fn is_gaussian(&self) -> bool {
        matches!(self, ResponseKind::Gaussian)
    }

    pub fn is_negbinomial(&self) -> bool {
        matches!(self, ResponseKind::NegBinomial { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ResponseKind::Gaussian => "gaussian",
            ResponseKind::Bernoulli => "bernoulli",
            ResponseKind::Binomial { .. } => "binomial",
            ResponseKind::NegBinomial { .. } => "negbinomial",
        }
    }

    fn check_parameters(&self) -> std::result::Result<(), String> {
        match self {
            ResponseKind::Binomial { trials: Trials::Fixed(0) } => Err("binomial trials must be >= 1".into()),
            ResponseKind::NegBinomial { r_init, c1, c2 } => {
                for (name, v) in [("r-init", r_init), ("c1", c1), ("c2", c2)] {
                    if !(*v > 0.0 && v.is_finite()) {
                        return Err(format!("negative binomial {name} must be positive, got {v}"));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Ordered column kinds; column `k` describes column `k` of the response matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResponseSchema {
    kinds: Vec<ResponseKind>,
}

impl ResponseSchema {
    pub fn new(kinds: Vec<ResponseKind>) -> Result<Self> {
        if kinds.is_empty() {
            return Err(Error::parameter("schema needs at least one response column"));
        }
        for (k, kind) in kinds.iter().enumerate() {
            kind.check_parameters().map_err(|m| Error::parameter(format!("column {k}: {m}")))?;
        }
        Ok(Self { kinds })
    }

    pub fn kinds(&self) -> &[ResponseKind] {
        &self.kinds
    }

    pub fn q(&self) -> usize {
        self.kinds.len()
    }

    pub fn kind(&self, k: usize) -> &ResponseKind {
        &self.kinds[k]
    }

    /// Indices of negative-binomial columns.
    pub fn negbinomial_columns(&self) -> Vec<usize> {
        (0..self.q()).filter(|&k| self.kinds[k].is_negbinomial()).collect()
    }
}

/// `(f1, f2)` for a discrete cell. `r` is the current dispersion of a
/// negative-binomial column and is ignored for the other kinds.
pub fn f_values<T: Real>(kind: &ResponseKind, row: usize, y: T, r: T) -> Result<(T, T)> {
    match kind {
        ResponseKind::Gaussian => Err(Error::contract("Gaussian responses have no f-values")),
        ResponseKind::Bernoulli => Ok((y, T::one())),
        ResponseKind::Binomial { trials } => Ok((y, lit(trials.at(row) as f64))),
        ResponseKind::NegBinomial { .. } => Ok((y, y + r)),
    }
}

/// `kappa = f1 - f2 / 2`, the linear coefficient left after writing
/// `e^(f1 theta) / (1 + e^theta)^f2` as a Pólya-Gamma mixture of Gaussians.
#[inline]
pub fn kappa<T: Real>(f1: T, f2: T) -> T {
    f1 - f2 * lit(0.5)
}

/// Working response `z` of one cell: `y` itself for Gaussian columns,
/// `kappa / omega` for discrete ones.
///
/// A cell with `f2 = 0` (a zero-trial binomial row) carries no information:
/// its latent weight is zero and `z` is defined as zero.
pub fn latent_z<T: Real>(kind: &ResponseKind, y: T, omega: T, f1: T, f2: T) -> Result<T> {
    if kind.is_gaussian() {
        return Ok(y);
    }
    if f2 == T::zero() && f1 == T::zero() {
        return Ok(T::zero());
    }
    if !(omega > T::zero()) {
        return Err(Error::numerical(format!("latent weight must be positive, got {omega}"), f64::NAN));
    }
    Ok(kappa(f1, f2) / omega)
}

/// One binomial pseudo-column produced by [`expand_multinomial`].
#[derive(Clone, Debug, PartialEq)]
pub struct BinomialColumn {
    pub counts: Vec<u32>,
    pub kind: ResponseKind,
}

/// Stick-breaking expansion of an `n x L` multinomial count table into `L - 1`
/// binomial columns: column `l` holds `y_l` with `M_l = M - sum_{j<l} y_j` trials.
pub fn expand_multinomial(counts: &[Vec<u32>], trials: u32) -> Result<Vec<BinomialColumn>> {
    let classes = counts.first().map_or(0, Vec::len);
    if classes < 3 {
        return Err(Error::parameter(format!("multinomial needs at least 3 classes, got {classes}")));
    }
    let mut cols: Vec<BinomialColumn> = (0..classes - 1)
        .map(|_| BinomialColumn {
            counts: Vec::with_capacity(counts.len()),
            kind: ResponseKind::Binomial { trials: Trials::PerRow(Vec::with_capacity(counts.len())) },
        })
        .collect();
    for (i, row) in counts.iter().enumerate() {
        if row.len() != classes {
            return Err(Error::parameter(format!("row {i} has {} classes, expected {classes}", row.len())));
        }
        let total: u64 = row.iter().map(|&c| c as u64).sum();
        if total > trials as u64 {
            return Err(Error::parameter(format!("row {i}: counts sum to {total} > {trials} trials")));
        }
        let mut remaining = trials;
        for (l, col) in cols.iter_mut().enumerate() {
            col.counts.push(row[l]);
            if let ResponseKind::Binomial { trials: Trials::PerRow(m) } = &mut col.kind {
                m.push(remaining);
            }
            remaining -= row[l];
        }
    }
    Ok(cols)
}

/// One-hot counts (`M = 1`) from class labels in `1..=classes`.
pub fn labels_to_counts(labels: &[u32], classes: u32) -> Result<Vec<Vec<u32>>> {
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            if l == 0 || l > classes {
                return Err(Error::parameter(format!("row {i}: label {l} outside 1..={classes}")));
            }
            let mut row = vec![0; classes as usize];
            row[l as usize - 1] = 1;
            Ok(row)
        })
        .collect()
}

/// Where a validation problem sits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Location {
    Shape,
    Schema { column: usize },
    X { row: usize, column: usize },
    Y { row: usize, column: usize },
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Shape => write!(f, "shape"),
            Location::Schema { column } => write!(f, "schema column {column}"),
            Location::X { row, column } => write!(f, "X[{row}, {column}]"),
            Location::Y { row, column } => write!(f, "Y[{row}, {column}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub location: Location,
    pub message: String,
}

/// Every broken dataset invariant; empty means valid.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, location: Location, message: impl Into<String>) {
        self.violations.push(Violation { location, message: message.into() });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violation(s)", self.violations.len())?;
        for v in self.violations.iter().take(20) {
            write!(f, "; {}: {}", v.location, v.message)?;
        }
        if self.violations.len() > 20 {
            write!(f, "; ...")?;
        }
        Ok(())
    }
}

/// Checks shapes, finiteness and per-kind response support.
pub fn validate_dataset<T: Real>(x: &DMatrix<T>, y: &DMatrix<T>, schema: &ResponseSchema) -> ValidationReport {
    let mut report = ValidationReport::default();
    let (n, p) = x.shape();
    if n < 2 {
        report.push(Location::Shape, format!("need at least 2 observations, got {n}"));
    }
    if p == 0 {
        report.push(Location::Shape, "design matrix has no columns");
    }
    if y.nrows() != n {
        report.push(Location::Shape, format!("X has {n} rows but Y has {}", y.nrows()));
    }
    if y.ncols() != schema.q() {
        report.push(
            Location::Shape,
            format!("schema declares {} columns but Y has {}", schema.q(), y.ncols()),
        );
    }
    for column in 0..p {
        for row in 0..n {
            if !x[(row, column)].is_finite() {
                report.push(Location::X { row, column }, format!("non-finite entry {}", x[(row, column)]));
            }
        }
    }
    for (column, kind) in schema.kinds().iter().enumerate() {
        if let Err(m) = kind.check_parameters() {
            report.push(Location::Schema { column }, m);
        }
        if let ResponseKind::Binomial { trials: Trials::PerRow(m) } = kind {
            if m.len() != y.nrows() {
                report.push(
                    Location::Schema { column },
                    format!("{} per-row trial counts for {} rows", m.len(), y.nrows()),
                );
                continue;
            }
        }
        if column >= y.ncols() {
            continue;
        }
        for row in 0..y.nrows() {
            let v = wide(y[(row, column)]);
            let loc = Location::Y { row, column };
            if !v.is_finite() {
                report.push(loc, format!("non-finite entry {v}"));
                continue;
            }
            let integral = v.fract() == 0.0;
            match kind {
                ResponseKind::Gaussian => {}
                ResponseKind::Bernoulli => {
                    if v != 0.0 && v != 1.0 {
                        report.push(loc, format!("bernoulli response must be 0 or 1, got {v}"));
                    }
                }
                ResponseKind::Binomial { trials } => {
                    let m = trials.at(row) as f64;
                    if !integral || v < 0.0 || v > m {
                        report.push(loc, format!("binomial response must be an integer in [0, {m}], got {v}"));
                    }
                }
                ResponseKind::NegBinomial { .. } => {
                    if !integral || v < 0.0 {
                        report.push(loc, format!("count response must be a nonnegative integer, got {v}"));
                    }
                }
            }
        }
    }
    report
}

/// Design matrix, responses and schema that passed [`validate_dataset`].
#[derive(Clone, Debug)]
pub struct Dataset<T: Real> {
    x: DMatrix<T>,
    y: DMatrix<T>,
    schema: ResponseSchema,
}

impl<T: Real> Dataset<T> {
    pub fn new(x: DMatrix<T>, y: DMatrix<T>, schema: ResponseSchema) -> Result<Self> {
        let report = validate_dataset(&x, &y, &schema);
        if !report.is_empty() {
            return Err(Error::Validation(report));
        }
        Ok(Self { x, y, schema })
    }

    pub fn x(&self) -> &DMatrix<T> {
        &self.x
    }

    pub fn y(&self) -> &DMatrix<T> {
        &self.y
    }

    pub fn schema(&self) -> &ResponseSchema {
        &self.schema
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn q(&self) -> usize {
        self.schema.q()
    }

    /// Same responses with the design restricted to `columns` (in that order).
    pub fn select_columns(&self, columns: &[usize]) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::contract("cannot select an empty set of predictors"));
        }
        Ok(Self { x: self.x.select_columns(columns), y: self.y.clone(), schema: self.schema.clone() })
    }
}
