//! Synthetic data in the six benchmark scenarios and the metric suite used
//! to score one-step and two-step fits.

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample as sample_indices;
use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{gamma_f64, sample_mvn, RandomStream};
use crate::error::{Error, Result};
use crate::gibbs::{run_chain, ChainConfig, Hyperparameters};
use crate::model::{Dataset, ResponseKind, ResponseSchema};
use crate::scalar::{lit, wide, Real};
use crate::selection::{select_active, step_seeds, two_step_fit, CredibleSummary, TwoStepOptions};

/// Valid scenario ids.
pub const SCENARIOS: [u8; 6] = [1, 2, 3, 4, 5, 6];

/// Column kinds of a generated response, before fitting parameters are attached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimKind {
    Gaussian,
    Bernoulli,
    Count,
}

/// Response mix of scenario `id`.
pub fn scenario_mix(id: u8) -> Result<Vec<SimKind>> {
    use SimKind::*;
    Ok(match id {
        1 => vec![Gaussian, Gaussian, Bernoulli, Bernoulli],
        2 => vec![Gaussian, Gaussian, Bernoulli, Bernoulli, Count, Count],
        3 => vec![Count, Count, Count, Gaussian, Gaussian],
        4 => vec![Bernoulli; 4],
        5 => vec![Bernoulli, Bernoulli, Bernoulli, Count, Count],
        6 => vec![Count; 3],
        _ => return Err(Error::parameter(format!("unknown scenario {id}; valid ids are 1-6"))),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub n: usize,
    pub p: usize,
    pub mix: Vec<SimKind>,
    /// Number of nonzero rows of `B0`.
    pub s0: usize,
    /// Lag-one correlation of the AR(1) predictor covariance.
    pub ar_corr: f64,
    pub sigma2: f64,
    pub rho: f64,
    /// Dispersion of generated counts.
    pub r_true: f64,
    /// Magnitude range of Gaussian and Bernoulli coefficients.
    pub coef_cont: (f64, f64),
    /// Magnitude range of count coefficients.
    pub coef_count: (f64, f64),
    /// Prior on the dispersion used when fitting count columns.
    pub c1: f64,
    pub c2: f64,
    pub seed: u64,
}

impl ScenarioSpec {
    pub fn scenario(id: u8, p: usize, seed: u64) -> Result<Self> {
        Ok(Self {
            n: 150,
            p,
            mix: scenario_mix(id)?,
            s0: 10,
            ar_corr: 0.5,
            sigma2: 1.0,
            rho: 0.5,
            r_true: 50.0,
            coef_cont: (0.5, 5.0),
            coef_count: (0.3, 0.6),
            c1: 10.0,
            c2: 1.0,
            seed,
        })
    }

    pub fn q(&self) -> usize {
        self.mix.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.p == 0 || self.mix.is_empty() {
            return Err(Error::parameter("scenario needs n >= 2, p >= 1 and at least one response"));
        }
        if self.s0 == 0 || self.s0 > self.p {
            return Err(Error::parameter(format!("s0 = {} must lie in 1..={}", self.s0, self.p)));
        }
        if !(self.ar_corr > -1.0 && self.ar_corr < 1.0) {
            return Err(Error::parameter(format!("ar-corr must lie in (-1, 1), got {}", self.ar_corr)));
        }
        if !(self.sigma2 > 0.0) || !(self.r_true > 0.0) || !(self.c1 > 0.0) || !(self.c2 > 0.0) {
            return Err(Error::parameter("sigma2, r-true, c1 and c2 must be positive"));
        }
        let q = self.q() as f64;
        if !(self.rho > -1.0 / (q - 1.0).max(1.0) && self.rho < 1.0) {
            return Err(Error::parameter(format!("rho = {} gives a singular random-effect covariance", self.rho)));
        }
        for (lo, hi) in [self.coef_cont, self.coef_count] {
            if !(lo >= 0.0 && hi > lo) {
                return Err(Error::parameter(format!("coefficient range ({lo}, {hi}) is invalid")));
            }
        }
        Ok(())
    }

    /// Schema used to fit the generated data. Count columns start their
    /// dispersion at the prior mean `c1 / c2`.
    pub fn schema(&self) -> Result<ResponseSchema> {
        ResponseSchema::new(
            self.mix
                .iter()
                .map(|k| match k {
                    SimKind::Gaussian => ResponseKind::Gaussian,
                    SimKind::Bernoulli => ResponseKind::Bernoulli,
                    SimKind::Count => ResponseKind::NegBinomial { r_init: self.c1 / self.c2, c1: self.c1, c2: self.c2 },
                })
                .collect(),
        )
    }

    /// True random-effect covariance `sigma2 ((1 - rho) I + rho 11^T)`.
    pub fn sigma_true(&self) -> DMatrix<f64> {
        let q = self.q();
        DMatrix::from_fn(q, q, |a, b| if a == b { self.sigma2 } else { self.sigma2 * self.rho })
    }
}

/// Rows i.i.d. `N(0, Gamma)` with `Gamma_ij = ar_corr^|i-j|`, by the AR(1)
/// recursion along each row.
pub fn generate_design<T: Real>(spec: &ScenarioSpec, s: &mut RandomStream) -> DMatrix<T> {
    let (n, p) = (spec.n, spec.p);
    let phi = spec.ar_corr;
    let innov = (1.0 - phi * phi).sqrt();
    let mut x = DMatrix::zeros(n, p);
    for i in 0..n {
        let mut prev = s.standard_normal();
        x[(i, 0)] = lit(prev);
        for j in 1..p {
            prev = phi * prev + innov * s.standard_normal();
            x[(i, j)] = lit(prev);
        }
    }
    x
}

/// `B0` with `s0` uniformly placed nonzero rows, and those rows' indices
/// in increasing order.
pub fn generate_coefficients<T: Real>(spec: &ScenarioSpec, s: &mut RandomStream) -> (DMatrix<T>, Vec<usize>) {
    let mut rows = sample_indices(s, spec.p, spec.s0).into_vec();
    rows.sort_unstable();
    let mut b = DMatrix::zeros(spec.p, spec.q());
    for &j in &rows {
        for (k, kind) in spec.mix.iter().enumerate() {
            let (lo, hi) = match kind {
                SimKind::Count => spec.coef_count,
                _ => spec.coef_cont,
            };
            let mag = lo + (hi - lo) * s.uniform();
            let sign = if s.bernoulli(0.5) { 1.0 } else { -1.0 };
            b[(j, k)] = lit(sign * mag);
        }
    }
    (b, rows)
}

fn logistic(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

/// Responses given `theta_i = B0^T x_i + u_i` with `u_i ~ N(0, Sigma)`.
/// Counts are negative binomial with success probability `logistic(theta)`
/// and mean `r p / (1 - p)`, drawn as a Poisson-gamma mixture.
pub fn generate_responses<T: Real>(
    spec: &ScenarioSpec,
    x: &DMatrix<T>,
    b0: &DMatrix<T>,
    s: &mut RandomStream,
) -> Result<DMatrix<T>> {
    if x.ncols() != b0.nrows() || b0.ncols() != spec.q() {
        return Err(Error::contract("design, coefficients and scenario disagree in shape"));
    }
    let q = spec.q();
    let sigma = spec.sigma_true();
    let zero = DVector::zeros(q);
    let xb = x.map(wide) * b0.map(wide);
    let mut y = DMatrix::zeros(x.nrows(), q);
    for i in 0..x.nrows() {
        let u = sample_mvn(&zero, &sigma, s)?;
        for (k, kind) in spec.mix.iter().enumerate() {
            let theta = xb[(i, k)] + u[k];
            let v = match kind {
                SimKind::Gaussian => theta + s.standard_normal(),
                SimKind::Bernoulli => f64::from(u8::from(s.bernoulli(logistic(theta)))),
                SimKind::Count => {
                    let odds = theta.exp();
                    let lambda = gamma_f64(spec.r_true, 1.0 / odds, s);
                    poisson(lambda, s) as f64
                }
            };
            y[(i, k)] = lit(v);
        }
    }
    Ok(y)
}

fn poisson(lambda: f64, s: &mut RandomStream) -> u64 {
    use rand_distr::{Distribution, Poisson};
    if !(lambda > 0.0) {
        return 0;
    }
    let lambda = lambda.min(1e15);
    Poisson::new(lambda).map(|d| d.sample(s) as u64).unwrap_or(0)
}

/// One simulated dataset with its truth.
#[derive(Clone, Debug)]
pub struct SimulatedData<T: Real> {
    pub data: Dataset<T>,
    pub b0: DMatrix<T>,
    pub s0: Vec<usize>,
}

/// Draws design, coefficients and responses from independent children of `s`.
pub fn simulate_dataset<T: Real>(spec: &ScenarioSpec, s: &RandomStream) -> Result<SimulatedData<T>> {
    spec.validate()?;
    let x = generate_design(spec, &mut s.child(0));
    let (b0, s0) = generate_coefficients(spec, &mut s.child(1));
    let y = generate_responses(spec, &x, &b0, &mut s.child(2))?;
    Ok(SimulatedData { data: Dataset::new(x, y, spec.schema()?)?, b0, s0 })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub rmse: f64,
    pub cp: f64,
    pub sens: f64,
    pub spec: f64,
    pub mcc: f64,
}

impl Metrics {
    pub const NAMES: [&'static str; 5] = ["rmse", "cp", "sens", "spec", "mcc"];

    pub fn values(&self) -> [f64; 5] {
        [self.rmse, self.cp, self.sens, self.spec, self.mcc]
    }
}

impl Confusion {
    pub fn from_sets(selected: &[usize], truth: &[usize], p: usize) -> Self {
        let mut sel = vec![false; p];
        selected.iter().for_each(|&j| sel[j] = true);
        let mut tru = vec![false; p];
        truth.iter().for_each(|&j| tru[j] = true);
        let mut c = Confusion::default();
        for j in 0..p {
            match (sel[j], tru[j]) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, false) => c.tn += 1,
                (false, true) => c.fn_ += 1,
            }
        }
        c
    }

    pub fn sens(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn spec(&self) -> f64 {
        ratio(self.tn, self.tn + self.fp)
    }

    /// Matthews correlation; zero when any marginal count is zero.
    pub fn mcc(&self) -> f64 {
        let (tp, fp, tn, fn_) = (self.tp as f64, self.fp as f64, self.tn as f64, self.fn_ as f64);
        let den = (tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_);
        if den == 0.0 {
            0.0
        } else {
            (tp * tn - fp * fn_) / den.sqrt()
        }
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Scores an estimate against the truth. Coverage counts every cell whose
/// interval `[lower, upper]` contains the true value.
pub fn compute_metrics<T: Real>(
    b_hat: &DMatrix<T>,
    intervals: &CredibleSummary<T>,
    selected: &[usize],
    b0: &DMatrix<T>,
    s0: &[usize],
) -> Result<(Metrics, Confusion)> {
    if b_hat.shape() != b0.shape() || intervals.lower().shape() != b0.shape() {
        return Err(Error::contract("estimate, intervals and truth differ in shape"));
    }
    let (p, q) = b0.shape();
    if selected.iter().chain(s0).any(|&j| j >= p) {
        return Err(Error::contract("row index out of range"));
    }
    let sq: f64 = b_hat.iter().zip(b0.iter()).map(|(&a, &b)| (wide(a) - wide(b)).powi(2)).sum();
    let rmse = (sq / (p * q) as f64).sqrt();
    let covered = (0..p * q)
        .filter(|&c| intervals.lower()[c] <= b0[c] && b0[c] <= intervals.upper()[c])
        .count();
    let conf = Confusion::from_sets(selected, s0, p);
    let m = Metrics { rmse, cp: covered as f64 / (p * q) as f64, sens: conf.sens(), spec: conf.spec(), mcc: conf.mcc() };
    Ok((m, conf))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    OneStep,
    TwoStep,
    Both,
}

/// Scored fit of one method on one replicate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRow {
    pub replicate: usize,
    /// `OneStep` or `TwoStep`.
    pub method: Method,
    pub metrics: Metrics,
    pub confusion: Confusion,
    /// Two-step only: whether every true row survived screening.
    pub sure_screening: Option<bool>,
    /// Two-step only: `|J_n|`.
    pub kn: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub method: Method,
    pub replicates: usize,
    /// Mean and sample standard deviation of each metric, in [`Metrics::NAMES`] order.
    pub mean: [f64; 5],
    pub sd: [f64; 5],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicateFailure {
    pub replicate: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicateTable {
    pub rows: Vec<ReplicateRow>,
    pub aggregates: Vec<Aggregate>,
    pub failures: Vec<ReplicateFailure>,
}

/// Mean and sample SD (zero for a single value) of each metric.
pub fn aggregate(method: Method, rows: &[&ReplicateRow]) -> Aggregate {
    let r = rows.len();
    let mut mean = [0.0; 5];
    let mut sd = [0.0; 5];
    for m in 0..5 {
        let vals: Vec<f64> = rows.iter().map(|row| row.metrics.values()[m]).collect();
        if r == 0 {
            mean[m] = f64::NAN;
            sd[m] = f64::NAN;
            continue;
        }
        mean[m] = vals.iter().sum::<f64>() / r as f64;
        if r > 1 {
            sd[m] = (vals.iter().map(|v| (v - mean[m]).powi(2)).sum::<f64>() / (r - 1) as f64).sqrt();
        }
    }
    Aggregate { method, replicates: r, mean, sd }
}

/// Stream of replicate `index`; its children generate the data, and its
/// first draw seeds the chains.
pub fn replicate_stream(seed: u64, index: usize) -> RandomStream {
    RandomStream::new(seed, 0).child(index as u64)
}

/// Simulates and scores one replicate. The one-step fit is the first chain
/// of the two-step procedure, so `Both` pairs the methods on one chain.
pub fn run_replicate<T: Real>(
    spec: &ScenarioSpec,
    h: &Hyperparameters,
    cfg: &ChainConfig,
    method: Method,
    opts: &TwoStepOptions,
    index: usize,
) -> Result<Vec<ReplicateRow>> {
    let stream = replicate_stream(spec.seed, index);
    let sim: SimulatedData<T> = simulate_dataset(spec, &stream.child(0))?;
    let chain_cfg = ChainConfig { seed: stream.child(1).next_u64(), ..cfg.clone() };
    let one_step_row = |samples: &crate::gibbs::PosteriorSamples<T>| -> Result<ReplicateRow> {
        let summary = samples.summary(0.025, 0.975)?;
        let selected = select_active(&summary);
        let (metrics, confusion) = compute_metrics(summary.median(), &summary, &selected, &sim.b0, &sim.s0)?;
        Ok(ReplicateRow { replicate: index, method: Method::OneStep, metrics, confusion, sure_screening: None, kn: None })
    };
    let mut rows = Vec::new();
    match method {
        Method::OneStep => {
            let cfg1 = ChainConfig { seed: step_seeds(chain_cfg.seed).0, ..chain_cfg };
            let samples = run_chain(&sim.data, h, &cfg1)?;
            rows.push(one_step_row(&samples)?);
        }
        Method::TwoStep | Method::Both => {
            let est = two_step_fit(&sim.data, h, &chain_cfg, opts)?;
            if method == Method::Both {
                rows.push(one_step_row(&est.step1)?);
            }
            let (metrics, confusion) = compute_metrics(&est.b_tilde, &est.summary, &est.selected, &sim.b0, &sim.s0)?;
            let sure = sim.s0.iter().all(|j| est.sets.jn.binary_search(j).is_ok());
            rows.push(ReplicateRow {
                replicate: index,
                method: Method::TwoStep,
                metrics,
                confusion,
                sure_screening: Some(sure),
                kn: Some(est.sets.kn),
            });
        }
    }
    Ok(rows)
}

/// Runs `replicates` independent replicates in parallel. Failed replicates
/// are recorded and excluded from the aggregates.
pub fn run_replicates<T: Real>(
    spec: &ScenarioSpec,
    h: &Hyperparameters,
    cfg: &ChainConfig,
    method: Method,
    opts: &TwoStepOptions,
    replicates: usize,
) -> Result<ReplicateTable> {
    if replicates == 0 {
        return Err(Error::parameter("at least one replicate is required"));
    }
    spec.validate()?;
    h.validate(spec.q())?;
    cfg.validate()?;
    let results: Vec<(usize, Result<Vec<ReplicateRow>>)> = (0..replicates)
        .into_par_iter()
        .map(|r| (r, run_replicate::<T>(spec, h, cfg, method, opts, r)))
        .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (r, res) in results {
        match res {
            Ok(mut v) => rows.append(&mut v),
            Err(e) => failures.push(ReplicateFailure { replicate: r, message: e.to_string() }),
        }
    }
    let methods: &[Method] = match method {
        Method::OneStep => &[Method::OneStep],
        Method::TwoStep => &[Method::TwoStep],
        Method::Both => &[Method::OneStep, Method::TwoStep],
    };
    let aggregates = methods
        .iter()
        .map(|&m| aggregate(m, &rows.iter().filter(|row| row.method == m).collect::<Vec<_>>()))
        .collect();
    Ok(ReplicateTable { rows, aggregates, failures })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn confusion_example() {
        let c = Confusion { tp: 8, fn_: 2, fp: 5, tn: 485 };
        assert!((c.sens() - 0.8).abs() < 1e-15);
        assert!((c.spec() - 485.0 / 490.0).abs() < 1e-15);
        let hand = (8.0 * 485.0 - 5.0 * 2.0) / (13.0f64 * 10.0 * 490.0 * 487.0).sqrt();
        assert!((c.mcc() - hand).abs() < 1e-14);
    }

    #[test]
    fn empty_selection_has_zero_mcc() {
        let truth: Vec<usize> = (0..10).collect();
        let c = Confusion::from_sets(&[], &truth, 500);
        assert_eq!((c.sens(), c.spec(), c.mcc()), (0.0, 1.0, 0.0));
    }

    #[test]
    fn unknown_scenario_lists_valid_ids() {
        let e = scenario_mix(7).unwrap_err().to_string();
        assert!(e.contains("1-6"), "{e}");
    }

    #[test]
    fn scenario_shapes() {
        let q: Vec<usize> = SCENARIOS.iter().map(|&id| scenario_mix(id).unwrap().len()).collect();
        assert_eq!(q, vec![4, 6, 5, 4, 5, 3]);
    }
}
