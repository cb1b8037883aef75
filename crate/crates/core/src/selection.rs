//! Credible-interval variable selection and the two-step estimator for
//! `p >> n`.

use nalgebra::DMatrix;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::distributions::RandomStream;
use crate::error::{Error, Result};
use crate::gibbs::{run_chain, ChainConfig, Hyperparameters, PosteriorSamples};
use crate::model::Dataset;
use crate::scalar::{lit, Real};

/// Default screening slack.
pub const DEFAULT_GAMMA: f64 = 0.02;

/// Per-cell lower, median and upper posterior quantiles (p x q each).
#[derive(Clone, Debug, PartialEq)]
pub struct CredibleSummary<T: Real> {
    lower: DMatrix<T>,
    median: DMatrix<T>,
    upper: DMatrix<T>,
}

impl<T: Real> CredibleSummary<T> {
    pub fn new(lower: DMatrix<T>, median: DMatrix<T>, upper: DMatrix<T>) -> Result<Self> {
        if lower.shape() != median.shape() || median.shape() != upper.shape() {
            return Err(Error::contract("quantile matrices differ in shape"));
        }
        for (idx, ((l, m), u)) in lower.iter().zip(median.iter()).zip(upper.iter()).enumerate() {
            if !(l <= m && m <= u) {
                let (j, k) = (idx % lower.nrows(), idx / lower.nrows());
                return Err(Error::contract(format!("cell ({j}, {k}) has unordered quantiles {l}, {m}, {u}")));
            }
        }
        Ok(Self { lower, median, upper })
    }

    pub fn p(&self) -> usize {
        self.lower.nrows()
    }

    pub fn q(&self) -> usize {
        self.lower.ncols()
    }

    pub fn lower(&self) -> &DMatrix<T> {
        &self.lower
    }

    pub fn median(&self) -> &DMatrix<T> {
        &self.median
    }

    pub fn upper(&self) -> &DMatrix<T> {
        &self.upper
    }
}

/// Rows with at least one credible interval excluding zero.
pub fn select_active<T: Real>(summary: &CredibleSummary<T>) -> Vec<usize> {
    (0..summary.p())
        .filter(|&j| (0..summary.q()).any(|k| summary.lower[(j, k)] > T::zero() || summary.upper[(j, k)] < T::zero()))
        .collect()
}

/// How the candidate set is screened.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScreeningRule {
    /// Keep `j` when some cell has `q025 > -gamma` or some cell has
    /// `q975 < gamma`.
    #[default]
    Literal,
    /// Keep `j` when some interval of row `j` is not contained in `(-gamma, gamma)`.
    OutsideBand,
}

/// Candidate rows for the second step.
pub fn screen_candidates<T: Real>(summary: &CredibleSummary<T>, gamma: f64, rule: ScreeningRule) -> Vec<usize> {
    let g = lit::<T>(gamma);
    (0..summary.p())
        .filter(|&j| {
            let lo = summary.lower.row(j);
            let hi = summary.upper.row(j);
            match rule {
                ScreeningRule::Literal => lo.max() > -g || hi.min() < g,
                ScreeningRule::OutsideBand => lo.iter().zip(hi.iter()).any(|(&l, &u)| l <= -g || u >= g),
            }
        })
        .collect()
}

/// The `K_n = min(n - 1, |A_n|)` rows of `an` with the largest
/// `q_j = |max_k median_jk|`; ties go to the smaller index. Returned in
/// increasing index order.
pub fn rank_top_k<T: Real>(an: &[usize], summary: &CredibleSummary<T>, n: usize) -> (Vec<usize>, usize) {
    let kn = n.saturating_sub(1).min(an.len());
    let mut scored: Vec<(T, usize)> = an.iter().map(|&j| (summary.median.row(j).max().abs(), j)).collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));
    let mut jn: Vec<usize> = scored.into_iter().take(kn).map(|(_, j)| j).collect();
    jn.sort_unstable();
    (jn, kn)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionSets {
    pub a0: Vec<usize>,
    pub an: Vec<usize>,
    pub jn: Vec<usize>,
    pub kn: usize,
}

/// Settings of the two-step procedure beyond the chain configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoStepOptions {
    pub gamma: f64,
    pub rule: ScreeningRule,
    /// Hyperparameters of the second chain; the first chain's when `None`.
    pub step2_hyper: Option<Hyperparameters>,
}

impl Default for TwoStepOptions {
    fn default() -> Self {
        Self { gamma: DEFAULT_GAMMA, rule: ScreeningRule::Literal, step2_hyper: None }
    }
}

#[derive(Clone, Debug)]
pub struct TwoStepEstimate<T: Real> {
    /// p x q; step-2 posterior medians on `jn`, zero elsewhere.
    pub b_tilde: DMatrix<T>,
    /// Rows whose step-2 intervals exclude zero, as original indices.
    pub selected: Vec<usize>,
    /// Step-2 quantiles padded to p rows; rows outside `jn` are `[0, 0, 0]`.
    pub summary: CredibleSummary<T>,
    /// Sets from the step-1 fit (`a0` there is the one-step selection).
    pub sets: SelectionSets,
    pub step1: PosteriorSamples<T>,
    /// `None` when `jn` is empty (the null model).
    pub step2: Option<PosteriorSamples<T>>,
}

impl<T: Real> TwoStepEstimate<T> {
    pub fn is_null_model(&self) -> bool {
        self.step2.is_none()
    }
}

/// Seeds of the two chains, derived from the configured seed.
pub fn step_seeds(seed: u64) -> (u64, u64) {
    let root = RandomStream::new(seed, 0);
    (root.child(1).next_u64(), root.child(2).next_u64())
}

/// Fits all predictors, screens, then refits on the top-ranked candidates.
pub fn two_step_fit<T: Real>(
    d: &Dataset<T>,
    h: &Hyperparameters,
    cfg: &ChainConfig,
    opts: &TwoStepOptions,
) -> Result<TwoStepEstimate<T>> {
    if !(opts.gamma > 0.0) {
        return Err(Error::parameter(format!("gamma must be positive, got {}", opts.gamma)));
    }
    let (seed1, seed2) = step_seeds(cfg.seed);
    let step1 = run_chain(d, h, &ChainConfig { seed: seed1, ..cfg.clone() })?;
    let s1 = step1.summary(0.025, 0.975)?;
    let a0 = select_active(&s1);
    let an = screen_candidates(&s1, opts.gamma, opts.rule);
    let (jn, kn) = rank_top_k(&an, &s1, d.n());
    let sets = SelectionSets { a0, an, jn: jn.clone(), kn };
    let (p, q) = (d.p(), d.q());
    let mut b_tilde = DMatrix::zeros(p, q);
    let mut lower = DMatrix::zeros(p, q);
    let mut upper = DMatrix::zeros(p, q);
    if jn.is_empty() {
        let summary = CredibleSummary::new(lower, b_tilde.clone(), upper)?;
        return Ok(TwoStepEstimate { b_tilde, selected: Vec::new(), summary, sets, step1, step2: None });
    }
    let reduced = d.select_columns(&jn)?;
    let h2 = opts.step2_hyper.as_ref().unwrap_or(h);
    let step2 = run_chain(&reduced, h2, &ChainConfig { seed: seed2, ..cfg.clone() })?;
    let s2 = step2.summary(0.025, 0.975)?;
    for (row, &j) in jn.iter().enumerate() {
        for k in 0..q {
            b_tilde[(j, k)] = s2.median[(row, k)];
            lower[(j, k)] = s2.lower[(row, k)];
            upper[(j, k)] = s2.upper[(row, k)];
        }
    }
    let selected = select_active(&s2).into_iter().map(|row| jn[row]).collect();
    let summary = CredibleSummary::new(lower, b_tilde.clone(), upper)?;
    Ok(TwoStepEstimate { b_tilde, selected, summary, sets, step1, step2: Some(step2) })
}
