use nalgebra::DMatrix;

use super::ChainConfig;
use crate::error::{Error, Result};
use crate::scalar::{lit, wide, Real};
use crate::selection::CredibleSummary;

/// Retained draws of one chain.
///
/// `B` draws are stored cell-major: the draws of cell `(j, k)` are
/// contiguous, in retention order.
#[derive(Clone, Debug, PartialEq)]
pub struct PosteriorSamples<T: Real> {
    p: usize,
    q: usize,
    draws: usize,
    b: Vec<T>,
    sigma: Option<Vec<T>>,
    r_columns: Vec<usize>,
    r: Vec<T>,
    config: ChainConfig,
}

impl<T: Real> PosteriorSamples<T> {
    pub(crate) fn with_capacity(p: usize, q: usize, r_columns: Vec<usize>, config: ChainConfig) -> Self {
        let draws = config.retained();
        Self {
            p,
            q,
            draws: 0,
            b: vec![T::zero(); p * q * draws],
            sigma: config.keep_sigma.then(|| Vec::with_capacity(q * q * draws)),
            r: Vec::with_capacity(r_columns.len() * draws),
            r_columns,
            config,
        }
    }

    /// Rebuilds samples from stored arrays; `b` is cell-major with `draws`
    /// values per cell, `r` is draw-major.
    pub fn from_parts(
        p: usize,
        q: usize,
        draws: usize,
        b: Vec<T>,
        sigma: Option<Vec<T>>,
        r_columns: Vec<usize>,
        r: Vec<T>,
        config: ChainConfig,
    ) -> Result<Self> {
        if draws == 0 || b.len() != p * q * draws || r.len() != r_columns.len() * draws {
            return Err(Error::contract("sample arrays do not match the stated dimensions"));
        }
        if let Some(s) = &sigma {
            if s.len() != q * q * draws {
                return Err(Error::contract("Sigma draws do not match the stated dimensions"));
            }
        }
        Ok(Self { p, q, draws, b, sigma, r_columns, r, config })
    }

    pub(crate) fn push(&mut self, b: &DMatrix<T>, sigma: &DMatrix<T>, r: &[Option<T>]) {
        let total = self.config.retained();
        let s = self.draws;
        assert!(s < total, "more draws pushed than retained");
        for k in 0..self.q {
            for j in 0..self.p {
                self.b[(j + k * self.p) * total + s] = b[(j, k)];
            }
        }
        if let Some(store) = &mut self.sigma {
            store.extend(sigma.iter().copied());
        }
        for &k in &self.r_columns {
            self.r.push(r[k].expect("negative-binomial column has a dispersion"));
        }
        self.draws += 1;
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn draws(&self) -> usize {
        self.draws
    }

    pub fn config(&self) -> &ChainConfig {
        &self.config
    }

    /// All draws of cell `(j, k)`.
    pub fn cell(&self, j: usize, k: usize) -> &[T] {
        let start = (j + k * self.p) * self.draws;
        &self.b[start..start + self.draws]
    }

    /// Cell-major `B` draws.
    pub fn b_draws(&self) -> &[T] {
        &self.b
    }

    /// Draw-major `Sigma` draws (column-major within a draw), when kept.
    pub fn sigma_draws(&self) -> Option<&[T]> {
        self.sigma.as_deref()
    }

    pub fn r_columns(&self) -> &[usize] {
        &self.r_columns
    }

    /// Draw-major dispersion draws, one value per negative-binomial column.
    pub fn r_draws(&self) -> &[T] {
        &self.r
    }

    pub fn quantile(&self, j: usize, k: usize, level: f64) -> T {
        let mut v = self.cell(j, k).to_vec();
        sort(&mut v);
        quantile_sorted(&v, level)
    }

    pub fn median(&self, j: usize, k: usize) -> T {
        self.quantile(j, k, 0.5)
    }

    /// Cellwise mean of the `B` draws.
    pub fn mean(&self) -> DMatrix<T> {
        let n = lit::<T>(self.draws as f64);
        DMatrix::from_fn(self.p, self.q, |j, k| self.cell(j, k).iter().fold(T::zero(), |a, &v| a + v) / n)
    }

    /// Lower, median and upper quantiles of every cell.
    pub fn summary(&self, lower: f64, upper: f64) -> Result<CredibleSummary<T>> {
        if !(0.0..=1.0).contains(&lower) || !(0.0..=1.0).contains(&upper) || lower > upper {
            return Err(Error::parameter(format!("invalid quantile levels ({lower}, {upper})")));
        }
        let mut lo = DMatrix::zeros(self.p, self.q);
        let mut med = DMatrix::zeros(self.p, self.q);
        let mut hi = DMatrix::zeros(self.p, self.q);
        let mut buf = Vec::with_capacity(self.draws);
        for k in 0..self.q {
            for j in 0..self.p {
                buf.clear();
                buf.extend_from_slice(self.cell(j, k));
                sort(&mut buf);
                lo[(j, k)] = quantile_sorted(&buf, lower);
                med[(j, k)] = quantile_sorted(&buf, 0.5);
                hi[(j, k)] = quantile_sorted(&buf, upper);
            }
        }
        CredibleSummary::new(lo, med, hi)
    }
}

fn sort<T: Real>(v: &mut [T]) {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
}

/// Linear-interpolation ("type 7") quantile of sorted values:
/// `h = (n - 1) level`, interpolating between `x[floor h]` and `x[ceil h]`.
pub fn quantile_sorted<T: Real>(sorted: &[T], level: f64) -> T {
    let n = sorted.len();
    assert!(n > 0, "quantile of an empty sample");
    let h = (n - 1) as f64 * level.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = h - lo as f64;
    if frac == 0.0 {
        return sorted[lo];
    }
    let (a, b) = (wide(sorted[lo]), wide(sorted[hi]));
    lit(a + frac * (b - a))
}
