//! Random variate generators used by the Gibbs sampler.

mod multivariate;
mod polya_gamma;
mod posterior;
mod stream;
mod univariate;

pub use multivariate::{sample_inverse_wishart, sample_mvn};
pub use polya_gamma::{
    pg_mean, pg_variance, sample_polya_gamma, PolyaGamma, DEFAULT_GAUSSIAN_THRESHOLD, SERIES_TERMS,
};
pub use posterior::{fast_gaussian_posterior, gaussian_posterior_dense, gaussian_posterior_fast};
pub use stream::RandomStream;
pub use univariate::{sample_crt, sample_gamma, sample_gig};

pub(crate) use multivariate::standard_normal_vector;
pub(crate) use posterior::{dense_draw_with_factor, fast_draw_with_factor};
pub(crate) use univariate::{crt_f64, gamma_f64, gig_f64};
