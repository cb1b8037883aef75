//! Statistical checks shared by the core test suites and the acceptance run.
//! Every reference value is computed here from first principles (closed-form
//! moments, quadrature, dense inversion) rather than taken from the library.

#![allow(dead_code)]

use mtmbsp::distributions::{
    gaussian_posterior_dense, gaussian_posterior_fast, sample_crt, sample_gamma, sample_gig, sample_inverse_wishart,
    sample_mvn, sample_polya_gamma, RandomStream,
};
use mtmbsp::gibbs::{
    update_b, update_eta, update_nu, update_r, update_sigma, update_u, update_w, ChainState, EtaShape, Hyperparameters,
};
use mtmbsp::model::{Dataset, ResponseKind, ResponseSchema};
use nalgebra::{DMatrix, DVector};

pub const N_DRAWS: usize = 100_000;

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    /// Passes when `|estimate - target| <= k * se`.
    pub fn z(name: impl Into<String>, estimate: f64, se: f64, target: f64, k: f64) -> Self {
        let z = (estimate - target) / se;
        Check {
            name: name.into(),
            pass: z.abs() <= k && z.is_finite(),
            detail: format!("estimate {estimate:.6} target {target:.6} se {se:.3e} z {z:+.2}"),
        }
    }

    /// Two-sample comparison of means with independent standard errors.
    pub fn two_sample(name: impl Into<String>, a: (f64, f64), b: (f64, f64), k: f64) -> Self {
        let se = (a.1 * a.1 + b.1 * b.1).sqrt();
        let z = (a.0 - b.0) / se;
        Check {
            name: name.into(),
            pass: z.abs() <= k && z.is_finite(),
            detail: format!("{:.5} vs {:.5} se {se:.3e} z {z:+.2}", a.0, b.0),
        }
    }

    pub fn flag(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), pass, detail: detail.into() }
    }
}

pub fn assert_all(checks: &[Check]) {
    let failed: Vec<String> =
        checks.iter().filter(|c| !c.pass).map(|c| format!("{}: {}", c.name, c.detail)).collect();
    assert!(failed.is_empty(), "failed checks:\n{}", failed.join("\n"));
}

/// Sample mean and its iid standard error.
pub fn mean_se(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

/// Sample variance and the standard error of it, from the fourth central moment.
pub fn var_se(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
    let m4 = x.iter().map(|v| (v - m).powi(4)).sum::<f64>() / n;
    (v, ((m4 - v * v) / n).sqrt())
}

/// Mean with a batch-means standard error for autocorrelated draws.
pub fn batch_mean_se(x: &[f64], batches: usize) -> (f64, f64) {
    let size = x.len() / batches;
    let means: Vec<f64> = (0..batches).map(|b| x[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64).collect();
    let (m, se) = mean_se(&means);
    (m, se)
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

/// KS test at level 0.001 (critical coefficient 1.949).
pub fn ks_check(name: impl Into<String>, a: &[f64], b: &[f64]) -> Check {
    let d = ks_statistic(a, b);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let crit = 1.949 * ((n + m) / (n * m)).sqrt();
    Check::flag(name, d <= crit, format!("D {d:.5} critical {crit:.5}"))
}

/// PG(b, c) mean `(b / 2c) (e^c - 1) / (e^c + 1)`, `b / 4` at `c = 0`.
pub fn pg_mean_formula(b: f64, c: f64) -> f64 {
    if c == 0.0 {
        b / 4.0
    } else {
        b / (2.0 * c) * (c.exp() - 1.0) / (c.exp() + 1.0)
    }
}

/// PG(b, c) variance from its infinite-convolution representation, summed
/// over a million terms.
pub fn pg_variance_series(b: f64, c: f64) -> f64 {
    let pi2 = std::f64::consts::PI.powi(2);
    let shift = c * c / (4.0 * pi2);
    let mut total = 0.0;
    for k in (1..=1_000_000u64).rev() {
        let d = (k as f64 - 0.5).powi(2) + shift;
        total += 1.0 / (d * d);
    }
    b * total / (4.0 * pi2 * pi2)
}

fn draws(n: usize, mut f: impl FnMut() -> f64) -> Vec<f64> {
    (0..n).map(|_| f()).collect()
}

pub fn pg_checks(seed: u64) -> Vec<Check> {
    let mut out = Vec::new();
    let mut id = 0;
    for b in [0.5, 1.0, 2.0, 30.0, 51.0] {
        for c in [0.0, 0.5, 2.0] {
            id += 1;
            let mut s = RandomStream::new(seed, id);
            let x = draws(N_DRAWS, || sample_polya_gamma(b, c, &mut s).unwrap());
            let (m, se) = mean_se(&x);
            out.push(Check::z(format!("PG({b}, {c}) mean"), m, se, pg_mean_formula(b, c), 4.0));
            let (v, vse) = var_se(&x);
            out.push(Check::z(format!("PG({b}, {c}) variance"), v, vse, pg_variance_series(b, c), 4.0));
        }
    }
    let mut s = RandomStream::new(seed, 100);
    let x = draws(N_DRAWS, || sample_polya_gamma(1.0, 0.0, &mut s).unwrap());
    let (m, se) = mean_se(&x);
    out.push(Check::z("PG(1, 0) mean 1/4 (3 SE)", m, se, 0.25, 3.0));
    let mut s = RandomStream::new(seed, 101);
    let x = draws(N_DRAWS, || sample_polya_gamma(2.0, 1.0, &mut s).unwrap());
    let (m, se) = mean_se(&x);
    out.push(Check::z("PG(2, 1) mean tanh(1/2)", m, se, 0.5f64.tanh(), 4.0));
    let mut s = RandomStream::new(seed, 102);
    let pos = draws(N_DRAWS, || sample_polya_gamma(1.0, 2.0, &mut s).unwrap());
    let neg = draws(N_DRAWS, || sample_polya_gamma(1.0, -2.0, &mut s).unwrap());
    out.push(ks_check("PG(1, 2) vs PG(1, -2) KS", &pos, &neg));
    out
}

/// Unnormalised GIG density `x^(lam - 1) exp(-(chi / x + psi x) / 2)`.
fn gig_kernel(x: f64, chi: f64, psi: f64, lam: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    ((lam - 1.0) * x.ln() - 0.5 * (chi / x + psi * x)).exp()
}

/// Composite Simpson rule with `2m` panels over `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let m = 100_000;
    let h = (b - a) / (2 * m) as f64;
    let mut total = f(a) + f(b);
    for i in 1..2 * m {
        total += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    total * h / 3.0
}

/// Mean and variance of GIG(chi, psi, lam) by quadrature on `x = e^t`.
pub fn gig_moments_quadrature(chi: f64, psi: f64, lam: f64) -> (f64, f64) {
    let moment = |k: i32| {
        let f = move |t: f64| {
            let x = t.exp();
            gig_kernel(x, chi, psi, lam) * x.powi(k) * x
        };
        integrate(&f, -60.0, 15.0)
    };
    let z = moment(0);
    let m1 = moment(1) / z;
    let m2 = moment(2) / z;
    (m1, m2 - m1 * m1)
}

pub fn gig_checks(seed: u64) -> Vec<Check> {
    let mut out = Vec::new();
    // chi = 0 reduces to Gamma(lam, psi / 2).
    let mut s = RandomStream::new(seed, 200);
    let gig = draws(N_DRAWS, || sample_gig(0.0, 3.0, 1.7, &mut s).unwrap());
    let gam = draws(N_DRAWS, || sample_gamma(1.7, 1.5, &mut s).unwrap());
    let (m, se) = mean_se(&gig);
    out.push(Check::z("GIG(0, 3, 1.7) mean k/beta", m, se, 1.7 / 1.5, 4.0));
    out.push(ks_check("GIG(0, 2b, k) vs Gamma(k, b) KS", &gig, &gam));
    // psi = 0 reduces to the reciprocal of Gamma(-lam, chi / 2).
    let mut s = RandomStream::new(seed, 201);
    let inv: Vec<f64> = draws(N_DRAWS, || 1.0 / sample_gig(4.0, 0.0, -2.5, &mut s).unwrap());
    let gam = draws(N_DRAWS, || sample_gamma(2.5, 2.0, &mut s).unwrap());
    out.push(ks_check("1/GIG(2b, 0, -k) vs Gamma(k, b) KS", &inv, &gam));
    // Quadrature oracle across the sampler's regimes.
    let grid = [
        (1.0, 1.0, 0.5),
        (1.0, 2.0, -1.0),
        (0.05, 0.05, 0.3),
        (0.01, 0.2, -0.4),
        (5.0, 3.0, 3.5),
        (2.0, 10.0, -3.0),
        (1e-4, 2.0, -1.5),
        (0.3, 0.3, 1.0),
    ];
    for (i, &(chi, psi, lam)) in grid.iter().enumerate() {
        let mut s = RandomStream::new(seed, 210 + i as u64);
        let x = draws(N_DRAWS, || sample_gig(chi, psi, lam, &mut s).unwrap());
        let (mq, vq) = gig_moments_quadrature(chi, psi, lam);
        let (m, se) = mean_se(&x);
        out.push(Check::z(format!("GIG({chi}, {psi}, {lam}) mean"), m, se, mq, 4.0));
        let (v, vse) = var_se(&x);
        out.push(Check::z(format!("GIG({chi}, {psi}, {lam}) variance"), v, vse, vq, 4.0));
    }
    out
}

fn matrix_mean_checks(name: &str, samples: &[DMatrix<f64>], target: &DMatrix<f64>) -> Vec<Check> {
    let q = target.nrows();
    let mut out = Vec::new();
    for a in 0..q {
        for b in 0..=a {
            let x: Vec<f64> = samples.iter().map(|m| m[(a, b)]).collect();
            let (m, se) = mean_se(&x);
            out.push(Check::z(format!("{name} mean[{a},{b}]"), m, se, target[(a, b)], 4.0));
        }
    }
    out
}

pub fn iw_checks(seed: u64) -> Vec<Check> {
    let mut out = Vec::new();
    let mut s = RandomStream::new(seed, 300);
    let scale = DMatrix::<f64>::identity(2, 2);
    let x: Vec<DMatrix<f64>> = (0..N_DRAWS).map(|_| sample_inverse_wishart(10.0, &scale, &mut s).unwrap()).collect();
    out.extend(matrix_mean_checks("IW(10, I2)", &x, &(scale / 7.0)));
    let sym = x.iter().all(|m| m == &m.transpose() && m.clone().cholesky().is_some());
    out.push(Check::flag("IW draws symmetric SPD", sym, ""));
    let scale = DMatrix::<f64>::identity(3, 3) * 5.0;
    let x: Vec<DMatrix<f64>> = (0..N_DRAWS).map(|_| sample_inverse_wishart(6.0, &scale, &mut s).unwrap()).collect();
    out.extend(matrix_mean_checks("IW(6, 5 I3)", &x, &(DMatrix::identity(3, 3) * 2.5)));
    let scale = DMatrix::from_row_slice(2, 2, &[2.0, 0.6, 0.6, 1.0]);
    let x: Vec<DMatrix<f64>> = (0..N_DRAWS).map(|_| sample_inverse_wishart(9.0, &scale, &mut s).unwrap()).collect();
    out.extend(matrix_mean_checks("IW(9, S)", &x, &(scale / 6.0)));
    out
}

pub fn crt_gamma_mvn_checks(seed: u64) -> Vec<Check> {
    let mut out = Vec::new();
    let mut s = RandomStream::new(seed, 400);
    let x = draws(N_DRAWS, || sample_crt(2, 1.0, &mut s).unwrap() as f64);
    let (m, se) = mean_se(&x);
    out.push(Check::z("CRT(2, 1) mean", m, se, 1.5, 4.0));
    let target: f64 = (1..=12).map(|j| 3.5 / (3.5 + j as f64 - 1.0)).sum();
    let x = draws(N_DRAWS, || sample_crt(12, 3.5, &mut s).unwrap() as f64);
    let (m, se) = mean_se(&x);
    out.push(Check::z("CRT(12, 3.5) mean", m, se, target, 4.0));
    let edge = (0..1000).all(|_| sample_crt(0, 2.0, &mut s).unwrap() == 0 && sample_crt(1, 0.3, &mut s).unwrap() == 1);
    out.push(Check::flag("CRT(0) = 0 and CRT(1) = 1", edge, ""));

    let x = draws(N_DRAWS, || sample_gamma(1.0, 1.0, &mut s).unwrap());
    let (m, se) = mean_se(&x);
    out.push(Check::z("Gamma(1, 1) mean", m, se, 1.0, 4.0));
    let x = draws(N_DRAWS, || sample_gamma(0.5, 0.001, &mut s).unwrap());
    let (m, se) = mean_se(&x);
    out.push(Check::z("Gamma(0.5, 0.001) mean", m, se, 500.0, 4.0));
    let x = draws(N_DRAWS, || sample_gamma(10.0, 2.0, &mut s).unwrap());
    let (v, vse) = var_se(&x);
    out.push(Check::z("Gamma(10, 2) variance", v, vse, 2.5, 4.0));

    let cov = DMatrix::from_row_slice(2, 2, &[4.0, 3.0, 3.0, 9.0]);
    let mean = DVector::from_vec(vec![1.0, -2.0]);
    let x: Vec<DVector<f64>> = (0..N_DRAWS).map(|_| sample_mvn(&mean, &cov, &mut s).unwrap()).collect();
    for a in 0..2 {
        let xa: Vec<f64> = x.iter().map(|v| v[a]).collect();
        let (m, se) = mean_se(&xa);
        out.push(Check::z(format!("MVN mean[{a}]"), m, se, mean[a], 4.0));
        let (v, vse) = var_se(&xa);
        out.push(Check::z(format!("MVN var[{a}]"), v, vse, cov[(a, a)], 4.0));
    }
    let prod: Vec<f64> = x.iter().map(|v| (v[0] - 1.0) * (v[1] + 2.0)).collect();
    let (c, cse) = mean_se(&prod);
    out.push(Check::z("MVN covariance (correlation 0.5)", c, cse, 3.0, 4.0));
    out
}

/// Draws of `N(A^{-1} Phi^T alpha, A^{-1})` checked against dense inversion.
fn posterior_instance_checks(
    label: &str,
    phi: &DMatrix<f64>,
    alpha: &DVector<f64>,
    d: &DVector<f64>,
    draws: &[DVector<f64>],
) -> Vec<Check> {
    let p = phi.ncols();
    let a = phi.transpose() * phi + DMatrix::from_diagonal(&d.map(|v| 1.0 / v));
    let cov = a.try_inverse().expect("invertible");
    let mean = &cov * phi.transpose() * alpha;
    let mut out = Vec::new();
    for j in 0..p {
        let x: Vec<f64> = draws.iter().map(|v| v[j]).collect();
        let (m, se) = mean_se(&x);
        out.push(Check::z(format!("{label} mean[{j}]"), m, se, mean[j], 4.0));
    }
    for j in 0..p {
        for l in 0..=j {
            let x: Vec<f64> = draws.iter().map(|v| (v[j] - mean[j]) * (v[l] - mean[l])).collect();
            let (m, se) = mean_se(&x);
            out.push(Check::z(format!("{label} cov[{j},{l}]"), m, se, cov[(j, l)], 4.0));
        }
    }
    out
}

/// Both Gaussian-posterior routes against the dense oracle on every
/// `p <= 8` instance of a small grid.
pub fn posterior_checks(seed: u64, reps: usize) -> Vec<Check> {
    let mut out = Vec::new();
    let mut gen = RandomStream::new(seed, 500);
    for p in 1..=8usize {
        for n in [2usize, 5] {
            let phi = DMatrix::from_fn(n, p, |_, _| gen.standard_normal());
            let alpha = DVector::from_fn(n, |_, _| 2.0 * gen.standard_normal());
            let d = DVector::from_fn(p, |_, _| 0.2 + 2.0 * gen.uniform());
            let mut s = RandomStream::new(seed, 600 + (p * 10 + n) as u64);
            let fast: Vec<DVector<f64>> =
                (0..reps).map(|_| gaussian_posterior_fast(&phi, &alpha, &d, &mut s).unwrap()).collect();
            out.extend(posterior_instance_checks(&format!("fast n={n} p={p}"), &phi, &alpha, &d, &fast));
            let dense: Vec<DVector<f64>> =
                (0..reps).map(|_| gaussian_posterior_dense(&phi, &alpha, &d, &mut s).unwrap()).collect();
            out.extend(posterior_instance_checks(&format!("dense n={n} p={p}"), &phi, &alpha, &d, &dense));
        }
    }
    out
}

/// Criterion-style sampler-correctness suite.
pub fn sampler_suite(seed: u64) -> Vec<Check> {
    let mut out = pg_checks(seed);
    out.extend(gig_checks(seed));
    out.extend(iw_checks(seed));
    out.extend(crt_gamma_mvn_checks(seed));
    out.extend(posterior_checks(seed, N_DRAWS));
    out
}

/// Hyperparameters with finite prior moments for every tracked statistic.
pub fn geweke_hyper(eta_shape: EtaShape) -> Hyperparameters {
    Hyperparameters { tau: 1.0, u: 2.0, a: 5.0, d1: 6.0, d2: 1.0, pg_threshold: 30, eta_shape }
}

struct GewekeModel {
    x: DMatrix<f64>,
    schema: ResponseSchema,
    h: Hyperparameters,
}

impl GewekeModel {
    fn prior_draw(&self, s: &mut RandomStream) -> ChainState<f64> {
        let h = &self.h;
        let (n, p) = self.x.shape();
        let q = self.schema.q();
        let eta = DVector::from_fn(p, |_, _| sample_gamma(h.a, h.tau, s).unwrap());
        let nu = DVector::from_fn(p, |j, _| sample_gamma(h.u, eta[j], s).unwrap());
        let b = DMatrix::from_fn(p, q, |j, _| nu[j].sqrt() * s.standard_normal());
        let sigma = sample_inverse_wishart(h.d1, &(DMatrix::identity(q, q) * h.d2), s).unwrap();
        let mut u = DMatrix::zeros(n, q);
        for i in 0..n {
            let row = sample_mvn(&DVector::zeros(q), &sigma, s).unwrap();
            u.set_row(i, &row.transpose());
        }
        let r = self
            .schema
            .kinds()
            .iter()
            .map(|k| match k {
                ResponseKind::NegBinomial { c1, c2, .. } => Some(sample_gamma(*c1, *c2, s).unwrap()),
                _ => None,
            })
            .collect();
        ChainState { b, u, w: DMatrix::from_element(n, q, 1.0), nu, eta, sigma, r }
    }

    /// Responses given the parameters, then weights given both.
    fn data_draw(&self, st: &mut ChainState<f64>, s: &mut RandomStream) -> Dataset<f64> {
        let theta = &self.x * &st.b + &st.u;
        let (n, q) = theta.shape();
        let y = DMatrix::from_fn(n, q, |i, k| match self.schema.kind(k) {
            ResponseKind::Gaussian => theta[(i, k)] + s.standard_normal(),
            ResponseKind::NegBinomial { .. } => {
                let lambda = sample_gamma(st.r[k].unwrap(), (-theta[(i, k)]).exp(), s).unwrap();
                poisson(lambda, s)
            }
            _ => f64::from(u8::from(s.uniform() < 1.0 / (1.0 + (-theta[(i, k)]).exp()))),
        });
        let d = Dataset::new(self.x.clone(), y, self.schema.clone()).unwrap();
        let key = rand::RngCore::next_u64(s);
        update_w(st, &d, &self.h, &s.child(key)).unwrap();
        d
    }
}

/// Poisson draw by counting unit-rate exponential arrivals.
fn poisson(lambda: f64, s: &mut RandomStream) -> f64 {
    let (mut t, mut k) = (s.exp1(), 0.0);
    while t < lambda {
        t += s.exp1();
        k += 1.0;
    }
    k
}

pub fn geweke_stats(st: &ChainState<f64>) -> [f64; 8] {
    [
        st.b[(0, 0)],
        st.b[(0, 0)].powi(2),
        st.b[(0, 1)].powi(2),
        st.sigma[(0, 0)],
        st.nu[0],
        st.eta[0],
        st.u[(0, 1)].powi(2),
        st.r[1].unwrap_or(0.0),
    ]
}

pub const GEWEKE_NAMES: [&str; 8] = ["B11", "B11^2", "B12^2", "Sigma11", "nu1", "eta1", "U12^2", "r2"];

/// Marginal-conditional versus successive-conditional simulators at
/// n = 20, p = 3, q = 2: a Gaussian column and `second`.
pub fn geweke(second: ResponseKind, eta_shape: EtaShape, retained: usize, thin: usize, seed: u64) -> Vec<Check> {
    let (n, p) = (20usize, 3usize);
    let mut gen = RandomStream::new(seed, 700);
    let model = GewekeModel {
        x: DMatrix::from_fn(n, p, |_, _| gen.standard_normal()),
        schema: ResponseSchema::new(vec![ResponseKind::Gaussian, second]).unwrap(),
        h: geweke_hyper(eta_shape),
    };
    let mut s = RandomStream::new(seed, 701);
    let marginal: Vec<[f64; 8]> = (0..retained).map(|_| geweke_stats(&model.prior_draw(&mut s))).collect();

    let mut s = RandomStream::new(seed, 702);
    let mut st = model.prior_draw(&mut s);
    let mut d = model.data_draw(&mut st, &mut s);
    let burn = 1000;
    let mut successive = Vec::with_capacity(retained);
    let root = RandomStream::new(seed, 703);
    for t in 0..(burn + retained * thin) {
        let it = root.child(t as u64);
        let h = &model.h;
        update_b(&mut st, &d, h, &it.child(0)).unwrap();
        update_u(&mut st, &d, h, &it.child(1)).unwrap();
        update_r(&mut st, &d, h, &it.child(2)).unwrap();
        update_w(&mut st, &d, h, &it.child(3)).unwrap();
        update_nu(&mut st, &d, h, &it.child(4)).unwrap();
        update_eta(&mut st, &d, h, &it.child(5)).unwrap();
        update_sigma(&mut st, &d, h, &it.child(6)).unwrap();
        d = model.data_draw(&mut st, &mut s);
        if t >= burn && (t - burn + 1) % thin == 0 {
            successive.push(geweke_stats(&st));
        }
    }
    let tracked = if model.schema.kind(1).is_negbinomial() { GEWEKE_NAMES.len() } else { GEWEKE_NAMES.len() - 1 };
    (0..tracked)
        .map(|m| {
            let a: Vec<f64> = marginal.iter().map(|v| v[m]).collect();
            let b: Vec<f64> = successive.iter().map(|v| v[m]).collect();
            Check::two_sample(format!("Geweke {}", GEWEKE_NAMES[m]), mean_se(&a), batch_mean_se(&b, 50), 4.0)
        })
        .collect()
}

/// All-Gaussian `q = 1` chain with `nu` and `Sigma = s` held fixed. Marginally
/// over `U`, `y ~ N(X b, (1 + s) I)`, so the posterior of `b` is Gaussian
/// with precision `X^T X / (1 + s) + diag(1 / nu)`.
pub fn conjugate_oracle(seed: u64, iterations: usize) -> Vec<Check> {
    use mtmbsp::gibbs::{Block, Chain, ChainConfig};
    let (n, p) = (40usize, 4usize);
    let (s_fixed, nu_fixed) = (0.5f64, 2.0f64);
    let mut gen = RandomStream::new(seed, 800);
    let x = DMatrix::from_fn(n, p, |_, _| gen.standard_normal());
    let b_true = DVector::from_vec(vec![1.0, -0.5, 0.0, 2.0]);
    let y = DMatrix::from_fn(n, 1, |i, _| {
        (x.row(i) * &b_true)[0] + s_fixed.sqrt() * gen.standard_normal() + gen.standard_normal()
    });
    let schema = ResponseSchema::new(vec![ResponseKind::Gaussian]).unwrap();
    let d = Dataset::new(x.clone(), y.clone(), schema).unwrap();
    let h = Hyperparameters::horseshoe(1);
    let cfg = ChainConfig { iterations, burn_in: 1000, thin: 1, seed, keep_sigma: false };
    let mut state = mtmbsp::gibbs::initialize_state(&d, &h).unwrap();
    state.sigma[(0, 0)] = s_fixed;
    state.nu.fill(nu_fixed);
    let samples = Chain::new(&d, h, cfg)
        .unwrap()
        .with_state(state)
        .unwrap()
        .freeze(Block::Nu)
        .freeze(Block::Eta)
        .freeze(Block::Sigma)
        .run()
        .unwrap();
    let scale = 1.0 / (1.0 + s_fixed);
    let a = x.transpose() * &x * scale + DMatrix::identity(p, p) / nu_fixed;
    let mean = a.try_inverse().unwrap() * x.transpose() * y.column(0) * scale;
    (0..p)
        .map(|j| {
            let (m, se) = batch_mean_se(samples.cell(j, 0), 50);
            Check::z(format!("conjugate posterior mean b{j}"), m, se, mean[j], 3.0)
        })
        .collect()
}
