//! Run configuration: one flat TOML table with kebab-case keys, overridable
//! field by field from the command line.

use std::path::{Path, PathBuf};

use clap::Args;
use mtmbsp::gibbs::{EtaShape, Hyperparameters};
use mtmbsp::selection::{ScreeningRule, DEFAULT_GAMMA};
use mtmbsp::simulate::{scenario_mix, Method, ScenarioSpec, SCENARIOS};
use mtmbsp::{ChainConfig, TwoStepOptions};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct RunConfig {
    pub tau: f64,
    pub u: f64,
    pub a: f64,
    /// Inverse-Wishart degrees of freedom; the number of responses when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d1: Option<f64>,
    pub d2: f64,
    pub pg_threshold: u32,
    pub eta_shape: EtaShape,

    // Second-chain prior of the two-step fit; unset fields copy the first.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step2_tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step2_u: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step2_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step2_d2: Option<f64>,

    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    pub keep_sigma: bool,

    /// `fit` defaults to one-step, `simulate` to both.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    pub gamma: f64,
    pub screening: ScreeningRule,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schema: Option<PathBuf>,
    /// Append a column of ones to X.
    pub intercept: bool,
    /// Center and scale each non-constant column of X.
    pub standardize: bool,

    /// `all`, or comma-separated ids.
    pub scenario: String,
    pub p: Vec<usize>,
    pub n: usize,
    pub s0: usize,
    pub ar_corr: f64,
    pub sigma2: f64,
    pub rho: f64,
    pub r_true: f64,
    pub c1: f64,
    pub c2: f64,
    pub replicates: usize,

    pub output: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let h = Hyperparameters::horseshoe(1);
        let c = ChainConfig::default();
        Self {
            tau: h.tau,
            u: h.u,
            a: h.a,
            d1: None,
            d2: h.d2,
            pg_threshold: h.pg_threshold,
            eta_shape: h.eta_shape,
            step2_tau: None,
            step2_u: None,
            step2_a: None,
            step2_d2: None,
            iterations: c.iterations,
            burn_in: c.burn_in,
            thin: c.thin,
            seed: c.seed,
            keep_sigma: c.keep_sigma,
            method: None,
            gamma: DEFAULT_GAMMA,
            screening: ScreeningRule::Literal,
            x: None,
            y: None,
            schema: None,
            intercept: false,
            standardize: false,
            scenario: "1".into(),
            p: vec![500],
            n: 150,
            s0: 10,
            ar_corr: 0.5,
            sigma2: 1.0,
            rho: 0.5,
            r_true: 50.0,
            c1: 10.0,
            c2: 1.0,
            replicates: 10,
            output: PathBuf::from("mtmbsp-out"),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::validation(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn hyper(&self, q: usize) -> Hyperparameters {
        Hyperparameters {
            tau: self.tau,
            u: self.u,
            a: self.a,
            d1: self.d1.unwrap_or(q as f64),
            d2: self.d2,
            pg_threshold: self.pg_threshold,
            eta_shape: self.eta_shape,
        }
    }

    fn step2_hyper(&self, q: usize) -> Option<Hyperparameters> {
        if self.step2_tau.is_none() && self.step2_u.is_none() && self.step2_a.is_none() && self.step2_d2.is_none() {
            return None;
        }
        let h = self.hyper(q);
        Some(Hyperparameters {
            tau: self.step2_tau.unwrap_or(h.tau),
            u: self.step2_u.unwrap_or(h.u),
            a: self.step2_a.unwrap_or(h.a),
            d2: self.step2_d2.unwrap_or(h.d2),
            ..h
        })
    }

    pub fn chain(&self) -> ChainConfig {
        ChainConfig {
            iterations: self.iterations,
            burn_in: self.burn_in,
            thin: self.thin,
            seed: self.seed,
            keep_sigma: self.keep_sigma,
        }
    }

    pub fn two_step(&self, q: usize) -> TwoStepOptions {
        TwoStepOptions { gamma: self.gamma, rule: self.screening, step2_hyper: self.step2_hyper(q) }
    }

    pub fn scenarios(&self) -> Result<Vec<u8>> {
        if self.scenario.trim() == "all" {
            return Ok(SCENARIOS.to_vec());
        }
        let mut ids = Vec::new();
        for part in self.scenario.split(',') {
            let id: u8 = part
                .trim()
                .parse()
                .map_err(|_| CliError::validation(format!("unknown scenario {part:?}; valid ids are 1-6 or all")))?;
            scenario_mix(id)?;
            ids.push(id);
        }
        Ok(ids)
    }

    pub fn scenario_spec(&self, id: u8, p: usize) -> Result<ScenarioSpec> {
        Ok(ScenarioSpec {
            n: self.n,
            s0: self.s0,
            ar_corr: self.ar_corr,
            sigma2: self.sigma2,
            rho: self.rho,
            r_true: self.r_true,
            c1: self.c1,
            c2: self.c2,
            ..ScenarioSpec::scenario(id, p, self.seed)?
        })
    }

    /// Checks everything that does not depend on the data.
    pub fn validate_common(&self) -> Result<()> {
        self.chain().validate()?;
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(CliError::validation(format!("gamma must be positive, got {}", self.gamma)));
        }
        Ok(())
    }

    /// Prior checks once the number of responses is known.
    pub fn validate_for(&self, q: usize) -> Result<()> {
        self.hyper(q).validate(q)?;
        if let Some(h2) = self.step2_hyper(q) {
            h2.validate(q).map_err(|e| CliError::validation(format!("step-2 prior: {e}")))?;
        }
        Ok(())
    }

    pub fn validate_simulation(&self) -> Result<()> {
        self.validate_common()?;
        if self.replicates == 0 {
            return Err(CliError::validation("replicates must be at least 1"));
        }
        if self.p.is_empty() {
            return Err(CliError::validation("p needs at least one value"));
        }
        for id in self.scenarios()? {
            for &p in &self.p {
                let spec = self.scenario_spec(id, p)?;
                spec.validate()?;
                self.validate_for(spec.q())?;
            }
        }
        Ok(())
    }
}

/// Parses a kebab-case enum value through its serde representation.
pub fn parse_kebab<T: DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    parse_kebab(s)
}

fn parse_eta(s: &str) -> std::result::Result<EtaShape, String> {
    parse_kebab(s)
}

fn parse_rule(s: &str) -> std::result::Result<ScreeningRule, String> {
    parse_kebab(s)
}

/// Command-line overrides of [`RunConfig`], one flag per field.
#[derive(Args, Clone, Debug, Default)]
pub struct Overrides {
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub u: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub d1: Option<f64>,
    #[arg(long)]
    pub d2: Option<f64>,
    #[arg(long)]
    pub pg_threshold: Option<u32>,
    /// a-plus-u or a-only
    #[arg(long, value_parser = parse_eta)]
    pub eta_shape: Option<EtaShape>,
    #[arg(long)]
    pub step2_tau: Option<f64>,
    #[arg(long)]
    pub step2_u: Option<f64>,
    #[arg(long)]
    pub step2_a: Option<f64>,
    #[arg(long)]
    pub step2_d2: Option<f64>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub keep_sigma: Option<bool>,
    /// one-step, two-step or both
    #[arg(long, value_parser = parse_method)]
    pub method: Option<Method>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// literal or outside-band
    #[arg(long, value_parser = parse_rule)]
    pub screening: Option<ScreeningRule>,
    #[arg(long)]
    pub x: Option<PathBuf>,
    #[arg(long)]
    pub y: Option<PathBuf>,
    #[arg(long)]
    pub schema: Option<PathBuf>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub intercept: Option<bool>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub standardize: Option<bool>,
    /// all, or comma-separated ids 1-6
    #[arg(long)]
    pub scenario: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub p: Option<Vec<usize>>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub s0: Option<usize>,
    #[arg(long)]
    pub ar_corr: Option<f64>,
    #[arg(long)]
    pub sigma2: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub r_true: Option<f64>,
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long)]
    pub c2: Option<f64>,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(self, c: &mut RunConfig) {
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { c.$f = v; } )* };
        }
        macro_rules! set_opt {
            ($($f:ident),*) => { $( if self.$f.is_some() { c.$f = self.$f; } )* };
        }
        set!(tau, u, a, d2, pg_threshold, eta_shape, iterations, burn_in, thin, seed, keep_sigma, gamma, screening);
        set!(intercept, standardize, scenario, p, n, s0, ar_corr, sigma2, rho, r_true, c1, c2, replicates, output);
        set_opt!(d1, step2_tau, step2_u, step2_a, step2_d2, method, x, y, schema);
    }
}
