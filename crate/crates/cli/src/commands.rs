//! The `fit`, `simulate` and `summarize` subcommands.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use mtmbsp::selection::{select_active, step_seeds};
use mtmbsp::simulate::{run_replicates, Aggregate, Method, Metrics, ReplicateTable};
use mtmbsp::{run_chain, ChainConfig, Dataset64, PosteriorSamples64};
use serde_json::json;

use crate::config::RunConfig;
use crate::draws::DrawsFile;
use crate::error::{CliError, Result};
use crate::input::{build_responses, prepare_design, read_schema, read_table};
use crate::output::{summarize_draws, summary_csv, sha256_file, InputRecord, Manifest, Writer};

const LOWER: f64 = 0.025;
const UPPER: f64 = 0.975;

fn required<'a>(p: &'a Option<PathBuf>, name: &str) -> Result<&'a Path> {
    p.as_deref().ok_or_else(|| CliError::validation(format!("fit needs --{name} (or `{name} = ...` in the config)")))
}

fn draws_of(samples: &PosteriorSamples64, rows: Vec<usize>, p_total: usize, manifest: &str) -> Vec<u8> {
    DrawsFile { samples: samples.clone(), rows, p_total, manifest: manifest.into() }.to_bytes()
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|j| j + 1).collect()
}

/// Fits the configured method to the X/Y/schema files and writes the results
/// into the output directory. Returns that directory.
pub fn fit(cfg: &RunConfig) -> Result<PathBuf> {
    let start = Instant::now();
    cfg.validate_common()?;
    let method = cfg.method.unwrap_or(Method::OneStep);
    let (xp, yp, sp) = (required(&cfg.x, "x")?, required(&cfg.y, "y")?, required(&cfg.schema, "schema")?);
    let x = prepare_design(&read_table(xp)?, cfg.standardize, cfg.intercept);
    let y = read_table(yp)?;
    let responses = build_responses(&read_schema(sp)?, &y, &sp.display().to_string())?;
    if x.values.nrows() != responses.values.nrows() {
        return Err(CliError::validation(format!(
            "{} has {} data rows but {} has {}",
            xp.display(),
            x.values.nrows(),
            yp.display(),
            responses.values.nrows()
        )));
    }
    let q = responses.schema.q();
    cfg.validate_for(q)?;
    let data = Dataset64::new(x.values, responses.values, responses.schema)?;

    let mut inputs = BTreeMap::new();
    for (name, path) in [("x", xp), ("y", yp), ("schema", sp)] {
        inputs.insert(name.to_string(), InputRecord { path: path.to_path_buf(), sha256: sha256_file(path)? });
    }
    let mut out = Writer::new(&cfg.output, Manifest::new("fit", cfg, inputs))?;
    let hash = out.manifest.hash.clone();
    let h = cfg.hyper(q);
    let chain = cfg.chain();
    let p = data.p();
    let mut selection = json!({
        "manifest": hash,
        "method": method,
        "indexing": "1-based",
        "predictors": x.names,
        "responses": responses.names,
    });
    let fit_start = Instant::now();
    if method == Method::OneStep {
        let samples = run_chain(&data, &h, &ChainConfig { seed: step_seeds(chain.seed).0, ..chain })?;
        let summary = samples.summary(LOWER, UPPER)?;
        selection["one-step"] = json!({ "a0": one_based(&select_active(&summary)) });
        out.manifest.timings.insert("sampling-seconds".into(), fit_start.elapsed().as_secs_f64());
        out.file("summary.csv", summary_csv(&summary, LOWER, UPPER, &hash).as_bytes())?;
        out.file("draws.bin", &draws_of(&samples, (0..p).collect(), p, &hash))?;
    } else {
        let est = mtmbsp::two_step_fit(&data, &h, &chain, &cfg.two_step(q))?;
        out.manifest.timings.insert("sampling-seconds".into(), fit_start.elapsed().as_secs_f64());
        selection["one-step"] = json!({ "a0": one_based(&est.sets.a0) });
        selection["two-step"] = json!({
            "an": one_based(&est.sets.an),
            "jn": one_based(&est.sets.jn),
            "kn": est.sets.kn,
            "selected": one_based(&est.selected),
            "null-model": est.is_null_model(),
        });
        out.file("summary.csv", summary_csv(&est.summary, LOWER, UPPER, &hash).as_bytes())?;
        if let Some(s2) = &est.step2 {
            out.file("draws.bin", &draws_of(s2, est.sets.jn.clone(), p, &hash))?;
        }
        if method == Method::Both {
            let s1 = est.step1.summary(LOWER, UPPER)?;
            out.file("summary-one-step.csv", summary_csv(&s1, LOWER, UPPER, &hash).as_bytes())?;
            out.file("draws-one-step.bin", &draws_of(&est.step1, (0..p).collect(), p, &hash))?;
        }
    }
    let text = serde_json::to_string_pretty(&selection).expect("selection serializes") + "\n";
    out.file("selection.json", text.as_bytes())?;
    out.manifest.timings.insert("total-seconds".into(), start.elapsed().as_secs_f64());
    out.finish()
}

/// One simulated cell of the results table.
pub struct Cell {
    pub scenario: u8,
    pub p: usize,
    pub table: ReplicateTable,
}

/// Human-readable plan of a simulation run.
pub fn simulation_plan(cfg: &RunConfig) -> Result<String> {
    cfg.validate_simulation()?;
    let method = cfg.method.unwrap_or(Method::Both);
    let mut s = String::new();
    let mut total = 0;
    for id in cfg.scenarios()? {
        for &p in &cfg.p {
            let q = cfg.scenario_spec(id, p)?.q();
            writeln!(s, "scenario {id}: n={} p={p} q={q}, {} replicates, {}", cfg.n, cfg.replicates, method_name(method))
                .unwrap();
            total += cfg.replicates;
        }
    }
    writeln!(s, "{total} replicates of {} iterations each", cfg.iterations).unwrap();
    Ok(s)
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::OneStep => "one-step",
        Method::TwoStep => "two-step",
        Method::Both => "both",
    }
}

/// Runs every (scenario, p) cell and writes per-replicate, aggregate and
/// `mean (sd)` table outputs.
pub fn simulate(cfg: &RunConfig, progress: &mut dyn FnMut(&str)) -> Result<PathBuf> {
    let start = Instant::now();
    cfg.validate_simulation()?;
    let method = cfg.method.unwrap_or(Method::Both);
    let mut out = Writer::new(&cfg.output, Manifest::new("simulate", cfg, BTreeMap::new()))?;
    let hash = out.manifest.hash.clone();
    let mut cells = Vec::new();
    for id in cfg.scenarios()? {
        for &p in &cfg.p {
            let spec = cfg.scenario_spec(id, p)?;
            let q = spec.q();
            let t = Instant::now();
            let table = run_replicates::<f64>(&spec, &cfg.hyper(q), &cfg.chain(), method, &cfg.two_step(q), cfg.replicates)?;
            let secs = t.elapsed().as_secs_f64();
            out.manifest.timings.insert(format!("scenario-{id}-p-{p}-seconds"), secs);
            progress(&format!(
                "scenario {id} p={p}: {} rows, {} failures, {secs:.1}s",
                table.rows.len(),
                table.failures.len()
            ));
            cells.push(Cell { scenario: id, p, table });
        }
    }
    out.file("replicates.csv", replicates_csv(&cells, &hash).as_bytes())?;
    out.file("aggregate.csv", aggregate_csv(&cells, &hash).as_bytes())?;
    out.file("table.txt", table_text(&cells, &hash).as_bytes())?;
    let summary: Vec<_> = cells
        .iter()
        .map(|c| {
            let sure: Vec<bool> = c.table.rows.iter().filter_map(|r| r.sure_screening).collect();
            json!({
                "scenario": c.scenario,
                "p": c.p,
                "aggregates": c.table.aggregates,
                "failures": c.table.failures,
                "sure-screening": { "held": sure.iter().filter(|&&b| b).count(), "of": sure.len() },
            })
        })
        .collect();
    let doc = json!({ "manifest": hash, "cells": summary });
    out.file("summary.json", (serde_json::to_string_pretty(&doc).expect("summary serializes") + "\n").as_bytes())?;
    out.manifest.timings.insert("total-seconds".into(), start.elapsed().as_secs_f64());
    out.finish()
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn replicates_csv(cells: &[Cell], hash: &str) -> String {
    let mut s = format!("# manifest {hash}\nscenario,p,replicate,method,{},tp,fp,tn,fn,sure_screening,kn\n", Metrics::NAMES.join(","));
    for c in cells {
        for r in &c.table.rows {
            let m = r.metrics.values().map(|v| v.to_string()).join(",");
            let f = &r.confusion;
            writeln!(
                s,
                "{},{},{},{},{m},{},{},{},{},{},{}",
                c.scenario,
                c.p,
                r.replicate + 1,
                method_name(r.method),
                f.tp,
                f.fp,
                f.tn,
                f.fn_,
                opt(r.sure_screening),
                opt(r.kn)
            )
            .unwrap();
        }
    }
    s
}

pub fn aggregate_csv(cells: &[Cell], hash: &str) -> String {
    let stats: Vec<String> = Metrics::NAMES.iter().flat_map(|m| [format!("{m}_mean"), format!("{m}_sd")]).collect();
    let mut s = format!("# manifest {hash}\nscenario,p,method,replicates,failures,{}\n", stats.join(","));
    for c in cells {
        for a in &c.table.aggregates {
            let v: Vec<String> = (0..5).flat_map(|i| [a.mean[i].to_string(), a.sd[i].to_string()]).collect();
            writeln!(
                s,
                "{},{},{},{},{},{}",
                c.scenario,
                c.p,
                method_name(a.method),
                a.replicates,
                c.table.failures.len(),
                v.join(",")
            )
            .unwrap();
        }
    }
    s
}

/// One block per scenario: metric rows, one `mean (sd)` column per p and method.
pub fn table_text(cells: &[Cell], hash: &str) -> String {
    const LABELS: [&str; 5] = ["rMSE", "CP", "Sens", "Spec", "MCC"];
    let mut s = format!("# manifest {hash}\n");
    let mut ids: Vec<u8> = cells.iter().map(|c| c.scenario).collect();
    ids.dedup();
    for id in ids {
        let cols: Vec<(usize, &Aggregate)> = cells
            .iter()
            .filter(|c| c.scenario == id)
            .flat_map(|c| c.table.aggregates.iter().map(move |a| (c.p, a)))
            .collect();
        writeln!(s, "\nScenario {id}").unwrap();
        let mut head = format!("{:<6}", "");
        for (p, a) in &cols {
            write!(head, " {:>16}", format!("p={p} {}", method_name(a.method))).unwrap();
        }
        writeln!(s, "{}", head.trim_end()).unwrap();
        for (i, label) in LABELS.iter().enumerate() {
            let mut line = format!("{label:<6}");
            for (_, a) in &cols {
                write!(line, " {:>16}", format!("{:.2} ({:.3})", a.mean[i], a.sd[i])).unwrap();
            }
            writeln!(s, "{line}").unwrap();
        }
    }
    s
}

/// Recomputes the quantile table from a draws file.
pub fn summarize(path: &Path, lower: f64, upper: f64) -> Result<String> {
    if !(0.0..1.0).contains(&lower) || !(lower < upper && upper <= 1.0) {
        return Err(CliError::validation(format!("levels must satisfy 0 <= lower < upper <= 1, got {lower}, {upper}")));
    }
    let file = DrawsFile::read(path)?;
    let summary = summarize_draws(&file, lower, upper)?;
    Ok(summary_csv(&summary, lower, upper, &file.manifest))
}
