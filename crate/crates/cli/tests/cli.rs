use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mtmbsp::simulate::{simulate_dataset, ScenarioSpec, SimKind};
use mtmbsp::RandomStream;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mtmbsp"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env("MTMBSP_THREADS", "1").output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_csv(path: &Path, prefix: &str, m: &nalgebra::DMatrix<f64>) {
    let mut s = (1..=m.ncols()).map(|c| format!("{prefix}{c}")).collect::<Vec<_>>().join(",") + "\n";
    for i in 0..m.nrows() {
        s += &m.row(i).iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        s += "\n";
    }
    std::fs::write(path, s).unwrap();
}

/// 23 predictors, one Gaussian and one Bernoulli response.
fn ckd_like(dir: &Path) -> (PathBuf, PathBuf, PathBuf) {
    let spec = ScenarioSpec {
        n: 60,
        p: 23,
        s0: 3,
        mix: vec![SimKind::Gaussian, SimKind::Bernoulli],
        ..ScenarioSpec::scenario(1, 23, 5).unwrap()
    };
    let sim = simulate_dataset::<f64>(&spec, &RandomStream::new(5, 0)).unwrap();
    let (x, y, s) = (dir.join("x.csv"), dir.join("y.csv"), dir.join("schema.toml"));
    write_csv(&x, "x", sim.data.x());
    write_csv(&y, "y", sim.data.y());
    std::fs::write(&s, "[[column]]\nkind = \"gaussian\"\n\n[[column]]\nkind = \"bernoulli\"\n").unwrap();
    (x, y, s)
}

fn fit_args<'a>(x: &'a Path, y: &'a Path, s: &'a Path, out: &'a Path, method: &'a str) -> Vec<String> {
    [
        "fit", "--x", x.to_str().unwrap(), "--y", y.to_str().unwrap(), "--schema", s.to_str().unwrap(),
        "--output", out.to_str().unwrap(), "--iterations", "400", "--burn-in", "200", "--seed", "11",
        "--method", method,
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

fn run_owned(args: &[String]) -> Output {
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    run(&refs)
}

fn read(path: PathBuf) -> Vec<u8> {
    std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn one_step_fit_emits_full_table_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y, s) = ckd_like(dir.path());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = run_owned(&fit_args(&x, &y, &s, out, "one-step"));
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let summary = String::from_utf8(read(a.join("summary.csv"))).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert!(lines[0].starts_with("# manifest "));
    assert_eq!(lines[1], "j,k,q025,q50,q975");
    assert_eq!(lines.len() - 2, 23 * 2);
    let sel: serde_json::Value = serde_json::from_slice(&read(a.join("selection.json"))).unwrap();
    assert!(sel["one-step"]["a0"].is_array());
    assert_eq!(sel["predictors"].as_array().unwrap().len(), 23);
    for f in ["summary.csv", "selection.json", "draws.bin"] {
        assert_eq!(read(a.join(f)), read(b.join(f)), "{f} differs between reruns");
    }
    let ma: serde_json::Value = serde_json::from_slice(&read(a.join("manifest.json"))).unwrap();
    let mb: serde_json::Value = serde_json::from_slice(&read(b.join("manifest.json"))).unwrap();
    assert_eq!(ma["hash"], mb["hash"]);
    assert!(lines[0].ends_with(ma["hash"].as_str().unwrap()));
    assert_eq!(ma["outputs"], mb["outputs"]);
}

#[test]
fn summarize_round_trips_and_levels_nest() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y, s) = ckd_like(dir.path());
    let out = dir.path().join("fit");
    for method in ["one-step", "two-step"] {
        let o = run_owned(&fit_args(&x, &y, &s, &out, method));
        assert!(o.status.success(), "{}", stderr(&o));
        let draws = out.join("draws.bin");
        let o = run(&["summarize", draws.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert_eq!(o.stdout, read(out.join("summary.csv")), "{method} summary differs from fit-time table");

        let narrow = run(&["summarize", draws.to_str().unwrap(), "--lower", "0.05", "--upper", "0.95"]);
        assert!(narrow.status.success());
        let parse = |b: &[u8]| -> Vec<Vec<f64>> {
            String::from_utf8_lossy(b)
                .lines()
                .skip(2)
                .map(|l| l.split(',').skip(2).map(|v| v.parse().unwrap()).collect())
                .collect()
        };
        let (wide, narrow) = (parse(&o.stdout), parse(&narrow.stdout));
        assert!(String::from_utf8_lossy(&o.stdout).contains("q025"));
        for (w, n) in wide.iter().zip(&narrow) {
            assert!(w[0] <= n[0] && n[0] <= n[1] && n[1] <= n[2] && n[2] <= w[2], "{w:?} vs {n:?}");
            assert_eq!(w[1], n[1]);
        }
    }
}

#[test]
fn both_writes_paired_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y, s) = ckd_like(dir.path());
    let out = dir.path().join("both");
    let o = run_owned(&fit_args(&x, &y, &s, &out, "both"));
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["summary.csv", "summary-one-step.csv", "draws-one-step.bin", "selection.json", "manifest.json"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let sel: serde_json::Value = serde_json::from_slice(&read(out.join("selection.json"))).unwrap();
    let kn = sel["two-step"]["kn"].as_u64().unwrap() as usize;
    assert_eq!(sel["two-step"]["jn"].as_array().unwrap().len(), kn);
}

#[test]
fn manifest_alone_reproduces_results() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y, s) = ckd_like(dir.path());
    let first = dir.path().join("first");
    assert!(run_owned(&fit_args(&x, &y, &s, &first, "two-step")).status.success());
    let again = dir.path().join("again");
    let m = first.join("manifest.json");
    let o = run(&["fit", "--from-manifest", m.to_str().unwrap(), "--output", again.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["summary.csv", "selection.json", "draws.bin"] {
        assert_eq!(read(first.join(f)), read(again.join(f)), "{f}");
    }
}

#[test]
fn truncated_draws_fail_with_checksum_error() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y, s) = ckd_like(dir.path());
    let out = dir.path().join("fit");
    assert!(run_owned(&fit_args(&x, &y, &s, &out, "one-step")).status.success());
    let bytes = read(out.join("draws.bin"));
    let cut = dir.path().join("cut.bin");
    std::fs::write(&cut, &bytes[..bytes.len() - 100]).unwrap();
    let o = run(&["summarize", cut.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("checksum"), "{}", stderr(&o));
}

#[test]
fn schema_width_mismatch_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y, _) = ckd_like(dir.path());
    let s = dir.path().join("one.toml");
    std::fs::write(&s, "[[column]]\nkind = \"gaussian\"\n").unwrap();
    let o = run_owned(&fit_args(&x, &y, &s, &dir.path().join("o"), "one-step"));
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(msg.contains("1 columns") && msg.contains("Y has 2 columns"), "{msg}");
}

#[test]
fn malformed_csv_reports_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y, s) = ckd_like(dir.path());
    let text = std::fs::read_to_string(&x).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let rest = lines[4].split_once(',').unwrap().1.to_string();
    lines[4] = format!("abc,{rest}");
    std::fs::write(&x, lines.join("\n") + "\n").unwrap();
    let o = run_owned(&fit_args(&x, &y, &s, &dir.path().join("o"), "one-step"));
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(msg.contains("x.csv:5") && msg.contains("abc"), "{msg}");
}

#[test]
fn missing_input_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let (_, y, s) = ckd_like(dir.path());
    let o = run_owned(&fit_args(&dir.path().join("nope.csv"), &y, &s, &dir.path().join("o"), "one-step"));
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("run.toml");
    std::fs::write(&c, "iterations = 500\nburnin = 100\n").unwrap();
    let o = run(&["simulate", "--config", c.to_str().unwrap(), "--dry-run"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("burnin"), "{}", stderr(&o));
}

#[test]
fn invalid_values_fail_before_work_starts() {
    let o = run(&["simulate", "--burn-in", "5000", "--dry-run"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["simulate", "--tau", "-1", "--dry-run"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["simulate", "--scenario", "9", "--dry-run"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("1-6"), "{}", stderr(&o));
}

#[test]
fn printed_config_parses_back() {
    let o = run(&["simulate", "--p", "500,1000", "--seed", "42", "--method", "two-step", "--print-config"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let cfg = mtmbsp_cli::RunConfig::from_toml(&text).unwrap();
    assert_eq!(cfg.p, vec![500, 1000]);
    assert_eq!(cfg.seed, 42);
    assert_eq!(cfg.to_toml(), text);
}

#[test]
fn simulate_writes_metric_tables_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let common = [
        "simulate", "--scenario", "1", "--p", "30", "--n", "40", "--replicates", "2", "--iterations", "300",
        "--burn-in", "100",
    ];
    let mut outs = Vec::new();
    for (name, method) in [("a", "two-step"), ("b", "two-step"), ("c", "both")] {
        let out = dir.path().join(name);
        let mut args = common.to_vec();
        args.extend(["--method", method, "--output", out.to_str().unwrap()]);
        let o = run(&args);
        assert!(o.status.success(), "{}", stderr(&o));
        outs.push(out);
    }
    for f in ["replicates.csv", "aggregate.csv", "table.txt", "summary.json"] {
        assert_eq!(read(outs[0].join(f)), read(outs[1].join(f)), "{f}");
    }
    let table = String::from_utf8(read(outs[0].join("table.txt"))).unwrap();
    let rows: Vec<&str> = table.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()).collect();
    // scenario line, header, five metrics
    assert_eq!(rows.len(), 7, "{table}");
    assert!(rows[1].contains("p=30 two-step"));
    assert!(rows[2].starts_with("rMSE") && rows[2].contains('('));
    let paired = String::from_utf8(read(outs[2].join("table.txt"))).unwrap();
    assert!(paired.contains("p=30 one-step") && paired.contains("p=30 two-step"), "{paired}");
    let reps = String::from_utf8(read(outs[2].join("replicates.csv"))).unwrap();
    assert_eq!(reps.lines().count(), 2 + 4);
}
