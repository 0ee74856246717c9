use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use stepfit::report::{validate_json, FitReport};
use stepfit::{curve_error, true_curve, CostModel, Dataset, DuplicatePolicy, StepCurve};
use tempfile::TempDir;

fn stepfit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stepfit"))
        .args(args)
        .env("STEPFIT_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn gen(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).to_str().unwrap().to_owned();
    let mut full = vec!["gen", "--out", &path];
    full.extend_from_slice(args);
    let o = stepfit(&full);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    path
}

fn read_report(path: &Path) -> (FitReport, Value) {
    let text = fs::read_to_string(path).unwrap();
    (
        FitReport::from_json(&text).unwrap(),
        serde_json::from_str(&text).unwrap(),
    )
}

#[test]
fn gen_is_deterministic() {
    let dir = TempDir::new().unwrap();
    for sampling in ["grid", "uniform"] {
        let args = [
            "--i",
            "1000",
            "--sigma",
            "5",
            "--seed",
            "7",
            "--sampling",
            sampling,
        ];
        let a = gen(dir.path(), "a.csv", &args);
        let b = gen(dir.path(), "b.csv", &args);
        assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
    }
}

#[test]
fn noiseless_six_steps() {
    let dir = TempDir::new().unwrap();
    let csv = gen(dir.path(), "clean.csv", &["--i", "600"]);
    let out = dir.path().join("r.json");
    let o = stepfit(&[
        "fit",
        &csv,
        "--k",
        "6",
        "--strategy",
        "rlx",
        "--no-monotone",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let (report, doc) = read_report(&out);
    validate_json(&doc).unwrap();
    assert!(report.result.objective <= 1e-9);
    let truth = true_curve();
    assert_eq!(report.blocks.len(), 6);
    for (row, want) in report.blocks.iter().zip(truth.blocks()) {
        assert_eq!((row.start, row.value), (want.start, want.value));
    }
}

#[test]
fn one_step_is_the_mean() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("d.csv");
    fs::write(&csv, "p,x\n1,3\n2,9\n3,6\n4,2\n").unwrap();
    let out = dir.path().join("r.json");
    let o = stepfit(&[
        "fit",
        csv.to_str().unwrap(),
        "--k",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let (report, _) = read_report(&out);
    assert_eq!(report.result.curve.values(), &[5.0]);
    assert_eq!(report.result.objective, 4.0 + 16.0 + 1.0 + 9.0);
}

#[test]
fn time_limit_exit_code_and_certificate() {
    let dir = TempDir::new().unwrap();
    let csv = gen(
        dir.path(),
        "big.csv",
        &["--i", "1000", "--sigma", "5", "--seed", "3"],
    );
    let limited = dir.path().join("limited.json");
    let o = stepfit(&[
        "fit",
        &csv,
        "--k",
        "6",
        "--strategy",
        "raw",
        "--time-limit",
        "0.001",
        "--out",
        limited.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    let full = dir.path().join("full.json");
    assert_eq!(
        code(&stepfit(&[
            "fit",
            &csv,
            "--k",
            "6",
            "--out",
            full.to_str().unwrap()
        ])),
        0
    );
    let (limited, doc) = read_report(&limited);
    validate_json(&doc).unwrap();
    let (full, _) = read_report(&full);
    assert_eq!(doc["result"]["bounds"]["status"], "TimeLimit");
    assert!(limited.result.bounds.best_lb_final <= full.result.objective * (1.0 + 1e-12));
    assert!(limited.result.objective >= full.result.objective * (1.0 - 1e-12));
}

#[test]
fn plot_trace_rescores_to_objective() {
    let dir = TempDir::new().unwrap();
    let csv = gen(
        dir.path(),
        "d.csv",
        &[
            "--i",
            "300",
            "--sigma",
            "4",
            "--seed",
            "9",
            "--sampling",
            "uniform",
        ],
    );
    let data = Dataset::open_csv(&csv, DuplicatePolicy::Reject).unwrap();
    for loss in ["l2", "l1", "quantile:0.8"] {
        let out = dir.path().join("r.json");
        let plot = dir.path().join("trace.txt");
        let o = stepfit(&[
            "fit",
            &csv,
            "--k",
            "5",
            "--step-min",
            "2",
            "--loss",
            loss,
            "--out",
            out.to_str().unwrap(),
            "--plot",
            plot.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
        let (report, doc) = read_report(&out);
        validate_json(&doc).unwrap();
        let curve = StepCurve::from_plot_trace(&fs::read_to_string(&plot).unwrap()).unwrap();
        let cost: CostModel = loss.parse().unwrap();
        let rescored = curve_error(&data, &curve, cost).unwrap();
        assert!(
            (rescored - report.result.objective).abs() <= 1e-9 * report.result.objective.max(1.0)
        );
        assert_eq!(FitReport::from_json(&report.to_json()).unwrap(), report);
    }
}

#[test]
fn report_to_stdout() {
    let dir = TempDir::new().unwrap();
    let csv = gen(dir.path(), "d.csv", &["--i", "50", "--sigma", "2"]);
    let o = stepfit(&["fit", &csv, "--k", "3"]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    validate_json(&doc).unwrap();
    assert_eq!(doc["schema"], "stepfit/1");
}

#[test]
fn bounds_output() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("runs.csv");
    fs::write(&csv, "p,x\n0,5\n1,5\n2,3\n3,4\n4,1\n").unwrap();
    let o = stepfit(&["bounds", csv.to_str().unwrap(), "--k", "3"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let field = |name: &str| -> String {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{name} ")))
            .unwrap()
            .to_owned()
    };
    assert_eq!(field("ub0"), field("lb_iso"));
    assert_eq!(field("gap0"), "0.00");

    let clean = gen(dir.path(), "clean.csv", &["--i", "600"]);
    let o = stepfit(&["bounds", &clean, "--k", "6", "--with-relaxed"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let lb: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("lb_relaxed "))
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(lb, 0.0);
}

#[test]
fn oracle_subcommand() {
    let o = stepfit(&[
        "oracle",
        "--instances",
        "200",
        "--max-i",
        "12",
        "--k",
        "4",
        "--seed",
        "5",
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains(" 0 mismatches"));
    assert_eq!(code(&stepfit(&["oracle-check", "--instances", "3"])), 0);
}

#[test]
fn bench_k_sweep_is_non_increasing() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("bench.csv");
    let o = stepfit(&[
        "bench",
        "--sweep",
        "k",
        "--values",
        "1,2,3,4,5,6,7",
        "--i",
        "120",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    let headers = rdr.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (strategy, objective, status) = (col("strategy"), col("objective"), col("status"));
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 7 * 3);
    for s in ["raw", "iso", "rlx"] {
        let obj: Vec<f64> = rows
            .iter()
            .filter(|r| &r[strategy] == s)
            .map(|r| r[objective].parse().unwrap())
            .collect();
        assert!(obj.windows(2).all(|w| w[1] <= w[0]), "{s}: {obj:?}");
    }
    assert!(rows.iter().all(|r| &r[status] == "optimal"));
}

#[test]
fn errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let dup = dir.path().join("dup.csv");
    fs::write(&dup, "p,x\n1,2\n1,3\n2,1\n").unwrap();
    let dup = dup.to_str().unwrap();
    assert_eq!(code(&stepfit(&["fit", dup, "--k", "2"])), 1);
    assert_eq!(
        code(&stepfit(&["fit", dup, "--k", "2", "--merge-duplicates"])),
        0
    );
    assert_eq!(code(&stepfit(&["fit", "/nonexistent.csv", "--k", "2"])), 1);
    assert_eq!(code(&stepfit(&["fit", dup, "--k", "two"])), 1);
    assert_eq!(
        code(&stepfit(&["fit", dup, "--k", "0", "--merge-duplicates"])),
        1
    );
    assert_eq!(code(&stepfit(&["frobnicate"])), 1);
    assert_eq!(code(&stepfit(&["--help"])), 0);
    let o = stepfit(&["fit", dup, "--k", "2"]);
    assert!(!o.stderr.is_empty());
}
