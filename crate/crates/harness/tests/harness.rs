use std::fs;
use std::path::Path;
use std::process::Command;

use betting_ope::{Config, Interval, LogSample};
use betting_ope_cli::{
    emit_trace, ingest_jsonl, read_trace, run_experiment, Experiment, ExperimentConfig,
    HarnessError,
};

fn cfg() -> Config {
    Config::new(0.05, 100.0).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn ingest_plain_and_predictor_records() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "log.jsonl",
        "{\"w\":2.0,\"r\":1.0}\n\n{\"w\":2.0,\"r\":1.0,\"q_taken\":0.5,\"q_bar\":0.7}\n{\"w\":0.5,\"r\":0,\"c\":-0.2}\n",
    );
    let s = ingest_jsonl(&p, &cfg()).unwrap();
    assert_eq!(s.len(), 3);
    assert_eq!(s[0], LogSample::new(2.0, 1.0));
    assert!((s[1].c.unwrap() - 0.3).abs() < 1e-12);
    assert_eq!(s[2].c, Some(-0.2));
}

#[test]
fn ingest_reports_the_offending_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "bad.jsonl", "{\"w\":1,\"r\":1}\n{\"w\":200,\"r\":1}\n");
    match ingest_jsonl(&p, &cfg()) {
        Err(HarnessError::Input { line, .. }) => assert_eq!(line, 2),
        other => panic!("{other:?}"),
    }
    let p = write(dir.path(), "bad2.jsonl", "{\"w\":1,\"r\":1.5}\n");
    assert!(matches!(ingest_jsonl(&p, &cfg()), Err(HarnessError::Input { line: 1, .. })));
    let p = write(dir.path(), "bad3.jsonl", "{\"w\":1,\"r\":1}\nnot json\n");
    assert!(matches!(ingest_jsonl(&p, &cfg()), Err(HarnessError::Input { line: 2, .. })));
    let p = write(dir.path(), "bad4.jsonl", "{\"w\":1,\"r\":1,\"q_taken\":0.5}\n");
    assert!(matches!(ingest_jsonl(&p, &cfg()), Err(HarnessError::Input { line: 1, .. })));
}

#[test]
fn trace_header_stride_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    assert_eq!(emit_trace(&[], "mope", 1, &empty).unwrap(), 0);
    assert_eq!(
        fs::read_to_string(&empty).unwrap(),
        "t,v_lo,v_hi,v_lo_int,v_hi_int,method\n"
    );

    let ivs: Vec<Interval> = (0..1000)
        .map(|i| {
            let x = f64::from(i) / 4000.0;
            Interval::raw(x + (i % 7) as f64 * 1e-3, 1.0 - x)
        })
        .collect();
    let p = dir.path().join("t.csv");
    assert_eq!(emit_trace(&ivs, "mope", 100, &p).unwrap(), 10);

    let p = dir.path().join("all.csv");
    emit_trace(&ivs, "mope", 1, &p).unwrap();
    let rows = read_trace(&p).unwrap();
    assert_eq!(rows.len(), ivs.len());
    for (r, iv) in rows.iter().zip(&ivs) {
        assert_eq!((r.v_lo, r.v_hi), (iv.lo, iv.hi));
        assert_eq!(r.method, "mope");
    }
    for w in rows.windows(2) {
        assert!(w[1].v_lo_int >= w[0].v_lo_int && w[1].v_hi_int <= w[0].v_hi_int);
    }
}

fn small(kind: Experiment, out: &Path, extra: &[&str]) -> ExperimentConfig {
    let mut o: Vec<String> = extra.iter().map(|s| s.to_string()).collect();
    o.push(format!("output={}", out.display()));
    ExperimentConfig::load(Some(kind), None, &o).unwrap()
}

fn csv_rows(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().lines().count() - 1
}

#[test]
fn report_totals_match_csv_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(Experiment, &[&str]); 5] = [
        (Experiment::Coverage, &["n_envs=6", "samples=500"]),
        (Experiment::Width, &["seeds=2", "samples=800", "methods=mope,scalar,el"]),
        (Experiment::Predictor, &["seeds=2", "samples=500"]),
        (Experiment::Gated, &["seeds=3", "samples=2000", "stride=250"]),
        (Experiment::Ci, &["samples=2000", "permutations=3", "methods=mope,el"]),
    ];
    for (kind, extra) in cases {
        let out = dir.path().join(kind.id());
        let rep = run_experiment(&small(kind, &out, extra)).unwrap();
        let mut total = 0;
        for f in &rep.files {
            assert_eq!(csv_rows(&f.path), f.rows, "{}", f.path.display());
            total += f.rows;
        }
        assert!(total > 0);
        assert_eq!(rep.total_rows(), total);
        let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
        assert!(summary.contains(&format!("rows total: {total}")), "{summary}");
    }
}

#[test]
fn gated_trace_has_one_row_per_stride_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let rep = run_experiment(&small(
        Experiment::Gated,
        dir.path(),
        &["seeds=3", "samples=2000", "stride=250"],
    ))
    .unwrap();
    assert_eq!(rep.files[0].rows, 3 * 8);
    assert_eq!(rep.files[1].rows, 3);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for (kind, extra) in [
        (Experiment::Coverage, &["n_envs=4", "samples=300"][..]),
        (Experiment::Width, &["seeds=2", "samples=400", "methods=mope,grid,el"][..]),
    ] {
        let a = dir.path().join(format!("{}-a", kind.id()));
        let b = dir.path().join(format!("{}-b", kind.id()));
        let ra = run_experiment(&small(kind, &a, extra)).unwrap();
        run_experiment(&small(kind, &b, extra)).unwrap();
        for f in &ra.files {
            let name = f.path.file_name().unwrap();
            assert_eq!(fs::read(&f.path).unwrap(), fs::read(b.join(name)).unwrap());
        }
    }
}

#[test]
fn unknown_method_is_a_config_error() {
    let r = ExperimentConfig::load(Some(Experiment::Width), None, &["methods=mope,foo".into()]);
    assert!(matches!(r, Err(HarnessError::Config(_))));
    let r = ExperimentConfig::load(Some(Experiment::Gated), None, &["methods=mope".into()]);
    assert!(matches!(r, Err(HarnessError::Config(_))));
}

#[test]
fn infeasible_environment_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(
        Experiment::Timing,
        dir.path(),
        &["second_moment=200", "samples=10", "methods=mope"],
    );
    match run_experiment(&cfg) {
        Err(HarnessError::Engine(e)) => assert!(e.to_string().contains("E[w^2]"), "{e}"),
        other => panic!("{other:?}"),
    }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_betting-ope"))
}

#[test]
fn cli_trace_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let log = write(
        dir.path(),
        "log.jsonl",
        &"{\"w\":2.0,\"r\":1.0}\n{\"w\":0.5,\"r\":0.0}\n".repeat(50),
    );
    let out = dir.path().join("run");
    let status = bin()
        .args(["run", "--input"])
        .arg(&log)
        .arg("--output")
        .arg(&out)
        .args(["--set", "stride=10", "--set", "w_max=10"])
        .output()
        .unwrap();
    assert!(status.status.success());
    assert!(String::from_utf8_lossy(&status.stdout).contains("rows trace.csv: 10"));
    assert_eq!(read_trace(&out.join("trace.csv")).unwrap().len(), 10);

    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code().unwrap();
    assert_eq!(code(&["width", "--set", "bogus=1"]), 2);
    let bad = write(dir.path(), "bad.jsonl", "{\"w\":1}\n");
    let bad = bad.to_str().unwrap();
    let o = out.to_str().unwrap();
    assert_eq!(code(&["run", "--input", bad, "--output", o]), 3);
    assert_eq!(code(&["run", "--input", "/nonexistent/x.jsonl", "--output", o]), 4);
    assert_eq!(
        code(&["timing", "--output", o, "--set", "second_moment=200", "--set", "samples=10"]),
        5
    );
}

#[test]
fn worker_count_override_is_validated() {
    let out = tempfile::tempdir().unwrap();
    let o = bin()
        .env(betting_ope_cli::WORKERS_ENV, "many")
        .args(["coverage", "--set", "n_envs=2", "--set", "samples=100", "--output"])
        .arg(out.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = bin()
        .env(betting_ope_cli::WORKERS_ENV, "1")
        .args(["coverage", "--set", "n_envs=2", "--set", "samples=100", "--output"])
        .arg(out.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}
