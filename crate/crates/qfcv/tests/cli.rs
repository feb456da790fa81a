//! End-to-end runs of the `qfcv` binary.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qfcv"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qfcv-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

const SMALL: &[&str] = &[
    "--set", "sim.n=300",
    "--set", "window.n_tr=30",
    "--set", "window.n_val=5",
    "--set", "window.n_te=5",
    "--set", "window.delta=5",
];

#[test]
fn simulate_then_qfcv_and_fcv_on_the_csv() {
    let dir = scratch("pipeline");
    let series = dir.join("series.csv");
    let out = run(&[&["simulate", "-o", series.to_str().unwrap()], SMALL].concat());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&series).unwrap();
    assert!(text.starts_with("# qfcv "));
    assert!(text.contains("# seed = 1"));
    let rows = data_lines(&text);
    assert_eq!(rows[0], format!("t,{},y", (1..=20).map(|j| format!("x{j}")).collect::<Vec<_>>().join(",")));
    assert_eq!(rows.len(), 301);

    for cmd in ["qfcv", "fcv"] {
        let o = dir.join(format!("{cmd}.csv"));
        let out = run(&[&[cmd, "-i", series.to_str().unwrap(), "-o", o.to_str().unwrap()], SMALL].concat());
        assert!(out.status.success(), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        let text = fs::read_to_string(&o).unwrap();
        let rows = data_lines(&text);
        assert_eq!(rows[0], "method,t,alpha,lo,hi,point");
        assert_eq!(rows.len(), 2);
        let cells: Vec<&str> = rows[1].split(',').collect();
        assert_eq!(cells[1], "301");
        let (lo, hi): (f64, f64) = (cells[3].parse().unwrap(), cells[4].parse().unwrap());
        assert!(lo <= hi);
    }
}

#[test]
fn aqfcv_on_an_ingested_csv_writes_rolling_columns() {
    let dir = scratch("aqfcv");
    let series = dir.join("series.csv");
    assert!(run(&[&["simulate", "-o", series.to_str().unwrap()], SMALL].concat()).status.success());
    let out_path = dir.join("rolling.csv");
    let out = run(&[
        &["aqfcv", "-i", series.to_str().unwrap(), "-o", out_path.to_str().unwrap(), "--set", "aci.start=100"],
        SMALL,
    ]
    .concat());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&out_path).unwrap();
    let rows = data_lines(&text);
    assert_eq!(rows[0], "t,lo,hi,err_sto,covered,theta");
    assert!(rows.len() > 30);
    for r in &rows[1..] {
        let c: Vec<&str> = r.split(',').collect();
        assert_eq!(c.len(), 6);
        assert!(c[4] == "0" || c[4] == "1");
    }
    let plain = fs::read_to_string(dir.join("rolling.qfcv.csv")).unwrap();
    assert_eq!(data_lines(&plain)[0], "t,lo,hi,err_sto,covered,theta");
}

#[test]
fn evaluate_preset_rows_and_determinism() {
    let dir = scratch("evaluate");
    let preset = concat!(env!("CARGO_MANIFEST_DIR"), "/presets/fig1.toml");
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "2"].iter().enumerate() {
        let o = dir.join(format!("m{i}.csv"));
        let out = run(&[
            "evaluate", "-c", preset, "-o", o.to_str().unwrap(),
            "--threads", threads,
            "--set", "evaluate.replications=20",
            "--set", "evaluate.oracle_draws=200",
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push(fs::read_to_string(&o).unwrap());
    }
    // Only the threads line of the provenance block may differ.
    let strip = |t: &str| t.lines().filter(|l| !l.starts_with("# threads")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&outputs[0]), strip(&outputs[1]));
    let rows = data_lines(&outputs[0]);
    assert!(rows[0].starts_with("method,"));
    let methods: Vec<&str> = rows[1..].iter().map(|r| r.split(',').next().unwrap()).collect();
    assert!(methods.contains(&"QFCV(1)") && methods.contains(&"FCV"), "{methods:?}");
}

#[test]
fn same_config_twice_gives_identical_files() {
    let dir = scratch("determinism");
    let mut texts = Vec::new();
    for i in 0..2 {
        let o = dir.join(format!("s{i}.csv"));
        assert!(run(&[&["simulate", "--seed", "42", "-o", o.to_str().unwrap()], SMALL].concat()).status.success());
        texts.push(fs::read(&o).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn validation_errors_exit_with_one() {
    let out = run(&["simulate", "--set", "alpha=1.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));

    let out = run(&["simulate", "--set", "window.n_tr=0", "--set", "sim.n=0"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("n_tr") && err.contains("sim.n"), "{err}");

    let dir = scratch("badcsv");
    let bad = dir.join("bad.csv");
    fs::write(&bad, "t,x1,y\n1,0.5,2\n2,,3\n").unwrap();
    let out = run(&["qfcv", "-i", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 2"));

    assert_eq!(run(&["simulate", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn runtime_errors_exit_with_two() {
    // A GARCH fit on a series of zeros is degenerate.
    let dir = scratch("runtime");
    let zeros = dir.join("zeros.csv");
    let mut text = String::from("t,y\n");
    for t in 1..=200 {
        text.push_str(&format!("{t},0\n"));
    }
    fs::write(&zeros, text).unwrap();
    let out = run(&[
        "qfcv", "-i", zeros.to_str().unwrap(),
        "--set", "forecaster.kind=\"garch\"",
        "--set", "window.n_tr=60",
        "--set", "window.n_val=5",
        "--set", "window.n_te=5",
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}
