use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_ssl-gibbs-lab");
const CONFIG: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/default.toml");

fn cli(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("SSL_GIBBS_THREADS", t),
        None => cmd.env_remove("SSL_GIBBS_THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn quick_sweep(out: &Path, threads: &str, seed: &str) -> Vec<u8> {
    let o = cli(
        &[
            "mean-gen-sweep",
            "--config",
            CONFIG,
            "--seed",
            seed,
            "--out",
            out.to_str().unwrap(),
            "--set",
            "trials=20000",
        ],
        Some(threads),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    fs::read(out.join("mean-gen-sweep.csv")).unwrap()
}

#[test]
fn writes_csv_svg_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(
        &[
            "verify-theorem1",
            "--config",
            CONFIG,
            "--out",
            dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(code(&o), 0);
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 100);
    let csv = fs::read_to_string(dir.path().join("verify-theorem1.csv")).unwrap();
    assert!(csv.starts_with("sweep_variable,quantity,value,std_err,n,m\n"));
    let svg = fs::read_to_string(dir.path().join("verify-theorem1.svg")).unwrap();
    let again = ssl_gibbs_lab::harness::svg_from_csv(
        ssl_gibbs_lab::harness::Experiment::VerifyTheorem1,
        &dir.path().join("verify-theorem1.csv"),
    )
    .unwrap();
    assert_eq!(svg, again);
}

#[test]
fn output_is_identical_across_reruns_and_worker_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    let one = quick_sweep(a.path(), "1", "17");
    assert_eq!(one, quick_sweep(b.path(), "4", "17"));
    assert_ne!(one, quick_sweep(c.path(), "1", "18"));
}

#[test]
fn monte_carlo_values_carry_std_err() {
    let dir = tempfile::tempdir().unwrap();
    quick_sweep(dir.path(), "1", "3");
    let r = ssl_gibbs_lab::harness::SweepResult::read_csv_file(
        &dir.path().join("mean-gen-sweep.csv"),
        "lambda",
    )
    .unwrap();
    for row in r.rows {
        use ssl_gibbs_lab::harness::Quantity::*;
        match row.quantity {
            CrossCov | GenSsl => assert!(row.std_err.is_some()),
            _ => assert!(row.std_err.is_none()),
        }
    }
}

#[test]
fn config_problems_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[mean-gen-sweep]\nsigmaa = 1.0\n").unwrap();
    let bad_value = dir.path().join("bad_value.toml");
    fs::write(&bad_value, "[mean-gen-sweep]\nn = 0\n").unwrap();
    let cases: Vec<(Vec<&str>, Option<&str>)> = vec![
        (
            vec!["mean-gen-sweep", "--config", bad.to_str().unwrap()],
            None,
        ),
        (
            vec!["mean-gen-sweep", "--config", bad_value.to_str().unwrap()],
            None,
        ),
        (
            vec!["mean-gen-sweep", "--config", "/does/not/exist.toml"],
            None,
        ),
        (vec!["figure-9", "--config", CONFIG], None),
        (
            vec!["mean-gen-sweep", "--config", CONFIG, "--set", "trials"],
            None,
        ),
        (
            vec!["mean-gen-sweep", "--config", CONFIG, "--set", "trials=many"],
            None,
        ),
        (vec!["mean-gen-sweep", "--config", CONFIG], Some("zero")),
        (vec!["mean-gen-sweep"], None),
    ];
    for (args, threads) in cases {
        let o = cli(&args, threads);
        assert_eq!(
            code(&o),
            2,
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn runtime_failures_exit_with_1_and_a_json_record() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    fs::write(&data, "a,b,label\n1.0,2.0,1\n0.5,oops,0\n").unwrap();
    let set = format!("data_path={}", data.display());
    let o = cli(
        &[
            "logistic-empirical",
            "--config",
            CONFIG,
            "--out",
            dir.path().to_str().unwrap(),
            "--set",
            &set,
        ],
        None,
    );
    assert_eq!(code(&o), 1);
    let err = String::from_utf8(o.stderr).unwrap();
    let record: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(record["kind"], "runtime");
    assert_eq!(record["status"], "error");
}
