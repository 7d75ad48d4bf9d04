use std::process::{Command, Output};

fn sdc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sdc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn sweep_csv_schema() {
    let o = sdc(&["sweep", "--analyzer=dqz", "--n-min=1", "--n-max=100", "--format=csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,analyzer,R_analytic,R_mc,mc_shots,ci95_low,ci95_high");
    assert_eq!(lines.len(), 101);
    assert!(!text.contains('\r'));
    let row7: Vec<&str> = lines[7].split(',').collect();
    assert_eq!(&row7[..2], ["7", "dqz"]);
    let r: f64 = row7[2].parse().unwrap();
    assert!((r - 1.678).abs() < 5e-4);
    assert!(row7[3..].iter().all(|c| c.is_empty()));
}

#[test]
fn sweep_all_is_ordered() {
    let o = sdc(&["sweep", "--analyzer=all", "--n-min=2", "--n-max=50"]);
    let text = stdout(&o);
    let rows: Vec<(String, u32)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].to_string(), f[0].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 147);
    assert_eq!(rows[0], ("dqz".into(), 2));
    assert_eq!(rows[49], ("ifm".into(), 2));
    assert_eq!(rows[146], ("qz".into(), 50));
}

#[test]
fn sweep_with_monte_carlo_fills_columns() {
    let o = sdc(&[
        "sweep",
        "--analyzer=qz",
        "--n-min=10",
        "--n-max=11",
        "--shots=2000",
        "--seed=3",
    ]);
    let text = stdout(&o);
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[4], "2000");
        let (lo, mc, hi): (f64, f64, f64) = (f[5].parse().unwrap(), f[3].parse().unwrap(), f[6].parse().unwrap());
        assert!(lo <= mc && mc <= hi);
    }
}

#[test]
fn run_is_deterministic() {
    let args = [
        "run",
        "--analyzer=dqz",
        "--n=12",
        "--shots=100000",
        "--seed=42",
        "--message=uniform",
    ];
    let a = sdc(&args);
    let b = sdc(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["decode_error_count"], 0);
    assert_eq!(v["analyzer"], "dqz");
    for key in ["n", "shots", "seed", "r_hat", "ci95", "lost_fraction"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn run_thread_count_does_not_change_output() {
    let args = ["run", "--analyzer=ifm", "--n=24", "--shots=50000", "--seed=7"];
    let one = Command::new(env!("CARGO_BIN_EXE_sdc"))
        .args(args)
        .env("SDC_THREADS", "1")
        .output()
        .unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_sdc"))
        .args(args)
        .env("SDC_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(one.stdout, many.stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_sdc"))
        .args(args)
        .env("SDC_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn run_qz_lost_fraction() {
    let o = sdc(&["run", "--analyzer=qz", "--n=2", "--shots=100000", "--seed=1"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let lost = v["lost_fraction"].as_f64().unwrap();
    let sigma = (0.9375 * 0.0625 / 100_000f64).sqrt();
    assert!((lost - 0.9375).abs() < 3.0 * sigma);
}

#[test]
fn compare_table() {
    let o = sdc(&["compare", "--target-r=1.8"]);
    assert_eq!(
        stdout(&o),
        "analyzer,N,beamsplitters,ancilla\nqz,71,71,yes\nifm,24,96,no\ndqz,12,24,no\n"
    );
    let o = sdc(&["compare", "--target-r=1.665", "--format=json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[2]["analyzer"], "dqz");
    assert_eq!(v[2]["n"], 7);
    let o = sdc(&["compare", "--target-r=1.9999999"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 4);
}

#[test]
fn argument_errors_exit_2() {
    for args in [
        vec!["compare", "--target-r=2"],
        vec!["compare", "--target-r=0"],
        vec!["run", "--n=5", "--message=2"],
        vec!["run", "--n=5", "--shots=0"],
        vec!["sweep", "--n-min=5", "--n-max=4"],
        vec!["sweep", "--analyzer=bogus"],
        vec!["frobnicate"],
    ] {
        assert_eq!(sdc(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn unwritable_output_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no_such_dir").join("out.csv");
    let o = sdc(&["sweep", "--n-max=3", "--out", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let ok = dir.path().join("out.json");
    let o = sdc(&["sweep", "--n-max=3", "--format=json", "--out", ok.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(ok).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 9);
}

#[test]
fn selftest_passes_and_catches_fault() {
    let o = sdc(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = sdc(&["selftest", "--inject-fault=k-sign"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("decode_table"), "{err}");
}
