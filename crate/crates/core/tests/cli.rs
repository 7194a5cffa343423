use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ensemble-cavity"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn simulate_writes_selected_witnesses() {
    let o = bin(&[
        "simulate",
        "--preset",
        "AN",
        "--chi",
        "0.2",
        "--tmax",
        "1",
        "--samples",
        "5",
        "--witnesses",
        "mandel,steering_AB",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "tau,mandel_A,mandel_B,mandel_C,steering_AB");
    assert_eq!(lines.len(), 6);
    assert!(lines[5].starts_with("1,"));
}

#[test]
fn simulate_moments_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("a.csv");
    let out2 = dir.path().join("b.csv");
    for out in [&out1, &out2] {
        let o = bin(&[
            "simulate",
            "--preset",
            "NN",
            "--tmax",
            "2",
            "--samples",
            "21",
            "--moments",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    let a = std::fs::read(&out1).unwrap();
    assert_eq!(a, std::fs::read(&out2).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("tau,re_A,im_A,"));
    assert_eq!(text.lines().count(), 22);
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn config_file_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(
        dir.path(),
        "good.cfg",
        "preset = NA\nchi = 0.2\nt_max = 1\nsamples = 3\n",
    );
    let o = bin(&["simulate", "--config", &good, "--witnesses", "duan"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o).lines().next(),
        Some("tau,duan_AB,duan_BC,duan_AC")
    );

    let bad = write(dir.path(), "bad.cfg", "preset = AA\ngamma_a = 1\n");
    let o = bin(&["simulate", "--config", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    assert_eq!(bin(&[]).status.code(), Some(1));
    assert_eq!(bin(&["simulate", "--preset", "XY"]).status.code(), Some(1));
    assert_eq!(bin(&["simulate"]).status.code(), Some(1));
    assert_eq!(
        bin(&["simulate", "--preset", "AN", "--witnesses", "bogus"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
}

#[test]
fn integrator_failure_exits_with_numeric_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "tight.cfg",
        "preset = AN\nabs_tol = 1e-300\nrel_tol = 1e-300\nt_max = 1\nsamples = 2\n",
    );
    let o = bin(&["simulate", "--config", &cfg]);
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn table_and_sweep_outputs() {
    let o = bin(&["table", "--tmax", "1", "--samples", "11"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(
        text.lines().next(),
        Some("config,chi,witness,cell,min,argmin")
    );
    assert_eq!(text.lines().count(), 289);
    assert!(text.lines().any(|l| l.starts_with("NA,0,steering_AB,")));

    let o = bin(&[
        "sweep",
        "--preset",
        "AN",
        "--chis",
        "0,0.1,0.2",
        "--witnesses",
        "var_x_A",
        "--tmax",
        "1",
        "--samples",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o).lines().next(),
        Some("tau,var_x_A@chi=0,var_x_A@chi=0.1,var_x_A@chi=0.2")
    );
}

#[test]
fn oracle_check_reports_and_caps_dimension() {
    let o = bin(&[
        "oracle-check",
        "--preset",
        "AN",
        "--nmax",
        "3",
        "--tmax",
        "0.5",
        "--samples",
        "3",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    let header = text.lines().next().unwrap();
    assert!(header.starts_with(
        "tau,first_moment_abserr,second_moment_abserr,exact_nn_AB,decoupled_nn_AB,abserr_nn_AB"
    ));
    assert_eq!(text.lines().count(), 4);
    assert_eq!(
        bin(&["oracle-check", "--preset", "AN", "--nmax", "8"])
            .status
            .code(),
        Some(1)
    );
}
