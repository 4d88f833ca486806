use std::path::Path;
use std::process::{Command, Output};

fn charsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_charsum"))
        .args(args)
        .env_remove("CHARSUM_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value(o: &Output) -> f64 {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    stdout(o).trim().parse().unwrap()
}

#[test]
fn exact_examples() {
    let o = charsum(&["exact", "--x", "3", "--y", "3"]);
    assert_eq!(stdout(&o), "3\n");
    for algo in ["naive", "periodic", "auto"] {
        let o = charsum(&["exact", "--x", "1", "--y", "9", "--algo", algo]);
        assert_eq!(stdout(&o), "5\n", "{algo}");
    }
    let a = charsum(&["exact", "--x", "500", "--y", "317", "--algo", "naive"]);
    let b = charsum(&["exact", "--x", "500", "--y", "317", "--algo", "periodic"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(charsum(&["exact", "--x", "3"]).status.code(), Some(2));
    assert_eq!(charsum(&["exact", "--x", "3", "--y", "3", "--algo", "fft"]).status.code(), Some(2));
    assert_eq!(charsum(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(charsum(&["mainterm", "--alpha", "1", "--sigma", "0.5"]).status.code(), Some(2));
    assert_eq!(charsum(&["compare", "--x", "5", "--y", "100"]).status.code(), Some(2));
    assert_eq!(charsum(&["scaling", "--nmin", "500", "--nmax", "500", "--steps", "1"]).status.code(), Some(2));
    assert_eq!(charsum(&["verify", "--level", "slow"]).status.code(), Some(2));
}

#[test]
fn unmet_tolerance_exits_3() {
    let o = charsum(&["mainterm", "--alpha", "1", "--tol", "1e-10"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not met"));
}

#[test]
fn main_term_methods_agree() {
    let d = value(&charsum(&["mainterm", "--alpha", "2"]));
    let c = value(&charsum(&["mainterm", "--alpha", "2", "--method", "series"]));
    let c2 = value(&charsum(&["c-alpha", "--alpha", "2"]));
    assert!((d - c).abs() < 1e-4);
    assert_eq!(c, c2);
    let m = value(&charsum(&["mainterm", "--x", "1000", "--y", "1000"]));
    let s = value(&charsum(&["exact", "--x", "1000", "--y", "1000"]));
    assert!((m - s).abs() <= 10.0 * 1000f64.powf(1.25));
}

#[test]
fn smooth_sum_is_bounded_by_weights() {
    let v = value(&charsum(&["smooth", "--x", "3", "--y", "3", "--u", "10"]));
    assert!((0.0..=3.0).contains(&v));
    assert_eq!(charsum(&["smooth", "--x", "3", "--y", "3", "--u", "1"]).status.code(), Some(2));
}

#[test]
fn config_file_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# sizes\nx = 3\ny = 9  # odd n up to 9\nalgo = naive\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = charsum(&["--config", cfg, "exact"]);
    let direct = charsum(&["exact", "--x", "3", "--y", "9"]);
    assert_eq!(stdout(&from_file), stdout(&direct));
    let overridden = charsum(&["--config", cfg, "exact", "--x", "1"]);
    assert_eq!(stdout(&overridden), "5\n");

    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "x 3\n").unwrap();
    assert_eq!(charsum(&["--config", bad.to_str().unwrap(), "exact"]).status.code(), Some(2));
    assert_eq!(charsum(&["--config", "/nonexistent/run.conf", "exact"]).status.code(), Some(2));
}

fn run_compare_to(path: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["compare", "--x", "100,1000", "--y", "100,317", "--out", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    charsum(&args)
}

#[test]
fn compare_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let plot = dir.path().join("a.gp");
    assert!(run_compare_to(&a, &["--gnuplot", plot.to_str().unwrap()]).status.success());
    assert!(run_compare_to(&b, &[]).status.success());
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    let text = String::from_utf8(text).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "X,Y,alpha,exact,main,abs_err,norm_err");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("1.0000000000000000e2,1.0000000000000000e2,1.0000000000000000e0,227,"));
    let script = std::fs::read_to_string(&plot).unwrap();
    assert!(script.contains("a.csv"));

    let crossed = charsum(&["compare", "--x", "100,1000", "--y", "100,317", "--cross"]);
    assert_eq!(stdout(&crossed).lines().count(), 5);
    assert_eq!(charsum(&["compare", "--x", "100,1000", "--y", "100"]).status.code(), Some(2));
}

#[test]
fn thread_variable() {
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_charsum"))
            .args(["exact", "--x", "1000", "--y", "2000"])
            .env("CHARSUM_THREADS", v)
            .output()
            .unwrap()
    };
    let one = run("1");
    assert!(one.status.success());
    assert_eq!(one.stdout, run("3").stdout);
    assert_eq!(run("0").status.code(), Some(2));
    assert_eq!(run("many").status.code(), Some(2));
}

#[test]
fn fast_verify_passes() {
    let o = charsum(&["verify", "--level", "fast"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 20);
    assert!(text.ends_with("overall: PASS\n"));
}
