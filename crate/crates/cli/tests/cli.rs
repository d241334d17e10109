use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn jobs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../jobs")
}

fn prolate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prolate")).args(args).output().expect("binary runs")
}

fn run_job(sub: &str, job: &Path, extra: &[&str]) -> Output {
    let mut args = vec![sub, job.to_str().unwrap()];
    args.extend_from_slice(extra);
    prolate(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn value<'a>(report: &'a str, key: &str) -> &'a str {
    let prefix = format!("{key} = ");
    report.lines().find_map(|l| l.strip_prefix(&prefix)).unwrap_or_else(|| panic!("no {key} in\n{report}"))
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

const AIRY_DERIVATIVE: &str = r#"family = "airy"
R = "(x) * Dx^2 + (-1) * Dx + (-x^2)"
v = "x"
g = "x"
m = 0
normalizer = "z"
"#;

#[test]
fn verify_ladder_half() {
    let out = run_job("verify", &jobs().join("ladder_half.toml"), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = stdout(&out);
    assert_eq!(value(&r, "factorization_residual"), "0");
    assert_eq!(value(&r, "dual_residual"), "0");
    assert_eq!((value(&r, "rho1"), value(&r, "rho2")), ("2", "2"));
}

#[test]
fn verify_from_data_file_and_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_job("verify", &jobs().join("ladder_half_file.toml"), &["--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let cert = std::fs::read_to_string(dir.path().join("certificate.toml")).unwrap();
    assert!(cert.contains("verified = true"));
    assert_eq!(std::fs::read_to_string(dir.path().join("verify.txt")).unwrap(), stdout(&out));
}

#[test]
fn corrupted_g_fails_with_residual() {
    let dir = tempfile::tempdir().unwrap();
    let data = std::fs::read_to_string(jobs().join("ladder_half_data.toml")).unwrap().replace("g = \"1\"", "g = \"2\"");
    write(dir.path(), "data.toml", &data.replace("verified = true", "verified = false"));
    let job = write(dir.path(), "job.toml", "family = \"bessel:1/2\"\n[data]\nkind = \"file\"\npath = \"data.toml\"\n");
    let out = run_job("verify", &job, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("residual"), "{}", stderr(&out));
}

#[test]
fn malformed_operator_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "data.toml", &AIRY_DERIVATIVE.replace("Dx^2", "Dq^2"));
    let job = write(dir.path(), "job.toml", "family = \"airy\"\n[data]\nkind = \"file\"\npath = \"data.toml\"\n");
    let out = run_job("verify", &job, &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("`R`"), "{}", stderr(&out));
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.toml");
    assert_eq!(run_job("verify", &missing, &[]).status.code(), Some(1));
    let typo = write(dir.path(), "typo.toml", "family = \"airy\"\n[numeric]\ngird = 10\n");
    assert_eq!(run_job("verify", &typo, &[]).status.code(), Some(1));
    let family = write(dir.path(), "family.toml", "family = \"hermite\"\n");
    assert_eq!(run_job("verify", &family, &[]).status.code(), Some(1));
    let no_contours = write(dir.path(), "bare.toml", "family = \"airy\"\n");
    let out = run_job("solve", &no_contours, &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("gamma1"));
}

#[test]
fn thread_variable_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_prolate"))
        .args(["verify", jobs().join("airy.toml").to_str().unwrap()])
        .env("PROLATE_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("PROLATE_THREADS"));
}

#[test]
fn dims_airy_identity_fill_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let job = write(dir.path(), "airy.toml", "family = \"airy\"\n");
    let out = run_job("dims", &job, &[]);
    assert_eq!(out.status.code(), Some(0));
    let rows: Vec<Vec<usize>> = stdout(&out)
        .lines()
        .skip(2)
        .map(|l| l.split(',').take(6).map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 36);
    for r in rows {
        let full = (r[0] + 1) * (r[1] + 1);
        assert_eq!((r[2], r[3], r[5]), (full, full, full), "{r:?}");
    }
}

#[test]
fn dims_ladder_bounds_pass() {
    let out = run_job("dims", &jobs().join("ladder_half.toml"), &[]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout(&out);
    assert!(report.lines().skip(2).all(|l| l.ends_with(",true")));
    assert!(report.lines().any(|l| l.starts_with("1,1,0,0,0,0,")));
    assert_eq!(report.lines().count(), 2 + 25);
}

#[test]
fn solve_prolate() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_job("solve", &jobs().join("prolate.toml"), &["--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = stdout(&out);
    assert_eq!(value(&r, "order"), "2");
    assert_eq!(value(&r, "D"), "\"(-x^2 + 1) * Dx^2 + (-2*x) * Dx^1 + (-4*x^2)\"");
    assert!(value(&r, "max_residual").parse::<f64>().unwrap() <= 1e-8);
    assert!(dir.path().join("residuals.csv").exists());
    assert!(dir.path().join("solution.txt").exists());
}

#[test]
fn solve_airy_basic() {
    let out = run_job("solve", &jobs().join("airy.toml"), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = stdout(&out);
    assert_eq!(value(&r, "order"), "2");
    assert!(value(&r, "max_residual").parse::<f64>().unwrap() <= 1e-6);
}

#[test]
fn solve_is_deterministic() {
    let a = run_job("solve", &jobs().join("prolate.toml"), &["--grid", "60"]);
    let b = run_job("solve", &jobs().join("prolate.toml"), &["--grid", "60"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(value(&stdout(&a), "grid_nodes"), "60");
}

#[test]
fn thread_count_does_not_change_reports() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_prolate"))
            .args(["solve", jobs().join("ladder_third.toml").to_str().unwrap()])
            .env("PROLATE_THREADS", threads)
            .output()
            .unwrap()
    };
    let (one, four) = (run("1"), run("4"));
    assert_eq!(one.status.code(), Some(0), "{}", stderr(&one));
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn tight_tolerance_exits_four() {
    let out = run_job("solve", &jobs().join("airy.toml"), &["--tol", "1e-14"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("above tolerance"));
}

#[test]
fn fixed_orders_without_solution_exit_five() {
    let out = run_job("solve", &jobs().join("prolate.toml"), &["--l1", "0", "--l2", "0"]);
    assert_eq!(out.status.code(), Some(5), "{}", stderr(&out));
    let out = run_job("solve", &jobs().join("prolate.toml"), &["--l1", "0", "--l2", "0", "--minimal"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn contour_through_root_of_v() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "data.toml", AIRY_DERIVATIVE);
    let job = write(
        dir.path(),
        "job.toml",
        "family = \"airy\"\n[data]\nkind = \"file\"\npath = \"data.toml\"\n\
         [[gamma1.piece]]\nfrom = [0, 0]\nray = { dir_deg = 0 }\n\
         [[gamma2.piece]]\nfrom = [1, 0]\nray = { dir_deg = 0 }\n",
    );
    let out = run_job("solve", &job, &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("pole on contour"), "{}", stderr(&out));
}

#[test]
fn eval_exponential_pair() {
    let out = run_job("eval", &jobs().join("prolate.toml"), &["--x", "0.5", "--z", "1-2i"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = stdout(&out);
    let num = |k: &str| value(&r, k).parse::<f64>().unwrap();
    // exp(0.5 - i) and its x-derivative (1 - 2i) exp(0.5 - i)
    let (m, t) = (0.5f64.exp(), -1.0f64);
    let (re, im) = (m * t.cos(), m * t.sin());
    assert!((num("psi_re") - re).abs() < 1e-14 && (num("psi_im") - im).abs() < 1e-14, "{r}");
    assert!((num("dpsi_dx_re") - (re + 2.0 * im)).abs() < 1e-14, "{r}");
    assert!((num("dpsi_dx_im") - (im - 2.0 * re)).abs() < 1e-14, "{r}");
}
