use std::path::Path;
use std::process::{Command, Output};

fn remctl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_remctl"))
        .args(args)
        .env_remove("REMCTL_SEED")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn small_campaign(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "campaign",
        "--pairs",
        "3",
        "--times",
        "0.2,1.0",
        "--grid",
        "8",
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    remctl(&args)
}

#[test]
fn help_succeeds() {
    assert_eq!(code(&remctl(&["--help"])), 0);
    assert_eq!(code(&remctl(&["campaign", "--help"])), 0);
}

#[test]
fn usage_errors_exit_2() {
    let o = remctl(&["campaign", "--epsilon", "1.5", "--out", "x.csv"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("epsilon must lie in (0,1)"));

    let o = remctl(&["campaign", "--frobnicate"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("--frobnicate"));

    let o = remctl(&["campaign", "--pairs", "many", "--out", "x.csv"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("many"));

    let o = remctl(&["campaign", "--times", "0.5,soon", "--out", "x.csv"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("soon"));

    let o = remctl(&["campaign"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("--out"));

    assert_eq!(code(&remctl(&["teleport"])), 2);
}

#[test]
fn unwritable_output_exits_3() {
    let o = remctl(&["geometry", "--out", "/nonexistent-remctl-dir/traj.csv"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn campaign_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert_eq!(code(&small_campaign(&a, &["--seed", "7", "--parallelism", "1"])), 0);
    assert_eq!(code(&small_campaign(&b, &["--seed", "7", "--parallelism", "3"])), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(
        std::fs::read(dir.path().join("a.summary.json")).unwrap(),
        std::fs::read(dir.path().join("b.summary.json")).unwrap()
    );
    let csv = std::fs::read_to_string(&a).unwrap();
    assert!(csv.starts_with("pair_id,T,protocol,reached,best_fidelity,omega,g,branch,branch_prob\n"));
    assert_eq!(csv.lines().count(), 1 + 3 * 2 * 2);
}

#[test]
fn json_format_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.json");
    let o = small_campaign(&p, &["--format", "json", "--accounting", "reached-only"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = std::fs::read_to_string(&p).unwrap();
    for key in [
        "protocol",
        "pairs_tested",
        "reached_mean",
        "reached_stderr",
        "net_prob_mean",
        "net_prob_stderr",
    ] {
        assert!(s.contains(&format!("\"{key}\"")), "{key}");
    }
    assert!(s.contains("\"reached-only\""));
    assert!(stdout(&o).contains("Net probability of success"));
}

#[test]
fn seed_sources() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    assert_eq!(code(&small_campaign(&p("flag.csv"), &["--seed", "5"])), 0);
    let env = Command::new(env!("CARGO_BIN_EXE_remctl"))
        .args(["campaign", "--pairs", "3", "--times", "0.2,1.0", "--grid", "8", "--out"])
        .arg(p("env.csv"))
        .env("REMCTL_SEED", "5")
        .output()
        .unwrap();
    assert_eq!(code(&env), 0);
    assert_eq!(
        std::fs::read(p("flag.csv")).unwrap(),
        std::fs::read(p("env.csv")).unwrap()
    );
    assert_eq!(code(&small_campaign(&p("default.csv"), &[])), 0);
    assert_ne!(
        std::fs::read(p("flag.csv")).unwrap(),
        std::fs::read(p("default.csv")).unwrap()
    );
}

#[test]
fn config_file_merges_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# campaign\npairs = 2\nfinal_times = 0.3, 0.6\ngrid = 8\nepsilon = 0.5\n",
    )
    .unwrap();
    let out = dir.path().join("c.csv");
    let o = remctl(&[
        "campaign",
        "--config",
        cfg.to_str().unwrap(),
        "--epsilon",
        "0.01",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = std::fs::read_to_string(&out).unwrap();
    assert!(s.contains("\"epsilon\": 0.01"));
    assert!(s.contains("\"pairs\": 2"));
    assert!(s.contains("0.3"));

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    let o = remctl(&[
        "campaign",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("colour"));
}

#[test]
fn kraus_demo_shows_identity_and_z() {
    let o = remctl(&["kraus-demo"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(
        s.contains("branch 1: diag(0.707107, 0.707107) = 7.0710678118654757e-1 * I"),
        "{s}"
    );
    assert!(
        s.contains("branch 2: diag(0.707107, -0.707107) = 7.0710678118654757e-1 * Z"),
        "{s}"
    );
}

#[test]
fn geometry_writes_trajectory_and_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("traj.csv");
    let o = remctl(&[
        "geometry",
        "--coeffs",
        "0.6,0.8",
        "--theta",
        "1.0471975511965976",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let traj = std::fs::read_to_string(&out).unwrap();
    assert!(traj.starts_with("step_label,vx,vy,vz,magnitude\n"));
    assert_eq!(traj.lines().count(), 11);
    let angles = std::fs::read_to_string(dir.path().join("traj.angles.csv")).unwrap();
    let residuals: Vec<f64> = angles
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(residuals.len(), 4);
    assert!(residuals.iter().all(|r| r.abs() < 1e-9));
}

#[test]
fn reachability_and_decoherence_demo_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cov.csv");
    let o = remctl(&["reachability", "--grid", "8x16x64", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 5);

    let o = remctl(&["decoherence-demo", "--coeffs", "0.6,0.8"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("control coherence"));
}
