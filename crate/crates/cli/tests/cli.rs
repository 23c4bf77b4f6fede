use std::process::{Command, Output};

use starlab::harness::{load, write_csv};

fn starlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_starlab"))
        .args(args)
        .env_remove("STARLAB_RESULTS_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn table_value(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key},")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .to_owned()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let at = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(at).unwrap().to_owned()).collect()
}

fn rows_for<'a>(csv: &'a str, metric: &str) -> Vec<Vec<&'a str>> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let at = header.iter().position(|h| *h == "metric").unwrap();
    lines.map(|l| l.split(',').collect::<Vec<_>>()).filter(|r| r[at] == metric).collect()
}

const SWEEP: &[&str] = &["sweep", "--n", "2000", "--k", "20", "--gamma", "-1,0,1", "--reps", "100", "--seed", "7"];

#[test]
fn exit_codes() {
    let ok = starlab(&["enumerate", "--n", "4", "--m", "3", "--k", "3"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));

    let missing = starlab(&["sweep", "--n", "30000"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr(&missing).contains("--k"), "{}", stderr(&missing));

    for args in [
        &["frobnicate"][..],
        &["sweep", "--n", "100", "--k", "3", "--bogus"],
        &["sweep", "--n", "ten", "--k", "3"],
        &["enumerate", "--n", "4", "--m", "3", "--k", "9"],
    ] {
        let o = starlab(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).starts_with("error:"), "{}", stderr(&o));
    }

    let absent = starlab(&["lr", "--degrees", "/nonexistent/degrees.csv", "--n", "10", "--m", "5", "--k", "2"]);
    assert_eq!(absent.status.code(), Some(1));
    let err = stderr(&absent);
    assert!(err.starts_with("error:") && err.trim_end().lines().count() == 1, "{err}");

    let big = starlab(&["enumerate", "--n", "7", "--m", "3", "--k", "2"]);
    assert_eq!(big.status.code(), Some(1), "{}", stderr(&big));
}

#[test]
fn sweep_output_is_seed_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (path, threads) in [(&a, "1"), (&b, "8")] {
        let mut args = SWEEP.to_vec();
        args.extend(["--threads", threads, "--keep-replicates", "--out", path.to_str().unwrap()]);
        let o = starlab(&args);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let (mut ra, mut rb) = (load(&a).unwrap(), load(&b).unwrap());
    ra.wall_time = 0.0;
    rb.wall_time = 0.0;
    ra.config.threads = 0;
    rb.config.threads = 0;
    assert_eq!(ra, rb);

    let first = starlab(SWEEP);
    let second = starlab(SWEEP);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn json_reloads_to_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("run.json");
    let mut args = SWEEP.to_vec();
    args.extend(["--out", json.to_str().unwrap()]);
    assert_eq!(starlab(&args).status.code(), Some(0));
    let csv = starlab(SWEEP);
    let mut rendered = Vec::new();
    write_csv(&load(&json).unwrap(), &mut rendered).unwrap();
    assert_eq!(rendered, csv.stdout);

    let tv = rows_for(std::str::from_utf8(&rendered).unwrap(), "tv_lr");
    assert_eq!(tv.len(), 3);
}

#[test]
fn rem_median_at_quarter() {
    let o = starlab(&["rem", "--n", "1000000", "--c", "0.25", "--reps", "200", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let row = &rows_for(&text, "z_ratio_q50")[0];
    let median: f64 = row[8].parse().unwrap();
    assert!((0.35..=0.65).contains(&median), "{median}");
    assert_eq!(column(&text, "grid_name")[0], "c");
}

#[test]
fn sample_then_lr_and_test() {
    let dir = tempfile::tempdir().unwrap();
    let deg = dir.path().join("degrees.csv");
    let o = starlab(&["sample", "--null", "--n", "100", "--m", "400", "--seed", "4", "--out", deg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let degrees = std::fs::read_to_string(&deg).unwrap();
    assert_eq!(degrees.lines().next(), Some("degree"));
    let total: u64 = degrees.lines().skip(1).map(|l| l.parse::<u64>().unwrap()).sum();
    assert_eq!(total, 800);

    let lr = starlab(&["lr", "--degrees", deg.to_str().unwrap(), "--n", "100", "--m", "400", "--k", "3"]);
    assert_eq!(lr.status.code(), Some(0), "{}", stderr(&lr));
    let text = stdout(&lr);
    let log_lr: f64 = table_value(&text, "log_lr").parse().unwrap();
    let decision = table_value(&text, "decision");
    assert_eq!(decision, if log_lr >= 0.0 { "planted" } else { "null" });

    let one = starlab(&["lr", "--degrees", deg.to_str().unwrap(), "--n", "100", "--m", "400", "--k", "1"]);
    assert_eq!(table_value(&stdout(&one), "log_lr"), "0");
    assert_eq!(table_value(&stdout(&one), "decision"), "planted");

    let wrong = starlab(&["lr", "--degrees", deg.to_str().unwrap(), "--n", "100", "--m", "401", "--k", "3"]);
    assert_ne!(wrong.status.code(), Some(0));

    let t = starlab(&["test", "--degrees", deg.to_str().unwrap(), "--n", "100", "--m", "400"]);
    assert_eq!(t.status.code(), Some(0), "{}", stderr(&t));
    let text = stdout(&t);
    let max = degrees.lines().skip(1).map(|l| l.parse::<u32>().unwrap()).max().unwrap();
    assert_eq!(table_value(&text, "max_degree"), max.to_string());

    let edges = starlab(&["sample", "--planted", "--edges", "--n", "20", "--m", "30", "--k", "5"]);
    let text = stdout(&edges);
    assert_eq!(text.lines().next(), Some("u,v"));
    assert_eq!(text.lines().count(), 31);
    assert!(stderr(&edges).contains("hub"));
}

#[test]
fn threshold_example() {
    let o = starlab(&["test", "--null", "--n", "1000", "--m", "50000", "--alpha", "2", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let t: f64 = table_value(&text, "t_star").parse().unwrap();
    assert!((t - 134.01).abs() < 0.01, "{t}");
    let max: f64 = table_value(&text, "max_degree").parse().unwrap();
    assert_eq!(table_value(&text, "decision"), if max >= t { "planted" } else { "null" });
}

#[test]
fn enumerate_oracle() {
    let o = starlab(&["enumerate", "--n", "4", "--m", "3", "--k", "3"]);
    let text = stdout(&o);
    let tv = &rows_for(&text, "tv")[0];
    assert!((tv[8].parse::<f64>().unwrap() - 0.8).abs() < 1e-12, "{text}");

    let table = starlab(&["enumerate", "--n", "4", "--m", "3", "--k", "2", "--table"]);
    assert_eq!(stdout(&table).lines().count(), 21);
}

#[test]
fn svg_curve_and_results_dir() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("curve.svg");
    let mut args = vec!["recovery", "--n", "2000", "--k", "20", "--gamma", "-1,0,1", "--reps", "50"];
    args.extend(["--svg", svg.to_str().unwrap()]);
    let o = starlab(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") || text.starts_with("<?xml"));
    assert!(text.trim_end().ends_with("</svg>"));

    let results = dir.path().join("results");
    let o = Command::new(env!("CARGO_BIN_EXE_starlab"))
        .args(["agreement", "--n", "2000", "--k", "20", "--gamma", "0", "--reps", "20", "--seed", "5"])
        .env("STARLAB_RESULTS_DIR", &results)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let written = std::fs::read_to_string(results.join("agreement-seed5.csv")).unwrap();
    assert_eq!(rows_for(&written, "disagree_null").len(), 1);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# small sweep\nexperiment = tv_sweep\nn = 2000\nk = 20\ngrid = 0\nreplicates = 50\nseed = 3\n").unwrap();
    let o = starlab(&["sweep", "--config", cfg.to_str().unwrap(), "--reps", "40"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(column(&text, "replicates").iter().all(|r| r == "40"), "{text}");
    assert!(column(&text, "seed").iter().all(|s| s == "3"));

    std::fs::write(&cfg, "n = 2000\nwidth = 3\n").unwrap();
    let o = starlab(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_ne!(o.status.code(), Some(0));
    assert!(stderr(&o).starts_with("error:"));
}
