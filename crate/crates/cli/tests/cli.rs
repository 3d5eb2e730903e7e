use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stablewealth")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV with `#` config lines, as numbers.
fn table(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn bound_single_step_is_process_law() {
    let o = run(&["bound", "--k", "1", "--alpha", "1.5", "--beta", "-0.5", "--sigma", "0.2", "--mu", "0.1", "--quantiles", "0.5"]);
    assert!(o.status.success());
    let (h, rows) = table(&stdout(&o));
    assert_eq!(h, ["k", "t", "invested", "mu", "sigma", "zq_0.5", "rq_0.5"]);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][3], 0.1);
    assert_eq!(rows[0][4], 0.2);
    assert_eq!(rows[0][5], rows[0][6]);
}

#[test]
fn bound_general_schedule_and_closed_form_agree_on_dca() {
    let a = stdout(&run(&["bound", "--k", "6"]));
    let b = stdout(&run(&["bound", "--k", "6", "--closed-form"]));
    let c = stdout(&run(&["bound", "--times", "0,1,2,3,4,5,6", "--amounts", "1,1,1,1,1,1"]));
    let (ra, rb, rc) = (table(&a).1, table(&b).1, table(&c).1);
    for ((x, y), z) in ra.iter().zip(&rb).zip(&rc) {
        for j in 0..x.len() {
            assert!((x[j] - y[j]).abs() < 1e-9 && (x[j] - z[j]).abs() < 1e-12);
        }
    }
}

#[test]
fn closed_form_precondition_is_a_usage_error() {
    let o = run(&["bound", "--closed-form", "--alpha", "1", "--k", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("alpha != 1"));
    let o = run(&["withdraw", "--closed-form", "--mu", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["bound", "--nope"]).status.code(), Some(1));
    assert_eq!(run(&["withdraw", "--C", "1.2"]).status.code(), Some(1));
    assert_eq!(run(&["bound", "--alpha", "2.5"]).status.code(), Some(1));
    assert_eq!(run(&["discount", "--tol", "-1"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn exhausted_frontier_exits_two() {
    assert_eq!(run(&["frontier", "--ks", "2", "--C", "0.3"]).status.code(), Some(2));
}

#[test]
fn withdraw_index_examples() {
    let (_, rows) = table(&stdout(&run(&["withdraw", "--k", "16", "--C", ".95"])));
    assert!(rows[0][1] >= 16.0);
    assert!((rows[0][3] - 0.95).abs() < 1e-9);
    let (h, rows) = table(&stdout(&run(&["withdraw", "--k", "1", "--C", ".5", "--beta", "0", "--mu", "0.3"])));
    assert_eq!(h[1], "necessary_principal");
    assert_eq!(rows[0][1], (-0.3f64).exp());
    let (h, rows) = table(&stdout(&run(&["withdraw", "--k", "5", "--principal", "3"])));
    assert_eq!(h.len(), 4);
    assert_eq!(rows[0][2], 3.0);
    assert!(rows[0][3] > 0.0 && rows[0][3] < 0.95);
}

#[test]
fn oracle_is_deterministic_and_flags_violations() {
    let args = ["oracle", "--paths", "3000", "--k", "4", "--principal", "4", "--seed", "5"];
    let (a, b) = (run(&args), run(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("total_violations=0"));
    let c = run(&["oracle", "--paths", "3000", "--check", "star-domination", "--inflate", "1.01"]);
    assert_eq!(c.status.code(), Some(3));
    let d = run(&["oracle", "--paths", "2000", "--random", "3", "--check", "domination"]);
    assert!(d.status.success());
    assert_eq!(stdout(&d).matches("check=domination").count(), 3);
}

#[test]
fn out_flag_writes_file_with_config_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    let o = run(&["discount", "--alphas", "2", "--mus", "0.2", "--out", path.to_str().unwrap(), "--tol", "1e-10"]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# stablewealth"));
    assert!(text.contains("tol=0.0000000001"));
    let (_, rows) = table(&text);
    assert!(rows[0][3] > rows[0][4] && rows[0][3] < rows[0][5]);
}

fn write_series(path: &Path, n: usize) {
    use rand::SeedableRng;
    let law = stablewealth::StableParams::new(1.89, 1.0, 0.110, 0.0658).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let mut text = String::from("year,I,D,C\n");
    let (mut index, cpi) = (100.0f64, 10.0);
    for year in 0..n {
        text.push_str(&format!("{},{index},0,{cpi}\n", 1900 + year));
        index *= law.sample(&mut rng).exp();
    }
    std::fs::write(path, text).unwrap();
}

#[test]
fn data_pipeline_writes_three_tables() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("series.csv");
    write_series(&input, 400);
    let out = dir.path().join("out");
    let o = run(&["data", "--input", input.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, fit) = table(&std::fs::read_to_string(out.join("fit.csv")).unwrap());
    assert_eq!(h[0], "alpha");
    assert!((fit[0][0] - 1.89).abs() < 0.2 && (fit[0][2] - 0.11).abs() < 0.03);
    let (h, ret) = table(&std::fs::read_to_string(out.join("returns.csv")).unwrap());
    assert_eq!(h, ["year", "gross", "log"]);
    assert_eq!(ret.len(), 399);
    let (h, qq) = table(&std::fs::read_to_string(out.join("qq.csv")).unwrap());
    assert_eq!(h, ["p", "empirical", "model"]);
    assert!(qq.windows(2).all(|w| w[1][1] >= w[0][1] && w[1][2] > w[0][2]));

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "year,I,D,C\n2000,1,0,1\n2001,1,0,-1\n").unwrap();
    let o = run(&["data", "--input", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("row 3"));
}
