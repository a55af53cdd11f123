use chabauty_core::cli;
use serde_json::Value;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("chabauty").chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn json_rows(args: &[&str]) -> Vec<Value> {
    let r = run(args);
    assert_eq!(r.code, 0, "stderr: {}", r.err);
    serde_json::from_str::<Value>(&r.out).unwrap().as_array().unwrap().clone()
}

fn row<'a>(rows: &'a [Value], key: &str, val: &str) -> &'a Value {
    rows.iter()
        .find(|r| r[key] == val)
        .unwrap_or_else(|| panic!("no row with {key} = {val}"))
}

#[test]
fn dims_p1_depth_6() {
    let rows = json_rows(&["dims", "p1", "--depth", "6"]);
    assert_eq!(rows.len(), 6);
    assert_eq!(row(&rows, "n", "6")["e"], "9");
}

#[test]
fn dims_genus_2_depth_4() {
    let rows = json_rows(&["dims", "genus:2", "--depth", "4"]);
    let r = row(&rows, "n", "4");
    assert_eq!(r["e"], "45");
    assert_eq!(r["dim_V_c"], "21");
    assert_eq!(row(&rows, "n", "2")["chi_c"], "-3");
}

#[test]
fn dims_genus_1_is_usage_error() {
    let r = run(&["dims", "genus:1"]);
    assert_eq!(r.code, 2);
    assert!(!r.err.is_empty());
}

#[test]
fn bounds_examples() {
    let rows = json_rows(&["bounds", "mg", "--g", "4", "--r", "1"]);
    assert_eq!(rows[0]["min_n"], "217");

    let rows = json_rows(&["bounds", "sunit", "--s", "6"]);
    let min_n: f64 = rows[0]["min_n"].as_str().unwrap().parse().unwrap();
    assert!((min_n - 7.05e12).abs() < 0.1e12, "{min_n}");
    assert_eq!(rows[0]["valid"], "true");

    let rows = json_rows(&["bounds", "classical", "--g", "4"]);
    assert_eq!(row(&rows, "name", "krzb")["threshold"], "980");
}

#[test]
fn bounds_invalid_window_is_a_row() {
    let rows = json_rows(&["bounds", "thm1-smooth", "--g", "2", "--s", "1", "--r", "1"]);
    assert_eq!(rows[0]["valid"], "false");
}

#[test]
fn bounds_unknown_theorem() {
    assert_eq!(run(&["bounds", "nonsense"]).code, 2);
}

#[test]
fn every_row_carries_anchor_and_config() {
    for args in [
        &["dims", "p1", "--depth", "3"][..],
        &["bounds", "classical", "--g", "4"],
        &["transport", "--demo", "betti-square"],
        &["axs", "--demo", "parabola"],
    ] {
        for r in json_rows(args) {
            assert!(r["anchor"].as_str().is_some_and(|a| !a.is_empty()), "{args:?}");
            assert!(r["config"].as_str().unwrap().contains("digits=50"));
        }
    }
}

#[test]
fn output_formats() {
    let csv = run(&["--format", "csv", "dims", "p1", "--depth", "3"]).out;
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# digits=50 cap=16 p=5 N=8"));
    assert!(lines.next().unwrap().starts_with("n,e,"));
    assert_eq!(lines.count(), 3);

    let md = run(&["--format", "md", "--digits", "30", "dims", "p1", "--depth", "3"]).out;
    assert!(md.starts_with("config: `digits=30"));
    assert!(md.contains("| n | e |"));
}

#[test]
fn transport_demos() {
    let rows = json_rows(&["transport", "--demo", "betti-square"]);
    assert_eq!(rows[0]["residual"], "0");
    assert_eq!(rows[0]["consistent"], "true");

    let r = run(&["transport", "--demo", "non-flat"]);
    assert_eq!(r.code, 1);
    assert!(!r.err.is_empty());
}

#[test]
fn axs_demos() {
    let rows = json_rows(&["axs", "--demo", "parabola"]);
    assert_eq!(row(&rows, "kind", "verdict")["verdict"], "FirstIntegral(t1)");

    let rows = json_rows(&["axs", "--demo", "constant"]);
    assert_eq!(row(&rows, "kind", "verdict")["verdict"], "SubalgebraDescent(dim 1)");
}

#[test]
fn malformed_input_file() {
    let dir = std::env::temp_dir().join(format!("chabauty-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let path = bad.to_str().unwrap();
    assert_eq!(run(&["transport", path]).code, 2);
    assert_eq!(run(&["axs", path]).code, 2);
    assert_eq!(run(&["transport", dir.join("missing.json").to_str().unwrap()]).code, 2);
}

#[test]
fn transport_round_trips_through_a_file() {
    let dir = std::env::temp_dir().join(format!("chabauty-cli-rt-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let conn = chabauty_core::transport::demo_family(6);
    let path = dir.join("family.json");
    std::fs::write(&path, conn.to_json().to_string()).unwrap();
    let rows = json_rows(&["transport", path.to_str().unwrap(), "--query", "flatness"]);
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r["flat"] != "false"));
}

#[test]
fn paper_check_passes_and_tamper_fails() {
    let r = run(&["paper-check"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let rows: Vec<Value> = serde_json::from_str::<Value>(&r.out).unwrap().as_array().unwrap().clone();
    assert!(rows.iter().all(|x| x["status"] != "fail"));
    assert_eq!(row(&rows, "check", "mg_identity")["status"], "pass");
    assert_eq!(row(&rows, "check", "lemma_depth_dominance")["status"], "known-deviation");

    let r = run(&["paper-check", "--tamper-mg"]);
    assert_eq!(r.code, 1);
    assert!(r.err.contains("Cor Mg"));
}

#[test]
fn paper_check_unweighted_skips_oracle() {
    let r = run(&["--convention", "unweighted", "paper-check"]);
    assert_eq!(r.code, 0);
    assert!(r.err.contains("warning: j_oracle_grid skipped"));
}

#[test]
fn deterministic_output() {
    for fmt in ["json", "csv", "md"] {
        let args = ["--format", fmt, "--seed", "7", "bounds", "classical", "--g", "5"];
        assert_eq!(run(&args).out, run(&args).out);
        let args = ["--format", fmt, "axs", "--demo", "constant"];
        assert_eq!(run(&args).out, run(&args).out);
    }
}

#[test]
fn clap_errors_are_usage() {
    assert_eq!(run(&["dims"]).code, 2);
    assert_eq!(run(&["--format", "xml", "dims", "p1"]).code, 2);
    assert_eq!(run(&["frobnicate"]).code, 2);
}
