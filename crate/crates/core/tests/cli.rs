use std::fs;
use std::process::Command;

use bmhull::cli::parse_results_json;

fn bmhull(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_bmhull")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn formulas_in_the_plane() {
    let (code, out, _) = bmhull(&["formulas", "-n", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("1.570796"));
    assert!(out.contains("5.013256"));
    assert!(out.lines().next().unwrap().starts_with("n,j,"));
}

#[test]
fn bridge_probability_as_json() {
    let (code, out, _) = bmhull(&[
        "walk1d", "--variant", "bridge_positive", "--alpha", "10", "--replicates", "1000000", "--seed", "7",
        "--format", "json",
    ]);
    assert_eq!(code, 0);
    let doc = parse_results_json(&out).unwrap();
    let row = &doc.results[0];
    let (mean, se) = (row["mean"].as_f64().unwrap(), row["stderr"].as_f64().unwrap());
    assert!((mean - 0.0999954600070).abs() <= 3.0 * se);
    assert_eq!(doc.seed, 7);
    assert_eq!(doc.config["variant"], "bridge_positive");
}

#[test]
fn output_files_repeat_byte_for_byte_across_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let files: Vec<_> = ["1", "1", "3"]
        .iter()
        .enumerate()
        .map(|(k, jobs)| {
            let path = dir.path().join(format!("sweep{k}.csv"));
            let (code, _, err) = bmhull(&[
                "sweep-alpha", "-n", "2", "--alphas", "8,32,128", "--replicates", "300", "--seed", "5", "--jobs",
                jobs, "--out", path.to_str().unwrap(),
            ]);
            assert_eq!(code, 0, "{err}");
            fs::read(path).unwrap()
        })
        .collect();
    assert_eq!(files[0], files[1]);
    assert_eq!(files[0], files[2]);
    let text = String::from_utf8(files[0].clone()).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "n,alpha,replicates,vol_mean,vol_stderr,surf_mean,surf_stderr,closed_form_vol,ratio,deficit_bound,ratio_upper_bound,monotonicity_violations"
    );
    assert_eq!(text.lines().count(), 4);
    assert!(!text.contains('\r'));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# walk settings\nvariant = walk_positive\nalpha = 2\nreplicates = 500\nseed = 3\n").unwrap();
    let (code, out, _) = bmhull(&["walk1d", "--config", cfg.to_str().unwrap(), "--alpha", "5", "--format", "json"]);
    assert_eq!(code, 0);
    let doc = parse_results_json(&out).unwrap();
    assert_eq!(doc.config["alpha"], "5.0");
    assert_eq!(doc.config["replicates"], "500");
    assert_eq!(doc.results[0]["alpha"].as_f64(), Some(5.0));

    let direct = bmhull(&[
        "walk1d", "--variant", "walk_positive", "--alpha", "5", "--replicates", "500", "--seed", "3", "--format", "json",
    ]);
    assert_eq!(direct.1, out);
}

#[test]
fn validation_errors_exit_one() {
    for args in [
        vec!["simulate", "--alpha", "-3"],
        vec!["simulate", "-n", "8", "--alpha", "10"],
        vec!["simulate", "--alpha", "1e6"],
        vec!["walk1d", "--variant", "sideways", "--alpha", "1"],
        vec!["sweep-alpha", "--alphas", "30,10"],
        vec!["psi", "--replicates", "3"],
        vec!["formulas", "--format", "xml"],
        vec!["facet-prob", "--r", "0.7,0.4", "--alpha", "10"],
        vec!["unknown-command"],
    ] {
        let (code, _, err) = bmhull(&args);
        assert_eq!(code, 1, "{args:?}: {err}");
    }
}

#[test]
fn unwritable_destination_exits_one() {
    let (code, _, _) = bmhull(&["formulas", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(code, 1);
}

#[test]
fn census_reports_every_scale() {
    let (code, out, err) = bmhull(&[
        "facet-census", "--alphas", "200,400", "--scales", "0.5,1", "--epsilon", "0.2", "--replicates", "10",
        "--mc-points", "1000",
    ]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out.lines().count(), 5);
}

#[test]
fn verify_quick_subset_passes() {
    let (code, out, _) = bmhull(&["verify", "--quick", "--only", "1,2,3"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out.lines().filter(|l| l.starts_with("[PASS]")).count(), 3);
}
