use approx::assert_relative_eq;
use noise_stability::discrete::{stability_exact, stability_mc, VotingRule};
use noise_stability::profile::{bilinear_stability, profile_stability_with_depth, RadialProfile};
use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn nsl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsl"))
        .args(args)
        .env_remove("NSL_FORMAT")
        .env_remove("NSL_OUT")
        .env_remove("NSL_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn scratch_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("nsl-test-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).expect("scratch file");
    path
}

#[test]
fn constants_text_report() {
    let out = nsl(&["constants"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("alpha2 = 0.878567205785"), "{text}");
    assert!(text.contains("alpha3 = 0.836008114643"), "{text}");
    assert!(text.contains("beta3"), "{text}");
}

#[test]
fn constants_json_report() {
    let out = nsl(&["constants", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_relative_eq!(
        v["alpha2"]["value"].as_f64().unwrap(),
        0.878567205785,
        max_relative = 1e-11
    );
    assert_relative_eq!(
        v["alpha3"]["value"].as_f64().unwrap(),
        0.836008114643,
        max_relative = 1e-10
    );
    assert_relative_eq!(
        v["beta3"]["value"].as_f64().unwrap(),
        0.989371995972467,
        max_relative = 1e-11
    );
    assert_relative_eq!(
        v["alpha3"]["argmin"].as_f64().unwrap(),
        -0.5,
        epsilon = 1e-9
    );
}

#[test]
fn verify_list_prints_the_catalog_in_order() {
    let out = nsl(&["verify", "--list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    let names: Vec<&str> = text.lines().map(str::trim).collect();
    assert_eq!(names.len(), 10);
    assert_eq!(names[0], "radial-damping-floor");
    assert_eq!(names[9], "arc-deficit-quadratic");
}

#[test]
fn verify_green_check_exits_zero() {
    let out = nsl(&["verify", "radial-damping-floor"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("PASS radial-damping-floor"));
    assert!(text.contains("2 of 2 checks passed"), "{text}");
}

#[test]
fn verify_failing_check_exits_one() {
    let out = nsl(&["verify", "radial-correlation-budget"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout_of(&out);
    assert!(text.contains("FAIL radial-correlation-budget"));
    assert!(text.contains("0 of 4 checks passed"), "{text}");
}

#[test]
fn verify_all_reports_every_canonical_instance() {
    let out = nsl(&["verify", "all", "--format", "json"]);
    // the closed-form budget families fail by design, so "all" cannot exit 0
    assert_eq!(out.status.code(), Some(1));
    let reports: Vec<serde_json::Value> = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(reports.len(), 21);
    let passed = reports
        .iter()
        .filter(|r| r["passed"].as_bool().unwrap())
        .count();
    assert_eq!(passed, 11);
    // bare `nsl verify` means the same thing (modulo wall-clock runtimes)
    let bare = nsl(&["verify", "--format", "json"]);
    assert_eq!(bare.status.code(), Some(1));
    let mut again: Vec<serde_json::Value> = serde_json::from_str(&stdout_of(&bare)).unwrap();
    let mut first = reports.clone();
    for r in first.iter_mut().chain(again.iter_mut()) {
        r.as_object_mut().unwrap().remove("runtime_ms");
    }
    assert_eq!(first, again);
}

#[test]
fn verify_refine_attaches_grid_commentary() {
    let out = nsl(&["verify", "eigenvalue-decay-scalar", "--refine"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("grid doubling confirms the margin"));
}

#[test]
fn verify_unknown_name_is_a_usage_error() {
    let out = nsl(&["verify", "lemma-twelve"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("unknown check name"));
}

#[test]
fn stability_of_sectors_matches_the_closed_form() {
    let out = nsl(&[
        "stability",
        "--rho",
        "0.05",
        "--sectors",
        "64",
        "--penalty",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_relative_eq!(
        v["total"].as_f64().unwrap(),
        0.351386497043,
        max_relative = 1e-11
    );
    // equal sectors never deviate, so the penalty vanishes identically
    assert_eq!(v["penalty"].as_f64().unwrap(), 0.0);
}

#[test]
fn stability_reads_profiles_from_files_and_stdin() {
    let profile = RadialProfile::balanced_family(1, 64).unwrap();
    let path = scratch_file("family1.json", &profile.to_json());

    let out = nsl(&[
        "stability",
        "--rho",
        "0.05",
        "--profile",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let expected = profile_stability_with_depth(0.05, &profile, 60).unwrap();
    assert_eq!(v["total"].as_f64().unwrap(), expected.total);

    // same profile over stdin
    let mut child = Command::new(env!("CARGO_BIN_EXE_nsl"))
        .args([
            "stability",
            "--rho",
            "0.05",
            "--profile",
            "-",
            "--format",
            "json",
        ])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(profile.to_json().as_bytes())
        .unwrap();
    let piped = child.wait_with_output().unwrap();
    assert_eq!(piped.status.code(), Some(0));
    assert_eq!(stdout_of(&piped), stdout_of(&out));

    std::fs::remove_file(path).ok();
}

#[test]
fn stability_pair_mode_matches_the_library() {
    let f = RadialProfile::balanced_family(1, 64).unwrap();
    let g = RadialProfile::balanced_family(21, 64).unwrap();
    let fp = scratch_file("pair-f.json", &f.to_json());
    let gp = scratch_file("pair-g.json", &g.to_json());

    let out = nsl(&[
        "stability",
        "--rho",
        "0.02",
        "--profile",
        fp.to_str().unwrap(),
        "--pair",
        gp.to_str().unwrap(),
        "--antipodal",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let expected = bilinear_stability(0.02, &f, &g.antipodal()).unwrap();
    assert_eq!(v["total"].as_f64().unwrap(), expected.total);

    std::fs::remove_file(fp).ok();
    std::fs::remove_file(gp).ok();
}

#[test]
fn lambda_rows_respect_their_envelopes() {
    let out = nsl(&[
        "lambda",
        "--rho",
        "0.1",
        "--max-degree",
        "6",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows: Vec<serde_json::Value> = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(rows.len(), 7);
    assert_eq!(rows[0]["lambda"].as_f64().unwrap(), 1.0);
    for row in &rows[1..] {
        let lambda = row["lambda"].as_f64().unwrap();
        assert!(row["lower"].as_f64().unwrap() <= lambda);
        assert!(lambda <= row["upper"].as_f64().unwrap());
    }
}

#[test]
fn lambda_negative_correlation_has_no_envelopes() {
    let out = nsl(&[
        "lambda",
        "--rho",
        "-0.07",
        "--max-degree",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows: Vec<serde_json::Value> = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert!(rows[1]["lambda"].as_f64().unwrap() < 0.0);
    assert!(rows[1]["lower"].is_null() && rows[1]["upper"].is_null());
}

#[test]
fn simulate_exact_matches_the_library() {
    let out = nsl(&[
        "simulate",
        "--rule",
        "plurality",
        "--voters",
        "5",
        "--rho",
        "0.1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("0.362993086419753"));

    let json = nsl(&[
        "simulate",
        "--rule",
        "plurality",
        "--voters",
        "5",
        "--rho",
        "0.1",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&json)).unwrap();
    let rule = VotingRule::Plurality {
        candidates: 3,
        voters: 5,
    };
    assert_eq!(
        v["value"].as_f64().unwrap(),
        stability_exact(&rule, 0.1).unwrap()
    );
}

#[test]
fn simulate_mc_is_reproducible_and_matches_the_library() {
    let args = [
        "simulate",
        "--rule",
        "majority",
        "--voters",
        "9",
        "--rho",
        "0.5",
        "--mc",
        "--samples",
        "50000",
        "--seed",
        "7",
        "--format",
        "json",
    ];
    let first = nsl(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(stdout_of(&nsl(&args)), stdout_of(&first));

    let v: serde_json::Value = serde_json::from_str(&stdout_of(&first)).unwrap();
    let rule = VotingRule::Majority { voters: 9 };
    let est = stability_mc(&rule, 0.5, 50_000, 7).unwrap();
    assert_eq!(v["value"].as_f64().unwrap(), est.value);
    assert_eq!(v["std_error"].as_f64().unwrap(), est.std_error);
    assert_eq!(v["seed"].as_u64().unwrap(), 7);
}

#[test]
fn simulate_majority_ladder() {
    let out = nsl(&[
        "simulate",
        "--rule",
        "majority",
        "--ladder",
        "1:7",
        "--rho",
        "0.5",
        "--samples",
        "2000",
        "--seed",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_relative_eq!(
        v["limit"].as_f64().unwrap(),
        1.0 / 3.0,
        max_relative = 1e-15
    );
    let rows = v["rows"].as_array().unwrap();
    let sizes: Vec<u64> = rows.iter().map(|r| r["voters"].as_u64().unwrap()).collect();
    assert_eq!(sizes, vec![1, 3, 5, 7]);
    for r in rows {
        let gap = r["value"].as_f64().unwrap() - v["limit"].as_f64().unwrap();
        assert_relative_eq!(
            r["gap_to_limit"].as_f64().unwrap(),
            gap,
            max_relative = 1e-12
        );
    }
}

#[test]
fn simulate_plurality_ladder_marks_exact_rows() {
    let out = nsl(&[
        "simulate",
        "--rule",
        "plurality",
        "--ladder",
        "7:9",
        "--rho",
        "0.1",
        "--samples",
        "2000",
        "--seed",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(!rows[0]["monte_carlo"].as_bool().unwrap());
    assert!(!rows[1]["monte_carlo"].as_bool().unwrap());
    assert!(rows[2]["monte_carlo"].as_bool().unwrap());
}

#[test]
fn simulate_influences() {
    let out = nsl(&[
        "simulate",
        "--rule",
        "plurality",
        "--voters",
        "5",
        "--rho",
        "0",
        "--influences",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert_eq!(text.lines().count(), 5);
    assert!(text.contains("influence[4] = 0.148148148148148"), "{text}");
}

#[test]
fn simulate_lookup_rule_from_file() {
    let path = scratch_file(
        "lookup.json",
        r#"{"k": 3, "n": 2, "table": [0,0,0,1,1,1,2,2,2]}"#,
    );
    let out = nsl(&[
        "simulate",
        "--rule",
        "lookup",
        "--table",
        path.to_str().unwrap(),
        "--rho",
        "0.4",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    // the table is a first-voter dictator, so stability is the stay probability
    assert_relative_eq!(
        v["value"].as_f64().unwrap(),
        (1.0 + 2.0 * 0.4) / 3.0,
        max_relative = 1e-14
    );
    std::fs::remove_file(path).ok();
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let path = std::env::temp_dir().join(format!("nsl-test-{}-out.txt", std::process::id()));
    let out = nsl(&["constants", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.contains("alpha2"));
    std::fs::remove_file(path).ok();
}

#[test]
fn jobs_flag_does_not_change_results() {
    let reference = nsl(&["verify", "smoothed-kink-bound", "--format", "json"]);
    let pinned = nsl(&[
        "verify",
        "smoothed-kink-bound",
        "--format",
        "json",
        "--jobs",
        "2",
    ]);
    assert_eq!(pinned.status.code(), Some(0));
    let a: Vec<serde_json::Value> = serde_json::from_str(&stdout_of(&reference)).unwrap();
    let b: Vec<serde_json::Value> = serde_json::from_str(&stdout_of(&pinned)).unwrap();
    assert_eq!(a[0]["min_margin"], b[0]["min_margin"]);
}

#[test]
fn usage_and_domain_errors_exit_two() {
    // domain: enumeration cap
    let out = nsl(&[
        "simulate",
        "--rule",
        "plurality",
        "--voters",
        "9",
        "--rho",
        "0.1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("enumeration cap"));

    // domain: sample floor
    let out = nsl(&[
        "simulate",
        "--rule",
        "plurality",
        "--voters",
        "5",
        "--rho",
        "0.1",
        "--mc",
        "--samples",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // usage: lookup without a table
    let out = nsl(&["simulate", "--rule", "lookup", "--rho", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("--table"));

    // usage: ladders only scan voting ladders that exist
    let out = nsl(&[
        "simulate", "--rule", "dictator", "--ladder", "1:5", "--rho", "0.1",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // usage: malformed ladder spec
    let out = nsl(&[
        "simulate", "--rule", "majority", "--ladder", "5", "--rho", "0.1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = nsl(&[
        "simulate", "--rule", "majority", "--ladder", "9:3", "--rho", "0.1",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // usage: missing required arguments (clap's own exit)
    let out = nsl(&["stability", "--rho", "0.05"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn format_env_variable_is_honoured() {
    let out = Command::new(env!("CARGO_BIN_EXE_nsl"))
        .args(["constants"])
        .env("NSL_FORMAT", "json")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(serde_json::from_str::<serde_json::Value>(&stdout_of(&out)).is_ok());
}
