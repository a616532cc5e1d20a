use std::fs;
use std::path::Path;

use gridcache::io::read_tradeoff_csv;
use gridcache_cli::run;
use serde_json::Value;

fn go(args: &[&str]) -> i32 {
    let mut argv = vec!["gridcache"];
    argv.extend_from_slice(args);
    run(argv)
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn construct_then_verify_mn() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("mn.json");
    assert_eq!(go(&["construct-pda", "--family", "mn", "--k", "3", "--t", "2", "--out", path_str(&file)]), 0);
    let v = read(&file);
    assert_eq!(v["entries"][0], serde_json::json!(["*", "*", 1]));
    assert_eq!(go(&["verify-pda", path_str(&file), "--t", "2", "--l", "2"]), 0);
    assert_eq!(go(&["verify-pda", path_str(&file), "--t", "1"]), 1);
    assert_eq!(go(&["verify-pda", path_str(&file), "--l", "2"]), 2);
}

#[test]
fn partition_file_has_phi_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("part.json");
    assert_eq!(
        go(&["construct-pda", "--family", "partition", "--q", "3", "--z", "2", "--m", "2", "--out", path_str(&file)]),
        0
    );
    let v = read(&file);
    assert_eq!(v["phi"][3], serde_json::json!([4, [1, 2, 1]]));
    assert_eq!(go(&["verify-pda", path_str(&file)]), 0);
    assert_eq!(go(&["construct-pda", "--family", "partition", "--q", "3", "--z", "3", "--m", "1", "--out", path_str(&file)]), 1);
    assert_eq!(go(&["construct-pda", "--family", "partition", "--q", "3"]), 2);
}

#[test]
fn all_star_file_passes_vacuously() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("stars.json");
    fs::write(
        &file,
        r#"{"rows":3,"cols":3,"Z":3,"S":0,"entries":[["*","*","*"],["*","*","*"],["*","*","*"]]}"#,
    )
    .unwrap();
    assert_eq!(go(&["verify-pda", path_str(&file)]), 0);
}

#[test]
fn hybrid_build_and_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let scheme = dir.path().join("hybrid.json");
    let report = dir.path().join("report.json");
    assert_eq!(go(&["build-scheme", "--kind", "hybrid", "5", "3", "2", "2", "15", "--out", path_str(&scheme)]), 0);
    assert_eq!(
        go(&["simulate", path_str(&scheme), "--demand", "all-distinct", "--packet-size", "16", "--transcript", "--out", path_str(&report)]),
        0
    );
    let v = read(&report);
    assert_eq!(v["load"], serde_json::json!({"num": 3, "den": 1}));
    assert_eq!(v["closed_form_load"], serde_json::json!({"num": 3, "den": 1}));
    assert_eq!(v["total_messages"], 405);
    assert_eq!(v["packets_per_file"], 135);
    assert_eq!(v["all_decoded"], true);
    assert_eq!(v["transcript"].as_array().unwrap().len(), 405);
    assert_eq!(v["transcript"][0]["payload_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn default_names_use_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    std::env::set_var(gridcache_cli::OUT_DIR_VAR, dir.path());
    assert_eq!(go(&["build-scheme", "--kind", "grouping", "4", "4", "2", "1", "16"]), 0);
    let scheme = dir.path().join("scheme_grouping_4_4_2_1_16.json");
    assert!(scheme.exists());
    assert_eq!(go(&["simulate", path_str(&scheme), "--demand", "seed:3", "--packet-size", "8"]), 0);
    assert!(dir.path().join("report_grouping_4_4_2_1_16_seed3.json").exists());
    assert_eq!(go(&["tradeoff", "12", "8", "2", "96"]), 0);
    assert!(dir.path().join("tradeoff_12_8_2_96.csv").exists());
    std::env::remove_var(gridcache_cli::OUT_DIR_VAR);
}

#[test]
fn other_scheme_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["--kind", "baseline", "5", "4", "2", "2", "20"],
        vec!["--kind", "baseline", "4", "3", "2", "3/2", "12"],
        vec!["--kind", "baseline", "4", "2", "2", "1", "8"],
        vec!["--kind", "cwlzc", "5", "2", "2", "15"],
        vec!["--kind", "shared-link", "4", "2"],
    ];
    for (i, case) in cases.iter().enumerate() {
        let scheme = dir.path().join(format!("s{i}.json"));
        let mut args = vec!["build-scheme"];
        args.extend(case);
        args.extend(["--out", path_str(&scheme)]);
        assert_eq!(go(&args), 0, "{case:?}");
        let report = dir.path().join(format!("r{i}.json"));
        assert_eq!(
            go(&["simulate", path_str(&scheme), "--packet-size", "8", "--out", path_str(&report)]),
            0,
            "{case:?}"
        );
        let v = read(&report);
        assert_eq!(v["load"], v["closed_form_load"], "{case:?}");
    }
}

#[test]
fn scheme_from_pda_files() {
    let dir = tempfile::tempdir().unwrap();
    let pda = dir.path().join("mn.json");
    assert_eq!(go(&["construct-pda", "--family", "mn", "--k", "3", "--t", "2", "--out", path_str(&pda)]), 0);
    let outer = dir.path().join("hybrid.json");
    assert_eq!(
        go(&["build-scheme", "--kind", "hybrid", "5", "3", "2", "2", "15", "--outer", path_str(&pda), "--out", path_str(&outer)]),
        0
    );
    let line = dir.path().join("line.json");
    assert_eq!(
        go(&["build-scheme", "--kind", "cwlzc", "2", "2", "15", "--pda", path_str(&pda), "--out", path_str(&line)]),
        0
    );
    assert_eq!(read(&line)["params"]["K"], 5);
}

#[test]
fn infeasible_parameters_fail() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.json");
    assert_eq!(go(&["build-scheme", "--kind", "grouping", "5", "4", "2", "1", "20", "--out", path_str(&out)]), 1);
    assert_eq!(go(&["build-scheme", "--kind", "hybrid", "4", "2", "2", "1", "8", "--out", path_str(&out)]), 1);
    assert_eq!(go(&["build-scheme", "--kind", "baseline", "4", "4", "2", "1", "16", "--out", path_str(&out)]), 1);
    assert_eq!(go(&["build-scheme", "--kind", "hybrid", "5", "3", "2", "--out", path_str(&out)]), 2);
    assert_eq!(go(&["tradeoff", "11", "9", "2", "99", "--kinds", "grouping", "--out", path_str(&out)]), 1);
    assert_eq!(go(&["tradeoff", "11", "9", "2", "99", "--kinds", "nonsense", "--out", path_str(&out)]), 2);
    assert!(!out.exists());
}

#[test]
fn tampered_scheme_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let scheme = dir.path().join("s.json");
    assert_eq!(go(&["build-scheme", "--kind", "cwlzc", "5", "2", "2", "15", "--out", path_str(&scheme)]), 0);
    let mut v = read(&scheme);
    v["user_delivery"][0][4] = serde_json::json!(2);
    fs::write(&scheme, v.to_string()).unwrap();
    assert_eq!(go(&["simulate", path_str(&scheme), "--out", path_str(&dir.path().join("r.json"))]), 1);
}

#[test]
fn tradeoff_csv_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    assert_eq!(go(&["tradeoff", "11", "9", "2", "99", "--kinds", "baseline,hybrid", "--out", path_str(&csv)]), 0);
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("memory_ratio_num,memory_ratio_den,load_num,load_den,scheme,t\n"));
    let rows = read_tradeoff_csv(text.as_bytes()).unwrap();
    assert!(rows.iter().all(|r| !r.scheme.contains("grouping")));
    assert!(rows.iter().any(|r| r.scheme == "baseline" && r.t == "9/2"));

    let float = dir.path().join("f.csv");
    assert_eq!(go(&["tradeoff", "12", "8", "2", "96", "--float", "--out", path_str(&float)]), 0);
    let head = fs::read_to_string(&float).unwrap();
    assert!(head.lines().next().unwrap().ends_with(",memory_ratio,load"));
}
