use std::fs;
use std::process::{Command, Output};

fn thincirc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thincirc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn rho_prints_fraction() {
    let o = thincirc(&["rho", "--k", "3", "--l", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "5/6\n");
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.starts_with("# thincirc rho --k 3 --l 3"));
}

#[test]
fn rho_table_is_csv() {
    let o = thincirc(&["rho", "--table", "4"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "K,L,rho,rho_decimal,argmax_n");
    assert_eq!(lines.len(), 1 + 6);
    assert!(lines.contains(&"2,2,1/1,1,2"));
}

#[test]
fn sumset_min_with_and_without_oracle() {
    let o = thincirc(&["sumset-min", "--k", "3", "--l", "3", "--n", "4"]);
    assert_eq!((code(&o), stdout(&o)), (0, "9\n".to_string()));
    let o = thincirc(&[
        "sumset-min",
        "--k",
        "3",
        "--l",
        "3",
        "--n",
        "3",
        "--oracle",
        "partition",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "6\npartition 6 s=2 s_A=0 s_B=0\n");
    let o = thincirc(&[
        "sumset-min",
        "--k",
        "2",
        "--l",
        "2",
        "--n",
        "2",
        "--oracle",
        "grid",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("4\ngrid 4 "));
}

#[test]
fn invalid_arguments_exit_two() {
    assert_eq!(
        code(&thincirc(&[
            "sumset-min",
            "--k",
            "3",
            "--l",
            "3",
            "--n",
            "9"
        ])),
        2
    );
    assert_eq!(code(&thincirc(&["rho", "--k", "1", "--l", "3"])), 2);
    assert_eq!(code(&thincirc(&["rho", "--k", "3"])), 2);
    assert_eq!(code(&thincirc(&["frobnicate"])), 2);
    let o = thincirc(&[
        "verify",
        "--input",
        "/nonexistent.json",
        "--k",
        "2",
        "--l",
        "2",
    ]);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
}

#[test]
fn version_lists_formats() {
    let o = thincirc(&["--version"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("matrix-json/1") && text.contains("sweep-csv/1"));
}

#[test]
fn construct_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.json");
    let out_s = out.to_str().unwrap();
    let args = [
        "construct",
        "--n",
        "200",
        "--k",
        "2",
        "--l",
        "2",
        "--scale",
        "40",
        "--seed",
        "3",
        "--out",
        out_s,
    ];
    let o = thincirc(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let first = fs::read_to_string(&out).unwrap();
    let json: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(json["matrix"]["n"], 400);
    assert_eq!(json["params"]["seed"], 3);
    assert!(json["trials_used"].as_u64().unwrap() >= 1);

    // Same parameters with a different worker count give identical bytes.
    let mut rerun = args.to_vec();
    rerun.extend(["--jobs", "3"]);
    assert_eq!(code(&thincirc(&rerun)), 0);
    assert_eq!(fs::read_to_string(&out).unwrap(), first);

    for mode in ["cyclic", "integer"] {
        let o = thincirc(&[
            "verify", "--input", out_s, "--k", "2", "--l", "2", "--mode", mode,
        ]);
        assert_eq!((code(&o), stdout(&o)), (0, "free\n".to_string()), "{mode}");
    }
}

#[test]
fn verify_reports_witness_and_budget() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dense.json");
    fs::write(&path, r#"{"n":8,"orientation":"plus","support":[0,1,2,3]}"#).unwrap();
    let p = path.to_str().unwrap();
    let o = thincirc(&["verify", "--input", p, "--k", "2", "--l", "2"]);
    assert_eq!(code(&o), 3);
    assert_eq!(
        stdout(&o),
        "{\"rows\":[0,1],\"cols\":[0,1],\"mode\":\"cyclic\"}\n"
    );

    let full: Vec<u32> = (0..64).collect();
    fs::write(
        &path,
        serde_json::json!({"n": 64, "orientation": "plus", "support": full}).to_string(),
    )
    .unwrap();
    let o = thincirc(&[
        "verify", "--input", p, "--k", "3", "--l", "3", "--budget", "1",
    ]);
    assert_eq!(code(&o), 4);

    fs::write(&path, r#"{"n":8,"orientation":"minus","support":[0]}"#).unwrap();
    assert_eq!(
        code(&thincirc(&["verify", "--input", p, "--k", "2", "--l", "2"])),
        2
    );
}

#[test]
fn construct_failure_exits_three() {
    let o = thincirc(&[
        "construct",
        "--n",
        "64",
        "--k",
        "2",
        "--l",
        "2",
        "--scale",
        "5000",
        "--max-trials",
        "2",
    ]);
    assert_eq!(code(&o), 3);
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("\"reason\": \"rectangle\""));
}

#[test]
fn enum_rect_lists_and_verifies() {
    let o = thincirc(&["enum-rect", "--n", "3", "--k", "2", "--l", "2"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 9);
    assert_eq!(text.lines().next(), Some("a=0,1 b=0,1 m=3 n=3"));

    let o = thincirc(&[
        "enum-rect",
        "--n",
        "2",
        "--k",
        "2",
        "--l",
        "2",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);

    let o = thincirc(&[
        "enum-rect",
        "--n",
        "4",
        "--k",
        "3",
        "--l",
        "2",
        "--verify",
        "all",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["structural_violations"].as_array().unwrap().len(), 0);
    assert_eq!(v["lemma2"]["violations"], 0);

    assert_eq!(
        code(&thincirc(&[
            "enum-rect",
            "--n",
            "100",
            "--k",
            "3",
            "--l",
            "3"
        ])),
        2
    );
}

#[test]
fn experiment_sweep_and_corollary() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    let csv = dir.path().join("out.csv");
    fs::write(
        &spec,
        r#"{"n_values":[64],"k":2,"l":2,"scales":[0,50],"samples":10,"seed":1}"#,
    )
    .unwrap();
    let args = [
        "experiment",
        "sweep",
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        csv.to_str().unwrap(),
    ];
    assert_eq!(code(&thincirc(&args)), 0);
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("N,k,l,scale,p,samples,free_frac,mean_gamma,mean_trials,seed")
    );
    assert_eq!(lines.next(), Some("64,2,2,0.0,0.0,10,1.0,0.0,1.0,1"));
    assert_eq!(lines.count(), 1);

    let o = thincirc(&["experiment", "corollary", "--n", "16"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["k"], 4);
    assert_eq!(v["rho"]["value"], "3/5");
    assert_eq!(code(&thincirc(&["experiment", "corollary", "--n", "3"])), 2);
}
