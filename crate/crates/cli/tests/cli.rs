use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let p: PathBuf = [
        env!("CARGO_MANIFEST_DIR"),
        "..",
        "core",
        "tests",
        "data",
        name,
    ]
    .iter()
    .collect();
    p.display().to_string()
}

fn risec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_risec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn mv_with_strategy_matches_the_golden_kernel() {
    let o = risec(&[
        &data("mv.rise"),
        "--strategy",
        &data("mv.elv"),
        "--target",
        "opencl",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let golden = std::fs::read_to_string(data("mvOptKernel.cl")).unwrap();
    assert_eq!(stdout(&o), golden);
}

#[test]
fn output_file_gets_a_report_with_rules_and_assumptions() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mv.cl");
    let o = risec(&[
        &data("mv.rise"),
        "--strategy",
        &data("mv.elv"),
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let report = std::fs::read_to_string(dir.path().join("mv.cl.report")).unwrap();
    for rule in [
        "splitJoinMap",
        "toMapWorkGroup",
        "toMapLocal",
        "fuseReduceMap",
        "toReduceSeq",
    ] {
        assert!(report.contains(rule), "{report}");
    }
    assert!(report.contains("(n) % (s) = 0"), "{report}");
}

#[test]
fn typed_stage_prints_annotated_parameters() {
    let o = risec(&[&data("mv.rise"), "--emit", "rise-typed"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(
        stdout(&o).contains("fun(row: Array[m, f32] =>"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn missing_memory_reports_rw_mismatch_as_json() {
    let o = risec(&[
        &data("missing_mem_hl.rise"),
        "--strategy",
        &data("lower_only.elv"),
        "--diag-format",
        "json-lines",
    ]);
    assert!(!o.status.success());
    let err = stderr(&o);
    let line: serde_json::Value = serde_json::from_str(err.lines().next().unwrap()).unwrap();
    assert_eq!(line["code"], "RWMismatch");
    assert_eq!(line["stage"], "dpia-typecheck");
    assert_eq!(line["severity"], "error");
    assert_eq!(line["line"], 5);
    assert!(line["message"].as_str().unwrap().contains("mapLocal"));
}

#[test]
fn unlowered_program_is_a_strategy_completeness_error() {
    let o = risec(&[&data("mv.rise")]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("StrategyIncomplete"), "{}", stderr(&o));
}

#[test]
fn run_agrees_across_stages() {
    let dir = tempfile::tempdir().unwrap();
    let inputs = dir.path().join("in.txt");
    std::fs::write(&inputs, "[[1,2,3,4,5,6,7,8],[1,1,1,1,1,1,1,1],[0,0,0,0,0,0,0,1],[2,2,2,2,2,2,2,2]]\n[1,1,1,1,1,1,1,1]\n")
        .unwrap();
    for stage in ["rise-typed", "rise-lowered", "dpia-fun", "dpia-imp", "code"] {
        let o = risec(&[
            &data("mv.rise"),
            "--strategy",
            &data("mv.elv"),
            "--emit",
            stage,
            "--run",
            "--inputs",
            inputs.to_str().unwrap(),
            "--nat",
            "n=4,m=8,s=2",
        ]);
        assert!(o.status.success(), "{stage}: {}", stderr(&o));
        assert_eq!(stdout(&o).trim(), "[36.0, 8.0, 1.0, 16.0]", "{stage}");
    }
}

#[test]
fn imperative_dpia_output_feeds_back_in() {
    let dir = tempfile::tempdir().unwrap();
    for (stage, file) in [("dpia-imp", "mv_imp.dpia"), ("dpia-fun", "mv_fun.dpia")] {
        let path = dir.path().join(file);
        let o = risec(&[
            &data("mv.rise"),
            "--strategy",
            &data("mv.elv"),
            "--emit",
            stage,
            "-o",
            path.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        let o = risec(&[path.to_str().unwrap(), "--from", stage, "--name", "mvOpt"]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert_eq!(
            stdout(&o),
            std::fs::read_to_string(data("mvOptKernel.cl")).unwrap()
        );
    }
}

#[test]
fn compilation_is_deterministic() {
    let args = [
        data("mv.rise"),
        "--strategy".into(),
        data("mv.elv"),
        "--emit".into(),
        "dpia-imp".into(),
    ];
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    assert_eq!(risec(&args).stdout, risec(&args).stdout);
}

#[test]
fn rule_list_and_traces() {
    let o = risec(&["--list-rules"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().any(|l| l.starts_with("insertToMem")));
    let o = risec(&[
        &data("mv.rise"),
        "--strategy",
        &data("mv.elv"),
        "--trace",
        "--trace-translation",
    ]);
    let err = stderr(&o);
    assert!(err.contains("rewrite splitJoinMap"), "{err}");
    assert!(err.contains("accT mapWorkGroup"), "{err}");
}

#[test]
fn plain_c_rejects_parallel_loops() {
    let o = risec(&[
        &data("mv.rise"),
        "--strategy",
        &data("mv.elv"),
        "--target",
        "c",
    ]);
    assert!(!o.status.success());
    assert!(
        stderr(&o).contains("UnsupportedForTarget"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn bad_arguments_fail_cleanly() {
    assert!(!risec(&[&data("mv.rise"), "--emit", "nonsense"])
        .status
        .success());
    let o = risec(&[&data("mv.rise"), "--emit", "rise", "--from", "dpia-imp"]);
    assert!(stderr(&o).contains("StageOrder"), "{}", stderr(&o));
    let o = risec(&["/no/such/file.rise"]);
    assert!(stderr(&o).contains("[Io]"), "{}", stderr(&o));
}
