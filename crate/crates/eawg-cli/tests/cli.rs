//! End-to-end tests of the `eawg` binary: output shapes, exit codes, and
//! determinism of every subcommand.

use std::io::Write;
use std::process::{Command, Output};

const INDEX6: &str = "rank=3; {1},{2},{3},{1,2},{1,3},{1,2,3}";
const LATTICE3: &str = "rank=3; {1},{2},{3},{1,2},{1,3},{2,3},{1,2,3}";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eawg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn assert_code(output: &Output, code: i32) {
    assert_eq!(
        output.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        stdout_of(output),
        String::from_utf8_lossy(&output.stderr)
    );
}

#[test]
fn analyze_summarizes_the_class() {
    let output = run(&["analyze", "--supp", INDEX6]);
    assert_code(&output, 0);
    let text = stdout_of(&output);
    assert!(text.contains("index: 6"));
    assert!(text.contains("esupp: {1,2,3}"));
    assert!(text.contains("delta(2,3) = 2"));
}

#[test]
fn analyze_rejects_bad_input() {
    assert_code(&run(&["analyze", "--supp", "rank=3; {1},{2}"]), 2);
    assert_code(&run(&["analyze", "--supp", "rank=3; {1},{2},{3},"]), 2);
    assert_code(&run(&["analyze"]), 2);
}

#[test]
fn decide_reports_both_verdicts() {
    let has = stdout_of(&run(&["decide", "--supp", INDEX6]));
    assert!(has.contains("verdict: HasPresentation"));
    assert!(has.contains("n0: 0"));

    let lacks = stdout_of(&run(&["decide", "--supp", LATTICE3]));
    assert!(lacks.contains("verdict: LacksPresentation"));
    assert!(lacks.contains("n0: 1"));
    assert!(lacks.contains("witness: z{1,2,3}"));
}

#[test]
fn decide_json_has_the_stable_field_names() {
    let output = run(&["decide", "--supp", LATTICE3, "--json"]);
    assert_code(&output, 0);
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&output)).unwrap();
    assert_eq!(report["rank"], 3);
    assert_eq!(report["index"], 7);
    assert_eq!(report["esuppSize"], 1);
    assert_eq!(report["n0"], 1);
    assert_eq!(report["verdict"], "LacksPresentation");
    assert_eq!(
        report["kernelBasis"][0]["eps"][0],
        serde_json::json!([1, 2, 3])
    );
    assert!(report["witnesses"].is_object());
    assert!(report["corollaryNotes"].is_array());
}

#[test]
fn make_example_pipes_into_decide() {
    let family = run(&["make-example", "--rank", "4", "--index", "9"]);
    assert_code(&family, 0);
    let text = stdout_of(&family);
    let verdict = stdout_of(&run(&["decide", "--supp", text.trim()]));
    assert!(verdict.contains("verdict: LacksPresentation"));
}

#[test]
fn make_example_json_round_trips_through_supp_file() {
    let family = run(&["make-example", "--rank", "4", "--index", "12", "--json"]);
    assert_code(&family, 0);
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(stdout_of(&family).as_bytes()).unwrap();
    let path = file.path().to_str().unwrap();
    let verdict = stdout_of(&run(&["decide", "--supp-file", path]));
    assert!(verdict.contains("verdict: LacksPresentation"));
    assert!(verdict.contains("index: 12"));
}

#[test]
fn make_example_rejects_out_of_range_index() {
    assert_code(&run(&["make-example", "--rank", "3", "--index", "9"]), 2);
}

#[test]
fn calc_folds_identity_and_translation() {
    let identity = stdout_of(&run(&[
        "calc",
        "--supp",
        LATTICE3,
        "r[+1;0,0,0] r[+1;0,0,0]",
    ]));
    assert!(identity.contains("weyl: w^0 * t[0,0,0]"));

    let translation = stdout_of(&run(&[
        "calc",
        "--supp",
        LATTICE3,
        "r[+1;1,0,0]",
        "r[+1;0,0,0]",
    ]));
    assert!(translation.contains("weyl: w^0 * t[1,0,0]"));
}

#[test]
fn calc_commutator_lands_in_the_center() {
    let word = "r[+1;0,0,0] r[+1;0,1,0] r[+1;0,0,0] r[+1;0,0,1] \
                r[+1;0,1,0] r[+1;0,0,0] r[+1;0,0,1] r[+1;0,0,0]";
    let output = run(&["calc", "--supp", INDEX6, "--hat", "--matrix", word]);
    assert_code(&output, 0);
    let text = stdout_of(&output);
    assert!(text.contains("weyl: w^0 * t[0,0,0] * c{2,3}^2"));
    assert!(text.contains("hat: w^0 * t[0,0,0] * z{2,3}^1"));
    assert!(text.contains("psi check: ok"));
    assert!(text.contains("matrix check: ok"));
}

#[test]
fn calc_accepts_inverse_suffix() {
    let output = run(&["calc", "--supp", LATTICE3, "r[+1;1,0,0]^-1 r[+1;1,0,0]"]);
    assert_code(&output, 0);
    assert!(stdout_of(&output).contains("weyl: w^0 * t[0,0,0]"));
}

#[test]
fn calc_rejects_bad_words() {
    assert_code(&run(&["calc", "--supp", LATTICE3, "bogus"]), 2);
    assert_code(&run(&["calc", "--supp", LATTICE3, "r[+1;1,0]"]), 2);
    assert_code(&run(&["calc", "--supp", LATTICE3, "r[+2;1,0,0]"]), 2);
    // Root outside the root system: {2,3} is absent from the index-6 class.
    assert_code(&run(&["calc", "--supp", INDEX6, "r[+1;0,1,1]"]), 2);
}

#[test]
fn verify_passes_and_is_deterministic() {
    let args = ["verify", "--rank", "2", "--samples", "60", "--seed", "7"];
    let first = run(&args);
    assert_code(&first, 0);
    let text = stdout_of(&first);
    assert!(text.contains("suite weyl-matrix"));
    assert!(text.contains("suite hat-relations"));
    assert!(text.contains("suite kernel"));
    assert!(text.contains("suite conjugation"));
    assert!(text.contains("all suites passed"));
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn verify_handles_rank_one_and_rejects_rank_seven() {
    let degenerate = run(&["verify", "--rank", "1", "--samples", "40"]);
    assert_code(&degenerate, 0);
    assert_code(&run(&["verify", "--rank", "7"]), 2);
}

#[test]
fn verify_accepts_an_explicit_class() {
    let output = run(&["verify", "--rank", "3", "--samples", "40", "--supp", INDEX6]);
    assert_code(&output, 0);
    assert!(stdout_of(&output).contains("all suites passed"));
}

#[test]
fn enumerate_rank3_csv_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r3.csv");
    let output = run(&["enumerate", "--rank", "3", "--out", path.to_str().unwrap()]);
    assert_code(&output, 0);
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        "index,n0,count\n3,0,1\n4,0,4\n5,0,6\n6,0,4\n7,1,1\n"
    );
    assert!(stdout_of(&output).contains("16 classes, 1 lacking"));
}

#[test]
fn enumerate_rank3_json_mirrors_the_result() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r3.json");
    let output = run(&[
        "enumerate",
        "--rank",
        "3",
        "--dedup",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_code(&output, 0);
    let body = std::fs::read_to_string(&path).unwrap();
    let value: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(value["rank"], 3);
    assert_eq!(value["totalClasses"], 16);
    assert_eq!(value["dedup"]["totalClasses"], 8);
}

#[test]
fn enumerate_gates_large_sweeps() {
    assert_code(
        &run(&["enumerate", "--rank", "5", "--out", "/tmp/never.csv"]),
        4,
    );
    assert_code(
        &run(&[
            "enumerate",
            "--rank",
            "6",
            "--allow-large",
            "--out",
            "/tmp/never.csv",
        ]),
        4,
    );
}

#[test]
fn enumerate_is_worker_count_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let bytes_for = |workers: &str, name: &str| {
        let path = dir.path().join(name);
        let output = run(&[
            "enumerate",
            "--rank",
            "4",
            "--dedup",
            "--workers",
            workers,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_code(&output, 0);
        std::fs::read(path).unwrap()
    };
    assert_eq!(bytes_for("1", "w1.csv"), bytes_for("2", "w2.csv"));
}

#[test]
fn enumerate_rejects_unknown_format() {
    let output = run(&[
        "enumerate",
        "--rank",
        "3",
        "--format",
        "xml",
        "--out",
        "/tmp/x",
    ]);
    assert_code(&output, 2);
}
