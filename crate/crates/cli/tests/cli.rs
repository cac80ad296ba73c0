use std::io::Write as _;
use std::process::Command;

use hybrid_tableau::semantics::{eval_surface, parse_model};
use hybrid_tableau::syntax::parse;

const COUNTERFRAME: &str = "\
kind dproduct
worlds1 x1 x2
worlds2 y1 y2
r1 x1 x2
r2@x2 y1 y2
val p1 x2 y2
";

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("htab").chain(args.iter().copied());
    let code = htab::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn model_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn dec_axiom_proved_with_dec() {
    let (code, out, _) = run(&["prove", "--mode", "hdpl-dec", "<1>@a1<2>a2 -> @a1<2>a2"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("verdict: proved"));
}

#[test]
fn swap_refuted_in_hdpl_with_small_verified_model() {
    let formula = "<1><2>p1 <-> <2><1>p1";
    let (code, out, _) = run(&["prove", "--mode", "hdpl", formula]);
    assert_eq!(code, 1);
    let model_text: String = out.lines().skip_while(|l| !l.starts_with("kind")).map(|l| format!("{l}\n")).collect();
    let file = parse_model(&model_text).unwrap();
    assert!(file.model.as_dproduct().is_some());
    let w = file.designated.unwrap();
    assert!(!eval_surface(&file.model, w, &parse(formula).unwrap()));
    use hybrid_tableau::semantics::Kripke;
    assert!(file.model.width() <= 2 && file.model.height() <= 2);
}

#[test]
fn infinite_branch_is_unknown() {
    let (code, out, _) = run(&["prove", "--budget", "200", "~(<1>p1 & [1]<2>p2 & [2]<1>p3)"]);
    assert_eq!(code, 2);
    assert!(out.contains("verdict: unknown"));
    assert!(out.contains("rule applications: 200"));
}

#[test]
fn sequents_and_files() {
    assert_eq!(run(&["prove", "p1, p2 |- p2"]).0, 0);
    assert_eq!(run(&["prove", " |- p1"]).0, 1);
    let f = model_file("@i1 @a1 p1 & <1>i1 & <2>a1 -> <1><2>p1\n");
    assert_eq!(run(&["prove", "--file", f.path().to_str().unwrap()]).0, 0);
}

#[test]
fn usage_and_parse_errors_exit_3() {
    assert_eq!(run(&["prove", "p1 &"]).0, 3);
    assert_eq!(run(&["prove", "--mode", "k4", "p1"]).0, 3);
    assert_eq!(run(&["prove", "--budget", "0", "p1"]).0, 3);
    assert_eq!(run(&["prove"]).0, 3);
    assert_eq!(run(&["frobnicate"]).0, 3);
    assert_eq!(run(&["prove", "--file", "/nonexistent/formula.txt"]).0, 3);
    let (code, _, err) = run(&["check-model", "/nonexistent/model.txt", "p1", "--at", "x,y"]);
    assert_eq!(code, 3);
    assert!(err.contains("error"));
}

#[test]
fn check_model_on_the_swap_counterexample() {
    let f = model_file(COUNTERFRAME);
    let path = f.path().to_str().unwrap();
    assert_eq!(run(&["check-model", path, "<1><2>p1", "--at", "x1,y1"]), (0, "true\n".into(), String::new()));
    assert_eq!(run(&["check-model", path, "<2><1>p1", "--at", "x1,y1"]).0, 1);
    for at in ["x1,y1", "x1,y2", "x2,y1", "x2,y2"] {
        assert_eq!(run(&["check-model", path, "p1 | ~p1", "--at", at]).0, 0);
    }
    // No designated pair in the file and none given.
    assert_eq!(run(&["check-model", path, "p1"]).0, 3);
    assert_eq!(run(&["check-model", path, "p1", "--at", "x9,y1"]).0, 3);
    // Nominals the model does not interpret are an error, not a guess.
    assert_eq!(run(&["check-model", path, "i1", "--at", "x1,y1"]).0, 3);
}

#[test]
fn json_output_carries_model_and_trace() {
    let (code, out, _) = run(&["prove", "--mode", "hdpl", "--format", "json", "--emit", "all", "<1>@a1<2>a2 -> @a1<2>a2"]);
    assert_eq!(code, 1);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["verdict"], "refuted");
    assert_eq!(doc["mode"], "hdpl");
    assert_eq!(doc["model"]["kind"], "dproduct");
    assert!(!doc["trace"].as_array().unwrap().is_empty());
    let model = parse_model(&doc["model"].to_string()).unwrap();
    assert!(!eval_surface(&model.model, model.designated.unwrap(), &parse("<1>@a1<2>a2 -> @a1<2>a2").unwrap()));
}

#[test]
fn text_and_json_agree() {
    for mode in ["hpl", "hdpl", "hdpl-dec"] {
        let args = ["prove", "--mode", mode, "<1><2>p1 <-> <2><1>p1"];
        let (code_t, text, _) = run(&args);
        let (code_j, json, _) = run(&[&args[..], &["--format", "json"]].concat());
        assert_eq!(code_t, code_j);
        let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert!(text.starts_with(&format!("verdict: {}", doc["verdict"].as_str().unwrap())));
    }
}

#[test]
fn emit_trace_lists_every_step() {
    let (_, out, _) = run(&["prove", "--mode", "hdpl-dec", "--emit", "trace", "<1>@a1<2>a2 -> @a1<2>a2"]);
    assert!(!out.contains("verdict"));
    assert!(out.lines().any(|l| l.contains("Dec(")));
    assert!(out.lines().any(|l| l.ends_with("fresh i1")));
}

#[test]
fn prove_output_is_byte_identical_across_runs() {
    let args = ["prove", "--mode", "hdpl", "--emit", "all", "~(<1>p1 & [1]<2>p2 & [2]<1>p3)"];
    assert_eq!(run(&args), run(&args));
}

#[test]
fn fuzz_reports_clean_runs() {
    for mode in ["hpl", "hdpl"] {
        let (code, out, _) = run(&["fuzz", "--mode", mode, "--seed", "7", "--count", "100"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("100 cases"));
        assert!(out.contains("0 failures"));
    }
    let (code, out, _) = run(&["fuzz", "--count", "5", "--format", "json", "--oracle-bounds", "1,2"]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["cases"], 5);
    assert_eq!(run(&["fuzz", "--oracle-bounds", "0,2"]).0, 3);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_htab");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code().unwrap();
    assert_eq!(status(&["prove", "p1 -> p1"]), 0);
    assert_eq!(status(&["prove", "p1"]), 1);
    assert_eq!(status(&["prove", "--budget", "50", "~(<1>p1 & [1]<2>p2 & [2]<1>p3)"]), 2);
    assert_eq!(status(&["prove", "("]), 3);
    assert_eq!(status(&["--help"]), 0);
}
