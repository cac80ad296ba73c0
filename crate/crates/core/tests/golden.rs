//! Rule traces pinned as JSON lines under `docs/golden`. Set `BLESS=1` to
//! rewrite them after an intended change to rule order or numbering.

use std::path::PathBuf;

use hybrid_tableau::engine::{prove_with, Budget, Mode, Options, RuleId, TraceRecord, Verdict};
use hybrid_tableau::syntax::parse;

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/golden").join(name)
}

fn render(records: &[TraceRecord]) -> String {
    records.iter().map(|r| serde_json::to_string(r).unwrap() + "\n").collect()
}

fn check(name: &str, records: &[TraceRecord]) {
    let path = golden_path(name);
    let actual = render(records);
    if std::env::var_os("BLESS").is_some() {
        std::fs::write(&path, &actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let parsed: Vec<TraceRecord> = expected.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(parsed, records, "{name} drifted; rerun with BLESS=1 if intended");
    assert_eq!(expected, actual);
}

#[test]
fn dec_axiom_proof_trace() {
    let phi = parse("<1>@a1<2>a2 -> @a1<2>a2").unwrap();
    let attempt = prove_with(&phi, &Options::new(Mode::HdplDec, Budget::default())).unwrap();
    let Verdict::Proved { trace } = &attempt.verdict else { panic!("not proved") };
    assert!(trace.iter().any(|r| r.rule == RuleId::Dec && r.accessibility));
    check("dec-axiom.jsonl", trace);
}

#[test]
fn infinite_branch_prefix_with_derived_rules() {
    let phi = parse("~(<1>p1 & [1]<2>p2 & [2]<1>p3)").unwrap();
    let opts = Options { mode: Mode::Hpl, budget: Budget::applications(18), derived_rules: true };
    let attempt = prove_with(&phi, &opts).unwrap();
    assert!(attempt.verdict.is_unknown());
    let trace = attempt.tableau.trace();
    assert_eq!(trace.len(), 18);
    // The loop allocates one nominal per dimension every four steps.
    let fresh: Vec<&str> = trace.iter().filter_map(|r| r.fresh.as_deref()).collect();
    assert_eq!(fresh, ["i1", "a1", "i2", "a2", "i3", "a3", "i4", "a4"]);
    check("divergent-prefix.jsonl", trace);
}
