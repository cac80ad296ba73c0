//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use hybrid_tableau::audit::audit_attempt;
use hybrid_tableau::differential::{run_fuzz, FailureKind, FuzzConfig};
use hybrid_tableau::engine::{prove_with, Attempt, Budget, Mode, Options, Verdict};
use hybrid_tableau::semantics::{
    enumerate_models, eval, eval_surface, find_countermodel_bruteforce, is_decreasing, Bounds, FrameKind, Kripke,
    KripkeDProduct, Model, WorldPair,
};
use hybrid_tableau::syntax::{parse, random_formula, Atom, CoreFormula, Dim, Formula, Nominal, Vocabulary};

const DEC_AXIOM: &str = "<1>@a1<2>a2 -> @a1<2>a2";
const SWAP: &str = "<1><2>p1 <-> <2><1>p1";
const DIVERGENT: &str = "~(<1>p1 & [1]<2>p2 & [2]<1>p3)";

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn attempt(s: &str, mode: Mode, budget: Budget) -> Attempt {
    prove_with(&parse(s).unwrap(), &Options::new(mode, budget)).expect("engine error")
}

fn falsifies(a: &Attempt, s: &str) -> bool {
    match &a.verdict {
        Verdict::Refuted { model, .. } => !eval_surface(&model.model, model.designated, &parse(s).unwrap()),
        _ => false,
    }
}

fn within(start: Instant, limit: Duration) -> bool {
    start.elapsed() < limit
}

fn criterion_1(kept: &mut Vec<Attempt>) -> Outcome {
    let start = Instant::now();
    let a = attempt(DEC_AXIOM, Mode::HdplDec, Budget::applications(200));
    let steps = a.tableau.rule_applications();
    let closed = a.tableau.leaves().all(|b| !b.is_open());
    let pass = a.verdict.is_proved() && closed && within(start, Duration::from_secs(1));
    let out = outcome(pass, format!("{} in {steps} rule applications, {:?}", a.verdict.name(), start.elapsed()));
    kept.push(a);
    out
}

/// The swap counterexample frame with `a1 = y1`, `a2 = y2`.
fn axiom_counterframe() -> Model {
    let mut m = KripkeDProduct::blank(2, 2);
    m.r1.insert(0, 1);
    m.r2[1].insert(0, 1);
    m.valuation.set_prop(1, WorldPair::new(1, 1));
    m.valuation.set_nominal(Nominal::second(1), 0);
    m.valuation.set_nominal(Nominal::second(2), 1);
    Model::DProduct(m)
}

fn criterion_2(kept: &mut Vec<Attempt>) -> Outcome {
    let a = attempt(DEC_AXIOM, Mode::Hdpl, Budget::default());
    let oracle = !eval_surface(&axiom_counterframe(), WorldPair::new(0, 0), &parse(DEC_AXIOM).unwrap());
    let out = match &a.verdict {
        Verdict::Refuted { model, .. } => {
            let d = model.model.as_dproduct().unwrap();
            let small = d.worlds1.len() <= 3 && d.worlds2.len() <= 3;
            let pass = small && !is_decreasing(d) && falsifies(&a, DEC_AXIOM) && oracle;
            outcome(pass, format!("{}x{} d-product, decreasing={}, oracle frame falsifies={oracle}", d.worlds1.len(), d.worlds2.len(), is_decreasing(d)))
        }
        v => outcome(false, format!("verdict {}", v.name())),
    };
    kept.push(a);
    out
}

fn criterion_3(kept: &mut Vec<Attempt>) -> Outcome {
    let start = Instant::now();
    let hpl = attempt(SWAP, Mode::Hpl, Budget::applications(1000));
    let hdpl = attempt(SWAP, Mode::Hdpl, Budget::default());
    let size_ok = match &hdpl.verdict {
        Verdict::Refuted { model, .. } => model.model.width() <= 2 && model.model.height() <= 2,
        _ => false,
    };
    let f = parse(SWAP).unwrap();
    let d = find_countermodel_bruteforce(&f, Bounds::new(2, 2), FrameKind::DProduct).is_some();
    let p = find_countermodel_bruteforce(&f, Bounds::new(2, 2), FrameKind::Product).is_some();
    let pass = hpl.verdict.is_proved() && falsifies(&hdpl, SWAP) && size_ok && d && !p && within(start, Duration::from_secs(10));
    let out = outcome(
        pass,
        format!("hpl {}, hdpl {} (<=2x2: {size_ok}), brute force: dproduct {d}, product {p}, {:?}", hpl.verdict.name(), hdpl.verdict.name(), start.elapsed()),
    );
    kept.extend([hpl, hdpl]);
    out
}

fn criterion_4(kept: &mut Vec<Attempt>) -> Outcome {
    let formulas = ["@i1 @a1 p1 & <1>i1 & <2>a1 -> <1><2>p1", "@i1 a1 <-> a1", "@a1 i1 <-> i1"];
    let mut names = Vec::new();
    let mut pass = true;
    for s in formulas {
        let a = attempt(s, Mode::Hpl, Budget::applications(500));
        pass &= a.verdict.is_proved();
        names.push(format!("{s}: {}", a.verdict.name()));
        kept.push(a);
    }
    outcome(pass, names.join("; "))
}

fn criterion_5(kept: &mut Vec<Attempt>) -> Outcome {
    let start = Instant::now();
    let hpl = attempt(DIVERGENT, Mode::Hpl, Budget::applications(200));
    let hdpl = attempt(DIVERGENT, Mode::Hdpl, Budget::default());
    let nominals = match &hpl.verdict {
        Verdict::Unknown(r) => r.total_nominals(),
        _ => 0,
    };
    let saturated = match &hdpl.verdict {
        Verdict::Refuted { branch, .. } => {
            hybrid_tableau::engine::is_saturated(hdpl.tableau.branch(*branch), Mode::Hdpl).is_empty()
        }
        _ => false,
    };
    let pass = hpl.verdict.is_unknown() && nominals >= 10 && falsifies(&hdpl, DIVERGENT) && saturated && within(start, Duration::from_secs(5));
    let out = outcome(pass, format!("hpl {} with {nominals} fresh nominals; hdpl {} (saturated {saturated}); {:?}", hpl.verdict.name(), hdpl.verdict.name(), start.elapsed()));
    kept.extend([hpl, hdpl]);
    out
}

/// Fuzz results feed both the differential criterion and the invariant audit.
fn criteria_6_and_7(kept: &[Attempt]) -> (Outcome, Outcome) {
    let start = Instant::now();
    let mut line6 = Vec::new();
    let mut differential = 0;
    let mut audit = 0;
    let mut first_problem = None;
    for mode in [Mode::Hpl, Mode::Hdpl] {
        let cfg = FuzzConfig {
            seed: 2024,
            count: 500,
            max_size: 8,
            vocab: Vocabulary::new(2, 2, 2),
            mode,
            budget: Budget::new(2000, 500),
            bounds: Bounds::new(2, 2),
            derived_rules: false,
            audit: true,
        };
        let r = run_fuzz(&cfg);
        for f in &r.failures {
            if f.kind == FailureKind::Audit {
                audit += 1;
            } else {
                differential += 1;
            }
            first_problem.get_or_insert_with(|| format!("{:?} on {}: {}", f.kind, f.formula, f.detail));
        }
        line6.push(format!("{mode}: {} proved, {} refuted, {} unknown ({:.1}%)", r.proved, r.refuted, r.unknown, 100.0 * r.unknown_rate()));
    }
    let elapsed = start.elapsed();
    let mut detail6 = format!("{}; {differential} failures; {elapsed:?}", line6.join(", "));
    if let Some(p) = &first_problem {
        detail6.push_str(&format!("; first: {p}"));
    }
    let c6 = outcome(differential == 0 && elapsed < Duration::from_secs(300), detail6);

    // Dec-mode coverage for the decreasing-extraction check.
    let dec = run_fuzz(&FuzzConfig { seed: 2024, count: 200, mode: Mode::HdplDec, audit: true, ..FuzzConfig::default() });
    audit += dec.failures.len();
    let mut findings = 0;
    for a in kept {
        let r = audit_attempt(a);
        findings += r.findings.len();
        if let Some(f) = r.findings.first() {
            first_problem.get_or_insert_with(|| format!("{} on branch {}: {}", f.property, f.branch, f.detail));
        }
    }
    let detail7 = format!(
        "{} named tableaux, 1200 fuzzed tableaux; {} findings",
        kept.len(),
        findings + audit
    );
    (c6, outcome(findings + audit == 0, detail7))
}

/// Satisfaction over explicit horizontal and vertical successor relations on
/// world pairs, built from the frame independently of the coordinate-wise clauses.
struct PairGraph {
    pairs: Vec<WorldPair>,
    rh: BTreeSet<(WorldPair, WorldPair)>,
    rv: BTreeSet<(WorldPair, WorldPair)>,
}

impl PairGraph {
    fn new(m: &Model) -> Self {
        let pairs = m.pairs();
        let mut rh = BTreeSet::new();
        let mut rv = BTreeSet::new();
        for &w in &pairs {
            for &v in &pairs {
                if w.y == v.y && m.r1().contains(w.x, v.x) {
                    rh.insert((w, v));
                }
                if w.x == v.x && m.r2_at(w.x).contains(w.y, v.y) {
                    rv.insert((w, v));
                }
            }
        }
        PairGraph { pairs, rh, rv }
    }

    fn holds(&self, m: &Model, w: WorldPair, f: &CoreFormula) -> bool {
        match f {
            CoreFormula::Prop(p) => m.valuation().holds(*p, w),
            CoreFormula::Nom(n) => {
                let d = m.valuation().nominal(*n).unwrap_or(0);
                if n.dim == Dim::One { w.x == d } else { w.y == d }
            }
            CoreFormula::Not(g) => !self.holds(m, w, g),
            CoreFormula::And(l, r) => self.holds(m, w, l) && self.holds(m, w, r),
            CoreFormula::Dia(d, g) => {
                let rel = if *d == Dim::One { &self.rh } else { &self.rv };
                self.pairs.iter().any(|&v| rel.contains(&(w, v)) && self.holds(m, v, g))
            }
            CoreFormula::At(n, g) => {
                let d = m.valuation().nominal(*n).unwrap_or(0);
                let v = if n.dim == Dim::One { WorldPair::new(d, w.y) } else { WorldPair::new(w.x, d) };
                self.holds(m, v, g)
            }
        }
    }
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let vocab = Vocabulary::new(1, 0, 0);
    let mut formulas: Vec<Formula> = ["p1 | <1>p1", "p1 -> [2]p1", "[1]<2>p1", "[2](p1 -> [1]p1)", "<1><2>p1 <-> <2><1>p1"]
        .iter()
        .map(|s| parse(s).unwrap())
        .collect();
    formulas.extend((0..60).map(|k| random_formula(k, 10, &vocab)));
    let cores: Vec<CoreFormula> = formulas.iter().map(Formula::desugar).collect();
    let atoms: BTreeSet<Atom> = [Atom::Prop(1)].into_iter().collect();
    let (mut models, mut checks, mut derived_bad, mut clause_bad) = (0usize, 0usize, 0usize, 0usize);
    for kind in [FrameKind::Product, FrameKind::DProduct] {
        for m in enumerate_models(Bounds::new(2, 2), &atoms, kind) {
            models += 1;
            let graph = PairGraph::new(&m);
            for w in m.pairs() {
                for (f, c) in formulas.iter().zip(&cores) {
                    checks += 1;
                    let core = eval(&m, w, c);
                    derived_bad += usize::from(eval_surface(&m, w, f) != core);
                    clause_bad += usize::from(graph.holds(&m, w, c) != core);
                }
            }
        }
    }
    let pass = derived_bad == 0 && clause_bad == 0 && within(start, Duration::from_secs(60));
    outcome(
        pass,
        format!("{models} models, {checks} checks: {derived_bad} derived-clause and {clause_bad} pair-relation disagreements; {:?}", start.elapsed()),
    )
}

fn main() {
    let mut kept = Vec::new();
    let mut results = vec![
        ("1 decreasing axiom proved with Dec", criterion_1(&mut kept)),
        ("2 decreasing axiom refuted without Dec", criterion_2(&mut kept)),
        ("3 diamond swap", criterion_3(&mut kept)),
        ("4 motivating inference and nominal reductions", criterion_4(&mut kept)),
        ("5 infinite branch", criterion_5(&mut kept)),
    ];
    let (c6, c7) = criteria_6_and_7(&kept);
    results.push(("6 differential fuzz", c6));
    results.push(("7 invariant audit", c7));
    results.push(("8 semantics self-check", criterion_8()));

    let mut failed = 0;
    for (name, o) in &results {
        println!("criterion {name}: {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
