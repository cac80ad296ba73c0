//! Structural invariants of finished tableaux and, for refutations, the
//! properties the countermodel construction relies on.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::Serialize;

use crate::engine::{is_saturated, Attempt, Branch, Mode, RuleId, Shape, Status, Tableau, Verdict};
use crate::extract::{is_quasi_subformula, nominal_classes, right_nominals, urfather, verify_extraction, ExtractedModel};
use crate::semantics::{eval, is_decreasing};
use crate::syntax::{CoreFormula, Dim, Nominal};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub property: &'static str,
    pub branch: usize,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub findings: Vec<Finding>,
    pub leaves_checked: usize,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }

    fn push(&mut self, property: &'static str, branch: usize, detail: impl Into<String>) {
        self.findings.push(Finding { property, branch, detail: detail.into() });
    }
}

fn rule_allowed(rule: RuleId, mode: Mode) -> bool {
    match rule {
        RuleId::Dia2 | RuleId::NegDia2 => mode == Mode::Hpl,
        RuleId::Dia2d | RuleId::NegDia2d => mode.is_dependent(),
        RuleId::Dec | RuleId::Bridge => mode == Mode::HdplDec,
        _ => true,
    }
}

/// Invariants every leaf must satisfy whatever the outcome.
pub fn audit_tableau(t: &Tableau) -> AuditReport {
    let mut r = AuditReport::default();
    let mode = t.mode();
    let root_body = t.root().body();
    let root_subs = root_body.subformulas();
    let root_noms: BTreeSet<Nominal> = t.root().nominals_in_order().into_iter().collect();

    for rec in t.trace() {
        if !rule_allowed(rec.rule, mode) {
            r.push("mode-rules", rec.branch, format!("{} used in {mode}", rec.rule));
        }
    }
    let mut fresh_seen = HashSet::new();
    let mut fresh_steps = HashSet::new();
    for rec in t.trace() {
        if let Some(n) = &rec.fresh {
            // A fork never allocates, so one record per step carries the nominal.
            if fresh_steps.insert(rec.step) && !fresh_seen.insert(n.clone()) {
                r.push("once-per-diamond", rec.branch, format!("{n} allocated twice"));
            }
        }
    }

    for b in t.leaves() {
        r.leaves_checked += 1;
        let id = b.id();
        let mut seen = HashSet::new();
        for (idx, f) in b.formulas().enumerate() {
            if !seen.insert(&f.shape) {
                r.push("dedup", id, format!("{} repeated at {idx}", f.shape));
            }
            match &f.shape {
                Shape::Double { body, .. } => {
                    if !is_quasi_subformula(body, &root_subs) && !(mode.is_dependent() && f.accessibility) {
                        r.push("quasi-subformula", id, f.shape.to_string());
                    }
                }
                Shape::Single { body, .. } => {
                    if let Some(s) = body.as_nominal() {
                        if !root_noms.contains(&s) {
                            r.push("right-nominals-in-root", id, f.shape.to_string());
                        }
                    }
                }
            }
            if f.accessibility {
                let ok = mode.is_dependent()
                    && matches!(&f.shape, Shape::Double { body: CoreFormula::Dia(Dim::Two, g), .. } if g.as_nominal().is_some());
                if !ok {
                    r.push("accessibility-shape", id, f.shape.to_string());
                }
            }
        }
        if let Status::Closed(x, y) = b.status() {
            let last = b.get(y).step;
            if y + 1 != b.len() || x >= y || b.formulas().any(|f| f.step > last) {
                r.push("closure-freeze", id, format!("closed at ({x}, {y}) with {} formulas", b.len()));
            }
        }
        for idx in b.applied_diamond() {
            if !matches!(b.get(idx).shape.body(), CoreFormula::Dia(..)) {
                r.push("once-per-diamond", id, format!("applied index {idx} is not a diamond"));
            }
        }
        let ancestry = ancestry(t, b);
        let mut uses: HashMap<usize, usize> = HashMap::new();
        for rec in t.trace().iter().filter(|rec| rec.rule.is_diamond() && ancestry.contains(&rec.branch)) {
            *uses.entry(rec.premises[0]).or_default() += 1;
        }
        for (idx, n) in uses {
            if n > 1 {
                r.push("once-per-diamond", id, format!("premise {idx} expanded {n} times"));
            }
        }
    }
    r
}

fn ancestry(t: &Tableau, b: &Branch) -> HashSet<usize> {
    let mut out = HashSet::new();
    let mut cur = Some(b.id());
    while let Some(id) = cur {
        out.insert(id);
        cur = t.branch(id).parent();
    }
    out
}

/// Properties of the saturated branch behind a refutation.
pub fn audit_refutation(t: &Tableau, branch: usize, m: &ExtractedModel) -> AuditReport {
    let mut r = AuditReport::default();
    let mode = t.mode();
    let b = t.branch(branch);
    for v in is_saturated(b, mode) {
        r.push("saturation", branch, format!("condition {} at {:?}", v.condition, v.witnesses));
    }
    let classes = match nominal_classes(b) {
        Ok(c) => c,
        Err(e) => {
            r.push("equivalence", branch, e.to_string());
            return r;
        }
    };
    let u = |s: Nominal| urfather(b, &classes, s);
    let has = |s: Shape| b.contains(&s);
    for s in right_nominals(b).iter().flatten() {
        if !has(Shape::single(u(*s), CoreFormula::Nom(*s))) {
            r.push("urfather-i", branch, format!("@{} {s} missing", u(*s)));
        }
    }
    let root_subs = t.root().body().subformulas();
    for f in b.formulas() {
        match &f.shape {
            Shape::Single { prefix, body } => {
                if let Some(t) = body.as_nominal() {
                    if u(*prefix) != u(t) {
                        r.push("urfather-ii", branch, f.shape.to_string());
                    }
                }
            }
            Shape::Double { first, second, body } => {
                if f.accessibility || !is_quasi_subformula(body, &root_subs) {
                    continue;
                }
                if !has(Shape::double(u(*first), u(*second), body.clone())) {
                    r.push("urfather-iii", branch, f.shape.to_string());
                }
            }
        }
    }
    for n in b.nominals() {
        if u(u(n)) != u(n) || m.urfathers.get(&n) != Some(&u(n)) {
            r.push("urfather-idempotent", branch, n.to_string());
        }
    }
    if mode == Mode::HdplDec && !m.model.as_dproduct().is_some_and(is_decreasing) {
        r.push("decreasing", branch, "extracted model is not decreasing");
    }
    for e in verify_extraction(b, m, mode).failures {
        r.push("model-existence", branch, format!("{} fails at {:?}", e.formula, e.world));
    }
    if !eval(&m.model, m.designated, t.root().body()) {
        r.push("root-falsified", branch, "designated pair satisfies the formula");
    }
    r
}

/// Everything above, as applicable to the attempt's verdict.
pub fn audit_attempt(a: &Attempt) -> AuditReport {
    let mut r = audit_tableau(&a.tableau);
    match &a.verdict {
        Verdict::Proved { .. } => {
            for b in a.tableau.leaves().filter(|b| b.is_open()) {
                r.push("proved-closed", b.id(), "open leaf under a proof");
            }
        }
        Verdict::Refuted { model, branch } => {
            r.findings.extend(audit_refutation(&a.tableau, *branch, model).findings);
        }
        Verdict::Unknown(_) => {}
    }
    r
}
