//! Differential testing of the prover against exhaustive small-model search.

use serde::Serialize;

use crate::audit::audit_attempt;
use crate::engine::{prove_with, Budget, Mode, Options, Verdict};
use crate::semantics::{eval_surface, find_countermodel_bruteforce, find_decreasing_countermodel, is_decreasing, Bounds};
use crate::syntax::{random_formula, Formula, Vocabulary};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FuzzConfig {
    pub seed: u64,
    pub count: usize,
    pub max_size: usize,
    pub vocab: Vocabulary,
    pub mode: Mode,
    pub budget: Budget,
    pub bounds: Bounds,
    pub derived_rules: bool,
    /// Also run the invariant audit on every final tableau.
    pub audit: bool,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            seed: 0,
            count: 100,
            max_size: 8,
            vocab: Vocabulary::new(2, 2, 2),
            mode: Mode::Hpl,
            budget: Budget::new(2000, 500),
            bounds: Bounds::default(),
            derived_rules: false,
            audit: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureKind {
    /// Proved, yet a countermodel exists within bounds.
    Soundness,
    /// Refuted, yet the model does not falsify the formula.
    Refutation,
    /// The engine reported an internal error.
    Engine,
    Audit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FuzzFailure {
    pub case: usize,
    pub formula: String,
    pub kind: FailureKind,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FuzzReport {
    pub mode: Mode,
    pub seed: u64,
    pub cases: usize,
    pub proved: usize,
    pub refuted: usize,
    pub unknown: usize,
    pub failures: Vec<FuzzFailure>,
}

impl FuzzReport {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn unknown_rate(&self) -> f64 {
        if self.cases == 0 {
            0.0
        } else {
            self.unknown as f64 / self.cases as f64
        }
    }
}

/// Seed of the `k`-th generated formula.
pub fn case_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k as u64)
}

pub fn case_formula(cfg: &FuzzConfig, k: usize) -> Formula {
    random_formula(case_seed(cfg.seed, k), cfg.max_size, &cfg.vocab)
}

/// Outcome of one formula: the verdict name and any failures.
pub fn check_formula(phi: &Formula, cfg: &FuzzConfig) -> (&'static str, Vec<(FailureKind, String)>) {
    let opts = Options { mode: cfg.mode, budget: cfg.budget, derived_rules: cfg.derived_rules };
    let mut failures = Vec::new();
    let attempt = match prove_with(phi, &opts) {
        Ok(a) => a,
        Err(e) => return ("error", vec![(FailureKind::Engine, e.to_string())]),
    };
    match &attempt.verdict {
        Verdict::Proved { .. } => {
            let counter = match cfg.mode {
                Mode::Hpl => find_countermodel_bruteforce(phi, cfg.bounds, crate::semantics::FrameKind::Product),
                Mode::Hdpl => find_countermodel_bruteforce(phi, cfg.bounds, crate::semantics::FrameKind::DProduct),
                Mode::HdplDec => find_decreasing_countermodel(phi, cfg.bounds),
            };
            if let Some((m, w)) = counter {
                let text = crate::semantics::render_model_text(&m, Some(w));
                failures.push((FailureKind::Soundness, format!("countermodel within bounds:\n{text}")));
            }
        }
        Verdict::Refuted { model, .. } => {
            if eval_surface(&model.model, model.designated, phi) {
                failures.push((FailureKind::Refutation, "emitted model satisfies the formula".into()));
            }
            if cfg.mode == Mode::HdplDec && !model.model.as_dproduct().is_some_and(is_decreasing) {
                failures.push((FailureKind::Refutation, "emitted model is not decreasing".into()));
            }
        }
        Verdict::Unknown(_) => {}
    }
    if cfg.audit {
        for f in audit_attempt(&attempt).findings {
            failures.push((FailureKind::Audit, format!("{} on branch {}: {}", f.property, f.branch, f.detail)));
        }
    }
    (attempt.verdict.name(), failures)
}

pub fn run_fuzz(cfg: &FuzzConfig) -> FuzzReport {
    let mut report =
        FuzzReport { mode: cfg.mode, seed: cfg.seed, cases: 0, proved: 0, refuted: 0, unknown: 0, failures: Vec::new() };
    for k in 0..cfg.count {
        let phi = case_formula(cfg, k);
        let (verdict, failures) = check_formula(&phi, cfg);
        report.cases += 1;
        match verdict {
            "proved" => report.proved += 1,
            "refuted" => report.refuted += 1,
            "unknown" => report.unknown += 1,
            _ => {}
        }
        let formula = phi.to_string();
        report.failures.extend(failures.into_iter().map(|(kind, detail)| FuzzFailure {
            case: k,
            formula: formula.clone(),
            kind,
            detail,
        }));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    #[test]
    fn contradiction_negation_passes_the_oracle() {
        let cfg = FuzzConfig { audit: true, ..FuzzConfig::default() };
        let (v, failures) = check_formula(&parse("~(p1 & ~p1)").unwrap(), &cfg);
        assert_eq!(v, "proved");
        assert!(failures.is_empty());
    }

    #[test]
    fn case_formulas_depend_only_on_seed_and_index() {
        let cfg = FuzzConfig::default();
        assert_eq!(case_formula(&cfg, 3), case_formula(&cfg, 3));
        assert_ne!(case_seed(1, 0), case_seed(2, 0));
    }

    #[test]
    fn small_runs_are_clean_in_every_mode() {
        for mode in [Mode::Hpl, Mode::Hdpl, Mode::HdplDec] {
            let cfg = FuzzConfig { seed: 7, count: 60, mode, audit: true, ..FuzzConfig::default() };
            let report = run_fuzz(&cfg);
            assert!(report.is_clean(), "{mode}: {:#?}", report.failures);
            assert_eq!(report.cases, 60);
        }
    }
}
