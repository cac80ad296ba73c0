//! Tableau calculi for the product and dependent-product logics: branches,
//! rules, closure, saturation, the fair expansion loop and `prove`.

mod branch;
mod rules;
mod saturation;
mod tableau;
mod types;

pub use branch::Branch;
pub use rules::{applicable_instances, conclusions, is_applicable, is_legal, Conclusion, RuleSet};
pub use saturation::{is_saturated, Violation};
pub use tableau::{BudgetReport, Outcome, Tableau};
pub use types::{Budget, BranchFormula, Mode, RuleId, RuleInstance, Shape, Status, TraceRecord};

use crate::extract::{extract_model, verify_extraction, ExtractedModel};
use crate::semantics::{eval, is_decreasing};
use crate::syntax::Formula;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("rejected {rule} on branch {branch} with premises {premises:?}: {reason}")]
    RejectedInstance { branch: usize, rule: RuleId, premises: Vec<usize>, reason: String },
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Every leaf closed; the full rule trace.
    Proved { trace: Vec<TraceRecord> },
    /// A verified countermodel from the given open saturated branch.
    Refuted { model: ExtractedModel, branch: usize },
    Unknown(BudgetReport),
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Proved { .. } => "proved",
            Verdict::Refuted { .. } => "refuted",
            Verdict::Unknown(_) => "unknown",
        }
    }

    pub fn is_proved(&self) -> bool {
        matches!(self, Verdict::Proved { .. })
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown(_))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Options {
    pub mode: Mode,
    pub budget: Budget,
    pub derived_rules: bool,
}

impl Options {
    pub fn new(mode: Mode, budget: Budget) -> Self {
        Options { mode, budget, derived_rules: false }
    }

    fn rules(&self) -> RuleSet {
        RuleSet { mode: self.mode, derived: self.derived_rules }
    }
}

/// A finished run: the final tableau and what it established.
#[derive(Clone, Debug)]
pub struct Attempt {
    pub tableau: Tableau,
    pub verdict: Verdict,
}

pub fn prove(phi: &Formula, mode: Mode, budget: Budget) -> Result<Verdict, EngineError> {
    prove_with(phi, &Options::new(mode, budget)).map(|a| a.verdict)
}

pub fn prove_with(phi: &Formula, opts: &Options) -> Result<Attempt, EngineError> {
    let mut tableau = Tableau::init(phi, opts.rules());
    let verdict = match tableau.expand(opts.budget)? {
        Outcome::AllClosed => Verdict::Proved { trace: tableau.trace().to_vec() },
        Outcome::BudgetExhausted(report) => Verdict::Unknown(report),
        Outcome::OpenSaturated(id) => {
            let branch = tableau.branch(id);
            let model = extract_model(branch, opts.mode)
                .map_err(|e| EngineError::InternalInconsistency(format!("extraction failed on branch {id}: {e}")))?;
            check_refutation(&tableau, id, &model)?;
            Verdict::Refuted { model, branch: id }
        }
    };
    Ok(Attempt { tableau, verdict })
}

fn check_refutation(t: &Tableau, id: usize, m: &ExtractedModel) -> Result<(), EngineError> {
    let root_body = t.root().body();
    if !eval(&m.model, m.designated, root_body) {
        let report = verify_extraction(t.branch(id), m, t.mode());
        return Err(EngineError::InternalInconsistency(format!(
            "countermodel from branch {id} does not refute the formula; unsatisfied: {:?}",
            report.failures.iter().map(|f| &f.formula).collect::<Vec<_>>()
        )));
    }
    if t.mode() == Mode::HdplDec && !m.model.as_dproduct().is_some_and(is_decreasing) {
        return Err(EngineError::InternalInconsistency(format!("countermodel from branch {id} is not decreasing")));
    }
    Ok(())
}

/// `⋀Γ → ⋁Δ`. An empty side becomes `pK ∨ ¬pK` (or its negation) with `pK`
/// the lowest proposition absent from both sides.
pub fn sequent_formula(gamma: &[Formula], delta: &[Formula]) -> Formula {
    let used: std::collections::BTreeSet<u32> = gamma
        .iter()
        .chain(delta)
        .flat_map(|f| f.atoms())
        .filter_map(|a| match a {
            crate::syntax::Atom::Prop(n) => Some(n),
            crate::syntax::Atom::Nom(_) => None,
        })
        .collect();
    let k = (0..).find(|n| !used.contains(n)).unwrap();
    let top = || Formula::or(Formula::prop(k), Formula::not(Formula::prop(k)));
    let lhs = gamma.iter().cloned().reduce(Formula::and).unwrap_or_else(top);
    let rhs = delta.iter().cloned().reduce(Formula::or).unwrap_or_else(|| Formula::not(top()));
    Formula::implies(lhs, rhs)
}

pub fn prove_sequent(gamma: &[Formula], delta: &[Formula], mode: Mode, budget: Budget) -> Result<Verdict, EngineError> {
    prove(&sequent_formula(gamma, delta), mode, budget)
}
