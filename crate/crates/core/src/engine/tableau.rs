use serde::Serialize;

use super::branch::Branch;
use super::rules::{applicable_instances, conclusions, is_applicable, is_legal, Conclusion, RuleSet};
use super::saturation::is_saturated;
use super::types::{Budget, Mode, RuleId, RuleInstance, Shape, TraceRecord};
use super::EngineError;
use crate::syntax::{CoreFormula, Dim, Formula, NominalAllocator};

/// What a budgeted expansion ended with.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Outcome {
    AllClosed,
    /// Lowest-id open branch that is saturated.
    OpenSaturated(usize),
    BudgetExhausted(BudgetReport),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BudgetReport {
    pub rule_applications: usize,
    /// Fresh nominals allocated by diamond rules, per dimension.
    pub nominals_allocated: [usize; 2],
    pub open_branches: Vec<usize>,
}

impl BudgetReport {
    pub fn total_nominals(&self) -> usize {
        self.nominals_allocated[0] + self.nominals_allocated[1]
    }
}

#[derive(Clone, Debug)]
pub struct Tableau {
    rules: RuleSet,
    root: Shape,
    allocator: NominalAllocator,
    branches: Vec<Branch>,
    trace: Vec<TraceRecord>,
    applications: usize,
    root_nominals: [usize; 2],
}

impl Tableau {
    /// Root `@i0 @a0 ¬φ` with `i0`, `a0` the first indices absent from `φ`.
    pub fn init(phi: &Formula, rules: RuleSet) -> Self {
        let core = phi.desugar();
        let mut allocator = NominalAllocator::new(core.nominals_in_order());
        let i0 = allocator.fresh(Dim::One);
        let a0 = allocator.fresh(Dim::Two);
        let root = Shape::double(i0, a0, CoreFormula::not(core));
        let mut branch = Branch::new(0);
        branch.append(root.clone(), false, RuleId::Root, 0);
        Tableau {
            rules,
            root_nominals: [allocator.allocated(Dim::One), allocator.allocated(Dim::Two)],
            root,
            allocator,
            branches: vec![branch],
            trace: Vec::new(),
            applications: 0,
        }
    }

    pub fn mode(&self) -> Mode {
        self.rules.mode
    }

    pub fn rules(&self) -> RuleSet {
        self.rules
    }

    pub fn root(&self) -> &Shape {
        &self.root
    }

    pub fn branch(&self, id: usize) -> &Branch {
        &self.branches[id]
    }

    /// Every branch node, leaves and forked parents, by id.
    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Branch> + '_ {
        self.branches.iter().filter(|b| b.is_leaf())
    }

    pub fn open_leaves(&self) -> Vec<usize> {
        self.leaves().filter(|b| b.is_open()).map(|b| b.id()).collect()
    }

    pub fn trace(&self) -> &[TraceRecord] {
        &self.trace
    }

    pub fn rule_applications(&self) -> usize {
        self.applications
    }

    /// Nominals allocated by rules (the two root nominals excluded).
    pub fn nominals_allocated(&self) -> [usize; 2] {
        [
            self.allocator.allocated(Dim::One) - self.root_nominals[0],
            self.allocator.allocated(Dim::Two) - self.root_nominals[1],
        ]
    }

    fn report(&self) -> BudgetReport {
        BudgetReport {
            rule_applications: self.applications,
            nominals_allocated: self.nominals_allocated(),
            open_branches: self.open_leaves(),
        }
    }

    /// Applies one instance to an open leaf. Returns the leaves that carry
    /// the result: the branch itself, or the two children of a fork.
    pub fn apply_rule(&mut self, branch: usize, inst: &RuleInstance) -> Result<Vec<usize>, EngineError> {
        let reject = |reason: &str| EngineError::RejectedInstance {
            branch,
            rule: inst.rule,
            premises: inst.premises.clone(),
            reason: reason.to_string(),
        };
        let b = self.branches.get(branch).ok_or_else(|| reject("no such branch"))?;
        if !b.is_leaf() || !b.is_open() {
            return Err(reject("branch is not an open leaf"));
        }
        if !is_legal(b, self.rules, inst) {
            return Err(reject("not an applicable instance"));
        }

        self.applications += 1;
        let step = self.applications;
        let fresh = inst.fresh.map(|d| self.allocator.fresh(d));
        let conclusion = conclusions(&self.branches[branch], inst, fresh);
        let fresh_name = fresh.map(|n| n.to_string());

        let targets = match conclusion {
            Conclusion::Linear(added) => vec![(branch, added)],
            Conclusion::Fork(left, right) => {
                let (l, r) = (self.branches.len(), self.branches.len() + 1);
                let parent = &self.branches[branch];
                let (bl, br) = (parent.fork(l), parent.fork(r));
                self.branches.push(bl);
                self.branches.push(br);
                self.branches[branch].children = Some((l, r));
                vec![(l, left), (r, right)]
            }
        };
        let mut out = Vec::with_capacity(targets.len());
        for (id, added) in targets {
            let b = &mut self.branches[id];
            let mut printed = Vec::new();
            let mut flagged = false;
            for (shape, acc) in added {
                if !b.is_open() {
                    break;
                }
                let text = shape.to_string();
                if b.append(shape, acc, inst.rule, step).is_some() {
                    printed.push(text);
                    flagged |= acc;
                }
            }
            if inst.rule.is_diamond() {
                b.mark_diamond(inst.premises[0]);
            }
            self.trace.push(TraceRecord {
                step,
                branch: id,
                rule: inst.rule,
                premises: inst.premises.clone(),
                added: printed,
                accessibility: flagged,
                fresh: fresh_name.clone(),
            });
            out.push(id);
        }
        Ok(out)
    }

    /// Round-based expansion: each round collects the instances of every
    /// open leaf against its state at round start, then applies them all.
    pub fn expand(&mut self, budget: Budget) -> Result<Outcome, EngineError> {
        loop {
            let leaves = self.open_leaves();
            if leaves.is_empty() {
                return Ok(Outcome::AllClosed);
            }
            let mut round = Vec::with_capacity(leaves.len());
            for id in leaves {
                let insts = applicable_instances(&self.branches[id], self.rules);
                if insts.is_empty() {
                    let violations = is_saturated(&self.branches[id], self.rules.mode);
                    if violations.is_empty() {
                        return Ok(Outcome::OpenSaturated(id));
                    }
                    return Err(EngineError::InternalInconsistency(format!(
                        "branch {id} has no applicable rule but violates {:?}",
                        violations.iter().map(|v| v.condition).collect::<Vec<_>>()
                    )));
                }
                round.push((id, insts));
            }
            for (id, insts) in round {
                if let Some(report) = self.run_round(id, &insts, budget)? {
                    return Ok(Outcome::BudgetExhausted(report));
                }
            }
        }
    }

    /// Applies `insts` to `id` and, after a fork, to both children.
    fn run_round(&mut self, id: usize, insts: &[RuleInstance], budget: Budget) -> Result<Option<BudgetReport>, EngineError> {
        let mut stack = vec![(id, 0usize)];
        while let Some((bid, mut k)) = stack.pop() {
            while k < insts.len() {
                let inst = &insts[k];
                k += 1;
                let b = &self.branches[bid];
                if !b.is_open() {
                    break;
                }
                if !is_applicable(b, inst) {
                    continue;
                }
                if self.applications >= budget.max_rule_applications {
                    return Ok(Some(self.report()));
                }
                if let Some(d) = inst.fresh {
                    let used = self.nominals_allocated()[if d == Dim::One { 0 } else { 1 }];
                    if used >= budget.max_nominals_per_dim {
                        return Ok(Some(self.report()));
                    }
                }
                let result = self.apply_rule(bid, inst)?;
                if let [l, r] = result[..] {
                    stack.push((r, k));
                    stack.push((l, k));
                    break;
                }
            }
        }
        Ok(None)
    }
}
