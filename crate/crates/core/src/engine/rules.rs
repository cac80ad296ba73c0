use super::branch::Branch;
use super::types::{Mode, RuleId, RuleInstance, Shape};
use crate::syntax::{CoreFormula, Dim, Nominal};

/// What a rule adds: one list, or two alternatives for a fork. Each entry
/// carries its accessibility flag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Conclusion {
    Linear(Vec<(Shape, bool)>),
    Fork(Vec<(Shape, bool)>, Vec<(Shape, bool)>),
}

/// Rule-set switches that are not part of the mode.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RuleSet {
    pub mode: Mode,
    /// Fused box, disjunction and implication steps.
    pub derived: bool,
}

/// Body is `k` or `¬k` for a nominal `k`; returns `k`.
fn literal_nominal(body: &CoreFormula) -> Option<Nominal> {
    match body {
        CoreFormula::Nom(n) => Some(*n),
        CoreFormula::Not(inner) => inner.as_nominal(),
        _ => None,
    }
}

fn link_target(body: &CoreFormula, dim: Dim) -> Option<Nominal> {
    match body {
        CoreFormula::Dia(d, inner) if *d == dim => inner.as_nominal().filter(|n| n.dim == dim),
        _ => None,
    }
}

fn double_parts(s: &Shape) -> (Nominal, Nominal, &CoreFormula) {
    match s {
        Shape::Double { first, second, body } => (*first, *second, body),
        Shape::Single { .. } => panic!("expected a double-prefixed formula, got {s}"),
    }
}

fn single_parts(s: &Shape) -> (Nominal, &CoreFormula) {
    match s {
        Shape::Single { prefix, body } => (*prefix, body),
        Shape::Double { .. } => panic!("expected a single-prefixed formula, got {s}"),
    }
}

/// Every rule instance with `idx` as its major premise, applicable or not.
fn instances_at(b: &Branch, rules: RuleSet, idx: usize, out: &mut Vec<RuleInstance>) {
    use CoreFormula as F;
    let f = b.get(idx);
    let mode = rules.mode;
    match &f.shape {
        Shape::Double { first: i, second: a, body } => {
            let (i, a) = (*i, *a);
            match body {
                F::Not(inner) => match &**inner {
                    F::Not(_) => out.push(RuleInstance::new(RuleId::NegNeg, vec![idx])),
                    F::And(l, r) => {
                        let rule = match (&**l, &**r) {
                            (F::Not(_), F::Not(_)) if rules.derived => RuleId::DerivedOr,
                            (_, F::Not(_)) if rules.derived => RuleId::DerivedImplies,
                            _ => RuleId::NegAnd,
                        };
                        out.push(RuleInstance::new(rule, vec![idx]));
                    }
                    F::Dia(Dim::One, g) => {
                        let rule = if rules.derived && matches!(**g, F::Not(_)) { RuleId::DerivedBox1 } else { RuleId::NegDia1 };
                        out.extend(b.links1_from(i).map(|l| RuleInstance::new(rule, vec![idx, l])));
                    }
                    F::Dia(Dim::Two, g) => {
                        let rule = if rules.derived && matches!(**g, F::Not(_)) {
                            RuleId::DerivedBox2
                        } else if mode.is_dependent() {
                            RuleId::NegDia2d
                        } else {
                            RuleId::NegDia2
                        };
                        if mode.is_dependent() {
                            out.extend(b.dlinks(i, a).map(|l| RuleInstance::new(rule, vec![idx, l])));
                        } else {
                            out.extend(b.links2_from(a).map(|l| RuleInstance::new(rule, vec![idx, l])));
                        }
                    }
                    F::At(n, _) => {
                        let rule = if n.dim == Dim::One { RuleId::NegAt1 } else { RuleId::NegAt2 };
                        out.push(RuleInstance::new(rule, vec![idx]));
                    }
                    F::Nom(n) => {
                        let rule = if n.dim == Dim::One { RuleId::Red1 } else { RuleId::Red2 };
                        out.push(RuleInstance::new(rule, vec![idx]));
                    }
                    F::Prop(_) => {}
                },
                F::And(..) => out.push(RuleInstance::new(RuleId::And, vec![idx])),
                F::Dia(Dim::One, _) => out.push(RuleInstance::new(RuleId::Dia1, vec![idx])),
                F::Dia(Dim::Two, _) => match mode {
                    Mode::Hpl => out.push(RuleInstance::new(RuleId::Dia2, vec![idx])),
                    _ if !f.accessibility => out.push(RuleInstance::new(RuleId::Dia2d, vec![idx])),
                    _ => {}
                },
                F::At(n, _) => {
                    let rule = if n.dim == Dim::One { RuleId::At1 } else { RuleId::At2 };
                    out.push(RuleInstance::new(rule, vec![idx]));
                }
                F::Nom(n) => {
                    let rule = if n.dim == Dim::One { RuleId::Red1 } else { RuleId::Red2 };
                    out.push(RuleInstance::new(rule, vec![idx]));
                }
                F::Prop(_) => {}
            }
            if !(mode.is_dependent() && f.accessibility) {
                out.extend(b.ids(i).map(|id| RuleInstance::new(RuleId::Id1, vec![idx, id])));
                out.extend(b.ids(a).map(|id| RuleInstance::new(RuleId::Id2, vec![idx, id])));
            }
            if mode == Mode::HdplDec && f.accessibility && link_target(body, Dim::Two).is_some() {
                out.extend(b.links1_to(i).map(|l| RuleInstance::new(RuleId::Dec, vec![l, idx])));
            }
        }
        Shape::Single { prefix, body } => {
            let s = *prefix;
            let second = s.dim == Dim::Two;
            if let CoreFormula::Not(inner) = body {
                if inner.as_nominal().is_some_and(|j| j.dim == s.dim) {
                    out.push(RuleInstance::new(if second { RuleId::Neg2 } else { RuleId::Neg1 }, vec![idx]));
                }
            }
            if literal_nominal(body).is_some_and(|k| k.dim == s.dim) {
                let rule = if second { RuleId::IdP2 } else { RuleId::IdP1 };
                out.extend(b.ids(s).map(|id| RuleInstance::new(rule, vec![idx, id])));
            }
            if mode == Mode::HdplDec {
                if let Some(j) = link_target(body, Dim::One) {
                    out.extend(b.ids(j).map(|id| RuleInstance::new(RuleId::Bridge, vec![idx, id])));
                }
            }
        }
    }
}

/// The formulas `inst` adds. `fresh` must be given for diamond rules.
pub fn conclusions(b: &Branch, inst: &RuleInstance, fresh: Option<Nominal>) -> Conclusion {
    use CoreFormula as F;
    let p = |k: usize| &b.get(inst.premises[k]).shape;
    let plain = |v: Vec<Shape>| Conclusion::Linear(v.into_iter().map(|s| (s, false)).collect());
    let neg = |f: &F| F::not(f.clone());
    let unwrap_not = |f: &F| -> F {
        match f {
            F::Not(g) => (**g).clone(),
            _ => panic!("expected a negation, got {f}"),
        }
    };
    let id_target = |k: usize| single_parts(p(k)).1.as_nominal().expect("identity premise");
    let link1_target = |k: usize| link_target(single_parts(p(k)).1, Dim::One).expect("first-dimension link");
    let fresh = || fresh.expect("diamond rule without a fresh nominal");

    match inst.rule {
        RuleId::Root => panic!("the root is not a rule"),
        RuleId::NegNeg => {
            let (i, a, body) = double_parts(p(0));
            plain(vec![Shape::double(i, a, unwrap_not(&unwrap_not(body)))])
        }
        RuleId::And => {
            let (i, a, body) = double_parts(p(0));
            let F::And(l, r) = body else { panic!("And premise") };
            plain(vec![Shape::double(i, a, (**l).clone()), Shape::double(i, a, (**r).clone())])
        }
        RuleId::NegAnd | RuleId::DerivedOr | RuleId::DerivedImplies => {
            let (i, a, body) = double_parts(p(0));
            let F::And(l, r) = unwrap_not(body) else { panic!("NegAnd premise") };
            // A negated negation is followed by its double-negation step, so
            // the unfused form stays on the branch.
            let side = |g: &F| -> Vec<(Shape, bool)> {
                let mut v = vec![(Shape::double(i, a, neg(g)), false)];
                if inst.rule != RuleId::NegAnd {
                    if let F::Not(inner) = g {
                        v.push((Shape::double(i, a, (**inner).clone()), false));
                    }
                }
                v
            };
            Conclusion::Fork(side(&l), side(&r))
        }
        RuleId::Dia1 => {
            let (i, a, body) = double_parts(p(0));
            let F::Dia(_, g) = body else { panic!("Dia1 premise") };
            let j = fresh();
            plain(vec![Shape::single(i, F::dia(Dim::One, F::Nom(j))), Shape::double(j, a, (**g).clone())])
        }
        RuleId::Dia2 => {
            let (i, a, body) = double_parts(p(0));
            let F::Dia(_, g) = body else { panic!("Dia2 premise") };
            let c = fresh();
            plain(vec![Shape::single(a, F::dia(Dim::Two, F::Nom(c))), Shape::double(i, c, (**g).clone())])
        }
        RuleId::Dia2d => {
            let (i, a, body) = double_parts(p(0));
            let F::Dia(_, g) = body else { panic!("Dia2d premise") };
            let c = fresh();
            Conclusion::Linear(vec![
                (Shape::double(i, a, F::dia(Dim::Two, F::Nom(c))), true),
                (Shape::double(i, c, (**g).clone()), false),
            ])
        }
        RuleId::NegDia1 | RuleId::DerivedBox1 => {
            let (_, a, body) = double_parts(p(0));
            let F::Dia(_, g) = unwrap_not(body) else { panic!("NegDia1 premise") };
            let j = link1_target(1);
            let mut v = vec![Shape::double(j, a, neg(&g))];
            if inst.rule == RuleId::DerivedBox1 {
                v.push(Shape::double(j, a, unwrap_not(&g)));
            }
            plain(v)
        }
        RuleId::NegDia2 | RuleId::NegDia2d | RuleId::DerivedBox2 => {
            let (i, _, body) = double_parts(p(0));
            let F::Dia(_, g) = unwrap_not(body) else { panic!("NegDia2 premise") };
            let link = b.get(inst.premises[1]).shape.body();
            let c = link_target(link, Dim::Two).expect("second-dimension link");
            let mut v = vec![Shape::double(i, c, neg(&g))];
            if inst.rule == RuleId::DerivedBox2 {
                v.push(Shape::double(i, c, unwrap_not(&g)));
            }
            plain(v)
        }
        RuleId::At1 | RuleId::At2 | RuleId::NegAt1 | RuleId::NegAt2 => {
            let (i, a, body) = double_parts(p(0));
            let negated = matches!(inst.rule, RuleId::NegAt1 | RuleId::NegAt2);
            let at = if negated { unwrap_not(body) } else { body.clone() };
            let F::At(n, g) = at else { panic!("At premise") };
            let g = if negated { neg(&g) } else { (*g).clone() };
            plain(vec![if n.dim == Dim::One { Shape::double(n, a, g) } else { Shape::double(i, n, g) }])
        }
        RuleId::Red1 => {
            let (i, _, body) = double_parts(p(0));
            plain(vec![Shape::single(i, body.clone())])
        }
        RuleId::Red2 => {
            let (_, a, body) = double_parts(p(0));
            plain(vec![Shape::single(a, body.clone())])
        }
        RuleId::Neg1 | RuleId::Neg2 => {
            let (_, body) = single_parts(p(0));
            let j = unwrap_not(body).as_nominal().expect("negated nominal");
            plain(vec![Shape::single(j, F::Nom(j))])
        }
        RuleId::Id1 => {
            let (_, a, body) = double_parts(p(0));
            plain(vec![Shape::double(id_target(1), a, body.clone())])
        }
        RuleId::Id2 => {
            let (i, _, body) = double_parts(p(0));
            plain(vec![Shape::double(i, id_target(1), body.clone())])
        }
        RuleId::IdP1 | RuleId::IdP2 => {
            let (_, body) = single_parts(p(0));
            plain(vec![Shape::single(id_target(1), body.clone())])
        }
        RuleId::Dec => {
            let (i, _) = single_parts(p(0));
            let (_, a, body) = double_parts(p(1));
            Conclusion::Linear(vec![(Shape::double(i, a, body.clone()), true)])
        }
        RuleId::Bridge => {
            let (i, _) = single_parts(p(0));
            plain(vec![Shape::single(i, F::dia(Dim::One, F::Nom(id_target(1))))])
        }
    }
}

/// Whether `inst` would still change `b`.
pub fn is_applicable(b: &Branch, inst: &RuleInstance) -> bool {
    if !b.is_open() {
        return false;
    }
    if inst.rule.is_diamond() {
        return !b.is_diamond_applied(inst.premises[0]);
    }
    match conclusions(b, inst, None) {
        Conclusion::Linear(v) => v.iter().any(|(s, _)| !b.contains(s)),
        // Either alternative already on the branch discharges the fork.
        Conclusion::Fork(l, r) => !b.contains(&l[0].0) && !b.contains(&r[0].0),
    }
}

/// Whether `inst` is an instance of the rule set on `b` that would change it.
pub fn is_legal(b: &Branch, rules: RuleSet, inst: &RuleInstance) -> bool {
    if inst.premises.iter().any(|&p| p >= b.len()) {
        return false;
    }
    let mut candidates = Vec::new();
    for &p in &inst.premises {
        instances_at(b, rules, p, &mut candidates);
    }
    candidates.contains(inst) && is_applicable(b, inst)
}

/// All instances of the rule set that would change `b`, in formula order.
pub fn applicable_instances(b: &Branch, rules: RuleSet) -> Vec<RuleInstance> {
    if !b.is_open() {
        return Vec::new();
    }
    let mut all = Vec::new();
    for idx in 0..b.len() {
        instances_at(b, rules, idx, &mut all);
    }
    all.retain(|inst| is_applicable(b, inst));
    all
}
