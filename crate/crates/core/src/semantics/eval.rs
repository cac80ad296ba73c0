use thiserror::Error;

use super::model::{Kripke, WorldPair};
use crate::syntax::{Atom, CoreFormula, Dim, Formula, Nominal};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("nominal {0} has no denotation in the model")]
    UnknownNominal(Nominal),
    #[error("world pair ({}, {}) is outside the model", .0.x, .0.y)]
    WorldOutOfRange(WorldPair),
}

/// How nominals missing from the valuation are treated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NominalPolicy {
    /// Missing nominals denote world 0 of their dimension.
    #[default]
    Lenient,
    /// Missing nominals are an error.
    Strict,
}

fn denotation<M: Kripke + ?Sized>(m: &M, n: Nominal, policy: NominalPolicy) -> Result<usize, SemanticsError> {
    match (m.valuation().nominal(n), policy) {
        (Some(w), _) => Ok(w),
        (None, NominalPolicy::Lenient) => Ok(0),
        (None, NominalPolicy::Strict) => Err(SemanticsError::UnknownNominal(n)),
    }
}

/// `M, w ⊨ f`, with missing nominals denoting the first world.
pub fn eval<M: Kripke + ?Sized>(m: &M, w: WorldPair, f: &CoreFormula) -> bool {
    match eval_with(m, w, f, NominalPolicy::Lenient) {
        Ok(v) => v,
        Err(e) => panic!("lenient evaluation failed: {e}"),
    }
}

pub fn eval_strict<M: Kripke + ?Sized>(m: &M, w: WorldPair, f: &CoreFormula) -> Result<bool, SemanticsError> {
    eval_with(m, w, f, NominalPolicy::Strict)
}

pub fn eval_with<M: Kripke + ?Sized>(
    m: &M,
    w: WorldPair,
    f: &CoreFormula,
    policy: NominalPolicy,
) -> Result<bool, SemanticsError> {
    if !m.contains(w) {
        return Err(SemanticsError::WorldOutOfRange(w));
    }
    sat(m, w, f, policy)
}

fn sat<M: Kripke + ?Sized>(m: &M, w: WorldPair, f: &CoreFormula, policy: NominalPolicy) -> Result<bool, SemanticsError> {
    Ok(match f {
        CoreFormula::Prop(p) => m.valuation().holds(*p, w),
        CoreFormula::Nom(n) => {
            let d = denotation(m, *n, policy)?;
            match n.dim {
                Dim::One => w.x == d,
                Dim::Two => w.y == d,
            }
        }
        CoreFormula::Not(g) => !sat(m, w, g, policy)?,
        CoreFormula::And(l, r) => sat(m, w, l, policy)? && sat(m, w, r, policy)?,
        CoreFormula::Dia(Dim::One, g) => {
            for &x in m.r1().successors(w.x) {
                if sat(m, WorldPair::new(x, w.y), g, policy)? {
                    return Ok(true);
                }
            }
            false
        }
        CoreFormula::Dia(Dim::Two, g) => {
            for &y in m.r2_at(w.x).successors(w.y) {
                if sat(m, WorldPair::new(w.x, y), g, policy)? {
                    return Ok(true);
                }
            }
            false
        }
        CoreFormula::At(n, g) => {
            let d = denotation(m, *n, policy)?;
            let target = match n.dim {
                Dim::One => WorldPair::new(d, w.y),
                Dim::Two => WorldPair::new(w.x, d),
            };
            sat(m, target, g, policy)?
        }
    })
}

/// Evaluates a surface formula using the derived clauses for `|`, `->`,
/// `<->` and the boxes, without desugaring.
pub fn eval_surface<M: Kripke + ?Sized>(m: &M, w: WorldPair, f: &Formula) -> bool {
    match f {
        Formula::Atom(Atom::Prop(p)) => m.valuation().holds(*p, w),
        Formula::Atom(Atom::Nom(n)) => {
            let d = m.valuation().nominal(*n).unwrap_or(0);
            match n.dim {
                Dim::One => w.x == d,
                Dim::Two => w.y == d,
            }
        }
        Formula::Not(g) => !eval_surface(m, w, g),
        Formula::And(l, r) => eval_surface(m, w, l) && eval_surface(m, w, r),
        Formula::Or(l, r) => eval_surface(m, w, l) || eval_surface(m, w, r),
        Formula::Implies(l, r) => !eval_surface(m, w, l) || eval_surface(m, w, r),
        Formula::Iff(l, r) => eval_surface(m, w, l) == eval_surface(m, w, r),
        Formula::Dia(Dim::One, g) => {
            m.r1().successors(w.x).iter().any(|&x| eval_surface(m, WorldPair::new(x, w.y), g))
        }
        Formula::Dia(Dim::Two, g) => {
            m.r2_at(w.x).successors(w.y).iter().any(|&y| eval_surface(m, WorldPair::new(w.x, y), g))
        }
        Formula::Box(Dim::One, g) => {
            m.r1().successors(w.x).iter().all(|&x| eval_surface(m, WorldPair::new(x, w.y), g))
        }
        Formula::Box(Dim::Two, g) => {
            m.r2_at(w.x).successors(w.y).iter().all(|&y| eval_surface(m, WorldPair::new(w.x, y), g))
        }
        Formula::At(n, g) => {
            let d = m.valuation().nominal(*n).unwrap_or(0);
            let target = match n.dim {
                Dim::One => WorldPair::new(d, w.y),
                Dim::Two => WorldPair::new(w.x, d),
            };
            eval_surface(m, target, g)
        }
    }
}

/// `M ⊨ f`: true at every world pair.
pub fn is_valid_on<M: Kripke + ?Sized>(m: &M, f: &CoreFormula) -> bool {
    m.pairs().into_iter().all(|w| eval(m, w, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::model::{KripkeDProduct, KripkeProduct};
    use crate::syntax::parse;

    /// The two-by-two dependent product in which `<1><2>p` and `<2><1>p`
    /// come apart at `(x0, y0)`.
    pub(crate) fn swap_counterexample() -> KripkeDProduct {
        let mut m = KripkeDProduct::blank(2, 2);
        m.r1.insert(0, 1);
        m.r2[1].insert(0, 1);
        m.valuation.set_prop(1, WorldPair::new(1, 1));
        m
    }

    fn core(s: &str) -> CoreFormula {
        parse(s).unwrap().desugar()
    }

    #[test]
    fn swap_counterexample_separates_diamond_orders() {
        let m = swap_counterexample();
        let w = WorldPair::new(0, 0);
        assert!(eval(&m, w, &core("<1><2>p1")));
        assert!(!eval(&m, w, &core("<2><1>p1")));
        assert!(!is_valid_on(&m, &core("<1><2>p1 -> <2><1>p1")));
        assert!(!crate::semantics::is_decreasing(&m));
    }

    #[test]
    fn contradiction_never_holds() {
        let m = swap_counterexample();
        for w in m.pairs() {
            assert!(!eval(&m, w, &core("p1 & ~p1")));
        }
    }

    #[test]
    fn single_world_model() {
        let mut m = KripkeProduct::blank(1, 1);
        m.valuation.set_prop(1, WorldPair::new(0, 0));
        assert!(is_valid_on(&m, &core("p1")));
    }

    #[test]
    fn reduction_axioms_hold_on_a_product_model() {
        let mut m = KripkeProduct::blank(2, 3);
        m.valuation.set_nominal(Nominal::first(1), 1);
        m.valuation.set_nominal(Nominal::second(1), 2);
        assert!(is_valid_on(&m, &core("@i1 a1 <-> a1")));
        assert!(is_valid_on(&m, &core("@a1 i1 <-> i1")));
    }

    #[test]
    fn strict_mode_rejects_unknown_nominals() {
        let m = KripkeProduct::blank(1, 1);
        let w = WorldPair::new(0, 0);
        assert_eq!(eval_strict(&m, w, &core("i3")), Err(SemanticsError::UnknownNominal(Nominal::first(3))));
        assert!(eval(&m, w, &core("i3")));
        assert!(eval_strict(&m, WorldPair::new(1, 0), &core("p1")).is_err());
    }
}
