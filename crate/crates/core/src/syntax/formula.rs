use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// One of the two dimensions of a product frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Dim {
    One,
    Two,
}

impl Dim {
    pub fn number(self) -> u8 {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
        }
    }

    pub fn other(self) -> Dim {
        match self {
            Dim::One => Dim::Two,
            Dim::Two => Dim::One,
        }
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// A nominal of either dimension. First-dimension nominals print as `i<n>`,
/// second-dimension nominals as `a<n>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Nominal {
    pub dim: Dim,
    pub index: u32,
}

impl Nominal {
    pub fn first(index: u32) -> Self {
        Nominal { dim: Dim::One, index }
    }

    pub fn second(index: u32) -> Self {
        Nominal { dim: Dim::Two, index }
    }
}

impl fmt::Display for Nominal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.dim {
            Dim::One => write!(f, "i{}", self.index),
            Dim::Two => write!(f, "a{}", self.index),
        }
    }
}

/// Atomic symbols. The three namespaces are told apart by their surface prefix
/// (`p`, `i`, `a`) and never overlap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Prop(u32),
    Nom(Nominal),
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Prop(n) => write!(f, "p{n}"),
            Atom::Nom(n) => n.fmt(f),
        }
    }
}

/// Surface formulas, including the derived connectives.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Dia(Dim, Box<Formula>),
    Box(Dim, Box<Formula>),
    At(Nominal, Box<Formula>),
}

// Terse constructors, mostly for tests and formula builders.
impl Formula {
    pub fn prop(n: u32) -> Self {
        Formula::Atom(Atom::Prop(n))
    }

    pub fn nom(n: Nominal) -> Self {
        Formula::Atom(Atom::Nom(n))
    }

    pub fn nom1(n: u32) -> Self {
        Formula::nom(Nominal::first(n))
    }

    pub fn nom2(n: u32) -> Self {
        Formula::nom(Nominal::second(n))
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Self {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn iff(l: Formula, r: Formula) -> Self {
        Formula::Iff(Box::new(l), Box::new(r))
    }

    pub fn dia(dim: Dim, f: Formula) -> Self {
        Formula::Dia(dim, Box::new(f))
    }

    pub fn boxed(dim: Dim, f: Formula) -> Self {
        Formula::Box(dim, Box::new(f))
    }

    pub fn at(n: Nominal, f: Formula) -> Self {
        Formula::At(n, Box::new(f))
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            Formula::Not(f) | Formula::Dia(_, f) | Formula::Box(_, f) | Formula::At(_, f) => {
                1 + f.size()
            }
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Iff(l, r) => {
                1 + l.size() + r.size()
            }
        }
    }

    /// Every atom occurring in the formula, including the nominals of `@` prefixes.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::Atom(a) => {
                out.insert(*a);
            }
            Formula::Not(f) | Formula::Dia(_, f) | Formula::Box(_, f) => f.collect_atoms(out),
            Formula::At(n, f) => {
                out.insert(Atom::Nom(*n));
                f.collect_atoms(out);
            }
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Iff(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    /// Rewrites the derived connectives into the primitive core.
    ///
    /// `Iff` first becomes a conjunction of two implications; `Or`, `Implies` and
    /// `Box` then follow their usual definitions in terms of `Not`, `And` and `Dia`.
    pub fn desugar(&self) -> CoreFormula {
        match self {
            Formula::Atom(Atom::Prop(p)) => CoreFormula::Prop(*p),
            Formula::Atom(Atom::Nom(n)) => CoreFormula::Nom(*n),
            Formula::Not(f) => CoreFormula::not(f.desugar()),
            Formula::And(l, r) => CoreFormula::and(l.desugar(), r.desugar()),
            Formula::Or(l, r) => CoreFormula::not(CoreFormula::and(
                CoreFormula::not(l.desugar()),
                CoreFormula::not(r.desugar()),
            )),
            Formula::Implies(l, r) => implies_core(l.desugar(), r.desugar()),
            Formula::Iff(l, r) => {
                let (l, r) = (l.desugar(), r.desugar());
                CoreFormula::and(implies_core(l.clone(), r.clone()), implies_core(r, l))
            }
            Formula::Dia(d, f) => CoreFormula::dia(*d, f.desugar()),
            Formula::Box(d, f) => {
                CoreFormula::not(CoreFormula::dia(*d, CoreFormula::not(f.desugar())))
            }
            Formula::At(n, f) => CoreFormula::at(*n, f.desugar()),
        }
    }
}

fn implies_core(l: CoreFormula, r: CoreFormula) -> CoreFormula {
    CoreFormula::not(CoreFormula::and(l, CoreFormula::not(r)))
}

/// The primitive language: atoms, negation, conjunction, diamonds and `@`.
///
/// Children are reference counted so that tableau branches can copy bodies freely.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CoreFormula {
    Prop(u32),
    Nom(Nominal),
    Not(Arc<CoreFormula>),
    And(Arc<CoreFormula>, Arc<CoreFormula>),
    Dia(Dim, Arc<CoreFormula>),
    At(Nominal, Arc<CoreFormula>),
}

impl CoreFormula {
    pub fn not(f: CoreFormula) -> Self {
        CoreFormula::Not(Arc::new(f))
    }

    pub fn and(l: CoreFormula, r: CoreFormula) -> Self {
        CoreFormula::And(Arc::new(l), Arc::new(r))
    }

    pub fn dia(dim: Dim, f: CoreFormula) -> Self {
        CoreFormula::Dia(dim, Arc::new(f))
    }

    pub fn at(n: Nominal, f: CoreFormula) -> Self {
        CoreFormula::At(n, Arc::new(f))
    }

    /// The nominal if this formula is a bare nominal.
    pub fn as_nominal(&self) -> Option<Nominal> {
        match self {
            CoreFormula::Nom(n) => Some(*n),
            _ => None,
        }
    }

    /// The negated formula if this is a negation.
    pub fn negated(&self) -> Option<&CoreFormula> {
        match self {
            CoreFormula::Not(f) => Some(f),
            _ => None,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            CoreFormula::Prop(_) | CoreFormula::Nom(_) => 1,
            CoreFormula::Not(f) | CoreFormula::Dia(_, f) | CoreFormula::At(_, f) => 1 + f.size(),
            CoreFormula::And(l, r) => 1 + l.size() + r.size(),
        }
    }

    /// Reflexive-transitive closure of the immediate-subterm relation.
    pub fn subformulas(&self) -> BTreeSet<CoreFormula> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if !out.insert(f.clone()) {
                continue;
            }
            match f {
                CoreFormula::Prop(_) | CoreFormula::Nom(_) => {}
                CoreFormula::Not(g) | CoreFormula::Dia(_, g) | CoreFormula::At(_, g) => stack.push(g),
                CoreFormula::And(l, r) => {
                    stack.push(l);
                    stack.push(r);
                }
            }
        }
        out
    }

    /// Nominals in left-to-right order of first occurrence, `@` prefixes included.
    pub fn nominals_in_order(&self) -> Vec<Nominal> {
        let mut out = Vec::new();
        self.visit_nominals(&mut |n| {
            if !out.contains(&n) {
                out.push(n);
            }
        });
        out
    }

    pub(crate) fn visit_nominals(&self, visit: &mut impl FnMut(Nominal)) {
        match self {
            CoreFormula::Prop(_) => {}
            CoreFormula::Nom(n) => visit(*n),
            CoreFormula::Not(f) | CoreFormula::Dia(_, f) => f.visit_nominals(visit),
            CoreFormula::At(n, f) => {
                visit(*n);
                f.visit_nominals(visit);
            }
            CoreFormula::And(l, r) => {
                l.visit_nominals(visit);
                r.visit_nominals(visit);
            }
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |a| {
            out.insert(a);
        });
        out
    }

    fn visit_atoms(&self, visit: &mut impl FnMut(Atom)) {
        match self {
            CoreFormula::Prop(p) => visit(Atom::Prop(*p)),
            CoreFormula::Nom(n) => visit(Atom::Nom(*n)),
            CoreFormula::Not(f) | CoreFormula::Dia(_, f) => f.visit_atoms(visit),
            CoreFormula::At(n, f) => {
                visit(Atom::Nom(*n));
                f.visit_atoms(visit);
            }
            CoreFormula::And(l, r) => {
                l.visit_atoms(visit);
                r.visit_atoms(visit);
            }
        }
    }

    /// Reads the core formula back as a surface formula (no derived connectives).
    pub fn to_surface(&self) -> Formula {
        match self {
            CoreFormula::Prop(p) => Formula::prop(*p),
            CoreFormula::Nom(n) => Formula::nom(*n),
            CoreFormula::Not(f) => Formula::not(f.to_surface()),
            CoreFormula::And(l, r) => Formula::and(l.to_surface(), r.to_surface()),
            CoreFormula::Dia(d, f) => Formula::dia(*d, f.to_surface()),
            CoreFormula::At(n, f) => Formula::at(*n, f.to_surface()),
        }
    }
}

impl fmt::Display for CoreFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_surface().fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32) -> Formula {
        Formula::prop(n)
    }

    #[test]
    fn or_desugars_through_negated_conjunction() {
        let core = Formula::or(p(1), p(2)).desugar();
        let expected = CoreFormula::not(CoreFormula::and(
            CoreFormula::not(CoreFormula::Prop(1)),
            CoreFormula::not(CoreFormula::Prop(2)),
        ));
        assert_eq!(core, expected);
    }

    #[test]
    fn box_desugars_to_negated_diamond() {
        let core = Formula::boxed(Dim::One, p(1)).desugar();
        let expected = CoreFormula::not(CoreFormula::dia(Dim::One, CoreFormula::not(CoreFormula::Prop(1))));
        assert_eq!(core, expected);
    }

    #[test]
    fn atoms_are_already_core() {
        assert_eq!(p(1).desugar(), CoreFormula::Prop(1));
    }

    #[test]
    fn iff_expands_to_two_implications() {
        let core = Formula::iff(p(1), p(2)).desugar();
        let imp = |a: u32, b: u32| {
            CoreFormula::not(CoreFormula::and(CoreFormula::Prop(a), CoreFormula::not(CoreFormula::Prop(b))))
        };
        assert_eq!(core, CoreFormula::and(imp(1, 2), imp(2, 1)));
    }

    #[test]
    fn subformulas_of_conjunction() {
        let f = CoreFormula::and(CoreFormula::Prop(1), CoreFormula::Prop(2));
        let subs = f.subformulas();
        assert_eq!(subs.len(), 3);
        assert!(subs.contains(&f));
        assert!(subs.contains(&CoreFormula::Prop(1)));
        assert!(subs.contains(&CoreFormula::Prop(2)));
    }

    #[test]
    fn subformulas_of_diamond() {
        let f = CoreFormula::dia(Dim::One, CoreFormula::not(CoreFormula::Prop(1)));
        let subs = f.subformulas();
        let expected: BTreeSet<_> = [
            f.clone(),
            CoreFormula::not(CoreFormula::Prop(1)),
            CoreFormula::Prop(1),
        ]
        .into_iter()
        .collect();
        assert_eq!(subs, expected);
        assert_eq!(CoreFormula::Prop(1).subformulas().len(), 1);
    }

    #[test]
    fn nominals_listed_left_to_right() {
        let f = CoreFormula::at(
            Nominal::second(3),
            CoreFormula::and(CoreFormula::Nom(Nominal::first(2)), CoreFormula::Nom(Nominal::second(3))),
        );
        assert_eq!(f.nominals_in_order(), vec![Nominal::second(3), Nominal::first(2)]);
    }
}
