use im::{HashMap, OrdSet, Vector};

use super::types::{BranchFormula, RuleId, Shape, Status};
use crate::syntax::{CoreFormula, Dim, IntroductionOrder, Nominal};

type Postings<K> = HashMap<K, Vector<usize>>;

/// One path of the tableau. Formulas are append-only and shared with the
/// parent after a fork.
#[derive(Clone, Debug)]
pub struct Branch {
    pub(crate) id: usize,
    pub(crate) parent: Option<usize>,
    pub(crate) children: Option<(usize, usize)>,
    formulas: Vector<BranchFormula>,
    index: HashMap<Shape, usize>,
    applied_diamond: OrdSet<usize>,
    order: IntroductionOrder,
    status: Status,
    /// `@i <1>j`, keyed by `i` and by `j`.
    links1_from: Postings<Nominal>,
    links1_to: Postings<Nominal>,
    /// `@a <2>b`, keyed by `a`.
    links2_from: Postings<Nominal>,
    /// `@i @a <2>b` with bare `b`, keyed by `(i, a)`.
    dlinks: Postings<(Nominal, Nominal)>,
    /// `@s t` with bare nominal `t`, keyed by `s`.
    ids: Postings<Nominal>,
}

fn post<K: std::hash::Hash + Eq + Clone>(map: &mut Postings<K>, key: K, idx: usize) {
    map.entry(key).or_default().push_back(idx);
}

fn bare_nominal_link(body: &CoreFormula, dim: Dim) -> Option<Nominal> {
    match body {
        CoreFormula::Dia(d, inner) if *d == dim => inner.as_nominal().filter(|n| n.dim == dim),
        _ => None,
    }
}

impl Branch {
    pub(crate) fn new(id: usize) -> Self {
        Branch {
            id,
            parent: None,
            children: None,
            formulas: Vector::new(),
            index: HashMap::new(),
            applied_diamond: OrdSet::new(),
            order: IntroductionOrder::new(),
            status: Status::Open,
            links1_from: HashMap::new(),
            links1_to: HashMap::new(),
            links2_from: HashMap::new(),
            dlinks: HashMap::new(),
            ids: HashMap::new(),
        }
    }

    /// A child sharing everything with `self`.
    pub(crate) fn fork(&self, id: usize) -> Self {
        let mut b = self.clone();
        b.id = id;
        b.parent = Some(self.id);
        b.children = None;
        b
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn parent(&self) -> Option<usize> {
        self.parent
    }

    pub fn children(&self) -> Option<(usize, usize)> {
        self.children
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn is_open(&self) -> bool {
        self.status == Status::Open
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    pub fn get(&self, idx: usize) -> &BranchFormula {
        &self.formulas[idx]
    }

    pub fn formulas(&self) -> impl Iterator<Item = &BranchFormula> + '_ {
        self.formulas.iter()
    }

    pub fn position(&self, shape: &Shape) -> Option<usize> {
        self.index.get(shape).copied()
    }

    pub fn contains(&self, shape: &Shape) -> bool {
        self.index.contains_key(shape)
    }

    pub fn order(&self) -> &IntroductionOrder {
        &self.order
    }

    pub fn applied_diamond(&self) -> impl Iterator<Item = usize> + '_ {
        self.applied_diamond.iter().copied()
    }

    pub fn is_diamond_applied(&self, idx: usize) -> bool {
        self.applied_diamond.contains(&idx)
    }

    pub(crate) fn mark_diamond(&mut self, idx: usize) {
        self.applied_diamond.insert(idx);
    }

    fn postings<'a, K: std::hash::Hash + Eq>(map: &'a Postings<K>, key: &K) -> impl Iterator<Item = usize> + 'a {
        map.get(key).into_iter().flat_map(|v| v.iter().copied())
    }

    /// Indices of `@i <1>j` for the given `i`.
    pub fn links1_from(&self, i: Nominal) -> impl Iterator<Item = usize> + '_ {
        Self::postings(&self.links1_from, &i)
    }

    /// Indices of `@i <1>j` for the given `j`.
    pub fn links1_to(&self, j: Nominal) -> impl Iterator<Item = usize> + '_ {
        Self::postings(&self.links1_to, &j)
    }

    /// Indices of `@a <2>b` for the given `a`.
    pub fn links2_from(&self, a: Nominal) -> impl Iterator<Item = usize> + '_ {
        Self::postings(&self.links2_from, &a)
    }

    /// Indices of `@i @a <2>b` with bare `b`.
    pub fn dlinks(&self, i: Nominal, a: Nominal) -> impl Iterator<Item = usize> + '_ {
        Self::postings(&self.dlinks, &(i, a))
    }

    /// Indices of identities `@s t` for the given `s`.
    pub fn ids(&self, s: Nominal) -> impl Iterator<Item = usize> + '_ {
        Self::postings(&self.ids, &s)
    }

    /// Appends unless present. Returns the index when something was added.
    /// Closes the branch when the new formula clashes with an earlier one.
    pub(crate) fn append(&mut self, shape: Shape, accessibility: bool, rule: RuleId, step: usize) -> Option<usize> {
        assert!(self.is_open(), "append to a closed branch");
        if self.index.contains_key(&shape) {
            return None;
        }
        let idx = self.formulas.len();
        for n in shape.nominals_in_order() {
            self.order.note(n);
        }
        match &shape {
            Shape::Single { prefix, body } => {
                if let Some(j) = bare_nominal_link(body, Dim::One) {
                    post(&mut self.links1_from, *prefix, idx);
                    post(&mut self.links1_to, j, idx);
                } else if bare_nominal_link(body, Dim::Two).is_some() {
                    post(&mut self.links2_from, *prefix, idx);
                } else if body.as_nominal().is_some() {
                    post(&mut self.ids, *prefix, idx);
                }
            }
            Shape::Double { first, second, body } => {
                if bare_nominal_link(body, Dim::Two).is_some() {
                    post(&mut self.dlinks, (*first, *second), idx);
                }
            }
        }
        let clash = match shape.body() {
            CoreFormula::Not(inner) => self.index.get(&shape.with_body((**inner).clone())).copied(),
            body => self.index.get(&shape.with_body(CoreFormula::not(body.clone()))).copied(),
        };
        self.index.insert(shape.clone(), idx);
        self.formulas.push_back(BranchFormula { shape, accessibility, rule, step });
        if let Some(other) = clash {
            self.status = Status::Closed(other, idx);
        }
        Some(idx)
    }

    /// Scans for a clashing pair: equal prefixes, bodies `ψ` and `¬ψ`.
    pub fn find_clash(&self) -> Option<(usize, usize)> {
        self.formulas.iter().enumerate().find_map(|(idx, f)| match f.shape.body() {
            CoreFormula::Not(inner) => {
                self.position(&f.shape.with_body((**inner).clone())).map(|other| (other.min(idx), other.max(idx)))
            }
            _ => None,
        })
    }

    /// Nominals occurring on the branch, ranked.
    pub fn nominals(&self) -> Vec<Nominal> {
        let mut all: Vec<Nominal> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for f in &self.formulas {
            for n in f.shape.nominals_in_order() {
                if seen.insert(n) {
                    all.push(n);
                }
            }
        }
        all.sort_by_key(|n| self.order.rank(*n).unwrap_or(u32::MAX));
        all
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn core(s: &str) -> CoreFormula {
        parse(s).unwrap().desugar()
    }

    #[test]
    fn clash_requires_equal_prefixes() {
        let (i1, a1, a2) = (Nominal::first(1), Nominal::second(1), Nominal::second(2));
        let mut b = Branch::new(0);
        b.append(Shape::double(i1, a1, core("p1")), false, RuleId::Root, 0);
        b.append(Shape::double(i1, a2, core("~p1")), false, RuleId::Root, 0);
        assert!(b.is_open());
        assert_eq!(b.find_clash(), None);
        b.append(Shape::single(a1, core("a2")), false, RuleId::Root, 0);
        b.append(Shape::single(a1, core("~a2")), false, RuleId::Root, 0);
        assert_eq!(b.status(), Status::Closed(2, 3));
        assert_eq!(b.find_clash(), Some((2, 3)));
    }

    #[test]
    fn duplicates_are_not_appended() {
        let mut b = Branch::new(0);
        let s = Shape::single(Nominal::first(0), core("i1"));
        assert_eq!(b.append(s.clone(), false, RuleId::Root, 0), Some(0));
        assert_eq!(b.append(s, false, RuleId::Red1, 1), None);
        assert_eq!(b.len(), 1);
        assert_eq!(b.ids(Nominal::first(0)).collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn intro_order_follows_appends_left_to_right() {
        let mut b = Branch::new(0);
        b.append(Shape::double(Nominal::first(5), Nominal::second(0), core("@i2 @a7 p1")), false, RuleId::Root, 0);
        let o = b.order();
        assert!(o.rank(Nominal::first(5)) < o.rank(Nominal::second(0)));
        assert!(o.rank(Nominal::second(0)) < o.rank(Nominal::first(2)));
        assert!(o.rank(Nominal::first(2)) < o.rank(Nominal::second(7)));
    }
}
