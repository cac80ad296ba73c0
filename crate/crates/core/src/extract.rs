//! Countermodels from open saturated branches: right nominals, the `~`
//! classes, urfathers and the quotient model built on them.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::engine::{Branch, Mode, Shape};
use crate::semantics::{eval, Kripke, KripkeDProduct, KripkeProduct, Model, Relation, Valuation, WorldPair};
use crate::syntax::{CoreFormula, Dim, Nominal};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtractError {
    #[error("branch {0} is closed")]
    ClosedBranch(usize),
    #[error("~ on dimension {dim} is not an equivalence: {law} fails at {witness:?}")]
    NotEquivalence { dim: Dim, law: &'static str, witness: Vec<Nominal> },
}

/// Which link formulas contribute accessibility edges.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EdgeHarvest {
    /// Only links whose source prefix is its own urfather.
    #[default]
    UrfatherSources,
    /// Every link, mapped through the urfathers.
    AllLinks,
}

/// Nominals `s` with some `@t s` on the branch.
pub fn right_nominals(b: &Branch) -> [BTreeSet<Nominal>; 2] {
    let mut out = [BTreeSet::new(), BTreeSet::new()];
    for f in b.formulas() {
        if let Shape::Single { prefix, body } = &f.shape {
            if let Some(s) = body.as_nominal().filter(|s| s.dim == prefix.dim) {
                out[slot(s.dim)].insert(s);
            }
        }
    }
    out
}

fn slot(d: Dim) -> usize {
    match d {
        Dim::One => 0,
        Dim::Two => 1,
    }
}

/// The partition of right nominals by `~`, per dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NominalClasses {
    pub first: Vec<BTreeSet<Nominal>>,
    pub second: Vec<BTreeSet<Nominal>>,
}

impl NominalClasses {
    pub fn classes(&self, dim: Dim) -> &[BTreeSet<Nominal>] {
        match dim {
            Dim::One => &self.first,
            Dim::Two => &self.second,
        }
    }

    pub fn class_of(&self, n: Nominal) -> Option<&BTreeSet<Nominal>> {
        self.classes(n.dim).iter().find(|c| c.contains(&n))
    }
}

fn related(b: &Branch, s: Nominal, t: Nominal) -> bool {
    b.contains(&Shape::single(s, CoreFormula::Nom(t)))
}

/// Groups right nominals by `s ~ t iff @s t`, checking the equivalence laws.
pub fn nominal_classes(b: &Branch) -> Result<NominalClasses, ExtractError> {
    let right = right_nominals(b);
    let mut parts: [Vec<BTreeSet<Nominal>>; 2] = [Vec::new(), Vec::new()];
    for (k, set) in right.iter().enumerate() {
        let dim = if k == 0 { Dim::One } else { Dim::Two };
        let bad = |law, witness| Err(ExtractError::NotEquivalence { dim, law, witness });
        for &s in set {
            if !related(b, s, s) {
                return bad("reflexivity", vec![s]);
            }
            for &t in set {
                if related(b, s, t) {
                    if !related(b, t, s) {
                        return bad("symmetry", vec![s, t]);
                    }
                    for &u in set {
                        if related(b, t, u) && !related(b, s, u) {
                            return bad("transitivity", vec![s, t, u]);
                        }
                    }
                }
            }
        }
        let mut seen = BTreeSet::new();
        for &s in set {
            if seen.contains(&s) {
                continue;
            }
            let class: BTreeSet<Nominal> = set.iter().copied().filter(|&t| related(b, s, t)).collect();
            seen.extend(class.iter().copied());
            parts[k].push(class);
        }
    }
    let [first, second] = parts;
    Ok(NominalClasses { first, second })
}

/// `min [j]` for some `@s j` on the branch, otherwise `s` itself.
pub fn urfather(b: &Branch, classes: &NominalClasses, s: Nominal) -> Nominal {
    let j = b.ids(s).map(|idx| b.get(idx).shape.body().as_nominal().unwrap()).find(|j| j.dim == s.dim);
    match j {
        Some(j) => {
            let class = classes.class_of(j).expect("right nominal without a class");
            b.order().min(class.iter()).expect("empty class")
        }
        None => s,
    }
}

/// A countermodel with its world names and the pair refuting the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtractedModel {
    pub model: Model,
    pub designated: WorldPair,
    /// Every nominal on the branch mapped to its urfather.
    pub urfathers: BTreeMap<Nominal, Nominal>,
}

impl ExtractedModel {
    /// The world pair named by `(u(i), u(a))`.
    pub fn pair_of(&self, i: Nominal, a: Nominal) -> Option<WorldPair> {
        let x = self.index_of(*self.urfathers.get(&i)?)?;
        let y = self.index_of(*self.urfathers.get(&a)?)?;
        Some(WorldPair::new(x, y))
    }

    fn index_of(&self, n: Nominal) -> Option<usize> {
        self.model.valuation().nominal(n)
    }
}

pub fn extract_model(b: &Branch, mode: Mode) -> Result<ExtractedModel, ExtractError> {
    extract_model_with(b, mode, EdgeHarvest::default())
}

pub fn extract_model_with(b: &Branch, mode: Mode, harvest: EdgeHarvest) -> Result<ExtractedModel, ExtractError> {
    if !b.is_open() {
        return Err(ExtractError::ClosedBranch(b.id()));
    }
    let classes = nominal_classes(b)?;
    let nominals = b.nominals();
    let urfathers: BTreeMap<Nominal, Nominal> = nominals.iter().map(|&n| (n, urfather(b, &classes, n))).collect();
    let u = |n: Nominal| urfathers[&n];
    let source_ok = |n: Nominal| harvest == EdgeHarvest::AllLinks || u(n) == n;

    // Worlds in rank order of the urfathers.
    let mut worlds: [Vec<Nominal>; 2] = [Vec::new(), Vec::new()];
    for &n in &nominals {
        let w = u(n);
        let list = &mut worlds[slot(w.dim)];
        if !list.contains(&w) {
            list.push(w);
        }
    }
    for list in &mut worlds {
        list.sort_by_key(|n| b.order().rank(*n));
    }
    let index: BTreeMap<Nominal, usize> =
        worlds.iter().flat_map(|l| l.iter().enumerate().map(|(k, n)| (*n, k))).collect();
    let w = |n: Nominal| index[&u(n)];
    let (n1, n2) = (worlds[0].len(), worlds[1].len());

    let mut valuation = Valuation::default();
    for &n in &nominals {
        valuation.set_nominal(n, w(n));
    }
    let mut r1 = Relation::empty(n1);
    let mut r2 = Relation::empty(n2);
    let mut r2d = vec![Relation::empty(n2); n1];
    let dependent = mode.is_dependent();
    for f in b.formulas() {
        match &f.shape {
            Shape::Single { prefix, body } => {
                if let CoreFormula::Dia(d, g) = body {
                    let Some(t) = g.as_nominal().filter(|t| t.dim == *d && prefix.dim == *d) else { continue };
                    if !source_ok(*prefix) {
                        continue;
                    }
                    match d {
                        Dim::One => r1.insert(w(*prefix), w(t)),
                        Dim::Two if !dependent => r2.insert(w(*prefix), w(t)),
                        Dim::Two => {}
                    }
                }
            }
            Shape::Double { first, second, body } => match body {
                CoreFormula::Prop(p) => valuation.set_prop(*p, WorldPair::new(w(*first), w(*second))),
                CoreFormula::Dia(Dim::Two, g) if dependent => {
                    let Some(t) = g.as_nominal().filter(|t| t.dim == Dim::Two) else { continue };
                    if source_ok(*first) && source_ok(*second) {
                        r2d[w(*first)].insert(w(*second), w(t));
                    }
                }
                _ => {}
            },
        }
    }

    let names = |l: &[Nominal]| l.iter().map(|n| n.to_string()).collect::<Vec<_>>();
    let model = if dependent {
        Model::DProduct(KripkeDProduct { worlds1: names(&worlds[0]), worlds2: names(&worlds[1]), r1, r2: r2d, valuation })
    } else {
        Model::Product(KripkeProduct { worlds1: names(&worlds[0]), worlds2: names(&worlds[1]), r1, r2, valuation })
    };
    let Shape::Double { first: i0, second: a0, .. } = b.get(0).shape else { unreachable!("root is double-prefixed") };
    let designated = WorldPair::new(w(i0), w(a0));
    Ok(ExtractedModel { model, designated, urfathers })
}

/// `@i @a φ` is a quasi-subformula of the root: `φ`, or `φ = ¬χ` with `χ`,
/// is a subformula of the root body.
pub fn is_quasi_subformula(body: &CoreFormula, root_subformulas: &BTreeSet<CoreFormula>) -> bool {
    root_subformulas.contains(body) || body.negated().is_some_and(|chi| root_subformulas.contains(chi))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckEntry {
    pub index: usize,
    pub formula: String,
    pub world: (String, String),
}

/// Branch formulas the model does not satisfy at their urfather pair.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub failures: Vec<CheckEntry>,
    /// Dependent modes only: failing formulas outside the root's
    /// quasi-subformulas, which the model is not required to satisfy.
    pub informational: Vec<CheckEntry>,
}

impl VerificationReport {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn verify_extraction(b: &Branch, m: &ExtractedModel, mode: Mode) -> VerificationReport {
    let mut report = VerificationReport::default();
    let root_subs = b.get(0).shape.body().subformulas();
    for (idx, f) in b.formulas().enumerate() {
        let Shape::Double { first, second, body } = &f.shape else { continue };
        let Some(at) = m.pair_of(*first, *second) else {
            report.failures.push(CheckEntry { index: idx, formula: f.shape.to_string(), world: (first.to_string(), second.to_string()) });
            continue;
        };
        if eval(&m.model, at, body) {
            continue;
        }
        let entry = CheckEntry {
            index: idx,
            formula: f.shape.to_string(),
            world: (m.model.worlds1()[at.x].clone(), m.model.worlds2()[at.y].clone()),
        };
        if mode.is_dependent() && !is_quasi_subformula(body, &root_subs) {
            report.informational.push(entry);
        } else {
            report.failures.push(entry);
        }
    }
    report
}
