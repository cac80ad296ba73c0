use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::syntax::{Dim, Nominal};

/// A point of a two-dimensional frame, as indices into the two world lists.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WorldPair {
    pub x: usize,
    pub y: usize,
}

impl WorldPair {
    pub fn new(x: usize, y: usize) -> Self {
        WorldPair { x, y }
    }
}

/// A binary relation over `0..n`, stored as sorted successor lists.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Relation {
    succ: Vec<Vec<usize>>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Relation { succ: vec![Vec::new(); n] }
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut r = Relation::empty(n);
        for (a, b) in pairs {
            r.insert(a, b);
        }
        r
    }

    /// Adds an edge. Panics if either endpoint is out of range.
    pub fn insert(&mut self, from: usize, to: usize) {
        assert!(to < self.succ.len(), "edge target {to} out of range");
        let list = &mut self.succ[from];
        if let Err(pos) = list.binary_search(&to) {
            list.insert(pos, to);
        }
    }

    pub fn remove(&mut self, from: usize, to: usize) -> bool {
        let list = &mut self.succ[from];
        match list.binary_search(&to) {
            Ok(pos) => {
                list.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    pub fn successors(&self, from: usize) -> &[usize] {
        &self.succ[from]
    }

    pub fn contains(&self, from: usize, to: usize) -> bool {
        self.succ.get(from).is_some_and(|l| l.binary_search(&to).is_ok())
    }

    pub fn size(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.iter().all(Vec::is_empty)
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ.iter().enumerate().flat_map(|(a, l)| l.iter().map(move |&b| (a, b)))
    }

    pub fn is_superset_of(&self, other: &Relation) -> bool {
        other.pairs().all(|(a, b)| self.contains(a, b))
    }
}

/// Interpretation of propositions (sets of world pairs) and nominals (one
/// world of the nominal's dimension each).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Valuation {
    pub props: BTreeMap<u32, BTreeSet<WorldPair>>,
    pub noms: BTreeMap<Nominal, usize>,
}

impl Valuation {
    pub fn holds(&self, prop: u32, w: WorldPair) -> bool {
        self.props.get(&prop).is_some_and(|s| s.contains(&w))
    }

    pub fn nominal(&self, n: Nominal) -> Option<usize> {
        self.noms.get(&n).copied()
    }

    pub fn set_prop(&mut self, prop: u32, w: WorldPair) {
        self.props.entry(prop).or_default().insert(w);
    }

    pub fn set_nominal(&mut self, n: Nominal, world: usize) {
        self.noms.insert(n, world);
    }
}

/// Read access shared by product and dependent-product models.
pub trait Kripke {
    fn worlds1(&self) -> &[String];
    fn worlds2(&self) -> &[String];
    fn r1(&self) -> &Relation;
    /// The second-dimension relation in force at first-dimension world `x`.
    fn r2_at(&self, x: usize) -> &Relation;
    fn valuation(&self) -> &Valuation;

    fn width(&self) -> usize {
        self.worlds1().len()
    }

    fn height(&self) -> usize {
        self.worlds2().len()
    }

    fn pairs(&self) -> Vec<WorldPair> {
        let h = self.height();
        (0..self.width()).flat_map(|x| (0..h).map(move |y| WorldPair::new(x, y))).collect()
    }

    fn contains(&self, w: WorldPair) -> bool {
        w.x < self.width() && w.y < self.height()
    }
}

/// A product model: both relations are independent of the other coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KripkeProduct {
    pub worlds1: Vec<String>,
    pub worlds2: Vec<String>,
    pub r1: Relation,
    pub r2: Relation,
    pub valuation: Valuation,
}

/// A dependent-product model: the second relation is indexed by the
/// first-dimension world.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KripkeDProduct {
    pub worlds1: Vec<String>,
    pub worlds2: Vec<String>,
    pub r1: Relation,
    pub r2: Vec<Relation>,
    pub valuation: Valuation,
}

impl KripkeProduct {
    /// `n1 × n2` worlds named `x0..` and `y0..`, no edges, empty valuation.
    pub fn blank(n1: usize, n2: usize) -> Self {
        KripkeProduct {
            worlds1: default_names('x', n1),
            worlds2: default_names('y', n2),
            r1: Relation::empty(n1),
            r2: Relation::empty(n2),
            valuation: Valuation::default(),
        }
    }

    /// The same model seen as a dependent product with one shared second relation.
    pub fn to_dproduct(&self) -> KripkeDProduct {
        KripkeDProduct {
            worlds1: self.worlds1.clone(),
            worlds2: self.worlds2.clone(),
            r1: self.r1.clone(),
            r2: vec![self.r2.clone(); self.worlds1.len()],
            valuation: self.valuation.clone(),
        }
    }
}

impl KripkeDProduct {
    pub fn blank(n1: usize, n2: usize) -> Self {
        KripkeDProduct {
            worlds1: default_names('x', n1),
            worlds2: default_names('y', n2),
            r1: Relation::empty(n1),
            r2: vec![Relation::empty(n2); n1],
            valuation: Valuation::default(),
        }
    }

    /// The product model with the same data, if every `R2(x)` coincides.
    pub fn to_product(&self) -> Option<KripkeProduct> {
        let first = self.r2.first()?;
        if self.r2.iter().any(|r| r != first) {
            return None;
        }
        Some(KripkeProduct {
            worlds1: self.worlds1.clone(),
            worlds2: self.worlds2.clone(),
            r1: self.r1.clone(),
            r2: first.clone(),
            valuation: self.valuation.clone(),
        })
    }
}

pub(crate) fn default_names(prefix: char, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

impl Kripke for KripkeProduct {
    fn worlds1(&self) -> &[String] {
        &self.worlds1
    }
    fn worlds2(&self) -> &[String] {
        &self.worlds2
    }
    fn r1(&self) -> &Relation {
        &self.r1
    }
    fn r2_at(&self, _x: usize) -> &Relation {
        &self.r2
    }
    fn valuation(&self) -> &Valuation {
        &self.valuation
    }
}

impl Kripke for KripkeDProduct {
    fn worlds1(&self) -> &[String] {
        &self.worlds1
    }
    fn worlds2(&self) -> &[String] {
        &self.worlds2
    }
    fn r1(&self) -> &Relation {
        &self.r1
    }
    fn r2_at(&self, x: usize) -> &Relation {
        &self.r2[x]
    }
    fn valuation(&self) -> &Valuation {
        &self.valuation
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameKind {
    Product,
    #[serde(rename = "dproduct")]
    DProduct,
}

impl std::fmt::Display for FrameKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FrameKind::Product => "product",
            FrameKind::DProduct => "dproduct",
        })
    }
}

/// Either kind of model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Model {
    Product(KripkeProduct),
    DProduct(KripkeDProduct),
}

impl Model {
    pub fn kind(&self) -> FrameKind {
        match self {
            Model::Product(_) => FrameKind::Product,
            Model::DProduct(_) => FrameKind::DProduct,
        }
    }

    fn inner(&self) -> &dyn Kripke {
        match self {
            Model::Product(m) => m,
            Model::DProduct(m) => m,
        }
    }

    pub fn valuation_mut(&mut self) -> &mut Valuation {
        match self {
            Model::Product(m) => &mut m.valuation,
            Model::DProduct(m) => &mut m.valuation,
        }
    }

    pub fn r1_mut(&mut self) -> &mut Relation {
        match self {
            Model::Product(m) => &mut m.r1,
            Model::DProduct(m) => &mut m.r1,
        }
    }

    pub fn as_dproduct(&self) -> Option<&KripkeDProduct> {
        match self {
            Model::DProduct(m) => Some(m),
            Model::Product(_) => None,
        }
    }

    pub fn as_product(&self) -> Option<&KripkeProduct> {
        match self {
            Model::Product(m) => Some(m),
            Model::DProduct(_) => None,
        }
    }

    pub fn world1_index(&self, name: &str) -> Option<usize> {
        self.worlds1().iter().position(|w| w == name)
    }

    pub fn world2_index(&self, name: &str) -> Option<usize> {
        self.worlds2().iter().position(|w| w == name)
    }

    pub fn world_index(&self, dim: Dim, name: &str) -> Option<usize> {
        match dim {
            Dim::One => self.world1_index(name),
            Dim::Two => self.world2_index(name),
        }
    }
}

impl Kripke for Model {
    fn worlds1(&self) -> &[String] {
        self.inner().worlds1()
    }
    fn worlds2(&self) -> &[String] {
        self.inner().worlds2()
    }
    fn r1(&self) -> &Relation {
        self.inner().r1()
    }
    fn r2_at(&self, x: usize) -> &Relation {
        match self {
            Model::Product(m) => m.r2_at(x),
            Model::DProduct(m) => m.r2_at(x),
        }
    }
    fn valuation(&self) -> &Valuation {
        self.inner().valuation()
    }
}

impl From<KripkeProduct> for Model {
    fn from(m: KripkeProduct) -> Self {
        Model::Product(m)
    }
}

impl From<KripkeDProduct> for Model {
    fn from(m: KripkeDProduct) -> Self {
        Model::DProduct(m)
    }
}

/// `x R1 x'` implies `R2(x) ⊇ R2(x')`.
pub fn is_decreasing(m: &KripkeDProduct) -> bool {
    m.r1.pairs().all(|(x, x2)| m.r2[x].is_superset_of(&m.r2[x2]))
}
