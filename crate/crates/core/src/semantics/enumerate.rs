use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::bits::{BitFrame, Program, MAX_PAIRS};
use super::eval::eval;
use super::model::{is_decreasing, FrameKind, Kripke, KripkeDProduct, KripkeProduct, Model, Relation, WorldPair};
use crate::syntax::{Atom, CoreFormula, Dim, Formula, Nominal};

/// Largest world-set sizes to enumerate, per dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub w1: usize,
    pub w2: usize,
}

impl Bounds {
    pub fn new(w1: usize, w2: usize) -> Self {
        assert!(w1 >= 1 && w2 >= 1, "bounds must be at least 1");
        Bounds { w1, w2 }
    }

    /// World-set sizes in enumeration order: first dimension outer.
    pub fn sizes(&self) -> impl Iterator<Item = (usize, usize)> {
        let w2 = self.w2;
        (1..=self.w1).flat_map(move |n1| (1..=w2).map(move |n2| (n1, n2)))
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { w1: 2, w2: 2 }
    }
}

/// All models of one kind with fixed world counts over fixed atoms.
///
/// A model is a mixed-radix number. From most to least significant digit:
/// R1 edges, R2 edges, proposition memberships, then first- and
/// second-dimension nominal denotations. Edge `k` of R1 is `(k / n1, k % n1)`;
/// edge `k` of a product R2 is `(k / n2, k % n2)`; a dependent R2 edge `k`
/// belongs to `x = k / n2²` and is `(r / n2, r % n2)` with `r = k % n2²`.
/// Membership bit `k` of a proposition is the pair `(k / n2, k % n2)`.
#[derive(Clone, Debug)]
pub struct ModelSpace {
    pub kind: FrameKind,
    pub n1: usize,
    pub n2: usize,
    pub props: Vec<u32>,
    pub noms1: Vec<Nominal>,
    pub noms2: Vec<Nominal>,
}

impl ModelSpace {
    pub fn new(kind: FrameKind, n1: usize, n2: usize, atoms: &BTreeSet<Atom>) -> Self {
        let mut s = ModelSpace { kind, n1, n2, props: Vec::new(), noms1: Vec::new(), noms2: Vec::new() };
        for a in atoms {
            match *a {
                Atom::Prop(p) => s.props.push(p),
                Atom::Nom(n) if n.dim == Dim::One => s.noms1.push(n),
                Atom::Nom(n) => s.noms2.push(n),
            }
        }
        s
    }

    pub fn r1_bits(&self) -> usize {
        self.n1 * self.n1
    }

    pub fn r2_bits(&self) -> usize {
        match self.kind {
            FrameKind::Product => self.n2 * self.n2,
            FrameKind::DProduct => self.n1 * self.n2 * self.n2,
        }
    }

    pub fn frame_count(&self) -> u128 {
        1u128 << (self.r1_bits() + self.r2_bits())
    }

    pub fn valuation_count(&self) -> u128 {
        let pairs = self.n1 * self.n2;
        let props = 1u128 << (pairs * self.props.len());
        props * (self.n1 as u128).pow(self.noms1.len() as u32) * (self.n2 as u128).pow(self.noms2.len() as u32)
    }

    pub fn len(&self) -> u128 {
        self.frame_count() * self.valuation_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn r1_edges(&self, frame: u128) -> Vec<(usize, usize)> {
        let bits = frame >> self.r2_bits();
        (0..self.r1_bits()).filter(|k| bits >> k & 1 == 1).map(|k| (k / self.n1, k % self.n1)).collect()
    }

    /// Second-relation edges as `(x, y, y')`; product edges are repeated for every `x`.
    fn r2_edges(&self, frame: u128) -> Vec<(usize, usize, usize)> {
        let n2 = self.n2;
        let sq = n2 * n2;
        let mut out = Vec::new();
        for k in 0..self.r2_bits() {
            if frame >> k & 1 == 0 {
                continue;
            }
            match self.kind {
                FrameKind::Product => out.extend((0..self.n1).map(|x| (x, k / n2, k % n2))),
                FrameKind::DProduct => {
                    let r = k % sq;
                    out.push((k / sq, r / n2, r % n2));
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn bit_frame(&self, frame: u128) -> BitFrame {
        let mut f = BitFrame::new(self.n1, self.n2);
        f.r1 = self.r1_edges(frame);
        f.r2 = self.r2_edges(frame);
        f
    }

    /// Splits a valuation index into proposition masks and nominal denotations.
    fn decode_valuation(&self, mut v: u128, props: &mut [u64], noms1: &mut [usize], noms2: &mut [usize]) {
        for d in noms2.iter_mut().rev() {
            *d = (v % self.n2 as u128) as usize;
            v /= self.n2 as u128;
        }
        for d in noms1.iter_mut().rev() {
            *d = (v % self.n1 as u128) as usize;
            v /= self.n1 as u128;
        }
        let pairs = self.n1 * self.n2;
        for m in props.iter_mut().rev() {
            *m = (v & ((1u128 << pairs) - 1)) as u64;
            v >>= pairs;
        }
    }

    /// The model at position `index` (frame-major).
    pub fn model(&self, index: u128) -> Model {
        let vc = self.valuation_count();
        let (frame, val) = (index / vc, index % vc);
        let mut props = vec![0u64; self.props.len()];
        let mut noms1 = vec![0usize; self.noms1.len()];
        let mut noms2 = vec![0usize; self.noms2.len()];
        self.decode_valuation(val, &mut props, &mut noms1, &mut noms2);
        self.materialize(frame, &props, &noms1, &noms2)
    }

    fn materialize(&self, frame: u128, props: &[u64], noms1: &[usize], noms2: &[usize]) -> Model {
        let mut m: Model = match self.kind {
            FrameKind::Product => {
                let mut m = KripkeProduct::blank(self.n1, self.n2);
                m.r2 = Relation::from_pairs(
                    self.n2,
                    (0..self.r2_bits()).filter(|k| frame >> k & 1 == 1).map(|k| (k / self.n2, k % self.n2)),
                );
                m.into()
            }
            FrameKind::DProduct => {
                let mut m = KripkeDProduct::blank(self.n1, self.n2);
                for (x, y, y2) in self.r2_edges(frame) {
                    m.r2[x].insert(y, y2);
                }
                m.into()
            }
        };
        for (a, b) in self.r1_edges(frame) {
            m.r1_mut().insert(a, b);
        }
        let val = m.valuation_mut();
        for (slot, &p) in self.props.iter().enumerate() {
            val.props.insert(p, BTreeSet::new());
            for k in 0..self.n1 * self.n2 {
                if props[slot] >> k & 1 == 1 {
                    val.set_prop(p, WorldPair::new(k / self.n2, k % self.n2));
                }
            }
        }
        for (n, &d) in self.noms1.iter().zip(noms1) {
            val.set_nominal(*n, d);
        }
        for (n, &d) in self.noms2.iter().zip(noms2) {
            val.set_nominal(*n, d);
        }
        m
    }

    pub fn iter(&self) -> impl Iterator<Item = Model> + '_ {
        (0..self.len()).map(move |i| self.model(i))
    }
}

/// Every model of `kind` with up to `bounds` worlds per dimension over `atoms`,
/// smaller world sets first. Deterministic.
pub fn enumerate_models(bounds: Bounds, atoms: &BTreeSet<Atom>, kind: FrameKind) -> impl Iterator<Item = Model> + '_ {
    bounds.sizes().flat_map(move |(n1, n2)| {
        let space = ModelSpace::new(kind, n1, n2, atoms);
        (0..space.len()).map(move |i| space.model(i))
    })
}

/// First enumerated `(m, w)` with `m, w ⊨ ¬f`, over the atoms of `f`.
///
/// Absence within bounds says nothing about validity.
pub fn find_countermodel_bruteforce(f: &Formula, bounds: Bounds, kind: FrameKind) -> Option<(Model, WorldPair)> {
    let core = CoreFormula::not(f.desugar());
    find_satisfying(&core, bounds, kind)
}

/// First enumerated `(m, w)` with `m, w ⊨ f`.
pub fn find_satisfying(f: &CoreFormula, bounds: Bounds, kind: FrameKind) -> Option<(Model, WorldPair)> {
    search(f, bounds, kind, false)
}

/// As [`find_countermodel_bruteforce`] over decreasing d-product frames only.
pub fn find_decreasing_countermodel(f: &Formula, bounds: Bounds) -> Option<(Model, WorldPair)> {
    search(&CoreFormula::not(f.desugar()), bounds, FrameKind::DProduct, true)
}

fn search(f: &CoreFormula, bounds: Bounds, kind: FrameKind, decreasing_only: bool) -> Option<(Model, WorldPair)> {
    let atoms = f.atoms();
    let prog = Program::compile(f);
    let mut stack = Vec::with_capacity(16);
    for (n1, n2) in bounds.sizes() {
        let space = ModelSpace::new(kind, n1, n2, &atoms);
        if n1 * n2 > MAX_PAIRS {
            for m in space.iter() {
                if decreasing_only && !m.as_dproduct().is_some_and(is_decreasing) {
                    continue;
                }
                if let Some(w) = m.pairs().into_iter().find(|&w| eval(&m, w, f)) {
                    return Some((m, w));
                }
            }
            continue;
        }
        let mut props = vec![0u64; space.props.len()];
        let mut noms1 = vec![0usize; space.noms1.len()];
        let mut noms2 = vec![0usize; space.noms2.len()];
        let vc = space.valuation_count();
        for frame in 0..space.frame_count() {
            if decreasing_only {
                let bare = space.materialize(frame, &vec![0; props.len()], &vec![0; noms1.len()], &vec![0; noms2.len()]);
                if !bare.as_dproduct().is_some_and(is_decreasing) {
                    continue;
                }
            }
            let bf = space.bit_frame(frame);
            for v in 0..vc {
                space.decode_valuation(v, &mut props, &mut noms1, &mut noms2);
                let ext = bf.extension(&prog, &props, &noms1, &noms2, &mut stack);
                if ext != 0 {
                    let k = ext.trailing_zeros() as usize;
                    let m = space.materialize(frame, &props, &noms1, &noms2);
                    return Some((m, WorldPair::new(k / n2, k % n2)));
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{eval, eval_surface};
    use crate::syntax::{parse, random_formula, Vocabulary};

    fn props(ps: &[u32]) -> BTreeSet<Atom> {
        ps.iter().map(|&p| Atom::Prop(p)).collect()
    }

    #[test]
    fn one_by_one_counts() {
        let b = Bounds::new(1, 1);
        assert_eq!(enumerate_models(b, &props(&[1]), FrameKind::Product).count(), 8);
        assert_eq!(enumerate_models(b, &props(&[]), FrameKind::Product).count(), 4);
    }

    #[test]
    fn two_by_two_counts_by_formula() {
        // Sizes (1,1), (1,2), (2,1), (2,2); frames times valuations for one prop.
        let per = |n1: u32, n2: u32, r2: u32| 2u128.pow(n1 * n1 + r2) * 2u128.pow(n1 * n2);
        let product = per(1, 1, 1) + per(1, 2, 4) + per(2, 1, 1) + per(2, 2, 4);
        let dproduct = per(1, 1, 1) + per(1, 2, 4) + per(2, 1, 2) + per(2, 2, 8);
        let b = Bounds::new(2, 2);
        assert_eq!(enumerate_models(b, &props(&[1]), FrameKind::Product).count() as u128, product);
        assert_eq!(enumerate_models(b, &props(&[1]), FrameKind::DProduct).count() as u128, dproduct);
    }

    #[test]
    fn no_duplicates_and_deterministic() {
        let atoms: BTreeSet<Atom> = [Atom::Prop(1), Atom::Nom(Nominal::first(1))].into_iter().collect();
        let a: Vec<Model> = enumerate_models(Bounds::new(2, 1), &atoms, FrameKind::DProduct).collect();
        let b: Vec<Model> = enumerate_models(Bounds::new(2, 1), &atoms, FrameKind::DProduct).collect();
        assert_eq!(a, b);
        for (i, m) in a.iter().enumerate() {
            assert!(!a[..i].contains(m));
        }
    }

    #[test]
    fn p_is_refuted_by_empty_valuation() {
        let (m, w) = find_countermodel_bruteforce(&Formula::prop(1), Bounds::new(1, 1), FrameKind::Product).unwrap();
        assert!(!m.valuation().holds(1, w));
    }

    #[test]
    fn diamond_swap_split_by_frame_kind() {
        let f = parse("<1><2>p1 <-> <2><1>p1").unwrap();
        assert!(find_countermodel_bruteforce(&f, Bounds::new(2, 2), FrameKind::Product).is_none());
        let (m, w) = find_countermodel_bruteforce(&f, Bounds::new(2, 2), FrameKind::DProduct).unwrap();
        assert!(!eval(&m, w, &f.desugar()));
        assert!(m.as_dproduct().unwrap().to_product().is_none());
    }

    #[test]
    fn bitmask_extension_matches_pointwise_eval() {
        let vocab = Vocabulary::new(1, 1, 1);
        for seed in 0..60 {
            let f = random_formula(seed, 7, &vocab).desugar();
            let atoms = f.atoms();
            let prog = Program::compile(&f);
            for kind in [FrameKind::Product, FrameKind::DProduct] {
                let space = ModelSpace::new(kind, 2, 2, &atoms);
                // A stride keeps this quick while visiting every frame region.
                let step = (space.len() / 500).max(1);
                let mut i = 0;
                while i < space.len() {
                    let m = space.model(i);
                    let vc = space.valuation_count();
                    let bf = space.bit_frame(i / vc);
                    let mut props = vec![0; space.props.len()];
                    let mut n1 = vec![0; space.noms1.len()];
                    let mut n2 = vec![0; space.noms2.len()];
                    space.decode_valuation(i % vc, &mut props, &mut n1, &mut n2);
                    let ext = bf.extension(&prog, &props, &n1, &n2, &mut Vec::new());
                    for w in m.pairs() {
                        assert_eq!(ext >> (w.x * 2 + w.y) & 1 == 1, eval(&m, w, &f), "{f} at {w:?}");
                    }
                    i += step;
                }
            }
        }
    }

    #[test]
    fn decreasing_search_skips_other_frames() {
        let dec_axiom = parse("<1>@a1<2>a2 -> @a1<2>a2").unwrap();
        assert!(find_countermodel_bruteforce(&dec_axiom, Bounds::new(2, 2), FrameKind::DProduct).is_some());
        assert!(find_decreasing_countermodel(&dec_axiom, Bounds::new(2, 2)).is_none());
        let (m, w) = find_decreasing_countermodel(&parse("<2>p1").unwrap(), Bounds::new(2, 2)).unwrap();
        assert!(!eval_surface(&m, w, &parse("<2>p1").unwrap()));
    }
}
