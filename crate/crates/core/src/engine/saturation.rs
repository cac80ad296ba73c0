//! Saturation conditions, checked directly against branch membership rather
//! than through rule instances.

use serde::Serialize;

use super::branch::Branch;
use super::types::{Mode, Shape};
use crate::syntax::{CoreFormula as F, Dim, Nominal};

/// One failed condition with the indices of the formulas that trigger it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Roman numeral of the condition, or `dec` / `bridge`.
    pub condition: &'static str,
    pub witnesses: Vec<usize>,
}

fn link(body: &F, dim: Dim) -> Option<Nominal> {
    match body {
        F::Dia(d, g) if *d == dim => g.as_nominal().filter(|n| n.dim == dim),
        _ => None,
    }
}

fn is_literal_of(body: &F, dim: Dim) -> bool {
    match body {
        F::Nom(n) => n.dim == dim,
        F::Not(g) => g.as_nominal().is_some_and(|n| n.dim == dim),
        _ => false,
    }
}

/// Every violated condition of the mode's saturation definition; empty when
/// the branch is saturated. Closed branches trivially pass.
pub fn is_saturated(b: &Branch, mode: Mode) -> Vec<Violation> {
    let mut out = Vec::new();
    if !b.is_open() {
        return out;
    }
    let dep = mode.is_dependent();
    let has = |s: Shape| b.contains(&s);
    let mut fail = |condition: &'static str, witnesses: Vec<usize>| out.push(Violation { condition, witnesses });

    for (idx, f) in b.formulas().enumerate() {
        match &f.shape {
            Shape::Double { first: i, second: a, body } => {
                let (i, a) = (*i, *a);
                let d = |j: Nominal, c: Nominal, g: F| Shape::double(j, c, g);
                match body {
                    F::Not(inner) => match &**inner {
                        F::Not(g) => {
                            if !has(d(i, a, (**g).clone())) {
                                fail("i", vec![idx]);
                            }
                        }
                        F::And(l, r) => {
                            if !has(d(i, a, F::not((**l).clone()))) && !has(d(i, a, F::not((**r).clone()))) {
                                fail("iii", vec![idx]);
                            }
                        }
                        F::Dia(Dim::One, g) => {
                            for l in b.links1_from(i) {
                                let j = link(b.get(l).shape.body(), Dim::One).unwrap();
                                if !has(d(j, a, F::not((**g).clone()))) {
                                    fail("vi", vec![idx, l]);
                                }
                            }
                        }
                        F::Dia(Dim::Two, g) => {
                            let links: Vec<usize> =
                                if dep { b.dlinks(i, a).collect() } else { b.links2_from(a).collect() };
                            for l in links {
                                let c = link(b.get(l).shape.body(), Dim::Two).unwrap();
                                if !has(d(i, c, F::not((**g).clone()))) {
                                    fail("vii", vec![idx, l]);
                                }
                            }
                        }
                        F::At(n, g) => {
                            let want = match n.dim {
                                Dim::One => d(*n, a, F::not((**g).clone())),
                                Dim::Two => d(i, *n, F::not((**g).clone())),
                            };
                            if !has(want) {
                                fail(if n.dim == Dim::One { "x" } else { "xi" }, vec![idx]);
                            }
                        }
                        F::Nom(n) => red(b, n.dim, i, a, body, idx, &mut fail),
                        F::Prop(_) => {}
                    },
                    F::And(l, r) => {
                        if !has(d(i, a, (**l).clone())) || !has(d(i, a, (**r).clone())) {
                            fail("ii", vec![idx]);
                        }
                    }
                    F::Dia(Dim::One, g) => {
                        let ok = b.is_diamond_applied(idx)
                            || b.links1_from(i).any(|l| {
                                let j = link(b.get(l).shape.body(), Dim::One).unwrap();
                                has(d(j, a, (**g).clone()))
                            });
                        if !ok {
                            fail("iv", vec![idx]);
                        }
                    }
                    F::Dia(Dim::Two, g) => {
                        let exempt = b.is_diamond_applied(idx) || (dep && f.accessibility);
                        let witnessed = || {
                            let links: Vec<usize> =
                                if dep { b.dlinks(i, a).collect() } else { b.links2_from(a).collect() };
                            links.into_iter().any(|l| {
                                let c = link(b.get(l).shape.body(), Dim::Two).unwrap();
                                has(d(i, c, (**g).clone()))
                            })
                        };
                        if !exempt && !witnessed() {
                            fail("v", vec![idx]);
                        }
                    }
                    F::At(n, g) => {
                        let want = match n.dim {
                            Dim::One => d(*n, a, (**g).clone()),
                            Dim::Two => d(i, *n, (**g).clone()),
                        };
                        if !has(want) {
                            fail(if n.dim == Dim::One { "viii" } else { "ix" }, vec![idx]);
                        }
                    }
                    F::Nom(n) => red(b, n.dim, i, a, body, idx, &mut fail),
                    F::Prop(_) => {}
                }
                if !(dep && f.accessibility) {
                    for id in b.ids(i) {
                        let j = b.get(id).shape.body().as_nominal().unwrap();
                        if !has(d(j, a, body.clone())) {
                            fail("xvi", vec![idx, id]);
                        }
                    }
                    for id in b.ids(a) {
                        let c = b.get(id).shape.body().as_nominal().unwrap();
                        if !has(d(i, c, body.clone())) {
                            fail("xvii", vec![idx, id]);
                        }
                    }
                }
                if mode == Mode::HdplDec && f.accessibility && link(body, Dim::Two).is_some() {
                    for l in b.links1_to(i) {
                        let Shape::Single { prefix: src, .. } = b.get(l).shape else { unreachable!() };
                        if !has(d(src, a, body.clone())) {
                            fail("dec", vec![l, idx]);
                        }
                    }
                }
            }
            Shape::Single { prefix: s, body } => {
                let s = *s;
                if let F::Not(g) = body {
                    if let Some(j) = g.as_nominal().filter(|j| j.dim == s.dim) {
                        if !has(Shape::single(j, F::Nom(j))) {
                            fail(if s.dim == Dim::One { "xiv" } else { "xv" }, vec![idx]);
                        }
                    }
                }
                if is_literal_of(body, s.dim) {
                    for id in b.ids(s) {
                        let t = b.get(id).shape.body().as_nominal().unwrap();
                        if !has(Shape::single(t, body.clone())) {
                            fail(if s.dim == Dim::One { "xviii" } else { "xix" }, vec![idx, id]);
                        }
                    }
                }
                if mode == Mode::HdplDec {
                    if let Some(j) = link(body, Dim::One) {
                        for id in b.ids(j) {
                            let k = b.get(id).shape.body().as_nominal().unwrap();
                            if !has(Shape::single(s, F::dia(Dim::One, F::Nom(k)))) {
                                fail("bridge", vec![idx, id]);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

fn red(
    b: &Branch,
    dim: Dim,
    i: Nominal,
    a: Nominal,
    body: &F,
    idx: usize,
    fail: &mut impl FnMut(&'static str, Vec<usize>),
) {
    let (prefix, label) = match dim {
        Dim::One => (i, "xii"),
        Dim::Two => (a, "xiii"),
    };
    if !b.contains(&Shape::single(prefix, body.clone())) {
        fail(label, vec![idx]);
    }
}
