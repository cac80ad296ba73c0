//! Whole-model evaluation on bitmasks: the extension of a formula in a model
//! with at most 64 world pairs is one `u64`, bit `x * n2 + y`.

use std::collections::BTreeMap;

use crate::syntax::{CoreFormula, Dim, Nominal};

pub(crate) const MAX_PAIRS: usize = 64;

#[derive(Clone, Copy, Debug)]
enum Op {
    Prop(usize),
    Nom1(usize),
    Nom2(usize),
    Not,
    And,
    Dia1,
    Dia2,
    At1(usize),
    At2(usize),
}

/// A core formula compiled to postfix over atom slots.
#[derive(Clone, Debug)]
pub(crate) struct Program {
    ops: Vec<Op>,
    pub props: Vec<u32>,
    pub noms1: Vec<Nominal>,
    pub noms2: Vec<Nominal>,
}

impl Program {
    pub fn compile(f: &CoreFormula) -> Self {
        let mut p = Program { ops: Vec::new(), props: Vec::new(), noms1: Vec::new(), noms2: Vec::new() };
        for a in f.atoms() {
            match a {
                crate::syntax::Atom::Prop(q) => p.props.push(q),
                crate::syntax::Atom::Nom(n) if n.dim == Dim::One => p.noms1.push(n),
                crate::syntax::Atom::Nom(n) => p.noms2.push(n),
            }
        }
        let props: BTreeMap<u32, usize> = p.props.iter().enumerate().map(|(i, &q)| (q, i)).collect();
        let noms: BTreeMap<Nominal, usize> = p
            .noms1
            .iter()
            .enumerate()
            .chain(p.noms2.iter().enumerate())
            .map(|(i, &n)| (n, i))
            .collect();
        p.emit(f, &props, &noms);
        p
    }

    fn emit(&mut self, f: &CoreFormula, props: &BTreeMap<u32, usize>, noms: &BTreeMap<Nominal, usize>) {
        match f {
            CoreFormula::Prop(q) => self.ops.push(Op::Prop(props[q])),
            CoreFormula::Nom(n) => self.ops.push(match n.dim {
                Dim::One => Op::Nom1(noms[n]),
                Dim::Two => Op::Nom2(noms[n]),
            }),
            CoreFormula::Not(g) => {
                self.emit(g, props, noms);
                self.ops.push(Op::Not);
            }
            CoreFormula::And(l, r) => {
                self.emit(l, props, noms);
                self.emit(r, props, noms);
                self.ops.push(Op::And);
            }
            CoreFormula::Dia(d, g) => {
                self.emit(g, props, noms);
                self.ops.push(if *d == Dim::One { Op::Dia1 } else { Op::Dia2 });
            }
            CoreFormula::At(n, g) => {
                self.emit(g, props, noms);
                self.ops.push(match n.dim {
                    Dim::One => Op::At1(noms[n]),
                    Dim::Two => Op::At2(noms[n]),
                });
            }
        }
    }
}

/// Frame part of a bitmask model. `r2` edges carry the first coordinate so
/// product and dependent frames share one representation.
#[derive(Clone, Debug)]
pub(crate) struct BitFrame {
    pub n1: usize,
    pub n2: usize,
    pub r1: Vec<(usize, usize)>,
    pub r2: Vec<(usize, usize, usize)>,
    full: u64,
    row: u64,
    replicate: u64,
}

impl BitFrame {
    pub fn new(n1: usize, n2: usize) -> Self {
        assert!(n1 * n2 <= MAX_PAIRS && n1 > 0 && n2 > 0);
        let full = mask(n1 * n2);
        let row = mask(n2);
        let replicate = (0..n1).fold(0u64, |acc, x| acc | 1 << (x * n2));
        BitFrame { n1, n2, r1: Vec::new(), r2: Vec::new(), full, row, replicate }
    }

    /// Extension of `prog` given prop extensions and nominal denotations
    /// indexed like the program's slots.
    pub fn extension(&self, prog: &Program, props: &[u64], noms1: &[usize], noms2: &[usize], stack: &mut Vec<u64>) -> u64 {
        stack.clear();
        let n2 = self.n2;
        for op in &prog.ops {
            let v = match *op {
                Op::Prop(s) => props[s],
                Op::Nom1(s) => self.row << (noms1[s] * n2),
                Op::Nom2(s) => self.replicate << noms2[s],
                Op::Not => !stack.pop().unwrap() & self.full,
                Op::And => {
                    let r = stack.pop().unwrap();
                    stack.pop().unwrap() & r
                }
                Op::Dia1 => {
                    let m = stack.pop().unwrap();
                    self.r1.iter().fold(0, |acc, &(x, x2)| acc | ((m >> (x2 * n2)) & self.row) << (x * n2))
                }
                Op::Dia2 => {
                    let m = stack.pop().unwrap();
                    self.r2.iter().fold(0, |acc, &(x, y, y2)| {
                        if m >> (x * n2 + y2) & 1 == 1 {
                            acc | 1 << (x * n2 + y)
                        } else {
                            acc
                        }
                    })
                }
                Op::At1(s) => {
                    let m = stack.pop().unwrap();
                    ((m >> (noms1[s] * n2)) & self.row) * self.replicate
                }
                Op::At2(s) => {
                    let m = stack.pop().unwrap();
                    let d = noms2[s];
                    (0..self.n1).fold(0, |acc, x| if m >> (x * n2 + d) & 1 == 1 { acc | self.row << (x * n2) } else { acc })
                }
            };
            stack.push(v);
        }
        stack.pop().expect("empty program")
    }
}

fn mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}
