use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::formula::{Atom, Dim, Formula, Nominal};

/// Counts of atoms available to generated formulas. Atoms are numbered from 1:
/// `p1..pN`, `i1..iN`, `a1..aN`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub props: u32,
    pub noms1: u32,
    pub noms2: u32,
}

impl Vocabulary {
    pub fn new(props: u32, noms1: u32, noms2: u32) -> Self {
        Vocabulary { props, noms1, noms2 }
    }

    pub fn atoms(&self) -> Vec<Atom> {
        let props = (1..=self.props).map(Atom::Prop);
        let n1 = (1..=self.noms1).map(|i| Atom::Nom(Nominal::first(i)));
        let n2 = (1..=self.noms2).map(|i| Atom::Nom(Nominal::second(i)));
        props.chain(n1).chain(n2).collect()
    }

    fn nominals(&self) -> Vec<Nominal> {
        let n1 = (1..=self.noms1).map(Nominal::first);
        let n2 = (1..=self.noms2).map(Nominal::second);
        n1.chain(n2).collect()
    }
}

/// Draws a formula with at most `max_size` nodes over `vocab`.
///
/// Deterministic in `seed`. Panics if `max_size` is zero or the vocabulary is
/// empty.
pub fn random_formula(seed: u64, max_size: usize, vocab: &Vocabulary) -> Formula {
    assert!(max_size >= 1, "max_size must be at least 1");
    let atoms = vocab.atoms();
    assert!(!atoms.is_empty(), "vocabulary has no atoms");
    let mut gen = Generator { rng: ChaCha8Rng::seed_from_u64(seed), atoms, nominals: vocab.nominals() };
    let size = gen.rng.random_range(1..=max_size);
    gen.formula(size)
}

struct Generator {
    rng: ChaCha8Rng,
    atoms: Vec<Atom>,
    nominals: Vec<Nominal>,
}

impl Generator {
    /// Builds a formula of exactly `size` nodes.
    fn formula(&mut self, size: usize) -> Formula {
        if size == 1 {
            let a = self.atoms[self.rng.random_range(0..self.atoms.len())];
            return Formula::Atom(a);
        }
        // Unary when only one node is left for children, otherwise a coin flip.
        if size == 2 || self.rng.random_bool(0.45) {
            let body = self.formula(size - 1);
            let choices = if self.nominals.is_empty() { 5 } else { 6 };
            return match self.rng.random_range(0..choices) {
                0 => Formula::not(body),
                1 => Formula::dia(Dim::One, body),
                2 => Formula::dia(Dim::Two, body),
                3 => Formula::boxed(Dim::One, body),
                4 => Formula::boxed(Dim::Two, body),
                _ => {
                    let n = self.nominals[self.rng.random_range(0..self.nominals.len())];
                    Formula::at(n, body)
                }
            };
        }
        let left = self.rng.random_range(1..size - 1);
        let l = self.formula(left);
        let r = self.formula(size - 1 - left);
        match self.rng.random_range(0..4) {
            0 => Formula::and(l, r),
            1 => Formula::or(l, r),
            2 => Formula::implies(l, r),
            _ => Formula::iff(l, r),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node_with_one_prop() {
        assert_eq!(random_formula(1, 1, &Vocabulary::new(1, 0, 0)), Formula::prop(1));
    }

    #[test]
    fn same_seed_same_formula() {
        let v = Vocabulary::new(2, 2, 2);
        for seed in 0..20 {
            assert_eq!(random_formula(seed, 8, &v), random_formula(seed, 8, &v));
        }
    }

    proptest::proptest! {
        #[test]
        fn respects_size_and_vocabulary(seed: u64, max_size in 1usize..12) {
            let v = Vocabulary::new(2, 1, 1);
            let f = random_formula(seed, max_size, &v);
            proptest::prop_assert!(f.size() <= max_size);
            let allowed = v.atoms();
            proptest::prop_assert!(f.atoms().iter().all(|a| allowed.contains(a)));
        }
    }
}
