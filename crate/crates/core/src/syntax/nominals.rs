use std::collections::{BTreeSet, HashMap};

use super::formula::{Dim, Nominal};

/// Hands out nominals that collide neither with a reserved set nor with
/// anything handed out before. Indices count up from zero per dimension.
#[derive(Clone, Debug, Default)]
pub struct NominalAllocator {
    next: [u32; 2],
    allocated: [usize; 2],
    reserved: BTreeSet<Nominal>,
}

impl NominalAllocator {
    pub fn new(reserved: impl IntoIterator<Item = Nominal>) -> Self {
        NominalAllocator { next: [0, 0], allocated: [0, 0], reserved: reserved.into_iter().collect() }
    }

    pub fn reserve(&mut self, n: Nominal) {
        self.reserved.insert(n);
    }

    pub fn fresh(&mut self, dim: Dim) -> Nominal {
        let slot = slot(dim);
        loop {
            let candidate = Nominal { dim, index: self.next[slot] };
            self.next[slot] = self.next[slot].checked_add(1).expect("nominal indices exhausted");
            if self.reserved.insert(candidate) {
                self.allocated[slot] += 1;
                return candidate;
            }
        }
    }

    /// How many nominals of `dim` this allocator has produced.
    pub fn allocated(&self, dim: Dim) -> usize {
        self.allocated[slot(dim)]
    }

    pub fn is_reserved(&self, n: Nominal) -> bool {
        self.reserved.contains(&n)
    }
}

fn slot(dim: Dim) -> usize {
    match dim {
        Dim::One => 0,
        Dim::Two => 1,
    }
}

/// Well-order on the nominals of a branch: rank by first occurrence.
///
/// The root formula is noted first, left to right, so its nominals take the
/// lowest ranks; later nominals follow in the order formulas join the branch.
#[derive(Clone, Debug, Default)]
pub struct IntroductionOrder {
    ranks: HashMap<Nominal, u32>,
    next: u32,
}

impl IntroductionOrder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records `n` if unseen; returns its rank either way.
    pub fn note(&mut self, n: Nominal) -> u32 {
        let next = &mut self.next;
        *self.ranks.entry(n).or_insert_with(|| {
            let r = *next;
            *next += 1;
            r
        })
    }

    pub fn rank(&self, n: Nominal) -> Option<u32> {
        self.ranks.get(&n).copied()
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// Least element of `set` under this order. Unranked nominals sort last,
    /// then by dimension and index.
    pub fn min<'a>(&self, set: impl IntoIterator<Item = &'a Nominal>) -> Option<Nominal> {
        set.into_iter().copied().min_by_key(|n| (self.rank(*n).unwrap_or(u32::MAX), *n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_skips_reserved_names() {
        let mut alloc = NominalAllocator::new([Nominal::first(0), Nominal::first(2)]);
        assert_eq!(alloc.fresh(Dim::One), Nominal::first(1));
        assert_eq!(alloc.fresh(Dim::One), Nominal::first(3));
        assert_eq!(alloc.fresh(Dim::Two), Nominal::second(0));
        assert_eq!(alloc.allocated(Dim::One), 2);
        assert_eq!(alloc.allocated(Dim::Two), 1);
    }

    #[test]
    fn order_ranks_by_first_note() {
        let mut order = IntroductionOrder::new();
        order.note(Nominal::first(5));
        order.note(Nominal::second(0));
        order.note(Nominal::first(5));
        order.note(Nominal::first(1));
        assert_eq!(order.rank(Nominal::first(5)), Some(0));
        assert_eq!(order.rank(Nominal::first(1)), Some(2));
        let set = [Nominal::first(1), Nominal::first(5)];
        assert_eq!(order.min(&set), Some(Nominal::first(5)));
    }

    proptest::proptest! {
        #[test]
        fn fresh_never_hits_reserved(reserved in proptest::collection::btree_set(0u32..40, 0..30), draws in 1usize..40) {
            let reserved: Vec<Nominal> = reserved.into_iter().map(Nominal::first).collect();
            let mut alloc = NominalAllocator::new(reserved.iter().copied());
            let mut seen = BTreeSet::new();
            for _ in 0..draws {
                let n = alloc.fresh(Dim::One);
                proptest::prop_assert!(!reserved.contains(&n));
                proptest::prop_assert!(seen.insert(n));
            }
        }
    }
}
