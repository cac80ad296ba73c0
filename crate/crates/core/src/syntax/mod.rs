//! Formula language: atoms, surface and core formulas, concrete syntax,
//! desugaring, fresh nominals and the introduction order on nominals.

mod formula;
mod nominals;
mod parse;
mod random;

pub use formula::{Atom, CoreFormula, Dim, Formula, Nominal};
pub use nominals::{IntroductionOrder, NominalAllocator};
pub use parse::{parse, ParseError};
pub use random::{random_formula, Vocabulary};

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_nominal() -> impl Strategy<Value = Nominal> {
        prop_oneof![(0u32..4).prop_map(Nominal::first), (0u32..4).prop_map(Nominal::second)]
    }

    pub(crate) fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            (0u32..4).prop_map(Formula::prop),
            arb_nominal().prop_map(Formula::nom),
        ];
        leaf.prop_recursive(5, 40, 2, |inner| {
            let dim = prop_oneof![Just(Dim::One), Just(Dim::Two)];
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::or(l, r)),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::implies(l, r)),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::iff(l, r)),
                (dim.clone(), inner.clone()).prop_map(|(d, f)| Formula::dia(d, f)),
                (dim, inner.clone()).prop_map(|(d, f)| Formula::boxed(d, f)),
                (arb_nominal(), inner).prop_map(|(n, f)| Formula::at(n, f)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_then_parse_is_identity(f in arb_formula()) {
            let text = f.to_string();
            prop_assert_eq!(parse(&text).unwrap(), f);
        }

        #[test]
        fn desugar_is_idempotent(f in arb_formula()) {
            let once = f.desugar();
            prop_assert_eq!(once.to_surface().desugar(), once);
        }
    }
}
