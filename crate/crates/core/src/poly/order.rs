use std::cmp::Ordering;

use serde::Serialize;

use super::{revlex, Monomial};

/// Monomial orders. Under the local order `1 > x_i`, so the leading term
/// of a polynomial is among its lowest-degree terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MonomialOrder {
    GlobalDegRevLex,
    LocalDegRevLex,
}

impl MonomialOrder {
    pub fn cmp(self, a: &Monomial, b: &Monomial) -> Ordering {
        let by_degree = a.degree().cmp(&b.degree());
        let by_degree = match self {
            MonomialOrder::GlobalDegRevLex => by_degree,
            MonomialOrder::LocalDegRevLex => by_degree.reverse(),
        };
        by_degree.then_with(|| revlex(a, b))
    }

    pub fn is_global(self) -> bool {
        self == MonomialOrder::GlobalDegRevLex
    }
}

/// A module term: monomial times a basis vector `e_comp`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub(crate) struct Term {
    pub comp: u32,
    pub mon: Monomial,
}

/// Position over term: terms in a lower-indexed component are larger.
pub(crate) fn cmp_pot(order: MonomialOrder, a: &Term, b: &Term) -> Ordering {
    b.comp
        .cmp(&a.comp)
        .then_with(|| order.cmp(&a.mon, &b.mon))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_order_prefers_low_degree() {
        let one = Monomial::one(1);
        let x = Monomial::var(1, 0);
        assert_eq!(MonomialOrder::LocalDegRevLex.cmp(&one, &x), Ordering::Greater);
        assert_eq!(MonomialOrder::GlobalDegRevLex.cmp(&one, &x), Ordering::Less);
    }

    #[test]
    fn position_dominates() {
        let t0 = Term {
            comp: 0,
            mon: Monomial::one(1),
        };
        let t1 = Term {
            comp: 1,
            mon: Monomial::from_exponents(&[5]),
        };
        assert_eq!(
            cmp_pot(MonomialOrder::GlobalDegRevLex, &t0, &t1),
            Ordering::Greater
        );
    }
}
