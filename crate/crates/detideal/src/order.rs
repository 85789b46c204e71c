//! Monomial orders over a declared variable set, and leading terms.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::poly::{Monomial, Polynomial, VarId};
use crate::scalar::Ring;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonomialOrder {
    /// Lexicographic, highest priority first.
    Lex(Vec<VarId>),
    /// Compare integer weight vectors in turn, then break ties lexicographically.
    Weight { weights: Vec<BTreeMap<VarId, i64>>, tiebreak: Vec<VarId> },
}

impl MonomialOrder {
    pub fn lex(vars: impl IntoIterator<Item = VarId>) -> Self {
        MonomialOrder::Lex(vars.into_iter().collect())
    }

    pub fn compare(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::Lex(vars) => lex_cmp(vars, a, b),
            MonomialOrder::Weight { weights, tiebreak } => {
                for w in weights {
                    let wa: i64 = a.iter().map(|(v, e)| w.get(v).copied().unwrap_or(0) * e as i64).sum();
                    let wb: i64 = b.iter().map(|(v, e)| w.get(v).copied().unwrap_or(0) * e as i64).sum();
                    match wa.cmp(&wb) {
                        Ordering::Equal => {}
                        o => return o,
                    }
                }
                lex_cmp(tiebreak, a, b)
            }
        }
    }

    /// Variables the order is declared over.
    pub fn vars(&self) -> BTreeSet<VarId> {
        match self {
            MonomialOrder::Lex(v) => v.iter().cloned().collect(),
            MonomialOrder::Weight { weights, tiebreak } => {
                tiebreak.iter().cloned().chain(weights.iter().flat_map(|w| w.keys().cloned())).collect()
            }
        }
    }
}

fn lex_cmp(vars: &[VarId], a: &Monomial, b: &Monomial) -> Ordering {
    for v in vars {
        match a.deg_in(v).cmp(&b.deg_in(v)) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    Ordering::Equal
}

/// Leading monomial in `active` variables and its coefficient over the remaining ones.
pub fn leading<C: Ring>(
    p: &Polynomial<C>,
    order: &MonomialOrder,
    active: &BTreeSet<VarId>,
) -> Result<(Monomial, Polynomial<C>)> {
    let grouped = p.group_by(active);
    grouped.into_iter().max_by(|(a, _), (b, _)| order.compare(a, b)).ok_or(Error::ZeroPolynomial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{Family, Poly};
    use num_traits::One;

    fn v(f: Family, i: u32) -> VarId {
        VarId::new(f, &[i])
    }

    #[test]
    fn lambda_lex_example() {
        let (l1, l2) = (v(Family::Lambda, 1), v(Family::Lambda, 2));
        let p = Poly::var(l1.clone()) * Poly::var(v(Family::X, 1)) + Poly::var(l2.clone()) * Poly::var(v(Family::X, 2));
        let order = MonomialOrder::lex([l1.clone(), l2.clone()]);
        let (lm, lc) = leading(&p, &order, &[l1.clone(), l2].into_iter().collect()).unwrap();
        assert_eq!(lm, Monomial::var(l1));
        assert_eq!(lc, Poly::var(v(Family::X, 1)));
    }

    #[test]
    fn lex_degree_example() {
        let (x1, x2) = (v(Family::X, 1), v(Family::X, 2));
        let p = Poly::var(x1.clone()).pow(2) + Poly::var(x1.clone()) * Poly::var(x2.clone()).pow(2);
        let order = MonomialOrder::lex([x1.clone(), x2.clone()]);
        let (lm, lc) = leading(&p, &order, &order.vars()).unwrap();
        assert_eq!(lm, Monomial::from_pairs([(x1, 2)]));
        assert!(lc.is_one());
    }

    #[test]
    fn zero_has_no_leading_term() {
        let order = MonomialOrder::lex([v(Family::X, 1)]);
        assert_eq!(leading(&Poly::default(), &order, &order.vars()), Err(Error::ZeroPolynomial));
    }
}
