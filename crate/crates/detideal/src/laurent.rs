//! Laurent polynomials in a single parameter ε.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::scalar::{Domain, Ring};

/// Finitely supported Laurent polynomial `Σ c_e ε^e`; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Laurent<T> {
    terms: BTreeMap<i64, T>,
}

fn exp_add(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("epsilon exponent overflow")
}

impl<T: Ring> Laurent<T> {
    pub fn constant(c: T) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: T, e: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Self { terms }
    }

    /// ε^e
    pub fn eps_pow(e: i64) -> Self {
        Self::monomial(T::one(), e)
    }

    pub fn from_terms(it: impl IntoIterator<Item = (i64, T)>) -> Self {
        let mut out = Self::zero();
        for (e, c) in it {
            out.add_term(e, &c);
        }
        out
    }

    pub fn terms(&self) -> &BTreeMap<i64, T> {
        &self.terms
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &T)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn order(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn coeff(&self, e: i64) -> T {
        self.terms.get(&e).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|&e| e == 0)
    }

    /// The ε⁰ coefficient.
    pub fn constant_term(&self) -> T {
        self.coeff(0)
    }

    /// The single coefficient of a monomial `c ε^e`.
    pub fn as_monomial(&self) -> Option<(i64, &T)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(e, c)| (*e, c))
        } else {
            None
        }
    }

    pub fn add_term(&mut self, e: i64, c: &T) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                v.add_assign_ref(c);
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c.clone());
            }
        }
    }

    pub fn add_assign(&mut self, rhs: &Self) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c);
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, v)| (*e, v.mul_ref(c))))
    }

    /// Multiplication by ε^k.
    pub fn shift(&self, k: i64) -> Self {
        Self { terms: self.terms.iter().map(|(e, c)| (exp_add(*e, k), c.clone())).collect() }
    }

    /// The substitution ε ↦ ε^n for n ≥ 1.
    pub fn scale_exponents(&self, n: i64) -> Self {
        assert!(n >= 1, "exponent scale must be positive");
        Self {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.checked_mul(n).expect("epsilon exponent overflow"), c.clone()))
                .collect(),
        }
    }

    /// Drops every term with exponent above `cap`.
    pub fn truncate_above(&mut self, cap: i64) {
        self.terms.retain(|e, _| *e <= cap);
    }

    /// Product restricted to exponents `≤ cap`.
    pub fn mul_capped(&self, rhs: &Self, cap: i64) -> Self {
        let mut out = Self::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = exp_add(*ea, *eb);
                if e > cap {
                    break;
                }
                out.add_term(e, &ca.mul_ref(cb));
            }
        }
        out
    }

    pub fn mul_ref(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(exp_add(*ea, *eb), &ca.mul_ref(cb));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul_ref(self);
        }
        acc
    }

    pub fn map_coeffs<U: Ring>(&self, f: impl Fn(&T) -> U) -> Laurent<U> {
        Laurent::from_terms(self.terms.iter().map(|(e, c)| (*e, f(c))))
    }
}

impl<T: Ring> Zero for Laurent<T> {
    fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<T: Ring> One for Laurent<T> {
    fn one() -> Self {
        Self::constant(T::one())
    }
}

impl<T: Ring> Add for Laurent<T> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self.add_assign(&rhs);
        self
    }
}

impl<T: Ring> Sub for Laurent<T> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (e, c) in rhs.terms {
            self.add_term(e, &-c);
        }
        self
    }
}

impl<T: Ring> Mul for Laurent<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.mul_ref(&rhs)
    }
}

impl<T: Ring> Neg for Laurent<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect() }
    }
}

impl<T: Ring> Ring for Laurent<T> {
    fn add_ref(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, &-c.clone());
        }
        out
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        Laurent::mul_ref(self, rhs)
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        self.add_assign(rhs);
    }
}

impl<T: Domain> Domain for Laurent<T> {
    /// Long division from the lowest term; quotient exponents lie in
    /// `[ord(a) − ord(b), max(a) − max(b)]`, which bounds the loop.
    fn exact_div(&self, rhs: &Self) -> Option<Self> {
        let (lo_b, lc_b) = rhs.terms.iter().next().map(|(e, c)| (*e, c.clone()))?;
        if self.is_zero() {
            return Some(Self::zero());
        }
        let hi_q = self.max_exponent()? - rhs.max_exponent()?;
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some((e, c)) = rem.terms.iter().next().map(|(e, c)| (*e, c.clone())) {
            let qe = e - lo_b;
            if qe > hi_q {
                return None;
            }
            let qc = c.exact_div(&lc_b)?;
            for (eb, cb) in &rhs.terms {
                rem.add_term(exp_add(*eb, qe), &-(cb.mul_ref(&qc)));
            }
            quot.add_term(qe, &qc);
        }
        Some(quot)
    }
}

impl<T: Ring + fmt::Display> fmt::Display for Laurent<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| match e {
                0 => format!("{c}"),
                1 => format!("({c})ε"),
                _ => format!("({c})ε^{e}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<T: Ring> fmt::Debug for Laurent<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rat};

    type L = Laurent<Rat>;

    fn l(terms: &[(i64, i64)]) -> L {
        L::from_terms(terms.iter().map(|&(e, c)| (e, rat(c))))
    }

    #[test]
    fn merge_and_cancel() {
        let a = l(&[(1, 1)]) + l(&[(-1, 1)]);
        assert_eq!(a.order(), Some(-1));
        assert!((a.clone() - a).is_zero());
    }

    #[test]
    fn exact_division_round_trips() {
        let a = l(&[(-2, 3), (0, 1), (5, -4)]);
        let b = l(&[(1, 2), (3, 1)]);
        let p = a.mul_ref(&b);
        assert_eq!(p.exact_div(&b), Some(a));
        assert_eq!(l(&[(0, 1)]).exact_div(&l(&[(0, 1), (1, 1)])), None);
    }

    #[test]
    fn capped_product_matches_truncation() {
        let a = l(&[(-3, 1), (0, 2), (4, 1)]);
        let b = l(&[(-1, 5), (2, -1)]);
        let mut full = a.mul_ref(&b);
        full.truncate_above(1);
        assert_eq!(a.mul_capped(&b, 1), full);
    }
}
