//! Hasse derivatives and dimensions of partial-derivative spaces.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{det, rank};
use crate::poly::{EpsScalar, Monomial, Poly, VarId};
use crate::scalar::Rat;
use crate::straighten::{expand_bideterminant, multidegree, subsets, Multidegree};
use crate::tableaux::Bitableau;

/// Exponent vector of a Hasse derivative, stored as a monomial `x^a`.
pub type DerivIndex = Monomial;

/// `∂^a f`: each `x^b` with `b ≥ a` maps to `Π binom(b_i, a_i) x^{b−a}`.
pub fn hasse(f: &Poly, a: &DerivIndex) -> Poly {
    let mut out = Poly::zero();
    for (mono, c) in f.iter() {
        let Some(rest) = mono.div(a) else { continue };
        let factor = a.iter().fold(num_bigint::BigInt::from(1), |acc, (v, k)| {
            acc * crate::scalar::binomial(mono.deg_in(v) as u64, k as u64)
        });
        out.add_term(rest, &c.scale(&Rat::from_integer(factor)));
    }
    out
}

/// Every divisor of a support monomial of total degree `≤ order`; all other
/// derivatives vanish.
pub fn derivative_indices(f: &Poly, order: Option<u32>) -> BTreeSet<DerivIndex> {
    fn divisors(
        pairs: &[(VarId, u32)],
        k: usize,
        budget: u32,
        cur: &mut Vec<(VarId, u32)>,
        out: &mut BTreeSet<Monomial>,
    ) {
        if k == pairs.len() {
            out.insert(Monomial::from_pairs(cur.iter().cloned()));
            return;
        }
        let (v, e) = &pairs[k];
        for t in 0..=(*e).min(budget) {
            if t > 0 {
                cur.push((v.clone(), t));
            }
            divisors(pairs, k + 1, budget - t, cur, out);
            if t > 0 {
                cur.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    for mono in f.terms().keys() {
        let pairs: Vec<(VarId, u32)> = mono.iter().map(|(v, e)| (v.clone(), e)).collect();
        divisors(&pairs, 0, order.unwrap_or(u32::MAX), &mut Vec::new(), &mut out);
    }
    out
}

/// Rank over Q(ε) of a family of polynomials.
pub fn span_dim(polys: &[Poly]) -> usize {
    let monos: BTreeSet<&Monomial> = polys.iter().flat_map(|p| p.terms().keys()).collect();
    let index: BTreeMap<&Monomial, usize> = monos.into_iter().enumerate().map(|(i, m)| (m, i)).collect();
    if polys.iter().all(Poly::is_eps_free) {
        let rows: Vec<Vec<Rat>> = polys
            .iter()
            .map(|p| {
                let mut v = vec![Rat::zero(); index.len()];
                p.iter().for_each(|(m, c)| v[index[m]] = c.constant_term());
                v
            })
            .collect();
        return rank(&rows);
    }
    let rows: Vec<Vec<EpsScalar>> = polys
        .iter()
        .map(|p| {
            let mut v = vec![EpsScalar::zero(); index.len()];
            p.iter().for_each(|(m, c)| v[index[m]] = c.clone());
            v
        })
        .collect();
    rank(&rows)
}

/// `dim span{∂^a f : |a| ≤ order}`, with `None` meaning all orders.
pub fn deriv_space_dim(f: &Poly, order: Option<u32>) -> Result<usize> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let derivs: Vec<Poly> = derivative_indices(f, order).iter().map(|a| hasse(f, a)).collect();
    Ok(span_dim(&derivs))
}

/// Per-order comparison of `dim ∂≤d f` and `dim ∂≤d f(Ax)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimReport {
    pub invertible: bool,
    /// `(d, dim before, dim after)` for `d = 0..=deg f`.
    pub orders: Vec<(u32, usize, usize)>,
    /// Equality when invertible, `≤` otherwise.
    pub holds: bool,
}

impl DimReport {
    pub fn to_json(&self) -> Value {
        json!({
            "invertible": self.invertible,
            "holds": self.holds,
            "orders": self.orders.iter().map(|(d, a, b)| json!({"order": d, "before": a, "after": b})).collect::<Vec<_>>(),
        })
    }
}

/// Applies `x_i ↦ Σ_j A_ij x_j` over `vars` and compares derivative dimensions.
pub fn dim_under_substitution(f: &Poly, vars: &[VarId], a: &[Vec<EpsScalar>]) -> Result<DimReport> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if a.len() != vars.len() || a.iter().any(|r| r.len() != vars.len()) {
        return Err(Error::InvalidInput("matrix must be square over the listed variables".into()));
    }
    if let Some(v) = f.vars().into_iter().find(|v| !vars.contains(v)) {
        return Err(Error::VariableMismatch(format!("{v} is not among the transformed variables")));
    }
    let assign: BTreeMap<VarId, Poly> = vars
        .iter()
        .zip(a)
        .map(|(v, row)| {
            let form = vars.iter().zip(row).fold(Poly::zero(), |acc, (w, c)| acc + Poly::var(w.clone()).scale(c));
            (v.clone(), form)
        })
        .collect();
    let g = f.substitute(&assign);
    let invertible = !det(a).is_zero();
    let mut orders = Vec::new();
    let mut holds = true;
    for d in 0..=f.degree().unwrap_or(0) {
        let before = deriv_space_dim(f, Some(d))?;
        let after = if g.is_zero() { 0 } else { deriv_space_dim(&g, Some(d))? };
        holds &= if invertible { before == after } else { after <= before };
        orders.push((d, before, after));
    }
    Ok(DimReport { invertible, orders, holds })
}

/// Derivatives `Π_{k} ∂/∂x_{r_k,c_k}` of `(S|T)` for equal-size subsets `R`, `C`
/// of the first rows, pairing the sorted elements. Returns each with its multidegree.
pub fn row_subset_derivatives(b: &Bitableau, n: usize, m: usize) -> Result<Vec<(Poly, Multidegree)>> {
    let f = expand_bideterminant(b, n, m)?;
    let (s1, t1) = match (b.s.rows().first(), b.t.rows().first()) {
        (Some(s), Some(t)) => (s.clone(), t.clone()),
        _ => return Ok(vec![(f.clone(), (vec![0; n], vec![0; m]))]),
    };
    let w = s1.len() as u32;
    let mut out = Vec::new();
    for l in 0..=w {
        for rs in subsets(w, l) {
            for cs in subsets(w, l) {
                let a = Monomial::from_pairs(
                    rs.iter().zip(&cs).map(|(&i, &j)| (VarId::x(s1[i as usize - 1], t1[j as usize - 1]), 1)),
                );
                let d = hasse(&f, &a);
                let md = d.terms().keys().next().map_or((vec![0; n], vec![0; m]), |mono| multidegree(mono, n, m));
                out.push((d, md));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{det_poly, generic_matrix, Family};
    use crate::scalar::{rat, rat_frac};

    fn x(i: u32) -> Poly {
        Poly::var(VarId::new(Family::X, &[i]))
    }

    #[test]
    fn hasse_examples() {
        let a = Monomial::from_pairs([(VarId::new(Family::X, &[1]), 2)]);
        assert_eq!(hasse(&x(1).pow(3), &a), x(1).scale_rat(&rat(3)));
        let f = x(1).pow(2) * x(2) + x(2).pow(3);
        assert_eq!(hasse(&f, &Monomial::one()), f);
        let b = Monomial::var(VarId::new(Family::X, &[2]));
        assert_eq!(hasse(&hasse(&f, &a), &b), hasse(&hasse(&f, &b), &a));
    }

    #[test]
    fn determinant_dimensions() {
        let d2 = det_poly(&generic_matrix(2, 2));
        assert_eq!(deriv_space_dim(&d2, None).unwrap(), 6);
        assert_eq!(deriv_space_dim(&d2, Some(1)).unwrap(), 5);
        assert_eq!(deriv_space_dim(&det_poly(&generic_matrix(3, 3)), None).unwrap(), 20);
        assert_eq!(deriv_space_dim(&Poly::zero(), None), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn rank_is_over_the_rational_function_field() {
        // x + εy: derivatives x + εy, 1, ε span a 2-dimensional Q(ε)-space
        let f = x(1) + x(2).shift_eps(1);
        assert_eq!(deriv_space_dim(&f, None).unwrap(), 2);
    }

    #[test]
    fn substitution_report() {
        let d2 = det_poly(&generic_matrix(2, 2));
        let vars: Vec<VarId> = d2.vars().into_iter().collect();
        let ident: Vec<Vec<EpsScalar>> =
            (0..4).map(|i| (0..4).map(|j| EpsScalar::constant(rat((i == j) as i64))).collect()).collect();
        assert!(dim_under_substitution(&d2, &vars, &ident).unwrap().holds);
        let mut sing = ident.clone();
        sing[3] = sing[2].clone();
        let rep = dim_under_substitution(&d2, &vars, &sing).unwrap();
        assert!(!rep.invertible && rep.holds);
        let mut mixed = ident;
        mixed[0][1] = EpsScalar::constant(rat_frac(1, 2));
        mixed[2][3] = EpsScalar::eps_pow(-1);
        let rep = dim_under_substitution(&d2, &vars, &mixed).unwrap();
        assert!(rep.invertible && rep.holds);
    }

    #[test]
    fn first_row_derivatives_are_nonzero_and_separated() {
        let b = Bitableau::new(
            crate::tableaux::Tableau::new(vec![vec![1, 2], vec![1]]).unwrap(),
            crate::tableaux::Tableau::new(vec![vec![1, 3], vec![2]]).unwrap(),
        )
        .unwrap();
        let ds = row_subset_derivatives(&b, 2, 3).unwrap();
        assert_eq!(ds.len(), 6);
        assert!(ds.iter().all(|(d, _)| !d.is_zero()));
        let mds: BTreeSet<_> = ds.iter().map(|(_, m)| m.clone()).collect();
        assert_eq!(mds.len(), ds.len());
    }
}
