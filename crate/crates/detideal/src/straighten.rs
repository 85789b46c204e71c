//! Expansion of bideterminants, change of basis into standard bideterminants,
//! and determinantal ideal membership.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::laurent::Laurent;
use crate::linalg::{inverse, rank};
use crate::poly::{det_poly, eps_from_json, eps_to_json, EpsScalar, Family, Monomial, Poly, VarId};
use crate::scalar::Rat;
use crate::tableaux::{enumerate_bitableaux, Bitableau};

/// Row and column degree vectors.
pub type Multidegree = (Vec<u32>, Vec<u32>);

/// Linear combination of bitableaux.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BidetExpr {
    terms: BTreeMap<Bitableau, EpsScalar>,
}

impl BidetExpr {
    pub fn terms(&self) -> &BTreeMap<Bitableau, EpsScalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, b: Bitableau, c: &EpsScalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(b.clone()).or_default();
        e.add_assign(c);
        if e.is_zero() {
            self.terms.remove(&b);
        }
    }

    /// Minimum shape width over the support.
    pub fn min_width(&self) -> Result<u32> {
        self.terms.keys().map(Bitableau::width).min().ok_or(Error::ZeroPolynomial)
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(b, c)| json!({"coef": eps_to_json(c), "S": b.s.to_json(), "T": b.t.to_json()}))
            .collect();
        json!({ "terms": terms })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let arr = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidInput("expression needs a \"terms\" array".into()))?;
        let mut out = BidetExpr::default();
        for t in arr {
            let c = eps_from_json(t.get("coef").ok_or_else(|| Error::InvalidInput("term without coef".into()))?)?;
            out.add_term(Bitableau::from_json(t)?, &c);
        }
        Ok(out)
    }
}

/// Matrix dimensions `(n, m)` spanned by the x-variables of `f`; other variables are rejected.
pub fn x_dims(f: &Poly) -> Result<(usize, usize)> {
    let (mut n, mut m) = (0, 0);
    for v in f.vars() {
        match (v.family, v.pair()) {
            (Family::X, Some((i, j))) if i >= 1 && j >= 1 => {
                n = n.max(i as usize);
                m = m.max(j as usize);
            }
            _ => return Err(Error::VariableMismatch(format!("{v} is not a matrix variable"))),
        }
    }
    Ok((n, m))
}

pub fn multidegree(mono: &Monomial, n: usize, m: usize) -> Multidegree {
    let (mut a, mut b) = (vec![0; n], vec![0; m]);
    for (v, e) in mono.iter() {
        let (i, j) = v.pair().expect("matrix variable");
        a[i as usize - 1] += e;
        b[j as usize - 1] += e;
    }
    (a, b)
}

/// All monomials in `x[i,j]` with row degrees `alpha` and column degrees `beta`.
pub fn contingency_monomials(alpha: &[u32], beta: &[u32]) -> Vec<Monomial> {
    fn rec(
        i: usize,
        j: usize,
        row: &mut Vec<u32>,
        col: &mut Vec<u32>,
        cur: &mut Vec<(VarId, u32)>,
        out: &mut Vec<Monomial>,
    ) {
        let (n, m) = (row.len(), col.len());
        if i == n {
            if col.iter().all(|&c| c == 0) {
                out.push(Monomial::from_pairs(cur.iter().cloned()));
            }
            return;
        }
        if j == m - 1 {
            let e = row[i];
            if e > col[j] {
                return;
            }
            col[j] -= e;
            row[i] = 0;
            if e > 0 {
                cur.push((VarId::x(i as u32 + 1, j as u32 + 1), e));
            }
            rec(i + 1, 0, row, col, cur, out);
            if e > 0 {
                cur.pop();
            }
            row[i] = e;
            col[j] += e;
            return;
        }
        for e in 0..=row[i].min(col[j]) {
            row[i] -= e;
            col[j] -= e;
            if e > 0 {
                cur.push((VarId::x(i as u32 + 1, j as u32 + 1), e));
            }
            rec(i, j + 1, row, col, cur, out);
            if e > 0 {
                cur.pop();
            }
            row[i] += e;
            col[j] += e;
        }
    }
    if alpha.iter().sum::<u32>() != beta.iter().sum::<u32>() {
        return Vec::new();
    }
    if alpha.is_empty() || beta.is_empty() {
        return if alpha.iter().sum::<u32>() == 0 { vec![Monomial::one()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    rec(0, 0, &mut alpha.to_vec(), &mut beta.to_vec(), &mut Vec::new(), &mut out);
    out
}

struct Component {
    basis: Vec<Bitableau>,
    index: HashMap<Monomial, usize>,
    /// Inverse of the expansion matrix (rows: monomials, columns: basis).
    inv: Vec<Vec<Rat>>,
}

/// Straightening with caches for minors and per-multidegree change-of-basis matrices.
#[derive(Default)]
pub struct Straightener {
    minors: HashMap<(Vec<u32>, Vec<u32>), Poly>,
    components: HashMap<Multidegree, Rc<Component>>,
}

impl Straightener {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn minor(&mut self, rows: &[u32], cols: &[u32]) -> Poly {
        let key = (rows.to_vec(), cols.to_vec());
        if let Some(p) = self.minors.get(&key) {
            return p.clone();
        }
        let sub: Vec<Vec<Poly>> = rows.iter().map(|&i| cols.iter().map(|&j| Poly::x(i, j)).collect()).collect();
        let p = det_poly(&sub);
        self.minors.insert(key, p.clone());
        p
    }

    /// Product of the row minors of `b`.
    pub fn expand(&mut self, b: &Bitableau, n: usize, m: usize) -> Result<Poly> {
        if b.s.max_entry() as usize > n || b.t.max_entry() as usize > m {
            return Err(Error::EntryOutOfBounds(format!("bitableau entries exceed {n}×{m}")));
        }
        let mut acc = Poly::from_int(1);
        for (r, c) in b.s.rows().iter().zip(b.t.rows()) {
            acc = acc.mul_ref(&self.minor(r, c));
        }
        Ok(acc)
    }

    fn component(&mut self, alpha: &[u32], beta: &[u32]) -> Result<Rc<Component>> {
        let key = (alpha.to_vec(), beta.to_vec());
        if let Some(c) = self.components.get(&key) {
            return Ok(c.clone());
        }
        let basis = enumerate_bitableaux(alpha, beta);
        let monos = contingency_monomials(alpha, beta);
        if basis.len() != monos.len() {
            return Err(Error::VerificationFailed(format!(
                "{} standard bitableaux but {} monomials in component {alpha:?}⊕{beta:?}",
                basis.len(),
                monos.len()
            )));
        }
        let index: HashMap<Monomial, usize> = monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let k = basis.len();
        let mut mat = vec![vec![Rat::zero(); k]; k];
        for (col, b) in basis.iter().enumerate() {
            for (mono, c) in self.expand(b, alpha.len(), beta.len())?.iter() {
                mat[index[mono]][col] = c.constant_term();
            }
        }
        let inv =
            inverse(&mat).ok_or_else(|| Error::VerificationFailed("standard bideterminants are dependent".into()))?;
        let comp = Rc::new(Component { basis, index, inv });
        self.components.insert(key, comp.clone());
        Ok(comp)
    }

    /// The unique expansion of `f` over standard bitableaux.
    pub fn straighten(&mut self, f: &Poly) -> Result<BidetExpr> {
        let (n, m) = x_dims(f)?;
        let mut by_deg: BTreeMap<Multidegree, Vec<(&Monomial, &EpsScalar)>> = BTreeMap::new();
        for (mono, c) in f.iter() {
            by_deg.entry(multidegree(mono, n, m)).or_default().push((mono, c));
        }
        let mut out = BidetExpr::default();
        for ((alpha, beta), terms) in by_deg {
            let comp = self.component(&alpha, &beta)?;
            let exps: BTreeSet<i64> = terms.iter().flat_map(|(_, c)| c.iter().map(|(e, _)| e)).collect();
            let k = comp.basis.len();
            let mut coefs = vec![EpsScalar::zero(); k];
            for e in exps {
                let mut rhs = vec![Rat::zero(); k];
                for (mono, c) in &terms {
                    rhs[comp.index[*mono]] = c.coeff(e);
                }
                for (a, row) in coefs.iter_mut().zip(&comp.inv) {
                    let v =
                        row.iter().zip(&rhs).filter(|(_, y)| !y.is_zero()).fold(Rat::zero(), |acc, (x, y)| acc + x * y);
                    a.add_term(e, &v);
                }
            }
            for (b, c) in comp.basis.iter().zip(coefs) {
                out.add_term(b.clone(), &c);
            }
        }
        Ok(out)
    }

    /// Recombines an expression into a polynomial over an `n×m` matrix.
    pub fn expand_expr(&mut self, e: &BidetExpr, n: usize, m: usize) -> Result<Poly> {
        let mut out = Poly::zero();
        for (b, c) in e.terms() {
            out.add_assign(&self.expand(b, n, m)?.scale(c));
        }
        Ok(out)
    }
}

pub fn expand_bideterminant(b: &Bitableau, n: usize, m: usize) -> Result<Poly> {
    Straightener::new().expand(b, n, m)
}

pub fn straighten(f: &Poly) -> Result<BidetExpr> {
    Straightener::new().straighten(f)
}

/// Membership in the ideal of `r×r` minors via the width of the standard expansion.
/// The zero polynomial lies in every ideal.
pub fn is_in_det_ideal(f: &Poly, r: u32) -> Result<bool> {
    if f.is_zero() {
        return Ok(true);
    }
    Ok(straighten(f)?.min_width()? >= r)
}

/// Independent membership test: per multidegree component, is `f` in the span of
/// `monomial · minor` products of that multidegree? Exact because the ideal is
/// generated by multihomogeneous elements.
pub fn brute_force_membership(f: &Poly, r: u32, degree_bound: u32) -> Result<bool> {
    let deg = f.degree().unwrap_or(0);
    if deg > degree_bound {
        return Err(Error::DegreeBoundExceeded { degree: deg, bound: degree_bound });
    }
    let (n, m) = x_dims(f)?;
    let mut st = Straightener::new();
    let mut by_deg: BTreeMap<Multidegree, Poly> = BTreeMap::new();
    for (mono, c) in f.iter() {
        by_deg.entry(multidegree(mono, n, m)).or_default().add_term(mono.clone(), c);
    }
    for ((alpha, beta), part) in by_deg {
        let monos = contingency_monomials(&alpha, &beta);
        let index: HashMap<&Monomial, usize> = monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut gens: Vec<Vec<Rat>> = Vec::new();
        for rows in subsets(n as u32, r) {
            if rows.iter().any(|&i| alpha[i as usize - 1] == 0) {
                continue;
            }
            for cols in subsets(m as u32, r) {
                if cols.iter().any(|&j| beta[j as usize - 1] == 0) {
                    continue;
                }
                let mut a2 = alpha.clone();
                let mut b2 = beta.clone();
                rows.iter().for_each(|&i| a2[i as usize - 1] -= 1);
                cols.iter().for_each(|&j| b2[j as usize - 1] -= 1);
                let minor = st.minor(&rows, &cols);
                for mono in contingency_monomials(&a2, &b2) {
                    let mut v = vec![Rat::zero(); monos.len()];
                    for (mm, c) in minor.mul_monomial(&mono).iter() {
                        v[index[mm]] = c.constant_term();
                    }
                    gens.push(v);
                }
            }
        }
        let base = rank(&gens);
        let exps: BTreeSet<i64> = part.iter().flat_map(|(_, c)| c.iter().map(|(e, _)| e)).collect();
        for e in exps {
            let mut v = vec![Rat::zero(); monos.len()];
            for (mm, c) in part.iter() {
                v[index[mm]] = c.coeff(e);
            }
            let mut with = gens.clone();
            with.push(v);
            if rank(&with) > base {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Increasing `k`-subsets of `1..=n`.
pub fn subsets(n: u32, k: u32) -> Vec<Vec<u32>> {
    fn rec(start: u32, n: u32, k: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() as u32 == k {
            out.push(cur.clone());
            return;
        }
        for v in start..=n {
            if n - v + 1 < k - cur.len() as u32 {
                break;
            }
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, k, &mut Vec::new(), &mut out);
    out
}

/// ε-free expression coefficients as rationals, for integrality checks.
pub fn rational_coefficients(e: &BidetExpr) -> Option<Vec<Rat>> {
    e.terms().values().map(|c| c.is_constant().then(|| c.constant_term())).collect()
}

pub fn eps_coef(q: Rat) -> EpsScalar {
    Laurent::constant(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::generic_matrix;
    use crate::scalar::rat;
    use crate::tableaux::Tableau;

    fn bt(s: &[&[u32]], t: &[&[u32]]) -> Bitableau {
        let tab = |r: &[&[u32]]| Tableau::new(r.iter().map(|x| x.to_vec()).collect()).unwrap();
        Bitableau::new(tab(s), tab(t)).unwrap()
    }

    fn det2() -> Poly {
        det_poly(&generic_matrix(2, 2))
    }

    #[test]
    fn expansion_examples() {
        let single_col = bt(&[&[1], &[2], &[2]], &[&[3], &[1], &[2]]);
        assert_eq!(expand_bideterminant(&single_col, 2, 3).unwrap(), Poly::x(1, 3) * Poly::x(2, 1) * Poly::x(2, 2));
        assert_eq!(expand_bideterminant(&bt(&[&[1, 2]], &[&[1, 2]]), 2, 2).unwrap(), det2());
        let big = bt(&[&[1, 2, 3], &[1, 2], &[4]], &[&[1, 2, 4], &[2, 3], &[3]]);
        let mut st = Straightener::new();
        let expect = st.minor(&[1, 2, 3], &[1, 2, 4]) * st.minor(&[1, 2], &[2, 3]) * Poly::x(4, 3);
        assert_eq!(expand_bideterminant(&big, 4, 4).unwrap(), expect);
        assert!(matches!(expand_bideterminant(&big, 3, 4), Err(Error::EntryOutOfBounds(_))));
    }

    #[test]
    fn straighten_examples() {
        let e = straighten(&det2()).unwrap();
        assert_eq!(e.terms().len(), 1);
        assert_eq!(e.terms()[&bt(&[&[1, 2]], &[&[1, 2]])], eps_coef(rat(1)));

        let e = straighten(&(Poly::x(1, 2) * Poly::x(2, 1))).unwrap();
        assert_eq!(e.terms().len(), 2);
        assert_eq!(e.terms()[&bt(&[&[1], &[2]], &[&[1], &[2]])], eps_coef(rat(1)));
        assert_eq!(e.terms()[&bt(&[&[1, 2]], &[&[1, 2]])], eps_coef(rat(-1)));
    }

    #[test]
    fn membership_examples() {
        assert!(is_in_det_ideal(&det2(), 2).unwrap());
        assert!(!is_in_det_ideal(&Poly::x(1, 1), 2).unwrap());
        let f = Poly::x(1, 1) * det2();
        assert!(is_in_det_ideal(&f, 2).unwrap());
        assert!(brute_force_membership(&f, 2, 3).unwrap());
        assert!(brute_force_membership(&det2(), 2, 2).unwrap());
        assert!(!brute_force_membership(&Poly::from_int(1), 1, 2).unwrap());
        assert!(!brute_force_membership(&Poly::x(1, 1), 2, 2).unwrap());
        assert_eq!(brute_force_membership(&f, 2, 2), Err(Error::DegreeBoundExceeded { degree: 3, bound: 2 }));
        assert!(is_in_det_ideal(&Poly::zero(), 3).unwrap());
        assert_eq!(straighten(&Poly::zero()).unwrap().min_width(), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn eps_slices_pass_through() {
        let f = det2().shift_eps(-2) + (Poly::x(1, 2) * Poly::x(2, 1)).shift_eps(3);
        let mut st = Straightener::new();
        let e = st.straighten(&f).unwrap();
        assert_eq!(st.expand_expr(&e, 2, 2).unwrap(), f);
        assert_eq!(BidetExpr::from_json(&e.to_json()).unwrap(), e);
    }

    #[test]
    fn contingency_counts() {
        // 2×2 tables with margins (1,1),(1,1): two of them
        assert_eq!(contingency_monomials(&[1, 1], &[1, 1]).len(), 2);
        assert_eq!(contingency_monomials(&[2, 1], &[1, 1, 1]).len(), 3);
        assert_eq!(subsets(4, 2).len(), 6);
    }
}
