//! Newton-polytope degenerations, the row/column transforms, and the reduction
//! of an ideal element to a single bideterminant.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::laurent::Laurent;
use crate::linalg::det;
use crate::poly::{
    eps_to_json, identity_matrix, mat_mul, matrix_assignment, poly_to_json, transpose, EpsScalar, Family, Monomial,
    Poly, PolyMatrix, VarId,
};
use crate::scalar::{format_rat, Rat};
use crate::straighten::{is_in_det_ideal, multidegree, straighten, x_dims, Straightener};
use crate::tableaux::{k_tableau, Bitableau, Partition};

/// Default cap on intermediate term counts.
pub const DEFAULT_BUDGET: usize = 1 << 22;

/// `ε^λ f(ε^{-u_1} x_1, …)` and `λ = max ⟨a, u⟩` over the support.
pub fn single_degenerate(f: &Poly, u: &BTreeMap<VarId, i64>) -> Result<(Poly, i64)> {
    let dot = |m: &Monomial| -> Result<i64> {
        m.iter().try_fold(0i64, |acc, (v, e)| {
            let w = u.get(v).copied().unwrap_or(0);
            w.checked_mul(e as i64).and_then(|t| acc.checked_add(t)).ok_or(Error::ExponentOverflow)
        })
    };
    let mut lambda = None;
    for m in f.terms().keys() {
        let d = dot(m)?;
        lambda = Some(lambda.map_or(d, |l: i64| l.max(d)));
    }
    let lambda = lambda.ok_or(Error::ZeroPolynomial)?;
    let mut out = Poly::zero();
    for (m, c) in f.iter() {
        let shift = lambda.checked_sub(dot(m)?).ok_or(Error::ExponentOverflow)?;
        out.add_term(m.clone(), &c.shift(shift));
    }
    Ok((out, lambda))
}

/// Assignment of active variables to ε-powers with `f ↦ ε^m · LC(f) + O(ε^{m+1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexDegeneration {
    pub exponents: BTreeMap<VarId, i64>,
    pub m: i64,
}

impl LexDegeneration {
    pub fn apply(&self, f: &Poly) -> Poly {
        self.exponents.iter().fold(f.clone(), |p, (v, d)| p.subst_eps_power(v, *d))
    }
}

/// Positional weights for a lex order: `w_v = Π_{u after v} (B_u + 1)`.
pub fn positional_weights(vars: &[VarId], bounds: &[u64]) -> Result<Vec<i64>> {
    let mut w = vec![0i64; vars.len()];
    let mut acc: i64 = 1;
    for k in (0..vars.len()).rev() {
        w[k] = acc;
        let b = i64::try_from(bounds[k]).map_err(|_| Error::ExponentOverflow)?;
        acc = acc.checked_mul(b + 1).ok_or(Error::ExponentOverflow)?;
    }
    Ok(w)
}

/// One-shot realization: `v ↦ ε^{-w_v}` with positional weights built from the
/// actual degrees of `f`, so the lex-leading monomial has the unique lowest order.
pub fn lex_degenerate_positional(f: &Poly, vars: &[VarId]) -> Result<LexDegeneration> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let bounds: Vec<u64> = vars.iter().map(|v| f.deg_in(v) as u64).collect();
    let w = positional_weights(vars, &bounds)?;
    let lm = f.terms().keys().map(|m| vars.iter().map(|v| m.deg_in(v)).collect::<Vec<u32>>()).max().expect("nonzero");
    let dot = dot_i64(&w, &lm)?;
    Ok(LexDegeneration { exponents: vars.iter().cloned().zip(w.iter().map(|x| -x)).collect(), m: -dot })
}

fn dot_i64(w: &[i64], a: &[u32]) -> Result<i64> {
    w.iter().zip(a).try_fold(0i64, |acc, (x, &e)| {
        x.checked_mul(e as i64).and_then(|t| acc.checked_add(t)).ok_or(Error::ExponentOverflow)
    })
}

/// Iterated single degenerations with the exact `δ ↦ ε, ε ↦ ε^{M+1}` rescaling
/// after each stage. `f` must be ε-free.
pub fn lex_degenerate_multistage(f: &Poly, vars: &[VarId]) -> Result<LexDegeneration> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    // invariant: p = ε^s f(ε^{d} x) and p ∈ face + ε·Q[ε][x]
    let mut p = f.clone();
    let mut d: BTreeMap<VarId, i64> = vars.iter().map(|v| (v.clone(), 0)).collect();
    let mut s: i64 = 0;
    for v in vars {
        let face = p.eps_slice(0);
        let lambda = face.deg_in(v) as i64;
        let mut big_m: i64 = 0;
        for (mono, c) in p.iter() {
            if c.order().is_some_and(|a| a >= 1) {
                big_m = big_m.max(mono.deg_in(v) as i64 - lambda);
            }
        }
        let scale = big_m.checked_add(1).ok_or(Error::ExponentOverflow)?;
        let mut next = Poly::zero();
        for (mono, c) in p.iter() {
            let shift = lambda - mono.deg_in(v) as i64;
            next.add_term(mono.clone(), &c.scale_exponents(scale).shift(shift));
        }
        p = next;
        for (w, dw) in d.iter_mut() {
            *dw = dw.checked_mul(scale).ok_or(Error::ExponentOverflow)?;
            if w == v {
                *dw -= 1;
            }
        }
        s = s.checked_mul(scale).and_then(|x| x.checked_add(lambda)).ok_or(Error::ExponentOverflow)?;
        debug_assert!(p.eps_order() == Some(0));
    }
    Ok(LexDegeneration { exponents: d, m: -s })
}

pub fn lambda_var(i: u32, j: u32) -> VarId {
    VarId::new(Family::Lambda, &[i, j])
}

pub fn xi_var(i: u32, j: u32) -> VarId {
    VarId::new(Family::Xi, &[i, j])
}

pub fn y_var() -> VarId {
    VarId::new(Family::Y, &[])
}

pub fn z_var() -> VarId {
    VarId::new(Family::Z, &[])
}

/// Index pairs `(1,2), (1,3), …, (n−1,n)`.
pub fn pair_order(n: usize) -> Vec<(u32, u32)> {
    let n = n as u32;
    (1..n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect()
}

/// Anti-diagonal permutation matrix.
pub fn anti_identity(n: usize) -> PolyMatrix {
    (0..n).map(|i| (0..n).map(|j| if i + j == n - 1 { Poly::one() } else { Poly::zero() }).collect()).collect()
}

fn elementary(n: usize, i: u32, j: u32, v: VarId) -> PolyMatrix {
    let mut e = identity_matrix(n);
    e[i as usize - 1][j as usize - 1] = Poly::var(v);
    e
}

fn transform(n: usize, var: fn(u32, u32) -> VarId) -> PolyMatrix {
    let mut m = identity_matrix(n);
    for (i, j) in pair_order(n) {
        m = mat_mul(&m, &elementary(n, i, j, var(i, j)));
    }
    mat_mul(&m, &anti_identity(n))
}

/// `E_{1,2}(λ_{1,2}) E_{1,3}(λ_{1,3}) ⋯ E_{n−1,n}(λ_{n−1,n}) J_n`.
pub fn row_transform(n: usize) -> PolyMatrix {
    transform(n, lambda_var)
}

/// Transpose of the row construction in the ξ variables, so right multiplication
/// acts on column tableaux through the same substitution operators.
pub fn col_transform(m: usize) -> PolyMatrix {
    transpose(&transform(m, xi_var))
}

/// Top-degree part in `v`: the coefficient and the degree.
pub fn top_coeff(p: &Poly, v: &VarId) -> (Poly, u32) {
    let d = p.deg_in(v);
    let mut out = Poly::zero();
    for (m, c) in p.iter() {
        if m.deg_in(v) == d {
            let rest = Monomial::from_pairs(m.iter().filter(|(w, _)| *w != v).map(|(w, e)| (w.clone(), e)));
            out.add_term(rest, c);
        }
    }
    (out, d)
}

/// Invertible linear substitution `x[i,j] ↦ forms[i][j]`, with the determinant
/// of its coefficient matrix as witness.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSubst {
    pub forms: PolyMatrix,
    pub det: EpsScalar,
}

impl LinearSubst {
    /// Builds the substitution and checks invertibility over Q(ε).
    pub fn new(forms: PolyMatrix) -> Result<Self> {
        let n = forms.len();
        let m = forms.first().map_or(0, Vec::len);
        let mut coef = vec![vec![EpsScalar::zero(); n * m]; n * m];
        for (i, row) in forms.iter().enumerate() {
            for (j, form) in row.iter().enumerate() {
                for (mono, c) in form.iter() {
                    let (k, l) = match mono.iter().collect::<Vec<_>>().as_slice() {
                        [(v, 1)] if v.family == Family::X => v.pair().expect("matrix variable"),
                        _ => return Err(Error::VerificationFailed(format!("form {i},{j} is not linear in X"))),
                    };
                    coef[i * m + j][(k as usize - 1) * m + (l as usize - 1)] = c.clone();
                }
            }
        }
        let d = det(&coef);
        if d.is_zero() {
            return Err(Error::VerificationFailed("substitution is singular".into()));
        }
        Ok(Self { forms, det: d })
    }

    pub fn assignment(&self) -> BTreeMap<VarId, Poly> {
        matrix_assignment(&self.forms)
    }

    pub fn to_json(&self) -> Value {
        let forms: Vec<Vec<Value>> = self.forms.iter().map(|r| r.iter().map(poly_to_json).collect()).collect();
        json!({"forms": forms, "det": eps_to_json(&self.det)})
    }
}

/// Output of the reduction: `f(forms) = ε^q α (K_σ|K_σ) + O(ε^{q+1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReductionResult {
    pub subst: LinearSubst,
    pub q: i64,
    pub alpha: Rat,
    pub sigma: Partition,
    /// ε-power assigned to each auxiliary variable, in priority order.
    pub exponents: Vec<(VarId, i64)>,
}

impl ReductionResult {
    pub fn bideterminant(&self) -> Bitableau {
        let k = k_tableau(&self.sigma);
        Bitableau { s: k.clone(), t: k }
    }

    pub fn to_json(&self, slice: &Poly) -> Value {
        json!({
            "q": self.q,
            "alpha": format_rat(&self.alpha),
            "sigma": self.sigma.parts(),
            "subst": self.subst.to_json(),
            "exponents": self.exponents.iter().map(|(v, e)| json!([v.to_string(), e])).collect::<Vec<_>>(),
            "slice": poly_to_json(slice),
        })
    }
}

/// Largest-first comparison of content vectors, last coordinate most significant.
pub fn positional_key(v: &[u32]) -> Vec<u32> {
    v.iter().rev().copied().collect()
}

/// Checks that `p` is a nonzero rational multiple of `(K_σ|K_σ)` for the shape
/// read off its row content, returning `(α, σ)`.
pub fn match_single_bideterminant(p: &Poly, st: &mut Straightener, n: usize, m: usize) -> Result<(Rat, Partition)> {
    let first = p.terms().keys().next().ok_or(Error::ZeroPolynomial)?;
    let (rows, _) = multidegree(first, n, m);
    if rows.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::VerificationFailed("leading part is not of the form (K|K)".into()));
    }
    let content = Partition::new(rows.into_iter().filter(|&r| r > 0).collect())?;
    let sigma = content.transpose();
    let k = k_tableau(&sigma);
    let target = st.expand(&Bitableau { s: k.clone(), t: k }, n, m)?;
    let (mono, tc) = target.iter().next().ok_or(Error::ZeroPolynomial)?;
    let pc = p.coeff(mono);
    if !pc.is_constant() || !tc.is_constant() {
        return Err(Error::VerificationFailed("leading coefficient involves ε".into()));
    }
    let alpha = pc.constant_term() / tc.constant_term();
    if alpha.is_zero() || *p != target.scale_rat(&alpha) {
        return Err(Error::VerificationFailed("leading part is not a multiple of (K_σ|K_σ)".into()));
    }
    Ok((alpha, sigma))
}

/// Row-and-column transform pipeline reducing a nonzero `f ∈ I_r` to a single
/// bideterminant of width at least `r`, verified by truncated evaluation.
pub fn reduce_to_single_bideterminant(f: &Poly, r: u32, budget: usize) -> Result<(ReductionResult, Poly)> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !f.is_eps_free() {
        return Err(Error::InvalidInput("input polynomial must be ε-free".into()));
    }
    let (n, m) = x_dims(f)?;
    let width = straighten(f)?.min_width()?;
    if width < r {
        return Err(Error::NotInIdeal { min_width: width, required: r });
    }
    let deg = f.degree().unwrap_or(0);

    // leading coefficient stage by stage
    let mut g = f.clone();
    let mut lm: Vec<(VarId, u64)> = Vec::new();
    for (i, j) in pair_order(n) {
        let v = lambda_var(i, j);
        let assign: BTreeMap<VarId, Poly> =
            (1..=m as u32).map(|c| (VarId::x(i, c), Poly::x(i, c) + Poly::var(v.clone()) * Poly::x(j, c))).collect();
        let (lc, h) = top_coeff(&g.substitute(&assign), &v);
        g = lc;
        g.ensure_budget(budget)?;
        lm.push((v, h as u64));
    }
    g = g.substitute(&matrix_assignment(&mat_mul(&anti_identity(n), &crate::poly::generic_matrix(n, m))));
    for (i, j) in pair_order(m) {
        let v = xi_var(i, j);
        let assign: BTreeMap<VarId, Poly> = (1..=n as u32)
            .map(|rw| (VarId::x(rw, i), Poly::x(rw, i) + Poly::var(v.clone()) * Poly::x(rw, j)))
            .collect();
        let (lc, h) = top_coeff(&g.substitute(&assign), &v);
        g = lc;
        g.ensure_budget(budget)?;
        lm.push((v, h as u64));
    }
    g = g.substitute(&matrix_assignment(&mat_mul(&crate::poly::generic_matrix(n, m), &anti_identity(m))));

    // y,z stage: isolate one multidegree component
    let mut comps: BTreeMap<(Vec<u32>, Vec<u32>), Poly> = BTreeMap::new();
    for (mono, c) in g.iter() {
        let (a, b) = multidegree(mono, n, m);
        comps.entry((positional_key(&a), positional_key(&b))).or_default().add_term(mono.clone(), c);
    }
    let ((ka, kb), lc) = comps.into_iter().next_back().ok_or(Error::ZeroPolynomial)?;
    let base = deg as u64 + 1;
    let pos = |key: &[u32]| -> Result<u64> {
        // key is reversed: key[0] belongs to the last index
        let len = key.len() as u32;
        key.iter().enumerate().try_fold(0u64, |acc, (t, &a)| {
            let p = base.checked_pow(len - t as u32).ok_or(Error::ExponentOverflow)?;
            p.checked_mul(a as u64).and_then(|x| acc.checked_add(x)).ok_or(Error::ExponentOverflow)
        })
    };
    lm.push((y_var(), pos(&ka)?));
    lm.push((z_var(), pos(&kb)?));

    let mut st = Straightener::new();
    let (alpha, sigma) = match_single_bideterminant(&lc, &mut st, n, m)?;
    if sigma.width() < r {
        return Err(Error::VerificationFailed(format!("surviving shape has width {} < {r}", sigma.width())));
    }

    // symbolic forms ℓ' = M · diag-scaled X · N
    let y = Poly::var(y_var());
    let z = Poly::var(z_var());
    let scaled: PolyMatrix = (1..=n as u32)
        .map(|i| {
            (1..=m as u32).map(|j| y.pow(base.pow(i) as u32) * z.pow(base.pow(j) as u32) * Poly::x(i, j)).collect()
        })
        .collect();
    let forms = mat_mul(&mat_mul(&row_transform(n), &scaled), &col_transform(m));
    let vars: Vec<VarId> = lm.iter().map(|(v, _)| v.clone()).collect();
    let bounds = degree_bounds(f, &forms, &vars)?;
    let w = positional_weights(&vars, &bounds)?;
    let lm_exps: Vec<u64> = lm.iter().map(|(_, e)| *e).collect();
    let q = w.iter().zip(&lm_exps).try_fold(0i64, |acc, (x, &e)| {
        i64::try_from(e)
            .ok()
            .and_then(|e| x.checked_mul(e))
            .and_then(|t| acc.checked_sub(t))
            .ok_or(Error::ExponentOverflow)
    })?;
    let exponents: Vec<(VarId, i64)> = vars.iter().cloned().zip(w.iter().map(|x| -x)).collect();
    let eps_forms: PolyMatrix = forms
        .iter()
        .map(|row| {
            row.iter().map(|p| exponents.iter().fold(p.clone(), |acc, (v, d)| acc.subst_eps_power(v, *d))).collect()
        })
        .collect();
    let subst = LinearSubst::new(eps_forms)?;

    let image = f.substitute_truncated(&subst.assignment(), q, budget)?;
    if image.eps_order() != Some(q) {
        return Err(Error::VerificationFailed(format!("ε-order {:?} differs from predicted {q}", image.eps_order())));
    }
    let slice = image.eps_slice(q);
    let expected = st.expand(&Bitableau { s: k_tableau(&sigma), t: k_tableau(&sigma) }, n, m)?.scale_rat(&alpha);
    if slice != expected {
        return Err(Error::VerificationFailed("lowest slice is not α(K_σ|K_σ)".into()));
    }
    Ok((ReductionResult { subst, q, alpha, sigma, exponents }, slice))
}

/// `B_v = max_a Σ_k a_k deg_v(ℓ'_k)` over the support of `f`.
pub fn degree_bounds(f: &Poly, forms: &[Vec<Poly>], vars: &[VarId]) -> Result<Vec<u64>> {
    let degs: BTreeMap<VarId, Vec<u64>> = forms
        .iter()
        .enumerate()
        .flat_map(|(i, row)| {
            row.iter().enumerate().map(move |(j, p)| {
                (VarId::x(i as u32 + 1, j as u32 + 1), vars.iter().map(|v| p.deg_in(v) as u64).collect())
            })
        })
        .collect();
    let mut out = vec![0u64; vars.len()];
    for mono in f.terms().keys() {
        let mut tot = vec![0u64; vars.len()];
        for (v, e) in mono.iter() {
            let dv = degs.get(v).ok_or_else(|| Error::VariableMismatch(format!("{v} has no form")))?;
            for (t, d) in tot.iter_mut().zip(dv) {
                *t = d.checked_mul(e as u64).and_then(|x| t.checked_add(x)).ok_or(Error::ExponentOverflow)?;
            }
        }
        for (o, t) in out.iter_mut().zip(tot) {
            *o = (*o).max(t);
        }
    }
    Ok(out)
}

/// Convenience wrapper that only checks membership first.
pub fn member_or_error(f: &Poly, r: u32) -> Result<()> {
    if is_in_det_ideal(f, r)? {
        Ok(())
    } else {
        let w = straighten(f)?.min_width()?;
        Err(Error::NotInIdeal { min_width: w, required: r })
    }
}

pub fn eps_monomial(e: i64) -> EpsScalar {
    Laurent::eps_pow(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::{leading, MonomialOrder};
    use crate::poly::{det_poly, generic_matrix};
    use crate::scalar::rat;

    fn xv(i: u32) -> VarId {
        VarId::new(Family::X, &[i])
    }

    #[test]
    fn single_degeneration_examples() {
        let f = Poly::var(xv(1)) + Poly::var(xv(2));
        let u: BTreeMap<_, _> = [(xv(1), 1), (xv(2), 0)].into_iter().collect();
        let (p, l) = single_degenerate(&f, &u).unwrap();
        assert_eq!(l, 1);
        assert_eq!(p, Poly::var(xv(1)) + Poly::var(xv(2)).shift_eps(1));
        let d = det_poly(&generic_matrix(2, 2));
        let ones: BTreeMap<_, _> = d.vars().into_iter().map(|v| (v, 1)).collect();
        assert_eq!(single_degenerate(&d, &ones).unwrap(), (d, 2));
    }

    #[test]
    fn lex_degeneration_finds_leading_coefficient() {
        let (l1, l2) = (lambda_var(1, 2), lambda_var(1, 3));
        let f = Poly::var(l1.clone()) * Poly::var(xv(1)) + Poly::var(l2.clone()) * Poly::var(xv(2));
        for deg in [
            lex_degenerate_positional(&f, &[l1.clone(), l2.clone()]),
            lex_degenerate_multistage(&f, &[l1.clone(), l2.clone()]),
        ] {
            let deg = deg.unwrap();
            let p = deg.apply(&f);
            assert_eq!(p.eps_order(), Some(deg.m));
            assert_eq!(p.eps_slice(deg.m), Poly::var(xv(1)));
        }
        let y = y_var();
        let f = Poly::var(y.clone()).pow(2) * Poly::var(xv(1)) + Poly::var(y.clone()) * Poly::var(xv(2));
        let deg = lex_degenerate_multistage(&f, &[y]).unwrap();
        assert_eq!(deg.apply(&f).eps_slice(deg.m), Poly::var(xv(1)));
    }

    #[test]
    fn transforms_have_unit_determinant() {
        let m = row_transform(2);
        let l = Poly::var(lambda_var(1, 2));
        assert_eq!(m, vec![vec![l, Poly::one()], vec![Poly::one(), Poly::zero()]]);
        for n in 1..=4 {
            let d = det_poly(&row_transform(n));
            assert!(d == Poly::one() || d == -Poly::one(), "n = {n}");
            let d = det_poly(&col_transform(n));
            assert!(d == Poly::one() || d == -Poly::one());
        }
    }

    #[test]
    fn row_stage_on_det2() {
        let f = det_poly(&generic_matrix(2, 2));
        let fm = f.substitute(&matrix_assignment(&mat_mul(&row_transform(2), &generic_matrix(2, 2))));
        let order = MonomialOrder::lex([lambda_var(1, 2)]);
        let (_, lc) = leading(&fm, &order, &order.vars()).unwrap();
        // width-2 single row: S = K_(2) already, so the LC is ±det2
        assert!(lc == f || lc == -f.clone());
    }

    #[test]
    fn reduction_examples() {
        let d2 = det_poly(&generic_matrix(2, 2));
        let (res, slice) = reduce_to_single_bideterminant(&d2, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(res.sigma.parts(), &[2]);
        assert_eq!(slice, d2.scale_rat(&res.alpha));
        assert!(!res.subst.det.is_zero());

        let mut three = generic_matrix(3, 3);
        three.truncate(2);
        three.iter_mut().for_each(|r| r.truncate(2));
        let f = (Poly::x(1, 1) + Poly::x(3, 3)) * det_poly(&three);
        let (res, _) = reduce_to_single_bideterminant(&f, 2, DEFAULT_BUDGET).unwrap();
        assert!(res.sigma.width() >= 2);
        assert!(matches!(
            reduce_to_single_bideterminant(&Poly::x(1, 1), 2, DEFAULT_BUDGET),
            Err(Error::NotInIdeal { min_width: 1, required: 2 })
        ));
        assert_eq!(reduce_to_single_bideterminant(&Poly::zero(), 1, DEFAULT_BUDGET), Err(Error::ZeroPolynomial));
        assert_ne!(res.alpha, rat(0));
    }
}
