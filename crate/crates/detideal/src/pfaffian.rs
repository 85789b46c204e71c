//! Pfaffians, standard monomials and the skew-symmetric reduction pipeline.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::abp::{Edge, LayeredAbp};
use crate::degeneration::{
    degree_bounds, lambda_var, pair_order, positional_key, positional_weights, row_transform, top_coeff, y_var,
};
use crate::error::{Error, Result};
use crate::linalg::{inverse, rank};
use crate::oracle::{compose_core, embed_block_matrix, prepare_target, OracleCircuit, Reduced};
use crate::poly::{
    det_poly, eps_from_json, eps_to_json, mat_mul, poly_to_json, transpose, EpsScalar, Family, Monomial, Poly,
    PolyMatrix, VarId,
};
use crate::scalar::{format_rat, Rat};
use crate::straighten::subsets;
use crate::tableaux::{enumerate_tableaux, k_tableau, partitions, Partition, Tableau};

/// Entry `(i,j)` of the generic skew matrix: `x[i,j]`, `−x[j,i]` or 0.
pub fn skew_entry(i: u32, j: u32) -> Poly {
    match i.cmp(&j) {
        std::cmp::Ordering::Less => Poly::x(i, j),
        std::cmp::Ordering::Greater => -Poly::x(j, i),
        std::cmp::Ordering::Equal => Poly::zero(),
    }
}

/// Generic `size×size` skew-symmetric matrix in the variables `x[i,j]`, `i<j`.
pub fn generic_skew(size: usize) -> PolyMatrix {
    (1..=size as u32).map(|i| (1..=size as u32).map(|j| skew_entry(i, j)).collect()).collect()
}

/// Pfaffian by first-row expansion with memoization over index subsets.
pub fn pfaffian(m: &[Vec<Poly>]) -> Result<Poly> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidInput("Pfaffian needs a square matrix".into()));
    }
    if n % 2 == 1 {
        return Err(Error::OddOrder(n));
    }
    for i in 0..n {
        if !m[i][i].is_zero() {
            return Err(Error::NotSkew);
        }
        for j in i + 1..n {
            if !(m[i][j].clone() + m[j][i].clone()).is_zero() {
                return Err(Error::NotSkew);
            }
        }
    }
    if n > 64 {
        return Err(Error::InvalidInput("Pfaffian order above 64".into()));
    }
    let mut memo = HashMap::new();
    let all: Vec<usize> = (0..n).collect();
    Ok(pf_rec(m, &all, &mut memo))
}

fn pf_rec(m: &[Vec<Poly>], idx: &[usize], memo: &mut HashMap<u64, Poly>) -> Poly {
    if idx.is_empty() {
        return Poly::one();
    }
    let key = idx.iter().fold(0u64, |k, &i| k | (1 << i));
    if let Some(p) = memo.get(&key) {
        return p.clone();
    }
    let first = idx[0];
    let mut out = Poly::zero();
    for k in 1..idx.len() {
        let entry = &m[first][idx[k]];
        if entry.is_zero() {
            continue;
        }
        let rest: Vec<usize> = idx.iter().enumerate().filter(|&(t, _)| t != 0 && t != k).map(|(_, &v)| v).collect();
        let term = entry.mul_ref(&pf_rec(m, &rest, memo));
        if k % 2 == 1 {
            out.add_assign(&term);
        } else {
            out.sub_assign(&term);
        }
    }
    memo.insert(key, out.clone());
    out
}

/// Largest index used by a polynomial in the skew variables; rejects anything else.
pub fn skew_size(f: &Poly) -> Result<usize> {
    let mut n = 0;
    for v in f.vars() {
        match (v.family, v.pair()) {
            (Family::X, Some((i, j))) if i < j => n = n.max(j as usize),
            _ => return Err(Error::VariableMismatch(format!("{v} is not a skew variable x[i,j] with i<j"))),
        }
    }
    Ok(n)
}

/// Occurrences of each index `1..=size`; every variable counts for both of its indices.
pub fn index_content(mono: &Monomial, size: usize) -> Vec<u32> {
    let mut c = vec![0; size];
    for (v, e) in mono.iter() {
        if let Some((i, j)) = v.pair() {
            c[i as usize - 1] += e;
            c[j as usize - 1] += e;
        }
    }
    c
}

/// Monomials in `x[i,j]` (`i<j`) with the given index content.
pub fn graph_monomials(content: &[u32]) -> Vec<Monomial> {
    fn rec(pairs: &[(u32, u32)], k: usize, c: &mut [u32], cur: &mut Vec<(VarId, u32)>, out: &mut Vec<Monomial>) {
        if k == pairs.len() {
            if c.iter().all(|&v| v == 0) {
                out.push(Monomial::from_pairs(cur.iter().cloned()));
            }
            return;
        }
        let (i, j) = pairs[k];
        // once the last pair touching i is passed, i must be exhausted
        if k > 0 && pairs[k - 1].0 < i && c[pairs[k - 1].0 as usize - 1] != 0 {
            return;
        }
        let (a, b) = (i as usize - 1, j as usize - 1);
        let top = if j as usize == c.len() { c[a] } else { c[a].min(c[b]) };
        let lo = if j as usize == c.len() { c[a] } else { 0 };
        for e in lo..=top {
            if e > c[b] {
                break;
            }
            c[a] -= e;
            c[b] -= e;
            if e > 0 {
                cur.push((VarId::x(i, j), e));
            }
            rec(pairs, k + 1, c, cur, out);
            if e > 0 {
                cur.pop();
            }
            c[a] += e;
            c[b] += e;
        }
    }
    if content.iter().sum::<u32>() == 0 {
        return vec![Monomial::one()];
    }
    if content.len() < 2 {
        return Vec::new();
    }
    let mut out = Vec::new();
    rec(&pair_order(content.len()), 0, &mut content.to_vec(), &mut Vec::new(), &mut out);
    out
}

/// Combination of standard monomials `[T]`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StdMonExpr {
    terms: BTreeMap<Tableau, EpsScalar>,
}

impl StdMonExpr {
    pub fn terms(&self) -> &BTreeMap<Tableau, EpsScalar> {
        &self.terms
    }

    pub fn add_term(&mut self, t: Tableau, c: &EpsScalar) {
        let e = self.terms.entry(t).or_default();
        e.add_assign(c);
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn min_width(&self) -> Result<u32> {
        self.terms.keys().map(|t| t.shape().width()).min().ok_or(Error::ZeroPolynomial)
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> =
            self.terms.iter().map(|(t, c)| json!({"coef": eps_to_json(c), "T": t.to_json()})).collect();
        json!({ "terms": terms })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let arr =
            v.get("terms").and_then(Value::as_array).ok_or_else(|| Error::InvalidInput("expected terms".into()))?;
        let mut out = Self::default();
        for t in arr {
            let tab = Tableau::from_json(t.get("T").ok_or_else(|| Error::InvalidInput("term needs T".into()))?)?;
            let c = eps_from_json(t.get("coef").ok_or_else(|| Error::InvalidInput("term needs coef".into()))?)?;
            out.add_term(tab, &c);
        }
        Ok(out)
    }
}

struct Component {
    basis: Vec<Tableau>,
    index: HashMap<Monomial, usize>,
    inv: Vec<Vec<Rat>>,
}

/// Standard-monomial straightening with caches for sub-Pfaffians and per-content bases.
#[derive(Default)]
pub struct PfaffStraightener {
    pfs: HashMap<Vec<u32>, Poly>,
    components: HashMap<Vec<u32>, Rc<Component>>,
}

impl PfaffStraightener {
    pub fn new() -> Self {
        Self::default()
    }

    /// Pfaffian of the principal submatrix on `rows` of the generic skew matrix.
    pub fn sub_pfaffian(&mut self, rows: &[u32]) -> Poly {
        if let Some(p) = self.pfs.get(rows) {
            return p.clone();
        }
        let m: PolyMatrix = rows.iter().map(|&i| rows.iter().map(|&j| skew_entry(i, j)).collect()).collect();
        let p = pfaffian(&m).expect("generic principal submatrix is skew");
        self.pfs.insert(rows.to_vec(), p.clone());
        p
    }

    pub fn expand(&mut self, t: &Tableau) -> Result<Poly> {
        if t.rows().iter().any(|r| r.len() % 2 == 1) {
            return Err(Error::InvalidInput("standard monomial rows must have even length".into()));
        }
        let mut acc = Poly::one();
        for r in t.rows() {
            acc = acc.mul_ref(&self.sub_pfaffian(r));
        }
        Ok(acc)
    }

    fn component(&mut self, content: &[u32]) -> Result<Rc<Component>> {
        if let Some(c) = self.components.get(content) {
            return Ok(c.clone());
        }
        let n = content.len() as u32;
        let total: u32 = content.iter().sum();
        let mut basis = Vec::new();
        for shape in partitions(total, n) {
            if shape.parts().iter().all(|p| p % 2 == 0) {
                basis.extend(enumerate_tableaux(&shape, n, Some(content)));
            }
        }
        let monos = graph_monomials(content);
        if basis.len() != monos.len() {
            return Err(Error::VerificationFailed(format!(
                "{} standard monomials but {} monomials with content {content:?}",
                basis.len(),
                monos.len()
            )));
        }
        let index: HashMap<Monomial, usize> = monos.into_iter().enumerate().map(|(i, m)| (m, i)).collect();
        let k = basis.len();
        let mut mat = vec![vec![Rat::zero(); k]; k];
        for (col, t) in basis.iter().enumerate() {
            for (mono, c) in self.expand(t)?.iter() {
                mat[index[mono]][col] = c.constant_term();
            }
        }
        let inv = inverse(&mat).ok_or_else(|| Error::VerificationFailed("standard monomials are dependent".into()))?;
        let comp = Rc::new(Component { basis, index, inv });
        self.components.insert(content.to_vec(), comp.clone());
        Ok(comp)
    }

    pub fn straighten(&mut self, f: &Poly) -> Result<StdMonExpr> {
        let size = skew_size(f)?;
        let mut by_content: BTreeMap<Vec<u32>, Vec<(&Monomial, &EpsScalar)>> = BTreeMap::new();
        for (mono, c) in f.iter() {
            by_content.entry(index_content(mono, size)).or_default().push((mono, c));
        }
        let mut out = StdMonExpr::default();
        for (content, terms) in by_content {
            let comp = self.component(&content)?;
            let exps: BTreeSet<i64> = terms.iter().flat_map(|(_, c)| c.iter().map(|(e, _)| e)).collect();
            let mut coefs = vec![EpsScalar::zero(); comp.basis.len()];
            for e in exps {
                let mut rhs = vec![Rat::zero(); comp.basis.len()];
                for (mono, c) in &terms {
                    rhs[comp.index[*mono]] = c.coeff(e);
                }
                for (a, row) in coefs.iter_mut().zip(&comp.inv) {
                    let v =
                        row.iter().zip(&rhs).filter(|(_, y)| !y.is_zero()).fold(Rat::zero(), |acc, (x, y)| acc + x * y);
                    a.add_term(e, &v);
                }
            }
            for (t, c) in comp.basis.iter().zip(coefs) {
                out.add_term(t.clone(), &c);
            }
        }
        Ok(out)
    }

    pub fn expand_expr(&mut self, e: &StdMonExpr) -> Result<Poly> {
        let mut out = Poly::zero();
        for (t, c) in e.terms() {
            out.add_assign(&self.expand(t)?.scale(c));
        }
        Ok(out)
    }
}

pub fn expand_standard_monomial(t: &Tableau) -> Result<Poly> {
    PfaffStraightener::new().expand(t)
}

pub fn pfaff_straighten(f: &Poly) -> Result<StdMonExpr> {
    PfaffStraightener::new().straighten(f)
}

/// Span test against `monomial · Pf(S)` products per index content, `|S| = order`.
pub fn brute_force_pfaff_membership(f: &Poly, order: u32, degree_bound: u32) -> Result<bool> {
    let deg = f.degree().unwrap_or(0);
    if deg > degree_bound {
        return Err(Error::DegreeBoundExceeded { degree: deg, bound: degree_bound });
    }
    let size = skew_size(f)?;
    let mut st = PfaffStraightener::new();
    let mut by_content: BTreeMap<Vec<u32>, Poly> = BTreeMap::new();
    for (mono, c) in f.iter() {
        by_content.entry(index_content(mono, size)).or_default().add_term(mono.clone(), c);
    }
    for (content, part) in by_content {
        let monos = graph_monomials(&content);
        let index: HashMap<&Monomial, usize> = monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut gens: Vec<Vec<Rat>> = Vec::new();
        for s in subsets(size as u32, order) {
            if s.iter().any(|&i| content[i as usize - 1] == 0) {
                continue;
            }
            let mut rest = content.clone();
            s.iter().for_each(|&i| rest[i as usize - 1] -= 1);
            let pf = st.sub_pfaffian(&s);
            for mono in graph_monomials(&rest) {
                let mut v = vec![Rat::zero(); monos.len()];
                for (mm, c) in pf.mul_monomial(&mono).iter() {
                    v[index[mm]] = c.constant_term();
                }
                gens.push(v);
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

/// Instances small enough for the brute-force guard.
const GUARD_DEGREE: u32 = 3;
const GUARD_SIZE: usize = 6;

/// Membership in the ideal of `order×order` principal sub-Pfaffians (`order = 2r`)
/// by the width criterion, cross-checked by the span test on small instances.
pub fn is_in_pfaff_ideal(f: &Poly, order: u32) -> Result<bool> {
    if f.is_zero() {
        return Ok(true);
    }
    let by_width = pfaff_straighten(f)?.min_width()? >= order;
    if f.degree().unwrap_or(0) <= GUARD_DEGREE && skew_size(f)? <= GUARD_SIZE {
        let brute = brute_force_pfaff_membership(f, order, GUARD_DEGREE)?;
        if brute != by_width {
            return Err(Error::VerificationFailed(format!("width criterion says {by_width}, span test says {brute}")));
        }
    }
    Ok(by_width)
}

/// Output of the skew reduction: `f(P X Pᵀ) = ε^q α [K_σ] + O(ε^{q+1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct PfaffReduction {
    pub size: usize,
    /// Full skew matrix `P X̃ Pᵀ`; the forms are its entries above the diagonal.
    pub forms: PolyMatrix,
    /// Determinant of the induced map on the `x[i,j]`, equal to `det(P)^{size−1}`.
    pub det: EpsScalar,
    pub q: i64,
    pub alpha: Rat,
    pub sigma: Partition,
    pub exponents: Vec<(VarId, i64)>,
}

impl PfaffReduction {
    pub fn assignment(&self) -> BTreeMap<VarId, Poly> {
        pair_order(self.size)
            .into_iter()
            .map(|(i, j)| (VarId::x(i, j), self.forms[i as usize - 1][j as usize - 1].clone()))
            .collect()
    }

    pub fn to_json(&self, slice: &Poly) -> Value {
        let forms: Vec<Value> = pair_order(self.size)
            .into_iter()
            .map(|(i, j)| json!({"var": VarId::x(i, j).to_string(), "form": poly_to_json(&self.forms[i as usize - 1][j as usize - 1])}))
            .collect();
        json!({
            "size": self.size,
            "q": self.q,
            "alpha": format_rat(&self.alpha),
            "sigma": self.sigma.parts(),
            "forms": forms,
            "det": eps_to_json(&self.det),
            "exponents": self.exponents.iter().map(|(v, e)| json!([v.to_string(), e])).collect::<Vec<_>>(),
            "slice": poly_to_json(slice),
        })
    }
}

/// `X ↦ E_{i,j}(λ) X E_{i,j}(λ)ᵀ` on the skew variables.
fn elementary_congruence(size: usize, i: u32, j: u32, lambda: &Poly) -> BTreeMap<VarId, Poly> {
    let mut out = BTreeMap::new();
    for (a, b) in pair_order(size) {
        let mut p = Poly::x(a, b);
        if a == i {
            p.add_assign(&lambda.mul_ref(&skew_entry(j, b)));
        }
        if b == i {
            p.add_assign(&lambda.mul_ref(&skew_entry(a, j)));
        }
        out.insert(VarId::x(a, b), p);
    }
    out
}

/// Skew reduction of a nonzero `f` in the ideal of `2r×2r` principal sub-Pfaffians
/// of a generic `size×size` skew matrix, verified by truncated evaluation.
pub fn pfaff_reduce(f: &Poly, size: usize, r: u32, budget: usize) -> Result<(PfaffReduction, Poly)> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if size % 2 == 1 {
        return Err(Error::OddOrder(size));
    }
    if !f.is_eps_free() {
        return Err(Error::InvalidInput("input polynomial must be ε-free".into()));
    }
    if skew_size(f)? > size {
        return Err(Error::EntryOutOfBounds(format!("variables exceed a {size}×{size} skew matrix")));
    }
    let mut st = PfaffStraightener::new();
    let width = st.straighten(f)?.min_width()?;
    if width < 2 * r {
        return Err(Error::NotInIdeal { min_width: width, required: 2 * r });
    }
    let deg = f.degree().unwrap_or(0);

    let mut g = f.clone();
    let mut lm: Vec<(VarId, u64)> = Vec::new();
    for (i, j) in pair_order(size) {
        let v = lambda_var(i, j);
        let (lc, h) = top_coeff(&g.substitute(&elementary_congruence(size, i, j, &Poly::var(v.clone()))), &v);
        g = lc;
        g.ensure_budget(budget)?;
        lm.push((v, h as u64));
    }
    let n1 = size as u32 + 1;
    let flip: BTreeMap<VarId, Poly> =
        pair_order(size).into_iter().map(|(a, b)| (VarId::x(a, b), -Poly::x(n1 - b, n1 - a))).collect();
    g = g.substitute(&flip);

    let mut comps: BTreeMap<Vec<u32>, Poly> = BTreeMap::new();
    for (mono, c) in g.iter() {
        comps.entry(positional_key(&index_content(mono, size))).or_default().add_term(mono.clone(), c);
    }
    let (key, lc) = comps.into_iter().next_back().ok_or(Error::ZeroPolynomial)?;
    let base = deg as u64 + 1;
    let content: Vec<u32> = key.iter().rev().copied().collect();
    let y_exp = content.iter().enumerate().try_fold(0u64, |acc, (i, &c)| {
        base.checked_pow(i as u32 + 1)
            .and_then(|p| p.checked_mul(c as u64))
            .and_then(|t| acc.checked_add(t))
            .ok_or(Error::ExponentOverflow)
    })?;
    lm.push((y_var(), y_exp));

    if content.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::VerificationFailed("leading part is not of the form [K_σ]".into()));
    }
    let sigma = Partition::new(content.into_iter().filter(|&c| c > 0).collect())?.transpose();
    let target = st.expand(&k_tableau(&sigma))?;
    let (mono, tc) = target.iter().next().ok_or(Error::ZeroPolynomial)?;
    let pc = lc.coeff(mono);
    if !pc.is_constant() {
        return Err(Error::VerificationFailed("leading coefficient involves ε".into()));
    }
    let alpha = pc.constant_term() / tc.constant_term();
    if alpha.is_zero() || lc != target.scale_rat(&alpha) {
        return Err(Error::VerificationFailed("leading part is not a multiple of [K_σ]".into()));
    }
    if sigma.width() < 2 * r {
        return Err(Error::VerificationFailed(format!("surviving shape has width {} < {}", sigma.width(), 2 * r)));
    }

    // P = M·D with D = diag(y^{(d+1)^i})
    let y = Poly::var(y_var());
    let m = row_transform(size);
    let diag: Vec<u32> = (1..=size as u32).map(|i| base.pow(i) as u32).collect();
    let p: PolyMatrix =
        m.iter().map(|row| row.iter().zip(&diag).map(|(e, &k)| e.mul_ref(&y.pow(k))).collect()).collect();
    let forms = mat_mul(&mat_mul(&p, &generic_skew(size)), &transpose(&p));
    let vars: Vec<VarId> = lm.iter().map(|(v, _)| v.clone()).collect();
    let bounds = degree_bounds(f, &forms, &vars)?;
    let w = positional_weights(&vars, &bounds)?;
    let q = w.iter().zip(&lm).try_fold(0i64, |acc, (x, (_, e))| {
        i64::try_from(*e)
            .ok()
            .and_then(|e| x.checked_mul(e))
            .and_then(|t| acc.checked_sub(t))
            .ok_or(Error::ExponentOverflow)
    })?;
    let exponents: Vec<(VarId, i64)> = vars.iter().cloned().zip(w.iter().map(|x| -x)).collect();
    let phi = |p: &Poly| exponents.iter().fold(p.clone(), |acc, (v, d)| acc.subst_eps_power(v, *d));
    let eps_forms: PolyMatrix = forms.iter().map(|row| row.iter().map(phi).collect()).collect();

    // det φ(M) = ±1 and det φ(D) is an ε-power, so the map on pairs is invertible
    let det_p = phi(&det_poly(&m).mul_ref(&y.pow(diag.iter().sum())));
    let det_p = det_p.iter().next().filter(|_| det_p.len() == 1 && det_p.vars().is_empty()).map(|(_, c)| c.clone());
    let det_p = det_p.ok_or_else(|| Error::VerificationFailed("row transform is not unimodular".into()))?;
    let det = det_p.pow(size as u32 - 1);

    let red = PfaffReduction { size, forms: eps_forms, det, q, alpha, sigma, exponents };
    let image = f.substitute_truncated(&red.assignment(), q, budget)?;
    if image.eps_order() != Some(q) {
        return Err(Error::VerificationFailed(format!("ε-order {:?} differs from predicted {q}", image.eps_order())));
    }
    let slice = image.eps_slice(q);
    if slice != target.scale_rat(&red.alpha) {
        return Err(Error::VerificationFailed("lowest slice is not α[K_σ]".into()));
    }
    Ok((red, slice))
}

/// `[[0, A], [−Aᵀ, 0]]`, whose Pfaffian is `(−1)^{binom(n,2)} det(A)`.
pub fn block_skew(a: &[Vec<Poly>]) -> PolyMatrix {
    let n = a.len();
    (0..2 * n)
        .map(|i| {
            (0..2 * n)
                .map(|j| match (i < n, j < n) {
                    (true, false) => a[i][j - n].clone(),
                    (false, true) => -a[j][i - n].clone(),
                    _ => Poly::zero(),
                })
                .collect()
        })
        .collect()
}

/// `C B Cᵀ` for `B = [[0, A], [−Aᵀ, 0]]` and the interleaving `(1, n+1, 2, n+2, …)`.
/// Every leading `2k×2k` Pfaffian equals `det(A_[k])`: the block-form sign
/// `(−1)^{binom(k,2)}` cancels against the sign of the de-interleaving permutation.
pub fn subpfaff_embed(a: &[Vec<Poly>]) -> PolyMatrix {
    let n = a.len();
    let b = block_skew(a);
    let sigma = |i: usize| if i.is_multiple_of(2) { i / 2 } else { n + i / 2 };
    (0..2 * n).map(|i| (0..2 * n).map(|j| b[sigma(i)][sigma(j)].clone()).collect()).collect()
}

/// Sign `(−1)^{binom(k,2)}` of the block form; also the sign of the permutation
/// that de-interleaves `(1, k+1, 2, k+2, …)`.
pub fn block_sign(k: u32) -> i32 {
    if (k * k.saturating_sub(1) / 2).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Pfaffian of the generic skew matrix in `y[i,j]` of order 2, 4 or 6, as a
/// layered program whose vertices are the sets of still unmatched indices.
pub fn pfaffian_abp(order: usize) -> Result<LayeredAbp> {
    if !matches!(order, 2 | 4 | 6) {
        return Err(Error::InvalidInput(format!("Pfaffian programs are built for orders 2, 4 and 6, not {order}")));
    }
    let mut layers: Vec<Vec<Vec<u32>>> = vec![vec![(1..=order as u32).collect()]];
    for _ in 0..order / 2 {
        let mut next: BTreeSet<Vec<u32>> = BTreeSet::new();
        for set in layers.last().expect("nonempty") {
            for k in 1..set.len() {
                next.insert(set.iter().enumerate().filter(|&(t, _)| t != 0 && t != k).map(|(_, &v)| v).collect());
            }
        }
        layers.push(next.into_iter().collect());
    }
    let mut ids: HashMap<Vec<u32>, usize> = HashMap::new();
    for set in layers.iter().flatten() {
        let id = ids.len();
        ids.insert(set.clone(), id);
    }
    let mut edges = Vec::new();
    for set in layers.iter().flatten().filter(|s| !s.is_empty()) {
        for k in 1..set.len() {
            let rest: Vec<u32> = set.iter().enumerate().filter(|&(t, _)| t != 0 && t != k).map(|(_, &v)| v).collect();
            let var = Poly::var(VarId::new(Family::Y, &[set[0], set[k]]));
            let label = if k % 2 == 1 { var } else { -var };
            edges.push(Edge { from: ids[set], to: ids[&rest], label });
        }
    }
    let names = layers
        .iter()
        .map(|l| {
            l.iter().map(|s| format!("{{{}}}", s.iter().map(u32::to_string).collect::<Vec<_>>().join(","))).collect()
        })
        .collect();
    LayeredAbp::new(names, edges)
}

/// Oracle circuit for `eval_abp(g)` from a nonzero `f` in the `2r×2r` sub-Pfaffian ideal.
pub fn pfaff_compose(f: &Poly, size: usize, r: u32, g: &LayeredAbp, budget: usize) -> Result<OracleCircuit> {
    let target = prepare_target(g, r as usize)?;
    if 2 * r as usize > size {
        return Err(Error::ShapeOutOfBounds(format!("2r = {} exceeds the matrix order {size}", 2 * r)));
    }
    let (red, _) = pfaff_reduce(f, size, r, budget)?;
    let half = size / 2;
    let embedded = subpfaff_embed(&embed_block_matrix(&target.matrix, half, half));
    let x_assign: BTreeMap<VarId, Poly> = pair_order(size)
        .into_iter()
        .map(|(i, j)| (VarId::x(i, j), embedded[i as usize - 1][j as usize - 1].clone()))
        .collect();
    let parts = red.sigma.parts();
    let t = parts.iter().filter(|&&s| s >= 2 * r).count() as u32;
    // leading interleaved Pfaffians are exact minors, so no sign survives
    let sign = 1;
    let reduced = Reduced {
        oracle: f,
        forms: red.assignment(),
        q: red.q,
        alpha: red.alpha.clone(),
        sigma: parts.to_vec(),
        t,
        sign,
    };
    compose_core(reduced, &x_assign, &target, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degeneration::DEFAULT_BUDGET;
    use crate::poly::generic_matrix;

    fn pf4() -> Poly {
        Poly::x(1, 2) * Poly::x(3, 4) - Poly::x(1, 3) * Poly::x(2, 4) + Poly::x(1, 4) * Poly::x(2, 3)
    }

    #[test]
    fn small_pfaffians() {
        assert_eq!(pfaffian(&generic_skew(2)).unwrap(), Poly::x(1, 2));
        assert_eq!(pfaffian(&generic_skew(4)).unwrap(), pf4());
        let p6 = pfaffian(&generic_skew(6)).unwrap();
        assert_eq!(p6.len(), 15);
        assert_eq!(p6.mul_ref(&p6), det_poly(&generic_skew(6)));
        assert_eq!(pfaffian(&generic_skew(3)), Err(Error::OddOrder(3)));
        assert_eq!(pfaffian(&generic_matrix(2, 2)), Err(Error::NotSkew));
    }

    #[test]
    fn graph_monomials_count() {
        // multigraphs on 4 vertices with all degrees 1: the three perfect matchings
        assert_eq!(graph_monomials(&[1, 1, 1, 1]).len(), 3);
        assert_eq!(graph_monomials(&[2, 1, 1]).len(), 1);
        assert_eq!(graph_monomials(&[1, 0, 1]), vec![Monomial::var(VarId::x(1, 3))]);
        assert!(graph_monomials(&[1, 1, 1]).is_empty());
    }

    #[test]
    fn straightening_examples() {
        let e = pfaff_straighten(&Poly::x(1, 2)).unwrap();
        assert_eq!(e.terms().keys().collect::<Vec<_>>(), vec![&Tableau::new(vec![vec![1, 2]]).unwrap()]);
        let e = pfaff_straighten(&pf4()).unwrap();
        assert_eq!(e.min_width().unwrap(), 4);
        assert_eq!(e.terms().len(), 1);
        // x13·x24 is not standard as a product of 2×2 Pfaffians
        let f = Poly::x(1, 3) * Poly::x(2, 4);
        let mut st = PfaffStraightener::new();
        let e = st.straighten(&f).unwrap();
        assert_eq!(st.expand_expr(&e).unwrap(), f);
        assert!(is_in_pfaff_ideal(&pf4(), 4).unwrap());
        assert!(!is_in_pfaff_ideal(&f, 4).unwrap());
    }

    #[test]
    fn reduction_examples() {
        let (red, slice) = pfaff_reduce(&pf4(), 4, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(red.sigma.parts(), &[4]);
        assert_eq!(slice, pf4().scale_rat(&red.alpha));
        let (red, _) = pfaff_reduce(&(Poly::x(1, 2) * pf4()), 6, 2, DEFAULT_BUDGET).unwrap();
        assert!(red.sigma.width() >= 4);
        assert!(matches!(pfaff_reduce(&Poly::x(1, 2), 4, 2, DEFAULT_BUDGET), Err(Error::NotInIdeal { .. })));
    }

    #[test]
    fn embedding_signs() {
        let a = generic_matrix(3, 3);
        let m = subpfaff_embed(&a);
        for k in 1..=3usize {
            let lead: PolyMatrix = m[..2 * k].iter().map(|r| r[..2 * k].to_vec()).collect();
            let sub: PolyMatrix = a[..k].iter().map(|r| r[..k].to_vec()).collect();
            assert_eq!(pfaffian(&lead).unwrap(), det_poly(&sub), "k = {k}");
            let signed = det_poly(&sub).scale_rat(&Rat::from_integer(block_sign(k as u32).into()));
            assert_eq!(pfaffian(&block_skew(&sub)).unwrap(), signed, "k = {k}");
        }
    }

    #[test]
    fn pfaffian_programs() {
        for order in [2, 4, 6] {
            let g = pfaffian_abp(order).unwrap();
            let rename: BTreeMap<VarId, Poly> =
                pair_order(order).into_iter().map(|(i, j)| (VarId::new(Family::Y, &[i, j]), Poly::x(i, j))).collect();
            assert_eq!(g.eval().substitute(&rename), pfaffian(&generic_skew(order)).unwrap());
        }
        assert_eq!(pfaffian_abp(4).unwrap().vertex_count(), 5);
        assert_eq!(pfaffian_abp(6).unwrap().vertex_count(), 13);
    }

    #[test]
    fn compose_to_single_variable() {
        let y = Poly::var(VarId::new(Family::Y, &[1]));
        let g = crate::abp::path_abp(vec![y.clone()]);
        let c = pfaff_compose(&pf4(), 4, 2, &g, DEFAULT_BUDGET).unwrap();
        assert_eq!(c.gate_count(), 6);
        c.verify(&y, DEFAULT_BUDGET).unwrap();
        let g2 = pfaffian_abp(2).unwrap();
        let c = pfaff_compose(&pf4(), 4, 2, &g2, DEFAULT_BUDGET).unwrap();
        c.verify(&Poly::var(VarId::new(Family::Y, &[1, 2])), DEFAULT_BUDGET).unwrap();
    }
}
