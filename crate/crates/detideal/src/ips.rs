//! Ideal Proof System certificates for the rank-condenser system
//! `{det_r(E X Eᵀ) = 0, XY − I = 0, X⊙X − X = 0, Y⊙Y − Y = 0}`.
//!
//! Placeholders: `w[k]` for the k-th condensed minor, `z[i,j]` for entry
//! (i,j) of `XY − I`, `u[i,j]` and `v[i,j]` for the boolean axioms.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg;
use crate::pit::{condensed_minors_with, condenser_size, rank_lt_equations_with, RankCondenser, Sides};
use crate::poly::{
    det_poly, generic_matrix, identity_matrix, mat_mul, poly_from_json, poly_to_json, rat_from_json, Family, Monomial,
    Poly, PolyMatrix, VarId,
};
use crate::scalar::{format_rat, rat, Rat};
use crate::straighten::straighten;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    /// One of the f_i whose ideal receives the extracted element.
    Hard,
    /// Part of the satisfiable remainder g_j.
    Satisfiable,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Axiom {
    pub name: String,
    pub poly: Poly,
    pub placeholder: VarId,
    pub role: Role,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomSystem {
    pub axioms: Vec<Axiom>,
    /// A common zero of the satisfiable axioms.
    pub witness: Option<BTreeMap<VarId, Rat>>,
    /// `(n, r)` when the hard axioms generate a subideal of `I_{n,2n,r}` on `[X | Y]`.
    pub rank_shape: Option<(usize, usize)>,
}

fn var2(f: Family, i: usize, j: usize) -> VarId {
    VarId::new(f, &[i as u32, j as u32])
}

fn matrix_of(f: Family, n: usize) -> PolyMatrix {
    (1..=n).map(|i| (1..=n).map(|j| Poly::var(var2(f, i, j))).collect()).collect()
}

pub fn hard_placeholder(k: usize) -> VarId {
    VarId::new(Family::W, &[k as u32])
}

impl AxiomSystem {
    pub fn placeholders(&self) -> BTreeSet<VarId> {
        self.axioms.iter().map(|a| a.placeholder.clone()).collect()
    }

    pub fn hard_count(&self) -> usize {
        self.axioms.iter().filter(|a| a.role == Role::Hard).count()
    }

    fn check_witness(&self) -> Result<()> {
        let Some(w) = &self.witness else { return Ok(()) };
        for a in self.axioms.iter().filter(|a| a.role == Role::Satisfiable) {
            if !eval_rat(&a.poly, w)?.is_zero() {
                return Err(Error::VerificationFailed(format!("witness does not satisfy {}", a.name)));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let axioms: Vec<Value> = self
            .axioms
            .iter()
            .map(|a| {
                json!({
                    "name": a.name,
                    "role": if a.role == Role::Hard { "hard" } else { "satisfiable" },
                    "placeholder": a.placeholder.to_string(),
                    "poly": poly_to_json(&a.poly),
                })
            })
            .collect();
        let witness = self.witness.as_ref().map(|w| {
            w.iter().map(|(v, q)| (v.to_string(), Value::from(format_rat(q)))).collect::<serde_json::Map<_, _>>()
        });
        json!({
            "axioms": axioms,
            "witness": witness,
            "rank_shape": self.rank_shape.map(|(n, r)| json!({"n": n, "r": r})),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |s: &str| Error::InvalidInput(s.to_string());
        let mut axioms = Vec::new();
        for a in v.get("axioms").and_then(Value::as_array).ok_or_else(|| bad("system needs \"axioms\""))? {
            let role = match a.get("role").and_then(Value::as_str) {
                Some("hard") => Role::Hard,
                Some("satisfiable") => Role::Satisfiable,
                _ => return Err(bad("axiom role must be \"hard\" or \"satisfiable\"")),
            };
            axioms.push(Axiom {
                name: a.get("name").and_then(Value::as_str).unwrap_or("").to_string(),
                poly: poly_from_json(a.get("poly").ok_or_else(|| bad("axiom without poly"))?)?,
                placeholder: VarId::parse(
                    a.get("placeholder").and_then(Value::as_str).ok_or_else(|| bad("axiom without placeholder"))?,
                )?,
                role,
            });
        }
        let witness = match v.get("witness") {
            Some(Value::Object(m)) => Some(
                m.iter().map(|(k, q)| Ok((VarId::parse(k)?, rat_from_json(q)?))).collect::<Result<BTreeMap<_, _>>>()?,
            ),
            _ => None,
        };
        let rank_shape = match v.get("rank_shape") {
            Some(Value::Object(m)) => {
                let get =
                    |k: &str| m.get(k).and_then(Value::as_u64).map(|x| x as usize).ok_or_else(|| bad("bad rank_shape"));
                Some((get("n")?, get("r")?))
            }
            _ => None,
        };
        let sys = Self { axioms, witness, rank_shape };
        sys.validate()?;
        Ok(sys)
    }

    fn validate(&self) -> Result<()> {
        let ph = self.placeholders();
        if ph.len() != self.axioms.len() {
            return Err(Error::VariableMismatch("placeholders must be distinct".into()));
        }
        for a in &self.axioms {
            if let Some(v) = a.poly.vars().intersection(&ph).next() {
                return Err(Error::VariableMismatch(format!("placeholder {v} occurs in an axiom")));
            }
        }
        self.check_witness()
    }
}

fn eval_rat(p: &Poly, point: &BTreeMap<VarId, Rat>) -> Result<Rat> {
    p.map_coeffs(|c| c.constant_term()).eval(point)
}

/// The rank system over n×n matrices `X = x[i,j]`, `Y = y[i,j]`, with the
/// one-sided condensed minors `det_r(E X Eᵀ)` as hard axioms and witness `X = Y = I_n`.
pub fn build_rank_instance(n: usize, r: usize, c: &RankCondenser, include_boolean: bool) -> Result<AxiomSystem> {
    build_rank_instance_with(n, r, c, include_boolean, Sides::OneSided)
}

/// As [`build_rank_instance`], choosing one-sided or two-sided condensed minors.
pub fn build_rank_instance_with(
    n: usize,
    r: usize,
    c: &RankCondenser,
    include_boolean: bool,
    sides: Sides,
) -> Result<AxiomSystem> {
    if r == 0 || r > n || c.n != n || c.r != r {
        return Err(Error::ShapeOutOfBounds(format!("condenser {}x{} for n = {n}, r = {r}", c.r, c.n)));
    }
    let need = condenser_size(n, r);
    if c.len() < need {
        return Err(Error::CondenserTooSmall { have: c.len(), need });
    }
    let mut axioms = Vec::new();
    let eqs = rank_lt_equations_with(c, sides)?;
    for (k, ((a, b), p)) in sides.pairs(c.len()).into_iter().zip(eqs).enumerate() {
        axioms.push(Axiom {
            name: format!("det_r(E{} X E{}^T)", a + 1, b + 1),
            poly: p,
            placeholder: hard_placeholder(k + 1),
            role: Role::Hard,
        });
    }
    let xy = mat_mul(&generic_matrix(n, n), &matrix_of(Family::Y, n));
    for (i, row) in xy.into_iter().enumerate() {
        for (j, mut p) in row.into_iter().enumerate() {
            if i == j {
                p = p - Poly::one();
            }
            axioms.push(Axiom {
                name: format!("(XY-I)[{},{}]", i + 1, j + 1),
                poly: p,
                placeholder: var2(Family::Z, i + 1, j + 1),
                role: Role::Satisfiable,
            });
        }
    }
    if include_boolean {
        for (fam, ph, label) in [(Family::X, Family::U, "X"), (Family::Y, Family::V, "Y")] {
            for i in 1..=n {
                for j in 1..=n {
                    let x = Poly::var(var2(fam, i, j));
                    axioms.push(Axiom {
                        name: format!("bool {label}[{i},{j}]"),
                        poly: x.clone() * x.clone() - x,
                        placeholder: var2(ph, i, j),
                        role: Role::Satisfiable,
                    });
                }
            }
        }
    }
    let mut witness = BTreeMap::new();
    for fam in [Family::X, Family::Y] {
        for i in 1..=n {
            for j in 1..=n {
                witness.insert(var2(fam, i, j), if i == j { Rat::one() } else { Rat::zero() });
            }
        }
    }
    let sys = AxiomSystem { axioms, witness: Some(witness), rank_shape: Some((n, r)) };
    sys.validate()?;
    Ok(sys)
}

#[derive(Clone, Debug, PartialEq)]
pub struct IpsCertificate {
    pub c: Poly,
    pub verified: bool,
}

impl IpsCertificate {
    pub fn new(c: Poly) -> Self {
        Self { c, verified: false }
    }

    pub fn to_json(&self) -> Value {
        json!({"certificate": poly_to_json(&self.c), "verified": self.verified})
    }

    /// Reads the polynomial; the verified flag is never trusted from input.
    pub fn from_json(v: &Value) -> Result<Self> {
        let c = v.get("certificate").ok_or_else(|| Error::InvalidInput("missing \"certificate\"".into()))?;
        Ok(Self::new(poly_from_json(c)?))
    }
}

/// Checks `C(x, 0) = 0` and `C(x, f(x)) = 1` by exact substitution.
pub fn verify_certificate(cert: &IpsCertificate, sys: &AxiomSystem) -> Result<bool> {
    let ph = sys.placeholders();
    let axiom_vars: BTreeSet<VarId> = sys.axioms.iter().flat_map(|a| a.poly.vars()).collect();
    if let Some(v) = cert.c.vars().into_iter().find(|v| !ph.contains(v) && !axiom_vars.contains(v)) {
        return Err(Error::VariableMismatch(format!("{v} is neither a system variable nor a placeholder")));
    }
    let zero: BTreeMap<VarId, Poly> = ph.iter().map(|v| (v.clone(), Poly::zero())).collect();
    if !cert.c.substitute(&zero).is_zero() {
        return Ok(false);
    }
    let full: BTreeMap<VarId, Poly> = sys.axioms.iter().map(|a| (a.placeholder.clone(), a.poly.clone())).collect();
    Ok(cert.c.substitute(&full) == Poly::one())
}

/// Returns the certificate with `verified` set, or `CertificateInvalid`.
pub fn verified(mut cert: IpsCertificate, sys: &AxiomSystem) -> Result<IpsCertificate> {
    if !verify_certificate(&cert, sys)? {
        return Err(Error::CertificateInvalid);
    }
    cert.verified = true;
    Ok(cert)
}

/// `C = 1 − det(Z + I) + w·det(Y)` for `{det(X) = 0, XY − I = 0}`.
pub fn det_inversion_refutation(n: usize) -> IpsCertificate {
    let z = matrix_of(Family::Z, n);
    let zi: PolyMatrix = z
        .into_iter()
        .enumerate()
        .map(|(i, row)| row.into_iter().enumerate().map(|(j, p)| if i == j { p + Poly::one() } else { p }).collect())
        .collect();
    let c = Poly::one() - det_poly(&zi) + Poly::var(hard_placeholder(1)) * det_poly(&matrix_of(Family::Y, n));
    IpsCertificate::new(c)
}

/// The r = n system `{det_n(X) = 0, XY − I = 0}` (plus boolean axioms if asked).
pub fn det_inversion_system(n: usize, include_boolean: bool) -> Result<AxiomSystem> {
    build_rank_instance(n, n, &RankCondenser::identity(n), include_boolean)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Extraction {
    pub h: Poly,
    pub witness_value: Rat,
    /// Straightening width of h on `[X | Y]`, for determinantal hard axioms.
    pub min_width: Option<u32>,
}

impl Extraction {
    pub fn to_json(&self) -> Value {
        json!({
            "h": poly_to_json(&self.h),
            "witness_value": format_rat(&self.witness_value),
            "min_width": self.min_width,
        })
    }
}

/// Renames `y[i,j]` to `x[i, n+j]`, placing `[X | Y]` in an n×2n matrix.
pub fn side_by_side(p: &Poly, n: usize) -> Poly {
    let assign: BTreeMap<VarId, Poly> = (1..=n)
        .flat_map(|i| (1..=n).map(move |j| (i, j)))
        .map(|(i, j)| (var2(Family::Y, i, j), Poly::x(i as u32, (n + j) as u32)))
        .collect();
    p.substitute(&assign)
}

/// `h = 1 − C(x, 0, g(x))`: hard placeholders to zero, the rest to their axioms.
pub fn extract_ideal_element(cert: &IpsCertificate, sys: &AxiomSystem) -> Result<Extraction> {
    if !verify_certificate(cert, sys)? {
        return Err(Error::CertificateInvalid);
    }
    let witness = sys.witness.as_ref().ok_or(Error::NoWitness)?;
    let assign: BTreeMap<VarId, Poly> = sys
        .axioms
        .iter()
        .map(|a| (a.placeholder.clone(), if a.role == Role::Hard { Poly::zero() } else { a.poly.clone() }))
        .collect();
    let h = Poly::one() - cert.c.substitute(&assign);
    let witness_value = eval_rat(&h, witness)?;
    if !witness_value.is_one() {
        return Err(Error::VerificationFailed(format!("h at the witness is {}", format_rat(&witness_value))));
    }
    let min_width = match sys.rank_shape {
        Some((n, r)) => {
            let w = straighten(&side_by_side(&h, n))?.min_width()?;
            if w < r as u32 {
                return Err(Error::NotInIdeal { min_width: w, required: r as u32 });
            }
            Some(w)
        }
        None => None,
    };
    Ok(Extraction { h, witness_value, min_width })
}

pub fn adjugate(m: &PolyMatrix) -> PolyMatrix {
    let n = m.len();
    let minor = |i: usize, j: usize| -> PolyMatrix {
        m.iter()
            .enumerate()
            .filter(|(a, _)| *a != i)
            .map(|(_, row)| row.iter().enumerate().filter(|(b, _)| *b != j).map(|(_, p)| p.clone()).collect())
            .collect()
    };
    (0..n)
        .map(|j| {
            (0..n)
                .map(|i| {
                    let d = det_poly(&minor(i, j));
                    if (i + j) % 2 == 1 {
                        -d
                    } else {
                        d
                    }
                })
                .collect()
        })
        .collect()
}

fn drop_col(e: &[Vec<Rat>], c: usize) -> Vec<Vec<Rat>> {
    e.iter().map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, q)| q.clone()).collect()).collect()
}

/// Coefficients `λ[t][s]` with `det_{n−1}(E X Fᵀ) = Σ λ[t][s]·adj(X)[t][s]`, from Cauchy–Binet.
fn adj_form(e: &[Vec<Rat>], f: &[Vec<Rat>], n: usize) -> Vec<Vec<Rat>> {
    let de: Vec<Rat> = (0..n).map(|c| linalg::det(&drop_col(e, c))).collect();
    let df: Vec<Rat> = (0..n).map(|c| linalg::det(&drop_col(f, c))).collect();
    // minor(rows ≠ s, cols ≠ t) = (−1)^{s+t} adj[t][s]
    (0..n)
        .map(|t| {
            (0..n)
                .map(|s| {
                    let v = &de[s] * &df[t];
                    if (s + t) % 2 == 1 {
                        -v
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect()
}

fn apply_form(l: &[Vec<Rat>], m: &PolyMatrix) -> Poly {
    let mut out = Poly::zero();
    for (t, row) in l.iter().enumerate() {
        for (s, q) in row.iter().enumerate() {
            if !q.is_zero() {
                out.add_assign(&m[t][s].scale_rat(q));
            }
        }
    }
    out
}

fn monomials_of_degree(vars: &[VarId], d: u32) -> Vec<Monomial> {
    fn go(vars: &[VarId], d: u32, start: usize, cur: &mut Vec<(VarId, u32)>, out: &mut Vec<Monomial>) {
        if d == 0 {
            out.push(Monomial::from_pairs(cur.iter().cloned()));
            return;
        }
        for i in start..vars.len() {
            for e in (1..=d).rev() {
                cur.push((vars[i].clone(), e));
                go(vars, d - e, i + 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(vars, d, 0, &mut Vec::new(), &mut out);
    out
}

/// A certificate for the corank-one instance r = n − 1 (n ≥ 2), matching
/// [`build_rank_instance_with`] for the same `sides`.
///
/// Each condensed minor is a linear form in adj(X): `f_E(X) = Λ_E(adj X)`.
/// Since `adj(X) = det(X)·Y − adj(X)(XY − I)`, writing `det(Y) = Σ q_E(Y) Λ_E(Y)`
/// gives `C = 1 − det(Z + I) + Σ_E q_E(Y)·(w_E + Λ_E(adj(X)·Z))`.
/// One-sided forms only see the symmetric part of their argument, so for
/// them the solve can fail: then the system is satisfiable and no certificate exists.
pub fn corank_one_certificate(c: &RankCondenser, sides: Sides) -> Result<IpsCertificate> {
    let n = c.n;
    if n < 2 || c.r + 1 != n {
        return Err(Error::InvalidInput(format!("corank-one certificate needs r = n - 1, got n = {n}, r = {}", c.r)));
    }
    let x = generic_matrix(n, n);
    let y = matrix_of(Family::Y, n);
    let adj_x = adjugate(&x);
    let forms: Vec<Vec<Vec<Rat>>> =
        sides.pairs(c.len()).into_iter().map(|(a, b)| adj_form(&c.matrices[a], &c.matrices[b], n)).collect();
    for (f, p) in forms.iter().zip(rank_lt_equations_with(c, sides)?) {
        if apply_form(f, &adj_x) != p {
            return Err(Error::VerificationFailed("adjugate form mismatch".into()));
        }
    }

    // Solve det(Y) = Σ_E q_E(Y)·Λ_E(Y) with q_E homogeneous of degree n − 1.
    let yvars: Vec<VarId> = (1..=n).flat_map(|i| (1..=n).map(move |j| var2(Family::Y, i, j))).collect();
    let basis = monomials_of_degree(&yvars, n as u32 - 1);
    let lin: Vec<Poly> = forms.iter().map(|f| apply_form(f, &y)).collect();
    let target = det_poly(&y);
    let mut rows: BTreeMap<Monomial, usize> = BTreeMap::new();
    for m in target.terms().keys() {
        let k = rows.len();
        rows.entry(m.clone()).or_insert(k);
    }
    let mut entries = Vec::new();
    for (e, l) in lin.iter().enumerate() {
        for (b, mono) in basis.iter().enumerate() {
            for (lm, lc) in l.terms() {
                let prod = mono.mul(lm);
                let k = rows.len();
                let row = *rows.entry(prod).or_insert(k);
                entries.push((row, e * basis.len() + b, lc.constant_term()));
            }
        }
    }
    let cols = lin.len() * basis.len();
    let mut a = vec![vec![Rat::zero(); cols]; rows.len()];
    for (r, col, q) in entries {
        a[r][col] += q;
    }
    let mut rhs = vec![Rat::zero(); rows.len()];
    for (m, q) in target.terms() {
        rhs[rows[m]] = q.constant_term();
    }
    let sol = linalg::solve(&a, &rhs)
        .ok_or_else(|| Error::VerificationFailed("det(Y) outside the span of the forms".into()))?;
    let q: Vec<Poly> = (0..lin.len())
        .map(|e| {
            Poly::from_terms(
                basis
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| !sol[e * basis.len() + b].is_zero())
                    .map(|(b, m)| (m.clone(), crate::poly::eps_const(sol[e * basis.len() + b].clone()))),
            )
        })
        .collect();

    let z = matrix_of(Family::Z, n);
    let adj_z = mat_mul(&adj_x, &z);
    let zi: PolyMatrix = mat_add(&z, &identity_matrix(n));
    let mut cert = Poly::one() - det_poly(&zi);
    for (k, (qe, f)) in q.iter().zip(&forms).enumerate() {
        if qe.is_zero() {
            continue;
        }
        let inner = Poly::var(hard_placeholder(k + 1)) + apply_form(f, &adj_z);
        cert.add_assign(&qe.mul_ref(&inner));
    }
    Ok(IpsCertificate::new(cert))
}

fn mat_add(a: &PolyMatrix, b: &PolyMatrix) -> PolyMatrix {
    a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(p, q)| p.clone() + q.clone()).collect()).collect()
}

/// Whether an invertible X (so `Y = X⁻¹` solves `XY = I`) keeps some condensed minor nonzero.
pub fn spot_check_unsat(c: &RankCondenser, x: &[Vec<Rat>], sides: Sides) -> Result<bool> {
    if linalg::inverse(x).is_none() {
        return Err(Error::InvalidInput("spot check needs an invertible matrix".into()));
    }
    Ok(condensed_minors_with(c, &x.to_vec(), sides).iter().any(|v| !v.is_zero()))
}

/// Small helper for tests and the CLI: rational n×n matrix from integers.
pub fn int_matrix(rows: &[Vec<i64>]) -> Vec<Vec<Rat>> {
    rows.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pit::fs_condenser;

    #[test]
    fn instance_shape() {
        let sys = det_inversion_system(2, true).unwrap();
        assert_eq!(sys.axioms.len(), 1 + 4 + 8);
        assert_eq!(sys.hard_count(), 1);
        assert_eq!(sys.axioms[0].poly, det_poly(&generic_matrix(2, 2)));
        let small = RankCondenser { matrices: vec![], ..fs_condenser(3, 2, &rat(2), None).unwrap() };
        assert!(matches!(build_rank_instance(3, 2, &small, false), Err(Error::CondenserTooSmall { .. })));
    }

    #[test]
    fn refutation_n1_by_hand() {
        // 1 − (z + 1) + w·y
        let c = det_inversion_refutation(1).c;
        let expect =
            Poly::var(hard_placeholder(1)) * Poly::var(var2(Family::Y, 1, 1)) - Poly::var(var2(Family::Z, 1, 1));
        assert_eq!(c, expect);
    }

    #[test]
    fn refutations_verify() {
        for n in 1..=2 {
            let sys = det_inversion_system(n, false).unwrap();
            assert!(verify_certificate(&det_inversion_refutation(n), &sys).unwrap());
        }
        let sys = det_inversion_system(1, false).unwrap();
        assert!(!verify_certificate(&IpsCertificate::new(Poly::zero()), &sys).unwrap());
        assert!(!verify_certificate(&IpsCertificate::new(Poly::var(hard_placeholder(1))), &sys).unwrap());
        let stray = IpsCertificate::new(Poly::var(VarId::new(Family::Aux, &[9])));
        assert!(matches!(verify_certificate(&stray, &sys), Err(Error::VariableMismatch(_))));
    }

    #[test]
    fn extraction_det2() {
        let sys = det_inversion_system(2, true).unwrap();
        let ext = extract_ideal_element(&det_inversion_refutation(2), &sys).unwrap();
        let dx = det_poly(&generic_matrix(2, 2));
        let dy = det_poly(&matrix_of(Family::Y, 2));
        assert_eq!(ext.h, dx * dy);
        assert!(ext.witness_value.is_one());
        assert_eq!(ext.min_width, Some(2));
    }

    #[test]
    fn corank_one_two_sided() {
        for (n, r) in [(2, 1), (3, 2)] {
            let c = fs_condenser(n, r, &rat(2), None).unwrap();
            let sys = build_rank_instance_with(n, r, &c, false, Sides::TwoSided).unwrap();
            assert_eq!(sys.hard_count(), c.len() * c.len());
            let cert = verified(corank_one_certificate(&c, Sides::TwoSided).unwrap(), &sys).unwrap();
            let ext = extract_ideal_element(&cert, &sys).unwrap();
            assert!(ext.min_width.unwrap() >= r as u32);
        }
    }

    #[test]
    fn one_sided_corank_one_systems_are_satisfiable() {
        let c = fs_condenser(2, 1, &rat(2), None).unwrap();
        assert!(matches!(corank_one_certificate(&c, Sides::OneSided), Err(Error::VerificationFailed(_))));
        let skew = int_matrix(&[vec![0, 1], vec![-1, 0]]);
        assert!(!spot_check_unsat(&c, &skew, Sides::OneSided).unwrap());
        assert!(spot_check_unsat(&c, &skew, Sides::TwoSided).unwrap());
        let c = fs_condenser(3, 2, &rat(2), None).unwrap();
        assert!(matches!(corank_one_certificate(&c, Sides::OneSided), Err(Error::VerificationFailed(_))));
        let x = int_matrix(&[vec![9, -9, 13], vec![9, -9, -9], vec![13, 9, 9]]);
        assert!(!spot_check_unsat(&c, &x, Sides::OneSided).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let sys = det_inversion_system(1, true).unwrap();
        assert_eq!(AxiomSystem::from_json(&sys.to_json()).unwrap(), sys);
        let cert = det_inversion_refutation(1);
        assert_eq!(IpsCertificate::from_json(&cert.to_json()).unwrap(), cert);
    }
}
