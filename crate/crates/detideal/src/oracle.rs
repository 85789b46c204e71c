//! Depth-three oracle circuits: projection of an ideal element onto small ABPs.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::abp::{det_abp, imm_abp, pad_valiant, LayeredAbp};
use crate::degeneration::{reduce_to_single_bideterminant, ReductionResult};
use crate::error::{Error, Result};
use crate::laurent::Laurent;
use crate::poly::{eps_to_json, matrix_assignment, poly_to_json, EpsScalar, Family, Poly, PolyMatrix, VarId};
use crate::scalar::{format_rat, rat, Rat};

/// Homogenizing variable for ABP labels.
pub fn hom_var() -> VarId {
    VarId::new(Family::Aux, &[1])
}

/// Exact order bookkeeping reported with every construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    pub q: i64,
    pub t: u32,
    pub n: i64,
    pub sigma: Vec<u32>,
    pub alpha: Rat,
    pub path_length: u32,
    pub sign: i32,
    /// Rescaling `δ ↦ ε^{N'}` applied to an approximate oracle, if any.
    pub oracle_scale: Option<i64>,
}

/// `Φ(y) = (oracle(forms) − c0) / c1` with a single oracle gate.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleCircuit {
    /// Bottom layer: one affine form per oracle input variable.
    pub forms: BTreeMap<VarId, Poly>,
    pub oracle: Poly,
    pub c0: EpsScalar,
    pub c1: EpsScalar,
    pub transcript: Transcript,
}

impl OracleCircuit {
    pub fn gate_count(&self) -> usize {
        self.forms.len()
    }

    /// The oracle actually wired in: approximate oracles get `δ ↦ ε^{N'}`.
    pub fn effective_oracle(&self) -> Poly {
        match self.transcript.oracle_scale {
            Some(k) => self.oracle.subst_eps_power(&VarId::delta(), k),
            None => self.oracle.clone(),
        }
    }

    /// Output truncated to ε-orders `≤ cap`.
    pub fn evaluate(&self, cap: i64, budget: usize) -> Result<Poly> {
        let (k, c) = self.c1.as_monomial().ok_or_else(|| Error::InvalidInput("c1 must be an ε-monomial".into()))?;
        let inner_cap = k.checked_add(cap).ok_or(Error::ExponentOverflow)?;
        let mut out = self.effective_oracle().substitute_truncated(&self.forms, inner_cap, budget)?;
        let mut c0 = self.c0.clone();
        c0.truncate_above(inner_cap);
        out.sub_assign(&Poly::constant(c0));
        Ok(out.shift_eps(-k).scale_rat(&(Rat::one() / c.clone())))
    }

    /// Checks that no negative ε-order survives and the ε⁰ slice equals `target`.
    pub fn verify(&self, target: &Poly, budget: usize) -> Result<()> {
        let out = self.evaluate(0, budget)?;
        if out.eps_order().is_some_and(|o| o < 0) {
            return Err(Error::VerificationFailed("circuit output has negative ε-order terms".into()));
        }
        if out.eps_slice(0) != *target {
            return Err(Error::VerificationFailed("circuit ε⁰ slice differs from the target".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let forms: Vec<Value> =
            self.forms.iter().map(|(v, p)| json!({"var": v.to_string(), "form": poly_to_json(p)})).collect();
        let t = &self.transcript;
        json!({
            "forms": forms,
            "oracle": poly_to_json(&self.oracle),
            "c0": eps_to_json(&self.c0),
            "c1": eps_to_json(&self.c1),
            "transcript": {
                "q": t.q, "t": t.t, "N": t.n, "sigma": t.sigma, "alpha": format_rat(&t.alpha),
                "path_length": t.path_length, "sign": t.sign, "oracle_scale": t.oracle_scale,
            },
        })
    }
}

/// Only characteristic zero is supported.
pub fn check_characteristic(p: u64) -> Result<()> {
    if p == 0 {
        Ok(())
    } else {
        Err(Error::UnsupportedCharacteristic)
    }
}

/// Reduction data consumed by the composition step.
pub struct Reduced<'a> {
    pub oracle: &'a Poly,
    pub forms: BTreeMap<VarId, Poly>,
    pub q: i64,
    pub alpha: Rat,
    pub sigma: Vec<u32>,
    /// Number of rows whose minor sees the whole Valiant block.
    pub t: u32,
    pub sign: i32,
}

/// Prepared target: homogenized program and its padded Valiant matrix.
pub struct Target {
    pub matrix: PolyMatrix,
    pub path_length: u32,
    pub value: Poly,
}

/// Homogenizes `g`, builds the Valiant matrix and pads it to `r×r`.
pub fn prepare_target(g: &LayeredAbp, r: usize) -> Result<Target> {
    if g.vertex_count() > r {
        return Err(Error::TooManyVertices { vertices: g.vertex_count(), limit: r });
    }
    if g.vars().contains(&VarId::delta()) {
        return Err(Error::VariableMismatch("ABP labels may not use the δ parameter".into()));
    }
    if g.edges().iter().any(|e| e.label.eps_order().is_some_and(|o| o < 0)) {
        return Err(Error::InvalidInput("ABP labels must not contain negative ε powers".into()));
    }
    let hom = g.homogenize(&hom_var())?;
    let matrix = pad_valiant(&hom.valiant_matrix(), r)?;
    Ok(Target { matrix, path_length: hom.path_length() as u32, value: g.eval().eps_slice(0) })
}

/// The homogenized target scaled by δ: `y ↦ δy`, `z ↦ δ`.
fn delta_scaled(p: &Poly) -> Poly {
    let delta = Poly::var(VarId::delta());
    let mut out = Poly::zero();
    for (mono, c) in p.iter() {
        let d = mono.degree();
        let (_, rest) = mono.split(&[hom_var()].into_iter().collect());
        out.add_assign(&Poly::term(rest, c.clone()).mul_ref(&delta.pow(d)));
    }
    out
}

/// Finishes the construction once `f(forms) = ε^q·sign·α·(block minors) + O(ε^{q+1})`
/// is known and `x_assign` maps oracle inputs to entries of the embedded Valiant matrix.
pub fn compose_core(
    red: Reduced<'_>,
    x_assign: &BTreeMap<VarId, Poly>,
    target: &Target,
    budget: usize,
) -> Result<OracleCircuit> {
    let d = target.path_length as i64;
    let q = red.q;
    let cap = q.checked_add(d).ok_or(Error::ExponentOverflow)?;
    // P(X) = f(ℓ) mod ε^{q+D+1}, then X ↦ Ã(δy, δ)
    let p = red.oracle.substitute_truncated(&red.forms, cap, budget)?;
    let scaled: BTreeMap<VarId, Poly> = x_assign.iter().map(|(v, e)| (v.clone(), delta_scaled(e))).collect();
    let h = p.substitute_truncated(&scaled, cap, budget)?;
    let delta = VarId::delta();
    let mut n_scale: i64 = 1;
    for (mono, c) in h.iter() {
        let b = mono.deg_in(&delta) as i64;
        for (a, _) in c.iter() {
            if a > q && a <= cap {
                n_scale = n_scale.max((d - b).div_euclid(a - q) + 1);
            }
            if a < q {
                return Err(Error::VerificationFailed("image has terms below the reduction order".into()));
            }
        }
    }
    // bottom layer: x ↦ ℓ(Ã(εy, ε), ε^N)
    let mut forms = BTreeMap::new();
    for (v, l) in &red.forms {
        let composed = l.scale_eps(n_scale).substitute(&scaled_eps(x_assign, n_scale));
        forms.insert(v.clone(), composed.subst_eps_power(&delta, 1));
    }
    let qn = q.checked_mul(n_scale).ok_or(Error::ExponentOverflow)?;
    let sa = red.alpha.clone() * rat(red.sign as i64);
    let c0 = Laurent::monomial(sa.clone(), qn);
    let c1 = Laurent::monomial(sa * rat(red.t as i64), qn.checked_add(d).ok_or(Error::ExponentOverflow)?);
    let circuit = OracleCircuit {
        forms,
        oracle: red.oracle.clone(),
        c0,
        c1,
        transcript: Transcript {
            q,
            t: red.t,
            n: n_scale,
            sigma: red.sigma,
            alpha: red.alpha,
            path_length: target.path_length,
            sign: red.sign,
            oracle_scale: None,
        },
    };
    circuit.verify(&target.value, budget)?;
    Ok(circuit)
}

/// Valiant entries with `y ↦ δy`, `z ↦ δ` and their own ε rescaled to `ε^N`.
fn scaled_eps(x_assign: &BTreeMap<VarId, Poly>, n: i64) -> BTreeMap<VarId, Poly> {
    x_assign.iter().map(|(v, e)| (v.clone(), delta_scaled(e).scale_eps(n))).collect()
}

/// `n×m` matrix with the `r×r` block in the top-left corner and ones on the rest of the diagonal.
pub fn embed_block_matrix(block: &PolyMatrix, n: usize, m: usize) -> PolyMatrix {
    let r = block.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    if i < r && j < r {
                        block[i][j].clone()
                    } else if i == j {
                        Poly::one()
                    } else {
                        Poly::zero()
                    }
                })
                .collect()
        })
        .collect()
}

pub fn embed_block(block: &PolyMatrix, n: usize, m: usize) -> BTreeMap<VarId, Poly> {
    matrix_assignment(&embed_block_matrix(block, n, m))
}

/// Oracle circuit for `eval_abp(g)` from any nonzero `f ∈ I_r`.
pub fn compose_projection(f: &Poly, r: u32, g: &LayeredAbp, budget: usize) -> Result<OracleCircuit> {
    let target = prepare_target(g, r as usize)?;
    let (res, _) = reduce_to_single_bideterminant(f, r, budget)?;
    compose_with_reduction(f, r, &res, &target, budget)
}

pub fn compose_with_reduction(
    f: &Poly,
    r: u32,
    res: &ReductionResult,
    target: &Target,
    budget: usize,
) -> Result<OracleCircuit> {
    let n = res.subst.forms.len();
    let m = res.subst.forms.first().map_or(0, Vec::len);
    let t = res.sigma.parts().iter().filter(|&&s| s >= r).count() as u32;
    let red = Reduced {
        oracle: f,
        forms: res.subst.assignment(),
        q: res.q,
        alpha: res.alpha.clone(),
        sigma: res.sigma.parts().to_vec(),
        t,
        sign: 1,
    };
    compose_core(red, &embed_block(&target.matrix, n, m), target, budget)
}

/// Renames every `x[i,j]` label of a program to `y[i,j]`.
pub fn rename_x_to_y(g: &LayeredAbp) -> LayeredAbp {
    let vars = g.vars();
    let assign: BTreeMap<VarId, Poly> = vars
        .into_iter()
        .filter(|v| v.family == Family::X)
        .map(|v| (v.clone(), Poly::var(VarId { family: Family::Y, idx: v.idx.clone() })))
        .collect();
    let edges = g
        .edges()
        .iter()
        .map(|e| crate::abp::Edge { from: e.from, to: e.to, label: e.label.substitute(&assign) })
        .collect();
    LayeredAbp::new(g.layers().to_vec(), edges).expect("renaming preserves structure")
}

/// Circuit for `det_t(Y)`; needs the clow program to fit in `r` vertices.
pub fn proj_to_det(f: &Poly, r: u32, t: usize, budget: usize) -> Result<OracleCircuit> {
    let g = rename_x_to_y(&det_abp(t));
    if g.vertex_count() > r as usize {
        return Err(Error::TooManyVertices { vertices: g.vertex_count(), limit: r as usize });
    }
    compose_projection(f, r, &g, budget)
}

/// Circuit for `IMM_{w,d}`; needs `w(d−1)+2 ≤ r`.
pub fn proj_to_imm(f: &Poly, r: u32, w: usize, d: usize, budget: usize) -> Result<OracleCircuit> {
    compose_projection(f, r, &imm_abp(w, d), budget)
}

/// Replaces the exact oracle by `h(x, δ)` with `h(x, 0) = f`, wiring in
/// `h(x, ε^{N'})` for the least `N'` that keeps every δ-term at positive output order.
pub fn substitute_oracle_with_approx(c: &OracleCircuit, h: &Poly, budget: usize) -> Result<(OracleCircuit, i64)> {
    let delta = VarId::delta();
    let base = h.filter(|m| m.deg_in(&delta) == 0);
    if base != c.oracle {
        return Err(Error::NotAnApproximation);
    }
    let (k, coef) = c.c1.as_monomial().ok_or_else(|| Error::InvalidInput("c1 must be an ε-monomial".into()))?;
    let extra = h.filter(|m| m.deg_in(&delta) > 0);
    // δ-terms of the output: (extra(forms)) / c1, needed only at orders ≤ 0
    let img = extra.substitute_truncated(&c.forms, k, budget)?.shift_eps(-k).scale_rat(&(Rat::one() / coef.clone()));
    let mut n_prime: i64 = 1;
    for (mono, cf) in img.iter() {
        let b = mono.deg_in(&delta) as i64;
        if let Some(a) = cf.order() {
            if a <= 0 {
                n_prime = n_prime.max((-a).div_euclid(b) + 1);
            }
        }
    }
    let mut out = c.clone();
    out.oracle = h.clone();
    out.transcript.oracle_scale = Some(n_prime);
    Ok((out, n_prime))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abp::path_abp;
    use crate::degeneration::DEFAULT_BUDGET;
    use crate::poly::{det_poly, generic_matrix};

    fn y(i: u32) -> Poly {
        Poly::var(VarId::new(Family::Y, &[i]))
    }

    #[test]
    fn det2_projects_to_single_variable() {
        let f = det_poly(&generic_matrix(2, 2));
        let g = path_abp(vec![y(1)]);
        let c = compose_projection(&f, 2, &g, DEFAULT_BUDGET).unwrap();
        assert_eq!(c.gate_count(), 4);
        assert_eq!(c.transcript.t, 1);
        c.verify(&y(1), DEFAULT_BUDGET).unwrap();
    }

    #[test]
    fn det3_projects_to_product() {
        let f = det_poly(&generic_matrix(3, 3));
        let g = path_abp(vec![y(1), y(2)]);
        let c = compose_projection(&f, 3, &g, DEFAULT_BUDGET).unwrap();
        c.verify(&(y(1) * y(2)), DEFAULT_BUDGET).unwrap();
        assert_eq!(c.gate_count(), 9);
    }

    #[test]
    fn determinant_and_imm_targets() {
        let f = det_poly(&generic_matrix(3, 3));
        let c = proj_to_det(&f, 3, 1, DEFAULT_BUDGET).unwrap();
        c.verify(&Poly::var(VarId::new(Family::Y, &[1, 1])), DEFAULT_BUDGET).unwrap();
        let c = proj_to_imm(&f, 3, 1, 2, DEFAULT_BUDGET).unwrap();
        c.verify(&crate::abp::imm_poly(1, 2), DEFAULT_BUDGET).unwrap();
        assert!(matches!(proj_to_det(&f, 3, 2, DEFAULT_BUDGET), Err(Error::TooManyVertices { .. })));
        assert_eq!(check_characteristic(3), Err(Error::UnsupportedCharacteristic));
    }

    #[test]
    fn approximate_oracles() {
        let f = det_poly(&generic_matrix(2, 2));
        let c = compose_projection(&f, 2, &path_abp(vec![y(1)]), DEFAULT_BUDGET).unwrap();
        let (same, n) = substitute_oracle_with_approx(&c, &f, DEFAULT_BUDGET).unwrap();
        assert_eq!(n, 1);
        same.verify(&y(1), DEFAULT_BUDGET).unwrap();
        let junk = (Poly::x(1, 1) * Poly::x(2, 1)).shift_eps(-3) * Poly::var(VarId::delta());
        let (approx, n) = substitute_oracle_with_approx(&c, &(f.clone() + junk), DEFAULT_BUDGET).unwrap();
        assert!(n >= 4);
        approx.verify(&y(1), DEFAULT_BUDGET).unwrap();
        assert_eq!(
            substitute_oracle_with_approx(&c, &Poly::x(1, 1), DEFAULT_BUDGET).map(|r| r.1),
            Err(Error::NotAnApproximation)
        );
    }

    #[test]
    fn identity_circuit_scale() {
        let x = VarId::new(Family::X, &[1, 1]);
        let c = OracleCircuit {
            forms: [(x.clone(), Poly::var(x.clone()))].into_iter().collect(),
            oracle: Poly::var(x.clone()),
            c0: EpsScalar::zero(),
            c1: EpsScalar::one(),
            transcript: Transcript {
                q: 0,
                t: 1,
                n: 1,
                sigma: vec![1],
                alpha: rat(1),
                path_length: 0,
                sign: 1,
                oracle_scale: None,
            },
        };
        let h = Poly::var(x.clone()) + Poly::var(VarId::delta()).shift_eps(-3);
        let (c2, n) = substitute_oracle_with_approx(&c, &h, DEFAULT_BUDGET).unwrap();
        assert_eq!(n, 4);
        c2.verify(&Poly::var(x), DEFAULT_BUDGET).unwrap();
    }
}
