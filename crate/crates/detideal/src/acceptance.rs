//! The acceptance suite: thirteen seeded, exact checks with pinned limits.
//!
//! Every check is deterministic given the seed. Wall-clock limits are
//! recorded as booleans so the JSON report stays byte-identical across runs.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::Rng;
use serde_json::{json, Value};

use crate::abp::{path_abp, Edge, LayeredAbp};
use crate::degeneration::{reduce_to_single_bideterminant, DEFAULT_BUDGET};
use crate::error::Result;
use crate::hasse::deriv_space_dim;
use crate::ips::{
    build_rank_instance, build_rank_instance_with, corank_one_certificate, det_inversion_refutation,
    det_inversion_system, extract_ideal_element, verify_certificate,
};
use crate::linalg;
use crate::oracle::{compose_projection, substitute_oracle_with_approx};
use crate::pfaffian::{
    block_sign, block_skew, generic_skew, is_in_pfaff_ideal, pfaff_reduce, pfaffian, subpfaff_embed,
};
use crate::pit::{
    condensed_minors_with, condenser_failures, condenser_size, fs_condenser, recursive_generator,
    vanishing_equivalence, Sides,
};
use crate::poly::{det_poly, generic_matrix, Family, Poly, PolyMatrix, VarId};
use crate::random::{
    random_abp, random_ideal_element, random_minor, random_pfaff_element, random_poly, random_rank_matrix,
    random_rat_matrix, random_skew_matrix, rng,
};
use crate::scalar::{binomial, is_integer, rat, Rat};
use crate::straighten::{
    brute_force_membership, contingency_monomials, is_in_det_ideal, multidegree, rational_coefficients, straighten,
    subsets, Multidegree, Straightener,
};
use crate::tableaux::{enumerate_bitableaux, k_tableau, Bitableau};

/// Criterion 1 wall-clock limit.
pub const STRAIGHTEN_LIMIT: Duration = Duration::from_secs(60);
/// Criterion 5 wall-clock limit.
pub const REDUCTION_LIMIT: Duration = Duration::from_secs(300);
pub const STRAIGHTEN_SAMPLES: usize = 100;
pub const MEMBERSHIP_SAMPLES: usize = 50;
pub const REDUCTION_SAMPLES: usize = 25;
pub const COMPOSE_SAMPLES: usize = 10;
pub const PFAFF_PAIRS: usize = 20;
pub const PFAFF_REDUCTIONS: usize = 10;
pub const VANISHING_SAMPLES: usize = 50;
pub const CONDENSER_MATRICES: usize = 100;
pub const CONDENSER_FULL_RANK: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    /// Not part of the report, so that reports compare byte for byte.
    pub elapsed: Duration,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {:<28} {}  {} [{:.1}s]",
            self.id,
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }

    pub fn to_json(&self) -> Value {
        json!({"id": self.id, "name": self.name, "pass": self.pass, "detail": self.detail})
    }
}

fn sub_seed(seed: u64, criterion: u64) -> u64 {
    seed.wrapping_mul(1_000_003).wrapping_add(criterion)
}

fn timed(id: u32, name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Outcome {
    let start = Instant::now();
    let (pass, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Outcome { id, name, pass, detail, elapsed: start.elapsed() }
}

fn straightening_inputs(seed: u64) -> Vec<Poly> {
    let mut r = rng(sub_seed(seed, 1));
    (0..STRAIGHTEN_SAMPLES)
        .map(|_| {
            let terms = r.gen_range(1..=6);
            random_poly(&mut r, 3, 3, 4, terms)
        })
        .filter(|p| !p.is_zero())
        .collect()
}

fn c1_round_trip(seed: u64) -> Result<(bool, String)> {
    let start = Instant::now();
    let inputs = straightening_inputs(seed);
    let mut st = Straightener::new();
    let mut ok = 0;
    for f in &inputs {
        let e = st.straighten(f)?;
        if st.expand_expr(&e, 3, 3)? == *f {
            ok += 1;
        }
    }
    let in_time = start.elapsed() <= STRAIGHTEN_LIMIT;
    Ok((ok == inputs.len() && in_time, format!("{ok}/{} exact round trips, within 60 s: {in_time}", inputs.len())))
}

fn c2_basis(seed: u64) -> Result<(bool, String)> {
    let inputs = straightening_inputs(seed);
    let degs: BTreeSet<Multidegree> =
        inputs.iter().flat_map(|f| f.terms().keys().map(|m| multidegree(m, 3, 3)).collect::<Vec<_>>()).collect();
    let mut st = Straightener::new();
    let mut full = 0;
    for (alpha, beta) in &degs {
        let basis = enumerate_bitableaux(alpha, beta);
        let monos = contingency_monomials(alpha, beta);
        let index: BTreeMap<_, _> = monos.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let mut mat = vec![vec![Rat::zero(); basis.len()]; monos.len()];
        for (col, b) in basis.iter().enumerate() {
            for (m, c) in st.expand(b, 3, 3)?.iter() {
                mat[index[m]][col] = c.constant_term();
            }
        }
        if basis.len() == monos.len() && linalg::rank(&mat) == basis.len() {
            full += 1;
        }
    }
    let mut integral = 0;
    for f in &inputs {
        let e = straighten(f)?;
        if rational_coefficients(&e).is_some_and(|cs| cs.iter().all(is_integer)) {
            integral += 1;
        }
    }
    Ok((
        full == degs.len() && integral == inputs.len(),
        format!("{full}/{} multidegrees full rank, {integral}/{} integral expansions", degs.len(), inputs.len()),
    ))
}

fn c3_membership(seed: u64) -> Result<(bool, String)> {
    let mut r = rng(sub_seed(seed, 3));
    let mut cases: Vec<(Poly, usize)> = Vec::new();
    for n in [2, 3] {
        for rows in subsets(n as u32, 2) {
            for cols in subsets(n as u32, 2) {
                let sub: PolyMatrix = rows.iter().map(|&i| cols.iter().map(|&j| Poly::x(i, j)).collect()).collect();
                cases.push((det_poly(&sub), n));
            }
        }
    }
    for k in 0..MEMBERSHIP_SAMPLES {
        let n = if k % 2 == 0 { 2 } else { 3 };
        let f = if k % 4 < 2 {
            random_ideal_element(&mut r, n, n, 2, 4, 2)
        } else {
            random_poly(&mut r, n, n, 4, 4) + random_minor(&mut r, n, n, 2)
        };
        cases.push((f, n));
    }
    let (mut disagree, mut members) = (0, 0);
    for (f, _) in &cases {
        let a = is_in_det_ideal(f, 2)?;
        let b = brute_force_membership(f, 2, 4)?;
        members += a as usize;
        disagree += (a != b) as usize;
    }
    Ok((disagree == 0, format!("{} cases ({members} members), {disagree} disagreements", cases.len())))
}

fn reduction_inputs(seed: u64) -> Vec<Poly> {
    let mut r = rng(sub_seed(seed, 5));
    let mut out = Vec::new();
    while out.len() < REDUCTION_SAMPLES {
        let f = random_ideal_element(&mut r, 3, 3, 2, 4, 2);
        if !f.is_zero() {
            out.push(f);
        }
    }
    out
}

fn c4_derivatives(seed: u64) -> Result<(bool, String)> {
    let dims: Vec<usize> =
        (1..=3).map(|r| deriv_space_dim(&det_poly(&generic_matrix(r, r)), None)).collect::<Result<_>>()?;
    let expect: Vec<usize> = (1..=3u64).map(|r| binomial(2 * r, r).try_into().unwrap()).collect();
    let d1 = deriv_space_dim(&det_poly(&generic_matrix(2, 2)), Some(1))?;
    let d1_expect: u64 = (0..=1u64).map(|i| binomial(2, i).pow(2).try_into().unwrap_or(0u64)).sum();
    let mut min_dim = usize::MAX;
    for f in reduction_inputs(seed) {
        min_dim = min_dim.min(deriv_space_dim(&f, None)?);
    }
    Ok((
        dims == expect && d1 as u64 == d1_expect && min_dim >= 6,
        format!("dim ∂(det_1..3) = {dims:?}, dim ∂≤1(det_2) = {d1}, min over I_2 samples = {min_dim}"),
    ))
}

fn c5_reduction(seed: u64) -> Result<(bool, String)> {
    let start = Instant::now();
    let inputs = reduction_inputs(seed);
    let mut ok = 0;
    let mut widths = Vec::new();
    for f in &inputs {
        let (res, slice) = reduce_to_single_bideterminant(f, 2, DEFAULT_BUDGET)?;
        // independent re-check of the transcript
        let image = f.substitute_truncated(&res.subst.assignment(), res.q, DEFAULT_BUDGET)?;
        let k = k_tableau(&res.sigma);
        let expected = Straightener::new().expand(&Bitableau { s: k.clone(), t: k }, 3, 3)?.scale_rat(&res.alpha);
        let good = image.eps_order() == Some(res.q)
            && image.eps_slice(res.q) == expected
            && slice == expected
            && res.sigma.width() >= 2
            && !res.subst.det.is_zero();
        ok += good as usize;
        widths.push(res.sigma.width());
    }
    let in_time = start.elapsed() <= REDUCTION_LIMIT;
    Ok((
        ok == inputs.len() && in_time,
        format!(
            "{ok}/{} verified, σ₁ ∈ [{}, {}], within 5 min: {in_time}",
            inputs.len(),
            widths.iter().min().unwrap_or(&0),
            widths.iter().max().unwrap_or(&0)
        ),
    ))
}

fn c6_compose(seed: u64) -> Result<(bool, String)> {
    let mut r = rng(sub_seed(seed, 6));
    let mut ok = 0;
    let mut approx_n = 0;
    for k in 0..COMPOSE_SAMPLES {
        let mut f = Poly::zero();
        while f.is_zero() {
            f = random_ideal_element(&mut r, 3, 3, 3, 4, 1);
        }
        let vertices = r.gen_range(2..=3);
        let g = random_abp(&mut r, vertices, 2);
        let target = g.eval();
        let c = compose_projection(&f, 3, &g, DEFAULT_BUDGET)?;
        let mut good =
            c.evaluate(0, DEFAULT_BUDGET)?.eps_slice(0) == target && c.verify(&target, DEFAULT_BUDGET).is_ok();
        if k == 0 {
            // an approximate oracle: exact part plus δ·ε^{-2}·x[1,1]
            let oracle = c.effective_oracle();
            let junk = (Poly::x(1, 1) * Poly::var(VarId::delta())).shift_eps(-2);
            let (c2, n) = substitute_oracle_with_approx(&c, &(oracle + junk), DEFAULT_BUDGET)?;
            approx_n = n;
            good &= c2.verify(&target, DEFAULT_BUDGET).is_ok();
        }
        ok += good as usize;
    }
    Ok((ok == COMPOSE_SAMPLES, format!("{ok}/{COMPOSE_SAMPLES} circuits verified, approximate run N' = {approx_n}")))
}

fn valiant_suite() -> Vec<LayeredAbp> {
    let y = |i: u32| Poly::var(VarId::new(Family::Y, &[i]));
    let mut out: Vec<LayeredAbp> = (1..=5).map(|len| path_abp((1..=len).map(y).collect())).collect();
    let diamond = LayeredAbp::new(
        vec![vec!["s".into()], vec!["a".into(), "b".into()], vec!["t".into()]],
        vec![
            Edge { from: 0, to: 1, label: y(1) },
            Edge { from: 0, to: 2, label: y(2) + Poly::one() },
            Edge { from: 1, to: 3, label: y(3) },
            Edge { from: 2, to: 3, label: y(1) - y(2) },
        ],
    )
    .expect("valid program");
    out.push(diamond);
    let mut r = rng(7);
    for v in 3..=6 {
        for _ in 0..2 {
            out.push(random_abp(&mut r, v, 3));
        }
    }
    out
}

fn c7_valiant() -> Result<(bool, String)> {
    let suite = valiant_suite();
    let mut ok = 0;
    let mut parities = BTreeSet::new();
    for g in &suite {
        let a = g.valiant_matrix();
        let n = a.len();
        let lead = |k: usize| -> PolyMatrix { a[..k].iter().map(|row| row[..k].to_vec()).collect() };
        let good = det_poly(&a) == Poly::one() + g.eval() && (1..n).all(|k| det_poly(&lead(k)) == Poly::one());
        ok += good as usize;
        parities.insert(g.path_length() % 2);
    }
    Ok((
        ok == suite.len() && parities.len() == 2,
        format!("{ok}/{} programs (≤ 6 vertices, both path-length parities)", suite.len()),
    ))
}

fn const_matrix(a: &[Vec<Rat>]) -> PolyMatrix {
    a.iter().map(|row| row.iter().map(|q| Poly::from_rat(q.clone())).collect()).collect()
}

fn c8_pfaffian(seed: u64) -> Result<(bool, String)> {
    let mut squares = true;
    for size in [4, 6] {
        let p = pfaffian(&generic_skew(size))?;
        squares &= p.mul_ref(&p) == det_poly(&generic_skew(size));
    }
    let mut r = rng(sub_seed(seed, 8));
    let mut congruent = 0;
    for k in 0..PFAFF_PAIRS {
        let size = if k % 2 == 0 { 4 } else { 6 };
        let a = random_skew_matrix(&mut r, size, 5);
        let b = random_rat_matrix(&mut r, size, size, 5);
        let bt: Vec<Vec<Rat>> = (0..size).map(|j| (0..size).map(|i| b[i][j].clone()).collect()).collect();
        let bab = linalg::mat_mul_rat(&linalg::mat_mul_rat(&b, &a), &bt);
        let lhs = pfaffian(&const_matrix(&bab))?;
        let rhs = pfaffian(&const_matrix(&a))?.scale_rat(&linalg::det(&b));
        congruent += (lhs == rhs) as usize;
    }
    let mut embeds = true;
    let mut signs = true;
    for n in 1..=3 {
        let a = generic_matrix(n, n);
        let m = subpfaff_embed(&a);
        for k in 1..=n {
            let lead: PolyMatrix = m[..2 * k].iter().map(|row| row[..2 * k].to_vec()).collect();
            let sub: PolyMatrix = a[..k].iter().map(|row| row[..k].to_vec()).collect();
            let d = det_poly(&sub);
            let pf = pfaffian(&lead)?;
            embeds &= pf == d || pf == -d.clone();
            let signed = d.scale_rat(&rat(block_sign(k as u32) as i64));
            signs &= pfaffian(&block_skew(&sub))? == signed;
        }
    }
    Ok((
        squares && congruent == PFAFF_PAIRS && embeds && signs,
        format!(
            "Pf² = det: {squares}; Pf(BABᵀ) = det(B)Pf(A): {congruent}/{PFAFF_PAIRS}; embedding ±det: {embeds}; block sign (−1)^binom(k,2): {signs}"
        ),
    ))
}

fn c9_pfaff_reduce(seed: u64) -> Result<(bool, String)> {
    let mut r = rng(sub_seed(seed, 9));
    let mut ok = 0;
    for _ in 0..PFAFF_REDUCTIONS {
        let mut f = Poly::zero();
        while f.is_zero() {
            f = random_pfaff_element(&mut r, 6, 4, 1, 2);
        }
        let member = is_in_pfaff_ideal(&f, 4)?;
        let (red, slice) = pfaff_reduce(&f, 6, 2, DEFAULT_BUDGET)?;
        let mut st = crate::pfaffian::PfaffStraightener::new();
        let expected = st.expand(&k_tableau(&red.sigma))?.scale_rat(&red.alpha);
        ok += (member && slice == expected && red.sigma.width() >= 4 && !red.det.is_zero()) as usize;
    }
    Ok((ok == PFAFF_REDUCTIONS, format!("{ok}/{PFAFF_REDUCTIONS} verified with σ₁ ≥ 4")))
}

fn c10_generators(seed: u64) -> Result<(bool, String)> {
    let mut cases: Vec<Poly> = Vec::new();
    for rows in subsets(3, 2) {
        for cols in subsets(3, 2) {
            let sub: PolyMatrix = rows.iter().map(|&i| cols.iter().map(|&j| Poly::x(i, j)).collect()).collect();
            cases.push(det_poly(&sub));
        }
    }
    cases.push(det_poly(&generic_matrix(2, 2)) + Poly::x(1, 1));
    let mut r = rng(sub_seed(seed, 10));
    for k in 0..VANISHING_SAMPLES {
        let f = if k % 2 == 0 { random_ideal_element(&mut r, 3, 3, 2, 4, 2) } else { random_poly(&mut r, 3, 3, 3, 3) };
        if !f.is_zero() {
            cases.push(f);
        }
    }
    let mut disagree = 0;
    let mut checks = 0;
    for f in &cases {
        for rank in 1..=3 {
            checks += 1;
            disagree += !vanishing_equivalence(f, rank)?.agree() as usize;
        }
    }
    let mut degrees = Vec::new();
    let mut degree_ok = true;
    let mut ledger_ok = true;
    for k in 1..=3 {
        let g = recursive_generator(16, k, &vec![2; k])?;
        let want = 1u32 << k;
        degree_ok &= g.materialize().iter().all(|c| c.degree() == Some(want) && c.is_homogeneous());
        ledger_ok &= g.seed_bound_holds();
        degrees.push(want);
    }
    Ok((
        disagree == 0 && degree_ok && ledger_ok,
        format!("{checks} equivalence checks, {disagree} disagreements; degrees {degrees:?} exact: {degree_ok}; seed-length bound: {ledger_ok}"),
    ))
}

fn c11_condenser(seed: u64) -> Result<(bool, String)> {
    let configs = [(3, 1), (3, 2), (4, 2), (5, 2), (5, 3), (6, 3)];
    let mut r = rng(sub_seed(seed, 11));
    let mut failures = [0usize; 2];
    let mut low = 0;
    for k in 0..CONDENSER_MATRICES {
        let (n, rk) = configs[k % configs.len()];
        let c = fs_condenser(n, rk, &rat(2), None)?;
        assert_eq!(c.len(), condenser_size(n, rk));
        let rank = if k % 2 == 0 { r.gen_range(0..rk) } else { r.gen_range(rk..=n) };
        let m = random_rank_matrix(&mut r, n, n, rank, 4);
        let below = linalg::rank(&m) < rk;
        low += below as usize;
        for (slot, sides) in [Sides::OneSided, Sides::TwoSided].into_iter().enumerate() {
            let all_zero = condensed_minors_with(&c, &m, sides).iter().all(Zero::is_zero);
            failures[slot] += (all_zero != below) as usize;
        }
    }
    let mut worst = 0.0f64;
    let mut over = 0;
    let mut done = 0;
    while done < CONDENSER_FULL_RANK {
        let (n, rk) = configs[done % configs.len()];
        let a = random_rat_matrix(&mut r, n, rk, 3);
        if linalg::rank(&a) < rk {
            continue;
        }
        let c = fs_condenser(n, rk, &rat(2), None)?;
        let f = condenser_failures(&c, &a);
        over += (f > c.l) as usize;
        if c.l > 0 {
            worst = worst.max(f as f64 / c.l as f64);
        }
        done += 1;
    }
    Ok((
        failures == [0, 0] && over == 0,
        format!(
            "{CONDENSER_MATRICES} matrices ({low} below r): one-sided failures {}, two-sided failures {}; {CONDENSER_FULL_RANK} full-rank A: {over} above r(n−r), worst ratio {worst:.2}",
            failures[0], failures[1]
        ),
    ))
}

fn c12_ips() -> Result<(bool, String)> {
    let mut refutes = Vec::new();
    for n in 1..=3 {
        let sys = det_inversion_system(n, false)?;
        refutes.push(verify_certificate(&det_inversion_refutation(n), &sys)?);
    }
    let mut extracts = Vec::new();
    for n in 2..=3 {
        let sys = det_inversion_system(n, false)?;
        let e = extract_ideal_element(&det_inversion_refutation(n), &sys)?;
        extracts.push(e.witness_value.is_one() && e.min_width.is_some_and(|w| w >= n as u32));
    }
    let c = fs_condenser(3, 2, &rat(2), None)?;
    let sys = build_rank_instance_with(3, 2, &c, false, Sides::TwoSided)?;
    let e = extract_ideal_element(&corank_one_certificate(&c, Sides::TwoSided)?, &sys)?;
    extracts.push(e.witness_value.is_one() && e.min_width.is_some_and(|w| w >= 2));
    let mut axioms_ok = true;
    let mut axioms = 0;
    for (n, r) in [(3, 2), (4, 2)] {
        let c = fs_condenser(n, r, &rat(2), None)?;
        let sys = build_rank_instance(n, r, &c, false)?;
        for a in sys.axioms.iter().filter(|a| a.role == crate::ips::Role::Hard) {
            axioms += 1;
            axioms_ok &= a.poly.is_zero() || straighten(&a.poly)?.min_width()? >= r as u32;
        }
    }
    Ok((
        refutes.iter().all(|&b| b) && extracts.iter().all(|&b| b) && axioms_ok,
        format!(
            "refutations n=1..3: {refutes:?}; extractions (2,2),(3,3),(3,2 two-sided): {extracts:?}; {axioms} condensed-minor axioms in I_r: {axioms_ok}"
        ),
    ))
}

/// Criteria 1–12.
pub fn run_suite(seed: u64) -> Vec<Outcome> {
    vec![
        timed(1, "straightening round trip", || c1_round_trip(seed)),
        timed(2, "standard basis", || c2_basis(seed)),
        timed(3, "ideal membership", || c3_membership(seed)),
        timed(4, "derivative dimensions", || c4_derivatives(seed)),
        timed(5, "reduction pipeline", || c5_reduction(seed)),
        timed(6, "oracle composition", || c6_compose(seed)),
        timed(7, "Valiant gadget", c7_valiant),
        timed(8, "Pfaffian identities", || c8_pfaffian(seed)),
        timed(9, "Pfaffian reduction", || c9_pfaff_reduce(seed)),
        timed(10, "generator equivalence", || c10_generators(seed)),
        timed(11, "rank condenser", || c11_condenser(seed)),
        timed(12, "IPS certificates", c12_ips),
    ]
}

pub fn report_json(seed: u64, outcomes: &[Outcome]) -> Value {
    json!({
        "seed": seed,
        "criteria": outcomes.iter().map(Outcome::to_json).collect::<Vec<_>>(),
        "all_pass": outcomes.iter().all(|o| o.pass),
    })
}

/// Runs criteria 1–12 twice and adds criterion 13: the two reports must be byte-identical.
pub fn run_all(seed: u64) -> Vec<Outcome> {
    let first = run_suite(seed);
    let start = Instant::now();
    let second = run_suite(seed);
    let a = report_json(seed, &first).to_string();
    let b = report_json(seed, &second).to_string();
    let same = a == b;
    let mut out = first;
    out.push(Outcome {
        id: 13,
        name: "determinism",
        pass: same,
        detail: format!("second run of criteria 1–12 byte-identical: {same} ({} bytes)", a.len()),
        elapsed: start.elapsed(),
    });
    out
}
