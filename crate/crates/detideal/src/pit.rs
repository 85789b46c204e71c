//! Matrix-product hitting-set generators, their recursive composition,
//! Forbes–Shpilka rank condensers and a seeded Schwartz–Zippel harness.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{self, factor_low_rank, mat_mul_rat};
use crate::poly::{det_poly, generic_matrix, mat_mul, transpose, EpsScalar, Family, Poly, PolyMatrix, VarId};
use crate::scalar::{binomial, format_rat, rat, Rat};
use crate::straighten::{is_in_det_ideal, straighten, x_dims};

pub type RatMatrix = Vec<Vec<Rat>>;

/// `G_{n,m,r}(Y, Z) = YZ` with `Y` of size n×r and `Z` of size r×m.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatrixGenerator {
    pub n: usize,
    pub m: usize,
    pub r: usize,
}

impl MatrixGenerator {
    pub fn new(n: usize, m: usize, r: usize) -> Result<Self> {
        if r > n.min(m) {
            return Err(Error::ShapeOutOfBounds(format!("rank {r} exceeds {n}x{m}")));
        }
        Ok(Self { n, m, r })
    }

    pub fn seed_length(&self) -> usize {
        self.r * (self.n + self.m)
    }

    /// Seed variables in order: all of `Y` row-major, then all of `Z` row-major.
    pub fn seed_vars(&self) -> Vec<VarId> {
        seed_vars(None, self)
    }
}

fn y_seed(stage: Option<u32>, i: usize, l: usize) -> VarId {
    match stage {
        Some(s) => VarId::new(Family::Y, &[s, i as u32, l as u32]),
        None => VarId::new(Family::Y, &[i as u32, l as u32]),
    }
}

fn z_seed(stage: Option<u32>, l: usize, j: usize) -> VarId {
    match stage {
        Some(s) => VarId::new(Family::Z, &[s, l as u32, j as u32]),
        None => VarId::new(Family::Z, &[l as u32, j as u32]),
    }
}

fn seed_vars(stage: Option<u32>, g: &MatrixGenerator) -> Vec<VarId> {
    let mut out = Vec::with_capacity(g.seed_length());
    for i in 1..=g.n {
        for l in 1..=g.r {
            out.push(y_seed(stage, i, l));
        }
    }
    for l in 1..=g.r {
        for j in 1..=g.m {
            out.push(z_seed(stage, l, j));
        }
    }
    out
}

fn expand_stage(stage: Option<u32>, g: &MatrixGenerator) -> PolyMatrix {
    (1..=g.n)
        .map(|i| {
            (1..=g.m)
                .map(|j| {
                    let mut e = Poly::zero();
                    for l in 1..=g.r {
                        e.add_assign(&(Poly::var(y_seed(stage, i, l)) * Poly::var(z_seed(stage, l, j))));
                    }
                    e
                })
                .collect()
        })
        .collect()
}

/// The n×m array of coordinates `Σ_l y[i,l]·z[l,j]`.
pub fn expand_generator(g: &MatrixGenerator) -> PolyMatrix {
    expand_stage(None, g)
}

/// `f(G(Y, Z))`: every `x[i,j]` is replaced by coordinate `(i, j)`.
pub fn apply_generator(f: &Poly, g: &MatrixGenerator) -> Result<Poly> {
    let (n, m) = x_dims(f)?;
    if n > g.n || m > g.m {
        return Err(Error::ShapeOutOfBounds(format!("{n}x{m} input for a {}x{} generator", g.n, g.m)));
    }
    let coords = expand_generator(g);
    let mut assign = BTreeMap::new();
    for (i, row) in coords.into_iter().enumerate() {
        for (j, c) in row.into_iter().enumerate() {
            assign.insert(VarId::x(i as u32 + 1, j as u32 + 1), c);
        }
    }
    Ok(f.substitute(&assign))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VanishingReport {
    pub r: u32,
    pub generator_zero: bool,
    pub member: bool,
}

impl VanishingReport {
    pub fn agree(&self) -> bool {
        self.generator_zero == self.member
    }

    pub fn to_json(&self) -> Value {
        json!({"r": self.r, "generator_zero": self.generator_zero, "member": self.member, "agree": self.agree()})
    }
}

/// Computes both sides of `f(G_{n,m,r−1}) = 0 ⇔ f ∈ I_r` independently:
/// substitution on one side, straightening width on the other.
pub fn vanishing_equivalence(f: &Poly, r: u32) -> Result<VanishingReport> {
    if r == 0 {
        return Err(Error::InvalidInput("r must be positive".into()));
    }
    let (n, m) = x_dims(f)?;
    let (n, m) = (n.max(1), m.max(1));
    let g = MatrixGenerator::new(n, m, (r as usize - 1).min(n.min(m)))?;
    let generator_zero = apply_generator(f, &g)?.is_zero();
    let member = is_in_det_ideal(f, r)?;
    Ok(VanishingReport { r, generator_zero, member })
}

/// Writes a rank-≤ r matrix as `Y·Z` with Y n×r and Z r×m (zero-padded when
/// the rank is lower); `None` if the rank exceeds r.
pub fn factor_through_generator(mat: &RatMatrix, r: usize) -> Option<(RatMatrix, RatMatrix)> {
    let (c, rows) = factor_low_rank(mat);
    let k = rows.len();
    if k > r {
        return None;
    }
    let m = mat.first().map_or(0, Vec::len);
    let y = c
        .into_iter()
        .map(|mut row| {
            row.resize(r, Rat::zero());
            row
        })
        .collect();
    let mut z = rows;
    z.resize(r, vec![Rat::zero(); m]);
    Some((y, z))
}

/// Composition `G_k = G_{k−1} ∘ G_{s_k, s_k, r_k}` with `s_k = ⌈√n_{k−1}⌉`.
#[derive(Clone, Debug)]
pub struct RecursiveGenerator {
    pub n: usize,
    pub schedule: Vec<usize>,
    /// Stage s is a square generator of side `stages[s].n`.
    pub stages: Vec<MatrixGenerator>,
}

fn ceil_sqrt(n: usize) -> usize {
    let mut s = (n as f64).sqrt() as usize;
    while s * s < n {
        s += 1;
    }
    while s > 0 && (s - 1) * (s - 1) >= n {
        s -= 1;
    }
    s
}

/// Stage 1 feeds the `n` outputs; each later stage feeds the seed of the
/// previous one. Square outputs are read row-major and truncated.
pub fn recursive_generator(n: usize, k: usize, r_schedule: &[usize]) -> Result<RecursiveGenerator> {
    let bad = |s: String| Err(Error::InconsistentSchedule(s));
    if n == 0 || k == 0 {
        return bad("n and k must be positive".into());
    }
    if r_schedule.len() != k {
        return bad(format!("schedule has {} entries for k = {k}", r_schedule.len()));
    }
    let mut stages = Vec::with_capacity(k);
    let mut arity = n;
    for (s, &r) in r_schedule.iter().enumerate() {
        let side = ceil_sqrt(arity);
        if r == 0 || r > side {
            return bad(format!("stage {} rank {r} outside 1..={side}", s + 1));
        }
        let g = MatrixGenerator { n: side, m: side, r };
        arity = g.seed_length();
        stages.push(g);
    }
    let out = RecursiveGenerator { n, schedule: r_schedule.to_vec(), stages };
    if !out.seed_bound_holds() {
        return bad(format!("binom(l+d, d) < n for l = {}, d = {}", out.seed_length(), out.degree()));
    }
    Ok(out)
}

impl RecursiveGenerator {
    pub fn k(&self) -> usize {
        self.stages.len()
    }

    pub fn seed_length(&self) -> usize {
        self.stages.last().map_or(self.n, MatrixGenerator::seed_length)
    }

    pub fn degree(&self) -> u64 {
        1u64 << self.k()
    }

    /// A generator with seed ℓ and degree d into n coordinates needs binom(ℓ+d, d) ≥ n.
    pub fn seed_bound_holds(&self) -> bool {
        let d = self.degree();
        binomial(self.seed_length() as u64 + d, d) >= BigInt::from(self.n)
    }

    pub fn seed_vars(&self) -> Vec<VarId> {
        let k = self.k();
        seed_vars(Some(k as u32), &self.stages[k - 1])
    }

    /// The n coordinate polynomials in the last stage's seed variables.
    pub fn materialize(&self) -> Vec<Poly> {
        let flat = |s: usize| -> Vec<Poly> {
            expand_stage(Some(s as u32 + 1), &self.stages[s]).into_iter().flatten().collect()
        };
        let mut coords: Vec<Poly> = flat(0).into_iter().take(self.n).collect();
        for s in 1..self.k() {
            let prev = seed_vars(Some(s as u32), &self.stages[s - 1]);
            let assign: BTreeMap<VarId, Poly> = prev.into_iter().zip(flat(s)).collect();
            coords = coords.iter().map(|c| c.substitute(&assign)).collect();
        }
        coords
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "k": self.k(),
            "schedule": self.schedule,
            "sides": self.stages.iter().map(|g| g.n).collect::<Vec<_>>(),
            "seed_length": self.seed_length(),
            "degree": self.degree(),
            "seed_bound_holds": self.seed_bound_holds(),
        })
    }
}

/// A finite family of r×n rational matrices, meant as a weak `(r, l)`-lossless condenser.
#[derive(Clone, Debug, PartialEq)]
pub struct RankCondenser {
    pub n: usize,
    pub r: usize,
    pub l: usize,
    pub omega: Rat,
    pub points: Vec<Rat>,
    pub matrices: Vec<RatMatrix>,
}

impl RankCondenser {
    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    /// The single-member condenser `{I_n}` for r = n.
    pub fn identity(n: usize) -> Self {
        let id = (0..n).map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect()).collect();
        Self { n, r: n, l: 0, omega: Rat::one(), points: vec![], matrices: vec![id] }
    }

    pub fn to_json(&self) -> Value {
        let mat = |m: &RatMatrix| -> Value {
            m.iter().map(|row| row.iter().map(format_rat).collect::<Vec<_>>()).collect::<Vec<_>>().into()
        };
        json!({
            "n": self.n,
            "r": self.r,
            "l": self.l,
            "omega": format_rat(&self.omega),
            "points": self.points.iter().map(format_rat).collect::<Vec<_>>(),
            "matrices": self.matrices.iter().map(mat).collect::<Vec<_>>(),
        })
    }
}

/// Number of members needed for the rank equations: 2r(n−r)+1.
pub fn condenser_size(n: usize, r: usize) -> usize {
    2 * r * (n - r) + 1
}

/// `W_ω(α)` with entries `(ω^i α)^j`, i ∈ 1..=r, j ∈ 1..=n.
pub fn fs_matrix(n: usize, r: usize, omega: &Rat, alpha: &Rat) -> RatMatrix {
    let mut out = Vec::with_capacity(r);
    let mut wi = omega.clone();
    for _ in 0..r {
        let base = &wi * alpha;
        let mut row = Vec::with_capacity(n);
        let mut p = base.clone();
        for _ in 0..n {
            row.push(p.clone());
            p = &p * &base;
        }
        out.push(row);
        wi = &wi * omega;
    }
    out
}

/// `{W_ω(α) : α ∈ S}`; S defaults to `1..=2r(n−r)+1`.
pub fn fs_condenser(n: usize, r: usize, omega: &Rat, points: Option<&[Rat]>) -> Result<RankCondenser> {
    if omega.is_zero() || omega.is_one() || *omega == -Rat::one() {
        return Err(Error::BadOmega);
    }
    if r == 0 || r > n {
        return Err(Error::ShapeOutOfBounds(format!("rank {r} for width {n}")));
    }
    let points: Vec<Rat> = match points {
        Some(p) => p.to_vec(),
        None => (1..=condenser_size(n, r) as i64).map(rat).collect(),
    };
    if points.iter().any(Zero::is_zero) {
        return Err(Error::InvalidInput("evaluation points must be nonzero".into()));
    }
    let matrices = points.iter().map(|a| fs_matrix(n, r, omega, a)).collect();
    Ok(RankCondenser { n, r, l: r * (n - r), omega: omega.clone(), points, matrices })
}

/// Members E with `rank(E·A) < rank(A)`.
pub fn condenser_failures(c: &RankCondenser, a: &RatMatrix) -> usize {
    let target = linalg::rank(a);
    c.matrices.iter().filter(|e| linalg::rank(&mat_mul_rat(e, a)) < target).count()
}

fn rat_transpose(a: &RatMatrix) -> RatMatrix {
    let m = a.first().map_or(0, Vec::len);
    (0..m).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Which products a condenser turns into rank equations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sides {
    /// `det_r(E M Eᵀ)` for each member E.
    OneSided,
    /// `det_r(E M Fᵀ)` for each ordered pair (E, F), E-major.
    TwoSided,
}

impl Sides {
    pub fn pairs(self, len: usize) -> Vec<(usize, usize)> {
        match self {
            Sides::OneSided => (0..len).map(|a| (a, a)).collect(),
            Sides::TwoSided => (0..len).flat_map(|a| (0..len).map(move |b| (a, b))).collect(),
        }
    }
}

/// The values `det_r(E M Fᵀ)` for the selected member pairs.
pub fn condensed_minors_with(c: &RankCondenser, mat: &RatMatrix, sides: Sides) -> Vec<Rat> {
    sides
        .pairs(c.len())
        .into_iter()
        .map(|(a, b)| linalg::det(&mat_mul_rat(&mat_mul_rat(&c.matrices[a], mat), &rat_transpose(&c.matrices[b]))))
        .collect()
}

/// The values `det_r(E M Eᵀ)` for every member.
pub fn condensed_minors(c: &RankCondenser, mat: &RatMatrix) -> Vec<Rat> {
    condensed_minors_with(c, mat, Sides::OneSided)
}

fn rat_matrix_poly(a: &RatMatrix) -> PolyMatrix {
    a.iter().map(|row| row.iter().map(|q| Poly::from_rat(q.clone())).collect()).collect()
}

/// The polynomials `det_r(E X Fᵀ)` for the selected pairs, each checked to lie in `I_{n,n,r}`.
pub fn rank_lt_equations_with(c: &RankCondenser, sides: Sides) -> Result<Vec<Poly>> {
    let need = condenser_size(c.n, c.r);
    if c.len() < need {
        return Err(Error::CondenserTooSmall { have: c.len(), need });
    }
    let x = generic_matrix(c.n, c.n);
    let left: Vec<PolyMatrix> = c.matrices.iter().map(|e| mat_mul(&rat_matrix_poly(e), &x)).collect();
    let right: Vec<PolyMatrix> = c.matrices.iter().map(|e| transpose(&rat_matrix_poly(e))).collect();
    let mut out = Vec::new();
    for (a, b) in sides.pairs(c.len()) {
        let p = det_poly(&mat_mul(&left[a], &right[b]));
        if !p.is_zero() && straighten(&p)?.min_width()? < c.r as u32 {
            return Err(Error::VerificationFailed("condensed minor outside the ideal".into()));
        }
        out.push(p);
    }
    Ok(out)
}

/// The polynomials `det_r(E X Eᵀ)`, each checked to lie in `I_{n,n,r}`.
pub fn rank_lt_equations(c: &RankCondenser) -> Result<Vec<Poly>> {
    rank_lt_equations_with(c, Sides::OneSided)
}

fn eval_eps(c: &EpsScalar, eps: &Rat) -> Rat {
    let inv = eps.recip();
    let mut out = Rat::zero();
    for (e, q) in c.iter() {
        let base = if e < 0 { &inv } else { eps };
        out += q * num_traits::pow(base.clone(), e.unsigned_abs() as usize);
    }
    out
}

/// Seeded randomized identity test. Each trial instantiates ε and every
/// variable at uniform nonzero integers from `lo..=hi`; true iff some value is nonzero.
pub fn sz_test(f: &Poly, trials: usize, seed: u64, lo: i64, hi: i64) -> Result<bool> {
    if lo > hi || (lo == 0 && hi == 0) {
        return Err(Error::InvalidInput(format!("empty range {lo}..={hi}")));
    }
    if f.is_zero() {
        return Ok(false);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample = |rng: &mut ChaCha8Rng| loop {
        let v = rng.gen_range(lo..=hi);
        if v != 0 {
            return rat(v);
        }
    };
    let vars = f.vars();
    for _ in 0..trials {
        let eps = sample(&mut rng);
        let point: BTreeMap<VarId, Rat> = vars.iter().map(|v| (v.clone(), sample(&mut rng))).collect();
        let q = f.map_coeffs(|c| eval_eps(c, &eps));
        if !q.eval(&point)?.is_zero() {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::det_poly;
    use crate::scalar::rat_frac;

    fn q(rows: &[&[i64]]) -> RatMatrix {
        rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect()
    }

    #[test]
    fn generator_shape() {
        let g = MatrixGenerator::new(2, 3, 2).unwrap();
        let c = expand_generator(&g);
        for row in &c {
            for e in row {
                // r monomials in 2r distinct variables, within the 2r-sparsity bound
                assert_eq!(e.len(), g.r);
                assert_eq!(e.vars().len(), 2 * g.r);
                assert_eq!(e.degree(), Some(2));
            }
        }
        let det2 = det_poly(&generic_matrix(2, 2));
        assert!(apply_generator(&det2, &MatrixGenerator::new(2, 2, 1).unwrap()).unwrap().is_zero());
        let x11 = Poly::x(1, 1);
        assert!(apply_generator(&x11, &MatrixGenerator::new(1, 1, 0).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn vanishing_examples() {
        let det2 = det_poly(&generic_matrix(2, 2));
        let rep = vanishing_equivalence(&det2, 2).unwrap();
        assert!(rep.generator_zero && rep.member);
        let rep = vanishing_equivalence(&(Poly::x(1, 1) + det2), 2).unwrap();
        assert!(!rep.generator_zero && !rep.member);
    }

    #[test]
    fn low_rank_factorization() {
        let m = q(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        let (y, z) = factor_through_generator(&m, 2).unwrap();
        assert_eq!(mat_mul_rat(&y, &z), m);
        assert!(factor_through_generator(&m, 1).is_none());
    }

    #[test]
    fn recursive_degrees() {
        let g = recursive_generator(16, 2, &[2, 2]).unwrap();
        assert_eq!(g.seed_length(), 16);
        let coords = g.materialize();
        assert_eq!(coords.len(), 16);
        assert!(coords.iter().all(|c| c.degree() == Some(4) && c.is_homogeneous()));
        let g1 = recursive_generator(4, 1, &[1]).unwrap();
        let direct: Vec<Poly> = expand_stage(Some(1), &g1.stages[0]).into_iter().flatten().collect();
        assert_eq!(g1.materialize(), direct);
        assert!(matches!(recursive_generator(16, 2, &[2]), Err(Error::InconsistentSchedule(_))));
        assert!(matches!(recursive_generator(16, 1, &[5]), Err(Error::InconsistentSchedule(_))));
        assert!(matches!(recursive_generator(16, 1, &[0]), Err(Error::InconsistentSchedule(_))));
    }

    #[test]
    fn condenser_basics() {
        assert_eq!(fs_condenser(3, 1, &rat(1), None), Err(Error::BadOmega));
        assert_eq!(fs_condenser(3, 1, &rat(-1), None), Err(Error::BadOmega));
        let c = fs_condenser(4, 2, &rat(2), None).unwrap();
        assert_eq!(c.len(), 9);
        // W_2(3) row 1 is (6, 36, 216, 1296)
        assert_eq!(c.matrices[2][0], vec![rat(6), rat(36), rat(216), rat(1296)]);
        let a = q(&[&[1, 0], &[0, 1], &[1, 1], &[2, -1]]);
        assert!(condenser_failures(&c, &a) <= c.l);
        // rank 1 matrix: every condensed minor vanishes
        let m = q(&[&[1, 2, 0, 1], &[2, 4, 0, 2], &[0, 0, 0, 0], &[3, 6, 0, 3]]);
        assert!(condensed_minors(&c, &m).iter().all(Zero::is_zero));
    }

    #[test]
    fn one_sided_equations_miss_full_rank_matrices() {
        // E M Eᵀ is skew of odd order for skew M, so r = 1 never detects it
        let c = fs_condenser(2, 1, &rat(2), None).unwrap();
        let k = q(&[&[0, 1], &[-1, 0]]);
        assert!(condensed_minors(&c, &k).iter().all(Zero::is_zero));
        assert!(condensed_minors_with(&c, &k, Sides::TwoSided).iter().any(|v| !v.is_zero()));
        // an invertible 3×3 matrix invisible to all five one-sided minors
        let c = fs_condenser(3, 2, &rat(2), None).unwrap();
        let x = q(&[&[9, -9, 13], &[9, -9, -9], &[13, 9, 9]]);
        assert_eq!(linalg::rank(&x), 3);
        assert!(condensed_minors(&c, &x).iter().all(Zero::is_zero));
        assert!(condensed_minors_with(&c, &x, Sides::TwoSided).iter().any(|v| !v.is_zero()));
    }

    #[test]
    fn rank_equations() {
        let eqs = rank_lt_equations(&RankCondenser::identity(3)).unwrap();
        assert_eq!(eqs, vec![det_poly(&generic_matrix(3, 3))]);
        let c = fs_condenser(3, 2, &rat(2), None).unwrap();
        let eqs = rank_lt_equations(&c).unwrap();
        assert_eq!(eqs.len(), 5);
        let small = RankCondenser { matrices: c.matrices[..4].to_vec(), ..c.clone() };
        assert_eq!(rank_lt_equations(&small), Err(Error::CondenserTooSmall { have: 4, need: 5 }));
        let m = q(&[&[1, -1, 2], &[2, -2, 4], &[-3, 3, -6]]);
        let point: BTreeMap<VarId, Rat> = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .map(|(i, j)| (VarId::x(i as u32 + 1, j as u32 + 1), m[i][j].clone()))
            .collect();
        for e in eqs {
            let v = e.map_coeffs(|c| c.constant_term()).eval(&point).unwrap();
            assert!(v.is_zero());
        }
    }

    #[test]
    fn schwartz_zippel() {
        assert!(!sz_test(&Poly::zero(), 5, 1, 1, 10).unwrap());
        assert!(sz_test(&Poly::x(1, 1), 1, 7, 1, 10).unwrap());
        let half = Poly::from_rat(rat_frac(1, 2));
        assert!(sz_test(&(Poly::x(1, 1) * half), 3, 0, -5, 5).unwrap());
    }
}
