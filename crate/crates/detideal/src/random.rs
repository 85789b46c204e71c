//! Seeded random instances for tests, benchmarks and the acceptance suite.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::abp::{Edge, LayeredAbp};
use crate::pfaffian::{generic_skew, pfaffian};
use crate::poly::{det_poly, Family, Monomial, Poly, VarId};
use crate::scalar::{rat, Rat};
use crate::straighten::subsets;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

fn nonzero(rng: &mut Rng8, bound: i64) -> i64 {
    loop {
        let c = rng.gen_range(-bound..=bound);
        if c != 0 {
            return c;
        }
    }
}

/// Random monomial of exact degree `d` in the given variables.
pub fn random_monomial(rng: &mut Rng8, vars: &[VarId], d: u32) -> Monomial {
    let mut m = Monomial::one();
    for _ in 0..d {
        m = m.mul(&Monomial::var(vars.choose(rng).expect("no variables").clone()));
    }
    m
}

pub fn matrix_vars(n: usize, m: usize) -> Vec<VarId> {
    (1..=n as u32).flat_map(|i| (1..=m as u32).map(move |j| VarId::x(i, j))).collect()
}

/// Up to `terms` random monomials of degree ≤ `max_deg` over n×m x-variables,
/// with coefficients in `[−9, 9]∖{0}`.
pub fn random_poly(rng: &mut Rng8, n: usize, m: usize, max_deg: u32, terms: usize) -> Poly {
    let vars = matrix_vars(n, m);
    let mut p = Poly::zero();
    for _ in 0..terms {
        let d = rng.gen_range(0..=max_deg);
        p.add_assign(&Poly::rat_term(random_monomial(rng, &vars, d), rat(nonzero(rng, 9))));
    }
    p
}

/// A uniformly chosen r×r minor of the n×m generic matrix.
pub fn random_minor(rng: &mut Rng8, n: usize, m: usize, r: usize) -> Poly {
    let rows = subsets(n as u32, r as u32);
    let cols = subsets(m as u32, r as u32);
    let (rs, cs) = (rows.choose(rng).unwrap(), cols.choose(rng).unwrap());
    let sub: Vec<Vec<Poly>> = rs.iter().map(|&i| cs.iter().map(|&j| Poly::x(i, j)).collect()).collect();
    det_poly(&sub)
}

/// `Σ_k p_k·minor_k` with `summands` terms and multipliers of degree ≤ max_deg − r.
pub fn random_ideal_element(rng: &mut Rng8, n: usize, m: usize, r: usize, max_deg: u32, summands: usize) -> Poly {
    let mult_deg = max_deg.saturating_sub(r as u32);
    let mut f = Poly::zero();
    for _ in 0..summands {
        let p = random_poly(rng, n, m, mult_deg, 2);
        f.add_assign(&p.mul_ref(&random_minor(rng, n, m, r)));
    }
    f
}

/// Random integer matrix with entries in `[−bound, bound]`.
pub fn random_rat_matrix(rng: &mut Rng8, n: usize, m: usize, bound: i64) -> Vec<Vec<Rat>> {
    (0..n).map(|_| (0..m).map(|_| rat(rng.gen_range(-bound..=bound))).collect()).collect()
}

/// Product of random n×k and k×m integer matrices, so rank ≤ k.
pub fn random_rank_matrix(rng: &mut Rng8, n: usize, m: usize, k: usize, bound: i64) -> Vec<Vec<Rat>> {
    let a = random_rat_matrix(rng, n, k, bound);
    let b = random_rat_matrix(rng, k, m, bound);
    crate::linalg::mat_mul_rat(&a, &b)
}

/// Random skew-symmetric integer matrix.
pub fn random_skew_matrix(rng: &mut Rng8, size: usize, bound: i64) -> Vec<Vec<Rat>> {
    let mut a = vec![vec![Rat::zero(); size]; size];
    for i in 0..size {
        for j in i + 1..size {
            let v = rat(rng.gen_range(-bound..=bound));
            a[j][i] = -v.clone();
            a[i][j] = v;
        }
    }
    a
}

/// `Σ_k c_k·μ_k·Pf(S_k)` with |S_k| = order, over a generic skew matrix of the given size.
pub fn random_pfaff_element(rng: &mut Rng8, size: usize, order: usize, mult_deg: u32, summands: usize) -> Poly {
    let x = generic_skew(size);
    let vars: Vec<VarId> = (1..=size as u32).flat_map(|i| (i + 1..=size as u32).map(move |j| VarId::x(i, j))).collect();
    let sets = subsets(size as u32, order as u32);
    let mut f = Poly::zero();
    for _ in 0..summands {
        let s = sets.choose(rng).unwrap();
        let sub: Vec<Vec<Poly>> =
            s.iter().map(|&i| s.iter().map(|&j| x[i as usize - 1][j as usize - 1].clone()).collect()).collect();
        let pf = pfaffian(&sub).expect("principal submatrix is skew");
        let d = rng.gen_range(0..=mult_deg);
        let mu = Poly::rat_term(random_monomial(rng, &vars, d), rat(nonzero(rng, 5)));
        f.add_assign(&mu.mul_ref(&pf));
    }
    f
}

/// Random affine form `c₀ + Σ c_i y[i]` in `y[1..=k]`, never zero.
pub fn random_affine(rng: &mut Rng8, k: u32) -> Poly {
    loop {
        let mut p = Poly::from_int(rng.gen_range(-2..=2));
        for i in 1..=k {
            let c = rng.gen_range(-2..=2);
            if c != 0 {
                p.add_assign(&Poly::var(VarId::new(Family::Y, &[i])).scale_rat(&rat(c)));
            }
        }
        if !p.is_zero() {
            return p;
        }
    }
}

/// Random layered ABP with exactly `vertices` vertices (at least 2) and affine labels in `y[1..=k]`.
/// Inner vertices are spread over random layers; every vertex lies on some path.
pub fn random_abp(rng: &mut Rng8, vertices: usize, k: u32) -> LayeredAbp {
    assert!(vertices >= 2, "an ABP has a source and a sink");
    let inner = vertices - 2;
    let mut widths: Vec<usize> = Vec::new();
    let mut left = inner;
    while left > 0 {
        let w = rng.gen_range(1..=left.min(2));
        widths.push(w);
        left -= w;
    }
    let mut layers = vec![vec!["s".to_string()]];
    for (l, &w) in widths.iter().enumerate() {
        layers.push((0..w).map(|i| format!("v{}_{}", l + 1, i)).collect());
    }
    layers.push(vec!["t".to_string()]);
    let mut start = Vec::new();
    let mut acc = 0;
    for layer in &layers {
        start.push(acc);
        acc += layer.len();
    }
    let mut edges = Vec::new();
    for l in 0..layers.len() - 1 {
        for a in 0..layers[l].len() {
            for b in 0..layers[l + 1].len() {
                // keep every vertex connected; drop other edges at random
                let forced = a == 0 || b == 0;
                if forced || rng.gen_bool(0.5) {
                    edges.push(Edge { from: start[l] + a, to: start[l + 1] + b, label: random_affine(rng, k) });
                }
            }
        }
    }
    LayeredAbp::new(layers, edges).expect("layered by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::straighten::is_in_det_ideal;

    #[test]
    fn seeded_and_in_ideal() {
        let a = random_ideal_element(&mut rng(3), 3, 3, 2, 4, 2);
        let b = random_ideal_element(&mut rng(3), 3, 3, 2, 4, 2);
        assert_eq!(a, b);
        assert!(is_in_det_ideal(&a, 2).unwrap());
        let g = random_abp(&mut rng(1), 5, 2);
        assert_eq!(g.vertex_count(), 5);
        let s = random_skew_matrix(&mut rng(0), 4, 3);
        assert_eq!(s[1][0], -s[0][1].clone());
    }
}
