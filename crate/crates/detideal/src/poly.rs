//! Sparse multivariate polynomials over structured variable identifiers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::laurent::Laurent;
use crate::scalar::{format_rat, parse_rat, Rat, Ring};

/// Variable family tag. The derived order fixes the canonical term order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    X,
    Y,
    Z,
    Lambda,
    Xi,
    W,
    U,
    V,
    Aux,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::X => "x",
            Family::Y => "y",
            Family::Z => "z",
            Family::Lambda => "lambda",
            Family::Xi => "xi",
            Family::W => "w",
            Family::U => "u",
            Family::V => "v",
            Family::Aux => "aux",
        }
    }

    fn parse(s: &str) -> Option<Family> {
        Some(match s {
            "x" => Family::X,
            "y" => Family::Y,
            "z" => Family::Z,
            "lambda" | "λ" => Family::Lambda,
            "xi" | "ξ" => Family::Xi,
            "w" => Family::W,
            "u" => Family::U,
            "v" => Family::V,
            "aux" => Family::Aux,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId {
    pub family: Family,
    pub idx: SmallVec<[u32; 3]>,
}

impl VarId {
    pub fn new(family: Family, idx: &[u32]) -> Self {
        Self { family, idx: SmallVec::from_slice(idx) }
    }

    pub fn x(i: u32, j: u32) -> Self {
        Self::new(Family::X, &[i, j])
    }

    pub fn y1(i: u32) -> Self {
        Self::new(Family::Y, &[i])
    }

    /// The auxiliary parameter δ used by approximate oracles and compositions.
    pub fn delta() -> Self {
        Self::new(Family::Aux, &[0])
    }

    /// `(i, j)` for a two-index variable.
    pub fn pair(&self) -> Option<(u32, u32)> {
        match self.idx.as_slice() {
            [i, j] => Some((*i, *j)),
            _ => None,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("bad variable {s:?}"));
        let s = s.trim();
        let (fam, rest) = match s.find('[') {
            Some(p) => (&s[..p], Some(&s[p..])),
            None => (s, None),
        };
        let family = Family::parse(fam).ok_or_else(bad)?;
        let mut idx = SmallVec::new();
        if let Some(rest) = rest {
            let inner = rest.strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(bad)?;
            if !inner.trim().is_empty() {
                for part in inner.split(',') {
                    idx.push(part.trim().parse::<u32>().map_err(|_| bad())?);
                }
            }
        }
        Ok(Self { family, idx })
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.idx.iter().map(|i| i.to_string()).collect();
        write!(f, "{}[{}]", self.family.name(), idx.join(","))
    }
}

/// Exponent vector as a sorted list of `(variable, positive exponent)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(VarId, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    pub fn var(v: VarId) -> Self {
        Self(vec![(v, 1)])
    }

    pub fn from_pairs(it: impl IntoIterator<Item = (VarId, u32)>) -> Self {
        let mut map: BTreeMap<VarId, u32> = BTreeMap::new();
        for (v, e) in it {
            *map.entry(v).or_default() += e;
        }
        Self(map.into_iter().filter(|(_, e)| *e > 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VarId, u32)> {
        self.0.iter().map(|(v, e)| (v, *e))
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn deg_in(&self, v: &VarId) -> u32 {
        self.0.binary_search_by(|(w, _)| w.cmp(v)).map(|p| self.0[p].1).unwrap_or(0)
    }

    pub fn mul(&self, rhs: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / rhs` when `rhs` divides `self`.
    pub fn div(&self, rhs: &Monomial) -> Option<Monomial> {
        let mut out = Vec::new();
        for (v, e) in &self.0 {
            let d = rhs.deg_in(v);
            if d > *e {
                return None;
            }
            if *e > d {
                out.push((v.clone(), e - d));
            }
        }
        if rhs.0.iter().any(|(v, _)| self.deg_in(v) == 0) {
            return None;
        }
        Some(Monomial(out))
    }

    /// Splits into the part over `vars` and the rest.
    pub fn split(&self, vars: &BTreeSet<VarId>) -> (Monomial, Monomial) {
        let (a, b): (Vec<_>, Vec<_>) = self.0.iter().cloned().partition(|(v, _)| vars.contains(v));
        (Monomial(a), Monomial(b))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> =
            self.0.iter().map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") }).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Sparse polynomial: monomial to nonzero coefficient.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Polynomial<C> {
    terms: BTreeMap<Monomial, C>,
}

impl<C> Default for Polynomial<C> {
    fn default() -> Self {
        Self { terms: BTreeMap::new() }
    }
}

impl<C: Ring> Polynomial<C> {
    pub fn constant(c: C) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn term(m: Monomial, c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn var(v: VarId) -> Self {
        Self::term(Monomial::var(v), C::one())
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut out = Self::zero();
        for (m, c) in it {
            out.add_term(m, &c);
        }
        out
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, C> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, C> {
        self.terms
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: &C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                v.add_assign_ref(c);
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn add_assign(&mut self, rhs: &Self) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c);
        }
    }

    pub fn sub_assign(&mut self, rhs: &Self) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), &-c.clone());
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, v)| (m.clone(), v.mul_ref(c))))
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        Self { terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect() }
    }

    pub fn mul_ref(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), &ca.mul_ref(cb));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn deg_in(&self, v: &VarId) -> u32 {
        self.terms.keys().map(|m| m.deg_in(v)).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        self.terms.keys().flat_map(|m| m.iter().map(|(v, _)| v.clone())).collect()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            Some(d) => degs.all(|e| e == d),
            None => true,
        }
    }

    /// Ring-homomorphic substitution; unassigned variables stay fixed.
    pub fn substitute(&self, assign: &BTreeMap<VarId, Polynomial<C>>) -> Self {
        let mut cache: BTreeMap<(VarId, u32), Polynomial<C>> = BTreeMap::new();
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut acc = Polynomial::constant(c.clone());
            let mut fixed = Vec::new();
            for (v, e) in m.iter() {
                match assign.get(v) {
                    Some(p) => {
                        let pw = cache.entry((v.clone(), e)).or_insert_with(|| p.pow(e));
                        acc = acc.mul_ref(pw);
                    }
                    None => fixed.push((v.clone(), e)),
                }
                if acc.is_zero() {
                    break;
                }
            }
            if !fixed.is_empty() {
                acc = acc.mul_monomial(&Monomial(fixed));
            }
            out.add_assign(&acc);
        }
        out
    }

    /// Evaluation with every variable of the polynomial assigned a scalar.
    pub fn eval(&self, point: &BTreeMap<VarId, C>) -> Result<C> {
        let mut out = C::zero();
        for (m, c) in &self.terms {
            let mut acc = c.clone();
            for (v, e) in m.iter() {
                let x = point.get(v).ok_or_else(|| Error::InvalidInput(format!("no value for {v}")))?;
                for _ in 0..e {
                    acc = acc.mul_ref(x);
                }
            }
            out.add_assign_ref(&acc);
        }
        Ok(out)
    }

    /// Regroups as a polynomial in `vars` with coefficients over the remaining variables.
    pub fn group_by(&self, vars: &BTreeSet<VarId>) -> BTreeMap<Monomial, Polynomial<C>> {
        let mut out: BTreeMap<Monomial, Polynomial<C>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (a, b) = m.split(vars);
            out.entry(a).or_default().add_term(b, c);
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    pub fn map_coeffs<D: Ring>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        Polynomial::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// Keeps the terms whose monomial satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Self {
        Self { terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    pub fn ensure_budget(&self, budget: usize) -> Result<()> {
        if self.terms.len() > budget {
            Err(Error::BudgetExceeded(budget))
        } else {
            Ok(())
        }
    }
}

impl<C: Ring> Zero for Polynomial<C> {
    fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<C: Ring> One for Polynomial<C> {
    fn one() -> Self {
        Self::constant(C::one())
    }
}

impl<C: Ring> Add for Polynomial<C> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self.add_assign(&rhs);
        self
    }
}

impl<C: Ring> Sub for Polynomial<C> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self.sub_assign(&rhs);
        self
    }
}

impl<C: Ring> Mul for Polynomial<C> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.mul_ref(&rhs)
    }
}

impl<C: Ring> Neg for Polynomial<C> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect() }
    }
}

impl<C: Ring> Ring for Polynomial<C> {
    fn add_ref(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out.sub_assign(rhs);
        out
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        Polynomial::mul_ref(self, rhs)
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        self.add_assign(rhs);
    }
}

/// Laurent polynomial in ε over Q.
pub type EpsScalar = Laurent<Rat>;
/// Polynomial with ε-Laurent coefficients; the workhorse type.
pub type Poly = Polynomial<EpsScalar>;

pub fn eps_const(q: Rat) -> EpsScalar {
    Laurent::constant(q)
}

impl Poly {
    pub fn from_rat(q: Rat) -> Poly {
        Poly::constant(Laurent::constant(q))
    }

    pub fn from_int(n: i64) -> Poly {
        Poly::from_rat(crate::scalar::rat(n))
    }

    /// Rational multiple of a single monomial.
    pub fn rat_term(m: Monomial, q: Rat) -> Poly {
        Poly::term(m, Laurent::constant(q))
    }

    pub fn x(i: u32, j: u32) -> Poly {
        Poly::var(VarId::x(i, j))
    }

    pub fn scale_rat(&self, q: &Rat) -> Poly {
        self.scale(&Laurent::constant(q.clone()))
    }

    /// The ε^q coefficient, as an ε-free polynomial.
    pub fn eps_slice(&self, q: i64) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), Laurent::constant(c.coeff(q)))))
    }

    /// Minimum ε-exponent present; `None` for zero.
    pub fn eps_order(&self) -> Option<i64> {
        self.terms.values().filter_map(Laurent::order).min()
    }

    pub fn eps_max(&self) -> Option<i64> {
        self.terms.values().filter_map(Laurent::max_exponent).max()
    }

    pub fn is_eps_free(&self) -> bool {
        self.terms.values().all(Laurent::is_constant)
    }

    /// Drops every ε-exponent above `cap`.
    pub fn truncate_eps(&self, cap: i64) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut c = c.clone();
            c.truncate_above(cap);
            out.add_term(m.clone(), &c);
        }
        out
    }

    /// ε ↦ ε^n.
    pub fn scale_eps(&self, n: i64) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), c.scale_exponents(n))))
    }

    /// Multiplication by ε^k.
    pub fn shift_eps(&self, k: i64) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), c.shift(k))))
    }

    /// Substitutes a variable by ε^k (the variable disappears).
    pub fn subst_eps_power(&self, v: &VarId, k: i64) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let d = m.deg_in(v) as i64;
            let rest = Monomial::from_pairs(m.iter().filter(|(w, _)| *w != v).map(|(w, e)| (w.clone(), e)));
            out.add_term(rest, &c.shift(k.checked_mul(d).expect("epsilon exponent overflow")));
        }
        out
    }

    /// Rational-coefficient view; `None` if some coefficient involves ε.
    pub fn to_rat_poly(&self) -> Option<Polynomial<Rat>> {
        if !self.is_eps_free() {
            return None;
        }
        Some(self.map_coeffs(|c| c.constant_term()))
    }

    pub fn from_rat_poly(p: &Polynomial<Rat>) -> Poly {
        p.map_coeffs(|c| Laurent::constant(c.clone()))
    }

    /// `f(assign)` keeping only ε-exponents `≤ cap`. Partial products are pruned
    /// as soon as their exponent plus the minimum orders of the remaining factors
    /// exceeds the cap, so the cost tracks the surviving terms only.
    pub fn substitute_truncated(&self, assign: &BTreeMap<VarId, Poly>, cap: i64, budget: usize) -> Result<Poly> {
        let orders: BTreeMap<&VarId, Option<i64>> = assign.iter().map(|(v, p)| (v, p.eps_order())).collect();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut factors: Vec<&Poly> = Vec::new();
            let mut fixed = Vec::new();
            let mut dead = false;
            for (v, e) in m.iter() {
                match assign.get(v) {
                    Some(p) => {
                        if orders[v].is_none() {
                            dead = true;
                        }
                        for _ in 0..e {
                            factors.push(p);
                        }
                    }
                    None => fixed.push((v.clone(), e)),
                }
            }
            if dead {
                continue;
            }
            let mut suffix = vec![0i64; factors.len() + 1];
            for k in (0..factors.len()).rev() {
                suffix[k] =
                    suffix[k + 1].checked_add(factors[k].eps_order().unwrap_or(0)).ok_or(Error::ExponentOverflow)?;
            }
            let mut coef = c.clone();
            coef.truncate_above(cap.saturating_sub(suffix[0]));
            let mut acc = Poly::term(Monomial(fixed), coef);
            for (k, f) in factors.iter().enumerate() {
                let limit = cap.saturating_sub(suffix[k + 1]);
                let mut next = Poly::zero();
                for (ma, ca) in &acc.terms {
                    for (mb, cb) in &f.terms {
                        let prod = ca.mul_capped(cb, limit);
                        next.add_term(ma.mul(mb), &prod);
                    }
                }
                next.ensure_budget(budget)?;
                acc = next;
                if acc.is_zero() {
                    break;
                }
            }
            out.add_assign(&acc);
            out.ensure_budget(budget)?;
        }
        Ok(out)
    }

    /// Largest absolute ε-exponent, for overflow pre-checks.
    pub fn eps_magnitude(&self) -> i64 {
        self.terms.values().flat_map(|c| c.iter().map(|(e, _)| e.saturating_abs())).max().unwrap_or(0)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("[{c}]*{m}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Square matrix of polynomials, row-major.
pub type PolyMatrix = Vec<Vec<Poly>>;

/// Symbolic determinant by dynamic programming over column subsets.
pub fn det_poly(m: &[Vec<Poly>]) -> Poly {
    let k = m.len();
    if k == 0 {
        return Poly::one();
    }
    assert!(k <= 20, "determinant too large for subset expansion");
    // dp[mask] = signed sum over injective assignments of the first popcount(mask) rows to mask
    let mut dp: Vec<Option<Poly>> = vec![None; 1 << k];
    dp[0] = Some(Poly::one());
    for mask in 0usize..(1 << k) {
        let Some(cur) = dp[mask].take() else { continue };
        let row = mask.count_ones() as usize;
        if row == k {
            dp[mask] = Some(cur);
            continue;
        }
        for col in 0..k {
            if mask & (1 << col) != 0 || m[row][col].is_zero() {
                continue;
            }
            // sign: number of already used columns greater than col
            let inversions = (mask >> (col + 1)).count_ones();
            let mut term = cur.mul_ref(&m[row][col]);
            if inversions % 2 == 1 {
                term = -term;
            }
            let slot = &mut dp[mask | (1 << col)];
            match slot {
                Some(p) => p.add_assign(&term),
                None => *slot = Some(term),
            }
        }
        dp[mask] = Some(cur);
    }
    dp[(1 << k) - 1].take().unwrap_or_else(Poly::zero)
}

pub fn mat_mul(a: &[Vec<Poly>], b: &[Vec<Poly>]) -> PolyMatrix {
    let n = a.len();
    let inner = b.len();
    let m = if inner == 0 { 0 } else { b[0].len() };
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = Poly::zero();
                    for k in 0..inner {
                        if !a[i][k].is_zero() && !b[k][j].is_zero() {
                            acc.add_assign(&a[i][k].mul_ref(&b[k][j]));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn transpose(a: &[Vec<Poly>]) -> PolyMatrix {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len()).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn identity_matrix(n: usize) -> PolyMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { Poly::one() } else { Poly::zero() }).collect()).collect()
}

/// The generic n×m matrix of variables x[i,j].
pub fn generic_matrix(n: usize, m: usize) -> PolyMatrix {
    (1..=n as u32).map(|i| (1..=m as u32).map(|j| Poly::x(i, j)).collect()).collect()
}

/// Substitution x[i,j] ↦ entry (i,j) of `m`.
pub fn matrix_assignment(m: &[Vec<Poly>]) -> BTreeMap<VarId, Poly> {
    let mut out = BTreeMap::new();
    for (i, row) in m.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            out.insert(VarId::x(i as u32 + 1, j as u32 + 1), p.clone());
        }
    }
    out
}

// ---------- JSON ----------

use serde_json::{json, Map, Value};

pub fn eps_to_json(c: &EpsScalar) -> Value {
    let mut map = Map::new();
    for (e, q) in c.iter() {
        map.insert(e.to_string(), Value::String(format_rat(q)));
    }
    Value::Object(map)
}

pub fn eps_from_json(v: &Value) -> Result<EpsScalar> {
    match v {
        Value::Object(map) => {
            let mut out = EpsScalar::zero();
            for (k, q) in map {
                let e: i64 = k.parse().map_err(|_| Error::InvalidInput(format!("bad eps exponent {k:?}")))?;
                out.add_term(e, &rat_from_json(q)?);
            }
            Ok(out)
        }
        other => Ok(Laurent::constant(rat_from_json(other)?)),
    }
}

pub fn rat_from_json(v: &Value) -> Result<Rat> {
    match v {
        Value::String(s) => parse_rat(s),
        Value::Number(n) => parse_rat(&n.to_string()),
        _ => Err(Error::InvalidInput(format!("expected rational, got {v}"))),
    }
}

pub fn poly_to_json(p: &Poly) -> Value {
    let terms: Vec<Value> = p
        .terms
        .iter()
        .map(|(m, c)| {
            let mut mono = Map::new();
            for (v, e) in m.iter() {
                mono.insert(v.to_string(), json!(e));
            }
            json!({"coef": eps_to_json(c), "mono": Value::Object(mono)})
        })
        .collect();
    json!({ "terms": terms })
}

pub fn poly_from_json(v: &Value) -> Result<Poly> {
    let terms = v
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidInput("polynomial needs a \"terms\" array".into()))?;
    let mut out = Poly::zero();
    for t in terms {
        let coef = eps_from_json(t.get("coef").ok_or_else(|| Error::InvalidInput("term without coef".into()))?)?;
        let mut pairs = Vec::new();
        if let Some(mono) = t.get("mono") {
            let mono = mono.as_object().ok_or_else(|| Error::InvalidInput("mono must be an object".into()))?;
            for (k, e) in mono {
                let e = e
                    .as_u64()
                    .filter(|e| *e <= u32::MAX as u64)
                    .ok_or_else(|| Error::InvalidInput(format!("bad exponent for {k}")))?;
                pairs.push((VarId::parse(k)?, e as u32));
            }
        }
        out.add_term(Monomial::from_pairs(pairs), &coef);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn x(i: u32) -> Poly {
        Poly::var(VarId::new(Family::X, &[i]))
    }

    #[test]
    fn add_cancels() {
        let p = x(1) + x(2) + (-x(1));
        assert_eq!(p, x(2));
        assert_eq!(p.clone() + Poly::zero(), p);
    }

    #[test]
    fn eps_terms_merge() {
        let a = x(1).shift_eps(1) + x(1).shift_eps(-1);
        assert_eq!(a.len(), 1);
        assert_eq!(a.eps_order(), Some(-1));
        let b = x(1).shift_eps(1).mul_ref(&x(2).shift_eps(-1));
        assert_eq!(b, x(1) * x(2));
    }

    #[test]
    fn difference_of_squares() {
        let p = (x(1) + x(2)) * (x(1) - x(2));
        assert_eq!(p, x(1).pow(2) - x(2).pow(2));
    }

    #[test]
    fn substitution_examples() {
        let v1 = VarId::new(Family::X, &[1]);
        let p = x(1) * x(2);
        let a: BTreeMap<_, _> = [(v1.clone(), x(2))].into_iter().collect();
        assert_eq!(p.substitute(&a), x(2).pow(2));
        let a: BTreeMap<_, _> = [(v1, x(1).shift_eps(-1))].into_iter().collect();
        assert_eq!(x(1).substitute(&a), x(1).shift_eps(-1));
        let det2 = det_poly(&generic_matrix(2, 2));
        assert_eq!(det2.substitute(&matrix_assignment(&identity_matrix(2))), Poly::one());
    }

    #[test]
    fn slices() {
        let p = x(1).shift_eps(2) + x(2).shift_eps(3);
        assert_eq!(p.eps_slice(2), x(1));
        assert!(x(1).eps_slice(1).is_zero());
        assert_eq!((x(1).shift_eps(-1) + x(2)).eps_order(), Some(-1));
    }

    #[test]
    fn det3_has_six_terms() {
        let d = det_poly(&generic_matrix(3, 3));
        assert_eq!(d.len(), 6);
        assert_eq!(
            d.coeff(&Monomial::from_pairs([(VarId::x(1, 3), 1), (VarId::x(2, 2), 1), (VarId::x(3, 1), 1)])),
            eps_const(rat(-1))
        );
    }

    #[test]
    fn json_round_trip() {
        let p = x(1).shift_eps(-3).scale_rat(&crate::scalar::rat_frac(-2, 7)) + Poly::x(1, 2).pow(2);
        let v = poly_to_json(&p);
        assert_eq!(poly_from_json(&v).unwrap(), p);
        let s1 = serde_json::to_string(&v).unwrap();
        let s2 = serde_json::to_string(&poly_to_json(&poly_from_json(&v).unwrap())).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn truncated_substitution_agrees_with_full() {
        let f = x(1) * x(2) - x(3).pow(2);
        let vars: Vec<VarId> = (1..=3).map(|i| VarId::new(Family::X, &[i])).collect();
        let forms = [x(1).shift_eps(-2) + x(2), x(2).shift_eps(2) + x(3).shift_eps(-1), x(1).shift_eps(-1) + x(3)];
        let assign: BTreeMap<_, _> = vars.into_iter().zip(forms).collect();
        let full = f.substitute(&assign);
        for cap in -5..3 {
            assert_eq!(f.substitute_truncated(&assign, cap, 1 << 20).unwrap(), full.truncate_eps(cap));
        }
    }
}
