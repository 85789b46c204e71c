//! Partitions, conjugate-semistandard tableaux, bitableaux and the substitution operators.

use std::cmp::Ordering;

use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Nonincreasing sequence of positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(format!("{parts:?} is not a partition")));
        }
        Ok(Self(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Largest part, which is the width of a bitableau of this shape.
    pub fn width(&self) -> u32 {
        self.0.first().copied().unwrap_or(0)
    }

    /// Conjugate partition: part `i` counts the parts that are at least `i`.
    pub fn transpose(&self) -> Partition {
        let w = self.width();
        Partition((1..=w).map(|i| self.0.iter().filter(|&&p| p >= i).count() as u32).collect())
    }
}

/// All partitions of `d` with parts at most `max_part`, in lex-descending order.
pub fn partitions(d: u32, max_part: u32) -> Vec<Partition> {
    fn rec(rem: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        for p in (1..=max.min(rem)).rev() {
            cur.push(p);
            rec(rem - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, max_part, &mut Vec::new(), &mut out);
    out
}

/// Rows of positive entries; row `i` has length `σ_i` of the shape.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tableau {
    rows: Vec<Vec<u32>>,
}

impl Tableau {
    pub fn new(rows: Vec<Vec<u32>>) -> Result<Self> {
        let shape: Vec<u32> = rows.iter().map(|r| r.len() as u32).collect();
        Partition::new(shape)?;
        if rows.iter().flatten().any(|&e| e == 0) {
            return Err(Error::InvalidInput("tableau entries must be positive".into()));
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn shape(&self) -> Partition {
        Partition(self.rows.iter().map(|r| r.len() as u32).collect())
    }

    pub fn max_entry(&self) -> u32 {
        self.rows.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Strictly increasing rows, weakly increasing columns.
    pub fn is_standard(&self) -> bool {
        let rows_ok = self.rows.iter().all(|r| r.windows(2).all(|w| w[0] < w[1]));
        let cols_ok = self.rows.windows(2).all(|w| w[1].iter().zip(&w[0]).all(|(b, a)| a <= b));
        rows_ok && cols_ok
    }

    /// Multiplicity of each value `1..=n`.
    pub fn content(&self, n: usize) -> Vec<u32> {
        let mut c = vec![0; n];
        for &e in self.rows.iter().flatten() {
            c[e as usize - 1] += 1;
        }
        c
    }

    pub fn to_json(&self) -> Value {
        json!(self.rows)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let rows: Vec<Vec<u32>> =
            serde_json::from_value(v.clone()).map_err(|e| Error::InvalidInput(format!("bad tableau: {e}")))?;
        Self::new(rows)
    }
}

/// Row `i` is `1..=σ_i`.
pub fn k_tableau(sigma: &Partition) -> Tableau {
    Tableau { rows: sigma.0.iter().map(|&p| (1..=p).collect()).collect() }
}

/// Row `i` holds the last `σ_i` values of `1..=n`.
pub fn kbar_tableau(sigma: &Partition, n: u32) -> Result<Tableau> {
    if sigma.width() > n {
        return Err(Error::ShapeOutOfBounds(format!("shape {:?} does not fit entries ≤ {n}", sigma.0)));
    }
    Ok(Tableau { rows: sigma.0.iter().map(|&p| (n - p + 1..=n).collect()).collect() })
}

/// `S_i^j`: in each row containing `i` but not `j`, replace `i` by `j` and re-sort.
/// Also returns the number of rows changed.
pub fn sub_op(i: u32, j: u32, t: &Tableau) -> (Tableau, u32) {
    assert_ne!(i, j, "substitution operator needs distinct indices");
    let mut h = 0;
    let rows = t
        .rows
        .iter()
        .map(|r| {
            if r.contains(&i) && !r.contains(&j) {
                h += 1;
                let mut r: Vec<u32> = r.iter().map(|&e| if e == i { j } else { e }).collect();
                r.sort_unstable();
                r
            } else {
                r.clone()
            }
        })
        .collect();
    (Tableau { rows }, h)
}

/// The pairs `(1,2) ≺ (1,3) ≺ … ≺ (n−1,n)` in application order.
pub fn operator_chain(n: u32) -> Vec<(u32, u32)> {
    (1..n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect()
}

/// Applies the full chain, returning the result and the counts `h_i^j` in chain order.
pub fn apply_chain(t: &Tableau, n: u32) -> (Tableau, Vec<u32>) {
    let mut cur = t.clone();
    let mut hs = Vec::new();
    for (i, j) in operator_chain(n) {
        let (next, h) = sub_op(i, j, &cur);
        cur = next;
        hs.push(h);
    }
    (cur, hs)
}

/// Standard tableaux of the given shape, optionally with prescribed content,
/// with entries in `1..=n`, in row-major lexicographic order.
pub fn enumerate_tableaux(shape: &Partition, n: u32, content: Option<&[u32]>) -> Vec<Tableau> {
    struct Ctx<'a> {
        shape: &'a [u32],
        n: u32,
        remaining: Option<Vec<u32>>,
        rows: Vec<Vec<u32>>,
        out: Vec<Tableau>,
    }
    fn rec(c: &mut Ctx<'_>, r: usize, k: usize) {
        if r == c.shape.len() {
            c.out.push(Tableau { rows: c.rows.clone() });
            return;
        }
        if k == c.shape[r] as usize {
            c.rows.push(Vec::new());
            rec(c, r + 1, 0);
            c.rows.pop();
            return;
        }
        let left = if k > 0 { c.rows[r][k - 1] + 1 } else { 1 };
        let above = if r > 0 { c.rows[r - 1][k] } else { 1 };
        let len = c.shape[r];
        // the row still needs len - k strictly increasing values ≤ n
        let hi = c.n + 1 - (len - k as u32);
        for v in left.max(above)..=hi {
            if let Some(rem) = &mut c.remaining {
                if rem[v as usize - 1] == 0 {
                    continue;
                }
                rem[v as usize - 1] -= 1;
            }
            c.rows[r].push(v);
            rec(c, r, k + 1);
            c.rows[r].pop();
            if let Some(rem) = &mut c.remaining {
                rem[v as usize - 1] += 1;
            }
        }
    }
    if let Some(ct) = content {
        if ct.len() != n as usize || ct.iter().sum::<u32>() != shape.size() {
            return Vec::new();
        }
    }
    if shape.width() > n {
        return Vec::new();
    }
    let mut c =
        Ctx { shape: &shape.0, n, remaining: content.map(<[u32]>::to_vec), rows: vec![Vec::new()], out: Vec::new() };
    if shape.is_empty() {
        return vec![Tableau { rows: Vec::new() }];
    }
    rec(&mut c, 0, 0);
    c.out
        .into_iter()
        .map(|mut t| {
            t.rows.retain(|r| !r.is_empty());
            t
        })
        .collect()
}

/// A pair of tableaux of the same shape: `S` indexes rows, `T` indexes columns.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bitableau {
    pub s: Tableau,
    pub t: Tableau,
}

impl Bitableau {
    pub fn new(s: Tableau, t: Tableau) -> Result<Self> {
        if s.shape() != t.shape() {
            return Err(Error::InvalidInput("bitableau sides differ in shape".into()));
        }
        Ok(Self { s, t })
    }

    pub fn shape(&self) -> Partition {
        self.s.shape()
    }

    pub fn width(&self) -> u32 {
        self.shape().width()
    }

    pub fn is_standard(&self) -> bool {
        self.s.is_standard() && self.t.is_standard()
    }

    pub fn to_json(&self) -> Value {
        json!({"S": self.s.to_json(), "T": self.t.to_json()})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let side = |k: &str| v.get(k).ok_or_else(|| Error::InvalidInput(format!("bitableau needs {k}")));
        Self::new(Tableau::from_json(side("S")?)?, Tableau::from_json(side("T")?)?)
    }
}

/// Canonical order: shape lex-descending, then `S`, then `T`, row-major.
impl Ord for Bitableau {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .shape()
            .cmp(&self.shape())
            .then_with(|| self.s.rows.cmp(&other.s.rows))
            .then_with(|| self.t.rows.cmp(&other.t.rows))
    }
}

impl PartialOrd for Bitableau {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Standard bitableaux whose `S` has content `alpha` and `T` has content `beta`, in canonical order.
pub fn enumerate_bitableaux(alpha: &[u32], beta: &[u32]) -> Vec<Bitableau> {
    let d: u32 = alpha.iter().sum();
    if d != beta.iter().sum::<u32>() {
        return Vec::new();
    }
    let (n, m) = (alpha.len() as u32, beta.len() as u32);
    let mut out = Vec::new();
    for shape in partitions(d, n.min(m)) {
        let ss = enumerate_tableaux(&shape, n, Some(alpha));
        if ss.is_empty() {
            continue;
        }
        let ts = enumerate_tableaux(&shape, m, Some(beta));
        for s in &ss {
            for t in &ts {
                out.push(Bitableau { s: s.clone(), t: t.clone() });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn p(v: &[u32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn t(rows: &[&[u32]]) -> Tableau {
        Tableau::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn transpose_examples() {
        assert_eq!(p(&[4, 2, 2, 1]).transpose(), p(&[4, 3, 1, 1]));
        assert_eq!(p(&[3]).transpose(), p(&[1, 1, 1]));
        for d in 0..8 {
            for s in partitions(d, d) {
                assert_eq!(s.transpose().transpose(), s);
            }
        }
    }

    #[test]
    fn initial_and_final_tableaux() {
        let s = p(&[4, 3, 1]);
        assert_eq!(k_tableau(&s), t(&[&[1, 2, 3, 4], &[1, 2, 3], &[1]]));
        assert_eq!(kbar_tableau(&s, 5).unwrap(), t(&[&[2, 3, 4, 5], &[3, 4, 5], &[5]]));
        assert_eq!(kbar_tableau(&p(&[1]), 1).unwrap(), k_tableau(&p(&[1])));
        assert!(matches!(kbar_tableau(&s, 3), Err(Error::ShapeOutOfBounds(_))));
        for sh in partitions(6, 4) {
            assert!(k_tableau(&sh).is_standard());
            assert!(kbar_tableau(&sh, 4).unwrap().is_standard());
        }
    }

    #[test]
    fn substitution_examples() {
        let (out, h) = sub_op(1, 2, &t(&[&[1, 3], &[1, 2]]));
        assert_eq!(out, t(&[&[2, 3], &[1, 2]]));
        assert_eq!(h, 1);
        let tab = t(&[&[2, 3]]);
        assert_eq!(sub_op(1, 4, &tab), (tab.clone(), 0));
    }

    fn all_standard(n: u32, max_size: u32) -> Vec<Tableau> {
        (0..=max_size).flat_map(|d| partitions(d, n)).flat_map(|s| enumerate_tableaux(&s, n, None)).collect()
    }

    #[test]
    fn chain_reaches_final_tableau_injectively() {
        for n in 1..=4 {
            let mut seen = BTreeSet::new();
            for tab in all_standard(n, 4) {
                let (out, hs) = apply_chain(&tab, n);
                assert_eq!(out, kbar_tableau(&tab.shape(), n).unwrap(), "{tab:?}");
                assert!(seen.insert((tab.shape(), hs)), "chain counts collide for {tab:?}");
            }
        }
    }

    #[test]
    fn single_operator_is_injective_under_hypothesis() {
        for n in 2..=4u32 {
            for tab in all_standard(n, 4) {
                let mut cur = tab.clone();
                for (i, j) in operator_chain(n) {
                    let (next, _) = sub_op(i, j, &cur);
                    assert!(next.is_standard());
                    cur = next;
                }
            }
            // injectivity of each step, over all tableaux reachable at that step
            let chain = operator_chain(n);
            for step in 0..chain.len() {
                let mut seen = std::collections::BTreeMap::new();
                for tab in all_standard(n, 4) {
                    let mut cur = tab;
                    for &(i, j) in &chain[..step] {
                        cur = sub_op(i, j, &cur).0;
                    }
                    let (i, j) = chain[step];
                    let img = sub_op(i, j, &cur);
                    if let Some(prev) = seen.insert(img, cur.clone()) {
                        assert_eq!(prev, cur);
                    }
                }
            }
        }
    }

    #[test]
    fn enumeration_is_standard_and_distinct() {
        let all = all_standard(3, 4);
        let set: BTreeSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), all.len());
        assert!(all.iter().all(Tableau::is_standard));
        // row-major lexicographic order within a shape
        let sh = p(&[2, 1]);
        let ts = enumerate_tableaux(&sh, 3, None);
        assert!(ts.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(ts.len(), 8);
    }

    #[test]
    fn bitableau_counts() {
        assert_eq!(
            enumerate_bitableaux(&[1, 0], &[1, 0]).len()
                + enumerate_bitableaux(&[1, 0], &[0, 1]).len()
                + enumerate_bitableaux(&[0, 1], &[1, 0]).len()
                + enumerate_bitableaux(&[0, 1], &[0, 1]).len(),
            4
        );
        let bs = enumerate_bitableaux(&[1, 1], &[1, 1]);
        assert_eq!(bs.len(), 2);
        assert_eq!(bs[0].shape(), p(&[2]));
        assert_eq!(bs[1].shape(), p(&[1, 1]));
    }

    #[test]
    fn json_shapes() {
        let b = Bitableau::new(t(&[&[1, 2]]), t(&[&[1, 3]])).unwrap();
        assert_eq!(Bitableau::from_json(&b.to_json()).unwrap(), b);
        assert!(Bitableau::new(t(&[&[1]]), t(&[&[1, 2]])).is_err());
    }
}
