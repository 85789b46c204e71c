//! Layered algebraic branching programs.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::poly::{poly_from_json, poly_to_json, Family, Monomial, Poly, PolyMatrix, VarId};

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub label: Poly,
}

/// Vertices are numbered consecutively layer by layer; the first layer holds
/// only the source and the last only the sink.
#[derive(Clone, Debug, PartialEq)]
pub struct LayeredAbp {
    layers: Vec<Vec<String>>,
    edges: Vec<Edge>,
}

impl LayeredAbp {
    pub fn new(layers: Vec<Vec<String>>, edges: Vec<Edge>) -> Result<Self> {
        if layers.len() < 2 || layers[0].len() != 1 || layers[layers.len() - 1].len() != 1 {
            return Err(Error::InvalidInput("an ABP needs a lone source layer and a lone sink layer".into()));
        }
        let p = Self { layers, edges };
        let layer_of = p.layer_index();
        for e in &p.edges {
            let (Some(a), Some(b)) = (layer_of.get(e.from), layer_of.get(e.to)) else {
                return Err(Error::InvalidInput(format!("edge {}→{} names a missing vertex", e.from, e.to)));
            };
            if *b != a + 1 {
                return Err(Error::InvalidInput(format!("edge {}→{} skips layers", e.from, e.to)));
            }
            if e.label.degree().unwrap_or(0) > 1 {
                return Err(Error::InvalidInput("edge labels must be affine".into()));
            }
        }
        Ok(p)
    }

    pub fn layers(&self) -> &[Vec<String>] {
        &self.layers
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    /// Number of edges on every source–sink path.
    pub fn path_length(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn source(&self) -> usize {
        0
    }

    pub fn sink(&self) -> usize {
        self.vertex_count() - 1
    }

    fn layer_index(&self) -> Vec<usize> {
        self.layers.iter().enumerate().flat_map(|(l, vs)| std::iter::repeat_n(l, vs.len())).collect()
    }

    /// Polynomial computed at every vertex, by layered dynamic programming.
    pub fn vertex_values(&self) -> Vec<Poly> {
        let mut val = vec![Poly::zero(); self.vertex_count()];
        val[0] = Poly::one();
        let mut edges: Vec<&Edge> = self.edges.iter().collect();
        edges.sort_by_key(|e| e.from);
        for e in edges {
            if !val[e.from].is_zero() {
                let contrib = val[e.from].mul_ref(&e.label);
                val[e.to].add_assign(&contrib);
            }
        }
        val
    }

    pub fn eval(&self) -> Poly {
        self.vertex_values().pop().unwrap_or_else(Poly::zero)
    }

    /// Variables appearing in edge labels.
    pub fn vars(&self) -> BTreeSet<VarId> {
        self.edges.iter().flat_map(|e| e.label.vars()).collect()
    }

    /// Drops vertices off every source–sink path and vertices computing zero.
    pub fn prune(&self) -> LayeredAbp {
        let n = self.vertex_count();
        let vals = self.vertex_values();
        let live_edges: Vec<&Edge> = self.edges.iter().filter(|e| !e.label.is_zero()).collect();
        let mut fwd = vec![false; n];
        fwd[0] = true;
        let mut sorted = live_edges.clone();
        sorted.sort_by_key(|e| e.from);
        for e in &sorted {
            if fwd[e.from] {
                fwd[e.to] = true;
            }
        }
        let mut back = vec![false; n];
        back[n - 1] = true;
        sorted.sort_by_key(|e| std::cmp::Reverse(e.to));
        for e in &sorted {
            if back[e.to] {
                back[e.from] = true;
            }
        }
        let keep: Vec<bool> =
            (0..n).map(|v| v == 0 || v == n - 1 || (fwd[v] && back[v] && !vals[v].is_zero())).collect();
        let mut remap = vec![usize::MAX; n];
        let mut layers = Vec::new();
        let mut next = 0;
        let mut id = 0;
        for layer in &self.layers {
            let mut kept = Vec::new();
            for name in layer {
                if keep[id] {
                    remap[id] = next;
                    next += 1;
                    kept.push(name.clone());
                }
                id += 1;
            }
            layers.push(kept);
        }
        let edges = live_edges
            .into_iter()
            .filter(|e| keep[e.from] && keep[e.to])
            .map(|e| Edge { from: remap[e.from], to: remap[e.to], label: e.label.clone() })
            .collect();
        LayeredAbp { layers, edges }
    }

    /// Replaces each label's constant `α₀` by `α₀·z` after pruning, so layer `i`
    /// computes a degree-`i` homogeneous polynomial.
    pub fn homogenize(&self, z: &VarId) -> Result<LayeredAbp> {
        if self.vars().contains(z) {
            return Err(Error::VariableMismatch(format!("{z} already occurs in the program")));
        }
        let mut p = self.prune();
        for e in &mut p.edges {
            let c = e.label.coeff(&Monomial::one());
            if !c.is_zero() {
                e.label = e.label.filter(|m| !m.is_one()) + Poly::var(z.clone()).scale(&c);
            }
        }
        Ok(p)
    }

    /// Valiant's cycle-cover matrix with `det = 1 + g` and every proper leading
    /// principal minor equal to 1. The dimension is the vertex count.
    pub fn valiant_matrix(&self) -> PolyMatrix {
        let m = self.vertex_count();
        let mut a = vec![vec![Poly::zero(); m]; m];
        let (s, t) = (self.source(), self.sink());
        if self.path_length().is_multiple_of(2) {
            // index = vertex id; back edge t → s closes every path into an odd cycle
            for e in &self.edges {
                a[e.from][e.to].add_assign(&e.label);
            }
            a[t][s] = Poly::one();
        } else {
            // s and t merge into the last index; the isolated vertex takes index 0
            let idx = |v: usize| if v == s || v == t { m - 1 } else { v };
            for e in &self.edges {
                a[idx(e.from)][idx(e.to)].add_assign(&e.label);
            }
        }
        // unit self-loops; a length-one path already left a loop on the merged vertex
        for (i, row) in a.iter_mut().enumerate() {
            row[i].add_assign(&Poly::one());
        }
        a
    }

    pub fn to_json(&self) -> Value {
        let ids: Vec<&String> = self.layers.iter().flatten().collect();
        let edges: Vec<Value> = self
            .edges
            .iter()
            .map(|e| json!({"from": ids[e.from], "to": ids[e.to], "label": poly_to_json(&e.label)}))
            .collect();
        json!({"layers": self.layers, "edges": edges})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let layers: Vec<Vec<String>> = serde_json::from_value(
            v.get("layers").cloned().ok_or_else(|| Error::InvalidInput("ABP needs layers".into()))?,
        )
        .map_err(|e| Error::InvalidInput(format!("bad layers: {e}")))?;
        let mut ids = HashMap::new();
        for (k, name) in layers.iter().flatten().enumerate() {
            if ids.insert(name.clone(), k).is_some() {
                return Err(Error::InvalidInput(format!("duplicate vertex {name}")));
            }
        }
        let mut edges = Vec::new();
        for e in v.get("edges").and_then(Value::as_array).cloned().unwrap_or_default() {
            let end = |k: &str| -> Result<usize> {
                let name =
                    e.get(k).and_then(Value::as_str).ok_or_else(|| Error::InvalidInput(format!("edge needs {k}")))?;
                ids.get(name).copied().ok_or_else(|| Error::InvalidInput(format!("unknown vertex {name}")))
            };
            let label = poly_from_json(e.get("label").ok_or_else(|| Error::InvalidInput("edge needs label".into()))?)?;
            edges.push(Edge { from: end("from")?, to: end("to")?, label });
        }
        Self::new(layers, edges)
    }
}

/// Pads a Valiant matrix to size `r` with identity rows and columns inserted
/// before the last index, preserving both the determinant and the unit minors.
pub fn pad_valiant(a: &PolyMatrix, r: usize) -> Result<PolyMatrix> {
    let m = a.len();
    if m > r {
        return Err(Error::TooManyVertices { vertices: m, limit: r });
    }
    let pos = |i: usize| if i + 1 == m { r - 1 } else { i };
    let mut out = vec![vec![Poly::zero(); r]; r];
    for (i, row) in out.iter_mut().enumerate() {
        row[i] = Poly::one();
    }
    for i in 0..m {
        for j in 0..m {
            out[pos(i)][pos(j)] = a[i][j].clone();
        }
    }
    Ok(out)
}

fn abp_builder() -> (Vec<Vec<String>>, Vec<Edge>) {
    (Vec::new(), Vec::new())
}

/// Determinant of the generic `t×t` matrix by clow sequences: vertices `(h, u)`
/// track the current clow head and position, with increasing heads.
pub fn det_abp(t: usize) -> LayeredAbp {
    assert!(t >= 1, "determinant size must be positive");
    let x = |u: usize, v: usize| Poly::x(u as u32 + 1, v as u32 + 1);
    let (mut layers, mut edges) = abp_builder();
    layers.push(vec!["s".to_string()]);
    // ids of (h,u) for inner layers 1..t-1
    let mut id: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    let mut next = 1;
    for l in 1..t {
        let mut names = Vec::new();
        for h in 0..t {
            for u in h..t {
                id.insert((l, h, u), next);
                next += 1;
                names.push(format!("c{l}_{}_{}", h + 1, u + 1));
            }
        }
        layers.push(names);
    }
    layers.push(vec!["t".to_string()]);
    let sink = next;
    let sink_sign = if t.is_multiple_of(2) { Poly::one() } else { -Poly::one() };
    // out-edges of state (h,u) sitting at layer l, attributed to vertex `from`
    let emit = |from: usize, l: usize, h: usize, u: usize, edges: &mut Vec<Edge>| {
        if l + 1 == t {
            edges.push(Edge { from, to: sink, label: -(x(u, h) * sink_sign.clone()) });
            return;
        }
        for v in h + 1..t {
            edges.push(Edge { from, to: id[&(l + 1, h, v)], label: x(u, v) });
        }
        for h2 in h + 1..t {
            edges.push(Edge { from, to: id[&(l + 1, h2, h2)], label: -x(u, h) });
        }
    };
    for h in 0..t {
        emit(0, 0, h, h, &mut edges);
    }
    for l in 1..t {
        for h in 0..t {
            for u in h..t {
                emit(id[&(l, h, u)], l, h, u, &mut edges);
            }
        }
    }
    LayeredAbp { layers, edges }.prune()
}

/// Iterated product of `d` matrices, `1×w`, then `w×w`, then `w×1`, with
/// entries `y[k,i,j]`; `w(d−1)+2` vertices.
pub fn imm_abp(w: usize, d: usize) -> LayeredAbp {
    assert!(w >= 1 && d >= 1, "width and length must be positive");
    let y = |k: usize, i: usize, j: usize| Poly::var(VarId::new(Family::Y, &[k as u32, i as u32, j as u32]));
    let mut layers = vec![vec!["s".to_string()]];
    for l in 1..d {
        layers.push((1..=w).map(|i| format!("v{l}_{i}")).collect());
    }
    layers.push(vec!["t".to_string()]);
    let vid = |l: usize, i: usize| 1 + (l - 1) * w + (i - 1);
    let sink = if d == 1 { 1 } else { 1 + (d - 1) * w };
    let mut edges = Vec::new();
    if d == 1 {
        edges.push(Edge { from: 0, to: sink, label: y(1, 1, 1) });
    } else {
        for j in 1..=w {
            edges.push(Edge { from: 0, to: vid(1, j), label: y(1, 1, j) });
        }
        for l in 1..d - 1 {
            for i in 1..=w {
                for j in 1..=w {
                    edges.push(Edge { from: vid(l, i), to: vid(l + 1, j), label: y(l + 1, i, j) });
                }
            }
        }
        for i in 1..=w {
            edges.push(Edge { from: vid(d - 1, i), to: sink, label: y(d, i, 1) });
        }
    }
    LayeredAbp { layers, edges }
}

/// Independent oracle for `imm_abp`: the explicit matrix product.
pub fn imm_poly(w: usize, d: usize) -> Poly {
    let y = |k: usize, i: usize, j: usize| Poly::var(VarId::new(Family::Y, &[k as u32, i as u32, j as u32]));
    if d == 1 {
        return y(1, 1, 1);
    }
    let mut row: Vec<Poly> = (1..=w).map(|j| y(1, 1, j)).collect();
    for k in 2..d {
        row = (1..=w).map(|j| (1..=w).fold(Poly::zero(), |acc, i| acc + row[i - 1].mul_ref(&y(k, i, j)))).collect();
    }
    (1..=w).fold(Poly::zero(), |acc, i| acc + row[i - 1].mul_ref(&y(d, i, 1)))
}

/// Simple path `s → … → t` with the given labels.
pub fn path_abp(labels: Vec<Poly>) -> LayeredAbp {
    let k = labels.len();
    let mut layers = vec![vec!["s".to_string()]];
    for i in 1..k {
        layers.push(vec![format!("p{i}")]);
    }
    layers.push(vec!["t".to_string()]);
    let edges = labels.into_iter().enumerate().map(|(i, label)| Edge { from: i, to: i + 1, label }).collect();
    LayeredAbp { layers, edges }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{det_poly, generic_matrix, matrix_assignment};

    fn y(i: u32) -> Poly {
        Poly::var(VarId::new(Family::Y, &[i]))
    }

    fn two_paths() -> LayeredAbp {
        let layers = vec![vec!["s".into()], vec!["a".into(), "b".into()], vec!["t".into()]];
        let edges = vec![
            Edge { from: 0, to: 1, label: y(1) },
            Edge { from: 1, to: 3, label: y(2) },
            Edge { from: 0, to: 2, label: y(3) },
            Edge { from: 2, to: 3, label: y(4) },
        ];
        LayeredAbp::new(layers, edges).unwrap()
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(path_abp(vec![y(1)]).eval(), y(1));
        assert_eq!(path_abp(vec![y(1), y(2)]).eval(), y(1) * y(2));
        assert_eq!(two_paths().eval(), y(1) * y(2) + y(3) * y(4));
    }

    #[test]
    fn homogenization_examples() {
        let z = VarId::new(Family::Z, &[]);
        let p = path_abp(vec![Poly::one() + y(1)]);
        let h = p.homogenize(&z).unwrap();
        assert_eq!(h.eval(), Poly::var(z.clone()) + y(1));
        let unchanged = two_paths().homogenize(&z).unwrap();
        assert_eq!(unchanged, two_paths());
    }

    #[test]
    fn valiant_examples() {
        let a = path_abp(vec![y(1)]).valiant_matrix();
        assert_eq!(a.len(), 2);
        assert_eq!(det_poly(&a), Poly::one() + y(1));
        let a = path_abp(vec![y(1), y(2)]).valiant_matrix();
        assert_eq!(det_poly(&a), Poly::one() + y(1) * y(2));
        for k in 1..a.len() {
            let sub: PolyMatrix = a[..k].iter().map(|r| r[..k].to_vec()).collect();
            assert_eq!(det_poly(&sub), Poly::one());
        }
        let b = two_paths().valiant_matrix();
        assert_eq!(det_poly(&b), Poly::one() + two_paths().eval());
        let padded = pad_valiant(&b, 6).unwrap();
        assert_eq!(det_poly(&padded), Poly::one() + two_paths().eval());
        assert!(pad_valiant(&b, 3).is_err());
    }

    #[test]
    fn determinant_programs() {
        for t in 1..=4 {
            let p = det_abp(t);
            assert_eq!(p.eval(), det_poly(&generic_matrix(t, t)), "t = {t}");
            assert!(p.vertex_count() <= 2 + (t - 1) * t * (t + 1) / 2);
        }
        // measured counts after pruning; the documented constant is c = 2
        let counts: Vec<usize> = (1..=6).map(|t| det_abp(t).vertex_count()).collect();
        assert_eq!(counts, [2, 4, 11, 27, 55, 98]);
        for (t, c) in (1..=6).zip(&counts) {
            assert!(*c <= 2 * t * t * t);
            assert!(t == 1 || 2 * c <= t * t * t);
        }
        let p = det_abp(2);
        let m = vec![vec![Poly::x(1, 1), Poly::x(1, 2)], vec![Poly::x(2, 1), Poly::x(2, 2)]];
        assert_eq!(
            p.eval().substitute(&matrix_assignment(&m)),
            Poly::x(1, 1) * Poly::x(2, 2) - Poly::x(1, 2) * Poly::x(2, 1)
        );
    }

    #[test]
    fn imm_programs() {
        assert_eq!(imm_abp(2, 2).vertex_count(), 4);
        for (w, d) in [(1, 1), (1, 3), (2, 3), (3, 2)] {
            let p = imm_abp(w, d);
            assert_eq!(p.vertex_count(), w * (d - 1) + 2);
            assert_eq!(p.eval(), imm_poly(w, d));
        }
    }

    #[test]
    fn json_round_trip() {
        let p = two_paths();
        assert_eq!(LayeredAbp::from_json(&p.to_json()).unwrap(), p);
    }
}
