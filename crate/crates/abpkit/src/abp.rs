//! Algebraic branching programs: layered, multilayered, and unlayered,
//! together with the error ledger that makes every transform auditable.
//!
//! An ABP computes the sum over all start-to-end paths of the product of
//! the edge labels on the path. All three variants share that semantics;
//! they differ in the underlying graph discipline.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::Scalar;
use crate::poly::{PolyError, Ring, SparsePoly, TermDto};

#[derive(Debug, Error)]
pub enum AbpError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid ABP: {0}")]
    Invalid(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone)]
pub struct LabeledEdge {
    pub from: usize,
    pub to: usize,
    pub label: SparsePoly,
}

// ---------------------------------------------------------------------------
// Layered ABPs
// ---------------------------------------------------------------------------

/// A layered ABP. Vertices carry stable ids `0..n_vertices`; the layers
/// partition them, with the first and last layers singletons (start `s`
/// and end `t`). Edges run only between adjacent layers and carry labels
/// of degree at most `delta`.
#[derive(Debug, Clone)]
pub struct LayeredAbp {
    pub ring: Ring,
    pub delta: u32,
    pub layers: Vec<Vec<usize>>,
    pub edges: Vec<LabeledEdge>,
}

impl LayeredAbp {
    /// Allocates vertices layer by layer (`widths[0]` and the last width
    /// must be 1) and returns the ABP with no edges yet.
    pub fn from_layer_widths(ring: Ring, delta: u32, widths: &[usize]) -> Self {
        let mut layers = Vec::with_capacity(widths.len());
        let mut next = 0usize;
        for &w in widths {
            layers.push((next..next + w).collect());
            next += w;
        }
        LayeredAbp { ring, delta, layers, edges: Vec::new() }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, label: SparsePoly) {
        self.edges.push(LabeledEdge { from, to, label });
    }

    pub fn start(&self) -> usize {
        self.layers[0][0]
    }

    pub fn end(&self) -> usize {
        self.layers[self.layers.len() - 1][0]
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    /// Size is the vertex count.
    pub fn size(&self) -> usize {
        self.layers.iter().map(|l| l.len()).sum()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    fn layer_index(&self) -> HashMap<usize, usize> {
        let mut idx = HashMap::new();
        for (i, layer) in self.layers.iter().enumerate() {
            for &v in layer {
                idx.insert(v, i);
            }
        }
        idx
    }

    /// Drops zero-labeled edges; a zero edge never contributes a path weight.
    pub fn normalize_zero_edges(&mut self) {
        self.edges.retain(|e| !e.label.is_zero());
    }

    /// Sum over all `u -> v` paths of the product of edge labels, by
    /// dynamic programming over layers. Returns the zero polynomial when
    /// `u` and `v` are not connected, and 1 when `u == v`.
    pub fn path_sum(&self, u: usize, v: usize) -> SparsePoly {
        let idx = self.layer_index();
        let (lu, lv) = (idx[&u], idx[&v]);
        if u == v {
            return SparsePoly::one(self.ring);
        }
        if lu >= lv {
            return SparsePoly::zero(self.ring);
        }
        let mut value: HashMap<usize, SparsePoly> = HashMap::new();
        value.insert(u, SparsePoly::one(self.ring));
        for layer in (lu + 1)..=lv {
            for e in &self.edges {
                if idx[&e.to] != layer {
                    continue;
                }
                if let Some(src) = value.get(&e.from).cloned() {
                    let add = src.mul(&e.label);
                    value
                        .entry(e.to)
                        .and_modify(|p| *p = p.add(&add))
                        .or_insert(add);
                }
            }
            // keep only this layer's partial sums live for the next step
            let keep: Vec<usize> = self.layers[layer].clone();
            value.retain(|k, _| keep.contains(k) || *k == u);
        }
        value.remove(&v).unwrap_or_else(|| SparsePoly::zero(self.ring))
    }

    pub fn computed_polynomial(&self) -> SparsePoly {
        self.path_sum(self.start(), self.end())
    }

    /// Formal degrees of every vertex: `fdeg(s) = 0` and
    /// `fdeg(v) = max over incoming edges of deg(label) + fdeg(source)`.
    /// Unreachable vertices get `None`.
    pub fn formal_degrees(&self) -> Vec<Option<u32>> {
        let n = self.size();
        let idx = self.layer_index();
        let mut fdeg: Vec<Option<u32>> = vec![None; n];
        fdeg[self.start()] = Some(0);
        for layer in 1..self.layers.len() {
            for e in &self.edges {
                if idx[&e.to] != layer || e.label.is_zero() {
                    continue;
                }
                if let Some(src) = fdeg[e.from] {
                    let d = src + e.label.total_degree().finite().unwrap_or(0);
                    fdeg[e.to] = Some(fdeg[e.to].map_or(d, |cur| cur.max(d)));
                }
            }
        }
        fdeg
    }

    pub fn formal_degree_of(&self, v: usize) -> Option<u32> {
        self.formal_degrees()[v]
    }

    /// Formal degree of the ABP: the maximum over all vertices.
    pub fn formal_degree(&self) -> u32 {
        self.formal_degrees().iter().flatten().copied().max().unwrap_or(0)
    }

    /// Longest path (in edges) from the start vertex; for a layered ABP in
    /// which every edge crosses one layer this is the layer gap.
    pub fn depth(&self) -> usize {
        self.num_layers() - 1
    }

    /// Checks all structural invariants; empty iff well-formed.
    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        if self.layers.is_empty() {
            violations.push("no layers".to_string());
            return violations;
        }
        if self.layers[0].len() != 1 {
            violations.push("first layer must have exactly one vertex".to_string());
        }
        if self.layers[self.layers.len() - 1].len() != 1 {
            violations.push("last layer must have exactly one vertex".to_string());
        }
        let idx = self.layer_index();
        let mut seen = std::collections::HashSet::new();
        for layer in &self.layers {
            for &v in layer {
                if !seen.insert(v) {
                    violations.push(format!("vertex {v} appears in more than one layer"));
                }
            }
        }
        for e in &self.edges {
            match (idx.get(&e.from), idx.get(&e.to)) {
                (Some(&a), Some(&b)) => {
                    if b != a + 1 {
                        violations.push(format!(
                            "edge {} -> {} does not cross adjacent layers ({a} -> {b})",
                            e.from, e.to
                        ));
                    }
                }
                _ => violations.push(format!("edge {} -> {} references unknown vertex", e.from, e.to)),
            }
            if !e.label.total_degree().at_most(self.delta) {
                violations.push(format!(
                    "edge {} -> {} label degree {} exceeds delta {}",
                    e.from,
                    e.to,
                    e.label.total_degree(),
                    self.delta
                ));
            }
            if e.label.ring() != self.ring {
                violations.push(format!("edge {} -> {} label in wrong ring", e.from, e.to));
            }
        }
        violations
    }

    /// The same program as an unlayered ABP (vertex ids renumbered to be
    /// contiguous in layer order).
    pub fn to_unlayered(&self) -> UnlayeredAbp {
        let mut remap = HashMap::new();
        let mut next = 0usize;
        for layer in &self.layers {
            for &v in layer {
                remap.insert(v, next);
                next += 1;
            }
        }
        UnlayeredAbp {
            ring: self.ring,
            delta: self.delta,
            n_vertices: next,
            edges: self
                .edges
                .iter()
                .map(|e| LabeledEdge { from: remap[&e.from], to: remap[&e.to], label: e.label.clone() })
                .collect(),
            start: remap[&self.start()],
            end: remap[&self.end()],
        }
    }
}

// ---------------------------------------------------------------------------
// Multilayered ABPs
// ---------------------------------------------------------------------------

/// Several layered ABPs in parallel sharing a logical start and end
/// vertex. The computed polynomial is the sum of the branch polynomials;
/// the shared endpoints are counted once in the size.
#[derive(Debug, Clone)]
pub struct MultilayeredAbp {
    pub branches: Vec<LayeredAbp>,
}

impl MultilayeredAbp {
    pub fn new(branches: Vec<LayeredAbp>) -> Self {
        assert!(!branches.is_empty(), "multilayered ABP needs at least one branch");
        MultilayeredAbp { branches }
    }

    pub fn ring(&self) -> Ring {
        self.branches[0].ring
    }

    pub fn delta(&self) -> u32 {
        self.branches.iter().map(|b| b.delta).max().unwrap()
    }

    /// `2 + sum_i (tau_i - 2)`: the vertex count with shared endpoints
    /// counted once.
    pub fn size(&self) -> usize {
        2 + self.branches.iter().map(|b| b.size() - 2).sum::<usize>()
    }

    pub fn num_layers(&self) -> usize {
        self.branches.iter().map(|b| b.num_layers()).max().unwrap()
    }

    pub fn num_edges(&self) -> usize {
        self.branches.iter().map(|b| b.num_edges()).sum()
    }

    pub fn computed_polynomial(&self) -> SparsePoly {
        let mut acc = SparsePoly::zero(self.ring());
        for b in &self.branches {
            acc = acc.add(&b.computed_polynomial());
        }
        acc
    }

    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        let ring = self.ring();
        for (i, b) in self.branches.iter().enumerate() {
            for msg in b.validate() {
                v.push(format!("branch {i}: {msg}"));
            }
            if b.ring != ring {
                v.push(format!("branch {i}: ring differs from branch 0"));
            }
            if b.size() < 2 {
                v.push(format!("branch {i}: fewer than two vertices"));
            }
        }
        v
    }

    /// Merges the branches into one DAG sharing `s` and `t`. Vertex count
    /// of the result equals `size()`.
    pub fn merged_unlayered(&self) -> UnlayeredAbp {
        let ring = self.ring();
        let start = 0usize;
        let end = 1usize;
        let mut next = 2usize;
        let mut edges = Vec::new();
        for b in &self.branches {
            let mut remap: HashMap<usize, usize> = HashMap::new();
            remap.insert(b.start(), start);
            remap.insert(b.end(), end);
            for layer in &b.layers {
                for &v in layer {
                    remap.entry(v).or_insert_with(|| {
                        let id = next;
                        next += 1;
                        id
                    });
                }
            }
            for e in &b.edges {
                edges.push(LabeledEdge { from: remap[&e.from], to: remap[&e.to], label: e.label.clone() });
            }
        }
        UnlayeredAbp { ring, delta: self.delta(), n_vertices: next, edges, start, end }
    }
}

impl From<LayeredAbp> for MultilayeredAbp {
    fn from(a: LayeredAbp) -> Self {
        MultilayeredAbp::new(vec![a])
    }
}

// ---------------------------------------------------------------------------
// Unlayered ABPs
// ---------------------------------------------------------------------------

/// An ABP over an arbitrary DAG with designated source and sink.
#[derive(Debug, Clone)]
pub struct UnlayeredAbp {
    pub ring: Ring,
    pub delta: u32,
    pub n_vertices: usize,
    pub edges: Vec<LabeledEdge>,
    pub start: usize,
    pub end: usize,
}

impl UnlayeredAbp {
    pub fn size(&self) -> usize {
        self.n_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Kahn topological order; error if the graph has a cycle.
    pub fn topo_order(&self) -> Result<Vec<usize>, AbpError> {
        topo_order(self.n_vertices, self.edges.iter().map(|e| (e.from, e.to)))
            .ok_or_else(|| AbpError::Invalid("graph has a cycle".to_string()))
    }

    /// Longest path (in edges) ending at each vertex, over the whole DAG.
    pub fn depths(&self) -> Vec<usize> {
        depths(self.n_vertices, &self.edge_pairs())
    }

    pub fn depth_of(&self, v: usize) -> usize {
        self.depths()[v]
    }

    /// Depth of the ABP: the longest path in the DAG.
    pub fn depth(&self) -> usize {
        self.depths().into_iter().max().unwrap_or(0)
    }

    pub fn edge_pairs(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|e| (e.from, e.to)).collect()
    }

    /// Sum over all `u -> v` paths of the product of edge labels, by DP in
    /// topological order. `u == v` gives 1; disconnected gives 0.
    pub fn path_sum(&self, u: usize, v: usize) -> SparsePoly {
        if u == v {
            return SparsePoly::one(self.ring);
        }
        let order = self.topo_order().expect("acyclic");
        let mut incoming: HashMap<usize, Vec<&LabeledEdge>> = HashMap::new();
        for e in &self.edges {
            incoming.entry(e.to).or_default().push(e);
        }
        let mut value: HashMap<usize, SparsePoly> = HashMap::new();
        value.insert(u, SparsePoly::one(self.ring));
        let mut started = false;
        for &w in &order {
            if w == u {
                started = true;
                continue;
            }
            if !started {
                continue;
            }
            let mut acc = SparsePoly::zero(self.ring);
            for e in incoming.get(&w).map(|v| v.as_slice()).unwrap_or(&[]) {
                if let Some(src) = value.get(&e.from) {
                    acc = acc.add(&src.mul(&e.label));
                }
            }
            if !acc.is_zero() {
                value.insert(w, acc);
            }
            if w == v {
                break;
            }
        }
        value.remove(&v).unwrap_or_else(|| SparsePoly::zero(self.ring))
    }

    pub fn computed_polynomial(&self) -> SparsePoly {
        self.path_sum(self.start, self.end)
    }

    pub fn formal_degrees(&self) -> Vec<Option<u32>> {
        let order = self.topo_order().expect("acyclic");
        let mut incoming: HashMap<usize, Vec<&LabeledEdge>> = HashMap::new();
        for e in &self.edges {
            if !e.label.is_zero() {
                incoming.entry(e.to).or_default().push(e);
            }
        }
        let mut fdeg: Vec<Option<u32>> = vec![None; self.n_vertices];
        fdeg[self.start] = Some(0);
        for &w in &order {
            if w == self.start {
                continue;
            }
            let mut best: Option<u32> = None;
            for e in incoming.get(&w).map(|v| v.as_slice()).unwrap_or(&[]) {
                if let Some(src) = fdeg[e.from] {
                    let d = src + e.label.total_degree().finite().unwrap_or(0);
                    best = Some(best.map_or(d, |b| b.max(d)));
                }
            }
            fdeg[w] = best;
        }
        fdeg
    }

    pub fn formal_degree_of(&self, v: usize) -> Option<u32> {
        self.formal_degrees()[v]
    }

    pub fn formal_degree(&self) -> u32 {
        self.formal_degrees().iter().flatten().copied().max().unwrap_or(0)
    }

    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        if self.topo_order().is_err() {
            violations.push("graph has a cycle".to_string());
            return violations;
        }
        for e in &self.edges {
            if e.from >= self.n_vertices || e.to >= self.n_vertices {
                violations.push(format!("edge {} -> {} references unknown vertex", e.from, e.to));
            }
            if !e.label.total_degree().at_most(self.delta) {
                violations.push(format!(
                    "edge {} -> {} label degree {} exceeds delta {}",
                    e.from,
                    e.to,
                    e.label.total_degree(),
                    self.delta
                ));
            }
        }
        for v in 0..self.n_vertices {
            if v != self.start && v != self.end && !self.on_some_path(v) {
                violations.push(format!("vertex {v} lies on no start-end path (run normalize to prune)"));
            }
        }
        violations
    }

    fn reach_from(&self, src: usize, forward: bool) -> Vec<bool> {
        let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
        for e in &self.edges {
            let (a, b) = if forward { (e.from, e.to) } else { (e.to, e.from) };
            adj.entry(a).or_default().push(b);
        }
        let mut seen = vec![false; self.n_vertices];
        let mut stack = vec![src];
        seen[src] = true;
        while let Some(v) = stack.pop() {
            for &w in adj.get(&v).map(|v| v.as_slice()).unwrap_or(&[]) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    fn on_some_path(&self, v: usize) -> bool {
        self.reach_from(self.start, true)[v] && self.reach_from(self.end, false)[v]
    }

    /// Removes zero-labeled edges and prunes vertices that lie on no
    /// start-end path, renumbering ids. Returns warnings describing what
    /// was dropped.
    pub fn normalize(&self) -> (UnlayeredAbp, Vec<String>) {
        let mut warnings = Vec::new();
        let mut work = self.clone();
        let before = work.edges.len();
        work.edges.retain(|e| !e.label.is_zero());
        if work.edges.len() != before {
            warnings.push(format!("dropped {} zero-labeled edges", before - work.edges.len()));
        }
        loop {
            let fwd = work.reach_from(work.start, true);
            let bwd = work.reach_from(work.end, false);
            let keep: Vec<bool> = (0..work.n_vertices)
                .map(|v| (fwd[v] && bwd[v]) || v == work.start || v == work.end)
                .collect();
            if keep.iter().all(|&k| k) {
                break;
            }
            let mut remap = vec![usize::MAX; work.n_vertices];
            let mut next = 0usize;
            for v in 0..work.n_vertices {
                if keep[v] {
                    remap[v] = next;
                    next += 1;
                }
            }
            warnings.push(format!("pruned {} vertices off every start-end path", work.n_vertices - next));
            work = UnlayeredAbp {
                ring: work.ring,
                delta: work.delta,
                n_vertices: next,
                start: remap[work.start],
                end: remap[work.end],
                edges: work
                    .edges
                    .iter()
                    .filter(|e| keep[e.from] && keep[e.to])
                    .map(|e| LabeledEdge { from: remap[e.from], to: remap[e.to], label: e.label.clone() })
                    .collect(),
            };
        }
        (work, warnings)
    }
}

pub(crate) fn topo_order(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> Option<Vec<usize>> {
    let mut indeg = vec![0usize; n];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (a, b) in edges {
        indeg[b] += 1;
        adj[a].push(b);
    }
    let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    queue.sort_unstable();
    let mut order = Vec::with_capacity(n);
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        order.push(v);
        for &w in &adj[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push(w);
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// Longest path (in edges) ending at each vertex.
pub(crate) fn depths(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let order = topo_order(n, edges.iter().copied()).expect("acyclic");
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in edges {
        incoming[b].push(a);
    }
    let mut d = vec![0usize; n];
    for &v in &order {
        for &u in &incoming[v] {
            d[v] = d[v].max(d[u] + 1);
        }
    }
    d
}

// ---------------------------------------------------------------------------
// Error ledger
// ---------------------------------------------------------------------------

/// The accumulated error of a transformation pipeline. The fixed
/// orientation used everywhere in this crate is
///
/// `original = transformed + sum_i P_i * Q_i + delta + remainder`
///
/// so `apply(transformed)` reconstructs the original exactly. Every
/// recorded `P_i`, `Q_i` is constant-free and nonzero.
#[derive(Debug, Clone)]
pub struct ErrorLedger {
    pub ring: Ring,
    pub pairs: Vec<(SparsePoly, SparsePoly)>,
    pub delta: Scalar,
    pub remainder: SparsePoly,
    pub degree_bound: u32,
}

impl ErrorLedger {
    pub fn empty(ring: Ring, degree_bound: u32) -> Self {
        ErrorLedger {
            ring,
            pairs: Vec::new(),
            delta: ring.field.zero(),
            remainder: SparsePoly::zero(ring),
            degree_bound,
        }
    }

    /// Number of recorded pairs (the `r` of the pipeline).
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
            && self.ring.field.is_zero(&self.delta)
            && self.remainder.is_zero()
    }

    /// Records a pair; pairs with a zero factor contribute nothing and are
    /// dropped. Panics if a factor has a nonzero constant term.
    pub fn push_pair(&mut self, p: SparsePoly, q: SparsePoly) {
        if p.is_zero() || q.is_zero() {
            return;
        }
        assert!(
            self.ring.field.is_zero(&p.constant_term()) && self.ring.field.is_zero(&q.constant_term()),
            "ledger pair must be constant-free"
        );
        self.pairs.push((p, q));
    }

    pub fn add_delta(&mut self, d: &Scalar) {
        self.delta = self.ring.field.add(&self.delta, d);
    }

    pub fn add_remainder(&mut self, r: &SparsePoly) {
        self.remainder = self.remainder.add(r);
    }

    /// Folds another ledger into this one.
    pub fn absorb(&mut self, other: ErrorLedger) {
        assert_eq!(self.ring, other.ring);
        self.pairs.extend(other.pairs);
        self.add_delta(&other.delta);
        self.remainder = self.remainder.add(&other.remainder);
        self.degree_bound = self.degree_bound.max(other.degree_bound);
    }

    /// `f + sum P_i Q_i + delta + remainder`.
    pub fn apply(&self, f: &SparsePoly) -> SparsePoly {
        let mut acc = f.add(&SparsePoly::constant(self.ring, self.delta.clone()));
        for (p, q) in &self.pairs {
            acc = acc.add(&p.mul(q));
        }
        acc.add(&self.remainder)
    }
}

/// Reconstructs the pre-transform polynomial from a transformed one.
pub fn apply_ledger(f: &SparsePoly, ledger: &ErrorLedger) -> SparsePoly {
    ledger.apply(f)
}

// ---------------------------------------------------------------------------
// JSON file format
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
pub struct EdgeDto {
    pub from: usize,
    pub to: usize,
    pub label: Vec<TermDto>,
}

/// On-disk form of any ABP variant:
/// `{field, n, delta, kind, vertices, layers?, edges, s?, t?, branches?}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct AbpDto {
    pub field: String,
    pub n: usize,
    pub delta: u32,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layers: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edges: Vec<EdgeDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branches: Option<Vec<AbpDto>>,
}

#[derive(Debug, Clone)]
pub enum Abp {
    Layered(LayeredAbp),
    Multilayered(MultilayeredAbp),
    Unlayered(UnlayeredAbp),
}

impl Abp {
    pub fn ring(&self) -> Ring {
        match self {
            Abp::Layered(a) => a.ring,
            Abp::Multilayered(a) => a.ring(),
            Abp::Unlayered(a) => a.ring,
        }
    }

    pub fn computed_polynomial(&self) -> SparsePoly {
        match self {
            Abp::Layered(a) => a.computed_polynomial(),
            Abp::Multilayered(a) => a.computed_polynomial(),
            Abp::Unlayered(a) => a.computed_polynomial(),
        }
    }

    pub fn validate(&self) -> Vec<String> {
        match self {
            Abp::Layered(a) => a.validate(),
            Abp::Multilayered(a) => a.validate(),
            Abp::Unlayered(a) => a.validate(),
        }
    }
}

fn edges_to_dto(edges: &[LabeledEdge]) -> Vec<EdgeDto> {
    edges
        .iter()
        .map(|e| EdgeDto { from: e.from, to: e.to, label: e.label.to_terms() })
        .collect()
}

fn edges_from_dto(ring: Ring, edges: &[EdgeDto]) -> Result<Vec<LabeledEdge>, PolyError> {
    edges
        .iter()
        .map(|e| {
            Ok(LabeledEdge {
                from: e.from,
                to: e.to,
                label: SparsePoly::from_terms(ring, &e.label)?,
            })
        })
        .collect()
}

impl LayeredAbp {
    pub fn to_dto(&self) -> AbpDto {
        AbpDto {
            field: self.ring.field.to_string(),
            n: self.ring.nvars,
            delta: self.delta,
            kind: "layered".to_string(),
            vertices: Some(self.size()),
            layers: Some(self.layers.clone()),
            edges: edges_to_dto(&self.edges),
            s: Some(self.start()),
            t: Some(self.end()),
            branches: None,
        }
    }
}

impl MultilayeredAbp {
    pub fn to_dto(&self) -> AbpDto {
        let ring = self.ring();
        AbpDto {
            field: ring.field.to_string(),
            n: ring.nvars,
            delta: self.delta(),
            kind: "multilayered".to_string(),
            vertices: Some(self.size()),
            layers: None,
            edges: Vec::new(),
            s: None,
            t: None,
            branches: Some(self.branches.iter().map(|b| b.to_dto()).collect()),
        }
    }
}

impl UnlayeredAbp {
    pub fn to_dto(&self) -> AbpDto {
        AbpDto {
            field: self.ring.field.to_string(),
            n: self.ring.nvars,
            delta: self.delta,
            kind: "unlayered".to_string(),
            vertices: Some(self.n_vertices),
            layers: None,
            edges: edges_to_dto(&self.edges),
            s: Some(self.start),
            t: Some(self.end),
            branches: None,
        }
    }
}

impl Abp {
    pub fn to_dto(&self) -> AbpDto {
        match self {
            Abp::Layered(a) => a.to_dto(),
            Abp::Multilayered(a) => a.to_dto(),
            Abp::Unlayered(a) => a.to_dto(),
        }
    }

    pub fn from_dto(dto: &AbpDto) -> Result<Abp, AbpError> {
        let field = dto
            .field
            .parse()
            .map_err(|e: crate::field::FieldError| AbpError::Invalid(e.to_string()))?;
        let ring = Ring::new(field, dto.n);
        match dto.kind.as_str() {
            "layered" => {
                let layers = dto
                    .layers
                    .clone()
                    .ok_or_else(|| AbpError::Invalid("layered ABP missing layers".to_string()))?;
                Ok(Abp::Layered(LayeredAbp {
                    ring,
                    delta: dto.delta,
                    layers,
                    edges: edges_from_dto(ring, &dto.edges)?,
                }))
            }
            "multilayered" => {
                let branches = dto
                    .branches
                    .as_ref()
                    .ok_or_else(|| AbpError::Invalid("multilayered ABP missing branches".to_string()))?;
                let mut out = Vec::new();
                for b in branches {
                    match Abp::from_dto(b)? {
                        Abp::Layered(l) => out.push(l),
                        _ => return Err(AbpError::Invalid("branch is not a layered ABP".to_string())),
                    }
                }
                Ok(Abp::Multilayered(MultilayeredAbp::new(out)))
            }
            "unlayered" => {
                let n_vertices = dto
                    .vertices
                    .ok_or_else(|| AbpError::Invalid("unlayered ABP missing vertex count".to_string()))?;
                Ok(Abp::Unlayered(UnlayeredAbp {
                    ring,
                    delta: dto.delta,
                    n_vertices,
                    edges: edges_from_dto(ring, &dto.edges)?,
                    start: dto.s.ok_or_else(|| AbpError::Invalid("missing s".to_string()))?,
                    end: dto.t.ok_or_else(|| AbpError::Invalid("missing t".to_string()))?,
                }))
            }
            other => Err(AbpError::Invalid(format!("unknown ABP kind {other:?}"))),
        }
    }
}

// ---------------------------------------------------------------------------
// Ledger JSON
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
pub struct LedgerDto {
    pub field: String,
    pub n: usize,
    pub pairs: Vec<(Vec<TermDto>, Vec<TermDto>)>,
    pub delta: String,
    pub remainder: Vec<TermDto>,
    pub degree_bound: u32,
}

impl ErrorLedger {
    pub fn to_dto(&self) -> LedgerDto {
        LedgerDto {
            field: self.ring.field.to_string(),
            n: self.ring.nvars,
            pairs: self
                .pairs
                .iter()
                .map(|(p, q)| (p.to_terms(), q.to_terms()))
                .collect(),
            delta: self.ring.field.format_scalar(&self.delta),
            remainder: self.remainder.to_terms(),
            degree_bound: self.degree_bound,
        }
    }

    pub fn from_dto(dto: &LedgerDto) -> Result<ErrorLedger, AbpError> {
        let field = dto
            .field
            .parse()
            .map_err(|e: crate::field::FieldError| AbpError::Invalid(e.to_string()))?;
        let ring = Ring::new(field, dto.n);
        let mut ledger = ErrorLedger::empty(ring, dto.degree_bound);
        for (p, q) in &dto.pairs {
            ledger.pairs.push((
                SparsePoly::from_terms(ring, p)?,
                SparsePoly::from_terms(ring, q)?,
            ));
        }
        ledger.delta = ring
            .field
            .parse_scalar(&dto.delta)
            .map_err(|e| AbpError::Invalid(e.to_string()))?;
        ledger.remainder = SparsePoly::from_terms(ring, &dto.remainder)?;
        Ok(ledger)
    }
}

// ---------------------------------------------------------------------------
// DOT export
// ---------------------------------------------------------------------------

/// DOT rendering for visual inspection; `highlight_vertices` and
/// `highlight_edges` get distinct attributes.
pub fn to_dot(abp: &Abp, highlight_vertices: &[usize], highlight_edges: &[(usize, usize)]) -> String {
    let mut out = String::from("digraph abp {\n  rankdir=LR;\n");
    let mut emit = |edges: &[LabeledEdge], prefix: &str| {
        for e in edges {
            let style = if highlight_edges.contains(&(e.from, e.to)) {
                ", color=red, penwidth=2"
            } else {
                ""
            };
            let _ = writeln!(
                out,
                "  \"{prefix}{}\" -> \"{prefix}{}\" [label=\"{}\"{}];",
                e.from,
                e.to,
                e.label.to_text().replace('"', "'"),
                style
            );
        }
    };
    match abp {
        Abp::Layered(a) => emit(&a.edges, ""),
        Abp::Unlayered(a) => emit(&a.edges, ""),
        Abp::Multilayered(m) => {
            for (i, b) in m.branches.iter().enumerate() {
                emit(&b.edges, &format!("b{i}_"));
            }
        }
    }
    for &v in highlight_vertices {
        let _ = writeln!(out, "  \"{v}\" [style=filled, fillcolor=orange];");
    }
    out.push_str("}\n");
    out
}
