//! Seeded random instance generators for the test suites: polynomials,
//! layered/multilayered/unlayered ABPs, DAGs, and formulas. Everything is
//! driven by a ChaCha stream so that a fixed seed reproduces the exact
//! same objects.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::abp::{LabeledEdge, LayeredAbp, MultilayeredAbp, UnlayeredAbp};
use crate::field::{FieldConfig, Scalar};
use crate::formula::{FNode, Formula};
use crate::poly::{Exponents, Ring, SparsePoly};

pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn range(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        self.rng.gen_range(lo..=hi_inclusive)
    }

    /// Random field element; over the rationals a small integer.
    pub fn scalar(&mut self, ring: Ring) -> Scalar {
        match ring.field {
            FieldConfig::Prime(p) => ring.field.from_u64(self.rng.gen_range(0..p)),
            FieldConfig::Rational => ring.field.from_i64(self.rng.gen_range(-5..=5)),
        }
    }

    pub fn nonzero_scalar(&mut self, ring: Ring) -> Scalar {
        loop {
            let s = self.scalar(ring);
            if !ring.field.is_zero(&s) {
                return s;
            }
        }
    }

    fn monomial_exps(&mut self, ring: Ring, deg: u32) -> Exponents {
        let mut exps = vec![0u32; ring.nvars];
        for _ in 0..deg {
            exps[self.rng.gen_range(0..ring.nvars)] += 1;
        }
        Exponents(exps)
    }

    /// Random nonzero polynomial of total degree at most `max_deg`.
    pub fn poly(&mut self, ring: Ring, max_deg: u32, max_terms: usize) -> SparsePoly {
        loop {
            let mut acc = SparsePoly::zero(ring);
            for _ in 0..self.rng.gen_range(1..=max_terms) {
                let deg = self.rng.gen_range(0..=max_deg);
                acc = acc.add(&SparsePoly::monomial(
                    ring,
                    self.monomial_exps(ring, deg),
                    self.nonzero_scalar(ring),
                ));
            }
            if !acc.is_zero() {
                return acc;
            }
        }
    }

    /// Random homogeneous polynomial of exact degree `deg`.
    pub fn homogeneous_poly(&mut self, ring: Ring, deg: u32, max_terms: usize) -> SparsePoly {
        loop {
            let mut acc = SparsePoly::zero(ring);
            for _ in 0..self.rng.gen_range(1..=max_terms) {
                acc = acc.add(&SparsePoly::monomial(
                    ring,
                    self.monomial_exps(ring, deg),
                    self.nonzero_scalar(ring),
                ));
            }
            if !acc.is_zero() {
                return acc;
            }
        }
    }

    /// Random edge label of degree at most `delta`: an affine-ish sparse
    /// polynomial with one or two terms.
    pub fn label(&mut self, ring: Ring, delta: u32) -> SparsePoly {
        self.poly(ring, delta, 2)
    }

    /// Random layered ABP with at most `max_vertices` vertices and at
    /// least `min_layers` layers; every vertex lies on a start-end path.
    pub fn layered_abp(
        &mut self,
        ring: Ring,
        delta: u32,
        min_layers: usize,
        max_vertices: usize,
    ) -> LayeredAbp {
        let max_layers = (max_vertices - 2).max(min_layers).min(8);
        let n_layers = self.range(min_layers, max_layers.max(min_layers));
        let mut widths = vec![1usize];
        let mut used = 2;
        let interior = n_layers.saturating_sub(2);
        for i in 0..interior {
            // reserve one vertex for each interior layer still to come
            let reserved = interior - 1 - i;
            let room = max_vertices.saturating_sub(used + reserved);
            let w = self.range(1, room.min(3).max(1));
            widths.push(w);
            used += w;
        }
        widths.push(1);
        let mut abp = LayeredAbp::from_layer_widths(ring, delta, &widths);
        for li in 0..abp.layers.len() - 1 {
            let (cur, next) = (abp.layers[li].clone(), abp.layers[li + 1].clone());
            // guarantee every vertex has an outgoing and an incoming edge
            for &v in &next {
                let from = cur[self.rng.gen_range(0..cur.len())];
                let label = self.label(ring, delta);
                abp.add_edge(from, v, label);
            }
            for &u in &cur {
                if !abp.edges.iter().any(|e| e.from == u) {
                    let to = next[self.rng.gen_range(0..next.len())];
                    let label = self.label(ring, delta);
                    abp.add_edge(u, to, label);
                }
            }
            // sprinkle extras
            for &u in &cur {
                for &v in &next {
                    if self.rng.gen_bool(0.25) && !abp.edges.iter().any(|e| e.from == u && e.to == v) {
                        let label = self.label(ring, delta);
                        abp.add_edge(u, v, label);
                    }
                }
            }
        }
        debug_assert!(abp.validate().is_empty());
        abp
    }

    /// Random multilayered ABP of 1..=3 branches within the vertex budget.
    pub fn multilayered_abp(
        &mut self,
        ring: Ring,
        delta: u32,
        min_layers: usize,
        max_vertices: usize,
    ) -> MultilayeredAbp {
        let k = self.range(1, 3);
        let per = (max_vertices / k).max(min_layers + 1);
        let branches = (0..k)
            .map(|_| self.layered_abp(ring, delta, min_layers, per))
            .collect();
        MultilayeredAbp::new(branches)
    }

    /// Random DAG on `n_vertices` vertices containing an embedded path of
    /// `min_depth` edges (so its depth is at least that), with extra
    /// forward edges at the given density.
    pub fn dag(&mut self, n_vertices: usize, min_depth: usize, density: f64) -> Vec<(usize, usize)> {
        assert!(min_depth + 1 <= n_vertices);
        // choose an increasing sequence of min_depth+1 vertices for the spine
        let mut spine: Vec<usize> = (0..n_vertices).collect();
        while spine.len() > min_depth + 1 {
            // keep both endpoints so the spine runs source to sink
            let i = self.rng.gen_range(1..spine.len() - 1);
            spine.remove(i);
        }
        let mut edges: Vec<(usize, usize)> = spine.windows(2).map(|w| (w[0], w[1])).collect();
        for a in 0..n_vertices {
            for b in a + 1..n_vertices {
                if self.rng.gen_bool(density) && !edges.contains(&(a, b)) {
                    edges.push((a, b));
                }
            }
        }
        edges.sort_unstable();
        edges
    }

    /// Random unlayered ABP built on a random DAG; pruned so every vertex
    /// lies on a start-end path.
    pub fn unlayered_abp(
        &mut self,
        ring: Ring,
        delta: u32,
        n_vertices: usize,
        min_depth: usize,
        density: f64,
    ) -> UnlayeredAbp {
        let raw = self.dag(n_vertices, min_depth, density);
        let edges = raw
            .into_iter()
            .map(|(a, b)| LabeledEdge { from: a, to: b, label: self.label(ring, delta) })
            .collect();
        let abp = UnlayeredAbp {
            ring,
            delta,
            n_vertices,
            edges,
            start: 0,
            end: n_vertices - 1,
        };
        let (clean, _) = abp.normalize();
        debug_assert!(clean.validate().is_empty());
        clean
    }

    /// Deep unlayered ABP: a long labeled chain with a few shortcut edges,
    /// for exercising the depth-reduction bounds in their provable regime.
    pub fn deep_unlayered_abp(&mut self, ring: Ring, depth: usize) -> UnlayeredAbp {
        let mut edges: Vec<LabeledEdge> = (0..depth)
            .map(|i| LabeledEdge {
                from: i,
                to: i + 1,
                label: if i % 4 == 0 {
                    SparsePoly::var(ring, (i % ring.nvars) + 1).unwrap()
                } else {
                    SparsePoly::one(ring)
                },
            })
            .collect();
        for _ in 0..depth / 10 {
            let a = self.rng.gen_range(0..depth - 1);
            let b = self.rng.gen_range(a + 1..=depth);
            if !edges.iter().any(|e| e.from == a && e.to == b) {
                let label = self.label(ring, 1);
                edges.push(LabeledEdge { from: a, to: b, label });
            }
        }
        UnlayeredAbp { ring, delta: 1, n_vertices: depth + 1, edges, start: 0, end: depth }
    }

    /// Random formula with binary gates and formal degree exactly
    /// `target_fdeg`. With `positive` set, all constants are positive so
    /// no cancellation can occur anywhere (degree equals formal degree in
    /// every subformula).
    pub fn formula(&mut self, ring: Ring, target_fdeg: u32, positive: bool) -> Formula {
        let root = self.formula_node(ring, target_fdeg, positive, 0);
        let f = Formula { ring, root };
        assert_eq!(f.fdeg(), target_fdeg);
        f
    }

    fn positive_scalar(&mut self, ring: Ring) -> Scalar {
        ring.field.from_u64(self.rng.gen_range(1..=5))
    }

    fn formula_node(&mut self, ring: Ring, fdeg: u32, positive: bool, depth: usize) -> FNode {
        if fdeg == 0 {
            return FNode::Const(if positive {
                self.positive_scalar(ring)
            } else {
                self.nonzero_scalar(ring)
            });
        }
        if fdeg == 1 {
            let v = FNode::Var(self.rng.gen_range(1..=ring.nvars));
            if positive {
                // a positive offset at every leaf keeps the constant term of
                // every subformula strictly positive, so no subformula ever
                // collapses or loses degree under expansion
                return FNode::Add(vec![v, FNode::Const(self.positive_scalar(ring))]);
            }
            if depth < 8 && self.rng.gen_bool(0.4) {
                return FNode::Add(vec![v, FNode::Const(self.nonzero_scalar(ring))]);
            }
            return v;
        }
        if depth >= 10 || self.rng.gen_bool(0.6) {
            // product: split the degree
            let a = self.rng.gen_range(1..fdeg);
            let left = self.formula_node(ring, a, positive, depth + 1);
            let right = self.formula_node(ring, fdeg - a, positive, depth + 1);
            FNode::Mul(vec![left, right])
        } else {
            // sum: one child carries the degree; keep the other small so
            // tree size stays roughly linear in the degree
            let other = self.rng.gen_range(0..=fdeg.min(2));
            let left = self.formula_node(ring, fdeg, positive, depth + 1);
            let right = self.formula_node(ring, other, positive, depth + 1);
            if self.rng.gen_bool(0.5) {
                FNode::Add(vec![left, right])
            } else {
                FNode::Add(vec![right, left])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> Ring {
        Ring::new(FieldConfig::prime(101).unwrap(), 4)
    }

    #[test]
    fn determinism() {
        let r = ring();
        let a1 = Gen::new(7).layered_abp(r, 2, 3, 14);
        let a2 = Gen::new(7).layered_abp(r, 2, 3, 14);
        assert_eq!(a1.layers, a2.layers);
        assert_eq!(a1.computed_polynomial(), a2.computed_polynomial());
        let f1 = Gen::new(9).formula(r, 12, false);
        let f2 = Gen::new(9).formula(r, 12, false);
        assert_eq!(f1.expand().unwrap(), f2.expand().unwrap());
    }

    #[test]
    fn layered_instances_are_well_formed() {
        let r = ring();
        let mut g = Gen::new(1);
        for _ in 0..50 {
            let a = g.layered_abp(r, 2, 3, 14);
            assert!(a.validate().is_empty());
            assert!(a.size() <= 14);
            assert!(a.num_layers() >= 3);
        }
    }

    #[test]
    fn unlayered_instances_are_well_formed() {
        let r = ring();
        let mut g = Gen::new(2);
        for _ in 0..30 {
            let a = g.unlayered_abp(r, 1, 20, 8, 0.08);
            assert!(a.validate().is_empty());
            assert!(a.depth() >= 8);
        }
    }

    #[test]
    fn dag_depth_floor() {
        let mut g = Gen::new(3);
        for _ in 0..20 {
            let n = g.range(30, 80);
            let edges = g.dag(n, 12, 0.05);
            let d = crate::abp::depths(n, &edges).into_iter().max().unwrap();
            assert!(d >= 12);
        }
    }

    #[test]
    fn positive_formulas_have_no_cancellation() {
        let r = Ring::new(FieldConfig::rational(), 4);
        let mut g = Gen::new(4);
        for _ in 0..20 {
            let t = g.range(6, 15) as u32;
            let f = g.formula(r, t, true);
            let p = f.expand().unwrap();
            assert!(p.total_degree().at_least(t) && p.total_degree().at_most(t));
        }
    }
}
