//! Depth reduction for ABPs over arbitrary DAGs: single-vertex cuts, the
//! logarithmic edge-removal lemma, its depth-band refinement, and the
//! single-step / full depth-reduction pipelines.

use crate::abp::{depths, AbpError, ErrorLedger, LabeledEdge, UnlayeredAbp};
use crate::poly::SparsePoly;
use crate::report::{BoundCheck, StepReport, TransformReport};

fn log2(n: usize) -> f64 {
    (n as f64).log2()
}

/// Duplicates `v` into a copy `v1` that keeps the incoming edges and gains
/// a single scalar edge to `t`, and a copy `v2` that keeps the outgoing
/// edges and gains a single scalar edge from `s`. Exactly one vertex and
/// two edges are added, and with `[s,v] = P + alpha`, `[v,t] = Q + beta`
/// the result computes `F - P*Q + alpha*beta`; the returned ledger restores
/// `F`.
pub fn cut_vertex(abp: &UnlayeredAbp, v: usize) -> Result<(UnlayeredAbp, ErrorLedger), AbpError> {
    if v == abp.start || v == abp.end {
        return Err(AbpError::Precondition(format!(
            "cannot cut the start or end vertex ({v})"
        )));
    }
    if v >= abp.n_vertices {
        return Err(AbpError::Precondition(format!("no vertex {v}")));
    }
    let ring = abp.ring;
    let (alpha, p) = abp.path_sum(abp.start, v).split_constant();
    let (beta, q) = abp.path_sum(v, abp.end).split_constant();

    let d = abp.depth();
    let d_v = abp.depth_of(v);

    // v keeps its id and becomes the incoming copy; the outgoing copy is new
    let v2 = abp.n_vertices;
    let mut out = abp.clone();
    out.n_vertices += 1;
    for e in out.edges.iter_mut() {
        if e.from == v {
            e.from = v2;
        }
    }
    out.edges.push(LabeledEdge {
        from: v,
        to: out.end,
        label: SparsePoly::constant(ring, beta.clone()),
    });
    out.edges.push(LabeledEdge {
        from: out.start,
        to: v2,
        label: SparsePoly::constant(ring, alpha.clone()),
    });
    assert_eq!(out.n_vertices, abp.n_vertices + 1);
    assert_eq!(out.num_edges(), abp.num_edges() + 2);

    // depth(out) <= max{depth without v, d_v + 1, d - d_v + 1}
    let without_v: Vec<(usize, usize)> = abp
        .edge_pairs()
        .into_iter()
        .filter(|&(a, b)| a != v && b != v)
        .collect();
    let depth_without = depths(abp.n_vertices, &without_v).into_iter().max().unwrap_or(0);
    assert!(out.depth() <= depth_without.max(d_v + 1).max(d - d_v + 1));

    let mut ledger = ErrorLedger::empty(ring, 0);
    ledger.push_pair(p, q);
    ledger.add_delta(&ring.field.neg(&ring.field.mul(&alpha, &beta)));
    Ok((out, ledger))
}

fn msb_diff(a: usize, b: usize) -> usize {
    debug_assert_ne!(a, b);
    (usize::BITS - 1 - (a ^ b).leading_zeros()) as usize
}

fn drop_bits(label: usize, removed: &[usize]) -> usize {
    let mut out = 0usize;
    let mut shift = 0;
    for bit in 0..usize::BITS as usize {
        if removed.contains(&bit) {
            continue;
        }
        out |= ((label >> bit) & 1) << shift;
        shift += 1;
    }
    out
}

/// Picks at most `4m / log2(ambient_n)` edges whose removal at least halves
/// the depth: label each vertex by its depth, classify every edge by the
/// most significant bit in which its endpoint labels differ, and take the
/// union of the two smallest classes (lowest index on ties). Returns
/// indices into `edges`.
pub fn valiant_edge_set(
    n_vertices: usize,
    edges: &[(usize, usize)],
    ambient_n: usize,
) -> Result<Vec<usize>, AbpError> {
    if ambient_n < 4 {
        return Err(AbpError::Precondition("ambient parameter must be at least 4".to_string()));
    }
    let depth_of = depths(n_vertices, edges);
    let d = depth_of.iter().copied().max().unwrap_or(0);
    if d * d < ambient_n {
        return Err(AbpError::Precondition(format!(
            "depth {d} is below sqrt({ambient_n})"
        )));
    }
    // smallest power of two strictly larger than d; labels fit in k bits
    let d_prime = (d + 1).next_power_of_two().max(2);
    let k = d_prime.trailing_zeros() as usize;
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (idx, &(u, v)) in edges.iter().enumerate() {
        assert!(depth_of[u] < depth_of[v], "depth labeling must increase along edges");
        classes[msb_diff(depth_of[u], depth_of[v])].push(idx);
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&i| (classes[i].len(), i));
    let picked: Vec<usize> = order.iter().take(2).copied().collect();
    let mut removed: Vec<usize> = picked.iter().flat_map(|&i| classes[i].iter().copied()).collect();
    removed.sort_unstable();

    assert!(
        removed.len() as f64 <= 4.0 * edges.len() as f64 / log2(ambient_n),
        "selected edge set exceeds 4m/log n"
    );
    // dropping the two chosen bits must leave a valid labeling, hence the
    // depth of the residual graph is at most d'/4 <= d/2
    let residual: Vec<(usize, usize)> = edges
        .iter()
        .enumerate()
        .filter(|(i, _)| removed.binary_search(i).is_err())
        .map(|(_, &e)| e)
        .collect();
    for &(u, v) in &residual {
        assert!(
            drop_bits(depth_of[u], &picked) < drop_bits(depth_of[v], &picked),
            "relabeling after bit removal is not valid"
        );
    }
    let residual_depth = depths(n_vertices, &residual).into_iter().max().unwrap_or(0);
    assert!(2 * residual_depth <= d, "residual depth exceeds d/2");
    Ok(removed)
}

/// Heads of the selected edges whose depth lies in the middle band
/// `d/9 <= depth <= 8d/9`. Removing them leaves depth at most `3d/4`
/// (asserted for `d >= 36`; below that, the exact path-partition bound
/// `d/9 + d/2 + d/9 + 1` is asserted instead).
pub fn middle_band_vertex_set(
    n_vertices: usize,
    edges: &[(usize, usize)],
    ambient_n: usize,
) -> Result<Vec<usize>, AbpError> {
    let picked = valiant_edge_set(n_vertices, edges, ambient_n)?;
    let depth_of = depths(n_vertices, edges);
    let d = depth_of.iter().copied().max().unwrap_or(0);
    let mut heads: Vec<usize> = picked
        .iter()
        .map(|&i| edges[i].1)
        .filter(|&h| 9 * depth_of[h] >= d && 9 * depth_of[h] <= 8 * d)
        .collect();
    heads.sort_unstable();
    heads.dedup();
    assert!(heads.len() as f64 <= 4.0 * edges.len() as f64 / log2(ambient_n));
    for &h in &heads {
        assert!(9 * depth_of[h] >= d && 9 * depth_of[h] <= 8 * d);
    }
    let residual: Vec<(usize, usize)> = edges
        .iter()
        .copied()
        .filter(|&(u, v)| !heads.contains(&u) && !heads.contains(&v))
        .collect();
    let residual_depth = depths(n_vertices, &residual).into_iter().max().unwrap_or(0);
    assert!(
        18 * residual_depth <= 13 * d + 18,
        "residual depth exceeds d/9 + d/2 + d/9 + 1"
    );
    if d >= 36 {
        assert!(4 * residual_depth <= 3 * d, "residual depth exceeds 3d/4");
    }
    Ok(heads)
}

/// One round of depth reduction: cuts every middle-band vertex in ascending
/// id order. Adds at most `4m/log n` vertices and pairs and `8m/log n`
/// edges; the depth bound `9d/10` is provable only for deep enough inputs
/// (`d >= 90`) and is recorded as a bound check either way.
pub fn depth_reduce_once(
    abp: &UnlayeredAbp,
    ambient_n: usize,
) -> Result<(UnlayeredAbp, ErrorLedger, TransformReport), AbpError> {
    let d = abp.depth();
    let m = abp.num_edges();
    let tau = abp.size();
    let cut_set = middle_band_vertex_set(abp.n_vertices, &abp.edge_pairs(), ambient_n)?;

    let mut cur = abp.clone();
    let mut ledger = ErrorLedger::empty(abp.ring, 0);
    for &u in &cut_set {
        let (next, step_ledger) = cut_vertex(&cur, u)?;
        ledger.absorb(step_ledger);
        cur = next;
    }
    assert!(ledger.len() <= cut_set.len());

    let logn = log2(ambient_n);
    let vertex_bound = tau as f64 + 4.0 * m as f64 / logn;
    let edge_bound = m as f64 + 8.0 * m as f64 / logn;
    let depth_bound = 0.9 * d as f64;
    assert!(cur.size() as f64 <= vertex_bound, "vertex growth exceeds tau + 4m/log n");
    assert!(cur.num_edges() as f64 <= edge_bound, "edge growth exceeds m + 8m/log n");
    let depth_check = BoundCheck::le("depth_after", cur.depth() as f64, depth_bound);
    if d >= 90 {
        assert!(depth_check.holds, "depth exceeds 9d/10 on a deep instance");
    }

    let mut report = TransformReport::new("depth-reduce-once");
    report.push_step(StepReport {
        depth_before: Some(d),
        depth_after: Some(cur.depth()),
        size_before: tau,
        size_after: cur.size(),
        edges_before: m,
        edges_after: cur.num_edges(),
        ledger_added: ledger.len(),
        ledger_dropped_zero: cut_set.len() - ledger.len(),
        ledger_growth_bound: Some(4.0 * m as f64 / logn),
        bound_checks: vec![
            BoundCheck::le("vertices_after", cur.size() as f64, vertex_bound),
            BoundCheck::le("edges_after", cur.num_edges() as f64, edge_bound),
            depth_check,
        ],
        ..Default::default()
    });
    Ok((cur, ledger, report))
}

/// Iterates [`depth_reduce_once`] while the depth is at least
/// `sqrt(ambient_n)` and above `n/delta`. The corollary's size hypotheses
/// rarely hold at small scale, so they are recorded as report flags rather
/// than enforced; the loop also stops (with a note) if a round fails to
/// reduce the depth.
pub fn depth_reduce_full(
    abp: &UnlayeredAbp,
    ambient_n: usize,
    delta: u32,
) -> Result<(UnlayeredAbp, ErrorLedger, TransformReport), AbpError> {
    let logn = log2(ambient_n);
    let loglogn = logn.log2().max(0.0);
    let logdelta = (delta.max(1) as f64).log2();
    let m0 = abp.num_edges() as f64;
    let tau0 = abp.size();

    let mut report = TransformReport::new("depth-reduce-full");
    let hypothesis = m0 <= ambient_n as f64 * logn / (1000.0 * (loglogn + logdelta).max(1.0));
    report.note(format!(
        "edge-count hypothesis m <= n log n / (1000 (log log n + log delta)): {}",
        if hypothesis { "holds" } else { "does not hold (running in report-only mode)" }
    ));

    let target = ambient_n as f64 / delta.max(1) as f64;
    let mut cur = abp.clone();
    let mut ledger = ErrorLedger::empty(abp.ring, 0);
    let mut i = 0usize;
    loop {
        let d = cur.depth();
        if (d * d) < ambient_n || (d as f64) <= target {
            break;
        }
        let (next, step_ledger, step_report) = depth_reduce_once(&cur, ambient_n)?;
        i += 1;
        ledger.absorb(step_ledger);
        let edge_growth_bound = m0 * (1.0 + 8.0 / logn).powi(i as i32);
        for mut step in step_report.steps {
            step.bound_checks.push(BoundCheck::le(
                "edges_vs_geometric",
                next.num_edges() as f64,
                edge_growth_bound,
            ));
            report.push_step(step);
        }
        if next.depth() >= d {
            report.note(format!("stopped after round {i}: depth did not decrease"));
            cur = next;
            break;
        }
        cur = next;
    }
    report.note(format!(
        "final ledger length {} vs n/10 = {}: {}",
        ledger.len(),
        ambient_n as f64 / 10.0,
        if (ledger.len() as f64) <= ambient_n as f64 / 10.0 { "holds" } else { "exceeded" }
    ));
    report.note(format!(
        "final vertices {} vs tau + n/10 = {}: {}",
        cur.size(),
        tau0 as f64 + ambient_n as f64 / 10.0,
        if (cur.size() as f64) <= tau0 as f64 + ambient_n as f64 / 10.0 { "holds" } else { "exceeded" }
    ));
    Ok((cur, ledger, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldConfig;
    use crate::poly::Ring;

    fn ring() -> Ring {
        Ring::new(FieldConfig::prime(101).unwrap(), 4)
    }

    fn var(r: Ring, i: usize) -> SparsePoly {
        SparsePoly::var(r, i).unwrap()
    }

    fn chain_abp(labels: &[SparsePoly]) -> UnlayeredAbp {
        let r = labels[0].ring();
        UnlayeredAbp {
            ring: r,
            delta: 1,
            n_vertices: labels.len() + 1,
            edges: labels
                .iter()
                .enumerate()
                .map(|(i, l)| LabeledEdge { from: i, to: i + 1, label: l.clone() })
                .collect(),
            start: 0,
            end: labels.len(),
        }
    }

    fn chain_graph(len: usize) -> (usize, Vec<(usize, usize)>) {
        (len + 1, (0..len).map(|i| (i, i + 1)).collect())
    }

    #[test]
    fn cut_pure_variable_chain() {
        let r = ring();
        let a = chain_abp(&[var(r, 1), var(r, 2)]);
        let (out, ledger) = cut_vertex(&a, 1).unwrap();
        assert!(out.computed_polynomial().is_zero());
        assert_eq!(ledger.apply(&out.computed_polynomial()), a.computed_polynomial());
        assert_eq!(out.n_vertices, a.n_vertices + 1);
        assert_eq!(out.num_edges(), a.num_edges() + 2);
        assert!(r.field.is_zero(&ledger.delta));
    }

    #[test]
    fn cut_affine_chain_matches_hand_expansion() {
        let r = ring();
        let a = chain_abp(&[
            var(r, 1).add(&SparsePoly::one(r)),
            var(r, 2).add(&SparsePoly::from_int(r, 2)),
        ]);
        let (out, ledger) = cut_vertex(&a, 1).unwrap();
        // F - x1*x2 + 1*2 = 2*x1 + x2 + 4
        let expected = var(r, 1)
            .scale(&r.field.from_i64(2))
            .add(&var(r, 2))
            .add(&SparsePoly::from_int(r, 4));
        assert_eq!(out.computed_polynomial(), expected);
        assert_eq!(ledger.apply(&out.computed_polynomial()), a.computed_polynomial());
        assert_eq!(ledger.delta, r.field.from_i64(-2));
    }

    #[test]
    fn cut_rejects_endpoints() {
        let r = ring();
        let a = chain_abp(&[var(r, 1), var(r, 2)]);
        assert!(cut_vertex(&a, 0).is_err());
        assert!(cut_vertex(&a, 2).is_err());
    }

    #[test]
    fn valiant_halves_chain_depth() {
        for k in 3..8 {
            let (nv, edges) = chain_graph(1usize << k);
            let picked = valiant_edge_set(nv, &edges, 16).unwrap();
            let residual: Vec<(usize, usize)> = edges
                .iter()
                .enumerate()
                .filter(|(i, _)| !picked.contains(i))
                .map(|(_, &e)| e)
                .collect();
            let d_after = depths(nv, &residual).into_iter().max().unwrap();
            assert!(2 * d_after <= 1usize << k);
        }
    }

    #[test]
    fn valiant_rejects_shallow_graphs() {
        let (nv, edges) = chain_graph(1);
        assert!(valiant_edge_set(nv, &edges, 16).is_err());
    }

    #[test]
    fn middle_band_on_long_chain() {
        let (nv, edges) = chain_graph(81);
        let heads = middle_band_vertex_set(nv, &edges, 49).unwrap();
        let d = 81;
        for &h in &heads {
            assert!(9 * h >= d && 9 * h <= 8 * d, "head {h} outside the band");
        }
    }

    #[test]
    fn depth_reduce_once_on_variable_chain() {
        let r = ring();
        let labels: Vec<SparsePoly> = (0..30).map(|i| var(r, (i % 4) + 1)).collect();
        let a = chain_abp(&labels);
        let f = a.computed_polynomial();
        let (out, ledger, report) = depth_reduce_once(&a, 16).unwrap();
        assert!(out.depth() < a.depth());
        assert_eq!(ledger.apply(&out.computed_polynomial()), f);
        for (p, q) in &ledger.pairs {
            assert!(r.field.is_zero(&p.constant_term()));
            assert!(r.field.is_zero(&q.constant_term()));
        }
        // vertex and edge growth bounds are hard-asserted inside; re-check
        // via the report flags
        assert!(report.steps[0]
            .bound_checks
            .iter()
            .filter(|c| c.name != "depth_after")
            .all(|c| c.holds));
    }

    #[test]
    fn depth_reduce_once_identity_when_no_band_heads() {
        // depth 4 with ambient 16: sqrt holds, but every candidate head of
        // a 4-edge chain can still be in band; use a wide shallow DAG where
        // the picked classes have out-of-band heads only is brittle, so
        // instead check the error path for too-shallow inputs
        let r = ring();
        let a = chain_abp(&[var(r, 1), var(r, 2)]);
        assert!(depth_reduce_once(&a, 16).is_err());
    }

    #[test]
    fn depth_reduce_full_reaches_target() {
        let r = ring();
        let labels: Vec<SparsePoly> = (0..40)
            .map(|i| {
                if i % 3 == 0 {
                    var(r, (i % 4) + 1)
                } else {
                    SparsePoly::one(r)
                }
            })
            .collect();
        let a = chain_abp(&labels);
        let f = a.computed_polynomial();
        let (out, ledger, report) = depth_reduce_full(&a, 16, 1).unwrap();
        // loop exits below sqrt(16) = 4 or below n/delta = 16
        assert!(out.depth() * out.depth() < 16 || out.depth() <= 16);
        assert_eq!(ledger.apply(&out.computed_polynomial()), f);
        assert!(!report.notes.is_empty());
    }

    #[test]
    fn depth_reduce_full_identity_when_shallow() {
        let r = ring();
        let a = chain_abp(&[var(r, 1), var(r, 2)]);
        let (out, ledger, report) = depth_reduce_full(&a, 16, 1).unwrap();
        assert_eq!(out.depth(), a.depth());
        assert!(ledger.is_empty());
        assert!(report.steps.is_empty());
    }

    #[test]
    fn cut_order_does_not_change_reconstruction() {
        let r = ring();
        let labels: Vec<SparsePoly> = (0..6).map(|i| var(r, (i % 4) + 1)).collect();
        let a = chain_abp(&labels);
        let f = a.computed_polynomial();
        for order in [[1usize, 3], [3, 1]] {
            let mut cur = a.clone();
            let mut ledger = ErrorLedger::empty(r, 0);
            for &v in &order {
                let (next, l) = cut_vertex(&cur, v).unwrap();
                ledger.absorb(l);
                cur = next;
            }
            assert_eq!(ledger.apply(&cur.computed_polynomial()), f);
        }
    }
}
