//! Transforms on layered and multilayered ABPs: degree-band decomposition,
//! scalar-layer elimination, cutting at a layer, shrinkage, and the full
//! layer-reduction loop. Every transform returns an error ledger such that
//!
//! `input polynomial = output polynomial + sum P_i*Q_i + delta + R`.

use crate::abp::{AbpError, ErrorLedger, LayeredAbp, MultilayeredAbp, UnlayeredAbp};
use crate::poly::SparsePoly;
use crate::report::{BandAudit, BoundCheck, StepReport, TransformReport};

/// One degree band of an ABP: the polynomial decomposes as
/// `P = sum_j coeffs[j].0 * coeffs[j].1 + remainder`, where `coeffs[j].0`
/// is the start-to-vertex path sum of the j-th band vertex.
#[derive(Debug, Clone)]
pub struct BandDecomposition {
    pub coeffs: Vec<(SparsePoly, SparsePoly)>,
    pub remainder: SparsePoly,
    pub band_vertices: Vec<usize>,
}

fn remove_vertex(abp: &UnlayeredAbp, v: usize) -> UnlayeredAbp {
    let mut out = abp.clone();
    out.edges.retain(|e| e.from != v && e.to != v);
    out
}

/// Splits off the vertices whose formal degree lies in
/// `[band*delta, (band+1)*delta)`. Processing order puts each vertex before
/// everything that can reach it, so deleting a vertex never changes the
/// start-to-vertex path sums of those still to be processed.
pub fn decompose_by_band(abp: &UnlayeredAbp, band: usize) -> Result<BandDecomposition, AbpError> {
    let d = abp.formal_degree();
    let delta = abp.delta.max(1);
    let d_prime = (d / delta) as usize;
    if band < 1 || band + 1 > d_prime {
        return Err(AbpError::Precondition(format!(
            "band index {band} outside 1..={} for formal degree {d} and delta {delta}",
            d_prime.saturating_sub(1)
        )));
    }
    let fdeg = abp.formal_degrees();
    let lo = band as u32 * delta;
    let hi = (band as u32 + 1) * delta;
    let mut members: Vec<usize> = (0..abp.n_vertices)
        .filter(|&v| matches!(fdeg[v], Some(f) if lo <= f && f < hi))
        .collect();
    // reverse topological order: each member precedes everything that can
    // reach it
    let order = abp.topo_order()?;
    let mut pos = vec![0usize; abp.n_vertices];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    members.sort_by(|a, b| pos[*b].cmp(&pos[*a]));

    let mut working = abp.clone();
    let mut coeffs = Vec::with_capacity(members.len());
    for &u in &members {
        let p = abp.path_sum(abp.start, u);
        let q = working.path_sum(u, abp.end);
        assert!(
            q.total_degree().at_most(d.saturating_sub(1)),
            "band coefficient degree must stay below the formal degree"
        );
        coeffs.push((p, q));
        working = remove_vertex(&working, u);
    }
    let remainder = working.path_sum(abp.start, abp.end);
    assert!(
        remainder.total_degree().at_most(d.saturating_sub(1)),
        "band remainder degree must stay below the formal degree"
    );
    Ok(BandDecomposition { coeffs, remainder, band_vertices: members })
}

/// Layered-ABP entry point for [`decompose_by_band`].
pub fn decompose_by_band_layered(abp: &LayeredAbp, band: usize) -> Result<BandDecomposition, AbpError> {
    decompose_by_band(&abp.to_unlayered(), band)
}

fn scalar_of(label: &SparsePoly) -> Option<crate::field::Scalar> {
    label.total_degree().at_most(0).then(|| label.constant_term())
}

/// Removes the last interior layer when every edge into the end vertex is
/// scalar-labeled, folding those scalars into the previous layer's edges.
/// The computed polynomial is unchanged and the size drops by exactly the
/// removed layer's width.
pub fn remove_scalar_last_layer(abp: &LayeredAbp) -> Result<LayeredAbp, AbpError> {
    let k = abp.num_layers();
    if k < 3 {
        return Err(AbpError::Precondition(
            "need at least three layers to remove the last interior one".to_string(),
        ));
    }
    let t = abp.end();
    let penult: &Vec<usize> = &abp.layers[k - 2];
    let mut into_t: Vec<(usize, crate::field::Scalar)> = Vec::new();
    for e in abp.edges.iter().filter(|e| e.to == t) {
        match scalar_of(&e.label) {
            Some(c) => into_t.push((e.from, c)),
            None => {
                return Err(AbpError::Precondition(format!(
                    "edge {} -> end is not scalar-labeled",
                    e.from
                )))
            }
        }
    }
    let mut out = LayeredAbp {
        ring: abp.ring,
        delta: abp.delta,
        layers: abp.layers[..k - 2].to_vec(),
        edges: abp
            .edges
            .iter()
            .filter(|e| !penult.contains(&e.to) && e.to != t)
            .cloned()
            .collect(),
    };
    out.layers.push(vec![t]);
    // new labels into t: sum over penultimate vertices v of [v,t]*[u,v]
    for &u in &abp.layers[k - 3] {
        let mut label = SparsePoly::zero(abp.ring);
        for e in abp.edges.iter().filter(|e| e.from == u && penult.contains(&e.to)) {
            for (v, c) in into_t.iter().filter(|(v, _)| *v == e.to) {
                let _ = v;
                label = label.add(&e.label.scale(c));
            }
        }
        if !label.is_zero() {
            out.add_edge(u, t, label);
        }
    }
    assert_eq!(out.size(), abp.size() - penult.len());
    Ok(out)
}

/// Mirror of [`remove_scalar_last_layer`]: removes the first interior layer
/// when every edge out of the start vertex is scalar-labeled.
pub fn remove_scalar_first_layer(abp: &LayeredAbp) -> Result<LayeredAbp, AbpError> {
    let k = abp.num_layers();
    if k < 3 {
        return Err(AbpError::Precondition(
            "need at least three layers to remove the first interior one".to_string(),
        ));
    }
    let s = abp.start();
    let first: &Vec<usize> = &abp.layers[1];
    let mut out_s: Vec<(usize, crate::field::Scalar)> = Vec::new();
    for e in abp.edges.iter().filter(|e| e.from == s) {
        match scalar_of(&e.label) {
            Some(c) => out_s.push((e.to, c)),
            None => {
                return Err(AbpError::Precondition(format!(
                    "edge start -> {} is not scalar-labeled",
                    e.to
                )))
            }
        }
    }
    let mut out = LayeredAbp {
        ring: abp.ring,
        delta: abp.delta,
        layers: std::iter::once(vec![s])
            .chain(abp.layers[2..].iter().cloned())
            .collect(),
        edges: abp
            .edges
            .iter()
            .filter(|e| e.from != s && !first.contains(&e.from))
            .cloned()
            .collect(),
    };
    for &w in &abp.layers[2] {
        let mut label = SparsePoly::zero(abp.ring);
        for e in abp.edges.iter().filter(|e| e.to == w && first.contains(&e.from)) {
            for (_, c) in out_s.iter().filter(|(v, _)| *v == e.from) {
                label = label.add(&e.label.scale(c));
            }
        }
        if !label.is_zero() {
            out.add_edge(s, w, label);
        }
    }
    assert_eq!(out.size(), abp.size() - first.len());
    Ok(out)
}

/// Cuts a layered ABP at its `ell`-th layer (1-based, strictly interior).
///
/// Writing `[s,u_i] = P_i + alpha_i` and `[u_i,t] = Q_i + beta_i` over the
/// cut layer's vertices, the output computes
/// `F - sum P_i*Q_i + sum alpha_i*beta_i` as two parallel branches with at
/// most `max(ell, d-ell+1)` layers and no more vertices than the input.
/// The returned ledger restores `F` exactly.
pub fn cut_at_layer(
    abp: &LayeredAbp,
    ell: usize,
) -> Result<(MultilayeredAbp, ErrorLedger), AbpError> {
    let d = abp.num_layers();
    if ell < 2 || ell > d - 1 {
        return Err(AbpError::Precondition(format!(
            "cut layer {ell} must be strictly between 1 and {d}"
        )));
    }
    let ring = abp.ring;
    let s = abp.start();
    let t = abp.end();
    let cut: Vec<usize> = abp.layers[ell - 1].clone();
    let fresh = abp.layers.iter().flatten().max().copied().unwrap_or(0) + 1;

    let mut ledger = ErrorLedger::empty(ring, 0);
    let mut alphas = Vec::with_capacity(cut.len());
    let mut betas = Vec::with_capacity(cut.len());
    for &u in &cut {
        let (alpha, p) = abp.path_sum(s, u).split_constant();
        let (beta, q) = abp.path_sum(u, t).split_constant();
        ledger.push_pair(p, q);
        ledger.add_delta(&ring.field.neg(&ring.field.mul(&alpha, &beta)));
        alphas.push(alpha);
        betas.push(beta);
    }

    // top half plus a scalar layer of the betas, then fold that layer away
    let mut top = LayeredAbp {
        ring,
        delta: abp.delta,
        layers: abp.layers[..ell].to_vec(),
        edges: abp
            .edges
            .iter()
            .filter(|e| {
                abp.layers[..ell]
                    .iter()
                    .any(|layer| layer.contains(&e.to))
            })
            .cloned()
            .collect(),
    };
    top.layers.push(vec![fresh]);
    for (i, &u) in cut.iter().enumerate() {
        top.add_edge(u, fresh, SparsePoly::constant(ring, betas[i].clone()));
    }
    let top = remove_scalar_last_layer(&top)?;

    // bottom half with a scalar layer of the alphas in front, folded away
    let mut bottom = LayeredAbp {
        ring,
        delta: abp.delta,
        layers: std::iter::once(vec![fresh])
            .chain(abp.layers[ell - 1..].iter().cloned())
            .collect(),
        edges: abp
            .edges
            .iter()
            .filter(|e| {
                abp.layers[ell..]
                    .iter()
                    .any(|layer| layer.contains(&e.to))
            })
            .cloned()
            .collect(),
    };
    for (i, &u) in cut.iter().enumerate() {
        bottom.add_edge(fresh, u, SparsePoly::constant(ring, alphas[i].clone()));
    }
    let bottom = remove_scalar_first_layer(&bottom)?;

    let out = MultilayeredAbp::new(vec![top, bottom]);
    assert!(out.num_layers() <= ell.max(d - ell + 1));
    assert!(out.size() <= abp.size());
    Ok((out, ledger))
}

fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

/// Candidate cut positions for a multilayered ABP with `d` layers: the
/// 1-based layer indices `j` with `d/3 < j <= 2d/3`. The window always
/// holds at least `floor(d/3)` integers once `d >= 4`, which is what makes
/// the averaging bound on ledger growth sound at every scale.
pub fn shrink_candidates(d: usize) -> Vec<usize> {
    (1..=d).filter(|&j| 3 * j > d && 3 * j <= 2 * d).collect()
}

/// One shrinkage step: picks the candidate layer of least total width
/// (smallest index on ties), cuts every branch tall enough to have that
/// layer strictly inside it, and leaves the rest untouched. The result has
/// at most `ceil(2d/3)` layers and no more vertices than the input.
pub fn shrink_multilayered(
    abp: &MultilayeredAbp,
) -> Result<(MultilayeredAbp, ErrorLedger, TransformReport), AbpError> {
    let d = abp.num_layers();
    if d < 4 {
        return Err(AbpError::Precondition(format!(
            "shrinkage needs at least 4 layers, have {d}"
        )));
    }
    let candidates = shrink_candidates(d);
    let width_at = |j: usize| -> usize {
        abp.branches
            .iter()
            .filter(|b| b.num_layers() > j)
            .map(|b| b.layers[j - 1].len())
            .sum()
    };
    let j0 = candidates
        .iter()
        .copied()
        .min_by_key(|&j| (width_at(j), j))
        .expect("candidate window is non-empty for d >= 4");
    let middle_width: usize = candidates.iter().map(|&j| width_at(j)).sum();

    let mut ledger = ErrorLedger::empty(abp.ring(), 0);
    let mut branches = Vec::new();
    let mut cut_width = 0usize;
    for b in &abp.branches {
        if b.num_layers() > j0 {
            cut_width += b.layers[j0 - 1].len();
            let (piece, step_ledger) = cut_at_layer(b, j0)?;
            branches.extend(piece.branches);
            ledger.absorb(step_ledger);
        } else {
            branches.push(b.clone());
        }
    }
    let out = MultilayeredAbp::new(branches);
    assert!(out.num_layers() <= ceil_div(2 * d, 3));
    assert!(out.size() <= abp.size());

    let growth_bound = middle_width as f64 / (d / 3) as f64;
    let mut report = TransformReport::new("shrink-multilayered");
    report.push_step(StepReport {
        layers_before: Some(d),
        layers_after: Some(out.num_layers()),
        size_before: abp.size(),
        size_after: out.size(),
        edges_before: abp.num_edges(),
        edges_after: out.num_edges(),
        ledger_added: ledger.len(),
        ledger_dropped_zero: cut_width - ledger.len(),
        j0: Some(j0),
        middle_width: Some(middle_width),
        ledger_growth_bound: Some(growth_bound),
        bound_checks: vec![
            BoundCheck::le("ledger_growth", cut_width as f64, growth_bound),
            BoundCheck::le(
                "layers_after",
                out.num_layers() as f64,
                ceil_div(2 * d, 3) as f64,
            ),
            BoundCheck::le("size_after", out.size() as f64, abp.size() as f64),
        ],
        ..Default::default()
    });
    Ok((out, ledger, report))
}

/// Repeats shrinkage until the layer count is at most `target`. Stops and
/// notes it in the report when fewer than 4 layers remain, since no interior
/// candidate window exists below that.
pub fn reduce_layers_below(
    abp: &MultilayeredAbp,
    target: usize,
) -> Result<(MultilayeredAbp, ErrorLedger, TransformReport), AbpError> {
    if target < 2 {
        return Err(AbpError::Precondition("target layer count must be at least 2".to_string()));
    }
    let mut cur = abp.clone();
    let mut ledger = ErrorLedger::empty(abp.ring(), 0);
    let mut report = TransformReport::new("reduce-layers");
    loop {
        let d = cur.num_layers();
        if d <= target {
            break;
        }
        if d < 4 {
            report.note(format!(
                "stopped at {d} layers: no interior cut window below 4 layers"
            ));
            break;
        }
        let (next, step_ledger, step_report) = shrink_multilayered(&cur)?;
        ledger.absorb(step_ledger);
        for mut step in step_report.steps {
            step.bound_checks.push(BoundCheck::le(
                "geometric_layer_decrease",
                next.num_layers() as f64,
                ceil_div(2 * d, 3) as f64,
            ));
            report.push_step(step);
        }
        cur = next;
    }
    Ok((cur, ledger, report))
}

/// Histogram of vertices per formal-degree band `[k*delta, (k+1)*delta)`,
/// plus the lower-bound expression `(n/2 - r) * (bands used)` evaluated on
/// the instance. Reporting only; no optimality claim.
pub fn audit_degree_bands(abp: &UnlayeredAbp, ledger_len: usize) -> BandAudit {
    let delta = abp.delta.max(1);
    let d = abp.formal_degree();
    let d_prime = (d / delta) as usize;
    let fdeg = abp.formal_degrees();
    let n_bands = d_prime + 1;
    let mut counts = vec![0usize; n_bands];
    for f in fdeg.iter().flatten() {
        let k = (*f / delta) as usize;
        if k < n_bands {
            counts[k] += 1;
        }
    }
    assert!(counts.iter().sum::<usize>() <= abp.n_vertices);
    let usable = d_prime.saturating_sub(1);
    let n = abp.ring.nvars as f64;
    BandAudit {
        delta,
        formal_degree: d,
        counts,
        total_vertices: abp.n_vertices,
        usable_bands: usable,
        lower_bound_expression: (n / 2.0 - ledger_len as f64) * usable as f64,
    }
}

/// Layered entry point for [`audit_degree_bands`].
pub fn audit_degree_bands_layered(abp: &LayeredAbp, ledger_len: usize) -> BandAudit {
    audit_degree_bands(&abp.to_unlayered(), ledger_len)
}

/// Appends `count` width-1 layers of scalar-1 edges after the end vertex,
/// preserving the computed polynomial. Used to manufacture deep instances.
pub fn pad_with_scalar_layers(abp: &LayeredAbp, count: usize) -> LayeredAbp {
    let mut out = abp.clone();
    let mut prev = out.end();
    let mut fresh = out.layers.iter().flatten().max().copied().unwrap_or(0) + 1;
    for _ in 0..count {
        out.layers.push(vec![fresh]);
        out.add_edge(prev, fresh, SparsePoly::one(out.ring));
        prev = fresh;
        fresh += 1;
    }
    out
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

    /// s -> v -> t labeled (x1+1), (x2+2)
    fn affine_chain() -> LayeredAbp {
        let r = ring();
        let mut a = LayeredAbp::from_layer_widths(r, 1, &[1, 1, 1]);
        a.add_edge(0, 1, var(r, 1).add(&SparsePoly::one(r)));
        a.add_edge(1, 2, var(r, 2).add(&SparsePoly::from_int(r, 2)));
        a
    }

    fn chain(labels: &[SparsePoly]) -> LayeredAbp {
        let r = labels[0].ring();
        let mut a = LayeredAbp::from_layer_widths(r, 1, &vec![1; labels.len() + 1]);
        for (i, l) in labels.iter().enumerate() {
            a.add_edge(i, i + 1, l.clone());
        }
        a
    }

    #[test]
    fn band_decomposition_on_chain() {
        let r = ring();
        let a = chain(&[var(r, 1), var(r, 2), var(r, 3)]).to_unlayered();
        let f = a.computed_polynomial();
        for band in 1..=2 {
            let dec = decompose_by_band(&a, band).unwrap();
            assert_eq!(dec.band_vertices.len(), 1);
            let mut acc = dec.remainder.clone();
            for (p, q) in &dec.coeffs {
                acc = acc.add(&p.mul(q));
            }
            assert_eq!(acc, f);
        }
        assert!(decompose_by_band(&a, 3).is_err());
        assert!(decompose_by_band(&a, 0).is_err());
    }

    #[test]
    fn band_decomposition_wide_layer() {
        // diamond with degree-2 paths: both middle vertices in band 1
        let r = ring();
        let mut a = LayeredAbp::from_layer_widths(r, 1, &[1, 2, 1]);
        a.add_edge(0, 1, var(r, 1));
        a.add_edge(0, 2, var(r, 2));
        a.add_edge(1, 3, var(r, 3));
        a.add_edge(2, 3, var(r, 4));
        let u = a.to_unlayered();
        let dec = decompose_by_band(&u, 1).unwrap();
        assert_eq!(dec.coeffs.len(), 2);
        let mut acc = dec.remainder.clone();
        for (p, q) in &dec.coeffs {
            acc = acc.add(&p.mul(q));
        }
        assert_eq!(acc, u.computed_polynomial());
        assert!(dec.remainder.is_zero());
    }

    #[test]
    fn scalar_last_layer_removal() {
        let r = ring();
        // s -> {a,b} (x1, x2) -> t (scalars 2, 3)
        let mut a = LayeredAbp::from_layer_widths(r, 1, &[1, 2, 1]);
        a.add_edge(0, 1, var(r, 1));
        a.add_edge(0, 2, var(r, 2));
        a.add_edge(1, 3, SparsePoly::from_int(r, 2));
        a.add_edge(2, 3, SparsePoly::from_int(r, 3));
        let f = a.computed_polynomial();
        let b = remove_scalar_last_layer(&a).unwrap();
        assert_eq!(b.num_layers(), 2);
        assert_eq!(b.size(), a.size() - 2);
        assert_eq!(b.computed_polynomial(), f);
        assert!(b.validate().is_empty());

        // all-zero last labels: polynomial collapses to zero
        let mut z = a.clone();
        for e in z.edges.iter_mut().filter(|e| e.to == 3) {
            e.label = SparsePoly::zero(r);
        }
        let zr = remove_scalar_last_layer(&z).unwrap();
        assert!(zr.computed_polynomial().is_zero());
        assert_eq!(zr.num_layers(), 2);

        // non-scalar edge into t is rejected
        let mut bad = a.clone();
        bad.edges.last_mut().unwrap().label = var(r, 3);
        assert!(remove_scalar_last_layer(&bad).is_err());
    }

    #[test]
    fn scalar_first_layer_removal_mirror() {
        let r = ring();
        let mut a = LayeredAbp::from_layer_widths(r, 1, &[1, 2, 1]);
        a.add_edge(0, 1, SparsePoly::from_int(r, 2));
        a.add_edge(0, 2, SparsePoly::from_int(r, 3));
        a.add_edge(1, 3, var(r, 1));
        a.add_edge(2, 3, var(r, 2));
        let f = a.computed_polynomial();
        let b = remove_scalar_first_layer(&a).unwrap();
        assert_eq!(b.num_layers(), 2);
        assert_eq!(b.computed_polynomial(), f);
        assert!(b.validate().is_empty());
    }

    #[test]
    fn cut_affine_chain_matches_hand_expansion() {
        // (x1+1)(x2+2): alpha=1, beta=2, P=x1, Q=x2
        // output should compute F - x1*x2 + 2 = 2*x1 + x2 + 4
        let a = affine_chain();
        let r = a.ring;
        let f = a.computed_polynomial();
        let (out, ledger) = cut_at_layer(&a, 2).unwrap();
        let expected = var(r, 1)
            .scale(&r.field.from_i64(2))
            .add(&var(r, 2))
            .add(&SparsePoly::from_int(r, 4));
        assert_eq!(out.computed_polynomial(), expected);
        assert_eq!(ledger.apply(&out.computed_polynomial()), f);
        assert_eq!(ledger.len(), 1);
        assert!(out.num_layers() <= 2);
        assert!(out.size() <= a.size());
    }

    #[test]
    fn cut_pure_variables_gives_zero() {
        // x1 * x2 with no constant terms: alpha = beta = 0, output = 0
        let r = ring();
        let a = chain(&[var(r, 1), var(r, 2)]);
        let (out, ledger) = cut_at_layer(&a, 2).unwrap();
        assert!(out.computed_polynomial().is_zero());
        assert_eq!(ledger.apply(&out.computed_polynomial()), a.computed_polynomial());
        assert!(r.field.is_zero(&ledger.delta));
    }

    #[test]
    fn cut_rejects_boundary_layers() {
        let a = affine_chain();
        assert!(cut_at_layer(&a, 1).is_err());
        assert!(cut_at_layer(&a, 3).is_err());
    }

    #[test]
    fn ledger_pairs_are_constant_free() {
        let a = affine_chain();
        let (_, ledger) = cut_at_layer(&a, 2).unwrap();
        for (p, q) in &ledger.pairs {
            assert!(a.ring.field.is_zero(&p.constant_term()));
            assert!(a.ring.field.is_zero(&q.constant_term()));
        }
    }

    #[test]
    fn candidate_window_is_never_empty_from_four_layers() {
        for d in 4..200 {
            let c = shrink_candidates(d);
            assert!(!c.is_empty(), "no candidates at d={d}");
            assert!(c.len() >= d / 3, "window smaller than d/3 at d={d}");
            for &j in &c {
                assert!(3 * j > d && 3 * j <= 2 * d);
                assert!(j >= 2 && j <= d - 1, "candidate {j} not interior for d={d}");
            }
        }
    }

    #[test]
    fn shrink_cuts_only_tall_branches() {
        let r = ring();
        let tall = chain(&(1..=8).map(|i| var(r, (i % 4) + 1)).collect::<Vec<_>>()); // 9 layers
        let short = chain(&[var(r, 1), var(r, 2)]); // 3 layers
        let m = MultilayeredAbp::new(vec![tall, short]);
        let f = m.computed_polynomial();
        let (out, ledger, report) = shrink_multilayered(&m).unwrap();
        assert_eq!(ledger.apply(&out.computed_polynomial()), f);
        let j0 = report.steps[0].j0.unwrap();
        assert!(3 * j0 > 9 && 3 * j0 <= 18);
        // the 3-layer branch survives untouched
        assert!(out.branches.iter().any(|b| b.num_layers() == 3));
        assert!(out.num_layers() <= 6);
        assert!(out.size() <= m.size());
        assert!(report.all_bounds_hold());
    }

    #[test]
    fn reduce_layers_below_geometric_decrease() {
        let r = ring();
        let deep = chain(&(0..27).map(|i| var(r, (i % 4) + 1)).collect::<Vec<_>>());
        let m: MultilayeredAbp = deep.into();
        let f = m.computed_polynomial();
        let (out, ledger, report) = reduce_layers_below(&m, 4).unwrap();
        assert!(out.num_layers() <= 4);
        assert_eq!(ledger.apply(&out.computed_polynomial()), f);
        assert!(report.all_bounds_hold());
        let mut d = 28;
        for step in &report.steps {
            assert_eq!(step.layers_before, Some(d));
            let next = step.layers_after.unwrap();
            assert!(next <= (2 * d).div_ceil(3));
            d = next;
        }
    }

    #[test]
    fn reduce_layers_identity_when_already_small() {
        let r = ring();
        let a = chain(&[var(r, 1), var(r, 2)]);
        let m: MultilayeredAbp = a.into();
        let (out, ledger, report) = reduce_layers_below(&m, 4).unwrap();
        assert_eq!(out.num_layers(), 3);
        assert!(ledger.is_empty());
        assert!(report.steps.is_empty());
    }

    #[test]
    fn band_audit_on_chain() {
        let r = ring();
        let a = chain(&[var(r, 1), var(r, 2), var(r, 3), var(r, 4)]).to_unlayered();
        let audit = audit_degree_bands(&a, 0);
        assert_eq!(audit.formal_degree, 4);
        // one vertex per band 0..=4
        assert_eq!(audit.counts, vec![1, 1, 1, 1, 1]);
        assert_eq!(audit.usable_bands, 3);
    }

    #[test]
    fn padding_preserves_polynomial() {
        let a = affine_chain();
        let padded = pad_with_scalar_layers(&a, 5);
        assert_eq!(padded.num_layers(), a.num_layers() + 5);
        assert_eq!(padded.computed_polynomial(), a.computed_polynomial());
        assert!(padded.validate().is_empty());
    }
}
