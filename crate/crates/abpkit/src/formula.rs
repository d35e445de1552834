//! Algebraic formulas: rooted trees with variable/constant leaves and
//! sum/product gates, plus the band-vertex extraction machinery that
//! reduces formal degree while tracking the error in a ledger.
//!
//! Size counts variable-labeled leaves only; constant leaves are free.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abp::ErrorLedger;
use crate::field::Scalar;
use crate::poly::{PolyError, Ring, SparsePoly};
use crate::report::{BoundCheck, StepReport, TransformReport};

#[derive(Debug, Error)]
pub enum FormulaError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FNode {
    /// 1-based variable index.
    Var(usize),
    Const(Scalar),
    Add(Vec<FNode>),
    Mul(Vec<FNode>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Formula {
    pub ring: Ring,
    pub root: FNode,
}

impl FNode {
    fn fdeg(&self) -> u32 {
        match self {
            FNode::Var(_) => 1,
            FNode::Const(_) => 0,
            FNode::Add(cs) => cs.iter().map(FNode::fdeg).max().unwrap_or(0),
            FNode::Mul(cs) => cs.iter().map(FNode::fdeg).sum(),
        }
    }

    fn size(&self) -> usize {
        match self {
            FNode::Var(_) => 1,
            FNode::Const(_) => 0,
            FNode::Add(cs) | FNode::Mul(cs) => cs.iter().map(FNode::size).sum(),
        }
    }

    fn total_leaves(&self) -> usize {
        match self {
            FNode::Var(_) | FNode::Const(_) => 1,
            FNode::Add(cs) | FNode::Mul(cs) => cs.iter().map(FNode::total_leaves).sum(),
        }
    }

    fn expand(&self, ring: Ring) -> Result<SparsePoly, PolyError> {
        Ok(match self {
            FNode::Var(i) => SparsePoly::var(ring, *i)?,
            FNode::Const(c) => SparsePoly::constant(ring, c.clone()),
            FNode::Add(cs) => {
                let mut acc = SparsePoly::zero(ring);
                for c in cs {
                    acc = acc.add(&c.expand(ring)?);
                }
                acc
            }
            FNode::Mul(cs) => {
                let mut acc = SparsePoly::one(ring);
                for c in cs {
                    acc = acc.mul(&c.expand(ring)?);
                }
                acc
            }
        })
    }

    fn node_at(&self, path: &[usize]) -> &FNode {
        match path.split_first() {
            None => self,
            Some((&i, rest)) => match self {
                FNode::Add(cs) | FNode::Mul(cs) => cs[i].node_at(rest),
                _ => panic!("path descends into a leaf"),
            },
        }
    }

    fn replaced(&self, path: &[usize], new: FNode) -> FNode {
        match path.split_first() {
            None => new,
            Some((&i, rest)) => match self {
                FNode::Add(cs) => {
                    let mut cs = cs.clone();
                    cs[i] = cs[i].replaced(rest, new);
                    FNode::Add(cs)
                }
                FNode::Mul(cs) => {
                    let mut cs = cs.clone();
                    cs[i] = cs[i].replaced(rest, new);
                    FNode::Mul(cs)
                }
                _ => panic!("path descends into a leaf"),
            },
        }
    }

    /// Right-folds every gate to fan-in 2; preserves semantics, formal
    /// degree, and variable-leaf count.
    fn binarized(&self) -> FNode {
        fn fold(cs: &[FNode], mul: bool) -> FNode {
            let cs: Vec<FNode> = cs.iter().map(FNode::binarized).collect();
            if cs.len() == 2 {
                return if mul { FNode::Mul(cs) } else { FNode::Add(cs) };
            }
            let head = cs[0].clone();
            let rest = fold(&cs[1..], mul);
            if mul {
                FNode::Mul(vec![head, rest])
            } else {
                FNode::Add(vec![head, rest])
            }
        }
        match self {
            FNode::Var(_) | FNode::Const(_) => self.clone(),
            FNode::Add(cs) if cs.len() == 1 => cs[0].binarized(),
            FNode::Mul(cs) if cs.len() == 1 => cs[0].binarized(),
            FNode::Add(cs) => fold(cs, false),
            FNode::Mul(cs) => fold(cs, true),
        }
    }
}

impl Formula {
    pub fn var(ring: Ring, i: usize) -> Result<Self, FormulaError> {
        if i == 0 || i > ring.nvars {
            return Err(FormulaError::Precondition(format!(
                "variable x{i} outside 1..={}",
                ring.nvars
            )));
        }
        Ok(Formula { ring, root: FNode::Var(i) })
    }

    pub fn constant(ring: Ring, c: Scalar) -> Self {
        Formula { ring, root: FNode::Const(c) }
    }

    pub fn sum(ring: Ring, children: Vec<FNode>) -> Self {
        assert!(children.len() >= 2, "sum gate needs fan-in >= 2");
        Formula { ring, root: FNode::Add(children) }
    }

    pub fn product(ring: Ring, children: Vec<FNode>) -> Self {
        assert!(children.len() >= 2, "product gate needs fan-in >= 2");
        Formula { ring, root: FNode::Mul(children) }
    }

    /// Formal degree: variable leaf 1, constant leaf 0, sum gate the max
    /// of its children, product gate the sum.
    pub fn fdeg(&self) -> u32 {
        self.root.fdeg()
    }

    /// Number of variable-labeled leaves.
    pub fn size(&self) -> usize {
        self.root.size()
    }

    /// All leaves, constants included (reported for comparison only).
    pub fn total_leaves(&self) -> usize {
        self.root.total_leaves()
    }

    /// Exact polynomial computed by the formula.
    pub fn expand(&self) -> Result<SparsePoly, FormulaError> {
        Ok(self.root.expand(self.ring)?)
    }

    /// Same polynomial with every gate at fan-in 2.
    pub fn binarize(&self) -> Formula {
        Formula { ring: self.ring, root: self.root.binarized() }
    }

    pub fn subformula(&self, path: &[usize]) -> Formula {
        Formula { ring: self.ring, root: self.root.node_at(path).clone() }
    }
}

/// Walks from the root toward the child of larger formal degree until the
/// degree first drops to at most `2t-1`; the vertex reached has formal
/// degree in `[t, 2t-1]`. Product gates must be binary for the lower end
/// of that window (see [`Formula::binarize`]); ties go to the leftmost
/// child.
pub fn find_band_vertex(f: &Formula, t: u32) -> Result<Vec<usize>, FormulaError> {
    if t == 0 {
        return Err(FormulaError::Precondition("band threshold must be positive".to_string()));
    }
    if f.fdeg() < 2 * t {
        return Err(FormulaError::Precondition(format!(
            "formal degree {} is below 2t = {}",
            f.fdeg(),
            2 * t
        )));
    }
    let mut node = &f.root;
    let mut path = Vec::new();
    while node.fdeg() >= 2 * t {
        let children = match node {
            FNode::Add(cs) | FNode::Mul(cs) => cs,
            _ => unreachable!("a leaf has formal degree at most 1 < 2t"),
        };
        let (best, _) = children
            .iter()
            .enumerate()
            .max_by(|(i, a), (j, b)| a.fdeg().cmp(&b.fdeg()).then(j.cmp(i)))
            .expect("gates have fan-in >= 2");
        path.push(best);
        node = &children[best];
    }
    let got = node.fdeg();
    assert!(
        got >= t && got <= 2 * t - 1,
        "band walk landed at formal degree {got}, outside [{t}, {}]",
        2 * t - 1
    );
    Ok(path)
}

/// Result of replacing the subtree at `path` by a fresh indeterminate:
/// the whole formula then computes `h * y + f0`, so the original satisfies
/// `F = h * (subtree polynomial) + f0`.
pub struct VertexSplit {
    pub subformula: Formula,
    pub h: SparsePoly,
    pub f0: SparsePoly,
}

pub fn split_at_vertex(f: &Formula, path: &[usize]) -> Result<VertexSplit, FormulaError> {
    let ring = f.ring;
    let ext = Ring::new(ring.field, ring.nvars + 1);
    let y = ring.nvars + 1;
    let with_y = Formula {
        ring: ext,
        root: f.root.replaced(path, FNode::Var(y)),
    };
    let expanded = with_y.expand()?;
    let mut h = SparsePoly::zero(ring);
    let mut f0 = SparsePoly::zero(ring);
    for (exps, coeff) in expanded.terms() {
        let head = crate::poly::Exponents(exps.0[..ring.nvars].to_vec());
        let y_exp = exps.0[ring.nvars];
        let mono = SparsePoly::monomial(ring, head, coeff.clone());
        match y_exp {
            0 => f0 = f0.add(&mono),
            1 => h = h.add(&mono),
            _ => panic!("substituted indeterminate occurs with degree > 1"),
        }
    }
    let sub = f.subformula(path);
    // exactness: F = h * [subtree] + f0
    debug_assert_eq!(h.mul(&sub.expand()?).add(&f0), f.expand()?);
    Ok(VertexSplit { subformula: sub, h, f0 })
}

/// Output of one full round of band-vertex extraction:
/// `input = phi_prime + sum g_i*h_i + constant`, with every `g_i`, `h_i`
/// constant-free, `phi_prime` of formal degree at most `2*floor(d/3)` and
/// size at most the input's.
pub struct FormulaDecomposition {
    pub phi_prime: Formula,
    pub pairs: Vec<(SparsePoly, SparsePoly)>,
    pub constant: Scalar,
    /// Number of extraction rounds performed (>= pairs kept).
    pub extractions: usize,
    /// Formal degrees of the extracted subformulas, each in `[t, 2t-1]`.
    pub band_fdegs: Vec<u32>,
    /// Whether every kept `g_i` also has *polynomial* degree at least
    /// `floor(d/3)`; cancellations inside a subformula can push the actual
    /// degree below its formal degree, so this is recorded, not enforced.
    pub degree_bands_ok: bool,
}

/// Repeatedly extracts a band vertex (threshold `t = floor(d/3)`) until the
/// working formula's formal degree falls below `2t`. Inputs of formal
/// degree below 3 come back unchanged with an empty decomposition.
pub fn decompose_formula(f: &Formula) -> Result<FormulaDecomposition, FormulaError> {
    let ring = f.ring;
    let d = f.fdeg();
    if d < 3 {
        return Ok(FormulaDecomposition {
            phi_prime: f.clone(),
            pairs: Vec::new(),
            constant: ring.field.zero(),
            extractions: 0,
            band_fdegs: Vec::new(),
            degree_bands_ok: true,
        });
    }
    let t = d / 3;
    let s = f.size();
    let mut cur = f.binarize();
    let mut pairs = Vec::new();
    let mut band_fdegs = Vec::new();
    let mut banked: Vec<FNode> = Vec::new();
    let mut banked_size = 0usize;
    let mut constant = ring.field.zero();
    let mut extractions = 0usize;
    let mut degree_bands_ok = true;

    while cur.fdeg() >= 2 * t {
        let path = find_band_vertex(&cur, t)?;
        let split = split_at_vertex(&cur, &path)?;
        let sub_poly = split.subformula.expand()?;
        let (alpha, g) = sub_poly.split_constant();
        let (beta, h) = split.h.split_constant();
        band_fdegs.push(split.subformula.fdeg());
        extractions += 1;

        if !g.is_zero() && !h.is_zero() {
            assert!(g.total_degree().at_most(2 * t - 1));
            if !g.total_degree().at_least(t) {
                degree_bands_ok = false;
            }
            pairs.push((g, h));
        }
        // F = g*h + beta*[subtree] + (alpha*h' + f0) - alpha*beta
        constant = ring.field.sub(&constant, &ring.field.mul(&alpha, &beta));
        if !ring.field.is_zero(&beta) {
            banked.push(FNode::Mul(vec![
                FNode::Const(beta.clone()),
                cur.root.node_at(&path).clone(),
            ]));
            banked_size += split.subformula.size();
        }
        let next_root = cur.root.replaced(&path, FNode::Const(alpha));
        let next = Formula { ring, root: next_root };
        // replacing the subtree by a constant removes exactly its leaves
        assert_eq!(next.size() + split.subformula.size(), cur.size());
        cur = next;
    }
    // extracted subtrees are disjoint, so their sizes plus the residue
    // cannot exceed the input size
    assert!(extractions as u32 * t <= s as u32);
    assert!(cur.size() + banked_size <= s);

    let phi_prime = if banked.is_empty() {
        cur
    } else {
        let mut children = banked;
        children.push(cur.root);
        Formula { ring, root: FNode::Add(children) }
    };
    assert!(phi_prime.fdeg() <= 2 * t);
    assert!(phi_prime.size() <= s);
    Ok(FormulaDecomposition {
        phi_prime,
        pairs,
        constant,
        extractions,
        band_fdegs,
        degree_bands_ok,
    })
}

/// Iterates [`decompose_formula`] until the formal degree is at most
/// `target`, accumulating the extracted pairs and constants in a ledger
/// with the usual orientation `input = output + sum P*Q + delta`.
pub fn reduce_formula_degree(
    f: &Formula,
    target: u32,
) -> Result<(Formula, ErrorLedger, TransformReport), FormulaError> {
    if target < 1 {
        return Err(FormulaError::Precondition("target degree must be at least 1".to_string()));
    }
    let ring = f.ring;
    let mut cur = f.clone();
    let mut ledger = ErrorLedger::empty(ring, 0);
    let mut report = TransformReport::new("reduce-formula-degree");
    loop {
        let d = cur.fdeg();
        if d <= target {
            break;
        }
        if d < 3 {
            report.note(format!("stopped at formal degree {d}: no band threshold below 3"));
            break;
        }
        let s = cur.size();
        let dec = decompose_formula(&cur)?;
        let k = dec.pairs.len();
        for (g, h) in dec.pairs {
            ledger.push_pair(g, h);
        }
        ledger.add_delta(&dec.constant);
        let t = d / 3;
        let growth_bound = s as f64 / t as f64;
        report.push_step(StepReport {
            depth_before: Some(d as usize),
            depth_after: Some(dec.phi_prime.fdeg() as usize),
            size_before: s,
            size_after: dec.phi_prime.size(),
            edges_before: 0,
            edges_after: 0,
            ledger_added: k,
            ledger_dropped_zero: dec.extractions - k,
            ledger_growth_bound: Some(growth_bound),
            bound_checks: vec![
                BoundCheck::le("ledger_growth", dec.extractions as f64, growth_bound),
                BoundCheck::le("fdeg_after", dec.phi_prime.fdeg() as f64, 2.0 * d as f64 / 3.0),
                BoundCheck::le("size_after", dec.phi_prime.size() as f64, s as f64),
            ],
            ..Default::default()
        });
        if !dec.degree_bands_ok {
            report.note(format!(
                "step {}: some extracted factor lost degree to cancellation",
                report.steps.len() - 1
            ));
        }
        cur = dec.phi_prime;
    }
    Ok((cur, ledger, report))
}

// ---------------------------------------------------------------------------
// Text format: fully parenthesized infix
// ---------------------------------------------------------------------------

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    ring: Ring,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn err(&self, msg: &str) -> FormulaError {
        FormulaError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn node(&mut self) -> Result<FNode, FormulaError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let first = self.node()?;
                let op = match self.peek() {
                    Some(b'+') => b'+',
                    Some(b'*') => b'*',
                    Some(b')') => {
                        self.pos += 1;
                        return Ok(first);
                    }
                    _ => return Err(self.err("expected '+', '*', or ')'")),
                };
                let mut children = vec![first];
                while self.peek() == Some(op) {
                    self.pos += 1;
                    children.push(self.node()?);
                }
                match self.peek() {
                    Some(b')') => {
                        self.pos += 1;
                    }
                    Some(b'+') | Some(b'*') => {
                        return Err(self.err("mixed operators need explicit parentheses"))
                    }
                    _ => return Err(self.err("expected ')'")),
                }
                Ok(if op == b'+' { FNode::Add(children) } else { FNode::Mul(children) })
            }
            Some(b'x') => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let idx: usize = std::str::from_utf8(&self.bytes[start..self.pos])
                    .unwrap()
                    .parse()
                    .map_err(|_| self.err("expected variable index after 'x'"))?;
                if idx == 0 || idx > self.ring.nvars {
                    return Err(self.err(&format!("variable x{idx} outside 1..={}", self.ring.nvars)));
                }
                Ok(FNode::Var(idx))
            }
            Some(c) if c.is_ascii_digit() || c == b'-' => {
                let start = self.pos;
                self.pos += 1;
                while self
                    .bytes
                    .get(self.pos)
                    .is_some_and(|&b| b.is_ascii_digit() || b == b'/')
                {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
                let value = self
                    .ring
                    .field
                    .parse_scalar(text)
                    .map_err(|e| self.err(&e.to_string()))?;
                Ok(FNode::Const(value))
            }
            _ => Err(self.err("expected '(', variable, or scalar")),
        }
    }
}

impl Formula {
    pub fn parse_text(ring: Ring, text: &str) -> Result<Formula, FormulaError> {
        let mut p = Parser { bytes: text.as_bytes(), pos: 0, ring };
        let root = p.node()?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(p.err("trailing input"));
        }
        Ok(Formula { ring, root })
    }

    pub fn to_text(&self) -> String {
        fn emit(node: &FNode, ring: Ring, out: &mut String) {
            match node {
                FNode::Var(i) => out.push_str(&format!("x{i}")),
                FNode::Const(c) => out.push_str(&ring.field.format_scalar(c)),
                FNode::Add(cs) | FNode::Mul(cs) => {
                    let op = if matches!(node, FNode::Add(_)) { " + " } else { " * " };
                    out.push('(');
                    for (i, c) in cs.iter().enumerate() {
                        if i > 0 {
                            out.push_str(op);
                        }
                        emit(c, ring, out);
                    }
                    out.push(')');
                }
            }
        }
        let mut out = String::new();
        emit(&self.root, self.ring, &mut out);
        out
    }
}

// ---------------------------------------------------------------------------
// JSON tree format
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FNodeDto {
    Var { index: usize },
    Const { value: String },
    Add { children: Vec<FNodeDto> },
    Mul { children: Vec<FNodeDto> },
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FormulaDto {
    pub field: String,
    pub n: usize,
    pub root: FNodeDto,
}

impl Formula {
    pub fn to_dto(&self) -> FormulaDto {
        fn conv(node: &FNode, ring: Ring) -> FNodeDto {
            match node {
                FNode::Var(i) => FNodeDto::Var { index: *i },
                FNode::Const(c) => FNodeDto::Const { value: ring.field.format_scalar(c) },
                FNode::Add(cs) => FNodeDto::Add {
                    children: cs.iter().map(|c| conv(c, ring)).collect(),
                },
                FNode::Mul(cs) => FNodeDto::Mul {
                    children: cs.iter().map(|c| conv(c, ring)).collect(),
                },
            }
        }
        FormulaDto {
            field: self.ring.field.to_string(),
            n: self.ring.nvars,
            root: conv(&self.root, self.ring),
        }
    }

    pub fn from_dto(dto: &FormulaDto) -> Result<Formula, FormulaError> {
        let field = dto
            .field
            .parse()
            .map_err(|e: crate::field::FieldError| FormulaError::Precondition(e.to_string()))?;
        let ring = Ring::new(field, dto.n);
        fn conv(node: &FNodeDto, ring: Ring) -> Result<FNode, FormulaError> {
            Ok(match node {
                FNodeDto::Var { index } => {
                    if *index == 0 || *index > ring.nvars {
                        return Err(FormulaError::Precondition(format!(
                            "variable x{index} outside 1..={}",
                            ring.nvars
                        )));
                    }
                    FNode::Var(*index)
                }
                FNodeDto::Const { value } => FNode::Const(
                    ring.field
                        .parse_scalar(value)
                        .map_err(|e| FormulaError::Precondition(e.to_string()))?,
                ),
                FNodeDto::Add { children } => FNode::Add(
                    children.iter().map(|c| conv(c, ring)).collect::<Result<_, _>>()?,
                ),
                FNodeDto::Mul { children } => FNode::Mul(
                    children.iter().map(|c| conv(c, ring)).collect::<Result<_, _>>()?,
                ),
            })
        }
        Ok(Formula { ring, root: conv(&dto.root, ring)? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldConfig;

    fn ring() -> Ring {
        Ring::new(FieldConfig::prime(101).unwrap(), 9)
    }

    fn vp(r: Ring, i: usize) -> SparsePoly {
        SparsePoly::var(r, i).unwrap()
    }

    #[test]
    fn expand_basics() {
        let r = ring();
        let f = Formula::var(r, 1).unwrap();
        assert_eq!(f.expand().unwrap(), vp(r, 1));
        // (x1+1)*(x1-1) = x1^2 - 1
        let g = Formula::product(
            r,
            vec![
                FNode::Add(vec![FNode::Var(1), FNode::Const(r.field.one())]),
                FNode::Add(vec![FNode::Var(1), FNode::Const(r.field.from_i64(-1))]),
            ],
        );
        let expected = vp(r, 1).mul(&vp(r, 1)).sub(&SparsePoly::one(r));
        assert_eq!(g.expand().unwrap(), expected);
        assert_eq!(g.fdeg(), 2);
        assert_eq!(g.size(), 2);
        assert_eq!(g.total_leaves(), 4);
    }

    #[test]
    fn size_at_least_fdeg() {
        let r = ring();
        let f = Formula::product(r, vec![FNode::Var(1), FNode::Var(2), FNode::Var(3)]);
        assert!(f.size() >= f.fdeg() as usize);
        let b = f.binarize();
        assert_eq!(b.fdeg(), f.fdeg());
        assert_eq!(b.size(), f.size());
        assert_eq!(b.expand().unwrap(), f.expand().unwrap());
    }

    #[test]
    fn band_vertex_on_balanced_product() {
        let r = ring();
        // ((x1*x2)*(x3*x4))
        let f = Formula::product(
            r,
            vec![
                FNode::Mul(vec![FNode::Var(1), FNode::Var(2)]),
                FNode::Mul(vec![FNode::Var(3), FNode::Var(4)]),
            ],
        );
        let path = find_band_vertex(&f, 2).unwrap();
        let got = f.subformula(&path).fdeg();
        assert!((2..=3).contains(&got));
        assert!(find_band_vertex(&f, 3).is_err());
    }

    #[test]
    fn band_vertex_at_exact_threshold() {
        let r = ring();
        let f = Formula::product(r, vec![FNode::Var(1), FNode::Var(2)]);
        // fdeg = 2 = 2t for t = 1: the heavy child qualifies
        let path = find_band_vertex(&f, 1).unwrap();
        assert_eq!(f.subformula(&path).fdeg(), 1);
    }

    #[test]
    fn split_identity() {
        let r = ring();
        // (x1*x2) + x3 split at the product node
        let f = Formula::sum(
            r,
            vec![FNode::Mul(vec![FNode::Var(1), FNode::Var(2)]), FNode::Var(3)],
        );
        let split = split_at_vertex(&f, &[0]).unwrap();
        assert_eq!(split.h, SparsePoly::one(r));
        assert_eq!(split.f0, vp(r, 3));
        // root split: h = 1, f0 = 0
        let root_split = split_at_vertex(&f, &[]).unwrap();
        assert_eq!(root_split.h, SparsePoly::one(r));
        assert!(root_split.f0.is_zero());
    }

    #[test]
    fn decompose_product_of_nine_variables() {
        let r = ring();
        let f = Formula::product(r, (1..=9).map(FNode::Var).collect());
        let fp = f.expand().unwrap();
        let dec = decompose_formula(&f).unwrap();
        // d = 9, t = 3
        let mut acc = dec.phi_prime.expand().unwrap();
        for (g, h) in &dec.pairs {
            acc = acc.add(&g.mul(h));
        }
        acc = acc.add(&SparsePoly::constant(r, dec.constant.clone()));
        assert_eq!(acc, fp);
        assert!(dec.pairs.len() as u32 * 3 <= 9);
        assert!(dec.phi_prime.fdeg() <= 6);
        assert!(dec.phi_prime.size() <= f.size());
        assert!(dec.degree_bands_ok);
        for fd in &dec.band_fdegs {
            assert!((3..=5).contains(fd));
        }
    }

    #[test]
    fn decompose_low_degree_is_identity() {
        let r = ring();
        let f = Formula::product(r, vec![FNode::Var(1), FNode::Var(2)]);
        let dec = decompose_formula(&f).unwrap();
        assert!(dec.pairs.is_empty());
        assert_eq!(dec.phi_prime, f);
    }

    #[test]
    fn decompose_affine_chain_reconstructs() {
        let r = ring();
        // ((x1+1)*(x2+2)*(x3+3)*(x4+4)) — constants force nonzero alpha/beta
        let factors: Vec<FNode> = (1..=4)
            .map(|i| FNode::Add(vec![FNode::Var(i), FNode::Const(r.field.from_i64(i as i64))]))
            .collect();
        let f = Formula::product(r, factors);
        let fp = f.expand().unwrap();
        let dec = decompose_formula(&f).unwrap();
        let mut acc = dec.phi_prime.expand().unwrap();
        for (g, h) in &dec.pairs {
            assert!(r.field.is_zero(&g.constant_term()));
            assert!(r.field.is_zero(&h.constant_term()));
            acc = acc.add(&g.mul(h));
        }
        acc = acc.add(&SparsePoly::constant(r, dec.constant.clone()));
        assert_eq!(acc, fp);
    }

    #[test]
    fn reduce_degree_right_comb() {
        let r = ring();
        // deep right-comb product of 9 variables
        let mut node = FNode::Var(9);
        for i in (1..9).rev() {
            node = FNode::Mul(vec![FNode::Var(i), node]);
        }
        let f = Formula { ring: r, root: node };
        let fp = f.expand().unwrap();
        let (out, ledger, report) = reduce_formula_degree(&f, 2).unwrap();
        assert!(out.fdeg() <= 2);
        assert_eq!(ledger.apply(&out.expand().unwrap()), fp);
        assert!(report.all_bounds_hold());
        let mut d = 9usize;
        for step in &report.steps {
            assert_eq!(step.depth_before, Some(d));
            let next = step.depth_after.unwrap();
            assert!(3 * next <= 2 * d);
            d = next;
        }
    }

    #[test]
    fn reduce_degree_identity_when_small() {
        let r = ring();
        let f = Formula::product(r, vec![FNode::Var(1), FNode::Var(2)]);
        let (out, ledger, report) = reduce_formula_degree(&f, 2).unwrap();
        assert_eq!(out, f);
        assert!(ledger.is_empty());
        assert!(report.steps.is_empty());
    }

    #[test]
    fn text_roundtrip() {
        let r = ring();
        let f = Formula::parse_text(r, "((x1 + 1) * (x2 + -3) * x3)").unwrap();
        assert_eq!(f.fdeg(), 3);
        let text = f.to_text();
        let g = Formula::parse_text(r, &text).unwrap();
        assert_eq!(g.expand().unwrap(), f.expand().unwrap());
        // errors carry a byte position
        match Formula::parse_text(r, "(x1 + x2 * x3)") {
            Err(FormulaError::Parse { pos, .. }) => assert!(pos > 0),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(Formula::parse_text(r, "x99").is_err());
    }

    #[test]
    fn json_roundtrip() {
        let r = ring();
        let f = Formula::parse_text(r, "((x1 * x2) + 5 + (x3 * x3 * x4))").unwrap();
        let text = serde_json::to_string(&f.to_dto()).unwrap();
        let dto: FormulaDto = serde_json::from_str(&text).unwrap();
        let g = Formula::from_dto(&dto).unwrap();
        assert_eq!(g.expand().unwrap(), f.expand().unwrap());
        assert_eq!(g.size(), f.size());
    }
}
