//! Builders for the named polynomials and their ABP/formula realizations:
//! power sums, elementary symmetric polynomials, and the depth-3 product
//! formula for the latter obtained by interpolation.

use crate::abp::LayeredAbp;
use crate::field::Scalar;
use crate::formula::{FNode, Formula, FormulaError};
use crate::poly::{Exponents, Ring, SparsePoly};

/// `sum_{i=1}^{n} x_i^k`.
pub fn power_sum_poly(ring: Ring, k: u32) -> SparsePoly {
    let mut acc = SparsePoly::zero(ring);
    for i in 0..ring.nvars {
        let mut exps = vec![0u32; ring.nvars];
        exps[i] = k;
        acc = acc.add(&SparsePoly::monomial(ring, Exponents(exps), ring.field.one()));
    }
    acc
}

/// The natural layered ABP for the power sum: n parallel chains of k
/// variable-labeled edges sharing start and end. Has k+1 layers, interior
/// width n, and formal degree k.
pub fn power_sum_abp(ring: Ring, k: u32) -> LayeredAbp {
    let n = ring.nvars;
    let k = k.max(1) as usize;
    let mut widths = vec![1usize];
    widths.extend(std::iter::repeat(n).take(k - 1));
    widths.push(1);
    let mut abp = LayeredAbp::from_layer_widths(ring, 1, &widths);
    let s = abp.start();
    let t = abp.end();
    for i in 0..n {
        let x = SparsePoly::var(ring, i + 1).unwrap();
        if k == 1 {
            abp.add_edge(s, t, x);
            continue;
        }
        abp.add_edge(s, abp.layers[1][i], x.clone());
        for j in 1..k - 1 {
            abp.add_edge(abp.layers[j][i], abp.layers[j + 1][i], x.clone());
        }
        abp.add_edge(abp.layers[k - 1][i], t, x);
    }
    abp
}

/// `esym(n, d)`: the sum over all size-d subsets of the product of the
/// chosen variables. `binomial(n, d)` terms.
pub fn esym_brute(ring: Ring, d: usize) -> SparsePoly {
    let n = ring.nvars;
    let mut acc = SparsePoly::zero(ring);
    if d > n {
        return acc;
    }
    // iterate subsets in lexicographic order
    let mut subset: Vec<usize> = (0..d).collect();
    loop {
        let mut exps = vec![0u32; n];
        for &i in &subset {
            exps[i] = 1;
        }
        acc = acc.add(&SparsePoly::monomial(ring, Exponents(exps), ring.field.one()));
        if d == 0 {
            break;
        }
        // next combination
        let mut i = d;
        loop {
            if i == 0 {
                return acc;
            }
            i -= 1;
            if subset[i] != i + n - d {
                break;
            }
        }
        if subset[i] == i + n - d {
            return acc;
        }
        subset[i] += 1;
        for j in i + 1..d {
            subset[j] = subset[j - 1] + 1;
        }
    }
    acc
}

/// Exact Gaussian elimination; returns `None` for a singular system.
fn solve_linear(ring: Ring, mut m: Vec<Vec<Scalar>>, mut rhs: Vec<Scalar>) -> Option<Vec<Scalar>> {
    let f = ring.field;
    let n = m.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !f.is_zero(&m[r][col]))?;
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = f.inv(&m[col][col]).ok()?;
        for c in col..n {
            m[col][c] = f.mul(&m[col][c], &inv);
        }
        rhs[col] = f.mul(&rhs[col], &inv);
        for r in 0..n {
            if r == col || f.is_zero(&m[r][col]) {
                continue;
            }
            let factor = m[r][col].clone();
            for c in col..n {
                let sub = f.mul(&factor, &m[col][c]);
                m[r][c] = f.sub(&m[r][c], &sub);
            }
            let sub = f.mul(&factor, &rhs[col]);
            rhs[r] = f.sub(&rhs[r], &sub);
        }
    }
    Some(rhs)
}

/// Interpolation weights `lambda_j` such that
/// `sum_j lambda_j * prod_i (x_i + beta_j) = esym(n, d)`: the product
/// expands to `sum_k beta^(n-k) * esym(n,k)`, so the weights solve the
/// Vandermonde-style system `sum_j lambda_j * beta_j^(n-k) = [k == d]`.
pub fn esym_interpolation_weights(
    ring: Ring,
    d: usize,
    points: &[Scalar],
) -> Result<Vec<Scalar>, FormulaError> {
    let n = ring.nvars;
    let f = ring.field;
    if points.len() != n + 1 {
        return Err(FormulaError::Precondition(format!(
            "need exactly n+1 = {} interpolation points, got {}",
            n + 1,
            points.len()
        )));
    }
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            if a == b {
                return Err(FormulaError::Precondition(
                    "interpolation points must be pairwise distinct".to_string(),
                ));
            }
        }
    }
    if d > n {
        return Err(FormulaError::Precondition(format!("degree {d} exceeds n = {n}")));
    }
    let mut m = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let row: Vec<Scalar> = points.iter().map(|b| f.pow(b, (n - k) as u64)).collect();
        m.push(row);
    }
    let rhs: Vec<Scalar> = (0..=n).map(|k| if k == d { f.one() } else { f.zero() }).collect();
    solve_linear(ring, m, rhs)
        .ok_or_else(|| FormulaError::Precondition("interpolation system is singular".to_string()))
}

/// Default interpolation points `0, 1, ..., n`; over a prime field this
/// requires `p > n` for distinctness.
pub fn default_points(ring: Ring) -> Vec<Scalar> {
    (0..=ring.nvars as u64).map(|j| ring.field.from_u64(j)).collect()
}

/// The depth-3 formula `sum_{j=0}^{n} lambda_j * prod_{i=1}^{n} (x_i + beta_j)`
/// computing `esym(n, d)`. All n+1 product branches are kept even when a
/// weight is zero, so the variable-leaf count is exactly `n * (n + 1)`.
pub fn esym_ben_or_formula(
    ring: Ring,
    d: usize,
    points: &[Scalar],
) -> Result<Formula, FormulaError> {
    let n = ring.nvars;
    let lambda = esym_interpolation_weights(ring, d, points)?;
    let mut branches = Vec::with_capacity(n + 1);
    for (j, beta) in points.iter().enumerate() {
        let mut factors = Vec::with_capacity(n + 1);
        factors.push(FNode::Const(lambda[j].clone()));
        for i in 1..=n {
            factors.push(FNode::Add(vec![FNode::Var(i), FNode::Const(beta.clone())]));
        }
        branches.push(FNode::Mul(factors));
    }
    let f = Formula { ring, root: FNode::Add(branches) };
    assert_eq!(f.size(), n * (n + 1));
    Ok(f)
}

/// Checks `d/dx_i esym(n,d) = esym(n,d-1) - x_i * d/dx_i esym(n,d-1)`
/// exactly for every i.
pub fn esym_derivative_identity_check(ring: Ring, d: usize) -> bool {
    if d == 0 {
        return false;
    }
    let e_d = esym_brute(ring, d);
    let e_prev = esym_brute(ring, d - 1);
    for i in 1..=ring.nvars {
        let lhs = e_d.partial_derivative(i).unwrap();
        let xi = SparsePoly::var(ring, i).unwrap();
        let rhs = e_prev.sub(&xi.mul(&e_prev.partial_derivative(i).unwrap()));
        if lhs != rhs {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldConfig;

    fn fp(p: u64, n: usize) -> Ring {
        Ring::new(FieldConfig::prime(p).unwrap(), n)
    }

    #[test]
    fn power_sum_poly_cases() {
        let r1 = fp(101, 1);
        assert_eq!(power_sum_poly(r1, 1), SparsePoly::var(r1, 1).unwrap());
        let r2 = fp(101, 2);
        let expected = SparsePoly::var(r2, 1)
            .unwrap()
            .pow(2)
            .add(&SparsePoly::var(r2, 2).unwrap().pow(2));
        assert_eq!(power_sum_poly(r2, 2), expected);
        // (3,3) over F_7 at (1,2,3): 1 + 8 + 27 = 36 = 1 mod 7
        let r3 = Ring::new(FieldConfig::prime(7).unwrap(), 3);
        let p = power_sum_poly(r3, 3);
        let point: Vec<Scalar> = [1i64, 2, 3].iter().map(|&k| r3.field.from_i64(k)).collect();
        assert_eq!(p.evaluate(&point).unwrap(), r3.field.from_i64(1));
    }

    #[test]
    fn power_sum_abp_realizes_poly() {
        for (n, k) in [(1usize, 1u32), (2, 2), (3, 4), (4, 4), (5, 5)] {
            let r = fp(101, n);
            let abp = power_sum_abp(r, k);
            assert!(abp.validate().is_empty(), "n={n} k={k}");
            assert_eq!(abp.num_layers(), k as usize + 1);
            assert_eq!(abp.formal_degree(), k);
            assert_eq!(abp.computed_polynomial(), power_sum_poly(r, k));
        }
        // (2,2): size 2 + n(k-1) = 4
        assert_eq!(power_sum_abp(fp(101, 2), 2).size(), 4);
    }

    #[test]
    fn esym_brute_cases() {
        let r = fp(101, 3);
        let x = |i| SparsePoly::var(r, i).unwrap();
        let expected = x(1).mul(&x(2)).add(&x(1).mul(&x(3))).add(&x(2).mul(&x(3)));
        assert_eq!(esym_brute(r, 2), expected);
        assert_eq!(esym_brute(r, 0), SparsePoly::one(r));
        let r4 = fp(101, 4);
        assert_eq!(esym_brute(r4, 2).num_terms(), 6);
        assert!(esym_brute(r4, 5).is_zero());
    }

    #[test]
    fn ben_or_formula_matches_brute_force() {
        // F_7, n=3, d=2 with points 0..3
        let r = fp(7, 3);
        let f = esym_ben_or_formula(r, 2, &default_points(r)).unwrap();
        assert_eq!(f.expand().unwrap(), esym_brute(r, 2));
        assert_eq!(f.size(), 12);

        // d=0 expands to the constant 1
        let f0 = esym_ben_or_formula(r, 0, &default_points(r)).unwrap();
        assert_eq!(f0.expand().unwrap(), SparsePoly::one(r));
    }

    #[test]
    fn ben_or_formula_over_rationals() {
        let r = Ring::new(FieldConfig::rational(), 6);
        let f = esym_ben_or_formula(r, 2, &default_points(r)).unwrap();
        assert_eq!(f.size(), 42);
        assert_eq!(f.expand().unwrap(), esym_brute(r, 2));
    }

    #[test]
    fn ben_or_rejects_bad_points() {
        let r = fp(7, 3);
        // duplicated point
        let pts: Vec<Scalar> = [0u64, 1, 1, 2].iter().map(|&k| r.field.from_u64(k)).collect();
        assert!(esym_ben_or_formula(r, 2, &pts).is_err());
        // too few distinct elements in the field: F_3 with n = 3 needs 4 points
        let small = fp(3, 3);
        assert!(esym_ben_or_formula(small, 2, &default_points(small)).is_err());
    }

    #[test]
    fn derivative_identity() {
        assert!(esym_derivative_identity_check(fp(101, 3), 2));
        assert!(esym_derivative_identity_check(fp(7, 4), 3));
        // d = 1: derivative of sum x_i is 1 on each variable
        assert!(esym_derivative_identity_check(fp(101, 4), 1));
        assert!(!esym_derivative_identity_check(fp(101, 4), 0));
    }

    #[test]
    fn summed_derivative_identity() {
        // sum_i d/dx_i esym(n,d) = (n - d + 1) * esym(n, d-1)
        for (n, d) in [(3usize, 2usize), (4, 2), (4, 3), (5, 3)] {
            let r = fp(101, n);
            let e_d = esym_brute(r, d);
            let mut lhs = SparsePoly::zero(r);
            for i in 1..=n {
                lhs = lhs.add(&e_d.partial_derivative(i).unwrap());
            }
            let rhs = esym_brute(r, d - 1).scale(&r.field.from_i64((n - d + 1) as i64));
            assert_eq!(lhs, rhs, "n={n} d={d}");
        }
    }
}
