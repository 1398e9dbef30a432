//! Small exact linear algebra over Q: rank, linear solves and nonnegative solves.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::cartan::DoubleIndex;
use crate::linform::LinForm;

pub type Q = BigRational;

pub fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Row echelon form in place; returns the pivot columns.
fn echelon(m: &mut [Vec<Q>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let factor = row[c].clone();
                for (x, p) in row[c..].iter_mut().zip(&pivot[c..]) {
                    *x -= &factor * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<Q>]) -> usize {
    let mut m = m.to_vec();
    echelon(&mut m).len()
}

/// Rank of the given forms as vectors on their joint support.
pub fn rank_of_integer_rows(rows: &[LinForm]) -> usize {
    let (_, m) = forms_to_matrix(rows);
    rank(&m)
}

/// Rows of coefficients over the sorted joint support.
pub fn forms_to_matrix(forms: &[LinForm]) -> (Vec<DoubleIndex>, Vec<Vec<Q>>) {
    let mut cols: BTreeMap<DoubleIndex, usize> = BTreeMap::new();
    for f in forms {
        for d in f.support() {
            cols.insert(d, 0);
        }
    }
    for (idx, v) in cols.values_mut().enumerate() {
        *v = idx;
    }
    let m = forms
        .iter()
        .map(|f| {
            let mut row = vec![Q::zero(); cols.len()];
            for (d, c) in f.terms() {
                row[cols[&d]] = Q::from_integer(c.clone());
            }
            row
        })
        .collect();
    (cols.into_keys().collect(), m)
}

/// Some x with `a x = b` (free variables set to zero), or `None` if inconsistent.
pub fn solve(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = a.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<Q>> =
        a.iter().zip(b).map(|(row, rhs)| row.iter().cloned().chain(std::iter::once(rhs.clone())).collect()).collect();
    let pivots = echelon(&mut aug);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = vec![Q::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][n].clone();
    }
    Some(x)
}

/// Some λ ≥ 0 with Σ λ_g gens[g] = v, by phase-one simplex under Bland's rule.
/// `gens` and `v` are columns over a common coordinate list.
pub fn nonneg_combination(gens: &[Vec<Q>], v: &[Q]) -> Option<Vec<Q>> {
    let m = v.len();
    let n = gens.len();
    if m == 0 {
        return Some(vec![Q::zero(); n]);
    }
    // Tableau rows: [A | I | b] with b >= 0, basis starts at the artificials.
    let mut t: Vec<Vec<Q>> = (0..m)
        .map(|i| {
            let flip = v[i].is_negative();
            let sign = if flip { -Q::one() } else { Q::one() };
            let mut row: Vec<Q> = gens.iter().map(|g| &g[i] * &sign).collect();
            row.extend((0..m).map(|j| if i == j { Q::one() } else { Q::zero() }));
            row.push(&v[i] * &sign);
            row
        })
        .collect();
    let width = n + m;
    let mut basis: Vec<usize> = (n..n + m).collect();
    // Objective: minimize the sum of artificials; reduced costs over the tableau.
    loop {
        let cost = |j: usize| -> Q {
            let c_j = if j >= n { Q::one() } else { Q::zero() };
            let mut z = Q::zero();
            for (i, &bi) in basis.iter().enumerate() {
                if bi >= n {
                    z += &t[i][j];
                }
            }
            c_j - z
        };
        let Some(enter) = (0..width).find(|&j| !basis.contains(&j) && cost(j).is_negative()) else { break };
        let mut leave: Option<(usize, Q)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (r, _) = leave.expect("phase one is bounded below");
        let inv = t[r][enter].recip();
        for x in t[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && !row[enter].is_zero() {
                let factor = row[enter].clone();
                for (x, p) in row.iter_mut().zip(&pivot) {
                    *x -= &factor * p;
                }
            }
        }
        basis[r] = enter;
    }
    let infeasible = basis.iter().enumerate().any(|(i, &b)| b >= n && !t[i][width].is_zero());
    if infeasible {
        return None;
    }
    let mut x = vec![Q::zero(); n];
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            x[b] = t[i][width].clone();
        }
    }
    Some(x)
}
