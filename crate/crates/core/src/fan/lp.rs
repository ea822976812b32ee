//! Exact feasibility of `{x ≥ 0 : A·x = b}` over the rationals.
//!
//! Phase-one simplex with Bland's rule. Only used for the small cone
//! questions asked by fan validation, so a dense tableau is fine.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub(crate) fn feasible(a: &[Vec<BigInt>], b: &[BigInt]) -> bool {
    let m = a.len();
    if m == 0 {
        return true;
    }
    let n = a[0].len();
    // tableau columns: n originals, m artificials, rhs
    let width = n + m + 1;
    let mut t: Vec<Vec<BigRational>> = Vec::with_capacity(m + 1);
    for i in 0..m {
        let flip = b[i].is_negative();
        let mut row = vec![BigRational::zero(); width];
        for j in 0..n {
            let v = BigRational::from_integer(a[i][j].clone());
            row[j] = if flip { -v } else { v };
        }
        row[n + i] = BigRational::from_integer(1.into());
        let rhs = BigRational::from_integer(b[i].clone());
        row[width - 1] = if flip { -rhs } else { rhs };
        t.push(row);
    }
    // objective: minimize sum of artificials, expressed in nonbasic columns
    let mut obj = vec![BigRational::zero(); width];
    for row in &t {
        for j in 0..n {
            obj[j] -= &row[j];
        }
        obj[width - 1] -= &row[width - 1];
    }
    t.push(obj);
    let mut basis: Vec<usize> = (n..n + m).collect();

    loop {
        // Bland: lowest-index column with negative reduced cost
        let Some(col) = (0..n + m).find(|&j| t[m][j].is_negative()) else { break };
        let mut pivot: Option<(usize, BigRational)> = None;
        for i in 0..m {
            if t[i][col].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][col];
                let better = match &pivot {
                    None => true,
                    Some((pi, pr)) => ratio < *pr || (ratio == *pr && basis[i] < basis[*pi]),
                };
                if better {
                    pivot = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = pivot else {
            // unbounded is impossible for phase one
            break;
        };
        let p = t[row][col].clone();
        for x in t[row].iter_mut() {
            *x /= &p;
        }
        let prow = t[row].clone();
        for (i, r) in t.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let f = r[col].clone();
            for (x, y) in r.iter_mut().zip(&prow) {
                *x -= &f * y;
            }
        }
        basis[row] = col;
    }
    t[m][width - 1].is_zero()
}
