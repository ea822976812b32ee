//! Smith and Hermite normal forms over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::IntMatrix;

/// Result of [`smith_normal_form`]: `u · a · v = d` with `u`, `v` unimodular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    /// Inverse of `v`, kept alongside so coset coordinates can be mapped back.
    pub v_inverse: IntMatrix,
    /// Diagonal of `d` (length `min(rows, cols)`), nonzero entries first.
    pub invariants: Vec<BigInt>,
}

impl SmithDecomposition {
    /// Number of nonzero invariant factors, i.e. the rank of the source matrix.
    pub fn rank(&self) -> usize {
        self.invariants.iter().take_while(|d| !d.is_zero()).count()
    }
}

/// Locate the nonzero entry of smallest absolute value in the lower-right
/// block starting at `(t, t)`; ties go to the smallest `(row, col)`.
fn min_pivot(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if a.get(bi, bj).abs() <= x.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

/// Computes the Smith normal form of `a`.
///
/// Pivoting always picks the nonzero entry of minimal absolute value, with a
/// `(row, col)` tie-break, so the transforms are reproducible.
pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut vi = IntMatrix::identity(cols);

    let swap_cols = |d: &mut IntMatrix, v: &mut IntMatrix, vi: &mut IntMatrix, x: usize, y: usize| {
        d.swap_cols(x, y);
        v.swap_cols(x, y);
        vi.swap_rows(x, y);
    };
    // col[dst] += q col[src]  =>  V <- V E, V^{-1} <- E^{-1} V^{-1}
    let add_col = |d: &mut IntMatrix, v: &mut IntMatrix, vi: &mut IntMatrix, dst: usize, src: usize, q: &BigInt| {
        d.add_col_multiple(dst, src, q);
        v.add_col_multiple(dst, src, q);
        vi.add_row_multiple(src, dst, &-q);
    };

    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = min_pivot(&d, t) else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        swap_cols(&mut d, &mut v, &mut vi, t, pj);

        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let q = -d.get(i, t).div_floor(d.get(t, t));
                d.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                if !d.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let q = -d.get(t, j).div_floor(d.get(t, t));
                add_col(&mut d, &mut v, &mut vi, j, t, &q);
                if !d.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                // bring the smallest remainder in row/column t into the pivot
                let mut best = (t, t);
                for i in t + 1..rows {
                    let x = d.get(i, t);
                    if !x.is_zero() && x.abs() < d.get(best.0, best.1).abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..cols {
                    let x = d.get(t, j);
                    if !x.is_zero() && x.abs() < d.get(best.0, best.1).abs() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    d.swap_rows(t, best.0);
                    u.swap_rows(t, best.0);
                } else if best.1 != t {
                    swap_cols(&mut d, &mut v, &mut vi, t, best.1);
                }
                continue;
            }
            // divisibility of the remaining block by the pivot
            let p = d.get(t, t).clone();
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !d.get(i, j).is_multiple_of(&p)));
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }

    let invariants = (0..rows.min(cols)).map(|i| d.get(i, i).clone()).collect();
    SmithDecomposition { u, d, v, v_inverse: vi, invariants }
}

/// Row-style Hermite normal form: returns the nonzero rows of the echelon
/// form of `a`, with positive pivots and entries above each pivot reduced
/// into `[0, pivot)`. The rows form a canonical basis of the row space.
pub fn hermite_rows(a: &IntMatrix) -> IntMatrix {
    let (rows, cols) = (a.rows(), a.cols());
    let mut h = a.clone();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        loop {
            // smallest nonzero entry at or below r in column c
            let mut best: Option<usize> = None;
            for i in r..rows {
                let x = h.get(i, c);
                if !x.is_zero() && best.is_none_or(|b| x.abs() < h.get(b, c).abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            h.swap_rows(r, b);
            let mut done = true;
            for i in r + 1..rows {
                if h.get(i, c).is_zero() {
                    continue;
                }
                let q = -h.get(i, c).div_floor(h.get(r, c));
                h.add_row_multiple(i, r, &q);
                if !h.get(i, c).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.get(r, c).is_zero() {
            continue;
        }
        if h.get(r, c).is_negative() {
            h.negate_row(r);
        }
        let p = h.get(r, c).clone();
        for i in 0..r {
            let q = -h.get(i, c).div_floor(&p);
            h.add_row_multiple(i, r, &q);
        }
        r += 1;
    }
    h.select_rows(&(0..r).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(a: &IntMatrix) -> SmithDecomposition {
        let s = smith_normal_form(a);
        assert_eq!(&(&s.u * a) * &s.v, s.d);
        assert_eq!(&s.v * &s.v_inverse, IntMatrix::identity(a.cols()));
        assert!(s.u.det().abs().is_one());
        assert!(s.d.is_diagonal());
        s
    }

    #[test]
    fn diag_two_three() {
        let s = check(&IntMatrix::diagonal(&[2, 3]));
        assert_eq!(s.invariants, vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn identity_is_fixed() {
        let s = check(&IntMatrix::identity(2));
        assert_eq!(s.d, IntMatrix::identity(2));
    }

    #[test]
    fn two_by_two_example() {
        let s = check(&IntMatrix::from_i64_rows(&[&[2, 4], &[6, 8]]));
        assert_eq!(s.invariants, vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn rectangular_and_degenerate() {
        let s = check(&IntMatrix::from_i64_rows(&[&[0, 0, 0], &[0, 4, 6]]));
        assert_eq!(s.invariants, vec![BigInt::from(2), BigInt::zero()]);
        let z = check(&IntMatrix::zeros(2, 3));
        assert_eq!(z.rank(), 0);
        check(&IntMatrix::zeros(0, 3));
    }

    #[test]
    fn hermite_canonical() {
        let a = IntMatrix::from_i64_rows(&[&[2, 0], &[1, 1], &[0, 2]]);
        let h = hermite_rows(&a);
        assert_eq!(h, IntMatrix::from_i64_rows(&[&[1, 1], &[0, 2]]));
        let b = IntMatrix::from_i64_rows(&[&[1, -1], &[0, 2]]);
        assert_eq!(hermite_rows(&b), h);
    }
}
