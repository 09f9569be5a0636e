//! Dense LU with partial pivoting.

/// Solves `a * x = b` in place; `a` is row-major `n x n` and is destroyed,
/// `b` receives `x`. Returns `None` when a pivot vanishes.
pub fn solve_in_place(a: &mut [f64], b: &mut [f64]) -> Option<()> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    for k in 0..n {
        let (pivot_row, pivot) = (k..n)
            .map(|r| (r, a[r * n + k].abs()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(pivot > 0.0) || !pivot.is_finite() {
            return None;
        }
        if pivot_row != k {
            for c in 0..n {
                a.swap(k * n + c, pivot_row * n + c);
            }
            b.swap(k, pivot_row);
        }
        let diag = a[k * n + k];
        for r in k + 1..n {
            let factor = a[r * n + k] / diag;
            if factor == 0.0 {
                continue;
            }
            a[r * n + k] = 0.0;
            for c in k + 1..n {
                a[r * n + c] -= factor * a[k * n + c];
            }
            b[r] -= factor * b[k];
        }
    }
    for k in (0..n).rev() {
        let mut acc = b[k];
        for c in k + 1..n {
            acc -= a[k * n + c] * b[c];
        }
        b[k] = acc / a[k * n + k];
    }
    Some(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn needs_pivoting() {
        let mut a = [0.0, 1.0, 2.0, 3.0];
        let mut b = [1.0, 8.0];
        solve_in_place(&mut a, &mut b).unwrap();
        assert!((b[0] - 2.5).abs() < 1e-14);
        assert!((b[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn singular() {
        let mut a = [1.0, 2.0, 2.0, 4.0];
        let mut b = [1.0, 1.0];
        assert!(solve_in_place(&mut a, &mut b).is_none());
    }

    #[test]
    fn three_by_three() {
        // x = (1, -2, 3)
        let mut a = [4.0, -2.0, 1.0, -2.0, 4.0, -2.0, 1.0, -2.0, 4.0];
        let mut b = [11.0, -16.0, 17.0];
        solve_in_place(&mut a, &mut b).unwrap();
        for (got, want) in b.iter().zip([1.0, -2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }
}
