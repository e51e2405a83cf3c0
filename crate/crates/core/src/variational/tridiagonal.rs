//! Tridiagonal solve with partial pivoting (the `gtsv` elimination).

/// Solves `A x = b` where `A` has sub-diagonal `lower`, diagonal `diag` and
/// super-diagonal `upper`. Returns `None` when a pivot vanishes.
pub fn solve(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = diag.len();
    assert!(n > 0 && lower.len() + 1 == n && upper.len() + 1 == n && rhs.len() == n);
    let mut dl = lower.to_vec();
    let mut d = diag.to_vec();
    let mut du = upper.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut b = rhs.to_vec();

    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                return None;
            }
            let fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
        } else {
            // swap rows i and i + 1
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let tmp = d[i + 1];
            d[i + 1] = du[i] - fact * tmp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du2[i];
            }
            du[i] = tmp;
            let tb = b[i];
            b[i] = b[i + 1];
            b[i + 1] = tb - fact * b[i + 1];
        }
        dl[i] = 0.0;
    }
    if d[n - 1] == 0.0 {
        return None;
    }

    let mut x = vec![0.0; n];
    x[n - 1] = b[n - 1] / d[n - 1];
    if n > 1 {
        x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Dense Gaussian elimination with partial pivoting.
    fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
                .unwrap();
            a.swap(k, p);
            b.swap(k, p);
            for i in k + 1..n {
                let (top, bottom) = a.split_at_mut(i);
                let (pivot, row) = (&top[k], &mut bottom[0]);
                let f = row[k] / pivot[k];
                for (x, y) in row[k..].iter_mut().zip(&pivot[k..]) {
                    *x -= f * y;
                }
                b[i] -= f * b[k];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
            x[i] = (b[i] - s) / a[i][i];
        }
        x
    }

    #[test]
    fn second_difference_system() {
        // -x_{i-1} + 2 x_i - x_{i+1} = 0 with x_0 = 0, x_4 = 4 folded into rhs
        let x = solve(
            &[-1.0, -1.0],
            &[2.0, 2.0, 2.0],
            &[-1.0, -1.0],
            &[0.0, 0.0, 4.0],
        )
        .unwrap();
        for (k, v) in x.iter().enumerate() {
            assert!((v - (k + 1) as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn needs_pivoting() {
        let x = solve(&[1.0], &[0.0, 1.0], &[1.0], &[2.0, 3.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0]);
        assert!(solve(&[0.0], &[0.0, 1.0], &[1.0], &[1.0, 1.0]).is_none());
        assert_eq!(solve(&[], &[4.0], &[], &[2.0]).unwrap(), vec![0.5]);
    }

    proptest! {
        #[test]
        fn agrees_with_dense_elimination(
            rows in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0, -5.0f64..5.0), 2..12)
        ) {
            let n = rows.len();
            let lower: Vec<f64> = rows[1..].iter().map(|r| r.0).collect();
            let diag: Vec<f64> = rows.iter().map(|r| r.1 + 7.0 * r.1.signum()).collect();
            let upper: Vec<f64> = rows[..n - 1].iter().map(|r| r.2).collect();
            let rhs: Vec<f64> = rows.iter().map(|r| r.3).collect();
            let mut a = vec![vec![0.0; n]; n];
            for i in 0..n {
                a[i][i] = diag[i];
                if i > 0 { a[i][i - 1] = lower[i - 1]; }
                if i + 1 < n { a[i][i + 1] = upper[i]; }
            }
            let got = solve(&lower, &diag, &upper, &rhs).unwrap();
            let want = dense_solve(a, rhs);
            for (g, w) in got.iter().zip(&want) {
                prop_assert!((g - w).abs() < 1e-9 * w.abs().max(1.0));
            }
        }
    }
}
