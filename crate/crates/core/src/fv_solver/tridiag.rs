//! Thomas algorithm for the tridiagonal implicit systems.
//!
//! The systems assembled by the solver are column-diagonally-dominant
//! M-matrices (positive diagonal, nonpositive off-diagonals, unit column
//! sums), so elimination without pivoting is stable and the computed
//! solution of a nonnegative right-hand side is nonnegative: every
//! operation below is a sum/quotient of nonnegative terms.

use crate::error::{CoreError, Result};

/// Solve `A x = rhs` with `A = tridiag(lower, diag, upper)` into `x`.
/// `lower[0]` and `upper[n-1]` are ignored. `cp`/`dp` are scratch.
pub fn solve_into(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &[f64],
    cp: &mut [f64],
    dp: &mut [f64],
    x: &mut [f64],
) -> Result<()> {
    let n = diag.len();
    debug_assert!(lower.len() == n && upper.len() == n && rhs.len() == n);
    debug_assert!(cp.len() == n && dp.len() == n && x.len() == n);
    if n == 0 {
        return Ok(());
    }
    let mut m = diag[0];
    if m == 0.0 || !m.is_finite() {
        return Err(CoreError::TridiagonalSolve(format!(
            "pivot {m} at row 0 (diag = {})",
            diag[0]
        )));
    }
    cp[0] = upper[0] / m;
    dp[0] = rhs[0] / m;
    for i in 1..n {
        m = diag[i] - lower[i] * cp[i - 1];
        if m == 0.0 || !m.is_finite() {
            return Err(CoreError::TridiagonalSolve(format!(
                "pivot {m} at row {i} (diag = {}, lower = {})",
                diag[i], lower[i]
            )));
        }
        cp[i] = upper[i] / m;
        dp[i] = (rhs[i] - lower[i] * dp[i - 1]) / m;
    }
    x[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mul(lower: &[f64], diag: &[f64], upper: &[f64], x: &[f64]) -> Vec<f64> {
        let n = diag.len();
        (0..n)
            .map(|i| {
                let mut v = diag[i] * x[i];
                if i > 0 {
                    v += lower[i] * x[i - 1];
                }
                if i + 1 < n {
                    v += upper[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    #[test]
    fn recovers_known_solution() {
        let n = 257;
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for i in 0..n {
            // column-dominant M-matrix pattern like the solver's
            lower[i] = -0.3 - 0.001 * i as f64;
            upper[i] = -0.4;
            diag[i] = 1.0 + 0.7 + 0.002 * i as f64;
        }
        let x_true: Vec<f64> = (0..n).map(|i| ((i as f64 * 0.1).sin() + 1.5) * 0.3).collect();
        let rhs = mul(&lower, &diag, &upper, &x_true);
        let (mut cp, mut dp, mut x) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        solve_into(&lower, &diag, &upper, &rhs, &mut cp, &mut dp, &mut x).unwrap();
        for i in 0..n {
            assert!((x[i] - x_true[i]).abs() < 1e-12 * x_true[i].abs().max(1.0));
        }
    }

    #[test]
    fn reports_singular_pivot() {
        let r = solve_into(
            &[0.0, 1.0],
            &[1.0, -1.0],
            &[-1.0, 0.0],
            &[1.0, 1.0],
            &mut [0.0; 2],
            &mut [0.0; 2],
            &mut [0.0; 2],
        );
        assert!(matches!(r, Err(CoreError::TridiagonalSolve(_))));
    }
}
