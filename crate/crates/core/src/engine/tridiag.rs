/// Thomas elimination for a tridiagonal system with constant bands
/// `lower x[i-1] + diag x[i] + upper x[i+1] = rhs[i]`. Solves in place;
/// `scratch` must have the same length as `rhs`.
pub fn solve_tridiagonal(lower: f64, diag: f64, upper: f64, rhs: &mut [f64], scratch: &mut [f64]) {
    let n = rhs.len();
    debug_assert_eq!(scratch.len(), n);
    if n == 0 {
        return;
    }
    let mut denom = diag;
    scratch[0] = upper / denom;
    rhs[0] /= denom;
    for i in 1..n {
        denom = diag - lower * scratch[i - 1];
        scratch[i] = upper / denom;
        rhs[i] = (rhs[i] - lower * rhs[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i] * rhs[i + 1];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_dense_product() {
        let n = 17;
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin() + 2.0).collect();
        let (lo, di, up) = (-0.4, 2.3, -0.7);
        let mut rhs: Vec<f64> = (0..n)
            .map(|i| {
                let mut s = di * x[i];
                if i > 0 {
                    s += lo * x[i - 1];
                }
                if i + 1 < n {
                    s += up * x[i + 1];
                }
                s
            })
            .collect();
        let mut scratch = vec![0.0; n];
        solve_tridiagonal(lo, di, up, &mut rhs, &mut scratch);
        for i in 0..n {
            assert!((rhs[i] - x[i]).abs() < 1e-13);
        }
    }
}
