//! Symmetric tridiagonal eigenvalues by Sturm bisection and eigenvectors by
//! inverse iteration. Used for the collective-spin sector, which splits
//! into two parity chains.

/// Number of eigenvalues strictly below `x`.
pub fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0f64;
    for i in 0..d.len() {
        let e2 = if i == 0 { 0.0 } else { e[i - 1] * e[i - 1] };
        q = d[i] - x - if i == 0 { 0.0 } else { e2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (d[i].abs() + x.abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin interval.
fn bounds(d: &[f64], e: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..d.len() {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i < e.len() { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    (lo, hi)
}

/// `k`-th smallest eigenvalue (0-based).
pub fn kth_eigenvalue(d: &[f64], e: &[f64], k: usize) -> f64 {
    let (mut lo, mut hi) = bounds(d, e);
    let scale = lo.abs().max(hi.abs()).max(1.0);
    lo -= 1e-12 * scale;
    hi += 1e-12 * scale;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(d, e, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves `(T − σ I) x = b` by Gaussian elimination with partial pivoting
/// (the LAPACK `gtsv` scheme).
fn solve_shifted(d: &[f64], e: &[f64], sigma: f64, b: &mut [f64]) {
    let n = d.len();
    let tiny = f64::EPSILON * d.iter().chain(e).fold(1.0f64, |m, x| m.max(x.abs()));
    let fix = |p: f64| if p.abs() < tiny { tiny.copysign(p) } else { p };
    let mut dd: Vec<f64> = d.iter().map(|x| x - sigma).collect();
    let mut du: Vec<f64> = e.to_vec();
    // sub-diagonal on input, second super-diagonal after elimination
    let mut dl: Vec<f64> = e.to_vec();
    for i in 0..n.saturating_sub(1) {
        if dd[i].abs() >= dl[i].abs() {
            let f = dl[i] / fix(dd[i]);
            dd[i + 1] -= f * du[i];
            b[i + 1] -= f * b[i];
            dl[i] = 0.0;
        } else {
            let f = dd[i] / dl[i];
            dd[i] = dl[i];
            let t = dd[i + 1];
            dd[i + 1] = du[i] - f * t;
            if i + 2 < n {
                dl[i] = du[i + 1];
                du[i + 1] = -f * dl[i];
            } else {
                dl[i] = 0.0;
            }
            du[i] = t;
            let bt = b[i];
            b[i] = b[i + 1];
            b[i + 1] = bt - f * b[i + 1];
        }
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        if i + 1 < n {
            s -= du[i] * b[i + 1];
        }
        if i + 2 < n {
            s -= dl[i] * b[i + 2];
        }
        b[i] = s / fix(dd[i]);
    }
}

/// Normalized eigenvector for an eigenvalue `lambda` accurate to rounding.
pub fn eigenvector(d: &[f64], e: &[f64], lambda: f64) -> Vec<f64> {
    let n = d.len();
    let scale = d.iter().chain(e).fold(1.0f64, |m, x| m.max(x.abs()));
    let sigma = lambda + 1e-13 * scale;
    // deterministic start with no special symmetry
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i as f64) * 0.618).sin()).collect();
    for _ in 0..4 {
        solve_shifted(d, e, sigma, &mut x);
        let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in &mut x {
            *v /= nrm;
        }
    }
    x
}

/// `‖T x − λ x‖`.
pub fn residual(d: &[f64], e: &[f64], lambda: f64, x: &[f64]) -> f64 {
    let n = d.len();
    let mut r = 0.0;
    for i in 0..n {
        let mut y = (d[i] - lambda) * x[i];
        if i > 0 {
            y += e[i - 1] * x[i - 1];
        }
        if i + 1 < n {
            y += e[i] * x[i + 1];
        }
        r += y * y;
    }
    r.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_chain_eigenvalues() {
        // -2cos(kπ/(n+1)) spectrum of the path graph
        let n = 20;
        let d = vec![0.0; n];
        let e = vec![-1.0; n - 1];
        for k in 0..n {
            let exact = -2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            let got = kth_eigenvalue(&d, &e, k);
            assert!((got - exact).abs() < 1e-12, "{k}: {got} vs {exact}");
            let v = eigenvector(&d, &e, got);
            assert!(residual(&d, &e, got, &v) < 1e-10);
        }
    }

    #[test]
    fn single_element() {
        assert!((kth_eigenvalue(&[3.5], &[], 0) - 3.5).abs() < 1e-12);
    }
}
