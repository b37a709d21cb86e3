//! Small numerical building blocks shared across modules.
//!
//! Reductions here are deterministic: pairwise summation always combines
//! terms in the same fixed tree regardless of how the terms were produced,
//! so outputs are bit-identical run to run and thread count never leaks
//! into results.

/// Pairwise (cascade) sum of a slice, O(log n) error growth.
pub fn pairwise_sum(x: &[f64]) -> f64 {
    if x.len() <= 32 {
        let mut s = 0.0;
        for &v in x {
            s += v;
        }
        return s;
    }
    let mid = x.len() / 2;
    pairwise_sum(&x[..mid]) + pairwise_sum(&x[mid..])
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Newton iteration on the Legendre recurrence with the classical Chebyshev
/// initial guess; nodes come out sorted ascending and exactly antisymmetric.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2, "need at least a 2-point rule");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // i-th root counted from the upper end
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // evaluate P_n(x) and P'_n(x)
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0, x);
        for k in 2..=n {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Find where a strictly decreasing positive function crosses `level`.
///
/// Bisection on a logarithmic abscissa between `lo` and `hi` (both > 0,
/// with f(lo) > level > f(hi)), refined until the bracket width is below
/// `rel_tol` relatively. Returns the geometric midpoint of the final
/// bracket.
pub fn bisect_decreasing_log<F: Fn(f64) -> f64>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    level: f64,
    rel_tol: f64,
) -> f64 {
    debug_assert!(lo > 0.0 && hi > lo);
    for _ in 0..200 {
        let mid = (lo.ln() + hi.ln()).mul_add(0.5, 0.0).exp();
        if f(mid) > level {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= rel_tol * hi {
            break;
        }
    }
    (lo.ln() + hi.ln()).mul_add(0.5, 0.0).exp()
}

/// Second-order Richardson extrapolation: `fine` computed at step h/2,
/// `coarse` at step h, both with leading O(h²) error.
pub fn richardson2(coarse: f64, fine: f64) -> f64 {
    fine + (fine - coarse) / 3.0
}
