//! Special functions, kernels and small linear-algebra helpers shared by the solvers.

use libm::erfc;

pub(crate) const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Step used for centered finite differences in the state variable.
pub const FD_STEP: f64 = 1e-5;

/// The Gauss kernel `G^eps(t, x)`; `eps = 1` gives the standard kernel `G(t, x)`.
pub fn heat_kernel(t: f64, x: f64, eps: f64) -> f64 {
    let s = 4.0 * eps * t;
    (-x * x / s).exp() / (std::f64::consts::PI * s).sqrt()
}

/// `∫_a^∞ G(1, x) dx` for the standard kernel `G(1, x) = e^{-x²/4} / √(4π)`.
pub fn heat_kernel_tail(a: f64) -> f64 {
    0.5 * erfc(a / 2.0)
}

/// First repeated integral of erfc.
pub(crate) fn ierfc(x: f64) -> f64 {
    (-x * x).exp() * FRAC_1_SQRT_PI - x * erfc(x)
}

/// `i²erfc`, from `4 i²erfc(x) = erfc(x) - 2x ierfc(x)`.
pub(crate) fn i2erfc(x: f64) -> f64 {
    (erfc(x) - 2.0 * x * ierfc(x)) / 4.0
}

/// `i⁴erfc` via the forward recurrence `2n iⁿ = iⁿ⁻² - 2x iⁿ⁻¹`.
pub(crate) fn i4erfc(x: f64) -> f64 {
    let i1 = ierfc(x);
    let i2 = (erfc(x) - 2.0 * x * i1) / 4.0;
    let i3 = (i1 - 2.0 * x * i2) / 6.0;
    (i2 - 2.0 * x * i3) / 8.0
}

/// Unnormalized C∞ bump `exp(-1/(1-ξ²))` on `(-1, 1)`, zero outside.
pub fn bump(xi: f64) -> f64 {
    if xi.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - xi * xi)).exp()
    }
}

/// Derivative of [`bump`].
pub fn bump_derivative(xi: f64) -> f64 {
    if xi.abs() >= 1.0 {
        0.0
    } else {
        let d = 1.0 - xi * xi;
        bump(xi) * (-2.0 * xi / (d * d))
    }
}

/// Nodes and weights of the normalized mollifier on `[-1, 1]`, composite midpoint rule.
///
/// Weights are normalized to sum to one so that constants are reproduced exactly, and the
/// node set is symmetric about the origin with no node at zero.
pub fn mollifier_nodes(n: usize) -> Vec<(f64, f64)> {
    let h = 2.0 / n as f64;
    let raw: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let xi = -1.0 + (k as f64 + 0.5) * h;
            (xi, bump(xi))
        })
        .collect();
    let total: f64 = raw.iter().map(|(_, w)| w).sum();
    raw.into_iter().map(|(xi, w)| (xi, w / total)).collect()
}

/// Solves a tridiagonal system in place (Thomas algorithm).
///
/// `lower[0]` and `upper[n-1]` are ignored. The matrix must be diagonally dominant.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    debug_assert!(lower.len() == n && upper.len() == n && rhs.len() == n);
    if n == 0 {
        return;
    }
    let mut c = vec![0.0; n];
    let mut beta = diag[0];
    c[0] = upper[0] / beta;
    rhs[0] /= beta;
    for i in 1..n {
        beta = diag[i] - lower[i] * c[i - 1];
        c[i] = upper[i] / beta;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

/// Adaptive integration of a smooth integrand, returning `None` when the error estimate
/// stays above `100 * tol`.
pub(crate) fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Option<f64> {
    if a == b {
        return Some(0.0);
    }
    let out = quadrature::integrate(f, a, b, tol);
    if out.integral.is_finite() && out.error_estimate <= 100.0 * tol.max(f64::EPSILON) {
        Some(out.integral)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_matches_half_gaussian() {
        assert!((heat_kernel_tail(0.0) - 0.5).abs() < 1e-16);
        // ½erfc(5), ½erfc(4) evaluated at 30 digits
        let a = 7.687_298_972_140_174e-13;
        assert!((heat_kernel_tail(10.0) - a).abs() < 1e-9 * a);
        let b = 7.708_628_950_140_009e-9;
        assert!((heat_kernel_tail(8.0) - b).abs() < 1e-9 * b);
    }

    #[test]
    fn repeated_erfc_at_zero() {
        assert!((i2erfc(0.0) - 0.25).abs() < 1e-16);
        assert!((i4erfc(0.0) - 1.0 / 32.0).abs() < 1e-16);
        assert!((ierfc(0.0) - FRAC_1_SQRT_PI).abs() < 1e-16);
    }

    #[test]
    fn i2erfc_is_second_antiderivative() {
        // d/dx i²erfc = -ierfc
        for &x in &[0.1, 0.7, 1.5, 3.0] {
            let h = 1e-5;
            let d = (i2erfc(x + h) - i2erfc(x - h)) / (2.0 * h);
            assert!((d + ierfc(x)).abs() < 1e-9, "x={x}");
        }
    }

    #[test]
    fn mollifier_is_symmetric_and_normalized() {
        let nodes = mollifier_nodes(64);
        let total: f64 = nodes.iter().map(|n| n.1).sum();
        assert!((total - 1.0).abs() < 1e-15);
        for k in 0..32 {
            assert_eq!(nodes[k].1, nodes[63 - k].1);
            assert_eq!(nodes[k].0, -nodes[63 - k].0);
        }
    }

    #[test]
    fn thomas_solves_small_system() {
        let lower = [0.0, -1.0, -1.0];
        let diag = [2.0, 2.0, 2.0];
        let upper = [-1.0, -1.0, 0.0];
        let mut rhs = [1.0, 0.0, 1.0];
        solve_tridiagonal(&lower, &diag, &upper, &mut rhs);
        for v in rhs {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }
}
