//! Quadrature primitives: Gauss–Legendre rules (nodes computed by Newton
//! iteration on the Legendre recurrence), composite panel integration for
//! oscillatory integrands, and a small adaptive Simpson fallback.

use crate::scalar::Real;

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre<R: Real>(n: usize) -> (Vec<R>, Vec<R>) {
    assert!(n >= 1);
    let mut nodes = vec![R::zero(); n];
    let mut weights = vec![R::zero(); n];
    for i in 0..(n + 1) / 2 {
        // Tricomi initial guess.
        let theta = std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5);
        let mut x = R::of(theta.cos());
        let mut dp = R::one();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < R::of(1e-15) {
                break;
            }
        }
        let w = R::of(2.0) / ((R::one() - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        // Recompute the center weight exactly at x = 0.
        let (_, d) = legendre_with_derivative(n, R::zero());
        nodes[n / 2] = R::zero();
        weights[n / 2] = R::of(2.0) / (d * d);
    }
    (nodes, weights)
}

fn legendre_with_derivative<R: Real>(n: usize, x: R) -> (R, R) {
    let mut p_prev = R::one();
    let mut p = x;
    if n == 0 {
        return (R::one(), R::zero());
    }
    for k in 1..n {
        let kf = R::of_usize(k);
        let next = ((R::of(2.0) * kf + R::one()) * x * p - kf * p_prev) / (kf + R::one());
        p_prev = p;
        p = next;
    }
    let d = R::of_usize(n) * (p_prev - x * p) / (R::one() - x * x);
    (p, d)
}

/// Single-panel Gauss–Legendre on [a, b].
pub fn integrate_gl<R: Real>(f: impl Fn(R) -> R, a: R, b: R, n: usize) -> R {
    let (nodes, weights) = gauss_legendre::<R>(n);
    let mid = (a + b) * R::of(0.5);
    let half = (b - a) * R::of(0.5);
    let mut s = R::zero();
    for (x, w) in nodes.iter().zip(&weights) {
        s += *w * f(mid + half * *x);
    }
    s * half
}

/// Composite Gauss–Legendre: `panels` equal panels, `n` nodes per panel.
pub fn integrate_panels<R: Real>(
    f: impl Fn(R) -> R,
    a: R,
    b: R,
    panels: usize,
    n: usize,
) -> R {
    let (nodes, weights) = gauss_legendre::<R>(n);
    let width = (b - a) / R::of_usize(panels);
    let half = width * R::of(0.5);
    let mut s = R::zero();
    for p in 0..panels {
        let mid = a + width * (R::of_usize(p) + R::of(0.5));
        let mut local = R::zero();
        for (x, w) in nodes.iter().zip(&weights) {
            local += *w * f(mid + half * *x);
        }
        s += local;
    }
    s * half
}

/// Adaptive Simpson with absolute tolerance.
pub fn adaptive_simpson<R: Real>(f: &impl Fn(R) -> R, a: R, b: R, tol: R, max_depth: u32) -> R {
    let c = (a + b) * R::of(0.5);
    let fa = f(a);
    let fb = f(b);
    let fc = f(c);
    let whole = simpson(fa, fc, fb, b - a);
    simpson_rec(f, a, b, fa, fb, fc, whole, tol, max_depth)
}

fn simpson<R: Real>(fa: R, fm: R, fb: R, h: R) -> R {
    h / R::of(6.0) * (fa + R::of(4.0) * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<R: Real>(
    f: &impl Fn(R) -> R,
    a: R,
    b: R,
    fa: R,
    fb: R,
    fc: R,
    whole: R,
    tol: R,
    depth: u32,
) -> R {
    let c = (a + b) * R::of(0.5);
    let lm = (a + c) * R::of(0.5);
    let rm = (c + b) * R::of(0.5);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fc, c - a);
    let right = simpson(fc, frm, fb, b - c);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= R::of(15.0) * tol {
        left + right + delta / R::of(15.0)
    } else {
        let half_tol = tol * R::of(0.5);
        simpson_rec(f, a, c, fa, fc, flm, left, half_tol, depth - 1)
            + simpson_rec(f, c, b, fc, fb, frm, right, half_tol, depth - 1)
    }
}

/// Periodic trapezoid rule on [0, 2π), spectrally accurate for smooth
/// periodic integrands.
pub fn integrate_periodic<R: Real>(f: impl Fn(R) -> R, n: usize) -> R {
    let h = R::of(2.0) * R::PI() / R::of_usize(n);
    let mut s = R::zero();
    for j in 0..n {
        s += f(h * R::of_usize(j));
    }
    s * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gl_nodes_integrate_polynomials_exactly() {
        // n-point GL is exact through degree 2n−1.
        let v = integrate_gl(|x: f64| x.powi(9) + 3.0 * x.powi(4), -1.0, 1.0, 5);
        assert_relative_eq!(v, 6.0 / 5.0, epsilon = 1e-13);
    }

    #[test]
    fn gl_handles_odd_and_even_sizes() {
        for n in [8, 9, 17, 64, 97] {
            let v = integrate_gl(|x: f64| x.exp(), 0.0, 1.0, n);
            assert_relative_eq!(v, std::f64::consts::E - 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn panels_resolve_oscillation() {
        // ∫_0^{20π} sin x dx = 0; ∫_0^{20π} sin² = 10π.
        let v = integrate_panels(|x: f64| x.sin() * x.sin(), 0.0, 20.0 * std::f64::consts::PI, 40, 10);
        assert_relative_eq!(v, 10.0 * std::f64::consts::PI, epsilon = 1e-10);
    }

    #[test]
    fn adaptive_simpson_sqrt_singularity() {
        let v = adaptive_simpson(&|x: f64| x.sqrt(), 0.0, 1.0, 1e-10, 40);
        assert_relative_eq!(v, 2.0 / 3.0, epsilon = 1e-8);
    }

    #[test]
    fn periodic_rule_is_spectral() {
        let v = integrate_periodic(|t: f64| (3.0 * t).cos().powi(2), 64);
        assert_relative_eq!(v, std::f64::consts::PI, epsilon = 1e-12);
    }
}
