//! Special functions used throughout the lab: Bessel J of integer and
//! half-integer order, Gegenbauer and Legendre polynomials, Chebyshev
//! polynomials for the circle case, and unit-sphere surface volumes.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Bessel order stored as 2ν, so integer and half-integer orders are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BesselOrder {
    twice_order: u32,
}

impl BesselOrder {
    pub fn integer(n: u32) -> Self {
        Self { twice_order: 2 * n }
    }

    /// Order l + 1/2.
    pub fn half_integer(l: u32) -> Self {
        Self {
            twice_order: 2 * l + 1,
        }
    }

    pub fn twice(self) -> u32 {
        self.twice_order
    }

    pub fn is_integer(self) -> bool {
        self.twice_order % 2 == 0
    }
}

/// Gegenbauer index: degree k and parameter λ = (d−2)/2 > 0.
#[derive(Debug, Clone, Copy)]
pub struct GegenbauerIndex<R> {
    pub degree: u32,
    pub parameter: R,
}

impl<R: Real> GegenbauerIndex<R> {
    pub fn new(degree: u32, parameter: R) -> Result<Self> {
        if parameter <= R::zero() {
            return Err(Error::Precondition(format!(
                "Gegenbauer parameter must be positive, got {parameter}; \
                 use chebyshev_t for the λ → 0 circle case"
            )));
        }
        Ok(Self { degree, parameter })
    }
}

/// J_ν(x) for ν ≥ 0 integer or half-integer, x ≥ 0.
///
/// Small arguments are exact limits; everything else goes through a
/// downward (Miller) recurrence with sum normalization for integer orders
/// and spherical-Bessel normalization for half-integer orders. The
/// switchover-free scheme was validated against the integral
/// representation J_n(x) = (1/π)∫ cos(nθ − x sin θ) dθ.
pub fn bessel_j<R: Real>(order: BesselOrder, x: R) -> Result<R> {
    if x < R::zero() {
        return Err(Error::Domain(format!("bessel_j requires x ≥ 0, got {x}")));
    }
    if order.is_integer() {
        let n = order.twice() / 2;
        if x.to_f64().unwrap() > 600.0 {
            // Hankel asymptotic expansion: at x > 600 the truncation error
            // is far below f64 precision and the downward recurrence would
            // waste thousands of steps.
            return Ok(bessel_j_asymptotic(n, x));
        }
        Ok(bessel_j_integer_all(n, x).pop().unwrap())
    } else {
        if x == R::zero() {
            return Ok(R::zero());
        }
        let l = (order.twice() - 1) / 2;
        let j = spherical_j_all(l, x).pop().unwrap();
        Ok((R::of(2.0) * x / R::PI()).sqrt() * j)
    }
}

/// All of J_0(x), …, J_nmax(x) in one downward recurrence.
/// J_n(x) ≈ √(2/πx)(P cos χ − Q sin χ), χ = x − nπ/2 − π/4, with the
/// first few terms of the P/Q series; for x ≫ n² the neglected terms are
/// below f64 resolution.
fn bessel_j_asymptotic<R: Real>(n: u32, x: R) -> R {
    let mu = R::of_usize((4 * n * n) as usize);
    let one = R::one();
    let ex = R::of(8.0) * x;
    let t1 = (mu - one) / ex;
    let t2 = (mu - R::of(9.0)) / (R::of(2.0) * ex);
    let t3 = (mu - R::of(25.0)) / (R::of(3.0) * ex);
    let t4 = (mu - R::of(49.0)) / (R::of(4.0) * ex);
    let t5 = (mu - R::of(81.0)) / (R::of(5.0) * ex);
    let t6 = (mu - R::of(121.0)) / (R::of(6.0) * ex);
    let p = one - t1 * t2 * (one - t3 * t4 * (one - t5 * t6));
    let q = t1 * (one - t2 * t3 * (one - t4 * t5));
    let chi = x - (R::of_usize(n as usize) + R::of(0.5)) * R::PI() * R::of(0.5);
    let (s, c) = (chi.sin(), chi.cos());
    (R::of(2.0) / (R::PI() * x)).sqrt() * (p * c - q * s)
}

pub fn bessel_j_integer_all<R: Real>(nmax: u32, x: R) -> Vec<R> {
    let nmax = nmax as usize;
    if x == R::zero() {
        let mut out = vec![R::zero(); nmax + 1];
        out[0] = R::one();
        return out;
    }
    let start = start_order(nmax, x.to_f64().unwrap());
    let mut out = vec![R::zero(); nmax + 1];

    let big = R::max_value().sqrt();
    let inv_big = R::one() / big;
    let two_over_x = R::of(2.0) / x;

    // v_next = J_{k+1}, v_cur = J_k, both unnormalized.
    let mut v_next = R::zero();
    let mut v_cur = R::of(1e-30);
    // S = J_0 + 2 Σ_{j≥1} J_{2j} = 1.
    let mut sum = R::zero();
    let mut k = start;
    loop {
        if k <= nmax {
            out[k] = v_cur;
        }
        if k % 2 == 0 {
            sum += if k == 0 { v_cur } else { R::of(2.0) * v_cur };
        }
        if k == 0 {
            break;
        }
        let v_prev = two_over_x * R::of_usize(k) * v_cur - v_next;
        v_next = v_cur;
        v_cur = v_prev;
        k -= 1;
        if v_cur.abs() > big {
            v_cur *= inv_big;
            v_next *= inv_big;
            sum *= inv_big;
            for o in out.iter_mut() {
                *o *= inv_big;
            }
        }
    }
    let scale = R::one() / sum;
    for o in out.iter_mut() {
        *o *= scale;
    }
    out
}

/// Spherical Bessel j_0(x), …, j_lmax(x) by downward recurrence,
/// normalized against whichever of j_0, j_1 is better conditioned.
fn spherical_j_all<R: Real>(lmax: u32, x: R) -> Vec<R> {
    let lmax = lmax as usize;
    if x == R::zero() {
        let mut out = vec![R::zero(); lmax + 1];
        out[0] = R::one();
        return out;
    }
    let start = start_order(lmax, x.to_f64().unwrap());
    let mut out = vec![R::zero(); lmax + 1];
    let big = R::max_value().sqrt();
    let inv_big = R::one() / big;

    let mut v_next = R::zero();
    let mut v_cur = R::of(1e-30);
    let mut ref0 = R::zero(); // unnormalized j_0
    let mut ref1 = R::zero(); // unnormalized j_1
    let mut k = start;
    loop {
        if k <= lmax {
            out[k] = v_cur;
        }
        if k == 0 {
            ref0 = v_cur;
        }
        if k == 1 {
            ref1 = v_cur;
        }
        if k == 0 {
            break;
        }
        let coeff = R::of_usize(2 * k + 1) / x;
        let v_prev = coeff * v_cur - v_next;
        v_next = v_cur;
        v_cur = v_prev;
        k -= 1;
        if v_cur.abs() > big {
            v_cur *= inv_big;
            v_next *= inv_big;
            ref0 *= inv_big;
            ref1 *= inv_big;
            for o in out.iter_mut() {
                *o *= inv_big;
            }
        }
    }
    let j0 = x.sin() / x;
    let j1 = x.sin() / (x * x) - x.cos() / x;
    let scale = if j0.abs() >= j1.abs() {
        j0 / ref0
    } else {
        j1 / ref1
    };
    for o in out.iter_mut() {
        *o *= scale;
    }
    out
}

/// Start order for the downward recurrence: comfortably above both the
/// target order and the turning point at ν ≈ x.
fn start_order(n: usize, x: f64) -> usize {
    let airy_margin = 15.0 + 10.0 * x.cbrt();
    let from_x = (x + airy_margin).ceil() as usize;
    from_x.max(n + 20)
}

/// Gegenbauer polynomial C_k^λ(t) on [−1, 1] by the three-term recurrence.
pub fn gegenbauer<R: Real>(idx: GegenbauerIndex<R>, t: R) -> Result<R> {
    if t.abs() > R::one() {
        return Err(Error::Domain(format!(
            "gegenbauer requires |t| ≤ 1, got {t}"
        )));
    }
    Ok(gegenbauer_unchecked(idx.degree, idx.parameter, t))
}

fn gegenbauer_unchecked<R: Real>(k: u32, lambda: R, t: R) -> R {
    match k {
        0 => R::one(),
        1 => R::of(2.0) * lambda * t,
        _ => {
            let mut prev = R::one();
            let mut cur = R::of(2.0) * lambda * t;
            for j in 2..=k {
                let jf = R::of_usize(j as usize);
                let next = (R::of(2.0) * t * (jf + lambda - R::one()) * cur
                    - (jf + R::of(2.0) * lambda - R::of(2.0)) * prev)
                    / jf;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// C_k^λ(t) / C_k^λ(1), the normalized kernel used in the spectral module.
pub fn gegenbauer_ratio<R: Real>(idx: GegenbauerIndex<R>, t: R) -> Result<R> {
    let num = gegenbauer(idx, t)?;
    let den = gegenbauer_unchecked(idx.degree, idx.parameter, R::one());
    Ok(num / den)
}

/// Legendre polynomial P_k(t) = C_k^{1/2}(t).
pub fn legendre<R: Real>(k: u32, t: R) -> R {
    gegenbauer_unchecked(k, R::of(0.5), t)
}

/// Chebyshev polynomial T_k(t): the λ → 0 (circle) limit of the
/// normalized Gegenbauer kernel, T_k(cos θ) = cos kθ.
pub fn chebyshev_t<R: Real>(k: u32, t: R) -> R {
    match k {
        0 => R::one(),
        1 => t,
        _ => {
            let mut prev = R::one();
            let mut cur = t;
            for _ in 2..=k {
                let next = R::of(2.0) * t * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Surface volume of the unit sphere S^n: V_0 = 2, V_1 = 2π,
/// V_n = 2π V_{n−2} / (n − 1).
pub fn sphere_volume<R: Real>(n: u32) -> R {
    match n {
        0 => R::of(2.0),
        1 => R::of(2.0) * R::PI(),
        _ => R::of(2.0) * R::PI() * sphere_volume::<R>(n - 2) / R::of_usize(n as usize - 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Independent power-series evaluation of J_n, used only as an oracle.
    fn series_jn(n: u32, x: f64) -> f64 {
        let half = x / 2.0;
        let mut term = 1.0;
        for j in 1..=n {
            term *= half / j as f64;
        }
        let mut sum = term;
        let mut k = 1.0;
        loop {
            term *= -(half * half) / (k * (k + n as f64));
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1e-30) {
                break;
            }
            k += 1.0;
        }
        sum
    }

    #[test]
    fn bessel_at_zero() {
        assert_eq!(bessel_j(BesselOrder::integer(0), 0.0_f64).unwrap(), 1.0);
        assert_eq!(bessel_j(BesselOrder::integer(1), 0.0_f64).unwrap(), 0.0);
        assert_eq!(
            bessel_j(BesselOrder::half_integer(0), 0.0_f64).unwrap(),
            0.0
        );
    }

    #[test]
    fn bessel_rejects_negative_argument() {
        assert!(bessel_j(BesselOrder::integer(0), -1.0_f64).is_err());
    }

    #[test]
    fn first_zero_of_j0() {
        // Locate the first zero by bisection on the independent series.
        let (mut a, mut b) = (2.0_f64, 3.0_f64);
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if series_jn(0, a) * series_jn(0, m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        let zero = 0.5 * (a + b);
        assert_relative_eq!(zero, 2.404826, epsilon = 1e-5);
        assert!(bessel_j(BesselOrder::integer(0), zero).unwrap().abs() < 1e-6);
    }

    #[test]
    fn bessel_matches_series() {
        for n in [0u32, 1, 2, 5, 11] {
            for &x in &[0.1, 0.9, 2.5, 6.0, 10.0] {
                let got = bessel_j(BesselOrder::integer(n), x).unwrap();
                let want = series_jn(n, x);
                assert!(
                    (got - want).abs() <= 1e-10 * want.abs() + 1e-13,
                    "J_{n}({x}): got {got}, series {want}"
                );
            }
        }
    }

    #[test]
    fn bessel_recurrence_residual() {
        for nu in 1..=20u32 {
            let mut x = 0.5;
            while x <= 50.0 {
                let js = bessel_j_integer_all(nu + 1, x);
                let res = js[(nu - 1) as usize] + js[(nu + 1) as usize]
                    - (2.0 * nu as f64 / x) * js[nu as usize];
                assert!(res.abs() < 1e-9, "recurrence residual {res} at nu={nu} x={x}");
                x += 0.5;
            }
        }
    }

    #[test]
    fn bessel_integral_representation() {
        // J_n(x) = (1/π) ∫_0^π cos(nθ − x sin θ) dθ, trapezoid with many nodes.
        let oracle = |n: u32, x: f64| {
            let m = 4000;
            let h = std::f64::consts::PI / m as f64;
            let mut s = 0.5 * ((0.0f64).cos() + (n as f64 * std::f64::consts::PI).cos());
            for j in 1..m {
                let th = j as f64 * h;
                s += (n as f64 * th - x * th.sin()).cos();
            }
            s * h / std::f64::consts::PI
        };
        for n in [0u32, 1, 3, 7, 12] {
            for &x in &[0.5, 5.0, 17.0, 40.0] {
                let got = bessel_j(BesselOrder::integer(n), x).unwrap();
                assert!(
                    (got - oracle(n, x)).abs() < 1e-8,
                    "integral representation mismatch at n={n}, x={x}"
                );
            }
        }
    }

    #[test]
    fn half_integer_orders_match_closed_forms() {
        for &x in &[0.3, 1.7, 8.0, 33.0, 120.0] {
            let j_half = bessel_j(BesselOrder::half_integer(0), x).unwrap();
            let want = (2.0 / (std::f64::consts::PI * x)).sqrt() * x.sin();
            assert_relative_eq!(j_half, want, max_relative = 1e-12, epsilon = 1e-14);

            let j_three_half = bessel_j(BesselOrder::half_integer(1), x).unwrap();
            let want = (2.0 / (std::f64::consts::PI * x)).sqrt() * (x.sin() / x - x.cos());
            assert_relative_eq!(j_three_half, want, max_relative = 1e-10, epsilon = 1e-14);
        }
    }

    #[test]
    fn bessel_large_argument() {
        // Spot values at x up to 200 against the integral representation.
        for n in [0u32, 2, 8] {
            for &x in &[90.0, 150.0, 200.0] {
                let m = 40000;
                let h = std::f64::consts::PI / m as f64;
                let mut s = 0.5 * (1.0 + (n as f64 * std::f64::consts::PI).cos());
                for j in 1..m {
                    let th = j as f64 * h;
                    s += (n as f64 * th - x * th.sin()).cos();
                }
                let want = s * h / std::f64::consts::PI;
                let got = bessel_j(BesselOrder::integer(n), x).unwrap();
                assert!((got - want).abs() < 1e-10, "n={n} x={x}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn gegenbauer_low_degrees() {
        let idx0 = GegenbauerIndex::new(0, 0.5_f64).unwrap();
        assert_eq!(gegenbauer(idx0, 0.3).unwrap(), 1.0);
        let idx1 = GegenbauerIndex::new(1, 0.5_f64).unwrap();
        assert_eq!(gegenbauer(idx1, 0.5).unwrap(), 0.5);
        let idx2 = GegenbauerIndex::new(2, 0.5_f64).unwrap();
        assert_relative_eq!(gegenbauer(idx2, 1.0).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn gegenbauer_rejects_out_of_range() {
        let idx = GegenbauerIndex::new(3, 1.0_f64).unwrap();
        assert!(gegenbauer(idx, 1.5).is_err());
        assert!(GegenbauerIndex::new(3, 0.0_f64).is_err());
    }

    #[test]
    fn gegenbauer_orthogonality() {
        // ∫ C_j^λ C_k^λ (1−t²)^{λ−1/2} dt ≈ 0 for j ≠ k; with t = cos u
        // the weight becomes sin^{2λ} u and the integrand is analytic.
        use crate::quad::integrate_gl;
        for &lambda in &[0.5_f64, 1.0, 1.5] {
            for j in 0..=10u32 {
                for k in 0..=10u32 {
                    if j == k {
                        continue;
                    }
                    let pair = |a: u32, b: u32| {
                        integrate_gl(
                            |u: f64| {
                                let t = u.cos();
                                gegenbauer_unchecked(a, lambda, t)
                                    * gegenbauer_unchecked(b, lambda, t)
                                    * u.sin().powf(2.0 * lambda)
                            },
                            0.0,
                            std::f64::consts::PI,
                            160,
                        )
                    };
                    let integral = pair(j, k);
                    let norm = pair(j.max(k), j.max(k));
                    assert!(
                        integral.abs() < 1e-8 * norm.max(1.0),
                        "λ={lambda} j={j} k={k}: {integral}"
                    );
                }
            }
        }
    }

    #[test]
    fn chebyshev_is_cosine() {
        for k in 0..=8u32 {
            for &th in &[0.0_f64, 0.4, 1.1, 2.9] {
                let t = th.cos();
                assert_relative_eq!(
                    chebyshev_t(k, t),
                    (k as f64 * th).cos(),
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn sphere_volumes() {
        assert_eq!(sphere_volume::<f64>(0), 2.0);
        assert_relative_eq!(sphere_volume::<f64>(1), 2.0 * std::f64::consts::PI);
        assert_relative_eq!(sphere_volume::<f64>(2), 4.0 * std::f64::consts::PI);
        // V_3 = 2π²
        assert_relative_eq!(
            sphere_volume::<f64>(3),
            2.0 * std::f64::consts::PI * std::f64::consts::PI
        );
    }

    #[test]
    fn works_at_f32() {
        let j = bessel_j(BesselOrder::integer(2), 3.5_f32).unwrap();
        assert!((j as f64 - series_jn(2, 3.5)).abs() < 1e-5);
    }

    #[test]
    fn asymptotic_branch_matches_recurrence() {
        // The dispatch switches to the Hankel expansion above x = 600;
        // the downward recurrence is still valid there and serves as the
        // independent oracle.
        for n in [0u32, 1, 3, 8] {
            for x in [650.0_f64, 1234.5, 5000.0] {
                let asym = bessel_j(BesselOrder::integer(n), x).unwrap();
                let rec = *bessel_j_integer_all(n, x).last().unwrap();
                assert!(
                    (asym - rec).abs() < 1e-13,
                    "n={n} x={x}: {asym} vs {rec}"
                );
            }
        }
    }
}
