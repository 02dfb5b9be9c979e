//! Two- and three-fold self-convolutions of the model surface measures:
//! closed forms, and an independent mollified-delta oracle over the base
//! parameters used to validate every closed form.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::QuadratureSpec;
use crate::delta::{delta_integral, BoxDomain, Estimate, ImplicitMap};
use crate::error::{Error, Result};
use crate::quad::integrate_gl;
use crate::special::sphere_volume;
use crate::surfaces::{SpaceTimePoint, SurfaceId, SurfaceMeasure};

/// Exclusion radius around singular loci; mollified oracles diverge there
/// by design.
pub const SINGULAR_EXCLUSION: f64 = 0.05;

/// Tighter exclusion around the r = 1 blow-up circle of the triple circle
/// convolution: the quadrature stays accurate much closer to it than the
/// mollified oracles do to theirs.
pub const CIRCLE3_EXCLUSION: f64 = 0.005;

/// (σ_{d−1} ∗ σ_{d−1})(ξ) for the unit sphere S^{d−1} ⊂ R^d:
/// (V_{d−2}/|ξ|)·(1 − |ξ|²/4)_+^{(d−3)/2}, +∞ at the singular loci.
pub fn conv2_sphere(d: usize, r: f64) -> f64 {
    assert!(d >= 2);
    if r > 2.0 {
        return 0.0;
    }
    if r == 0.0 {
        return f64::INFINITY;
    }
    let u = 1.0 - r * r / 4.0;
    let pow = (d as f64 - 3.0) / 2.0;
    if u <= 0.0 {
        // r = 2 exactly: finite for d ≥ 3, +∞ for d = 2.
        return if pow > 0.0 {
            0.0
        } else if pow == 0.0 {
            sphere_volume::<f64>((d - 2) as u32) / r
        } else {
            f64::INFINITY
        };
    }
    sphere_volume::<f64>((d - 2) as u32) / r * u.powf(pow)
}

/// Closed form of the two-fold self-convolution at p. Values on the
/// support boundary are interior limits. The perturbed paraboloid has no
/// closed form and is rejected; use [`conv2_oracle`] for it.
pub fn conv2_closed(id: SurfaceId, p: &SpaceTimePoint) -> Result<f64> {
    let m = SurfaceMeasure::new(id);
    let r = p.r();
    match id {
        SurfaceId::Sphere1 => Ok(conv2_sphere(2, r)),
        SurfaceId::Sphere2 => Ok(conv2_sphere(3, r)),
        SurfaceId::Perturbed2 => Err(Error::Domain(
            "no closed form for the perturbed paraboloid; use the oracle".into(),
        )),
        _ => {
            if !m.support_predicate(p) {
                return Ok(0.0);
            }
            Ok(match id {
                SurfaceId::Paraboloid2 => std::f64::consts::PI / 2.0,
                SurfaceId::Cone3 => 2.0 * std::f64::consts::PI,
                SurfaceId::Hyperboloid2 => {
                    2.0 * std::f64::consts::PI / (p.tau * p.tau - r * r).sqrt()
                }
                _ => unreachable!(),
            })
        }
    }
}

/// Numeric (μ∗μ)(p) as a mollified-delta integral over base parameters,
/// independent of the closed forms.
pub fn conv2_oracle(id: SurfaceId, p: &SpaceTimePoint, spec: &QuadratureSpec) -> Result<Estimate> {
    let m = SurfaceMeasure::new(id);
    if m.is_graph() {
        graph_conv2_oracle(&m, p, spec)
    } else {
        sphere_conv2_oracle(id, p.r(), spec)
    }
}

/// Graph case: the d spatial deltas fix ζ = ξ − η exactly, leaving the
/// codimension-1 integral ∫ δ(τ − h(|η|) − h(|ξ−η|)) w(|η|) w(|ξ−η|) dη.
fn graph_conv2_oracle(
    m: &SurfaceMeasure,
    p: &SpaceTimePoint,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let d = m.base_dim();
    assert_eq!(p.xi.len(), d);
    let r = p.r();
    let tau = p.tau;
    if tau < m.conv2_tau_min(r) - 1e-12 {
        // Entire mollified neighborhood may still intersect the support
        // if we are within ε of the boundary; callers keep a margin.
        if tau < m.conv2_tau_min(r) - 0.5 {
            return Ok(Estimate { value: 0.0, error: 0.0 });
        }
    }
    let h0 = if m.id == SurfaceId::Hyperboloid2 { 1.0 } else { 0.0 };
    if tau - h0 <= h0 {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    // η ranges over {h(|η|) ≤ τ − h(0) + margin}.
    let rb = m.height_inverse(tau + 0.3 - h0) + 0.05;
    let rmax = 0.5 * r + rb * (d as f64).sqrt();
    let lip = 2.0 * m.height_deriv(rmax);
    let surf = *m;

    match d {
        2 => {
            let center: Vec<f64> = p.xi.iter().map(|x| 0.5 * x).collect();
            let domain = BoxDomain::cube(&center, rb);
            let xi = p.xi.clone();
            let map = ImplicitMap::new(
                2,
                1,
                move |eta: &[f64], out: &mut [f64]| {
                    let r1 = eta[0].hypot(eta[1]);
                    let r2 = (xi[0] - eta[0]).hypot(xi[1] - eta[1]);
                    out[0] = surf.height(r1) + surf.height(r2) - tau;
                },
                lip,
            );
            let xi2 = p.xi.clone();
            let phi = move |eta: &[f64]| {
                let r1 = eta[0].hypot(eta[1]).max(1e-12);
                let r2 = (xi2[0] - eta[0]).hypot(xi2[1] - eta[1]).max(1e-12);
                surf.weight(r1) * surf.weight(r2)
            };
            delta_integral(&map, &phi, &domain, spec)
        }
        3 => {
            // The integrand only depends on the coordinates (u, ρ) along
            // and transverse to ξ; the transverse angle contributes 2π ρ.
            let map = ImplicitMap::new(
                2,
                1,
                move |c: &[f64], out: &mut [f64]| {
                    let (u, rho) = (c[0], c[1]);
                    let r1 = u.hypot(rho);
                    let r2 = (r - u).hypot(rho);
                    out[0] = surf.height(r1) + surf.height(r2) - tau;
                },
                lip,
            );
            let phi = move |c: &[f64]| {
                let (u, rho) = (c[0], c[1]);
                let r1 = u.hypot(rho).max(1e-12);
                let r2 = (r - u).hypot(rho).max(1e-12);
                2.0 * std::f64::consts::PI * rho * surf.weight(r1) * surf.weight(r2)
            };
            let domain = BoxDomain::new(vec![0.5 * r - rb, 0.0], vec![0.5 * r + rb, rb]);
            delta_integral(&map, &phi, &domain, spec)
        }
        other => Err(Error::Precondition(format!(
            "graph oracle not implemented for base dimension {other}"
        ))),
    }
}

/// Sphere case: mollify the full ambient delta over the angular
/// parameters of both factors (the measure is radial, so ξ is taken along
/// the last coordinate axis).
fn sphere_conv2_oracle(id: SurfaceId, r: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    if r < SINGULAR_EXCLUSION || (2.0 - r).abs() < SINGULAR_EXCLUSION {
        return Err(Error::NearSingular(r.min((2.0 - r).abs())));
    }
    if r > 2.0 {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let tau = 2.0 * std::f64::consts::PI;
    match id {
        SurfaceId::Sphere1 => {
            let map = ImplicitMap::new(
                2,
                2,
                move |t: &[f64], out: &mut [f64]| {
                    out[0] = t[0].cos() + t[1].cos() - r;
                    out[1] = t[0].sin() + t[1].sin();
                },
                1.5,
            );
            let domain = BoxDomain::new(vec![0.0, 0.0], vec![tau, tau]);
            delta_integral(&map, &|_| 1.0, &domain, spec)
        }
        SurfaceId::Sphere2 => {
            // ξ along the z-axis; the common rotation of both factors
            // about that axis is an exact symmetry, so the azimuth of the
            // first factor is fixed at 0 and contributes a factor 2π.
            let map = ImplicitMap::new(
                3,
                3,
                move |t: &[f64], out: &mut [f64]| {
                    let (s1, c1) = t[0].sin_cos();
                    let (s2, c2) = t[1].sin_cos();
                    let (sp2, cp2) = t[2].sin_cos();
                    out[0] = s1 + s2 * cp2;
                    out[1] = s2 * sp2;
                    out[2] = c1 + c2 - r;
                },
                1.5,
            );
            let pi = std::f64::consts::PI;
            let domain = BoxDomain::new(vec![0.0, 0.0, 0.0], vec![pi, pi, tau]);
            let phi = |t: &[f64]| 2.0 * std::f64::consts::PI * t[0].sin() * t[1].sin();
            delta_integral(&map, &phi, &domain, spec)
        }
        _ => unreachable!(),
    }
}

/// (σ₂∗σ₂∗σ₂)(r) on the unit sphere S² ⊂ R³: closed form.
pub fn conv3_sphere2(r: f64) -> f64 {
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    if r <= 1.0 {
        8.0 * pi2
    } else if r <= 3.0 {
        4.0 * pi2 * (-1.0 + 3.0 / r)
    } else {
        0.0
    }
}

/// Seeded Monte-Carlo oracle for [`conv3_sphere2`]: (4π)³ times the mean
/// of a product mollifier applied to ξ − ω₁ − ω₂ − ω₃ over uniform
/// sphere triples.
pub fn conv3_sphere2_mc(r: f64, spec: &QuadratureSpec) -> Estimate {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let eps = 0.2;
    let moll = crate::delta::Mollifier::new(eps, crate::delta::BumpProfile::Poly);
    // The 3-D delta makes hits rare; oversample relative to the base
    // sample budget to keep the relative error at the percent level.
    let n = 4 * spec.mc_samples.max(1);
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    let scale = (4.0 * std::f64::consts::PI).powi(3);
    for _ in 0..n {
        let mut v = [0.0, 0.0, -r];
        for _ in 0..3 {
            let z: f64 = rng.gen_range(-1.0..1.0);
            let phi: f64 = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
            let s = (1.0 - z * z).sqrt();
            v[0] += s * phi.cos();
            v[1] += s * phi.sin();
            v[2] += z;
        }
        let g = moll.eval(&v) * scale;
        sum += g;
        sumsq += g * g;
    }
    let mean = sum / n as f64;
    let var = (sumsq / n as f64 - mean * mean).max(0.0);
    Estimate {
        value: mean,
        error: (var / n as f64).sqrt() * 3.0,
    }
}

/// (σ₁∗σ₁∗σ₁)(r) on the unit circle by iterating the two-fold closed
/// form: after passing to the chord-length variable w the integral is
/// 16 ∫ dw / (√(4−w²) √((w²−a²)(B²−w²))) over w ∈ [a, min(B,2)] with
/// a = |r−1|, B = r+1. The endpoint singularities are removed by the
/// substitutions w = a + v², w = B − v², and u = √(1 − w²/4).
pub fn conv3_circle(r: f64, _spec: &QuadratureSpec) -> Result<f64> {
    if (r - 1.0).abs() < CIRCLE3_EXCLUSION {
        return Err(Error::NearSingular((r - 1.0).abs()));
    }
    if r >= 3.0 {
        return Ok(0.0);
    }
    if r < 1e-9 {
        // All chords have length 1: 2π · (σ₁∗σ₁)(1).
        return Ok(2.0 * std::f64::consts::PI * conv2_sphere(2, 1.0));
    }
    let a = (r - 1.0).abs();
    let b_full = r + 1.0;
    let b = b_full.min(2.0);
    let mid = 0.5 * (a + b);
    let n = 96;

    // Lower half: w = a + v² removes the (w² − a²)^{−1/2} endpoint.
    let lower = integrate_gl(
        |v: f64| {
            let w = a + v * v;
            let s1 = (4.0 - w * w).max(1e-300).sqrt();
            let s2 = ((w + a) * (b_full * b_full - w * w)).max(1e-300).sqrt();
            32.0 / (s1 * s2)
        },
        0.0,
        (mid - a).sqrt(),
        n,
    );

    let upper = if b < 2.0 {
        // w = B − v² removes the (B² − w²)^{−1/2} endpoint.
        integrate_gl(
            |v: f64| {
                let w = b_full - v * v;
                let s1 = (4.0 - w * w).max(1e-300).sqrt();
                let s2 = ((w * w - a * a) * (b_full + w)).max(1e-300).sqrt();
                32.0 / (s1 * s2)
            },
            0.0,
            (b_full - mid).sqrt(),
            n,
        )
    } else {
        // u = √(1 − w²/4) removes the (4 − w²)^{−1/2} endpoint at w = 2.
        let u_mid = (1.0 - mid * mid / 4.0).max(0.0).sqrt();
        integrate_gl(
            |u: f64| {
                let w2 = 4.0 * (1.0 - u * u);
                let s1 = (1.0 - u * u).max(1e-300).sqrt();
                let s2 = ((w2 - a * a) * (b_full * b_full - w2)).max(1e-300).sqrt();
                16.0 / (s1 * s2)
            },
            0.0,
            u_mid,
            n,
        )
    };
    Ok(lower + upper)
}

/// Seeded Monte-Carlo oracle for [`conv3_circle`].
pub fn conv3_circle_mc(r: f64, spec: &QuadratureSpec) -> Estimate {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x9e37_79b9);
    let eps = 0.05;
    let moll = crate::delta::Mollifier::new(eps, crate::delta::BumpProfile::Poly);
    let n = spec.mc_samples.max(1);
    let scale = (2.0 * std::f64::consts::PI).powi(3);
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for _ in 0..n {
        let mut v = [-r, 0.0];
        for _ in 0..3 {
            let t: f64 = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
            v[0] += t.cos();
            v[1] += t.sin();
        }
        let g = moll.eval(&v) * scale;
        sum += g;
        sumsq += g * g;
    }
    let mean = sum / n as f64;
    let var = (sumsq / n as f64 - mean * mean).max(0.0);
    Estimate {
        value: mean,
        error: (var / n as f64).sqrt() * 3.0,
    }
}

/// Outcome of the perturbed-vs-flat paraboloid comparison at matched
/// depth τ above the respective support bottoms.
#[derive(Debug, Clone)]
pub struct ComparisonOutcome {
    pub lhs: Estimate,
    pub rhs: f64,
    pub strict: bool,
}

/// Compares (μ̃₂∗μ̃₂)(ξ, |ξ|²/2 + |ξ|⁴/8 + τ) for the perturbed
/// paraboloid against the flat value π/2 at the same depth τ > 0.
pub fn comparison_check(
    xi: &[f64],
    tau: f64,
    spec: &QuadratureSpec,
) -> Result<ComparisonOutcome> {
    if tau <= 0.0 {
        return Err(Error::Precondition("comparison requires τ > 0".into()));
    }
    let m = SurfaceMeasure::new(SurfaceId::Perturbed2);
    let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
    let p = SpaceTimePoint::new(xi.to_vec(), m.conv2_tau_min(r) + tau);
    let lhs = conv2_oracle(SurfaceId::Perturbed2, &p, spec)?;
    let rhs = std::f64::consts::PI / 2.0;
    Ok(ComparisonOutcome {
        strict: lhs.value < rhs - lhs.error,
        lhs,
        rhs,
    })
}
