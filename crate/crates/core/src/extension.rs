//! Extension-operator functionals: the transform itself, the
//! Cauchy–Schwarz/Hölder sharp-constant chain with extremizer-defect
//! diagnostics, the hyperboloid extremizing sequence, and the functional
//! equation satisfied by extremizers.

use num_complex::Complex64;

use crate::config::QuadratureSpec;
use crate::delta::Estimate;
use crate::error::{Error, Result};
use crate::quad::{gauss_legendre, integrate_panels};
use crate::special::{bessel_j, BesselOrder};
use crate::surfaces::{DecayClass, SurfaceId, SurfaceMeasure};

/// Trial function on a surface: a radial profile over a graph base, or an
/// angular profile on a sphere.
pub struct TrialFunction {
    pub surface: SurfaceId,
    profile: ProfileKind,
    pub decay: DecayClass,
}

enum ProfileKind {
    Radial(Box<dyn Fn(f64) -> f64 + Send + Sync>),
    Angular(Box<dyn Fn(&[f64]) -> Complex64 + Send + Sync>),
}

impl TrialFunction {
    pub fn radial(
        surface: SurfaceId,
        decay: DecayClass,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        assert!(SurfaceMeasure::new(surface).is_graph());
        Self {
            surface,
            profile: ProfileKind::Radial(Box::new(f)),
            decay,
        }
    }

    pub fn angular(
        surface: SurfaceId,
        f: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        assert!(!SurfaceMeasure::new(surface).is_graph());
        Self {
            surface,
            profile: ProfileKind::Angular(Box::new(f)),
            decay: DecayClass::Compact { radius: 1.0 },
        }
    }

    /// exp(−s|ξ|²) on a graph surface.
    pub fn gaussian(surface: SurfaceId, s: f64) -> Self {
        Self::radial(surface, DecayClass::Gaussian { scale: s }, move |r| {
            (-s * r * r).exp()
        })
    }

    /// exp(−a|ξ|) on a graph surface.
    pub fn exponential(surface: SurfaceId, a: f64) -> Self {
        Self::radial(surface, DecayClass::Exponential { rate: a }, move |r| {
            (-a * r).exp()
        })
    }

    /// exp(−a√(1+|ξ|²)) on the hyperboloid: the extremizing sequence.
    pub fn hyperbolic_exponential(a: f64) -> Self {
        Self::radial(
            SurfaceId::Hyperboloid2,
            DecayClass::HyperbolicExponential { rate: a },
            move |r| (-a * (1.0 + r * r).sqrt()).exp(),
        )
    }

    /// Indicator of the disc {|ξ| ≤ radius} on a graph surface.
    pub fn disc_indicator(surface: SurfaceId, radius: f64) -> Self {
        Self::radial(surface, DecayClass::Compact { radius }, move |r| {
            if r <= radius {
                1.0
            } else {
                0.0
            }
        })
    }

    /// f ≡ 1 on a sphere.
    pub fn constant_on_sphere(surface: SurfaceId) -> Self {
        Self::angular(surface, |_| Complex64::new(1.0, 0.0))
    }

    pub fn eval_radial(&self, r: f64) -> f64 {
        match &self.profile {
            ProfileKind::Radial(f) => f(r),
            ProfileKind::Angular(_) => panic!("angular trial function has no radial profile"),
        }
    }

    pub fn eval_angular(&self, base: &[f64]) -> Complex64 {
        match &self.profile {
            ProfileKind::Angular(f) => f(base),
            ProfileKind::Radial(f) => {
                Complex64::new(f(base.iter().map(|x| x * x).sum::<f64>().sqrt()), 0.0)
            }
        }
    }

    fn is_radial(&self) -> bool {
        matches!(self.profile, ProfileKind::Radial(_))
    }
}

const MAX_OSC_NODES: usize = 2_000_000;

/// ∫ f(ω) e^{i x·ω} dμ_ω at the ambient point x, with node counts scaled
/// to keep ≥ 10 nodes per oscillation.
pub fn extension_transform(
    f: &TrialFunction,
    x: &[f64],
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let m = SurfaceMeasure::new(f.surface);
    assert_eq!(x.len(), m.ambient_dim());
    let xnorm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    match f.surface {
        SurfaceId::Sphere1 => {
            let n = spec.grid.max(64).max((12.0 * xnorm).ceil() as usize);
            if n > MAX_OSC_NODES {
                return Err(Error::Domain(format!("|x| = {xnorm} beyond resolved range")));
            }
            let h = 2.0 * std::f64::consts::PI / n as f64;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                let t = h * j as f64;
                let (st, ct) = t.sin_cos();
                let phase = x[0] * ct + x[1] * st;
                s += f.eval_angular(&[t]) * Complex64::from_polar(1.0, phase);
            }
            Ok(s * h)
        }
        SurfaceId::Sphere2 => {
            let n = spec.grid.max(32).max((6.0 * xnorm).ceil() as usize);
            if n > MAX_OSC_NODES / 8 {
                return Err(Error::Domain(format!("|x| = {xnorm} beyond resolved range")));
            }
            let (nodes, weights) = gauss_legendre::<f64>(n);
            let nphi = 2 * n;
            let hphi = 2.0 * std::f64::consts::PI / nphi as f64;
            let mut s = Complex64::new(0.0, 0.0);
            for (ct, w) in nodes.iter().zip(&weights) {
                let st = (1.0 - ct * ct).sqrt();
                let theta = ct.acos();
                let mut ring = Complex64::new(0.0, 0.0);
                for j in 0..nphi {
                    let phi = hphi * j as f64;
                    let (sp, cp) = phi.sin_cos();
                    let omega = [st * cp, st * sp, *ct];
                    let phase = x[0] * omega[0] + x[1] * omega[1] + x[2] * omega[2];
                    ring += f.eval_angular(&[theta, phi]) * Complex64::from_polar(1.0, phase);
                }
                s += ring * *w * hphi;
            }
            Ok(s)
        }
        _ => {
            if !f.is_radial() {
                return Err(Error::Precondition(
                    "graph-surface transforms require a radial profile".into(),
                ));
            }
            graph_extension_radial(f, &m, x, spec)
        }
    }
}

/// Radial graph case: the angular integral collapses to a Bessel/sinc
/// kernel, leaving a 1-D oscillatory radial integral.
fn graph_extension_radial(
    f: &TrialFunction,
    m: &SurfaceMeasure,
    x: &[f64],
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let d = m.base_dim();
    let xs: f64 = x[..d].iter().map(|v| v * v).sum::<f64>().sqrt();
    let t = x[d];
    let rmax = f.decay.tail_radius(1e-10 * spec.tol.min(1.0));
    // Total phase across [0, rmax]: spatial |xs|·R plus temporal t·h(R).
    let total_phase = xs * rmax + t.abs() * m.height(rmax);
    let panels = ((total_phase / 4.0).ceil() as usize).max(spec.grid / 4).max(12);
    if panels * 12 > MAX_OSC_NODES {
        return Err(Error::Domain("phase beyond resolved range".into()));
    }
    let surf = *m;
    let mut re_im = [0.0, 0.0];
    for (part, out) in re_im.iter_mut().enumerate() {
        *out = integrate_panels(
            |r: f64| {
                let kernel = match d {
                    2 => {
                        2.0 * std::f64::consts::PI
                            * bessel_j(BesselOrder::integer(0), xs * r).unwrap_or(0.0)
                    }
                    3 => {
                        let z = xs * r;
                        4.0 * std::f64::consts::PI * if z < 1e-8 { 1.0 } else { z.sin() / z }
                    }
                    _ => unreachable!(),
                };
                let amp = r.powi(d as i32 - 1) * surf.weight(r) * f.eval_radial(r) * kernel;
                let phase = t * surf.height(r);
                amp * if part == 0 { phase.cos() } else { phase.sin() }
            },
            0.0,
            rmax,
            panels,
            12,
        );
    }
    Ok(Complex64::new(re_im[0], re_im[1]))
}

/// The two sides of the Cauchy–Schwarz/Hölder chain and their gap.
#[derive(Debug, Clone)]
pub struct SharpChainReport {
    /// ‖fμ∗fμ‖²_{L²}.
    pub l2_conv_sq: Estimate,
    /// ‖μ∗μ‖_∞ · ‖f‖⁴_{L²(μ)}.
    pub bound: Estimate,
    /// bound − l2_conv_sq ≥ 0, with equality exactly for extremizers.
    pub defect: f64,
    pub defect_error: f64,
}

fn sup_norm_conv2(id: SurfaceId) -> Option<f64> {
    match id {
        SurfaceId::Paraboloid2 => Some(std::f64::consts::PI / 2.0),
        SurfaceId::Cone3 => Some(2.0 * std::f64::consts::PI),
        SurfaceId::Hyperboloid2 => Some(std::f64::consts::PI),
        _ => None,
    }
}

/// τ extent above the support bottom that certifies the tail of the
/// squared convolution for this profile.
fn tau_span(m: &SurfaceMeasure, decay: DecayClass) -> f64 {
    match decay {
        DecayClass::Gaussian { scale } => 30.0 / scale,
        DecayClass::Exponential { rate } | DecayClass::HyperbolicExponential { rate } => {
            30.0 / rate
        }
        DecayClass::Compact { radius } => 2.0 * m.height(radius) + 0.01,
    }
}

/// (fμ∗fμ)(ξ, τ) for a radial profile on a 2-D graph base: polar
/// coordinates around ξ/2; along each direction the total height
/// Φ(ρ) = h(|ξ/2+ρu|) + h(|ξ/2−ρu|) is even, convex and increasing, so
/// the delta picks the unique root, weighted by ρ/Φ'(ρ).
fn conv_density_d2(
    m: &SurfaceMeasure,
    f: &TrialFunction,
    r: f64,
    tau: f64,
    n_theta: usize,
) -> f64 {
    let c = 0.5 * r;
    let taumin = m.conv2_tau_min(r);
    if tau <= taumin {
        return 0.0;
    }
    let mut sum = 0.0;
    // Integrand depends on the angle through cos θ only and is π-periodic.
    for i in 0..n_theta {
        let theta = std::f64::consts::PI * (i as f64 + 0.5) / n_theta as f64;
        let cu = c * theta.cos();
        let radii = |rho: f64| {
            let r1 = (c * c + 2.0 * rho * cu + rho * rho).max(0.0).sqrt();
            let r2 = (c * c - 2.0 * rho * cu + rho * rho).max(0.0).sqrt();
            (r1, r2)
        };
        let phi = |rho: f64| {
            let (r1, r2) = radii(rho);
            m.height(r1) + m.height(r2)
        };
        // Bracket the root of Φ(ρ) = τ.
        let mut hi = 1.0;
        let mut guard = 0;
        while phi(hi) < tau {
            hi *= 2.0;
            guard += 1;
            if guard > 60 {
                return 0.0;
            }
        }
        let mut lo = 0.0;
        for _ in 0..52 {
            let mid = 0.5 * (lo + hi);
            if phi(mid) < tau {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let rho = 0.5 * (lo + hi);
        let (r1, r2) = radii(rho);
        let dphi = m.height_deriv(r1) * (rho + cu) / r1.max(1e-300)
            + m.height_deriv(r2) * (rho - cu) / r2.max(1e-300);
        if dphi <= 0.0 {
            continue;
        }
        let val = f.eval_radial(r1) * f.eval_radial(r2) * m.weight(r1) * m.weight(r2);
        sum += val * rho / dphi;
    }
    // 2π total angle over n_theta samples of the π-periodic integrand.
    sum * 2.0 * std::f64::consts::PI / n_theta as f64
}

/// (fν∗fν)(ξ, τ) on the cone over R³ in bipolar coordinates:
/// (2π/r) ∫ f(ρ) f(τ−ρ) dρ over the bipolar interval.
fn conv_density_cone3(f: &TrialFunction, r: f64, tau: f64, n: usize) -> f64 {
    if tau <= r || r <= 0.0 {
        return 0.0;
    }
    let lo = 0.5 * (tau - r);
    let hi = 0.5 * (tau + r);
    let inner = integrate_panels(
        |rho: f64| f.eval_radial(rho) * f.eval_radial(tau - rho),
        lo,
        hi,
        n.max(4),
        10,
    );
    2.0 * std::f64::consts::PI / r * inner
}

fn l2_conv_sq_at(f: &TrialFunction, m: &SurfaceMeasure, res: usize) -> f64 {
    let rmax = 2.0 * f.decay.tail_radius(1e-12);
    let span = tau_span(m, f.decay);
    let density = |r: f64, tau: f64| match f.surface {
        SurfaceId::Cone3 => conv_density_cone3(f, r, tau, res / 4),
        _ => conv_density_d2(m, f, r, tau, 2 * res.max(12)),
    };
    let d = m.base_dim();
    let sphere_area = if d == 2 {
        2.0 * std::f64::consts::PI
    } else {
        4.0 * std::f64::consts::PI
    };
    sphere_area
        * integrate_panels(
            |r: f64| {
                if r <= 0.0 {
                    return 0.0;
                }
                let taumin = m.conv2_tau_min(r);
                let inner = integrate_panels(
                    |tp: f64| {
                        let c = density(r, taumin + tp);
                        c * c
                    },
                    0.0,
                    span,
                    res,
                    8,
                );
                r.powi(d as i32 - 1) * inner
            },
            0.0,
            rmax,
            res,
            8,
        )
}

/// Evaluates both sides of the chain ‖fμ∗fμ‖²_{L²} ≤ ‖μ∗μ‖_∞ ‖f‖⁴_{L²(μ)}
/// with quadrature error estimates from two resolutions.
pub fn sharp_chain(f: &TrialFunction, spec: &QuadratureSpec) -> Result<SharpChainReport> {
    let m = SurfaceMeasure::new(f.surface);
    let sup = sup_norm_conv2(f.surface).ok_or_else(|| {
        Error::Precondition(format!(
            "sharp chain supports paraboloid2/cone3/hyperboloid2, not {}",
            f.surface
        ))
    })?;
    if !f.is_radial() {
        return Err(Error::Precondition("sharp chain requires a radial profile".into()));
    }
    let rcheck = f.decay.tail_radius(1e-12);
    for i in 0..400 {
        let r = rcheck * i as f64 / 399.0;
        if f.eval_radial(r) < 0.0 {
            return Err(Error::Precondition(
                "sharp chain requires a nonnegative profile".into(),
            ));
        }
    }

    let res_lo = (spec.grid / 2).max(16);
    let res_hi = res_lo * 3 / 2;
    let lo = l2_conv_sq_at(f, &m, res_lo);
    let hi = l2_conv_sq_at(f, &m, res_hi);
    let l2 = Estimate {
        value: hi,
        error: 2.0 * (hi - lo).abs() + 1e-12 * hi.abs(),
    };

    let rmax = f.decay.tail_radius(1e-12);
    let mass_lo = m.measure_integral_radial(&|r| f.eval_radial(r).powi(2), rmax, 48);
    let mass_hi = m.measure_integral_radial(&|r| f.eval_radial(r).powi(2), rmax, 72);
    let bound = Estimate {
        value: sup * mass_hi * mass_hi,
        error: sup * 2.0 * (mass_hi * mass_hi - mass_lo * mass_lo).abs()
            + 1e-12 * sup * mass_hi * mass_hi,
    };

    Ok(SharpChainReport {
        defect: bound.value - l2.value,
        defect_error: bound.error + l2.error,
        l2_conv_sq: l2,
        bound,
    })
}

/// Φ(f_a) = ‖f_aλ∗f_aλ‖_{L²} / ‖f_a‖²_{L²(λ)} for the hyperboloid family
/// f_a = exp(−a√(1+|ξ|²)), a ≥ 1.
pub fn hyperboloid_sequence(a_values: &[f64], spec: &QuadratureSpec) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(a_values.len());
    for &a in a_values {
        if a < 1.0 {
            return Err(Error::Precondition(format!("need a ≥ 1, got {a}")));
        }
        let f = TrialFunction::hyperbolic_exponential(a);
        let report = sharp_chain(&f, spec)?;
        let mass = report.bound.value / sup_norm_conv2(SurfaceId::Hyperboloid2).unwrap();
        // bound = π·mass² with mass = ‖f‖²; recover ‖f‖² = √(bound/π).
        let norm_sq = mass.sqrt();
        out.push(report.l2_conv_sq.value.sqrt() / norm_sq);
    }
    Ok(out)
}

/// Max relative spread of f(η)f(ζ) over matched pairs with equal sum and
/// equal total height, sampled on the solution circle/ellipse for each
/// (v, s) in `samples`.
pub fn functional_equation_defect(
    f: &TrialFunction,
    samples: &[(Vec<f64>, f64)],
) -> Result<f64> {
    let m = SurfaceMeasure::new(f.surface);
    if !f.is_radial() {
        return Err(Error::Precondition("requires a radial profile".into()));
    }
    let n_angles = 24;
    let mut worst: f64 = 0.0;
    for &(ref v, s) in samples {
        let vn = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let products: Vec<f64> = match f.surface {
            SurfaceId::Paraboloid2 => {
                // h = |·|²: |η|² + |ζ|² = |v|²/2 + 2ρ² on the circle
                // around v/2, so the solution radius is fixed by s.
                let rho_sq = (s - 0.5 * vn * vn) / 2.0;
                if rho_sq <= 0.0 {
                    return Err(Error::Domain(format!(
                        "no solution circle for (|v|, s) = ({vn}, {s})"
                    )));
                }
                let rho = rho_sq.sqrt();
                (0..n_angles)
                    .map(|i| {
                        let t = 2.0 * std::f64::consts::PI * i as f64 / n_angles as f64;
                        let c = 0.5 * vn;
                        let r1 = (c * c + rho * rho + 2.0 * c * rho * t.cos()).sqrt();
                        let r2 = (c * c + rho * rho - 2.0 * c * rho * t.cos()).sqrt();
                        f.eval_radial(r1) * f.eval_radial(r2)
                    })
                    .collect()
            }
            SurfaceId::Cone3 => {
                // h = |·|: solutions lie on the prolate spheroid with foci
                // 0 and v; sample a meridian ellipse.
                if s <= vn {
                    return Err(Error::Domain(format!(
                        "no solution ellipse for (|v|, s) = ({vn}, {s})"
                    )));
                }
                let asemi = 0.5 * s;
                let bsemi = 0.5 * (s * s - vn * vn).sqrt();
                (0..n_angles)
                    .map(|i| {
                        let t = 2.0 * std::f64::consts::PI * i as f64 / n_angles as f64;
                        let along = 0.5 * vn + asemi * t.cos();
                        let perp = bsemi * t.sin();
                        let r1 = along.hypot(perp);
                        let r2 = (vn - along).hypot(perp);
                        f.eval_radial(r1) * f.eval_radial(r2)
                    })
                    .collect()
            }
            other => {
                return Err(Error::Precondition(format!(
                    "functional equation defined for paraboloid2/cone3, not {other}"
                )))
            }
        };
        let base = products[0];
        if base <= 0.0 {
            return Err(Error::Precondition("profile must be positive on samples".into()));
        }
        let max = products.iter().cloned().fold(f64::MIN, f64::max);
        let min = products.iter().cloned().fold(f64::MAX, f64::min);
        worst = worst.max((max - min) / base);
        let _ = m;
    }
    Ok(worst)
}
