//! The model surfaces and their canonical measures.
//!
//! Graph-type surfaces live over a flat base R^d as {(ξ, h(|ξ|))} with a
//! radial weight against Lebesgue measure on the base; spheres carry their
//! usual rotation-invariant surface measure. All integrals are evaluated in
//! adapted polar/spherical coordinates.

use std::fmt;

use crate::config::QuadratureSpec;
use crate::error::{Error, Result};
use crate::quad::{integrate_gl, integrate_panels, integrate_periodic};

/// Identifiers for the supported surfaces; the strings double as CLI values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SurfaceId {
    /// {τ = |ξ|²} over R², weight 1.
    Paraboloid2,
    /// {τ = |ξ|} over R³, weight 1/|ξ|.
    Cone3,
    /// {τ = √(1+|ξ|²)} over R², weight 1/√(1+|ξ|²).
    Hyperboloid2,
    /// Unit circle S¹ ⊂ R² with arclength measure.
    Sphere1,
    /// Unit sphere S² ⊂ R³ with area measure.
    Sphere2,
    /// {τ = |ξ|² + |ξ|⁴} over R², weight 1: a non-integrable perturbation
    /// of the paraboloid used to exercise the oracle-only paths.
    Perturbed2,
}

impl SurfaceId {
    pub const ALL: [SurfaceId; 6] = [
        SurfaceId::Paraboloid2,
        SurfaceId::Cone3,
        SurfaceId::Hyperboloid2,
        SurfaceId::Sphere1,
        SurfaceId::Sphere2,
        SurfaceId::Perturbed2,
    ];

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "paraboloid2" => Ok(SurfaceId::Paraboloid2),
            "cone3" => Ok(SurfaceId::Cone3),
            "hyperboloid2" => Ok(SurfaceId::Hyperboloid2),
            "sphere1" => Ok(SurfaceId::Sphere1),
            "sphere2" => Ok(SurfaceId::Sphere2),
            "perturbed2" => Ok(SurfaceId::Perturbed2),
            other => Err(Error::Domain(format!(
                "unknown surface '{other}' (expected one of paraboloid2, cone3, \
                 hyperboloid2, sphere1, sphere2, perturbed2)"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SurfaceId::Paraboloid2 => "paraboloid2",
            SurfaceId::Cone3 => "cone3",
            SurfaceId::Hyperboloid2 => "hyperboloid2",
            SurfaceId::Sphere1 => "sphere1",
            SurfaceId::Sphere2 => "sphere2",
            SurfaceId::Perturbed2 => "perturbed2",
        }
    }
}

impl fmt::Display for SurfaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SurfaceId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SurfaceId::parse(s)
    }
}

/// How fast a profile decays along the surface, used to pick truncation
/// radii with a controlled tail.
#[derive(Debug, Clone, Copy)]
pub enum DecayClass {
    /// |f| ≤ C e^{−s r²}.
    Gaussian { scale: f64 },
    /// |f| ≤ C e^{−a r}.
    Exponential { rate: f64 },
    /// |f| ≤ C e^{−a √(1+r²)}: exponential in the hyperboloid height.
    HyperbolicExponential { rate: f64 },
    /// Supported in {r ≤ radius}.
    Compact { radius: f64 },
}

impl DecayClass {
    /// Radius beyond which the weighted tail mass is below `tol`
    /// (crude but safe: log bound plus a fixed polynomial margin).
    pub fn tail_radius(&self, tol: f64) -> f64 {
        let t = tol.max(1e-300);
        match *self {
            DecayClass::Gaussian { scale } => (((1.0 / t).ln() + 12.0) / scale).sqrt(),
            DecayClass::Exponential { rate }
            | DecayClass::HyperbolicExponential { rate } => ((1.0 / t).ln() + 12.0) / rate,
            DecayClass::Compact { radius } => radius,
        }
    }
}

/// Point (ξ, τ) in the ambient space-time R^{d+1}. For spheres, which sit
/// in plain R^d, τ is unused and conventionally zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimePoint {
    pub xi: Vec<f64>,
    pub tau: f64,
}

impl SpaceTimePoint {
    pub fn new(xi: Vec<f64>, tau: f64) -> Self {
        Self { xi, tau }
    }

    /// Point at radius r on the first axis in a d-dimensional base.
    pub fn radial(r: f64, tau: f64, d: usize) -> Self {
        let mut xi = vec![0.0; d];
        xi[0] = r;
        Self { xi, tau }
    }

    pub fn r(&self) -> f64 {
        self.xi.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// A surface together with its canonical measure.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceMeasure {
    pub id: SurfaceId,
}

impl SurfaceMeasure {
    pub fn new(id: SurfaceId) -> Self {
        Self { id }
    }

    /// Dimension of the base / parameter space.
    pub fn base_dim(&self) -> usize {
        match self.id {
            SurfaceId::Paraboloid2 | SurfaceId::Hyperboloid2 | SurfaceId::Perturbed2 => 2,
            SurfaceId::Cone3 => 3,
            SurfaceId::Sphere1 => 1,
            SurfaceId::Sphere2 => 2,
        }
    }

    /// Dimension of the ambient space the surface sits in.
    pub fn ambient_dim(&self) -> usize {
        match self.id {
            SurfaceId::Sphere1 => 2,
            SurfaceId::Sphere2 => 3,
            other => SurfaceMeasure::new(other).base_dim() + 1,
        }
    }

    pub fn is_graph(&self) -> bool {
        !matches!(self.id, SurfaceId::Sphere1 | SurfaceId::Sphere2)
    }

    /// Height h(r) of the graph over a base point at radius r.
    pub fn height(&self, r: f64) -> f64 {
        match self.id {
            SurfaceId::Paraboloid2 => r * r,
            SurfaceId::Cone3 => r,
            SurfaceId::Hyperboloid2 => (1.0 + r * r).sqrt(),
            SurfaceId::Perturbed2 => r * r + r.powi(4),
            SurfaceId::Sphere1 | SurfaceId::Sphere2 => {
                panic!("height is defined for graph surfaces only")
            }
        }
    }

    /// h'(r), used by support and root-solving computations.
    pub fn height_deriv(&self, r: f64) -> f64 {
        match self.id {
            SurfaceId::Paraboloid2 => 2.0 * r,
            SurfaceId::Cone3 => 1.0,
            SurfaceId::Hyperboloid2 => r / (1.0 + r * r).sqrt(),
            SurfaceId::Perturbed2 => 2.0 * r + 4.0 * r.powi(3),
            SurfaceId::Sphere1 | SurfaceId::Sphere2 => {
                panic!("height is defined for graph surfaces only")
            }
        }
    }

    /// Radial weight w(r) of the measure against Lebesgue on the base.
    pub fn weight(&self, r: f64) -> f64 {
        match self.id {
            SurfaceId::Paraboloid2 | SurfaceId::Perturbed2 => 1.0,
            SurfaceId::Cone3 => 1.0 / r,
            SurfaceId::Hyperboloid2 => 1.0 / (1.0 + r * r).sqrt(),
            SurfaceId::Sphere1 | SurfaceId::Sphere2 => 1.0,
        }
    }

    /// Base coordinates → point on the surface in ambient coordinates.
    /// Graphs take a base point in R^d; spheres take angles (θ for S¹;
    /// polar θ ∈ [0, π] then azimuth φ for S²).
    pub fn lift(&self, base: &[f64], out: &mut [f64]) {
        match self.id {
            SurfaceId::Sphere1 => {
                out[0] = base[0].cos();
                out[1] = base[0].sin();
            }
            SurfaceId::Sphere2 => {
                let (st, ct) = base[0].sin_cos();
                let (sp, cp) = base[1].sin_cos();
                out[0] = st * cp;
                out[1] = st * sp;
                out[2] = ct;
            }
            _ => {
                let d = self.base_dim();
                let r = base.iter().map(|x| x * x).sum::<f64>().sqrt();
                out[..d].copy_from_slice(base);
                out[d] = self.height(r);
            }
        }
    }

    /// Inverse of the height function: the radius r ≥ 0 with h(r) = s.
    pub fn height_inverse(&self, s: f64) -> f64 {
        match self.id {
            SurfaceId::Paraboloid2 => s.max(0.0).sqrt(),
            SurfaceId::Cone3 => s.max(0.0),
            SurfaceId::Hyperboloid2 => (s * s - 1.0).max(0.0).sqrt(),
            SurfaceId::Perturbed2 => {
                ((-1.0 + (1.0 + 4.0 * s.max(0.0)).sqrt()) / 2.0).max(0.0).sqrt()
            }
            SurfaceId::Sphere1 | SurfaceId::Sphere2 => {
                panic!("height is defined for graph surfaces only")
            }
        }
    }

    /// Earliest τ in the support of the two-fold self-convolution above a
    /// point with |ξ| = r.
    pub fn conv2_tau_min(&self, r: f64) -> f64 {
        assert!(self.is_graph());
        2.0 * self.height(0.5 * r)
    }

    /// Whether p lies in the closed support of μ∗μ (the Minkowski
    /// double-sum of the surface with itself).
    pub fn support_predicate(&self, p: &SpaceTimePoint) -> bool {
        let r = p.r();
        match self.id {
            SurfaceId::Sphere1 | SurfaceId::Sphere2 => r <= 2.0,
            _ => p.tau >= self.conv2_tau_min(r),
        }
    }

    /// ∫ g dμ over the full surface, truncating graph bases at `rmax`.
    /// `g` sees the ambient point. `n` scales all quadrature resolutions.
    pub fn measure_integral(
        &self,
        g: &(dyn Fn(&[f64]) -> f64 + Sync),
        rmax: f64,
        n: usize,
    ) -> f64 {
        match self.id {
            SurfaceId::Sphere1 => integrate_periodic(
                |t: f64| {
                    let (s, c) = t.sin_cos();
                    g(&[c, s])
                },
                4 * n.max(16),
            ),
            SurfaceId::Sphere2 => {
                // GL in cos θ, periodic trapezoid in φ.
                let nphi = 4 * n.max(16);
                integrate_gl(
                    |ct: f64| {
                        let st = (1.0 - ct * ct).sqrt();
                        integrate_periodic(
                            |phi: f64| {
                                let (sp, cp) = phi.sin_cos();
                                g(&[st * cp, st * sp, ct])
                            },
                            nphi,
                        )
                    },
                    -1.0,
                    1.0,
                    n.max(16),
                )
            }
            _ => self.graph_integral(g, rmax, n),
        }
    }

    fn graph_integral(&self, g: &(dyn Fn(&[f64]) -> f64 + Sync), rmax: f64, n: usize) -> f64 {
        let d = self.base_dim();
        let panels = n.max(8);
        match d {
            2 => integrate_panels(
                |r: f64| {
                    if r == 0.0 {
                        return 0.0;
                    }
                    let tau = self.height(r);
                    let ang = integrate_periodic(
                        |t: f64| {
                            let (s, c) = t.sin_cos();
                            g(&[r * c, r * s, tau])
                        },
                        4 * n.max(16),
                    );
                    r * self.weight(r) * ang
                },
                0.0,
                rmax,
                panels,
                12,
            ),
            3 => integrate_panels(
                |r: f64| {
                    if r == 0.0 {
                        return 0.0;
                    }
                    let tau = self.height(r);
                    let ang = integrate_gl(
                        |ct: f64| {
                            let st = (1.0 - ct * ct).sqrt();
                            integrate_periodic(
                                |phi: f64| {
                                    let (sp, cp) = phi.sin_cos();
                                    g(&[r * st * cp, r * st * sp, r * ct, tau])
                                },
                                2 * n.max(16),
                            )
                        },
                        -1.0,
                        1.0,
                        n.max(16),
                    );
                    r * r * self.weight(r) * ang
                },
                0.0,
                rmax,
                panels,
                12,
            ),
            other => panic!("unsupported base dimension {other}"),
        }
    }

    /// ∫ g(r) dμ for a radial integrand on a graph surface:
    /// |S^{d−1}| ∫ r^{d−1} w(r) g(r) dr.
    pub fn measure_integral_radial(&self, g: &(dyn Fn(f64) -> f64 + Sync), rmax: f64, n: usize) -> f64 {
        assert!(self.is_graph());
        let d = self.base_dim();
        let sphere_area = match d {
            2 => 2.0 * std::f64::consts::PI,
            3 => 4.0 * std::f64::consts::PI,
            other => panic!("unsupported base dimension {other}"),
        };
        sphere_area
            * integrate_panels(
                |r: f64| r.powi(d as i32 - 1) * self.weight(r) * g(r),
                0.0,
                rmax,
                n.max(8),
                12,
            )
    }

    /// Truncation radius adapted to a decay class and tolerance, capped
    /// below by the configured cutoff.
    pub fn truncation_radius(&self, decay: DecayClass, spec: &QuadratureSpec) -> f64 {
        decay.tail_radius(spec.tol * 1e-3).min(spec.cutoff.max(4.0))
    }
}

/// Apply a Lorentz boost of the given rapidity in the (ξ₁, τ) plane to an
/// ambient point (ξ, τ) listed as [ξ₁, …, ξ_d, τ].
pub fn lorentz_boost(point: &[f64], rapidity: f64) -> Vec<f64> {
    let mut out = point.to_vec();
    let n = point.len();
    let (sh, ch) = (rapidity.sinh(), rapidity.cosh());
    out[0] = ch * point[0] + sh * point[n - 1];
    out[n - 1] = sh * point[0] + ch * point[n - 1];
    out
}
