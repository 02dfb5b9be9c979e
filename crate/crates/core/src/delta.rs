//! Integration of test functions against δ(f(x)) over boxes in R^d.
//!
//! The delta distribution is approximated by a compactly supported bump of
//! width ε; the mollified integral is evaluated on a tensor midpoint grid
//! whose resolution is tied to ε, restricted to cells that can meet the
//! level set, and the ε → 0 limit is taken by Richardson extrapolation
//! over a fixed sequence of halvings.

use nalgebra::DMatrix;

use crate::config::QuadratureSpec;
use crate::error::{Error, Result};

/// Axis-aligned integration box.
#[derive(Debug, Clone)]
pub struct BoxDomain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        assert!(lo.iter().zip(&hi).all(|(a, b)| a < b));
        Self { lo, hi }
    }

    pub fn cube(center: &[f64], half: f64) -> Self {
        Self::new(
            center.iter().map(|c| c - half).collect(),
            center.iter().map(|c| c + half).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn max_extent(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| b - a)
            .fold(0.0, f64::max)
    }
}

/// Compactly supported unit-mass bump profiles on [−1, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BumpProfile {
    /// (35/32)(1 − y²)³: polynomial, C² at the support edge.
    Poly,
    /// cos²(πy/2): trigonometric, C¹ at the support edge.
    Cosine,
}

impl BumpProfile {
    pub fn eval(self, y: f64) -> f64 {
        if y.abs() >= 1.0 {
            return 0.0;
        }
        match self {
            BumpProfile::Poly => {
                let u = 1.0 - y * y;
                35.0 / 32.0 * u * u * u
            }
            BumpProfile::Cosine => {
                let c = (std::f64::consts::FRAC_PI_2 * y).cos();
                c * c
            }
        }
    }
}

/// Mollifier: tensor product of 1-D bumps of width ε per codimension.
#[derive(Debug, Clone, Copy)]
pub struct Mollifier {
    pub width: f64,
    pub profile: BumpProfile,
}

impl Mollifier {
    pub fn new(width: f64, profile: BumpProfile) -> Self {
        assert!(width > 0.0);
        Self { width, profile }
    }

    /// γ_ε(y) = ε^{−m} ∏ γ(y_i / ε) for y ∈ R^m.
    pub fn eval(&self, y: &[f64]) -> f64 {
        let mut v = 1.0;
        for &yi in y {
            let s = yi / self.width;
            if s.abs() >= 1.0 {
                return 0.0;
            }
            v *= self.profile.eval(s) / self.width;
        }
        v
    }
}

/// Implicit description of a manifold: zero set of f : R^d → R^{d−k}.
///
/// `lipschitz` must bound ‖∇f_i‖₂ on the working domain for every
/// component i; it drives the cell-pruning test, so an underestimate can
/// silently drop parts of the level set.
pub struct ImplicitMap<'a> {
    pub ambient_dim: usize,
    pub codim: usize,
    eval: Box<dyn Fn(&[f64], &mut [f64]) + Send + Sync + 'a>,
    jacobian: Option<Box<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'a>>,
    pub lipschitz: f64,
}

impl<'a> ImplicitMap<'a> {
    pub fn new(
        ambient_dim: usize,
        codim: usize,
        eval: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'a,
        lipschitz: f64,
    ) -> Self {
        assert!(codim >= 1 && codim <= ambient_dim);
        Self {
            ambient_dim,
            codim,
            eval: Box::new(eval),
            jacobian: None,
            lipschitz,
        }
    }

    pub fn with_jacobian(
        mut self,
        jacobian: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'a,
    ) -> Self {
        self.jacobian = Some(Box::new(jacobian));
        self
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        (self.eval)(x, out);
    }

    pub fn jacobian_at(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        match &self.jacobian {
            Some(j) => Ok(j(x)),
            None => Err(Error::Precondition(
                "implicit map carries no Jacobian closure".into(),
            )),
        }
    }
}

/// Value with an error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// √det(Df·Dfᵗ) at x; rejects rank deficiency.
pub fn jacobian_factor(map: &ImplicitMap, x: &[f64]) -> Result<f64> {
    let df = map.jacobian_at(x)?;
    let svd = df.clone().svd(false, false);
    let smin = svd
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if smin < 1e-8 {
        return Err(Error::RankDeficient(smin));
    }
    let gram = &df * df.transpose();
    let det = gram.determinant();
    Ok(det.max(0.0).sqrt())
}

/// Single mollified pass: ∫ γ_ε(f(x)) φ(x) dx on the midpoint grid whose
/// leaf size per axis is extent / 2^m with leaf ≤ 2ε / (L · cells_across).
pub fn mollified_integral(
    map: &ImplicitMap,
    phi: &(dyn Fn(&[f64]) -> f64 + Sync),
    domain: &BoxDomain,
    eps: f64,
    cells_across: usize,
    profile: BumpProfile,
) -> f64 {
    let d = map.ambient_dim;
    assert_eq!(domain.dim(), d);
    let lip = map.lipschitz.max(1e-12);
    let h_target = 2.0 * eps / (lip * cells_across as f64);

    // Depth per axis so leaves halve exactly when ε halves.
    let depths: Vec<u32> = (0..d)
        .map(|i| {
            let extent = domain.hi[i] - domain.lo[i];
            ((extent / h_target).log2().ceil().max(0.0)) as u32
        })
        .collect();

    let moll = Mollifier::new(eps, profile);
    let mut center: Vec<f64> = domain
        .lo
        .iter()
        .zip(&domain.hi)
        .map(|(a, b)| 0.5 * (a + b))
        .collect();
    let half: Vec<f64> = domain
        .lo
        .iter()
        .zip(&domain.hi)
        .map(|(a, b)| 0.5 * (b - a))
        .collect();
    let mut fbuf = vec![0.0; map.codim];

    let mut walker = Walker {
        map,
        phi,
        moll,
        lip,
        depths,
        fbuf: &mut fbuf,
        sum: 0.0,
    };
    walker.walk(&mut center, &half, &vec![0u32; d]);
    walker.sum
}

struct Walker<'a> {
    map: &'a ImplicitMap<'a>,
    phi: &'a (dyn Fn(&[f64]) -> f64 + Sync),
    moll: Mollifier,
    lip: f64,
    depths: Vec<u32>,
    fbuf: &'a mut Vec<f64>,
    sum: f64,
}

impl Walker<'_> {
    fn walk(&mut self, center: &mut Vec<f64>, half: &[f64], level: &[u32]) {
        self.map.eval_into(center, self.fbuf);
        let radius = half.iter().map(|h| h * h).sum::<f64>().sqrt();
        let margin = self.moll.width + self.lip * radius;
        if self.fbuf.iter().any(|v| v.abs() > margin) {
            return;
        }
        // Split the first axis that has not reached its depth.
        let axis = (0..half.len()).find(|&i| level[i] < self.depths[i]);
        match axis {
            None => {
                let vol: f64 = half.iter().map(|h| 2.0 * h).product();
                let gamma = self.moll.eval(self.fbuf);
                if gamma != 0.0 {
                    self.sum += vol * gamma * (self.phi)(center);
                }
            }
            Some(i) => {
                let mut child_half = half.to_vec();
                child_half[i] *= 0.5;
                let mut child_level = level.to_vec();
                child_level[i] += 1;
                let c0 = center[i];
                center[i] = c0 - child_half[i];
                self.walk(center, &child_half, &child_level);
                center[i] = c0 + child_half[i];
                self.walk(center, &child_half, &child_level);
                center[i] = c0;
            }
        }
    }
}

/// ∫ δ(f(x)) φ(x) dx by the mollified path with Richardson extrapolation
/// over ε-halvings.
pub fn delta_integral(
    map: &ImplicitMap,
    phi: &(dyn Fn(&[f64]) -> f64 + Sync),
    domain: &BoxDomain,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    delta_integral_with_profile(map, phi, domain, spec, BumpProfile::Poly)
}

pub fn delta_integral_with_profile(
    map: &ImplicitMap,
    phi: &(dyn Fn(&[f64]) -> f64 + Sync),
    domain: &BoxDomain,
    spec: &QuadratureSpec,
    profile: BumpProfile,
) -> Result<Estimate> {
    let eps0 = spec.eps.unwrap_or(domain.max_extent() / 50.0);
    let levels = spec.eps_levels.max(2);
    let mut raw = Vec::with_capacity(levels);
    for j in 0..levels {
        let eps = eps0 / f64::powi(2.0, j as i32);
        raw.push(mollified_integral(
            map,
            phi,
            domain,
            eps,
            spec.cells_across,
            profile,
        ));
    }
    let scale = raw.last().unwrap().abs().max(1e-12);
    let diffs: Vec<f64> = raw.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    if diffs.len() >= 2 {
        let last = diffs[diffs.len() - 1];
        let prev = diffs[diffs.len() - 2];
        if last > 1.05 * prev && last > spec.tol * scale {
            return Err(Error::NonConvergent(last));
        }
    }
    // Second-order Richardson.
    let extr: Vec<f64> = raw
        .windows(2)
        .map(|w| w[1] + (w[1] - w[0]) / 3.0)
        .collect();
    let value = *extr.last().unwrap();
    let error = if extr.len() >= 2 {
        (extr[extr.len() - 1] - extr[extr.len() - 2]).abs() + 1e-13 * scale
    } else {
        diffs.last().copied().unwrap_or(f64::INFINITY)
    };
    Ok(Estimate { value, error })
}

/// Positive C¹ scalar multiplier with the bounds the pruning test needs.
pub struct ScalarField {
    pub eval: Box<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    pub lipschitz: f64,
    /// sup of the field over the working box.
    pub upper: f64,
}

/// |∫ δ(αf) φ − ∫ α^{−codim} δ(f) φ|: the scalar-multiplication rule.
pub fn scalar_rescale_check(
    map: &ImplicitMap,
    alpha: &ScalarField,
    phi: &(dyn Fn(&[f64]) -> f64 + Sync),
    domain: &BoxDomain,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let f_sup = sample_sup(map, domain);
    let codim = map.codim;
    let ambient = map.ambient_dim;
    let lip_scaled = alpha.upper * map.lipschitz + alpha.lipschitz * f_sup;

    let alpha_eval = &alpha.eval;
    let scaled = ImplicitMap::new(
        ambient,
        codim,
        move |x: &[f64], out: &mut [f64]| {
            map.eval_into(x, out);
            let a = (alpha_eval)(x);
            for o in out.iter_mut() {
                *o *= a;
            }
        },
        lip_scaled,
    );

    let lhs = delta_integral(&scaled, phi, domain, spec)?;
    let weighted = |x: &[f64]| phi(x) * (alpha.eval)(x).powi(-(codim as i32));
    let rhs = delta_integral(map, &weighted, domain, spec)?;
    Ok((lhs.value - rhs.value).abs())
}

fn sample_sup(map: &ImplicitMap, domain: &BoxDomain) -> f64 {
    let d = map.ambient_dim;
    let n = 6usize;
    let mut buf = vec![0.0; map.codim];
    let mut point = vec![0.0; d];
    let mut sup: f64 = 0.0;
    let total = n.pow(d as u32);
    let mut spacing: f64 = 0.0;
    for i in 0..d {
        spacing = spacing.max((domain.hi[i] - domain.lo[i]) / n as f64);
    }
    for idx in 0..total {
        let mut rem = idx;
        for (i, p) in point.iter_mut().enumerate() {
            let j = rem % n;
            rem /= n;
            let ext = domain.hi[i] - domain.lo[i];
            *p = domain.lo[i] + ext * (j as f64 + 0.5) / n as f64;
        }
        map.eval_into(&point, &mut buf);
        for v in &buf {
            sup = sup.max(v.abs());
        }
    }
    sup + map.lipschitz * spacing * (d as f64).sqrt() / 2.0
}

/// Local diffeomorphism Ψ with its Jacobian determinant and a Lipschitz
/// bound for compositions.
pub struct Diffeomorphism {
    pub forward: Box<dyn Fn(&[f64], &mut [f64]) + Send + Sync>,
    pub jac_det: Box<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    pub lipschitz: f64,
}

/// |lhs − rhs| of the change-of-variables rule:
/// ∫_Ω δ(f(x)) φ(x) dx = ∫_{Ψ^{-1}Ω} δ(f(Ψ(y))) φ(Ψ(y)) |det DΨ(y)| dy.
pub fn change_of_variables_check(
    map: &ImplicitMap,
    psi: &Diffeomorphism,
    preimage: &BoxDomain,
    phi: &(dyn Fn(&[f64]) -> f64 + Sync),
    domain: &BoxDomain,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let lhs = delta_integral(map, phi, domain, spec)?;

    let d = map.ambient_dim;
    let forward = &psi.forward;
    let composed = ImplicitMap::new(
        d,
        map.codim,
        move |y: &[f64], out: &mut [f64]| {
            let mut x = vec![0.0; y.len()];
            (forward)(y, &mut x);
            map.eval_into(&x, out);
        },
        map.lipschitz * psi.lipschitz,
    );
    let pulled = |y: &[f64]| {
        let mut x = vec![0.0; d];
        (psi.forward)(y, &mut x);
        phi(&x) * (psi.jac_det)(y).abs()
    };
    let rhs = delta_integral(&composed, &pulled, preimage, spec)?;
    Ok((lhs.value - rhs.value).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_gl;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn circle_map<'a>() -> ImplicitMap<'a> {
        ImplicitMap::new(
            2,
            1,
            |x: &[f64], out: &mut [f64]| out[0] = x[0].hypot(x[1]) - 1.0,
            1.0,
        )
    }

    #[test]
    fn bump_profiles_have_unit_mass() {
        for profile in [BumpProfile::Poly, BumpProfile::Cosine] {
            let mass = integrate_gl(|y: f64| profile.eval(y), -1.0, 1.0, 64);
            assert_relative_eq!(mass, 1.0, epsilon = 1e-10);
            // Even in y.
            assert_relative_eq!(profile.eval(0.3), profile.eval(-0.3), epsilon = 1e-15);
            assert_eq!(profile.eval(1.0), 0.0);
        }
    }

    #[test]
    fn circle_length_from_distance_level_set() {
        let domain = BoxDomain::cube(&[0.0, 0.0], 1.5);
        let spec = QuadratureSpec::default();
        let est = delta_integral(&circle_map(), &|_| 1.0, &domain, &spec).unwrap();
        assert_relative_eq!(est.value, 2.0 * PI, max_relative = 1e-4);
        assert!(est.error < 1e-3);
    }

    #[test]
    fn quadratic_level_set_halves_the_mass() {
        // δ(|x|² − 1) = δ(|x| − 1) / 2 on the unit circle.
        let map = ImplicitMap::new(
            2,
            1,
            |x: &[f64], out: &mut [f64]| out[0] = x[0] * x[0] + x[1] * x[1] - 1.0,
            4.3,
        );
        let domain = BoxDomain::cube(&[0.0, 0.0], 1.5);
        let spec = QuadratureSpec::default();
        let est = delta_integral(&map, &|_| 1.0, &domain, &spec).unwrap();
        assert_relative_eq!(est.value, PI, max_relative = 1e-4);
    }

    #[test]
    fn both_profiles_agree() {
        let domain = BoxDomain::cube(&[0.0, 0.0], 1.5);
        let spec = QuadratureSpec::default();
        let map = circle_map();
        let a = delta_integral_with_profile(&map, &|_| 1.0, &domain, &spec, BumpProfile::Poly)
            .unwrap();
        let b = delta_integral_with_profile(&map, &|_| 1.0, &domain, &spec, BumpProfile::Cosine)
            .unwrap();
        assert_relative_eq!(a.value, b.value, max_relative = 2e-4);
    }

    #[test]
    fn epsilon_refinement_converges_monotonically() {
        let domain = BoxDomain::cube(&[0.0, 0.0], 1.5);
        let map = circle_map();
        let exact = 2.0 * PI;
        let mut prev = f64::INFINITY;
        for j in 0..4 {
            let eps = 0.3 / f64::powi(2.0, j);
            let v = mollified_integral(&map, &|_| 1.0, &domain, eps, 16, BumpProfile::Poly);
            let err = (v - exact).abs();
            assert!(err < prev * 1.05, "error not decreasing: {err} vs {prev}");
            prev = err;
        }
    }

    #[test]
    fn tangential_degeneracy_is_flagged() {
        // δ(x₁²) has no finite mollified limit; the level-set touches the
        // zero of the defining function to second order.
        let map = ImplicitMap::new(
            2,
            1,
            |x: &[f64], out: &mut [f64]| out[0] = x[0] * x[0],
            3.0,
        );
        let domain = BoxDomain::cube(&[0.0, 0.0], 1.0);
        let spec = QuadratureSpec::default();
        let res = delta_integral(&map, &|_| 1.0, &domain, &spec);
        assert!(matches!(res, Err(Error::NonConvergent(_))));
    }

    #[test]
    fn jacobian_factor_for_intersecting_spheres() {
        // f(y) = (|y| − 1, |x − y| − 1) on R³. On the intersection circle
        // the factor is |x|·√(1 − |x|²/4).
        for r in [0.5_f64, 1.0, 1.5] {
            let x = [r, 0.0, 0.0];
            let map = ImplicitMap::new(
                3,
                2,
                move |y: &[f64], out: &mut [f64]| {
                    let ny = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
                    let d0 = x[0] - y[0];
                    let d1 = x[1] - y[1];
                    let d2 = x[2] - y[2];
                    out[0] = ny - 1.0;
                    out[1] = (d0 * d0 + d1 * d1 + d2 * d2).sqrt() - 1.0;
                },
                1.0,
            )
            .with_jacobian(move |y: &[f64]| {
                let ny = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
                let d = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
                let nd = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                DMatrix::from_row_slice(
                    2,
                    3,
                    &[
                        y[0] / ny,
                        y[1] / ny,
                        y[2] / ny,
                        -d[0] / nd,
                        -d[1] / nd,
                        -d[2] / nd,
                    ],
                )
            });
            // A point on the intersection circle: y = (r/2, √(1 − r²/4), 0).
            let point = [r / 2.0, (1.0 - r * r / 4.0).sqrt(), 0.0];
            let j = jacobian_factor(&map, &point).unwrap();
            let expected = r * (1.0 - r * r / 4.0).sqrt();
            assert_relative_eq!(j, expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn jacobian_factor_rejects_rank_deficiency() {
        let map = ImplicitMap::new(
            2,
            2,
            |x: &[f64], out: &mut [f64]| {
                out[0] = x[0];
                out[1] = x[0];
            },
            1.0,
        )
        .with_jacobian(|_x: &[f64]| DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 0.0]));
        let res = jacobian_factor(&map, &[0.3, 0.4]);
        assert!(matches!(res, Err(Error::RankDeficient(_))));
    }

    #[test]
    fn double_delta_on_sphere_intersection() {
        // ∫ δ(|y|−1) δ(|x−y|−1) dy = (circle length)/(Jacobian factor)
        //                          = 2π·ρ / (|x|·ρ) = 2π/|x|  for 0<|x|<2.
        let spec = QuadratureSpec::default();
        for r in [0.5_f64, 1.0, 1.5] {
            let x = [r, 0.0, 0.0];
            let map = ImplicitMap::new(
                3,
                2,
                move |y: &[f64], out: &mut [f64]| {
                    let ny = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
                    let d0 = x[0] - y[0];
                    let d1 = x[1] - y[1];
                    let d2 = x[2] - y[2];
                    out[0] = ny - 1.0;
                    out[1] = (d0 * d0 + d1 * d1 + d2 * d2).sqrt() - 1.0;
                },
                1.0,
            );
            let domain = BoxDomain::new(vec![-1.1, -1.1, -1.1], vec![r + 1.1, 1.1, 1.1]);
            let est = delta_integral(&map, &|_| 1.0, &domain, &spec).unwrap();
            assert_relative_eq!(est.value, 2.0 * PI / r, max_relative = 2e-3);
        }
    }

    #[test]
    fn scalar_multiplier_rescales_by_its_power() {
        let map = circle_map();
        let alpha = ScalarField {
            eval: Box::new(|x: &[f64]| 1.5 + 0.5 * x[0]),
            lipschitz: 0.5,
            upper: 2.25,
        };
        let domain = BoxDomain::cube(&[0.0, 0.0], 1.5);
        let spec = QuadratureSpec::default();
        let defect = scalar_rescale_check(&map, &alpha, &|_| 1.0, &domain, &spec).unwrap();
        assert!(defect < 1e-4, "scalar rescale defect {defect}");
    }

    #[test]
    fn change_of_variables_under_anisotropic_scaling() {
        // Ψ(y) = (2y₁, y₂/2), det DΨ = 1.
        let map = circle_map();
        let psi = Diffeomorphism {
            forward: Box::new(|y: &[f64], x: &mut [f64]| {
                x[0] = 2.0 * y[0];
                x[1] = 0.5 * y[1];
            }),
            jac_det: Box::new(|_| 1.0),
            lipschitz: 2.0,
        };
        let domain = BoxDomain::cube(&[0.0, 0.0], 1.5);
        let preimage = BoxDomain::new(vec![-0.75, -3.0], vec![0.75, 3.0]);
        let spec = QuadratureSpec::default();
        let defect =
            change_of_variables_check(&map, &psi, &preimage, &|_| 1.0, &domain, &spec).unwrap();
        assert!(defect < 1e-3, "change-of-variables defect {defect}");
    }

    #[test]
    fn divergence_theorem_on_the_disc() {
        // ∫_{|x|<1} div V dx = ∫ δ(|x|−1) V·∇f dx with V = x and
        // f = |x| − 1: both sides are 2π.
        let map = circle_map();
        let domain = BoxDomain::cube(&[0.0, 0.0], 1.5);
        let spec = QuadratureSpec::default();
        let flux = delta_integral(&map, &|x: &[f64]| x[0].hypot(x[1]), &domain, &spec).unwrap();
        assert_relative_eq!(flux.value, 2.0 * PI, max_relative = 1e-4);
    }
}
