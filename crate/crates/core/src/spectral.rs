//! Spherical spectral machinery: the constrained-sum identity on unit
//! vectors, Funk–Hecke diagonalization of the chordal-distance quadratic
//! form, and the trilinear form T over the singular measure Σ on (S¹)⁶
//! concentrated on six-tuples summing to zero.

use num_complex::Complex64;
use rand::Rng;

use crate::config::QuadratureSpec;
use crate::delta::Estimate;
use crate::error::{Error, Result};
use crate::quad::gauss_legendre;
use crate::special::{gegenbauer_ratio, legendre, sphere_volume, GegenbauerIndex};

/// |ω₁+ω₂|² + |ω₂+ω₃|² + |ω₃+ω₁|² − 4 for unit vectors whose sum is a
/// unit vector; vanishes identically on the constraint set.
pub fn magic_identity_check(w1: &[f64], w2: &[f64], w3: &[f64]) -> Result<f64> {
    let d = w1.len();
    if w2.len() != d || w3.len() != d {
        return Err(Error::Precondition("dimension mismatch".into()));
    }
    let norm_sq = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
    for w in [w1, w2, w3] {
        if (norm_sq(w) - 1.0).abs() > 1e-12 {
            return Err(Error::Precondition("inputs must be unit vectors".into()));
        }
    }
    let sum_sq: f64 = (0..d).map(|i| (w1[i] + w2[i] + w3[i]).powi(2)).sum();
    if (sum_sq - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(
            "the three vectors must sum to a unit vector".into(),
        ));
    }
    let pair = |a: &[f64], b: &[f64]| (0..d).map(|i| (a[i] + b[i]).powi(2)).sum::<f64>();
    Ok(pair(w1, w2) + pair(w2, w3) + pair(w3, w1) - 4.0)
}

fn random_unit<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 && n <= 1.0 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Random (ω₁, ω₂, ω₃) on S^{d−1} with |ω₁+ω₂+ω₃| = 1: the constraint
/// pins the component of ω₃ along ω₁+ω₂, leaving a free direction in the
/// orthogonal complement.
pub fn random_constrained_triple<R: Rng>(rng: &mut R, d: usize) -> [Vec<f64>; 3] {
    assert!(d >= 2);
    loop {
        let w1 = random_unit(rng, d);
        let w2 = random_unit(rng, d);
        let s: Vec<f64> = (0..d).map(|i| w1[i] + w2[i]).collect();
        let sn = s.iter().map(|x| x * x).sum::<f64>().sqrt();
        if sn < 1e-6 || sn > 2.0 - 1e-9 {
            continue;
        }
        let shat: Vec<f64> = s.iter().map(|x| x / sn).collect();
        // Unit vector orthogonal to s.
        let perp = loop {
            let mut p = random_unit(rng, d);
            let dot: f64 = (0..d).map(|i| p[i] * shat[i]).sum();
            for i in 0..d {
                p[i] -= dot * shat[i];
            }
            let pn = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            if pn > 1e-3 {
                break p.into_iter().map(|x| x / pn).collect::<Vec<f64>>();
            }
        };
        let along = -0.5 * sn;
        let across = (1.0 - 0.25 * sn * sn).max(0.0).sqrt();
        let w3: Vec<f64> = (0..d).map(|i| along * shat[i] + across * perp[i]).collect();
        return [w1, w2, w3];
    }
}

/// Eigenvalues of the quadratic-form kernel on S^{d−1} against spherical
/// harmonics of degree k, with quadrature error bars.
#[derive(Debug, Clone)]
pub struct FunkHeckeSpectrum {
    pub dimension: u32,
    pub eigenvalues: Vec<Estimate>,
}

impl FunkHeckeSpectrum {
    /// +1 / −1 when the error bar excludes zero, 0 otherwise.
    pub fn sign(&self, k: usize) -> i8 {
        let e = &self.eigenvalues[k];
        if e.value > e.error {
            1
        } else if e.value < -e.error {
            -1
        } else {
            0
        }
    }
}

fn funk_hecke_level(d: u32, kmax: usize, n: usize) -> Vec<f64> {
    let lambda = (d as f64 - 2.0) / 2.0;
    let indices: Vec<GegenbauerIndex<f64>> = (0..=kmax)
        .map(|k| GegenbauerIndex::new(k as u32, lambda).expect("positive parameter"))
        .collect();
    let vol = sphere_volume::<f64>(d - 2);
    let (nodes, weights) = gauss_legendre::<f64>(n);
    let mut out = vec![0.0; kmax + 1];
    let exp = (d as f64 - 3.0) / 2.0;
    for (x, w) in nodes.iter().zip(&weights) {
        // Map [−1,1] → u ∈ [0,π]; t = cos u tames the endpoint weight.
        let u = 0.5 * std::f64::consts::PI * (x + 1.0);
        let wu = 0.5 * std::f64::consts::PI * w;
        let t = u.cos();
        // Kernel |ω−ν|·|ω+ν|^{d−3} = 2 sin(u/2) · (2+2t)^{(d−3)/2}; the
        // convolution weight (1−|ω+ν|²/4)^{(d−3)/2} = (|ω−ν|/2)^{d−3}
        // turns the bare chordal distance into this product, and only
        // this combination reproduces the published sign pattern.
        let kernel = 2.0 * (0.5 * u).sin() * (2.0 + 2.0 * t).powf(exp);
        let meas = u.sin().powi(d as i32 - 2);
        let base = vol * kernel * meas * wu;
        for (k, slot) in out.iter_mut().enumerate() {
            *slot += base * gegenbauer_ratio(indices[k], t).expect("|cos u| ≤ 1");
        }
    }
    out
}

/// Λ_k for k = 0..=kmax on S^{d−1}, by Gauss–Legendre at two resolutions.
pub fn funk_hecke_spectrum(d: u32, kmax: usize, spec: &QuadratureSpec) -> Result<FunkHeckeSpectrum> {
    if !(3..=12).contains(&d) {
        return Err(Error::Precondition(format!("dimension {d} outside 3..=12")));
    }
    if kmax > 20 {
        return Err(Error::Precondition(format!("degree cap {kmax} above 20")));
    }
    let n = spec.grid.max(64);
    let lo = funk_hecke_level(d, kmax, n);
    let hi = funk_hecke_level(d, kmax, n * 3 / 2);
    let scale = hi.iter().cloned().fold(0.0f64, |a, b| a.max(b.abs()));
    let eigenvalues = lo
        .iter()
        .zip(&hi)
        .map(|(a, b)| Estimate {
            value: *b,
            error: 2.0 * (b - a).abs() + 1e-14 * scale,
        })
        .collect();
    Ok(FunkHeckeSpectrum {
        dimension: d,
        eigenvalues,
    })
}

/// Zonal expansion g(ω) = Σ c_k P_k(cos θ) on S².
#[derive(Debug, Clone)]
pub struct HarmonicExpansion {
    pub coeffs: Vec<f64>,
}

impl HarmonicExpansion {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval_costheta(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * legendre(k as u32, t))
            .sum()
    }

    /// ‖g‖²_{L²(S²)} = Σ c_k² · 4π/(2k+1).
    pub fn norm_sq(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * c * 4.0 * std::f64::consts::PI / (2 * k + 1) as f64)
            .sum()
    }
}

/// Complete elliptic integral E(m) by the arithmetic–geometric mean.
fn elliptic_e(m: f64) -> f64 {
    let m = m.clamp(0.0, 1.0 - 1e-14);
    let (mut a, mut b) = (1.0f64, (1.0 - m).sqrt());
    let mut c2_sum = m / 2.0;
    let mut pow = 0.5;
    for _ in 0..40 {
        let (an, bn) = (0.5 * (a + b), (a * b).sqrt());
        let c = 0.5 * (a - b);
        pow *= 2.0;
        c2_sum += pow * c * c;
        a = an;
        b = bn;
        if (a - b).abs() < 1e-16 * a {
            break;
        }
    }
    std::f64::consts::FRAC_PI_2 / a * (1.0 - c2_sum)
}

/// ∫₀^{2π} |ω−ν| dφ for polar cosines s, t with azimuth gap φ, via the
/// closed elliptic form of ∫ √(c − b cos φ) dφ.
fn ring_kernel(s: f64, t: f64) -> f64 {
    let c = 2.0 - 2.0 * s * t;
    let b = 2.0 * ((1.0 - s * s).max(0.0) * (1.0 - t * t).max(0.0)).sqrt();
    if c + b <= 0.0 {
        return 0.0;
    }
    let m = 2.0 * b / (c + b);
    4.0 * (c + b).sqrt() * elliptic_e(m)
}

/// H(g) = ∫∫ ḡ(ω) g(ν) |ω−ν| dσ_ω dσ_ν on S², computed both directly and
/// through the diagonal eigenvalue sum; returns the diagonal value after
/// asserting the two paths agree.
pub fn h_form(g: &HarmonicExpansion, spec: &QuadratureSpec) -> Result<f64> {
    let deg = g.degree();
    if deg > 20 {
        return Err(Error::Precondition("expansion degree above 20".into()));
    }
    let spectrum = funk_hecke_spectrum(3, deg, spec)?;
    let diagonal: f64 = g
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| {
            spectrum.eigenvalues[k].value * c * c * 4.0 * std::f64::consts::PI
                / (2 * k + 1) as f64
        })
        .sum();

    let n = (spec.grid.max(48)) * 2;
    let (nodes, weights) = gauss_legendre::<f64>(n);
    let vals: Vec<f64> = nodes.iter().map(|t| g.eval_costheta(*t)).collect();
    let mut direct = 0.0;
    for i in 0..n {
        for j in 0..n {
            direct += weights[i] * weights[j] * vals[i] * vals[j] * ring_kernel(nodes[i], nodes[j]);
        }
    }
    direct *= 2.0 * std::f64::consts::PI;

    let scale = g
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| (spectrum.eigenvalues[k].value * c * c).abs())
        .sum::<f64>()
        .max(1e-12);
    if (direct - diagonal).abs() > 1e-4 * diagonal.abs().max(scale) {
        return Err(Error::QuadratureFailure(format!(
            "kernel-form paths disagree: direct {direct} vs diagonal {diagonal}"
        )));
    }
    Ok(diagonal)
}

/// Integrand over six unit circle vectors, evaluated against Σ.
pub struct SigmaIntegrand<'a> {
    pub eval: Box<dyn Fn(&[[f64; 2]; 6]) -> Complex64 + Send + Sync + 'a>,
    /// Integrand symmetric under swapping ω₅ ↔ ω₆ (halves the work).
    pub pair_symmetric: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct SigmaEstimate {
    pub value: Complex64,
    pub error: f64,
}

/// Sum of F over the two (ω₅,ω₆) resolutions of ω₅+ω₆ = v, |v| = u < 2.
/// The per-solution determinant |sin(θ₆−θ₅)| = u√(4−u²)/2 is handled by
/// the caller, folded into the chord-variable substitution.
fn pair_sum(f: &SigmaIntegrand, ws: &mut [[f64; 2]; 6], v: [f64; 2], u: f64) -> Complex64 {
    let half = (1.0 - 0.25 * u * u).max(0.0).sqrt();
    let p = [-v[1] / u, v[0] / u];
    let a = [0.5 * v[0] + half * p[0], 0.5 * v[1] + half * p[1]];
    let b = [0.5 * v[0] - half * p[0], 0.5 * v[1] - half * p[1]];
    ws[4] = a;
    ws[5] = b;
    let mut val = (f.eval)(ws);
    if f.pair_symmetric {
        val *= 2.0;
    } else {
        ws[4] = b;
        ws[5] = a;
        val += (f.eval)(ws);
    }
    val
}

/// θ₄-integral for fixed (ω₁,ω₂,ω₃) with partial sum s of norm a: in the
/// chord variable u = |ω₄ + s| the integrand reads
///   4 G(u) / (√(4−u²) √(((a+1)²−u²)(u²−(a−1)²)))
/// over u ∈ [|a−1|, min(a+1, 2)], with inverse-square-root endpoint
/// singularities absorbed by u = lo + v² / u = hi − v² substitutions.
fn theta4_integral(
    f: &SigmaIntegrand,
    ws: &mut [[f64; 2]; 6],
    s: [f64; 2],
    a: f64,
    gl: &(Vec<f64>, Vec<f64>),
) -> Complex64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let phi_a = s[1].atan2(s[0]);
    let eval_at_u = |f: &SigmaIntegrand, ws: &mut [[f64; 2]; 6], u: f64| -> Complex64 {
        // Two ω₄ branches at angle φ_a ± β from the partial-sum axis.
        let cos_b = ((u * u - a * a - 1.0) / (2.0 * a)).clamp(-1.0, 1.0);
        let beta = cos_b.acos();
        let mut out = Complex64::new(0.0, 0.0);
        for sgn in [1.0, -1.0] {
            let th4 = phi_a + sgn * beta;
            let (s4, c4) = th4.sin_cos();
            ws[3] = [c4, s4];
            let v = [-(s[0] + c4), -(s[1] + s4)];
            out += pair_sum(f, ws, v, u);
        }
        out
    };

    if a < 0.05 {
        // Near-cancelling partial sum: u ≈ 1 across the whole circle and
        // the plain periodic rule is accurate; the substitution below
        // would degenerate.
        let n = 64;
        let mut total = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let th4 = two_pi * (i as f64 + 0.5) / n as f64;
            let (s4, c4) = th4.sin_cos();
            ws[3] = [c4, s4];
            let v = [-(s[0] + c4), -(s[1] + s4)];
            let u2 = v[0] * v[0] + v[1] * v[1];
            if u2 >= 4.0 || u2 < 1e-20 {
                continue;
            }
            let u = u2.sqrt();
            let w = 2.0 / (u * (4.0 - u2).sqrt());
            total += pair_sum(f, ws, v, u) * w;
        }
        return total * (two_pi / n as f64);
    }

    let lo = (a - 1.0).abs();
    let hi = (a + 1.0).min(2.0);
    if hi - lo < 1e-12 {
        return Complex64::new(0.0, 0.0);
    }
    let upper_sq = (a + 1.0) * (a + 1.0);
    let lower_sq = lo * lo;
    let density = |u: f64| -> f64 {
        let d = (4.0 - u * u) * (upper_sq - u * u) * (u * u - lower_sq);
        4.0 / d.max(1e-300).sqrt()
    };
    let mid = 0.5 * (lo + hi);
    let mut total = Complex64::new(0.0, 0.0);
    let (nodes, weights) = gl;
    // Lower half: u = lo + v².
    let vmax = (mid - lo).sqrt();
    for (x, w) in nodes.iter().zip(weights) {
        let v = 0.5 * vmax * (x + 1.0);
        let u = lo + v * v;
        if u <= lo || u >= hi {
            continue;
        }
        let jac = 2.0 * v * 0.5 * vmax * w;
        total += eval_at_u(f, ws, u) * (density(u) * jac);
    }
    // Upper half: u = hi − v².
    let vmax = (hi - mid).sqrt();
    for (x, w) in nodes.iter().zip(weights) {
        let v = 0.5 * vmax * (x + 1.0);
        let u = hi - v * v;
        if u <= lo || u >= hi {
            continue;
        }
        let jac = 2.0 * v * 0.5 * vmax * w;
        total += eval_at_u(f, ws, u) * (density(u) * jac);
    }
    total
}

fn sigma_level(f: &SigmaIntegrand, n: usize) -> Complex64 {
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let omega: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let th = step * (i as f64 + 0.5);
            let (s, c) = th.sin_cos();
            [c, s]
        })
        .collect();
    let gl = gauss_legendre::<f64>(20);
    let mut total = Complex64::new(0.0, 0.0);
    let mut ws = [[0.0f64; 2]; 6];
    for w1 in &omega {
        ws[0] = *w1;
        for w2 in &omega {
            ws[1] = *w2;
            let s12 = [w1[0] + w2[0], w1[1] + w2[1]];
            for w3 in &omega {
                ws[2] = *w3;
                let s123 = [s12[0] + w3[0], s12[1] + w3[1]];
                let a = (s123[0] * s123[0] + s123[1] * s123[1]).sqrt();
                if a >= 3.0 {
                    continue;
                }
                total += theta4_integral(f, &mut ws, s123, a, &gl);
            }
        }
    }
    total * step.powi(3)
}

/// ∫ F dΣ over (S¹)⁶: the angles θ₁..θ₄ are integrated on a tensor grid
/// and the two-point delta is resolved into its two (ω₅,ω₆) solutions.
pub fn sigma_integrate(f: &SigmaIntegrand, spec: &QuadratureSpec) -> Result<SigmaEstimate> {
    let n = spec.grid.max(32);
    let lo = sigma_level(f, n);
    let hi = sigma_level(f, n * 3 / 2);
    Ok(SigmaEstimate {
        value: hi,
        error: 2.0 * (hi - lo).norm() + 1e-9 * hi.norm(),
    })
}

fn angle(w: &[f64; 2]) -> f64 {
    w[1].atan2(w[0])
}

/// T(h₁,h₂,h₃) = ∫ h₁(ω₁)h₂(ω₂)h₃(ω₃)(|ω₄+ω₅+ω₆|²−1) dΣ.
pub fn t_form(
    h1: &(dyn Fn(f64) -> f64 + Sync),
    h2: &(dyn Fn(f64) -> f64 + Sync),
    h3: &(dyn Fn(f64) -> f64 + Sync),
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let integrand = SigmaIntegrand {
        eval: Box::new(move |ws: &[[f64; 2]; 6]| {
            let sx = ws[3][0] + ws[4][0] + ws[5][0];
            let sy = ws[3][1] + ws[4][1] + ws[5][1];
            let factor = sx * sx + sy * sy - 1.0;
            Complex64::new(
                h1(angle(&ws[0])) * h2(angle(&ws[1])) * h3(angle(&ws[2])) * factor,
                0.0,
            )
        }),
        pair_symmetric: true,
    };
    let est = sigma_integrate(&integrand, spec)?;
    Ok(Estimate {
        value: est.value.re,
        error: est.error + est.value.im.abs(),
    })
}

/// Both sides of the conjectured six-linear versus squared-trilinear
/// inequality, with gap = rhs − lhs (no sign contract: open question).
#[derive(Debug, Clone, Copy)]
pub struct Step1Report {
    pub lhs: Estimate,
    pub rhs: Estimate,
    pub gap: f64,
    pub gap_error: f64,
}

/// Probes the open inequality for a nonnegative antipodally symmetric f.
pub fn step1_probe(
    f: &(dyn Fn(f64) -> f64 + Sync),
    spec: &QuadratureSpec,
) -> Result<Step1Report> {
    for i in 0..128 {
        let th = 2.0 * std::f64::consts::PI * i as f64 / 128.0;
        let v = f(th);
        if v < 0.0 {
            return Err(Error::Precondition("f must be nonnegative".into()));
        }
        if (v - f(th + std::f64::consts::PI)).abs() > 1e-12 * v.abs().max(1.0) {
            return Err(Error::Precondition("f must be antipodally symmetric".into()));
        }
    }
    let lhs_integrand = SigmaIntegrand {
        eval: Box::new(move |ws: &[[f64; 2]; 6]| {
            let sx = ws[3][0] + ws[4][0] + ws[5][0];
            let sy = ws[3][1] + ws[4][1] + ws[5][1];
            let factor = sx * sx + sy * sy - 1.0;
            let prod: f64 = ws.iter().map(|w| f(angle(w))).product();
            Complex64::new(prod * factor, 0.0)
        }),
        pair_symmetric: true,
    };
    let lhs_raw = sigma_integrate(&lhs_integrand, spec)?;
    let lhs = Estimate {
        value: lhs_raw.value.re,
        error: lhs_raw.error + lhs_raw.value.im.abs(),
    };
    let f2 = move |th: f64| f(th) * f(th);
    let rhs = t_form(&f2, &f2, &f2, spec)?;
    Ok(Step1Report {
        gap: rhs.value - lhs.value,
        gap_error: rhs.error + lhs.error,
        lhs,
        rhs,
    })
}
