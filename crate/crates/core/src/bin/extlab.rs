//! Command-line front door: every numeric module behind a subcommand,
//! with deterministic CSV/JSON output and a workspace of self-describing
//! artifacts that `report` aggregates.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use extlab::besselmix::{mixed_norm_sixth, monotonicity_scan};
use extlab::convolution::{
    conv2_closed, conv2_oracle, conv3_circle, conv3_circle_mc, conv3_sphere2, conv3_sphere2_mc,
};
use extlab::delta::{
    change_of_variables_check, delta_integral, scalar_rescale_check, BoxDomain, BumpProfile,
    Diffeomorphism, ImplicitMap, ScalarField,
};
use extlab::extension::{sharp_chain, TrialFunction};
use extlab::output::{
    artifact, csv_document, fmt_sig, json_document, read_artifact, write_artifact, ARTIFACT_NAMES,
};
use extlab::spectral::{funk_hecke_spectrum, step1_probe, t_form};
use extlab::surfaces::{DecayClass, SpaceTimePoint, SurfaceId, SurfaceMeasure};
use extlab::{Error, QuadratureSpec, Result};

#[derive(Parser)]
#[command(
    name = "extlab",
    version,
    about = "Numerical laboratory for surface-measure convolutions, extension functionals, \
             spherical spectra, and delta-calculus integration"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

/// Quadrature knobs and output plumbing shared by every subcommand.
#[derive(Args, Clone)]
struct Common {
    /// Base mollifier width ε₀ (default: tied to box size).
    #[arg(long)]
    eps: Option<f64>,
    /// Base tensor-grid resolution per axis.
    #[arg(long)]
    grid: Option<usize>,
    /// Monte-Carlo sample count.
    #[arg(long)]
    samples: Option<u64>,
    /// RNG seed for Monte-Carlo paths.
    #[arg(long)]
    seed: Option<u64>,
    /// Target tolerance for residual checks.
    #[arg(long)]
    tol: Option<f64>,
    /// Truncation radius for noncompact base domains.
    #[arg(long)]
    cutoff: Option<f64>,
    /// Write the primary document here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory where run artifacts accumulate for `report`.
    #[arg(long, default_value = "extlab-out")]
    workspace: PathBuf,
}

impl Common {
    fn spec(&self) -> Result<QuadratureSpec> {
        let mut s = QuadratureSpec::default();
        if let Some(e) = self.eps {
            if e <= 0.0 {
                return Err(Error::Precondition("--eps must be positive".into()));
            }
            s.eps = Some(e);
        }
        if let Some(g) = self.grid {
            if g == 0 {
                return Err(Error::Precondition("--grid must be positive".into()));
            }
            s.grid = g;
        }
        if let Some(n) = self.samples {
            s.mc_samples = n;
        }
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        if let Some(t) = self.tol {
            if t <= 0.0 {
                return Err(Error::Precondition("--tol must be positive".into()));
            }
            s.tol = t;
        }
        if let Some(c) = self.cutoff {
            if c <= 0.0 {
                return Err(Error::Precondition("--cutoff must be positive".into()));
            }
            s.cutoff = c;
        }
        Ok(s)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Two- or three-fold autoconvolution of a surface measure along a
    /// radial ray: closed form vs numeric oracle.
    Conv {
        /// Surface id: paraboloid2, cone3, hyperboloid2, sphere1, sphere2, perturbed2.
        #[arg(long)]
        surface: String,
        /// Convolution fold: 2 or 3 (3 only for spheres).
        #[arg(long, default_value_t = 2)]
        fold: u32,
        /// First sampled radius |ξ|.
        #[arg(long)]
        rmin: Option<f64>,
        /// Last sampled radius |ξ|.
        #[arg(long)]
        rmax: Option<f64>,
        /// Number of sample points (endpoints included).
        #[arg(long)]
        steps: Option<usize>,
        /// Height above the two-fold support bottom for graph surfaces.
        #[arg(long, default_value_t = 0.5)]
        depth: f64,
        /// Also evaluate the mollified / Monte-Carlo oracle at each point.
        #[arg(long)]
        oracle: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        output: Format,
        #[command(flatten)]
        common: Common,
    },
    /// Sharp-constant chain ‖fμ∗fμ‖² ≤ bound with the extremizer defect.
    Functional {
        #[arg(long)]
        surface: String,
        /// Builtin trial (gaussian, exponential, disc, hyperbolic) or a
        /// CSV file of radius,value pairs.
        #[arg(long)]
        trial: String,
        /// Scale parameter for builtin trials.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Report format (json only).
        #[arg(long, default_value = "json")]
        report: String,
        #[command(flatten)]
        common: Common,
    },
    /// Eigenvalues Λ_k of the quadratic form kernel on S^{d−1}.
    Spectrum {
        #[arg(long)]
        dim: u32,
        #[arg(long)]
        kmax: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        output: Format,
        #[command(flatten)]
        common: Common,
    },
    /// Trilinear form T(h,h,h) on (S¹)⁶, or the two sides of the open
    /// first-step inequality.
    Trilinear {
        /// Builtin test function (constant, cos2, cos4) or a CSV file of
        /// angle,value pairs on [0, 2π).
        #[arg(long)]
        h: String,
        /// t: evaluate T(h,h,h); step1: probe the open inequality.
        #[arg(long, default_value = "t")]
        mode: String,
        #[command(flatten)]
        common: Common,
    },
    /// Scan of sixfold Bessel integrals I(k,ℓ,m) against the (0,0,0)
    /// reference.
    Bessel {
        /// Largest index per slot (0 emits the reference row alone).
        #[arg(long)]
        scan: u32,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        output: Format,
        #[command(flatten)]
        common: Common,
    },
    /// Mixed-norm sixth power of a circle expansion, computed two ways.
    Mixednorm {
        /// File of real coefficients a_0 … a_K (K ≤ 8), whitespace or
        /// comma separated.
        #[arg(long)]
        coeffs: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Delta-calculus regression suite: closed-form values, calculus
    /// rules, and mollified ε-convergence.
    Delta {
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        output: Format,
        #[command(flatten)]
        common: Common,
    },
    /// Aggregate the workspace artifacts into one summary document.
    Report {
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = check_thread_cap() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Precondition(_) | Error::Domain(_) | Error::Io(_) | Error::Json(_) => {
                    ExitCode::from(1)
                }
                _ => ExitCode::from(2),
            }
        }
    }
}

/// All kernels are single-threaded; the cap is validated so scripted
/// callers get a loud error instead of a silently ignored setting.
fn check_thread_cap() -> Result<()> {
    if let Ok(v) = std::env::var("EXTLAB_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(()),
            _ => Err(Error::Precondition(format!(
                "EXTLAB_THREADS must be a positive integer, got '{v}'"
            ))),
        }
    } else {
        Ok(())
    }
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent)?;
                }
            }
            fs::write(path, text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Conv {
            surface,
            fold,
            rmin,
            rmax,
            steps,
            depth,
            oracle,
            output,
            common,
        } => run_conv(
            &surface, fold, rmin, rmax, steps, depth, oracle, output, &common,
        ),
        Cmd::Functional {
            surface,
            trial,
            scale,
            report,
            common,
        } => run_functional(&surface, &trial, scale, &report, &common),
        Cmd::Spectrum {
            dim,
            kmax,
            output,
            common,
        } => run_spectrum(dim, kmax, output, &common),
        Cmd::Trilinear { h, mode, common } => run_trilinear(&h, &mode, &common),
        Cmd::Bessel {
            scan,
            output,
            common,
        } => run_bessel(scan, output, &common),
        Cmd::Mixednorm { coeffs, common } => run_mixednorm(&coeffs, &common),
        Cmd::Delta { output, common } => run_delta(output, &common),
        Cmd::Report { common } => run_report(&common),
    }
}

// ---------------------------------------------------------------- conv

#[allow(clippy::too_many_arguments)]
fn run_conv(
    surface: &str,
    fold: u32,
    rmin: Option<f64>,
    rmax: Option<f64>,
    steps: Option<usize>,
    depth: f64,
    oracle: bool,
    output: Format,
    common: &Common,
) -> Result<()> {
    let id = SurfaceId::parse(surface)?;
    let spec = common.spec()?;
    let m = SurfaceMeasure::new(id);
    let is_sphere = matches!(id, SurfaceId::Sphere1 | SurfaceId::Sphere2);

    let (lo, hi, n, claim) = match fold {
        2 => (
            rmin.unwrap_or(0.1),
            rmax.unwrap_or(1.9),
            steps.unwrap_or(20),
            "twofold-convolution-closed-forms",
        ),
        3 => {
            if !is_sphere {
                return Err(Error::Precondition(
                    "three-fold convolutions are available for sphere1 and sphere2 only".into(),
                ));
            }
            let claim = if id == SurfaceId::Sphere1 {
                "circle-threefold-profile"
            } else {
                "sphere-threefold-closed-form"
            };
            (rmin.unwrap_or(0.0), rmax.unwrap_or(3.0), steps.unwrap_or(300), claim)
        }
        other => {
            return Err(Error::Precondition(format!(
                "fold must be 2 or 3, got {other}"
            )))
        }
    };
    if n < 2 || hi <= lo {
        return Err(Error::Precondition(
            "need rmin < rmax and at least two steps".into(),
        ));
    }

    let graph2 = fold == 2 && !is_sphere;
    let header: Vec<&str> = if graph2 {
        vec!["r", "tau", "closed_form", "oracle", "abs_error"]
    } else {
        vec!["r", "closed_form", "oracle", "abs_error"]
    };

    let mut rows_num: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut max_rel_err: f64 = 0.0;
    let mut compared = 0usize;
    for i in 0..n {
        let r = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let mut row = Vec::new();
        let closed;
        let oracle_value;
        if fold == 2 {
            let p = if is_sphere {
                SpaceTimePoint::radial(r, 0.0, m.ambient_dim())
            } else {
                SpaceTimePoint::radial(r, m.conv2_tau_min(r) + depth, m.base_dim())
            };
            closed = conv2_closed(id, &p).unwrap_or(f64::NAN);
            oracle_value = if oracle {
                conv2_oracle(id, &p, &spec)?.value
            } else {
                f64::NAN
            };
            row.push(r);
            if graph2 {
                row.push(p.tau);
            }
        } else {
            closed = match id {
                SurfaceId::Sphere2 => conv3_sphere2(r),
                _ => conv3_circle(r, &spec).unwrap_or(f64::NAN),
            };
            oracle_value = if oracle {
                match id {
                    SurfaceId::Sphere2 => conv3_sphere2_mc(r, &spec).value,
                    _ => conv3_circle_mc(r, &spec).value,
                }
            } else {
                f64::NAN
            };
            row.push(r);
        }
        let abs_error = (closed - oracle_value).abs();
        if closed.is_finite() && oracle_value.is_finite() {
            compared += 1;
            max_rel_err = max_rel_err.max(abs_error / closed.abs().max(1e-12));
        }
        row.extend([closed, oracle_value, abs_error]);
        rows_num.push(row);
    }

    let rows: Vec<Vec<String>> = rows_num
        .iter()
        .map(|row| row.iter().map(|&x| fmt_sig(x)).collect())
        .collect();
    let summary = json!({
        "points": n,
        "oracle": oracle,
        "compared": compared,
        "max_rel_error": if compared > 0 { Value::from(max_rel_err) } else { Value::Null },
        "pass": if compared > 0 { Value::from(max_rel_err <= 1e-2) } else { Value::Null },
    });
    let body = json!({
        "surface": surface,
        "fold": fold,
        "depth": if graph2 { Value::from(depth) } else { Value::Null },
        "columns": header,
        "rows": rows_num,
        "summary": summary,
    });
    let art = artifact("conv", claim, &spec, body.clone());
    write_artifact(&common.workspace, "conv", &art)?;
    match output {
        Format::Csv => emit(&csv_document(&header, &rows), &common.out),
        Format::Json => emit(&json_document(&art), &common.out),
    }
}

// ---------------------------------------------------------- functional

fn run_functional(
    surface: &str,
    trial: &str,
    scale: f64,
    report: &str,
    common: &Common,
) -> Result<()> {
    if report != "json" {
        return Err(Error::Precondition(format!(
            "unsupported report format '{report}' (only json)"
        )));
    }
    let id = SurfaceId::parse(surface)?;
    let spec = common.spec()?;
    if scale <= 0.0 {
        return Err(Error::Precondition("--scale must be positive".into()));
    }
    let f = match trial {
        "gaussian" => TrialFunction::gaussian(id, scale),
        "exponential" => TrialFunction::exponential(id, scale),
        "disc" => TrialFunction::disc_indicator(id, scale),
        "hyperbolic" => {
            if id != SurfaceId::Hyperboloid2 {
                return Err(Error::Precondition(
                    "the hyperbolic trial lives on hyperboloid2".into(),
                ));
            }
            TrialFunction::hyperbolic_exponential(scale)
        }
        path => {
            let pts = read_pairs(Path::new(path))?;
            let radius = pts.last().map(|p| p.0).unwrap_or(0.0);
            if radius <= 0.0 {
                return Err(Error::Precondition(
                    "trial file needs radius,value pairs with a positive last radius".into(),
                ));
            }
            TrialFunction::radial(id, DecayClass::Compact { radius }, move |r| {
                interp_clamped(&pts, r)
            })
        }
    };
    let rep = sharp_chain(&f, &spec)?;
    let body = json!({
        "surface": surface,
        "trial": trial,
        "scale": scale,
        "l2_conv_sq": { "value": rep.l2_conv_sq.value, "error": rep.l2_conv_sq.error },
        "bound": { "value": rep.bound.value, "error": rep.bound.error },
        "defect": rep.defect,
        "defect_error": rep.defect_error,
        "summary": {
            "defect": rep.defect,
            // The chain inequality itself: the defect may not be
            // significantly negative.
            "pass": rep.defect >= -3.0 * rep.defect_error,
        },
    });
    let art = artifact("functional", "extremizer-defect-chain", &spec, body);
    write_artifact(&common.workspace, "functional", &art)?;
    emit(&json_document(&art), &common.out)
}

// ------------------------------------------------------------ spectrum

fn run_spectrum(dim: u32, kmax: usize, output: Format, common: &Common) -> Result<()> {
    let spec = common.spec()?;
    let spectrum = funk_hecke_spectrum(dim, kmax, &spec)?;
    let header = ["k", "lambda", "err", "sign"];
    let mut rows = Vec::new();
    let mut rows_num = Vec::new();
    let mut signs = String::new();
    let mut pass = true;
    for (k, e) in spectrum.eigenvalues.iter().enumerate() {
        let sign = spectrum.sign(k);
        let sign_str = match sign {
            1 => "+",
            -1 => "-",
            _ => "0",
        };
        signs.push_str(sign_str);
        // A sign of 0 is acceptable only for a genuinely vanishing level.
        pass &= sign != 0 || e.value.abs() <= 1e-8;
        rows.push(vec![
            k.to_string(),
            fmt_sig(e.value),
            fmt_sig(e.error),
            sign_str.to_string(),
        ]);
        rows_num.push(json!([k, e.value, e.error, sign]));
    }
    let body = json!({
        "dimension": dim,
        "kmax": kmax,
        "columns": header,
        "rows": rows_num,
        "summary": { "signs": signs, "pass": pass },
    });
    let art = artifact("spectrum", "eigenvalue-sign-table", &spec, body);
    write_artifact(&common.workspace, "spectrum", &art)?;
    match output {
        Format::Csv => emit(&csv_document(&header, &rows), &common.out),
        Format::Json => emit(&json_document(&art), &common.out),
    }
}

// ----------------------------------------------------------- trilinear

fn run_trilinear(h: &str, mode: &str, common: &Common) -> Result<()> {
    let spec = common.spec()?;
    let func: Box<dyn Fn(f64) -> f64 + Sync> = match h {
        "constant" => Box::new(|_| 1.0),
        "cos2" => Box::new(|t: f64| 1.0 + 0.5 * (2.0 * t).cos()),
        "cos4" => Box::new(|t: f64| 1.0 + 0.5 * (4.0 * t).cos()),
        path => {
            let pts = read_pairs(Path::new(path))?;
            if pts.len() < 2 {
                return Err(Error::Precondition(
                    "test-function file needs at least two angle,value pairs".into(),
                ));
            }
            Box::new(move |t: f64| interp_periodic(&pts, t))
        }
    };
    let body = match mode {
        "t" => {
            let est = t_form(func.as_ref(), func.as_ref(), func.as_ref(), &spec)?;
            json!({
                "h": h,
                "mode": "t",
                "value": est.value,
                "error": est.error,
                "summary": { "value": est.value, "pass": Value::Null },
            })
        }
        "step1" => {
            let rep = step1_probe(func.as_ref(), &spec)?;
            json!({
                "h": h,
                "mode": "step1",
                "lhs": { "value": rep.lhs.value, "error": rep.lhs.error },
                "rhs": { "value": rep.rhs.value, "error": rep.rhs.error },
                "gap": rep.gap,
                "gap_error": rep.gap_error,
                // Open inequality: reported, never asserted.
                "summary": { "gap": rep.gap, "pass": Value::Null },
            })
        }
        other => {
            return Err(Error::Precondition(format!(
                "mode must be t or step1, got '{other}'"
            )))
        }
    };
    let art = artifact("trilinear", "trilinear-form-probe", &spec, body);
    write_artifact(&common.workspace, "trilinear", &art)?;
    emit(&json_document(&art), &common.out)
}

// -------------------------------------------------------------- bessel

fn run_bessel(scan: u32, output: Format, common: &Common) -> Result<()> {
    let spec = common.spec()?;
    let report = monotonicity_scan(scan, &spec)?;
    let header = ["k", "l", "m", "I", "err", "strictly_below_I000"];
    let mut rows = vec![vec![
        "0".into(),
        "0".into(),
        "0".into(),
        fmt_sig(report.reference.value),
        fmt_sig(report.reference.error),
        "false".into(),
    ]];
    let mut rows_num = vec![json!([0, 0, 0, report.reference.value, report.reference.error, false])];
    for e in &report.entries {
        rows.push(vec![
            e.idx.k.to_string(),
            e.idx.l.to_string(),
            e.idx.m.to_string(),
            fmt_sig(e.value.value),
            fmt_sig(e.value.error),
            e.strictly_below.to_string(),
        ]);
        rows_num.push(json!([
            e.idx.k,
            e.idx.l,
            e.idx.m,
            e.value.value,
            e.value.error,
            e.strictly_below
        ]));
    }
    let body = json!({
        "cap": scan,
        "columns": header,
        "rows": rows_num,
        "summary": {
            "cases": report.entries.len(),
            "all_strict": report.all_strict,
            "pass": report.all_strict,
        },
    });
    let art = artifact("bessel", "triple-bessel-monotonicity", &spec, body);
    write_artifact(&common.workspace, "bessel", &art)?;
    match output {
        Format::Csv => emit(&csv_document(&header, &rows), &common.out),
        Format::Json => emit(&json_document(&art), &common.out),
    }
}

// ----------------------------------------------------------- mixednorm

fn run_mixednorm(coeffs_path: &Path, common: &Common) -> Result<()> {
    let spec = common.spec()?;
    let coeffs = read_floats(coeffs_path)?;
    if coeffs.is_empty() {
        return Err(Error::Precondition(
            "coefficient file contains no numbers".into(),
        ));
    }
    let mn = mixed_norm_sixth(&coeffs, &spec)?;
    let scale = mn.via_sum.value.abs().max(mn.via_direct.value.abs()).max(1e-12);
    let rel_gap = (mn.via_sum.value - mn.via_direct.value).abs() / scale;
    let body = json!({
        "coeffs": coeffs,
        "via_sum": { "value": mn.via_sum.value, "error": mn.via_sum.error },
        "via_direct": { "value": mn.via_direct.value, "error": mn.via_direct.error },
        "rel_gap": rel_gap,
        "summary": { "rel_gap": rel_gap, "pass": rel_gap <= 1e-4 },
    });
    let art = artifact("mixednorm", "mixed-norm-identity", &spec, body);
    write_artifact(&common.workspace, "mixednorm", &art)?;
    emit(&json_document(&art), &common.out)
}

// --------------------------------------------------------------- delta

struct DeltaCase {
    name: &'static str,
    measured: f64,
    expected: f64,
}

/// Closed-form and calculus-rule regression cases for the mollified
/// delta integrator.
fn delta_cases(spec: &QuadratureSpec) -> Result<Vec<DeltaCase>> {
    let mut cases = Vec::new();

    let circle = ImplicitMap::new(
        2,
        1,
        |x: &[f64], out: &mut [f64]| out[0] = x[0].hypot(x[1]) - 1.0,
        1.0,
    );
    let square = BoxDomain::cube(&[0.0, 0.0], 1.5);
    let est = delta_integral(&circle, &|_| 1.0, &square, spec)?;
    cases.push(DeltaCase {
        name: "circle-length",
        measured: est.value,
        expected: 2.0 * PI,
    });

    let quad_circle = ImplicitMap::new(
        2,
        1,
        |x: &[f64], out: &mut [f64]| out[0] = x[0] * x[0] + x[1] * x[1] - 1.0,
        3.0,
    );
    let est = delta_integral(&quad_circle, &|_| 1.0, &square, spec)?;
    cases.push(DeltaCase {
        name: "quadratic-circle",
        measured: est.value,
        expected: PI,
    });

    // Two unit spheres with centers |x| apart intersect in a circle; the
    // double-delta integral collapses to 2π/|x| by the product rule.
    for (name, r) in [
        ("sphere-pair-0.5", 0.5_f64),
        ("sphere-pair-1.0", 1.0),
        ("sphere-pair-1.5", 1.5),
    ] {
        let pair = ImplicitMap::new(
            3,
            2,
            move |y: &[f64], out: &mut [f64]| {
                let ny = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
                let d0 = r - y[0];
                out[0] = ny - 1.0;
                out[1] = (d0 * d0 + y[1] * y[1] + y[2] * y[2]).sqrt() - 1.0;
            },
            1.0,
        );
        let domain = BoxDomain::new(vec![-1.1, -1.1, -1.1], vec![r + 1.1, 1.1, 1.1]);
        let est = delta_integral(&pair, &|_| 1.0, &domain, spec)?;
        cases.push(DeltaCase {
            name,
            measured: est.value,
            expected: 2.0 * PI / r,
        });
    }

    let alpha = ScalarField {
        eval: Box::new(|x: &[f64]| 1.5 + 0.5 * x[0]),
        lipschitz: 0.5,
        upper: 2.25,
    };
    let defect = scalar_rescale_check(&circle, &alpha, &|_| 1.0, &square, spec)?;
    cases.push(DeltaCase {
        name: "scalar-rescale",
        measured: defect,
        expected: 0.0,
    });

    // Ψ(y) = (2y₁, y₂/2): unimodular anisotropic scaling.
    let psi = Diffeomorphism {
        forward: Box::new(|y: &[f64], out: &mut [f64]| {
            out[0] = 2.0 * y[0];
            out[1] = 0.5 * y[1];
        }),
        jac_det: Box::new(|_| 1.0),
        lipschitz: 2.0,
    };
    let preimage = BoxDomain::new(vec![-0.75, -3.0], vec![0.75, 3.0]);
    let defect =
        change_of_variables_check(&circle, &psi, &preimage, &|_| 1.0, &square, spec)?;
    cases.push(DeltaCase {
        name: "change-of-variables",
        measured: defect,
        expected: 0.0,
    });

    Ok(cases)
}

/// Mollified values of the circle length across ε-halvings; successive
/// differences must shrink monotonically.
fn delta_eps_monotone(spec: &QuadratureSpec) -> (Vec<f64>, bool) {
    let circle = ImplicitMap::new(
        2,
        1,
        |x: &[f64], out: &mut [f64]| out[0] = x[0].hypot(x[1]) - 1.0,
        1.0,
    );
    let domain = BoxDomain::cube(&[0.0, 0.0], 1.5);
    let eps0 = spec.eps.unwrap_or(0.3);
    let values: Vec<f64> = (0..4)
        .map(|j| {
            extlab::delta::mollified_integral(
                &circle,
                &|_| 1.0,
                &domain,
                eps0 * 0.5_f64.powi(j),
                spec.cells_across.max(16),
                BumpProfile::Poly,
            )
        })
        .collect();
    let deltas: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let monotone = deltas.windows(2).all(|w| w[1] < w[0]);
    (deltas, monotone)
}

fn run_delta(output: Format, common: &Common) -> Result<()> {
    let spec = common.spec()?;
    let header = ["case", "measured", "expected", "residual", "pass"];
    let mut rows = Vec::new();
    let mut rows_num = Vec::new();
    let mut all_pass = true;

    for case in delta_cases(&spec)? {
        let residual = (case.measured - case.expected).abs() / case.expected.abs().max(1.0);
        let pass = residual <= spec.tol;
        all_pass &= pass;
        rows.push(vec![
            case.name.to_string(),
            fmt_sig(case.measured),
            fmt_sig(case.expected),
            fmt_sig(residual),
            pass.to_string(),
        ]);
        rows_num.push(json!([case.name, case.measured, case.expected, residual, pass]));
    }

    let (deltas, monotone) = delta_eps_monotone(&spec);
    all_pass &= monotone;
    for (j, d) in deltas.iter().enumerate() {
        let pass = j == 0 || *d < deltas[j - 1];
        rows.push(vec![
            format!("eps-halving-{j}"),
            fmt_sig(*d),
            "0.00000000000e0".into(),
            fmt_sig(*d),
            pass.to_string(),
        ]);
        rows_num.push(json!([format!("eps-halving-{j}"), d, 0.0, d, pass]));
    }

    let body = json!({
        "columns": header,
        "rows": rows_num,
        "summary": { "pass": all_pass, "eps_monotone": monotone },
    });
    let art = artifact("delta", "delta-calculus-rules", &spec, body);
    write_artifact(&common.workspace, "delta", &art)?;
    match output {
        Format::Csv => emit(&csv_document(&header, &rows), &common.out)?,
        Format::Json => emit(&json_document(&art), &common.out)?,
    }
    if !all_pass {
        return Err(Error::Contract(
            "a delta-calculus regression case exceeded its tolerance".into(),
        ));
    }
    Ok(())
}

// -------------------------------------------------------------- report

fn run_report(common: &Common) -> Result<()> {
    let spec = common.spec()?;
    let mut sections = serde_json::Map::new();
    let mut missing = Vec::new();
    let mut overall: Option<bool> = None;
    for name in ARTIFACT_NAMES {
        match read_artifact(&common.workspace, name)? {
            Some(art) => {
                let claim = art.get("claim").cloned().unwrap_or(Value::Null);
                let summary = art
                    .get("body")
                    .and_then(|b| b.get("summary"))
                    .cloned()
                    .unwrap_or(Value::Null);
                if let Some(pass) = summary.get("pass").and_then(Value::as_bool) {
                    overall = Some(overall.unwrap_or(true) && pass);
                }
                sections.insert(
                    name.to_string(),
                    json!({ "claim": claim, "summary": summary }),
                );
            }
            None => missing.push(name),
        }
    }
    if sections.is_empty() {
        return Err(Error::Precondition(format!(
            "workspace '{}' contains no run artifacts; run other subcommands first",
            common.workspace.display()
        )));
    }
    let doc = json!({
        "schema": 1,
        "config": serde_json::to_value(&spec)?,
        "partial": !missing.is_empty(),
        "missing": missing,
        "sections": Value::Object(sections),
        "pass": overall,
    });
    emit(&json_document(&doc), &common.out)
}

// ------------------------------------------------------------- helpers

/// Parse "a,b" or "a b" number pairs, one per line; '#' starts a comment.
fn read_pairs(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = fs::read_to_string(path)?;
    let mut pts = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if fields.len() != 2 {
            return Err(Error::Precondition(format!(
                "{}:{}: expected two numbers per line",
                path.display(),
                lineno + 1
            )));
        }
        let a: f64 = fields[0].parse().map_err(|_| {
            Error::Precondition(format!("{}:{}: bad number", path.display(), lineno + 1))
        })?;
        let b: f64 = fields[1].parse().map_err(|_| {
            Error::Precondition(format!("{}:{}: bad number", path.display(), lineno + 1))
        })?;
        pts.push((a, b));
    }
    pts.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(pts)
}

fn read_floats(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for tok in text.split(|c: char| c == ',' || c.is_whitespace()) {
        if tok.is_empty() {
            continue;
        }
        out.push(tok.parse::<f64>().map_err(|_| {
            Error::Precondition(format!("{}: bad number '{tok}'", path.display()))
        })?);
    }
    Ok(out)
}

/// Piecewise-linear interpolation on sorted (x, y) pairs, clamped to the
/// end values outside the sampled range, 0 beyond the last point.
fn interp_clamped(pts: &[(f64, f64)], x: f64) -> f64 {
    match pts {
        [] => 0.0,
        [p] => {
            if x <= p.0 {
                p.1
            } else {
                0.0
            }
        }
        _ => {
            if x <= pts[0].0 {
                return pts[0].1;
            }
            if x > pts[pts.len() - 1].0 {
                return 0.0;
            }
            interp_linear(pts, x)
        }
    }
}

/// 2π-periodic piecewise-linear interpolation of (angle, value) pairs.
fn interp_periodic(pts: &[(f64, f64)], theta: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let t = theta.rem_euclid(two_pi);
    let first = pts[0];
    let last = pts[pts.len() - 1];
    if t < first.0 || t > last.0 {
        // Wrap-around segment from the last sample back to the first.
        let seg = first.0 + two_pi - last.0;
        let along = (t + two_pi - last.0).rem_euclid(two_pi);
        if seg <= 0.0 {
            return first.1;
        }
        return last.1 + (first.1 - last.1) * along / seg;
    }
    interp_linear(pts, t)
}

fn interp_linear(pts: &[(f64, f64)], x: f64) -> f64 {
    let j = pts.partition_point(|p| p.0 < x).min(pts.len() - 1).max(1);
    let (x0, y0) = pts[j - 1];
    let (x1, y1) = pts[j];
    if x1 == x0 {
        y0
    } else {
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }
}
