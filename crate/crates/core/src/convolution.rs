//! Convolution for the iterated Stieltjes transform: double Mellin–Barnes
//! form, spectrum form, pointwise representation through Hilbert
//! transforms, and the accompanying identity and bound checks.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use crate::catalog::CatalogEntry;
use crate::error::{Error, Result};
use crate::gamma::gamma;
use crate::grid::{default_x_grid, LogGrid, TauGrid};
use crate::mellin::{CriticalLineSpectrum, SampledFunction};
use crate::numerics::{log_kernel_unchecked, HalfLineFn, QuadratureConfig};
use crate::par;
use crate::report::{max_pointwise_rel_error, ratio, CaseResult, VerificationReport};
use crate::transforms::{hilbert, hilbert_table, stieltjes2, table_grid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvolutionMethod {
    MellinBarnesDouble,
    PointwiseTriple,
}

/// How the Mellin–Barnes kernel is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelForm {
    GammaRatio,
    #[default]
    TrigSimplified,
}

#[derive(Debug, Clone)]
pub struct ConvolutionResult {
    pub values: SampledFunction,
    pub method: ConvolutionMethod,
    pub kernel_form: KernelForm,
}

/// `Γ(s)Γ(1−s)Γ(w)Γ(1−w) / (Γ(s+w−1/2) Γ(3/2−s−w))`.
pub fn kernel_gamma_ratio(s: Complex64, w: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let z = s + w - 0.5;
    let num = gamma(s)? * gamma(one - s)? * gamma(w)? * gamma(one - w)?;
    Ok(num / (gamma(z)? * gamma(one - z)?))
}

/// `π [1 − cot(πs) cot(πw)]`.
pub fn kernel_trig(s: Complex64, w: Complex64) -> Complex64 {
    let cot = |z: Complex64| (z * PI).cos() / (z * PI).sin();
    PI * (1.0 - cot(s) * cot(w))
}

/// `|gamma ratio − π[1 − cot(πs) cot(πw)]|`.
pub fn kernel_identity_check(s: Complex64, w: Complex64) -> Result<f64> {
    Ok((kernel_gamma_ratio(s, w)? - kernel_trig(s, w)).norm())
}

fn check_xs(xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::InvalidInput("empty x grid".into()));
    }
    if let Some(x) = xs.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidInput(format!("abscissa must be positive, got {x}")));
    }
    Ok(())
}

/// Squared kernel on the tensor grid, row-major in (τ, θ).
fn kernel_matrix(grid: &TauGrid, form: KernelForm) -> Result<Vec<Complex64>> {
    let n = grid.len();
    match form {
        KernelForm::TrigSimplified => {
            let th: Vec<f64> = (0..n).map(|j| (PI * grid.tau(j)).tanh()).collect();
            Ok((0..n * n)
                .map(|k| {
                    let v = PI * (1.0 + th[k / n] * th[k % n]);
                    Complex64::new(v * v, 0.0)
                })
                .collect())
        }
        KernelForm::GammaRatio => {
            let one = Complex64::new(1.0, 0.0);
            // numerator factors per τ, denominator per τ + θ
            let reflect = par::try_map(n, |j| {
                let s = Complex64::new(0.5, grid.tau(j));
                Ok(gamma(s)? * gamma(one - s)?)
            })?;
            let c = grid.center() as f64;
            let denom = par::try_map(2 * n - 1, |k| {
                let z = Complex64::new(0.5, (k as f64 - 2.0 * c) * grid.step());
                Ok(gamma(z)? * gamma(one - z)?)
            })?;
            Ok((0..n * n)
                .map(|k| {
                    let (j, m) = (k / n, k % n);
                    let v = reflect[j] * reflect[m] / denom[j + m];
                    v * v
                })
                .collect())
        }
    }
}

/// `(f*g)(x)` from the double Mellin–Barnes integral, discretized as a
/// tensor-product trapezoidal sum over the shared τ grid.
pub fn convolve_mb(
    f: &CriticalLineSpectrum,
    g: &CriticalLineSpectrum,
    xs: &[f64],
    form: KernelForm,
) -> Result<ConvolutionResult> {
    f.check_same_grid(g)?;
    check_xs(xs)?;
    let grid = f.grid();
    let n = grid.len();
    let kernel = kernel_matrix(grid, form)?;
    let values = par::map(xs.len(), |i| {
        let x = xs[i];
        let lx = x.ln();
        let weigh = |spec: &CriticalLineSpectrum, j: usize| {
            spec.values()[j] * grid.weight(j) * Complex64::cis(-grid.tau(j) * lx)
        };
        let b: Vec<Complex64> = (0..n).map(|m| weigh(g, m)).collect();
        let mut total = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let a = weigh(f, j);
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let row = &kernel[j * n..(j + 1) * n];
            let inner: Complex64 = row.iter().zip(&b).map(|(k, b)| k * b).sum();
            total += a * inner;
        }
        // √x/(2π)² · x^{−1}
        total / (4.0 * PI * PI * x.sqrt())
    });
    Ok(ConvolutionResult {
        values: SampledFunction::new(xs.to_vec(), values)?,
        method: ConvolutionMethod::MellinBarnesDouble,
        kernel_form: form,
    })
}

/// Spectrum of `f*g`:
/// `(π/2) ∫ [1 + tanh(π(τ−θ)) tanh(πθ)]² F(τ−θ) G(θ) dθ`,
/// with `F` taken as zero outside the grid.
pub fn convolve_spectrum(f: &CriticalLineSpectrum, g: &CriticalLineSpectrum) -> Result<CriticalLineSpectrum> {
    f.check_same_grid(g)?;
    let grid = *f.grid();
    let n = grid.len();
    let c = grid.center() as isize;
    let th: Vec<f64> = (0..n).map(|j| (PI * grid.tau(j)).tanh()).collect();
    let values = par::map(n, |j| {
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..n {
            let k = j as isize - m as isize + c;
            if k < 0 || k >= n as isize {
                continue;
            }
            let k = k as usize;
            let kern = 1.0 + th[k] * th[m];
            acc += f.values()[k] * g.values()[m] * (grid.weight(m) * kern * kern);
        }
        acc * (PI / 2.0)
    });
    CriticalLineSpectrum::new(grid, values)
}

/// `f`, `Hf` and `H²f` sampled on a common grid.
#[derive(Debug, Clone)]
pub struct PointwiseFactors {
    x: Vec<f64>,
    f: Vec<Complex64>,
    hf: Vec<Complex64>,
    h2f: Vec<Complex64>,
}

impl PointwiseFactors {
    pub fn new(f: &dyn HalfLineFn, xs: &[f64], cfg: &QuadratureConfig) -> Result<Self> {
        check_xs(xs)?;
        let table = hilbert_table(f, cfg)?;
        let n = xs.len();
        Ok(Self {
            x: xs.to_vec(),
            f: par::map(n, |i| f.eval(xs[i])),
            hf: par::try_map(n, |i| hilbert(f, xs[i], cfg))?,
            h2f: par::try_map(n, |i| hilbert(&table, xs[i], cfg))?,
        })
    }

    pub fn x_grid(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[Complex64] {
        &self.f
    }

    pub fn hilbert(&self) -> &[Complex64] {
        &self.hf
    }

    pub fn hilbert2(&self) -> &[Complex64] {
        &self.h2f
    }

    /// `π²√x [fg − (2/π²) Hf·Hg + (1/π⁴) H²f·H²g]`.
    pub fn combine(&self, other: &Self) -> Result<SampledFunction> {
        if self.x != other.x {
            return Err(Error::GridMismatch("pointwise factors sampled on different grids".into()));
        }
        let p2 = PI * PI;
        let values = (0..self.x.len())
            .map(|i| {
                let bracket = self.f[i] * other.f[i] - self.hf[i] * other.hf[i] * (2.0 / p2)
                    + self.h2f[i] * other.h2f[i] / (p2 * p2);
                bracket * (p2 * self.x[i].sqrt())
            })
            .collect();
        SampledFunction::new(self.x.clone(), values)
    }
}

/// `(f*g)(x)` from the pointwise representation through `H` and `H²`.
pub fn convolve_pointwise(
    f: &dyn HalfLineFn,
    g: &dyn HalfLineFn,
    xs: &[f64],
    cfg: &QuadratureConfig,
) -> Result<ConvolutionResult> {
    let a = PointwiseFactors::new(f, xs, cfg)?;
    let b = PointwiseFactors::new(g, xs, cfg)?;
    Ok(ConvolutionResult {
        values: a.combine(&b)?,
        method: ConvolutionMethod::PointwiseTriple,
        kernel_form: KernelForm::TrigSimplified,
    })
}

/// Grid for sampled convolutions, kept inside the Hilbert table grid so
/// that the nested transform never meets the table edge.
pub fn convolution_grid() -> LogGrid {
    let t = table_grid();
    LogGrid::new(t.ln_min + 4.0, t.ln_max - 4.0, t.step).expect("valid grid")
}

/// Pointwise factors of catalog entries on the convolution grid, built once
/// per entry and shared between checks.
pub struct FactorCache {
    cfg: QuadratureConfig,
    xs: Vec<f64>,
    factors: Mutex<HashMap<&'static str, Arc<PointwiseFactors>>>,
}

impl FactorCache {
    pub fn new(cfg: &QuadratureConfig) -> Self {
        Self {
            cfg: *cfg,
            xs: convolution_grid().points(),
            factors: Mutex::new(HashMap::new()),
        }
    }

    pub fn factors(&self, entry: &'static CatalogEntry) -> Result<Arc<PointwiseFactors>> {
        if let Some(f) = self.factors.lock().expect("cache lock").get(entry.id) {
            return Ok(f.clone());
        }
        let built = Arc::new(PointwiseFactors::new(entry, &self.xs, &self.cfg)?);
        self.factors
            .lock()
            .expect("cache lock")
            .insert(entry.id, built.clone());
        Ok(built)
    }

    /// `f*g` sampled on the convolution grid.
    pub fn convolution(&self, f: &'static CatalogEntry, g: &'static CatalogEntry) -> Result<SampledFunction> {
        self.factors(f)?.combine(&*self.factors(g)?)
    }

    pub fn config(&self) -> &QuadratureConfig {
        &self.cfg
    }
}

/// Rough size of the iterated Stieltjes integral over the part of the
/// half-axis lying beyond the sampled range, assuming one log unit of mass
/// at each edge value.
fn truncation_bias(table: &SampledFunction, x: f64, cfg: &QuadratureConfig) -> f64 {
    let xs = table.x_grid();
    let vs = table.values();
    let edge = |i: usize| vs[i].norm() * xs[i] * log_kernel_unchecked(x, xs[i], cfg);
    edge(0) + edge(xs.len() - 1)
}

pub const FACTORIZATION_TOLERANCE: f64 = 1e-3;
pub const CONVOLUTION_HILBERT_TOLERANCE: f64 = 5e-3;
pub const AGREEMENT_TOLERANCE: f64 = 1e-3;
pub const TITCHMARSH_THRESHOLD: f64 = 1e-6;

/// Default abscissae for the factorization and convolution identity checks.
pub fn identity_x_grid() -> Vec<f64> {
    crate::grid::geometric(0.5, 2.0, 16).expect("valid grid")
}

fn right_side(f: &CatalogEntry, g: &CatalogEntry, xs: &[f64], cfg: &QuadratureConfig) -> Result<Vec<Complex64>> {
    par::try_map(xs.len(), |i| {
        let x = xs[i];
        Ok(stieltjes2(f, x, cfg)? * stieltjes2(g, x, cfg)? * x.sqrt())
    })
}

fn pair_id(f: &CatalogEntry, g: &CatalogEntry) -> String {
    format!("{}*{}", f.id, g.id)
}

/// `S₂(f*g)(x)` against `√x S₂f(x) S₂g(x)`, the left side taken from the
/// sampled pointwise convolution.
pub fn factorization_check(
    f: &'static CatalogEntry,
    g: &'static CatalogEntry,
    xs: &[f64],
    cache: &FactorCache,
) -> Result<VerificationReport> {
    check_xs(xs)?;
    let cfg = cache.config();
    let conv = cache.convolution(f, g)?;
    let lhs = par::try_map(xs.len(), |i| stieltjes2(&conv, xs[i], cfg))?;
    let rhs = right_side(f, g, xs, cfg)?;
    let bias = xs
        .iter()
        .zip(&rhs)
        .map(|(&x, r)| ratio(truncation_bias(&conv, x, cfg), r.norm()))
        .fold(0.0, f64::max);
    let mut report = VerificationReport::new("factorization");
    report.push(
        CaseResult::at_most(
            pair_id(f, g),
            "max_rel_error",
            max_pointwise_rel_error(&lhs, &rhs),
            FACTORIZATION_TOLERANCE + bias,
        )
        .input("f", f.id)
        .input("g", g.id)
        .input("xmin", xs[0])
        .input("xmax", xs[xs.len() - 1])
        .input("points", xs.len())
        .input("truncation_bias", bias),
    );
    Ok(report)
}

/// `H²(f*g) + π²(f*g)` against `√x S₂f S₂g`.
pub fn convolution_hilbert_check(
    f: &'static CatalogEntry,
    g: &'static CatalogEntry,
    xs: &[f64],
    cache: &FactorCache,
) -> Result<VerificationReport> {
    check_xs(xs)?;
    let cfg = cache.config();
    let conv = cache.convolution(f, g)?;
    let h_table = hilbert_table(&conv, cfg)?;
    let lhs = par::try_map(xs.len(), |i| {
        Ok(hilbert(&h_table, xs[i], cfg)? + conv.interpolate(xs[i]) * (PI * PI))
    })?;
    let rhs = right_side(f, g, xs, cfg)?;
    let mut report = VerificationReport::new("corollary2");
    report.push(
        CaseResult::at_most(
            pair_id(f, g),
            "max_rel_residual",
            max_pointwise_rel_error(&lhs, &rhs),
            CONVOLUTION_HILBERT_TOLERANCE,
        )
        .input("f", f.id)
        .input("g", g.id)
        .input("points", xs.len()),
    );
    Ok(report)
}

/// Both sides of the pointwise and the mean-square convolution bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    /// `max_x √x |(f*g)(x)|` on the sampled grid.
    pub pointwise: f64,
    /// `2π ‖sF‖ ‖sG‖`.
    pub pointwise_bound: f64,
    /// `∫ |f*g|² dx`, from the convolution spectrum.
    pub square: f64,
    /// `16π² ‖sF‖² ‖sG‖²`.
    pub square_bound: f64,
}

pub fn convolution_bounds(f: &CriticalLineSpectrum, g: &CriticalLineSpectrum, xs: &[f64]) -> Result<Bounds> {
    let conv = convolve_mb(f, g, xs, KernelForm::TrigSimplified)?;
    let pointwise = xs
        .iter()
        .zip(conv.values.values())
        .map(|(x, v)| x.sqrt() * v.norm())
        .fold(0.0, f64::max);
    let nf = f.weighted_l2_norm();
    let ng = g.weighted_l2_norm();
    let spec = convolve_spectrum(f, g)?;
    let grid = spec.grid();
    let square = (0..grid.len())
        .map(|j| grid.weight(j) * spec.values()[j].norm_sqr())
        .sum::<f64>()
        / (2.0 * PI);
    Ok(Bounds {
        pointwise,
        pointwise_bound: 2.0 * PI * nf * ng,
        square,
        square_bound: 16.0 * PI * PI * nf * nf * ng * ng,
    })
}

/// Checks both convolution bounds, each required to hold with a margin.
pub fn bounds_check(
    f: &CatalogEntry,
    g: &CatalogEntry,
    xs: &[f64],
    grid: &TauGrid,
) -> Result<VerificationReport> {
    let b = convolution_bounds(&f.spectrum(grid)?, &g.spectrum(grid)?, xs)?;
    let mut report = VerificationReport::new("bounds");
    report.push(
        CaseResult::below(
            format!("{}/pointwise", pair_id(f, g)),
            "ratio_to_bound",
            ratio(b.pointwise, b.pointwise_bound),
            1.0,
        )
        .input("f", f.id)
        .input("g", g.id)
        .input("value", b.pointwise)
        .input("bound", b.pointwise_bound),
    );
    report.push(
        CaseResult::below(
            format!("{}/mean_square", pair_id(f, g)),
            "ratio_to_bound",
            ratio(b.square, b.square_bound),
            1.0,
        )
        .input("f", f.id)
        .input("g", g.id)
        .input("value", b.square)
        .input("bound", b.square_bound),
    );
    Ok(report)
}

/// `(∫ |f*g|² dx)^{1/2}` over the sampled range, by the trapezoidal rule in
/// `ln x`.
pub fn grid_l2_norm(h: &SampledFunction) -> f64 {
    let xs = h.x_grid();
    let n = xs.len();
    (0..n.saturating_sub(1))
        .map(|i| {
            let du = (xs[i + 1] / xs[i]).ln();
            let a = h.values()[i].norm_sqr() * xs[i];
            let b = h.values()[i + 1].norm_sqr() * xs[i + 1];
            0.5 * du * (a + b)
        })
        .sum::<f64>()
        .sqrt()
}

/// Grid norm of `f*g` for two nonzero entries.
pub fn titchmarsh_norm(f: &CatalogEntry, g: &CatalogEntry, grid: &TauGrid, xs: &[f64]) -> Result<f64> {
    if f.is_zero() || g.is_zero() {
        return Err(Error::InvalidInput("both functions must be nonzero".into()));
    }
    let conv = convolve_mb(&f.spectrum(grid)?, &g.spectrum(grid)?, xs, KernelForm::TrigSimplified)?;
    Ok(grid_l2_norm(&conv.values))
}

/// Smoke test that the convolution of two nonzero entries does not vanish.
pub fn titchmarsh_sanity(f: &CatalogEntry, g: &CatalogEntry) -> Result<bool> {
    Ok(titchmarsh_norm(f, g, &TauGrid::default(), &default_x_grid())? > TITCHMARSH_THRESHOLD)
}

/// Largest relative gap between the Mellin–Barnes and pointwise forms,
/// over points where the pointwise value exceeds `1e-6`.
pub fn method_gap(mb: &SampledFunction, pointwise: &SampledFunction) -> f64 {
    mb.values()
        .iter()
        .zip(pointwise.values())
        .filter(|(_, p)| p.norm() > 1e-6)
        .map(|(m, p)| (m - p).norm() / p.norm())
        .fold(0.0, f64::max)
}
