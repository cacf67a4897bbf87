//! Mellin calculus on the critical line `Re s = 1/2`.
//!
//! Forward transforms of closed-form functions go through the quadrature
//! engine in log coordinates; forward transforms of sampled data and all
//! inversions use the trapezoidal rule in `ln x` and `τ` respectively,
//! which is spectrally accurate for the smooth, decaying data handled here.

mod sampled;
mod spectrum;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::TauGrid;
use crate::numerics::{integrate_log, HalfLineFn, QuadratureConfig};
use crate::par;

pub use sampled::{Interpolation, SampledFunction};
pub use spectrum::CriticalLineSpectrum;

/// Relative edge magnitude of `|f| x^{1/2}` above which zero extension is
/// flagged as truncating mass.
const TRUNCATION_FLAG: f64 = 1e-10;

/// `f*(1/2 + iτ) = ∫₀^∞ f(t) t^{−1/2 + iτ} dt` at every grid τ.
pub fn mellin_forward(
    f: &dyn HalfLineFn,
    grid: &TauGrid,
    cfg: &QuadratureConfig,
) -> Result<CriticalLineSpectrum> {
    cfg.validate()?;
    let values = par::try_map(grid.len(), |j| mellin_at(f, grid.tau(j), cfg))?;
    CriticalLineSpectrum::new(*grid, values)
}

/// `f*(1/2 + iτ)` at one τ.
pub fn mellin_at(f: &dyn HalfLineFn, tau: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    // t = e^v: f(t) t^{s-1} dt = f(e^v) e^{v/2} e^{iτv} dv
    integrate_log(
        &|v: f64| f.eval(v.exp()) * ((0.5 * v).exp() * Complex64::cis(tau * v)),
        0.0,
        f64::NEG_INFINITY,
        f64::INFINITY,
        cfg,
        2,
    )
}

/// Spectrum of sampled data together with a zero-extension warning.
#[derive(Debug, Clone)]
pub struct SampledSpectrum {
    pub spectrum: CriticalLineSpectrum,
    /// Set when the samples at either end still carry non-negligible mass.
    pub truncation_warning: bool,
}

/// Mellin transform of sampled data by the trapezoidal rule in `ln x`,
/// with zero extension outside the sampled range.
pub fn mellin_forward_sampled(f: &SampledFunction, grid: &TauGrid) -> SampledSpectrum {
    let xs = f.x_grid();
    let n = xs.len();
    let us: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let weighted: Vec<Complex64> = (0..n)
        .map(|i| {
            let left = if i > 0 { us[i] - us[i - 1] } else { 0.0 };
            let right = if i + 1 < n { us[i + 1] - us[i] } else { 0.0 };
            f.values()[i] * (0.5 * (left + right) * (0.5 * us[i]).exp())
        })
        .collect();
    let values = par::map(grid.len(), |j| {
        let tau = grid.tau(j);
        weighted
            .iter()
            .zip(&us)
            .map(|(w, &u)| w * Complex64::cis(tau * u))
            .sum()
    });
    let mass: Vec<f64> = (0..n)
        .map(|i| f.values()[i].norm() * xs[i].sqrt())
        .collect();
    let peak = mass.iter().cloned().fold(0.0, f64::max);
    let truncation_warning = peak > 0.0 && mass[0].max(mass[n - 1]) > TRUNCATION_FLAG * peak;
    SampledSpectrum {
        spectrum: CriticalLineSpectrum::new(*grid, values).expect("length matches grid"),
        truncation_warning,
    }
}

/// `(1/2π) ∫ F(τ) x^{−1/2−iτ} dτ` at one abscissa.
pub fn mellin_inverse_at(spec: &CriticalLineSpectrum, x: f64) -> Complex64 {
    let g = spec.grid();
    let lx = x.ln();
    let sum: Complex64 = (0..g.len())
        .map(|j| spec.values()[j] * Complex64::cis(-g.tau(j) * lx) * g.weight(j))
        .sum();
    sum * (x.powf(-0.5) / (2.0 * PI))
}

/// Inverse Mellin transform sampled on `xs`.
pub fn mellin_inverse(spec: &CriticalLineSpectrum, xs: &[f64]) -> Result<SampledFunction> {
    if xs.is_empty() {
        return Err(Error::InvalidInput("empty x grid".into()));
    }
    let values = par::map(xs.len(), |i| mellin_inverse_at(spec, xs[i]));
    SampledFunction::new(xs.to_vec(), values)
}

/// The two sides of Parseval's equality of squares:
/// `(∫₀^∞ |f|² dx, (1/2π) ∫ |F|² dτ)`.
pub fn parseval_l2(f: &SampledFunction, spec: &CriticalLineSpectrum) -> (f64, f64) {
    let xs = f.x_grid();
    let n = xs.len();
    let us: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    // ∫ |f|² dx = ∫ |f(e^u)|² e^u du
    let left: f64 = (0..n)
        .map(|i| {
            let lw = if i > 0 { us[i] - us[i - 1] } else { 0.0 };
            let rw = if i + 1 < n { us[i + 1] - us[i] } else { 0.0 };
            0.5 * (lw + rw) * f.values()[i].norm_sqr() * xs[i]
        })
        .sum();
    let g = spec.grid();
    let right: f64 = (0..g.len())
        .map(|j| g.weight(j) * spec.values()[j].norm_sqr())
        .sum::<f64>()
        / (2.0 * PI);
    (left, right)
}

/// Right side of the generalized Parseval identity,
/// `(1/2π) ∫ F(1/2+iτ) G(1/2−iτ) x^{−1/2−iτ} dτ`, which equals
/// `∫₀^∞ f(xt) g(t) dt`.
pub fn parseval_pairing(
    f: &CriticalLineSpectrum,
    g: &CriticalLineSpectrum,
    x: f64,
) -> Result<Complex64> {
    f.check_same_grid(g)?;
    if !(x > 0.0) {
        return Err(Error::InvalidInput(format!("x must be positive, got {x}")));
    }
    let grid = f.grid();
    let lx = x.ln();
    let sum: Complex64 = (0..grid.len())
        .map(|j| {
            f.values()[j]
                * g.values()[grid.mirror(j)]
                * Complex64::cis(-grid.tau(j) * lx)
                * grid.weight(j)
        })
        .sum();
    Ok(sum * (x.powf(-0.5) / (2.0 * PI)))
}
