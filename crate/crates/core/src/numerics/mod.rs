//! Quadrature engine for integrals over the half-axis.
//!
//! Every integral over `(0, ∞)` is taken in log coordinates `t = c·e^v`,
//! swept outward from `v = 0` in unit panels and refined adaptively with a
//! 21-point Gauss–Kronrod rule. Principal values subtract the value at the
//! pole over a symmetric window, so the singular part integrates to zero
//! analytically.

mod kronrod;
mod pv;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) use kronrod::integrate_log;
pub use pv::{integrate_pv, pv_window_term};

/// Tolerances and policies for the quadrature engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// A sweep direction stops once a panel carries less than this fraction
    /// of the absolute mass accumulated so far.
    pub tail_cut: f64,
    /// Half-width of the principal-value window, as a multiple of the pole.
    pub pv_window_factor: f64,
    /// Relative distance `|t−x|/x` below which the log kernel uses its series.
    pub sing_series_delta: f64,
    /// Maximum bisection depth for a single panel.
    pub max_depth: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            tail_cut: 1e-14,
            pv_window_factor: 1.0,
            sing_series_delta: 1e-3,
            max_depth: 40,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.abs_tol > 0.0
            && self.rel_tol > 0.0
            && self.tail_cut > 0.0
            && self.sing_series_delta > 0.0
            && self.sing_series_delta < 0.5
            && self.pv_window_factor > 0.0
            && self.pv_window_factor <= 1.0
            && self.max_depth >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "quadrature config violates its invariants: {self:?}"
            )))
        }
    }

    /// A copy with both tolerances replaced.
    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }
}

/// Asymptotic behaviour of an integrand as `t → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum DecayHint {
    /// `|f(t)| = O(t^{-p})`.
    Algebraic(f64),
    Exponential,
    #[default]
    Unknown,
}

/// A complex-valued function on `(0, ∞)`.
pub trait HalfLineFn: Sync {
    fn eval(&self, t: f64) -> Complex64;

    fn decay_hint(&self) -> DecayHint {
        DecayHint::Unknown
    }

    /// Range of abscissae carrying data, for sampled functions. Principal
    /// values are refused at poles far below it.
    fn support(&self) -> Option<(f64, f64)> {
        None
    }
}

impl<F> HalfLineFn for F
where
    F: Fn(f64) -> Complex64 + Sync,
{
    fn eval(&self, t: f64) -> Complex64 {
        self(t)
    }
}

/// A closure tagged with its decay behaviour.
pub struct Integrand<F> {
    f: F,
    decay: DecayHint,
}

impl<F> Integrand<F>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    pub fn new(f: F) -> Self {
        Self {
            f,
            decay: DecayHint::Unknown,
        }
    }

    pub fn with_decay(f: F, decay: DecayHint) -> Self {
        Self { f, decay }
    }
}

impl<F> HalfLineFn for Integrand<F>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    fn eval(&self, t: f64) -> Complex64 {
        (self.f)(t)
    }

    fn decay_hint(&self) -> DecayHint {
        self.decay
    }
}

/// Wraps a real closure as a [`HalfLineFn`].
pub fn real_fn<F>(f: F) -> impl HalfLineFn
where
    F: Fn(f64) -> f64 + Sync,
{
    move |t: f64| Complex64::new(f(t), 0.0)
}

/// `∫₀^∞ f(t) dt`.
pub fn integrate_halfaxis(f: &dyn HalfLineFn, cfg: &QuadratureConfig) -> Result<Complex64> {
    cfg.validate()?;
    let quiet = match f.decay_hint() {
        DecayHint::Algebraic(p) if p <= 1.0 => {
            return Err(Error::InvalidInput(format!(
                "integrand decays like t^-{p}, not integrable at infinity"
            )))
        }
        DecayHint::Exponential => 1,
        _ => 2,
    };
    integrate_log(
        &|v: f64| {
            let t = v.exp();
            f.eval(t) * t
        },
        0.0,
        f64::NEG_INFINITY,
        f64::INFINITY,
        cfg,
        quiet,
    )
}

/// `(ln x − ln t)/(x − t)`, with its removable singularity at `t = x`
/// filled in by the series `(1/x)·Σ (−u)^k/(k+1)`, `u = (t−x)/x`.
pub fn log_kernel(x: f64, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(x > 0.0 && t > 0.0) || !x.is_finite() || !t.is_finite() {
        return Err(Error::InvalidInput(format!(
            "log kernel needs positive arguments, got x={x}, t={t}"
        )));
    }
    Ok(log_kernel_unchecked(x, t, cfg))
}

#[inline]
pub(crate) fn log_kernel_unchecked(x: f64, t: f64, cfg: &QuadratureConfig) -> f64 {
    let u = (t - x) / x;
    if u.abs() < cfg.sing_series_delta {
        let stop = cfg.abs_tol.max(0.5 * f64::EPSILON);
        let mut sum = 1.0;
        let mut power = 1.0;
        let mut k = 1.0;
        loop {
            power *= -u;
            let term = power / (k + 1.0);
            sum += term;
            if term.abs() <= stop * sum.abs() {
                break;
            }
            k += 1.0;
        }
        sum / x
    } else {
        (x.ln() - t.ln()) / (x - t)
    }
}
