//! Reciprocal pairs of singular integral equations on the half-axis.
//!
//! Hilbert pair (`0 < α < 1/2`):
//! `h = cos(πα) f + (sin(πα)/π) Hf`, inverted by
//! `f = cos(πα) h − (sin(πα)/π) PV∫ (x/t)^α h(t)/(t−x) dt`.
//!
//! Iterated Stieltjes pair (`0 < α < 1`):
//! `h = (cos²(πα)/π²) S₂f − (sin(2πα)/π) Hf − cos(2πα) f`, inverted by
//! `f = (cos²(πα)/π²) ∫ k(x,t) (x/t)^β h dt + (sin(2πα)/π) PV∫ (x/t)^β h/(t−x) dt − cos(2πα) h`
//! with `β = α − 1/2` and `k` the logarithmic kernel. At `α = 1/2` both maps
//! are the identity.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::catalog::CatalogEntry;
use crate::error::{Error, Result};
use crate::grid::LogGrid;
use crate::mellin::SampledFunction;
use crate::numerics::{integrate_pv, log_kernel_unchecked, HalfLineFn, QuadratureConfig};
use crate::par;
use crate::report::{rel_l2_error, CaseResult, VerificationReport};
use crate::transforms::{hilbert, hilbert_table, stieltjes2};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairKind {
    Hilbert,
    S2,
}

impl PairKind {
    pub fn name(self) -> &'static str {
        match self {
            PairKind::Hilbert => "hilbert",
            PairKind::S2 => "s2",
        }
    }

    fn check_alpha(self, alpha: f64) -> Result<()> {
        let hi = match self {
            PairKind::Hilbert => 0.5,
            PairKind::S2 => 1.0,
        };
        if alpha > 0.0 && alpha < hi {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "{} pair needs 0 < alpha < {hi}, got {alpha}",
                self.name()
            )))
        }
    }
}

impl FromStr for PairKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hilbert" => Ok(PairKind::Hilbert),
            "s2" => Ok(PairKind::S2),
            other => Err(Error::InvalidInput(format!("unknown pair {other:?}"))),
        }
    }
}

impl fmt::Display for PairKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forward" => Ok(Direction::Forward),
            "inverse" => Ok(Direction::Inverse),
            other => Err(Error::InvalidInput(format!("unknown direction {other:?}"))),
        }
    }
}

/// How the inverse of the iterated Stieltjes pair is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum S2InverseRoute {
    /// Logarithmic kernel with a power weight plus one weighted PV.
    #[default]
    LogKernel,
    /// Weighted PV plus a nested weighted Hilbert transform.
    NestedHilbert,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiePair {
    kind: PairKind,
    alpha: f64,
    direction: Direction,
}

impl SiePair {
    pub fn new(kind: PairKind, alpha: f64, direction: Direction) -> Result<Self> {
        kind.check_alpha(alpha)?;
        Ok(Self { kind, alpha, direction })
    }

    pub fn kind(&self) -> PairKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Applies the pair in its direction.
    pub fn apply(&self, f: &dyn HalfLineFn, xs: &[f64], cfg: &QuadratureConfig) -> Result<SampledFunction> {
        match self.direction {
            Direction::Forward => apply_forward(self.kind, self.alpha, f, xs, cfg),
            Direction::Inverse => apply_inverse(self.kind, self.alpha, f, xs, cfg, S2InverseRoute::default()),
        }
    }
}

fn is_identity(kind: PairKind, alpha: f64) -> bool {
    kind == PairKind::S2 && alpha == 0.5
}

/// `t ↦ (x/t)^β h(t)` for a fixed `x`.
struct Weighted<'a> {
    h: &'a dyn HalfLineFn,
    beta: f64,
    x: f64,
}

impl HalfLineFn for Weighted<'_> {
    fn eval(&self, t: f64) -> Complex64 {
        let v = self.h.eval(t);
        if v == Complex64::new(0.0, 0.0) {
            v
        } else {
            v * (self.x / t).powf(self.beta)
        }
    }

    fn support(&self) -> Option<(f64, f64)> {
        self.h.support()
    }
}

fn check_exponent(beta: f64) -> Result<()> {
    if beta > -1.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("weight exponent must lie in (-1, 1), got {beta}")))
    }
}

/// `PV ∫₀^∞ (x/t)^β h(t)/(t − x) dt` for `β ∈ (−1, 1)`.
pub fn weighted_pv(h: &dyn HalfLineFn, beta: f64, x: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    check_exponent(beta)?;
    integrate_pv(&Weighted { h, beta, x }, x, cfg)
}

/// `∫₀^∞ (ln x − ln t)/(x − t) (x/t)^β h(t) dt` for `β ∈ (−1, 1)`.
pub fn weighted_log_kernel(h: &dyn HalfLineFn, beta: f64, x: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    check_exponent(beta)?;
    stieltjes2(&Weighted { h, beta, x }, x, cfg)
}

/// `PV ∫₀^∞ (x/t)^α h(t)/(t − x) dt` for `0 < α < 1`.
pub fn weighted_hilbert(h: &dyn HalfLineFn, alpha: f64, x: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    weighted_pv(h, alpha, x, cfg)
}

/// Mellin symbol of the forward map.
pub fn forward_symbol(kind: PairKind, alpha: f64, s: Complex64) -> Complex64 {
    let a = PI * alpha;
    match kind {
        PairKind::Hilbert => (s * PI + a).sin() / (s * PI).sin(),
        PairKind::S2 => {
            let cot = (s * PI).cos() / (s * PI).sin();
            let v = a.sin() - a.cos() * cot;
            v * v
        }
    }
}

/// Mellin symbol of the inverse map.
pub fn inverse_symbol(kind: PairKind, alpha: f64, s: Complex64) -> Complex64 {
    let a = PI * alpha;
    match kind {
        PairKind::Hilbert => (s * PI).sin() / (s * PI + a).sin(),
        PairKind::S2 => {
            let v = (s * PI).sin() / (s * PI + a - PI / 2.0).sin();
            v * v
        }
    }
}

fn check_xs(xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::InvalidInput("empty x grid".into()));
    }
    Ok(())
}

/// `h` from `f`.
pub fn apply_forward(
    kind: PairKind,
    alpha: f64,
    f: &dyn HalfLineFn,
    xs: &[f64],
    cfg: &QuadratureConfig,
) -> Result<SampledFunction> {
    kind.check_alpha(alpha)?;
    cfg.validate()?;
    check_xs(xs)?;
    if is_identity(kind, alpha) {
        return SampledFunction::from_fn(f, xs);
    }
    let a = PI * alpha;
    let values = match kind {
        PairKind::Hilbert => par::try_map(xs.len(), |i| {
            let x = xs[i];
            Ok(f.eval(x) * a.cos() + hilbert(f, x, cfg)? * (a.sin() / PI))
        })?,
        PairKind::S2 => par::try_map(xs.len(), |i| {
            let x = xs[i];
            Ok(stieltjes2(f, x, cfg)? * (a.cos().powi(2) / (PI * PI))
                - hilbert(f, x, cfg)? * ((2.0 * a).sin() / PI)
                - f.eval(x) * (2.0 * a).cos())
        })?,
    };
    SampledFunction::new(xs.to_vec(), values)
}

/// `f` from `h`.
pub fn apply_inverse(
    kind: PairKind,
    alpha: f64,
    h: &dyn HalfLineFn,
    xs: &[f64],
    cfg: &QuadratureConfig,
    route: S2InverseRoute,
) -> Result<SampledFunction> {
    kind.check_alpha(alpha)?;
    cfg.validate()?;
    check_xs(xs)?;
    if is_identity(kind, alpha) {
        return SampledFunction::from_fn(h, xs);
    }
    let a = PI * alpha;
    let values = match (kind, route) {
        (PairKind::Hilbert, _) => par::try_map(xs.len(), |i| {
            let x = xs[i];
            Ok(h.eval(x) * a.cos() - weighted_pv(h, alpha, x, cfg)? * (a.sin() / PI))
        })?,
        (PairKind::S2, S2InverseRoute::LogKernel) => {
            let beta = alpha - 0.5;
            par::try_map(xs.len(), |i| {
                let x = xs[i];
                Ok(weighted_log_kernel(h, beta, x, cfg)? * (a.cos().powi(2) / (PI * PI))
                    + weighted_pv(h, beta, x, cfg)? * ((2.0 * a).sin() / PI)
                    - h.eval(x) * (2.0 * a).cos())
            })?
        }
        (PairKind::S2, S2InverseRoute::NestedHilbert) => {
            let beta = alpha - 0.5;
            // x^β H²[t^{−β} h](x)
            let scaled = Weighted { h, beta, x: 1.0 };
            let table = hilbert_table(&scaled, cfg)?;
            par::try_map(xs.len(), |i| {
                let x = xs[i];
                Ok(h.eval(x) * a.sin().powi(2)
                    + weighted_pv(h, beta, x, cfg)? * ((2.0 * a).sin() / PI)
                    + hilbert(&table, x, cfg)? * (x.powf(beta) * a.cos().powi(2) / (PI * PI)))
            })?
        }
    };
    SampledFunction::new(xs.to_vec(), values)
}

/// Intermediate grid on which one map is sampled before the other is
/// applied to its interpolant.
pub fn roundtrip_grid() -> LogGrid {
    LogGrid::new(-40.0, 40.0, 0.04).expect("valid grid")
}

pub const HILBERT_ROUNDTRIP_TOLERANCE: f64 = 1e-3;
pub const S2_ROUNDTRIP_TOLERANCE: f64 = 5e-3;
pub const IDENTITY_TOLERANCE: f64 = 1e-10;

/// Default tolerance of a round trip for a pair and exponent.
pub fn roundtrip_tolerance(kind: PairKind, alpha: f64) -> f64 {
    match kind {
        _ if is_identity(kind, alpha) => IDENTITY_TOLERANCE,
        PairKind::Hilbert => HILBERT_ROUNDTRIP_TOLERANCE,
        PairKind::S2 => S2_ROUNDTRIP_TOLERANCE,
    }
}

/// Size of the weighted integrals over the part of the axis beyond a
/// sampled range, assuming one log unit of mass at each edge value.
fn truncation_bias(kind: PairKind, alpha: f64, table: &SampledFunction, xs: &[f64]) -> f64 {
    let beta = match kind {
        PairKind::Hilbert => alpha,
        PairKind::S2 => alpha - 0.5,
    };
    let ts = table.x_grid();
    let vs = table.values();
    let edges = [0, ts.len() - 1];
    xs.iter()
        .map(|&x| {
            edges
                .iter()
                .map(|&i| {
                    let t = ts[i];
                    let weight = (x / t).powf(beta) * t;
                    let kernel = (1.0 / (t - x)).abs() + log_kernel_unchecked(x, t, &QuadratureConfig::default());
                    vs[i].norm() * weight * kernel
                })
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// Relative grid L2 errors of inverse∘forward and forward∘inverse on a
/// catalog entry.
pub fn roundtrip_check(
    kind: PairKind,
    alpha: f64,
    f: &CatalogEntry,
    xs: &[f64],
    cfg: &QuadratureConfig,
) -> Result<VerificationReport> {
    kind.check_alpha(alpha)?;
    check_xs(xs)?;
    // the identity needs no intermediate resampling
    let identity = is_identity(kind, alpha);
    let mid = if identity {
        xs.to_vec()
    } else {
        roundtrip_grid().points()
    };
    let exact: Vec<Complex64> = xs.iter().map(|&x| f.eval(x)).collect();
    let tol = roundtrip_tolerance(kind, alpha);
    let mut report = VerificationReport::new("roundtrip");
    let route = S2InverseRoute::default();

    let h = apply_forward(kind, alpha, f, &mid, cfg)?;
    let back = apply_inverse(kind, alpha, &h, xs, cfg, route)?;
    let bias = if identity { 0.0 } else { truncation_bias(kind, alpha, &h, xs) };
    report.push(
        CaseResult::at_most(
            format!("{kind}/{}/alpha={alpha}/inverse_after_forward", f.id),
            "rel_l2_error",
            rel_l2_error(back.values(), &exact),
            tol + bias,
        )
        .input("pair", kind.name())
        .input("alpha", alpha)
        .input("fn", f.id)
        .input("truncation_bias", bias),
    );

    let g = apply_inverse(kind, alpha, f, &mid, cfg, route)?;
    let again = apply_forward(kind, alpha, &g, xs, cfg)?;
    let bias = if identity { 0.0 } else { truncation_bias(kind, alpha, &g, xs) };
    report.push(
        CaseResult::at_most(
            format!("{kind}/{}/alpha={alpha}/forward_after_inverse", f.id),
            "rel_l2_error",
            rel_l2_error(again.values(), &exact),
            tol + bias,
        )
        .input("pair", kind.name())
        .input("alpha", alpha)
        .input("fn", f.id)
        .input("truncation_bias", bias),
    );
    Ok(report)
}
