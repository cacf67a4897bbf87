//! Laplace, Stieltjes, iterated Stieltjes, Hilbert and iterated Hilbert
//! transforms, by direct quadrature or through Mellin multipliers.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::catalog::CatalogEntry;
use crate::error::{Error, Result};
use crate::grid::LogGrid;
use crate::mellin::{mellin_inverse, mellin_inverse_at, CriticalLineSpectrum, SampledFunction};
use crate::numerics::{integrate_log, integrate_pv, log_kernel_unchecked, HalfLineFn, QuadratureConfig};
use crate::par;
use crate::report::{max_rel_error, CaseResult, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    Laplace,
    Stieltjes,
    Stieltjes2,
    Hilbert,
    Hilbert2,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 5] = [
        OperatorKind::Laplace,
        OperatorKind::Stieltjes,
        OperatorKind::Stieltjes2,
        OperatorKind::Hilbert,
        OperatorKind::Hilbert2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Laplace => "laplace",
            OperatorKind::Stieltjes => "stieltjes",
            OperatorKind::Stieltjes2 => "s2",
            OperatorKind::Hilbert => "hilbert",
            OperatorKind::Hilbert2 => "hilbert2",
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "laplace" => Ok(OperatorKind::Laplace),
            "stieltjes" => Ok(OperatorKind::Stieltjes),
            "s2" | "stieltjes2" => Ok(OperatorKind::Stieltjes2),
            "hilbert" => Ok(OperatorKind::Hilbert),
            "hilbert2" => Ok(OperatorKind::Hilbert2),
            other => Err(Error::InvalidInput(format!("unknown operator {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Route {
    #[default]
    DirectQuadrature,
    MellinMultiplier,
}

impl FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Route::DirectQuadrature),
            "mellin" => Ok(Route::MellinMultiplier),
            other => Err(Error::InvalidInput(format!("unknown route {other:?}"))),
        }
    }
}

/// An operator together with the way it is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OperatorTag {
    kind: OperatorKind,
    route: Route,
}

impl OperatorTag {
    pub fn new(kind: OperatorKind, route: Route) -> Result<Self> {
        if kind == OperatorKind::Laplace && route == Route::MellinMultiplier {
            return Err(Error::RouteUnavailable(
                "the Laplace transform has no critical-line multiplier".into(),
            ));
        }
        Ok(Self { kind, route })
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn route(&self) -> Route {
        self.route
    }
}

/// Mellin multiplier of an operator at `s = 1/2 + iτ`.
pub fn multiplier(kind: OperatorKind, tau: f64) -> Result<Complex64> {
    let c = (PI * tau).cosh();
    let th = (PI * tau).tanh();
    Ok(match kind {
        OperatorKind::Laplace => {
            return Err(Error::RouteUnavailable(
                "the Laplace transform has no critical-line multiplier".into(),
            ))
        }
        OperatorKind::Stieltjes => Complex64::new(PI / c, 0.0),
        OperatorKind::Stieltjes2 => Complex64::new(PI * PI / (c * c), 0.0),
        // π cot(π/2 + iπτ) = −iπ tanh(πτ)
        OperatorKind::Hilbert => Complex64::new(0.0, -PI * th),
        OperatorKind::Hilbert2 => Complex64::new(-PI * PI * th * th, 0.0),
    })
}

/// Ratio between a sampled range edge and the nearest tabulated pole.
const TABLE_MARGIN: f64 = std::f64::consts::E;

/// Grid on which inner transforms are tabulated before a second pass.
pub fn table_grid() -> LogGrid {
    LogGrid::wide()
}

fn check_x(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("abscissa must be positive, got {x}")))
    }
}

/// `∫ k(x, t) f(t) dt` with the sweep centred on `t = x`; `k` receives
/// `(t, v)` with `t = x e^v` and already includes the Jacobian `t`.
fn integrate_around<K>(f: &dyn HalfLineFn, x: f64, cfg: &QuadratureConfig, k: K) -> Result<Complex64>
where
    K: Fn(f64, f64) -> f64,
{
    cfg.validate()?;
    check_x(x)?;
    integrate_log(
        &|v: f64| {
            let t = x * v.exp();
            f.eval(t) * k(t, v)
        },
        x.ln(),
        f64::NEG_INFINITY,
        f64::INFINITY,
        cfg,
        2,
    )
}

/// `∫₀^∞ e^{−xt} f(t) dt`.
pub fn laplace(f: &dyn HalfLineFn, x: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    laplace_of(&|t| f.eval(t), x, cfg)
}

fn laplace_of<G: Fn(f64) -> Complex64>(f: &G, x: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    cfg.validate()?;
    check_x(x)?;
    let c = 1.0 / x;
    integrate_log(
        &|v: f64| {
            let t = c * v.exp();
            let w = (-x * t).exp() * t;
            if w == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                f(t) * w
            }
        },
        c.ln(),
        f64::NEG_INFINITY,
        f64::INFINITY,
        cfg,
        2,
    )
}

/// `∫₀^∞ f(t)/(x + t) dt`.
pub fn stieltjes(f: &dyn HalfLineFn, x: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    integrate_around(f, x, cfg, |_, v| {
        let e = v.exp();
        e / (1.0 + e)
    })
}

/// `∫₀^∞ (ln x − ln t)/(x − t) f(t) dt` by direct quadrature.
pub fn stieltjes2(f: &dyn HalfLineFn, x: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    integrate_around(f, x, cfg, |t, _| log_kernel_unchecked(x, t, cfg) * t)
}

/// `S(Sf)` evaluated as the Laplace transform of the Laplace transform.
pub fn stieltjes_as_iterated_laplace(f: &dyn HalfLineFn, x: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    let failure = RefCell::new(None);
    let inner = |u: f64| match laplace(f, u, cfg) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            Complex64::new(f64::NAN, 0.0)
        }
    };
    let outer = laplace_of(&inner, x, cfg);
    match failure.into_inner() {
        Some(e) => Err(e),
        None => outer,
    }
}

/// `PV ∫₀^∞ f(t)/(t − x) dt`.
pub fn hilbert(f: &dyn HalfLineFn, x: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    integrate_pv(f, x, cfg)
}

/// `Hf` sampled on a log grid, for use as the inner transform of a
/// nested principal value.
/// For sampled input the table stops one log unit inside the data range,
/// where the zero extension would otherwise put a jump next to the pole.
pub fn hilbert_table_on(f: &dyn HalfLineFn, grid: &LogGrid, cfg: &QuadratureConfig) -> Result<SampledFunction> {
    let mut xs = grid.points();
    if let Some((lo, hi)) = f.support() {
        xs.retain(|&x| x >= lo * TABLE_MARGIN && x <= hi / TABLE_MARGIN);
        if xs.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "sampled range [{lo:e}, {hi:e}] is too narrow to tabulate a Hilbert transform"
            )));
        }
    }
    let values = par::try_map(xs.len(), |i| hilbert(f, xs[i], cfg))?;
    SampledFunction::new(xs, values)
}

pub fn hilbert_table(f: &dyn HalfLineFn, cfg: &QuadratureConfig) -> Result<SampledFunction> {
    hilbert_table_on(f, &table_grid(), cfg)
}

/// `H(Hf)(x)`, the inner transform tabulated and interpolated.
pub fn hilbert2(f: &dyn HalfLineFn, x: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    check_x(x)?;
    let table = hilbert_table(f, cfg)?;
    hilbert(&table, x, cfg)
}

fn spectral(kind: OperatorKind, spec: &CriticalLineSpectrum, x: f64) -> Result<Complex64> {
    check_x(x)?;
    multiplier(kind, 0.0)?;
    let weighted = spec.multiply(|tau| multiplier(kind, tau).expect("multiplier exists"));
    Ok(mellin_inverse_at(&weighted, x))
}

/// `(1/2π) ∫ π²/cosh²(πτ) f*(1/2+iτ) x^{−1/2−iτ} dτ`.
pub fn stieltjes2_spectral(spec: &CriticalLineSpectrum, x: f64) -> Result<Complex64> {
    spectral(OperatorKind::Stieltjes2, spec, x)
}

/// Iterated Hilbert transform through the multiplier `π² cot²(πs)`.
pub fn hilbert2_spectral(spec: &CriticalLineSpectrum, x: f64) -> Result<Complex64> {
    spectral(OperatorKind::Hilbert2, spec, x)
}

/// Applies an operator on a grid by direct quadrature.
pub fn apply_direct(kind: OperatorKind, f: &dyn HalfLineFn, xs: &[f64], cfg: &QuadratureConfig) -> Result<SampledFunction> {
    cfg.validate()?;
    for &x in xs {
        check_x(x)?;
    }
    let values = match kind {
        OperatorKind::Laplace => par::try_map(xs.len(), |i| laplace(f, xs[i], cfg))?,
        OperatorKind::Stieltjes => par::try_map(xs.len(), |i| stieltjes(f, xs[i], cfg))?,
        OperatorKind::Stieltjes2 => par::try_map(xs.len(), |i| stieltjes2(f, xs[i], cfg))?,
        OperatorKind::Hilbert => par::try_map(xs.len(), |i| hilbert(f, xs[i], cfg))?,
        OperatorKind::Hilbert2 => {
            let table = hilbert_table(f, cfg)?;
            par::try_map(xs.len(), |i| hilbert(&table, xs[i], cfg))?
        }
    };
    SampledFunction::new(xs.to_vec(), values)
}

/// Applies an operator on a grid through its Mellin multiplier.
pub fn apply_spectral(kind: OperatorKind, spec: &CriticalLineSpectrum, xs: &[f64]) -> Result<SampledFunction> {
    multiplier(kind, 0.0)?;
    let weighted = spec.multiply(|tau| multiplier(kind, tau).expect("multiplier exists"));
    mellin_inverse(&weighted, xs)
}

/// Applies a tagged operator; the multiplier route needs a spectrum.
pub fn apply(
    tag: OperatorTag,
    f: &dyn HalfLineFn,
    spec: Option<&CriticalLineSpectrum>,
    xs: &[f64],
    cfg: &QuadratureConfig,
) -> Result<SampledFunction> {
    match tag.route {
        Route::DirectQuadrature => apply_direct(tag.kind, f, xs, cfg),
        Route::MellinMultiplier => {
            let spec = spec.ok_or_else(|| {
                Error::RouteUnavailable(format!("{} by multiplier needs a spectrum", tag.kind))
            })?;
            apply_spectral(tag.kind, spec, xs)
        }
    }
}

/// Compares `(1/2πi) ∫ cot(πs) F(s) x^{−s} ds` with `(1/π) Hf(x)` on a grid,
/// `hf` supplying the reference Hilbert transform.
pub fn hilbert_multiplier_check(
    spec: &CriticalLineSpectrum,
    hf: &dyn HalfLineFn,
    xs: &[f64],
    tolerance: f64,
) -> Result<VerificationReport> {
    let weighted = spec.multiply(|tau| Complex64::new(0.0, -(PI * tau).tanh()));
    let lhs = mellin_inverse(&weighted, xs)?;
    let rhs: Vec<Complex64> = xs.iter().map(|&x| hf.eval(x) / PI).collect();
    let mut report = VerificationReport::new("multiplier");
    report.push(
        CaseResult::at_most("hilbert_multiplier", "max_rel_error", max_rel_error(lhs.values(), &rhs), tolerance)
            .input("points", xs.len()),
    );
    Ok(report)
}

pub const SQUARED_HILBERT_TOLERANCE: f64 = 1e-4;

/// Normalized residual of `H²f = S₂f − π² f` on a grid.
pub fn squared_hilbert_residual(entry: &CatalogEntry, xs: &[f64], cfg: &QuadratureConfig) -> Result<VerificationReport> {
    if !entry.conditions.sf_in_l2.holds {
        return Err(Error::InvalidInput(format!(
            "{} does not have a square-integrable weighted spectrum",
            entry.id
        )));
    }
    let h2 = apply_direct(OperatorKind::Hilbert2, entry, xs, cfg)?;
    let s2 = apply_direct(OperatorKind::Stieltjes2, entry, xs, cfg)?;
    let residual = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let s = s2.values()[i];
            (h2.values()[i] - s + PI * PI * entry.value(x)).norm() / (1.0 + s.norm())
        })
        .fold(0.0, f64::max);
    let mut report = VerificationReport::new("cor1");
    report.push(
        CaseResult::at_most(entry.id, "max_normalized_residual", residual, SQUARED_HILBERT_TOLERANCE)
            .input("fn", entry.id)
            .input("points", xs.len()),
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::get;
    use crate::grid::{default_x_grid, geometric, TauGrid};
    use crate::numerics::real_fn;
    use proptest::prelude::*;
    use std::f64::consts::E;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn cauchy() -> impl HalfLineFn {
        real_fn(|t| 1.0 / (1.0 + t))
    }

    #[test]
    fn laplace_examples() {
        let c = cfg();
        assert!((laplace(&real_fn(|t| (-t).exp()), 1.0, &c).unwrap().re - 0.5).abs() < 1e-10);
        assert_eq!(laplace(&real_fn(|_| 0.0), 1.0, &c).unwrap().norm(), 0.0);
        assert!((laplace(&real_fn(|_| 1.0), 2.0, &c).unwrap().re - 0.5).abs() < 1e-10);
        assert!(laplace(&cauchy(), 0.0, &c).is_err());
    }

    #[test]
    fn stieltjes_examples() {
        let c = cfg();
        assert!((stieltjes(&cauchy(), 2.0, &c).unwrap().re - std::f64::consts::LN_2).abs() < 1e-9);
        assert!((stieltjes(&cauchy(), 1.0, &c).unwrap().re - 1.0).abs() < 1e-9);
        assert_eq!(stieltjes(&real_fn(|_| 0.0), 3.0, &c).unwrap().norm(), 0.0);
    }

    #[test]
    fn stieltjes2_examples() {
        let c = cfg();
        let q = PI * PI / 4.0;
        assert!((stieltjes2(&cauchy(), 1.0, &c).unwrap().re - q).abs() < 1e-8);
        let spec = get("cauchy").unwrap().spectrum(&TauGrid::default()).unwrap();
        assert!((stieltjes2_spectral(&spec, 1.0).unwrap().re - q).abs() < 1e-10);
        assert_eq!(stieltjes2(&real_fn(|_| 0.0), 1.0, &c).unwrap().norm(), 0.0);
        let d = stieltjes2(&cauchy(), 2.0, &c).unwrap();
        let s = stieltjes2_spectral(&spec, 2.0).unwrap();
        assert!((d - s).norm() < 1e-6);
        assert!((d.re - 1.725_009_569_167_926_7).abs() < 1e-8);
    }

    #[test]
    fn iterated_laplace_examples() {
        let c = cfg();
        let v = stieltjes_as_iterated_laplace(&cauchy(), 2.0, &c).unwrap();
        assert!((v.re - std::f64::consts::LN_2).abs() < 1e-7);
        assert_eq!(stieltjes_as_iterated_laplace(&real_fn(|_| 0.0), 2.0, &c).unwrap().norm(), 0.0);
        let e = stieltjes_as_iterated_laplace(&real_fn(|t| (-t).exp()), 1.0, &c).unwrap();
        assert!((e.re - 0.596_347_362_323_194_1).abs() < 1e-7);
    }

    #[test]
    fn iterated_laplace_matches_stieltjes() {
        let c = cfg();
        for id in ["exp", "cauchy2", "gauss_log"] {
            let f = get(id).unwrap();
            for &x in &[0.3, 1.0, 4.0] {
                let a = stieltjes_as_iterated_laplace(f, x, &c).unwrap();
                let b = stieltjes(f, x, &c).unwrap();
                assert!((a - b).norm() <= 1e-6 * b.norm(), "{id} x={x}");
            }
        }
    }

    #[test]
    fn hilbert_examples() {
        let c = cfg();
        assert!(hilbert(&cauchy(), 1.0, &c).unwrap().norm() < 1e-10);
        let v = hilbert(&cauchy(), E, &c).unwrap();
        assert!((v.re + 0.268_941_421_369_995_1).abs() < 1e-9);
        assert_eq!(hilbert(&real_fn(|_| 0.0), 2.0, &c).unwrap().norm(), 0.0);
    }

    #[test]
    fn hilbert2_examples() {
        let c = cfg();
        let f = get("cauchy").unwrap();
        let xs = [1.0, 2.0];
        let h2 = apply_direct(OperatorKind::Hilbert2, f, &xs, &c).unwrap();
        assert!((h2.values()[0].re + PI * PI / 4.0).abs() < 1e-6);
        let s2 = stieltjes2(f, 2.0, &c).unwrap();
        assert!((h2.values()[1] - (s2 - PI * PI * f.value(2.0))).norm() < 1e-4);
        let z = apply_direct(OperatorKind::Hilbert2, get("zero").unwrap(), &xs, &c).unwrap();
        assert!(z.values().iter().all(|v| v.norm() == 0.0));
        let spec = f.spectrum(&TauGrid::default()).unwrap();
        assert!((hilbert2_spectral(&spec, 1.0).unwrap().re + PI * PI / 4.0).abs() < 1e-10);
    }

    #[test]
    fn multiplier_route_matches_direct() {
        let c = cfg();
        let grid = TauGrid::default();
        let xs = geometric(0.1, 10.0, 16).unwrap();
        for id in ["cauchy", "exp"] {
            let f = get(id).unwrap();
            let spec = f.spectrum(&grid).unwrap();
            for kind in [OperatorKind::Stieltjes, OperatorKind::Stieltjes2, OperatorKind::Hilbert] {
                let d = apply_direct(kind, f, &xs, &c).unwrap();
                let m = apply_spectral(kind, &spec, &xs).unwrap();
                let err = max_rel_error(m.values(), d.values());
                assert!(err < 1e-6, "{id} {kind}: {err}");
            }
        }
    }

    #[test]
    fn laplace_has_no_multiplier_route() {
        assert!(matches!(
            OperatorTag::new(OperatorKind::Laplace, Route::MellinMultiplier),
            Err(Error::RouteUnavailable(_))
        ));
        let tag = OperatorTag::new(OperatorKind::Stieltjes2, Route::MellinMultiplier).unwrap();
        assert!(matches!(
            apply(tag, &cauchy(), None, &[1.0], &cfg()),
            Err(Error::RouteUnavailable(_))
        ));
    }

    #[test]
    fn operator_names_round_trip() {
        for k in OperatorKind::ALL {
            assert_eq!(k.name().parse::<OperatorKind>().unwrap(), k);
        }
        assert!("fourier".parse::<OperatorKind>().is_err());
    }

    #[test]
    fn hilbert_multiplier_examples() {
        let grid = TauGrid::default();
        let xs = default_x_grid();
        let c = get("cauchy").unwrap();
        let hf = real_fn(c.known.hilbert.unwrap());
        let r = hilbert_multiplier_check(&c.spectrum(&grid).unwrap(), &hf, &xs, 1e-5).unwrap();
        assert!(r.passed(), "{:?}", r.cases);
        let z = hilbert_multiplier_check(&CriticalLineSpectrum::zeros(grid), &real_fn(|_| 0.0), &xs, 1e-5).unwrap();
        assert_eq!(z.max_value(), 0.0);
        let c2 = get("cauchy2").unwrap();
        let pv = apply_direct(OperatorKind::Hilbert, c2, &xs, &cfg()).unwrap();
        let r = hilbert_multiplier_check(&c2.spectrum(&grid).unwrap(), &pv, &xs, 1e-4).unwrap();
        assert!(r.passed(), "{:?}", r.cases);
    }

    #[test]
    fn squared_hilbert_examples() {
        let xs = default_x_grid();
        for id in ["cauchy", "exp", "zero"] {
            let r = squared_hilbert_residual(get(id).unwrap(), &xs, &cfg()).unwrap();
            assert!(r.passed(), "{id}: {:?}", r.cases);
            if id == "zero" {
                assert_eq!(r.max_value(), 0.0);
            }
        }
    }

    #[test]
    fn dilation_covariance() {
        let c = cfg();
        let f = get("exp").unwrap();
        let g = real_fn(|t| (-2.0 * t).exp());
        for &x in &[0.2, 1.0, 3.0] {
            for kind in [OperatorKind::Stieltjes, OperatorKind::Stieltjes2, OperatorKind::Hilbert] {
                let op = |h: &dyn HalfLineFn, y: f64| match kind {
                    OperatorKind::Stieltjes => stieltjes(h, y, &c),
                    OperatorKind::Stieltjes2 => stieltjes2(h, y, &c),
                    _ => hilbert(h, y, &c),
                };
                let a = op(&g, x).unwrap();
                let b = op(f, 2.0 * x).unwrap();
                assert!((a - b).norm() <= 1e-6 * b.norm().max(1e-3), "{kind} x={x}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn real_input_gives_real_output(x in 0.1f64..10.0, which in 0usize..4) {
            let f = get(["cauchy", "exp", "cauchy2", "gauss_log"][which]).unwrap();
            let c = cfg();
            for v in [
                laplace(f, x, &c).unwrap(),
                stieltjes(f, x, &c).unwrap(),
                stieltjes2(f, x, &c).unwrap(),
                hilbert(f, x, &c).unwrap(),
            ] {
                prop_assert!(v.im.abs() <= 1e-9);
            }
        }

        #[test]
        fn multipliers_are_hermitian(tau in -20.0f64..20.0) {
            for kind in [OperatorKind::Stieltjes, OperatorKind::Stieltjes2, OperatorKind::Hilbert, OperatorKind::Hilbert2] {
                let a = multiplier(kind, tau).unwrap();
                let b = multiplier(kind, -tau).unwrap();
                prop_assert!((a - b.conj()).norm() == 0.0);
            }
        }
    }
}
