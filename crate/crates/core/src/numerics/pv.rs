use num_complex::Complex64;

use super::{integrate_log, HalfLineFn, QuadratureConfig};
use crate::error::{Error, Result};

/// Poles below this fraction of a sampled function's first abscissa are refused.
const MIN_POLE_FRACTION: f64 = 1e-3;

fn check_pole(f: &dyn HalfLineFn, pole: f64) -> Result<()> {
    if !(pole > 0.0) || !pole.is_finite() {
        return Err(Error::InvalidInput(format!(
            "principal value needs a positive pole, got {pole}"
        )));
    }
    if let Some((x0, _)) = f.support() {
        if pole < MIN_POLE_FRACTION * x0 {
            return Err(Error::InvalidInput(format!(
                "pole {pole:e} lies below the sampled range starting at {x0:e}"
            )));
        }
    }
    Ok(())
}

/// `t/(t − x)` at `t = x e^v`, finite for large `|v|`.
fn pole_jacobian(v: f64) -> f64 {
    if v > 0.0 {
        -1.0 / (-v).exp_m1()
    } else {
        v.exp() / v.exp_m1()
    }
}

/// `∫ (f(t) − f(x))/(t − x) dt` over the symmetric window
/// `[x(1−w), x(1+w)]`, `w = pv_window_factor`.
pub fn pv_window_term(f: &dyn HalfLineFn, pole: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    cfg.validate()?;
    check_pole(f, pole)?;
    window(f, pole, f.eval(pole), cfg)
}

fn window(f: &dyn HalfLineFn, x: f64, fx: Complex64, cfg: &QuadratureConfig) -> Result<Complex64> {
    let w = cfg.pv_window_factor;
    let lo = if w >= 1.0 { f64::NEG_INFINITY } else { (-w).ln_1p() };
    let hi = w.ln_1p();
    // t = x·e^v, dt/(t−x) = e^v/expm1(v) dv
    integrate_log(
        &|v: f64| {
            if v == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            (f.eval(x * v.exp()) - fx) * pole_jacobian(v)
        },
        x.ln(),
        lo,
        hi,
        cfg,
        2,
    )
}

/// Cauchy principal value `PV ∫₀^∞ f(t)/(t − pole) dt`.
///
/// Inside the window the pole value is subtracted, since the pure pole
/// integrates to zero over a symmetric interval; outside it the integrand is
/// regular and is swept to zero and to infinity.
pub fn integrate_pv(f: &dyn HalfLineFn, pole: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    cfg.validate()?;
    check_pole(f, pole)?;
    let x = pole;
    let fx = f.eval(x);
    let inner = window(f, x, fx, cfg)?;
    let w = cfg.pv_window_factor;
    let ln_x = x.ln();
    let outer = |v: f64| f.eval(x * v.exp()) * pole_jacobian(v);
    let right = integrate_log(&outer, ln_x, w.ln_1p(), f64::INFINITY, cfg, 2)?;
    let left = if w < 1.0 {
        integrate_log(&outer, ln_x, f64::NEG_INFINITY, (-w).ln_1p(), cfg, 2)?
    } else {
        Complex64::new(0.0, 0.0)
    };
    Ok(inner + right + left)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::real_fn;
    use approx::assert_relative_eq;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn cauchy_hilbert(x: f64) -> f64 {
        -x.ln() / (1.0 + x)
    }

    #[test]
    fn pole_at_one_gives_zero() {
        let v = integrate_pv(&real_fn(|t| 1.0 / (1.0 + t)), 1.0, &cfg()).unwrap();
        assert!(v.norm() < 1e-10);
    }

    #[test]
    fn pole_at_e() {
        let v = integrate_pv(&real_fn(|t| 1.0 / (1.0 + t)), std::f64::consts::E, &cfg()).unwrap();
        assert_relative_eq!(v.re, -0.268_941_421_369_995_1, epsilon = 1e-9);
    }

    #[test]
    fn zero_numerator() {
        let v = integrate_pv(&real_fn(|_| 0.0), 3.0, &cfg()).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn nonpositive_pole_is_rejected() {
        assert!(integrate_pv(&real_fn(|t| t), 0.0, &cfg()).is_err());
        assert!(integrate_pv(&real_fn(|t| t), -2.0, &cfg()).is_err());
    }

    #[test]
    fn constant_numerator_window_is_zero() {
        for &x in &[0.01, 1.0, 50.0] {
            let v = pv_window_term(&real_fn(|_| 1.0), x, &cfg()).unwrap();
            assert!(v.norm() < cfg().abs_tol);
        }
    }

    #[test]
    fn narrow_window_agrees_with_default() {
        let narrow = QuadratureConfig {
            pv_window_factor: 0.3,
            ..cfg()
        };
        for &x in &[0.2, 1.7, 9.0] {
            let a = integrate_pv(&real_fn(|t| 1.0 / (1.0 + t)), x, &narrow).unwrap();
            assert_relative_eq!(a.re, cauchy_hilbert(x), epsilon = 1e-9);
        }
    }

    #[test]
    fn cauchy_hilbert_across_scales() {
        for &x in &[1e-3, 0.1, 0.5, 2.0, 10.0, 1e4] {
            let v = integrate_pv(&real_fn(|t| 1.0 / (1.0 + t)), x, &cfg()).unwrap();
            assert!((v.re - cauchy_hilbert(x)).abs() < 1e-9 * (1.0 + cauchy_hilbert(x).abs()), "x={x}");
        }
    }
}
