//! Inversion of the iterated Stieltjes transform on the critical line.
//!
//! The spectrum of `G = S₂f` is `π²/cosh²(πτ) f*`; multiplying by
//! `Φ = cosh²(πτ)/π²` undoes it, and the even partial sums `Pₙ` of `Φ`
//! realize the differential-operator series without differentiating data.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mellin::{mellin_inverse, CriticalLineSpectrum, SampledFunction};
use crate::numerics::HalfLineFn;
use crate::report::rel_l2_error;

/// Largest |τ| at which `Φ` is evaluated.
pub const PHI_TAU_LIMIT: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InversionConfig {
    /// Truncation order of the `Pₙ` series.
    pub n_terms: usize,
    /// Spectral values with `|τ| > tau_cap` are discarded.
    pub tau_cap: f64,
    /// Relative error level of the input spectrum.
    pub noise_floor: f64,
    /// Accuracy the reconstruction is asked to meet.
    pub target_tol: f64,
}

impl Default for InversionConfig {
    fn default() -> Self {
        Self {
            n_terms: 60,
            tau_cap: 3.0,
            noise_floor: 1e-12,
            target_tol: 1e-4,
        }
    }
}

impl InversionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau_cap > 0.0) || !(self.noise_floor >= 0.0) || !(self.target_tol > 0.0) {
            return Err(Error::InvalidInput(format!("invalid inversion settings {self:?}")));
        }
        let amplification = phi_multiplier(self.tau_cap)?;
        if amplification * self.noise_floor > self.target_tol {
            return Err(Error::IllConditioned(format!(
                "Φ({}) = {amplification:.3e} amplifies noise {:.1e} beyond {:.1e}; lower tau_cap",
                self.tau_cap, self.noise_floor, self.target_tol
            )));
        }
        Ok(())
    }
}

/// `Φ(1/2 + iτ) = (1 + cosh 2πτ)/(2π²)`.
pub fn phi_multiplier(tau: f64) -> Result<f64> {
    if !(tau.abs() <= PHI_TAU_LIMIT) {
        return Err(Error::Overflow(format!("Φ(τ) requested at |τ| = {} > {PHI_TAU_LIMIT}", tau.abs())));
    }
    Ok((1.0 + (2.0 * PI * tau.abs()).cosh()) / (2.0 * PI * PI))
}

/// `(1/π²)[1 + ½ Σ_{k=1..n} (2πτ)^{2k}/(2k)!]`.
pub fn pn_multiplier(tau: f64, n: usize) -> f64 {
    let z2 = (2.0 * PI * tau).powi(2);
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 0..n {
        let k = k as f64;
        term *= z2 / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
        sum += term;
    }
    (1.0 + 0.5 * sum) / (PI * PI)
}

/// Multiplier `π²/cosh²(πτ)` of the iterated Stieltjes transform.
pub fn s2_multiplier(tau: f64) -> f64 {
    let c = (PI * tau).cosh();
    PI * PI / (c * c)
}

/// Spectrum with values beyond the cap or below the noise floor removed.
fn reliable(g: &CriticalLineSpectrum, cfg: &InversionConfig) -> CriticalLineSpectrum {
    let peak = g.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let floor = cfg.noise_floor * peak;
    let capped = g.truncated(cfg.tau_cap);
    let values = capped
        .values()
        .iter()
        .map(|v| if v.norm() < floor { Complex64::new(0.0, 0.0) } else { *v })
        .collect();
    CriticalLineSpectrum::new(*g.grid(), values).expect("same grid")
}

/// `Φ·G*` on `|τ| ≤ tau_cap`, the recovered `f*`.
pub fn recovered_spectrum(g: &CriticalLineSpectrum, cfg: &InversionConfig) -> Result<CriticalLineSpectrum> {
    cfg.validate()?;
    let kept = reliable(g, cfg);
    let grid = *kept.grid();
    let values = (0..grid.len())
        .map(|j| {
            let v = kept.values()[j];
            if v == Complex64::new(0.0, 0.0) {
                Ok(v)
            } else {
                Ok(v * phi_multiplier(grid.tau(j))?)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    CriticalLineSpectrum::new(grid, values)
}

/// Recovers `f` from the spectrum of `S₂f` by the exact multiplier.
pub fn invert_spectral(g: &CriticalLineSpectrum, cfg: &InversionConfig, xs: &[f64]) -> Result<SampledFunction> {
    mellin_inverse(&recovered_spectrum(g, cfg)?, xs)
}

/// Partial reconstruction `fₙ` through `Pₙ` in place of `Φ`.
pub fn invert_series(
    g: &CriticalLineSpectrum,
    n: usize,
    cfg: &InversionConfig,
    xs: &[f64],
) -> Result<SampledFunction> {
    cfg.validate()?;
    let kept = reliable(g, cfg).multiply(|tau| Complex64::new(pn_multiplier(tau, n), 0.0));
    mellin_inverse(&kept, xs)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub n: usize,
    pub l2_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceProfile {
    pub points: Vec<ProfilePoint>,
    /// Errors never grow with `n` beyond rounding.
    pub monotone: bool,
    /// Error at the largest `n`.
    pub plateau: f64,
}

/// Relative grid L2 error of `fₙ` against a reference, for `n = 0..=n_max`.
pub fn convergence_profile(
    g: &CriticalLineSpectrum,
    reference: &dyn HalfLineFn,
    xs: &[f64],
    n_max: usize,
    cfg: &InversionConfig,
) -> Result<ConvergenceProfile> {
    let want: Vec<Complex64> = xs.iter().map(|&x| reference.eval(x)).collect();
    let points = (0..=n_max)
        .map(|n| {
            let got = invert_series(g, n, cfg, xs)?;
            Ok(ProfilePoint {
                n,
                l2_error: rel_l2_error(got.values(), &want),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let monotone = points
        .windows(2)
        .all(|w| w[1].l2_error <= w[0].l2_error * (1.0 + 1e-9) + 1e-15);
    let plateau = points.last().map_or(0.0, |p| p.l2_error);
    Ok(ConvergenceProfile {
        points,
        monotone,
        plateau,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::get;
    use crate::grid::{default_x_grid, TauGrid};
    use proptest::prelude::*;

    fn s2_spectrum(id: &str) -> CriticalLineSpectrum {
        get(id)
            .unwrap()
            .spectrum(&TauGrid::default())
            .unwrap()
            .multiply(|tau| Complex64::new(s2_multiplier(tau), 0.0))
    }

    fn error_against(id: &str, got: &SampledFunction) -> f64 {
        let f = get(id).unwrap();
        let want: Vec<Complex64> = got.x_grid().iter().map(|&x| f.eval(x)).collect();
        rel_l2_error(got.values(), &want)
    }

    #[test]
    fn phi_examples() {
        assert!((phi_multiplier(0.0).unwrap() - 0.101_321_183_642_337_78).abs() < 1e-16);
        assert!((phi_multiplier(1.0).unwrap() - 13.614_869_986_789_201).abs() < 1e-12);
        assert_eq!(phi_multiplier(-2.5).unwrap(), phi_multiplier(2.5).unwrap());
        assert!(matches!(phi_multiplier(101.0), Err(Error::Overflow(_))));
        assert!(phi_multiplier(f64::NAN).is_err());
    }

    #[test]
    fn pn_examples() {
        for n in [0, 1, 7, 60] {
            assert_eq!(pn_multiplier(0.0, n), 1.0 / (PI * PI));
        }
        assert!((pn_multiplier(1.0, 1) - 1.101_321_183_642_337_8).abs() < 1e-15);
        assert!((pn_multiplier(1.0, 60) - phi_multiplier(1.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn ill_conditioned_settings_are_refused() {
        let cfg = InversionConfig {
            tau_cap: 8.0,
            ..InversionConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::IllConditioned(_))));
        assert!(InversionConfig::default().validate().is_ok());
        assert!(InversionConfig { tau_cap: 0.0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn zero_spectrum_inverts_to_zero() {
        let z = CriticalLineSpectrum::zeros(TauGrid::default());
        let xs = default_x_grid();
        let cfg = InversionConfig::default();
        assert!(invert_spectral(&z, &cfg, &xs).unwrap().values().iter().all(|v| v.norm() == 0.0));
        for n in [0, 5] {
            assert!(invert_series(&z, n, &cfg, &xs).unwrap().values().iter().all(|v| v.norm() == 0.0));
        }
        let p = convergence_profile(&z, get("zero").unwrap(), &xs, 4, &cfg).unwrap();
        assert!(p.points.iter().all(|q| q.l2_error == 0.0));
    }

    #[test]
    fn cauchy_is_recovered() {
        let got = invert_spectral(&s2_spectrum("cauchy"), &InversionConfig::default(), &default_x_grid()).unwrap();
        assert!(error_against("cauchy", &got) <= 1e-4);
    }

    #[test]
    fn truncation_bias_shrinks_with_the_cap() {
        let g = s2_spectrum("exp");
        let xs = default_x_grid();
        let errs: Vec<f64> = [2.0, 3.0, 5.0]
            .iter()
            .map(|&cap| {
                let cfg = InversionConfig {
                    tau_cap: cap,
                    noise_floor: 1e-17,
                    ..Default::default()
                };
                error_against("exp", &invert_spectral(&g, &cfg, &xs).unwrap())
            })
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2]);
        assert!(errs[2] < 3e-4);
    }

    #[test]
    fn series_meets_spectral_route_at_large_n() {
        let g = s2_spectrum("exp");
        let xs = default_x_grid();
        let cfg = InversionConfig::default();
        let a = invert_series(&g, 60, &cfg, &xs).unwrap();
        let b = invert_spectral(&g, &cfg, &xs).unwrap();
        assert!(rel_l2_error(a.values(), b.values()) < 1e-6);
    }

    #[test]
    fn zeroth_order_is_scaled_input() {
        let g = s2_spectrum("exp");
        let xs = default_x_grid();
        let f0 = invert_series(&g, 0, &InversionConfig::default(), &xs).unwrap();
        let gx = mellin_inverse(&g.scale(Complex64::new(1.0 / (PI * PI), 0.0)), &xs).unwrap();
        assert!(rel_l2_error(f0.values(), gx.values()) < 1e-8);
    }

    #[test]
    fn profile_decreases_and_tracks_the_cap() {
        let g = s2_spectrum("exp");
        let xs = default_x_grid();
        let f = get("exp").unwrap();
        let p3 = convergence_profile(&g, f, &xs, 60, &InversionConfig::default()).unwrap();
        assert!(p3.monotone);
        assert!(p3.points[0].l2_error > p3.plateau);
        let p2 = convergence_profile(&g, f, &xs, 60, &InversionConfig { tau_cap: 2.0, ..Default::default() }).unwrap();
        assert!(p2.plateau > p3.plateau);
    }

    #[test]
    fn forward_multiplier_restores_the_band() {
        let g = s2_spectrum("exp");
        let cfg = InversionConfig::default();
        let back = recovered_spectrum(&g, &cfg)
            .unwrap()
            .multiply(|tau| Complex64::new(s2_multiplier(tau), 0.0));
        let grid = g.grid();
        for j in 0..grid.len() {
            if grid.tau(j).abs() <= cfg.tau_cap {
                assert!((back.values()[j] - g.values()[j]).norm() <= 1e-8 * g.values()[j].norm());
            }
        }
    }

    proptest! {
        #[test]
        fn phi_inverts_the_s2_multiplier(tau in -30.0f64..30.0) {
            prop_assert!((phi_multiplier(tau).unwrap() * s2_multiplier(tau) - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn pn_is_monotone_and_bounded(tau in -4.0f64..4.0, n in 0usize..80) {
            let a = pn_multiplier(tau, n);
            let b = pn_multiplier(tau, n + 1);
            let phi = phi_multiplier(tau).unwrap();
            prop_assert!(a <= b);
            prop_assert!(b <= phi * (1.0 + 1e-14));
        }
    }
}
