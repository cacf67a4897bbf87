//! Closed-form test functions with exact Mellin transforms.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gamma::gamma;
use crate::grid::{default_x_grid, TauGrid};
use crate::mellin::{mellin_at, CriticalLineSpectrum};
use crate::numerics::{DecayHint, HalfLineFn, QuadratureConfig};
use crate::report::{max_rel_error, CaseResult, VerificationReport};
use crate::transforms::{self, OperatorKind};

/// A hypothesis flag together with the reason it holds (or fails).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Condition {
    pub holds: bool,
    pub justification: &'static str,
}

/// Integrability hypotheses on the critical line and the real axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conditions {
    /// `s f*(s)` square integrable on `Re s = 1/2`.
    pub sf_in_l2: Condition,
    /// `s f*(s)` integrable on `Re s = 1/2`.
    pub sf_in_l1: Condition,
    pub f_in_l2: Condition,
}

impl Conditions {
    /// Whether the entry may enter convolution checks.
    pub fn convolution_ready(&self) -> bool {
        self.sf_in_l2.holds && self.sf_in_l1.holds
    }
}

/// Exact transforms available for an entry.
#[derive(Debug, Clone, Copy, Default)]
pub struct KnownTransforms {
    pub laplace: Option<fn(f64) -> f64>,
    pub stieltjes: Option<fn(f64) -> f64>,
    pub stieltjes2: Option<fn(f64) -> f64>,
    pub hilbert: Option<fn(f64) -> f64>,
    pub hilbert2: Option<fn(f64) -> f64>,
}

impl KnownTransforms {
    pub fn get(&self, kind: OperatorKind) -> Option<fn(f64) -> f64> {
        match kind {
            OperatorKind::Laplace => self.laplace,
            OperatorKind::Stieltjes => self.stieltjes,
            OperatorKind::Stieltjes2 => self.stieltjes2,
            OperatorKind::Hilbert => self.hilbert,
            OperatorKind::Hilbert2 => self.hilbert2,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub formula: &'static str,
    f: fn(f64) -> f64,
    mellin: fn(Complex64) -> Result<Complex64>,
    decay: DecayHint,
    pub known: KnownTransforms,
    pub conditions: Conditions,
}

impl CatalogEntry {
    pub fn value(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    /// Exact `f*(s)`.
    pub fn mellin(&self, s: Complex64) -> Result<Complex64> {
        (self.mellin)(s)
    }

    /// Exact spectrum on a τ grid.
    pub fn spectrum(&self, grid: &TauGrid) -> Result<CriticalLineSpectrum> {
        CriticalLineSpectrum::from_closed_form(*grid, self.mellin)
    }

    pub fn is_zero(&self) -> bool {
        self.id == "zero"
    }
}

impl HalfLineFn for CatalogEntry {
    fn eval(&self, t: f64) -> Complex64 {
        Complex64::new((self.f)(t), 0.0)
    }

    fn decay_hint(&self) -> DecayHint {
        self.decay
    }
}

const SQUARE_DECAY: Condition = Condition {
    holds: true,
    justification: "|s f*(s)| decays exponentially in |τ| on the line",
};

fn pi_over_sin(s: Complex64) -> Complex64 {
    PI / (s * PI).sin()
}

/// `ln(x)/(x − 1)`, equal to 1 at x = 1.
fn log_ratio(x: f64) -> f64 {
    let u = x - 1.0;
    if u == 0.0 {
        1.0
    } else {
        u.ln_1p() / u
    }
}

/// `(x − 1 − ln x)/(x − 1)²`, equal to 1/2 at x = 1.
fn log_ratio2(x: f64) -> f64 {
    let u = x - 1.0;
    if u.abs() < 1e-3 {
        // Σ (−u)^k/(k+2)
        (0..8).rev().fold(0.0, |acc, k| acc * -u + 1.0 / (k as f64 + 2.0))
    } else {
        (u - u.ln_1p()) / (u * u)
    }
}

static ENTRIES: [CatalogEntry; 5] = [
    CatalogEntry {
        id: "cauchy",
        formula: "1/(1+t)",
        f: |t| 1.0 / (1.0 + t),
        mellin: |s| Ok(pi_over_sin(s)),
        decay: DecayHint::Algebraic(1.0),
        known: KnownTransforms {
            laplace: None,
            stieltjes: Some(log_ratio),
            stieltjes2: Some(|x| {
                let l = x.ln();
                (l * l + PI * PI) / (2.0 * (1.0 + x))
            }),
            hilbert: Some(|x| -x.ln() / (1.0 + x)),
            hilbert2: Some(|x| {
                let l = x.ln();
                (l * l - PI * PI) / (2.0 * (1.0 + x))
            }),
        },
        conditions: Conditions {
            sf_in_l2: SQUARE_DECAY,
            sf_in_l1: Condition {
                holds: true,
                justification: "|s π/sin(πs)| = π|s|/cosh(πτ) is integrable",
            },
            f_in_l2: Condition {
                holds: true,
                justification: "∫ dt/(1+t)² = 1",
            },
        },
    },
    CatalogEntry {
        id: "exp",
        formula: "exp(-t)",
        f: |t| (-t).exp(),
        mellin: gamma,
        decay: DecayHint::Exponential,
        known: KnownTransforms {
            laplace: Some(|x| 1.0 / (1.0 + x)),
            stieltjes: None,
            stieltjes2: None,
            hilbert: None,
            hilbert2: None,
        },
        conditions: Conditions {
            sf_in_l2: SQUARE_DECAY,
            sf_in_l1: Condition {
                holds: true,
                justification: "|Γ(s+1)| ~ √(2π)|τ| e^{−π|τ|/2} is integrable",
            },
            f_in_l2: Condition {
                holds: true,
                justification: "∫ e^{−2t} dt = 1/2",
            },
        },
    },
    CatalogEntry {
        id: "cauchy2",
        formula: "1/(1+t)^2",
        f: |t| 1.0 / ((1.0 + t) * (1.0 + t)),
        mellin: |s| Ok((1.0 - s) * pi_over_sin(s)),
        decay: DecayHint::Algebraic(2.0),
        known: KnownTransforms {
            laplace: None,
            stieltjes: Some(log_ratio2),
            stieltjes2: None,
            hilbert: Some(|x| -x.ln() / ((1.0 + x) * (1.0 + x)) - 1.0 / (1.0 + x)),
            hilbert2: None,
        },
        conditions: Conditions {
            sf_in_l2: SQUARE_DECAY,
            sf_in_l1: Condition {
                holds: true,
                justification: "|s(1−s)| π/cosh(πτ) is integrable",
            },
            f_in_l2: Condition {
                holds: true,
                justification: "∫ dt/(1+t)⁴ = 1/3",
            },
        },
    },
    CatalogEntry {
        id: "gauss_log",
        formula: "exp(-(ln t)^2)",
        f: |t| {
            let l = t.ln();
            (-l * l).exp()
        },
        mellin: |s| Ok(PI.sqrt() * (s * s / 4.0).exp()),
        decay: DecayHint::Unknown,
        known: KnownTransforms::NONE,
        conditions: Conditions {
            sf_in_l2: Condition {
                holds: true,
                justification: "|s f*(s)| ~ |τ| e^{−τ²/4} is square integrable",
            },
            sf_in_l1: Condition {
                holds: true,
                justification: "|s f*(s)| ~ |τ| e^{−τ²/4} is integrable",
            },
            f_in_l2: Condition {
                holds: true,
                justification: "∫ e^{−2(ln t)²} dt = √(π/2) e^{1/8}",
            },
        },
    },
    CatalogEntry {
        id: "zero",
        formula: "0",
        f: |_| 0.0,
        mellin: |_| Ok(Complex64::new(0.0, 0.0)),
        decay: DecayHint::Exponential,
        known: KnownTransforms {
            laplace: Some(|_| 0.0),
            stieltjes: Some(|_| 0.0),
            stieltjes2: Some(|_| 0.0),
            hilbert: Some(|_| 0.0),
            hilbert2: Some(|_| 0.0),
        },
        conditions: Conditions {
            sf_in_l2: Condition {
                holds: true,
                justification: "zero spectrum",
            },
            sf_in_l1: Condition {
                holds: true,
                justification: "zero spectrum",
            },
            f_in_l2: Condition {
                holds: true,
                justification: "zero function",
            },
        },
    },
];

impl KnownTransforms {
    pub const NONE: Self = Self {
        laplace: None,
        stieltjes: None,
        stieltjes2: None,
        hilbert: None,
        hilbert2: None,
    };
}

pub fn entries() -> &'static [CatalogEntry] {
    &ENTRIES
}

pub fn get(id: &str) -> Result<&'static CatalogEntry> {
    ENTRIES
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::UnknownEntry(id.to_string()))
}

/// Ordered pairs of nonzero entries that satisfy the convolution hypotheses,
/// each unordered pair listed once.
pub fn convolution_pairs() -> Vec<(&'static CatalogEntry, &'static CatalogEntry)> {
    let ready: Vec<_> = ENTRIES
        .iter()
        .filter(|e| !e.is_zero() && e.conditions.convolution_ready())
        .collect();
    let mut pairs = Vec::new();
    for (i, a) in ready.iter().enumerate() {
        for b in &ready[i..] {
            pairs.push((*a, *b));
        }
    }
    pairs
}

/// τ values at which catalog Mellin transforms are checked by quadrature.
pub const MELLIN_CHECK_TAUS: [f64; 3] = [0.0, 1.0, 5.0];
pub const MELLIN_TOLERANCE: f64 = 1e-8;
pub const TRANSFORM_TOLERANCE: f64 = 1e-6;

fn relative(got: Complex64, want: Complex64) -> f64 {
    let d = (got - want).norm();
    if d == 0.0 {
        0.0
    } else {
        d / want.norm()
    }
}

/// Checks an entry's closed forms against quadrature.
pub fn verify_entry(id: &str, cfg: &QuadratureConfig) -> Result<VerificationReport> {
    let entry = get(id)?;
    let mut report = VerificationReport::new("catalog");
    for &tau in &MELLIN_CHECK_TAUS {
        let s = Complex64::new(0.5, tau);
        let got = mellin_at(entry, tau, cfg)?;
        let want = entry.mellin(s)?;
        report.push(
            CaseResult::at_most(format!("{id}/mellin"), "rel_error", relative(got, want), MELLIN_TOLERANCE)
                .input("fn", id)
                .input("tau", tau),
        );
    }
    let xs = default_x_grid();
    for kind in OperatorKind::ALL {
        let Some(exact) = entry.known.get(kind) else {
            continue;
        };
        let got = transforms::apply_direct(kind, entry, &xs, cfg)?;
        let want: Vec<Complex64> = xs.iter().map(|&x| Complex64::new(exact(x), 0.0)).collect();
        report.push(
            CaseResult::at_most(
                format!("{id}/{}", kind.name()),
                "max_rel_error",
                max_rel_error(got.values(), &want),
                TRANSFORM_TOLERANCE,
            )
            .input("fn", id)
            .input("points", xs.len()),
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate_halfaxis;
    use proptest::prelude::*;

    #[test]
    fn lookup() {
        let c = get("cauchy").unwrap();
        assert_eq!(c.value(1.0), 0.5);
        assert!((c.mellin(Complex64::new(0.5, 0.0)).unwrap().re - PI).abs() < 1e-15);
        assert!((c.known.hilbert.unwrap()(std::f64::consts::E) + 0.268_941_421_369_995_1).abs() < 1e-15);
        assert_eq!(c.known.stieltjes.unwrap()(1.0), 1.0);
        let e = get("exp").unwrap();
        assert!((e.mellin(Complex64::new(0.5, 0.0)).unwrap().re - PI.sqrt()).abs() < 1e-13);
        let z = get("zero").unwrap();
        assert_eq!(z.mellin(Complex64::new(0.5, 3.0)).unwrap(), Complex64::new(0.0, 0.0));
        assert!(matches!(get("nope"), Err(Error::UnknownEntry(_))));
    }

    #[test]
    fn every_flag_is_justified() {
        for e in entries() {
            for c in [e.conditions.sf_in_l2, e.conditions.sf_in_l1, e.conditions.f_in_l2] {
                assert!(!c.justification.is_empty(), "{}", e.id);
            }
        }
    }

    #[test]
    fn closed_forms_against_references() {
        let c2 = get("cauchy2").unwrap();
        let h = c2.known.hilbert.unwrap();
        assert!((h(0.5) + 0.358_601_253_084_468_75).abs() < 1e-15);
        assert!((h(2.0) + 0.410_349_686_728_882_8).abs() < 1e-15);
        let s = c2.known.stieltjes.unwrap();
        assert_eq!(s(1.0), 0.5);
        assert!((s(1.0 + 1e-4) - s(1.0 - 1e-4)).abs() < 1e-4);
        assert!((s(1.0005) - (0.0005 - 0.0005f64.ln_1p()) / 0.0005f64.powi(2)).abs() < 1e-9);
        let c = get("cauchy").unwrap();
        assert!((c.known.stieltjes2.unwrap()(1.0) - PI * PI / 4.0).abs() < 1e-15);
        assert!((c.known.stieltjes2.unwrap()(2.0) - 1.725_009_569_167_926_7).abs() < 1e-14);
    }

    #[test]
    fn gauss_log_square_norm() {
        let g = get("gauss_log").unwrap();
        let sq = integrate_halfaxis(&|t: f64| Complex64::new(g.value(t).powi(2), 0.0), &QuadratureConfig::default()).unwrap();
        assert!((sq.re - 1.420_190_975_905_843_1).abs() < 1e-9);
    }

    #[test]
    fn square_integrability_is_stable_under_doubling() {
        for e in entries() {
            let norm = |tmax: f64| e.spectrum(&TauGrid::new(tmax, 0.05).unwrap()).unwrap().weighted_l2_norm();
            assert!((norm(20.0) - norm(40.0)).abs() <= 1e-8 * norm(40.0).max(1.0), "{}", e.id);
        }
    }

    #[test]
    fn convolution_pairs_skip_zero() {
        let pairs = convolution_pairs();
        assert_eq!(pairs.len(), 10);
        assert!(pairs.iter().all(|(a, b)| !a.is_zero() && !b.is_zero()));
    }

    #[test]
    fn zero_entry_verifies_exactly() {
        let r = verify_entry("zero", &QuadratureConfig::default()).unwrap();
        assert!(r.passed());
        assert_eq!(r.max_value(), 0.0);
    }

    #[test]
    fn exp_and_cauchy_verify() {
        let cfg = QuadratureConfig::default();
        for id in ["exp", "cauchy", "cauchy2", "gauss_log"] {
            let r = verify_entry(id, &cfg).unwrap();
            assert!(r.passed(), "{id}: {:#?}", r.cases);
        }
    }

    proptest! {
        #[test]
        fn spectra_are_hermitian(tau in 0.0f64..20.0) {
            for e in entries() {
                let a = e.mellin(Complex64::new(0.5, tau)).unwrap();
                let b = e.mellin(Complex64::new(0.5, -tau)).unwrap();
                prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1e-300));
            }
        }
    }
}
