//! Abscissa grids: geometric x grids, uniform log grids and the symmetric
//! τ grid on the critical line.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `n` geometrically spaced points from `xmin` to `xmax` inclusive.
pub fn geometric(xmin: f64, xmax: f64, n: usize) -> Result<Vec<f64>> {
    if !(xmin > 0.0 && xmax > xmin && xmax.is_finite()) || n < 2 {
        return Err(Error::InvalidInput(format!(
            "grid needs 0 < xmin < xmax and n ≥ 2, got {xmin},{xmax},{n}"
        )));
    }
    let (a, b) = (xmin.ln(), xmax.ln());
    let h = (b - a) / (n - 1) as f64;
    let mut xs: Vec<f64> = (0..n).map(|i| (a + h * i as f64).exp()).collect();
    xs[0] = xmin;
    xs[n - 1] = xmax;
    Ok(xs)
}

/// The default analysis grid: 64 geometric points on [0.1, 10].
pub fn default_x_grid() -> Vec<f64> {
    geometric(0.1, 10.0, 64).expect("static grid")
}

/// Uniform grid in `ln x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogGrid {
    pub ln_min: f64,
    pub ln_max: f64,
    pub step: f64,
}

impl LogGrid {
    pub fn new(ln_min: f64, ln_max: f64, step: f64) -> Result<Self> {
        if !(ln_max > ln_min && step > 0.0 && step < ln_max - ln_min) {
            return Err(Error::InvalidInput(format!(
                "log grid needs ln_min < ln_max and 0 < step, got {ln_min},{ln_max},{step}"
            )));
        }
        Ok(Self { ln_min, ln_max, step })
    }

    /// `ln x ∈ [−40, 40]` at step 0.02: wide enough that every catalog
    /// function and its transforms are negligible past the ends.
    pub fn wide() -> Self {
        Self {
            ln_min: -40.0,
            ln_max: 40.0,
            step: 0.02,
        }
    }

    pub fn len(&self) -> usize {
        ((self.ln_max - self.ln_min) / self.step).round() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| (self.ln_min + self.step * i as f64).exp())
            .collect()
    }
}

/// Symmetric uniform grid `τ_j = (j − m)·Δτ`, `j = 0..2m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauGrid {
    half: usize,
    step: f64,
}

impl Default for TauGrid {
    fn default() -> Self {
        Self::new(20.0, 0.05).expect("static grid")
    }
}

impl TauGrid {
    pub fn new(tau_max: f64, step: f64) -> Result<Self> {
        if !(tau_max > 0.0 && step > 0.0 && step <= tau_max && tau_max.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "τ grid needs 0 < step ≤ tau_max, got {tau_max},{step}"
            )));
        }
        Ok(Self {
            half: (tau_max / step).round() as usize,
            step,
        })
    }

    /// Recovers the grid from explicit abscissae, which must be symmetric,
    /// uniform and contain zero.
    pub fn from_taus(taus: &[f64]) -> Result<Self> {
        let n = taus.len();
        if n < 3 || n % 2 == 0 {
            return Err(Error::InvalidInput(format!(
                "τ grid must have an odd number (≥ 3) of points, got {n}"
            )));
        }
        let half = n / 2;
        let step = (taus[n - 1] - taus[0]) / (n - 1) as f64;
        let grid = Self { half, step };
        for (j, &t) in taus.iter().enumerate() {
            if (t - grid.tau(j)).abs() > 1e-9 * step.max(1.0) {
                return Err(Error::InvalidInput(format!(
                    "τ grid is not symmetric and uniform at index {j} (τ={t})"
                )));
            }
        }
        Ok(grid)
    }

    pub fn len(&self) -> usize {
        2 * self.half + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn tau_max(&self) -> f64 {
        self.half as f64 * self.step
    }

    /// Index of τ = 0.
    pub fn center(&self) -> usize {
        self.half
    }

    pub fn tau(&self, j: usize) -> f64 {
        (j as f64 - self.half as f64) * self.step
    }

    pub fn taus(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.tau(j)).collect()
    }

    /// Index of −τ_j.
    pub fn mirror(&self, j: usize) -> usize {
        self.len() - 1 - j
    }

    /// Trapezoidal weight at index `j`.
    pub fn weight(&self, j: usize) -> f64 {
        if j == 0 || j + 1 == self.len() {
            0.5 * self.step
        } else {
            self.step
        }
    }

    pub fn same_as(&self, other: &TauGrid) -> bool {
        self.half == other.half && (self.step - other.step).abs() <= 1e-12 * self.step
    }
}
