use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::TauGrid;

/// Values `f*(1/2 + iτ)` of a Mellin transform on a symmetric τ grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalLineSpectrum {
    grid: TauGrid,
    values: Vec<Complex64>,
}

impl CriticalLineSpectrum {
    pub fn new(grid: TauGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "τ grid has {} points but {} values were given",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: TauGrid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Evaluates `m(s)` at `s = 1/2 + iτ` for every grid τ.
    pub fn from_closed_form<M>(grid: TauGrid, m: M) -> Result<Self>
    where
        M: Fn(Complex64) -> Result<Complex64>,
    {
        let values = (0..grid.len())
            .map(|j| m(Complex64::new(0.5, grid.tau(j))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &TauGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "τ grids differ: {:?} vs {:?}",
                self.grid, other.grid
            )))
        }
    }

    /// Largest `|F(−τ) − conj F(τ)|` over the grid.
    pub fn hermitian_defect(&self) -> f64 {
        (0..self.len())
            .map(|j| (self.values[self.grid.mirror(j)] - self.values[j].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Pointwise product with a multiplier `m(τ)`.
    pub fn multiply<M: Fn(f64) -> Complex64>(&self, m: M) -> Self {
        let values = (0..self.len())
            .map(|j| self.values[j] * m(self.grid.tau(j)))
            .collect();
        Self {
            grid: self.grid,
            values,
        }
    }

    /// Zeroes every value with `|τ| > cap`.
    pub fn truncated(&self, cap: f64) -> Self {
        let values = (0..self.len())
            .map(|j| {
                if self.grid.tau(j).abs() > cap {
                    Complex64::new(0.0, 0.0)
                } else {
                    self.values[j]
                }
            })
            .collect();
        Self {
            grid: self.grid,
            values,
        }
    }

    pub fn scale(&self, k: Complex64) -> Self {
        self.multiply(|_| k)
    }

    /// `(∫ |(1/2 + iτ) F(τ)|² dτ)^{1/2}` by the trapezoidal rule.
    pub fn weighted_l2_norm(&self) -> f64 {
        (0..self.len())
            .map(|j| {
                let s = Complex64::new(0.5, self.grid.tau(j));
                self.grid.weight(j) * (s * self.values[j]).norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }
}
