use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::HalfLineFn;
use crate::par;

/// Interpolation scheme between samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Interpolation {
    /// Natural cubic spline in `(ln x, value)`, zero outside the sampled range.
    #[default]
    CubicInLogX,
}

/// Values of a function on a strictly increasing positive grid.
#[derive(Debug, Clone)]
pub struct SampledFunction {
    x: Vec<f64>,
    values: Vec<Complex64>,
    interp: Interpolation,
    spline: LogSpline,
}

impl SampledFunction {
    pub fn new(x: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if x.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "{} abscissae but {} values",
                x.len(),
                values.len()
            )));
        }
        if x.len() < 2 {
            return Err(Error::InvalidInput("a sampled function needs at least two points".into()));
        }
        if x.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidInput("abscissae must be positive and finite".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("abscissae must be strictly increasing".into()));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidInput("sample values must be finite".into()));
        }
        let spline = LogSpline::new(&x, &values);
        Ok(Self {
            x,
            values,
            interp: Interpolation::CubicInLogX,
            spline,
        })
    }

    /// Samples `f` on `xs`.
    pub fn from_fn(f: &dyn HalfLineFn, xs: &[f64]) -> Result<Self> {
        let values = par::map(xs.len(), |i| f.eval(xs[i]));
        Self::new(xs.to_vec(), values)
    }

    /// Samples a fallible evaluator on `xs`.
    pub fn try_from_fn<F>(xs: &[f64], f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<Complex64> + Sync + Send,
    {
        let values = par::try_map(xs.len(), |i| f(xs[i]))?;
        Self::new(xs.to_vec(), values)
    }

    pub fn zeros(xs: &[f64]) -> Result<Self> {
        Self::new(xs.to_vec(), vec![Complex64::new(0.0, 0.0); xs.len()])
    }

    pub fn x_grid(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interp
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Interpolated value; zero outside `[x_0, x_last]`.
    pub fn interpolate(&self, x: f64) -> Complex64 {
        if !(x > 0.0) {
            return Complex64::new(0.0, 0.0);
        }
        self.spline.eval(x.ln())
    }

    /// Pointwise map of the sample values.
    pub fn map<F: Fn(f64, Complex64) -> Complex64>(&self, f: F) -> Result<Self> {
        let values = self.x.iter().zip(&self.values).map(|(&x, &v)| f(x, v)).collect();
        Self::new(self.x.clone(), values)
    }
}

impl HalfLineFn for SampledFunction {
    fn eval(&self, t: f64) -> Complex64 {
        self.interpolate(t)
    }

    fn support(&self) -> Option<(f64, f64)> {
        Some((self.x[0], self.x[self.x.len() - 1]))
    }
}

/// Natural cubic spline over `u = ln x`.
#[derive(Debug, Clone)]
struct LogSpline {
    u: Vec<f64>,
    y: Vec<Complex64>,
    /// Second derivatives at the knots.
    m: Vec<Complex64>,
    /// Set when the knots are uniform, enabling O(1) lookup.
    uniform_step: Option<f64>,
}

impl LogSpline {
    fn new(x: &[f64], y: &[Complex64]) -> Self {
        let u: Vec<f64> = x.iter().map(|v| v.ln()).collect();
        let n = u.len();
        let zero = Complex64::new(0.0, 0.0);
        let mut m = vec![zero; n];
        if n > 2 {
            // Thomas algorithm on the interior equations.
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut rhs = vec![zero; k];
            let mut upper = vec![0.0; k];
            for i in 1..n - 1 {
                let h0 = u[i] - u[i - 1];
                let h1 = u[i + 1] - u[i];
                diag[i - 1] = 2.0 * (h0 + h1);
                upper[i - 1] = h1;
                rhs[i - 1] = ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0) * 6.0;
            }
            for i in 1..k {
                let lower = u[i + 1] - u[i];
                let w = lower / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                let prev = rhs[i - 1];
                rhs[i] -= prev * w;
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = (rhs[i] - m[i + 2] * upper[i]) / diag[i];
            }
        }
        let h = (u[n - 1] - u[0]) / (n - 1) as f64;
        let uniform = u
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h);
        Self {
            u,
            y: y.to_vec(),
            m,
            uniform_step: uniform.then_some(h),
        }
    }

    fn interval(&self, u: f64) -> usize {
        let n = self.u.len();
        let i = match self.uniform_step {
            Some(h) => (((u - self.u[0]) / h).floor().max(0.0) as usize).min(n - 2),
            None => self.u.partition_point(|&k| k <= u).saturating_sub(1).min(n - 2),
        };
        // nudge past rounding at knot boundaries
        if u < self.u[i] && i > 0 {
            i - 1
        } else if u > self.u[i + 1] && i + 2 < n {
            i + 1
        } else {
            i
        }
    }

    fn eval(&self, u: f64) -> Complex64 {
        let n = self.u.len();
        if !(u >= self.u[0] && u <= self.u[n - 1]) {
            return Complex64::new(0.0, 0.0);
        }
        let i = self.interval(u);
        let h = self.u[i + 1] - self.u[i];
        let a = (self.u[i + 1] - u) / h;
        let b = 1.0 - a;
        self.y[i] * a
            + self.y[i + 1] * b
            + (self.m[i] * (a * a * a - a) + self.m[i + 1] * (b * b * b - b)) * (h * h / 6.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{geometric, LogGrid};

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn reproduces_knots_and_zero_extends() {
        let xs = geometric(0.5, 8.0, 9).unwrap();
        let vals: Vec<_> = xs.iter().map(|&x| Complex64::new(x.sin(), x.cos())).collect();
        let f = SampledFunction::new(xs.clone(), vals.clone()).unwrap();
        for (x, v) in xs.iter().zip(&vals) {
            assert!((f.interpolate(*x) - v).norm() < 1e-14);
        }
        assert_eq!(f.interpolate(0.49), c(0.0));
        assert_eq!(f.interpolate(8.01), c(0.0));
        assert_eq!(f.support(), Some((0.5, 8.0)));
    }

    #[test]
    fn linear_in_log_is_exact() {
        // natural spline reproduces linear functions of u exactly
        let xs = vec![0.3, 0.7, 1.1, 2.9, 5.0, 11.0];
        let vals: Vec<_> = xs.iter().map(|x: &f64| c(2.0 * x.ln() - 1.0)).collect();
        let f = SampledFunction::new(xs, vals).unwrap();
        for &x in &[0.31, 0.9, 2.0, 4.4, 10.9] {
            assert!((f.interpolate(x).re - (2.0 * x.ln() - 1.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn smooth_function_on_fine_log_grid() {
        let g = LogGrid::new(-10.0, 10.0, 0.02).unwrap();
        let f = SampledFunction::from_fn(&|t: f64| c(1.0 / (1.0 + t)), &g.points()).unwrap();
        for &x in &[0.0123, 0.5, 1.0, 3.3, 77.0] {
            assert!((f.interpolate(x).re - 1.0 / (1.0 + x)).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SampledFunction::new(vec![1.0], vec![c(1.0)]).is_err());
        assert!(SampledFunction::new(vec![1.0, 1.0], vec![c(1.0), c(2.0)]).is_err());
        assert!(SampledFunction::new(vec![-1.0, 1.0], vec![c(1.0), c(2.0)]).is_err());
        assert!(SampledFunction::new(vec![1.0, 2.0], vec![c(1.0)]).is_err());
    }
}
