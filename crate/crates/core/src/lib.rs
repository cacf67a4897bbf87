//! Stieltjes, Hilbert and Laplace transforms on the half-line, computed
//! through Mellin multipliers on the critical line.

pub mod catalog;
pub mod convolution;
pub mod error;
pub mod gamma;
pub mod grid;
pub mod inversion;
pub mod io;
pub mod mellin;
pub mod numerics;
mod par;
pub mod report;
pub mod sie;
pub mod suites;
pub mod transforms;

pub use num_complex::Complex64;
pub use error::{Error, Result};
pub use grid::{LogGrid, TauGrid};
pub use mellin::{CriticalLineSpectrum, SampledFunction};
pub use numerics::{HalfLineFn, QuadratureConfig};
pub use par::is_parallel;
