//! Fourier-analytic solvers for the fractional Laplacian `(-Δ)^a`, `0 < a < 1`.

pub mod error;
pub mod fit;
pub mod halfline;
pub mod identities;
pub mod interval;
pub mod laguerre;
pub mod grid;
pub mod kernel;
pub mod pv;
pub mod quad;
pub mod special;
pub mod symbols;

pub use error::{Error, Result};
pub use grid::{
    extend_by_zero, forward_transform, inverse_transform, norm, Grid1D, Grid2D, GridFunction,
    GridFunction2D, HalfLineMask, Norm, Side, Spectrum,
};
pub use num_complex::Complex64;
pub use symbols::{FractionalOrder, SymbolKind, SymbolSpec};
