//! Shared fixtures for the benchmarks.

use fraclap::{FractionalOrder, Grid1D, GridFunction};

pub fn order(a: f64) -> FractionalOrder {
    FractionalOrder::new(a).expect("order in (0, 1)")
}

pub fn gaussian(n: usize, half_length: f64) -> GridFunction {
    let g = Grid1D::new(n, half_length).expect("valid grid");
    GridFunction::from_fn(g, |x| (-0.5 * x * x).exp())
}

/// H(x) e^{-x}, the standard half-line right-hand side.
pub fn half_exp(n: usize, half_length: f64) -> GridFunction {
    let g = Grid1D::new(n, half_length).expect("valid grid");
    GridFunction::from_fn(g, |x| if x >= 0.0 { (-x).exp() } else { 0.0 })
}
