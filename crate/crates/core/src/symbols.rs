//! Fourier symbols and multiplier operators `Op(p) u = F^{-1}(p û)`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{forward_transform, inverse_transform, GridFunction, HalfLineMask, Side, Spectrum};
use crate::special::gamma;

/// Nyquist-to-peak spectral ratio above which a multiplier is refused.
pub const ALIAS_LIMIT: f64 = 1e-8;

/// The exponent `a` of `(-Δ)^a`, restricted to the open interval `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionalOrder {
    a: f64,
    gamma_a_plus_1: f64,
    gamma_a: f64,
}

impl FractionalOrder {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "fractional order must lie strictly inside (0, 1), got {a}"
            )));
        }
        Ok(FractionalOrder {
            a,
            gamma_a_plus_1: gamma(a + 1.0),
            gamma_a: gamma(a),
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn gamma_a_plus_1(&self) -> f64 {
        self.gamma_a_plus_1
    }

    pub fn gamma_a(&self) -> f64 {
        self.gamma_a
    }
}

impl fmt::Display for FractionalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolKind {
    /// `|ξ|^order`
    RieszPower,
    /// `(σ² + ξ²)^{order/2}`
    BesselPower,
    /// `(σ + iξ)^order`
    OrderReducePlus,
    /// `(σ - iξ)^order`
    OrderReduceMinus,
    CustomEvenClassical,
}

/// A user-supplied even symbol of a given order.
#[derive(Clone)]
pub struct CustomSymbol {
    pub name: String,
    pub order: f64,
    pub eval: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>,
}

impl fmt::Debug for CustomSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomSymbol")
            .field("name", &self.name)
            .field("order", &self.order)
            .finish()
    }
}

/// Descriptor of a Fourier symbol.
///
/// The order-reducing kinds evaluate pointwise on the principal branch, but on
/// a grid they are realized by the discrete Wiener–Hopf factor of
/// `(σ² + ξ²)`, see [`plus_factor_log`].
#[derive(Debug, Clone)]
pub struct SymbolSpec {
    pub kind: SymbolKind,
    pub order: f64,
    pub sigma: f64,
    custom: Option<CustomSymbol>,
}

impl SymbolSpec {
    pub fn riesz(a: FractionalOrder) -> Self {
        Self::riesz_order(2.0 * a.a())
    }

    /// `|ξ|^order` for any real order.
    pub fn riesz_order(order: f64) -> Self {
        SymbolSpec {
            kind: SymbolKind::RieszPower,
            order,
            sigma: 1.0,
            custom: None,
        }
    }

    /// `(1 + ξ²)^{a}`; accepts any real `a`.
    pub fn bessel(a: f64) -> Self {
        SymbolSpec {
            kind: SymbolKind::BesselPower,
            order: 2.0 * a,
            sigma: 1.0,
            custom: None,
        }
    }

    pub fn plus(t: f64) -> Self {
        SymbolSpec {
            kind: SymbolKind::OrderReducePlus,
            order: t,
            sigma: 1.0,
            custom: None,
        }
    }

    pub fn minus(t: f64) -> Self {
        SymbolSpec {
            kind: SymbolKind::OrderReduceMinus,
            order: t,
            sigma: 1.0,
            custom: None,
        }
    }

    pub fn with_sigma(mut self, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        self.sigma = sigma;
        Ok(self)
    }

    /// Custom symbol; evenness and strong ellipticity are checked by sampling
    /// `|ξ| ≤ xi_max`.
    pub fn custom(symbol: CustomSymbol, xi_max: f64) -> Result<Self> {
        let samples = 4096;
        let mut min_ratio = f64::INFINITY;
        for k in 0..=samples {
            let xi = xi_max * k as f64 / samples as f64;
            let p = (symbol.eval)(xi);
            let q = (symbol.eval)(-xi);
            let scale = p.norm().max(1.0);
            if (p - q).norm() > 1e-12 * scale {
                return Err(Error::InvalidParameter(format!(
                    "symbol {} is not even at xi = {xi}",
                    symbol.name
                )));
            }
            if xi >= 1.0 {
                min_ratio = min_ratio.min(p.re / xi.powf(symbol.order));
            }
        }
        if !(min_ratio > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "symbol {} is not strongly elliptic: min Re p/|xi|^order = {min_ratio:.3e}",
                symbol.name
            )));
        }
        Ok(SymbolSpec {
            kind: SymbolKind::CustomEvenClassical,
            order: symbol.order,
            sigma: 1.0,
            custom: Some(symbol),
        })
    }

    /// Pointwise value on the principal branch.
    pub fn eval(&self, xi: f64) -> Complex64 {
        match self.kind {
            SymbolKind::RieszPower => {
                if xi == 0.0 {
                    Complex64::new(if self.order == 0.0 { 1.0 } else { 0.0 }, 0.0)
                } else {
                    Complex64::new(xi.abs().powf(self.order), 0.0)
                }
            }
            SymbolKind::BesselPower => {
                Complex64::new((self.sigma * self.sigma + xi * xi).powf(0.5 * self.order), 0.0)
            }
            SymbolKind::OrderReducePlus => Complex64::new(self.sigma, xi).powf(self.order),
            SymbolKind::OrderReduceMinus => Complex64::new(self.sigma, -xi).powf(self.order),
            SymbolKind::CustomEvenClassical => (self.custom.as_ref().expect("custom symbol").eval)(xi),
        }
    }

    /// Multiplier values on the frequency grid of `grid`, storage order.
    pub fn grid_values(&self, grid: &crate::grid::Grid1D) -> Vec<Complex64> {
        match self.kind {
            SymbolKind::OrderReducePlus | SymbolKind::OrderReduceMinus => {
                let l = plus_factor_log(grid, self.sigma);
                l.iter()
                    .map(|&z| {
                        let z = if self.kind == SymbolKind::OrderReduceMinus {
                            z.conj()
                        } else {
                            z
                        };
                        (z * self.order).exp()
                    })
                    .collect()
            }
            _ => grid.frequencies().iter().map(|&xi| self.eval(xi)).collect(),
        }
    }

    /// True when `p(-ξ) = conj p(ξ)`, so real inputs stay real.
    pub fn is_hermitian(&self) -> bool {
        match self.kind {
            SymbolKind::CustomEvenClassical => {
                let c = self.custom.as_ref().expect("custom symbol");
                (0..64).all(|k| {
                    let xi = 0.37 * k as f64;
                    let p = (c.eval)(xi);
                    (p.im).abs() <= 1e-12 * p.norm().max(1.0)
                })
            }
            _ => true,
        }
    }
}

/// Cepstral logarithm `ℓ₊` of the discrete plus factor of `σ² + ξ²`.
///
/// `ℓ₊ + conj ℓ₊ = log(σ² + ξ²)` holds exactly, and `exp(t ℓ₊)` is the symbol of
/// a kernel supported on `x ≥ 0` up to periodic wrap-around of the cepstrum.
pub fn plus_factor_log(grid: &crate::grid::Grid1D, sigma: f64) -> Vec<Complex64> {
    let n = grid.n();
    let mut c: Vec<Complex64> = grid
        .frequencies()
        .iter()
        .map(|&xi| Complex64::new((sigma * sigma + xi * xi).ln(), 0.0))
        .collect();
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_inverse(n).process(&mut c);
    let inv_n = 1.0 / n as f64;
    for (k, z) in c.iter_mut().enumerate() {
        let w = if k == 0 || k == n / 2 {
            0.5
        } else if k < n / 2 {
            1.0
        } else {
            0.0
        };
        *z *= w * inv_n;
    }
    planner.plan_fft_forward(n).process(&mut c);
    c
}

fn multiply(spec: &SymbolSpec, s: &Spectrum) -> Spectrum {
    let p = spec.grid_values(&s.grid);
    Spectrum {
        grid: s.grid,
        values: s.values.iter().zip(&p).map(|(u, p)| u * p).collect(),
    }
}

/// `Op(p) u` without the aliasing precondition.
pub fn apply_multiplier_unchecked(spec: &SymbolSpec, u: &GridFunction) -> GridFunction {
    let s = forward_transform(u);
    inverse_transform(&multiply(spec, &s), u.is_real_hint && spec.is_hermitian())
}

/// `Op(p) u`; refuses inputs whose spectrum has not decayed to
/// [`ALIAS_LIMIT`] of its peak at the Nyquist frequency.
pub fn apply_multiplier(spec: &SymbolSpec, u: &GridFunction) -> Result<GridFunction> {
    let s = forward_transform(u);
    let ratio = s.nyquist_ratio();
    if ratio > ALIAS_LIMIT {
        log::warn!("multiplier input under-resolved: Nyquist ratio {ratio:.3e}");
        return Err(Error::Alias {
            ratio,
            limit: ALIAS_LIMIT,
        });
    }
    Ok(inverse_transform(&multiply(spec, &s), u.is_real_hint && spec.is_hermitian()))
}

/// Relative l2 gap between `Op(s1) Op(s2) u` and `Op(target) u`.
pub fn compose_check_against(
    s1: &SymbolSpec,
    s2: &SymbolSpec,
    target: &SymbolSpec,
    u: &GridFunction,
) -> f64 {
    let g = u.grid;
    let p1 = s1.grid_values(&g);
    let p2 = s2.grid_values(&g);
    let pt = target.grid_values(&g);
    let s = forward_transform(u);
    let lhs = Spectrum {
        grid: g,
        values: s.values.iter().zip(p1.iter().zip(&p2)).map(|(u, (a, b))| u * a * b).collect(),
    };
    let rhs = Spectrum {
        grid: g,
        values: s.values.iter().zip(&pt).map(|(u, p)| u * p).collect(),
    };
    let lhs = inverse_transform(&lhs, false);
    let rhs = inverse_transform(&rhs, false);
    lhs.rel_diff(&rhs, crate::grid::Norm::L2)
}

/// Relative l2 gap between the composition `Op(s1) Op(s2) u`, applied as two
/// successive multipliers, and `Op(s1 s2) u` with the product symbol.
pub fn compose_check(s1: &SymbolSpec, s2: &SymbolSpec, u: &GridFunction) -> f64 {
    let g = u.grid;
    let two_step = apply_multiplier_unchecked(s1, &apply_multiplier_unchecked(s2, u));
    let p1 = s1.grid_values(&g);
    let p2 = s2.grid_values(&g);
    let s = forward_transform(u);
    let prod = Spectrum {
        grid: g,
        values: s.values.iter().zip(p1.iter().zip(&p2)).map(|(u, (a, b))| u * a * b).collect(),
    };
    two_step.rel_diff(&inverse_transform(&prod, false), crate::grid::Norm::L2)
}

/// Collar (in samples next to the origin) excluded from support leakage.
pub const SUPPORT_COLLAR: usize = 2;

/// Relative l2 mass that `Ξ_±^t` moves onto the opposite side of `u`'s support.
pub fn support_preservation_residual_side(side: Side, t: f64, u: &GridFunction) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let spec = match side {
        Side::Plus => SymbolSpec::plus(t),
        Side::Minus => SymbolSpec::minus(t),
    };
    let v = apply_multiplier_unchecked(&spec, u);
    let mask = HalfLineMask::new(side, u.grid);
    mask.leakage(&v, SUPPORT_COLLAR)
}

/// [`support_preservation_residual_side`] for the plus family.
pub fn support_preservation_residual(t: f64, u: &GridFunction) -> f64 {
    support_preservation_residual_side(Side::Plus, t, u)
}

/// Discrete `H^s` norm `((1/2L) Σ (1 + ξ²)^s |û|²)^{1/2}`.
pub fn sobolev_norm(u: &GridFunction, s: f64) -> f64 {
    let sp = forward_transform(u);
    let g = u.grid;
    let sum: f64 = sp
        .values
        .iter()
        .enumerate()
        .map(|(j, z)| (1.0 + g.xi(j).powi(2)).powf(s) * z.norm_sqr())
        .sum();
    (sum / (2.0 * g.half_length())).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid1D, Norm};

    fn gauss(g: Grid1D) -> GridFunction {
        GridFunction::from_fn(g, |x| (-0.5 * x * x).exp())
    }

    #[test]
    fn order_is_validated() {
        assert!(FractionalOrder::new(0.0).is_err());
        assert!(FractionalOrder::new(1.0).is_err());
        assert!(FractionalOrder::new(f64::NAN).is_err());
        let a = FractionalOrder::new(0.3).unwrap();
        assert!((a.gamma_a_plus_1() - 0.3 * a.gamma_a()).abs() < 1e-12 * a.gamma_a_plus_1());
    }

    #[test]
    fn plus_factor_reproduces_modulus() {
        let g = Grid1D::new(512, 16.0).unwrap();
        let l = plus_factor_log(&g, 1.5);
        for (j, z) in l.iter().enumerate() {
            let xi = g.xi(j);
            assert!((2.0 * z.re - (2.25 + xi * xi).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_order_reducer_is_identity() {
        let g = Grid1D::new(256, 16.0).unwrap();
        let u = gauss(g);
        let v = apply_multiplier(&SymbolSpec::plus(0.0), &u).unwrap();
        assert!(v.rel_diff(&u, Norm::Sup) < 1e-14);
    }

    #[test]
    fn alias_guard_trips_on_jumps() {
        let g = Grid1D::new(256, 16.0).unwrap();
        let u = GridFunction::from_fn(g, |x| if x >= 0.0 { (-x).exp() } else { 0.0 });
        assert!(matches!(
            apply_multiplier(&SymbolSpec::bessel(0.5), &u),
            Err(Error::Alias { .. })
        ));
    }

    #[test]
    fn custom_symbol_checks() {
        let odd = CustomSymbol {
            name: "odd".into(),
            order: 1.0,
            eval: Arc::new(|xi| Complex64::new(xi, 0.0)),
        };
        assert!(SymbolSpec::custom(odd, 50.0).is_err());
        let indefinite = CustomSymbol {
            name: "indefinite".into(),
            order: 2.0,
            eval: Arc::new(|xi: f64| Complex64::new(4.0 - xi * xi, 0.0)),
        };
        assert!(SymbolSpec::custom(indefinite, 50.0).is_err());
        let ok = CustomSymbol {
            name: "riesz+1".into(),
            order: 1.0,
            eval: Arc::new(|xi: f64| Complex64::new(xi.abs() + 1.0, 0.0)),
        };
        assert!(SymbolSpec::custom(ok, 50.0).is_ok());
    }

    #[test]
    fn sobolev_norm_is_exact_under_reducers() {
        let g = Grid1D::new(512, 16.0).unwrap();
        let u = gauss(g);
        let v = apply_multiplier_unchecked(&SymbolSpec::plus(0.7), &u);
        let r = sobolev_norm(&v, 0.3) / sobolev_norm(&u, 1.0);
        assert!((r - 1.0).abs() < 1e-12);
    }
}
