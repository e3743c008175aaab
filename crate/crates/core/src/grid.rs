//! Uniform periodic grids, grid functions and the discrete Fourier contract.
//!
//! The box `[-L, L)` carries `n` samples `x_k = -L + k h`, `h = 2L/n`. The
//! forward transform approximates `û(ξ) = ∫ e^{-ixξ} u(x) dx` by
//! `h Σ_k e^{-i x_k ξ_j} u_k`, with frequencies `ξ_j = π j'/L` stored in FFT
//! order (`j' = j` for `j < n/2`, `j - n` otherwise).

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    n: usize,
    half_length: f64,
}

impl Grid1D {
    pub fn new(n: usize, half_length: f64) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "grid needs an even number of points >= 8, got {n}"
            )));
        }
        if !(half_length > 0.0 && half_length.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "half length must be positive, got {half_length}"
            )));
        }
        Ok(Grid1D { n, half_length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn h(&self) -> f64 {
        2.0 * self.half_length / self.n as f64
    }

    pub fn x(&self, k: usize) -> f64 {
        -self.half_length + k as f64 * self.h()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.x(k)).collect()
    }

    /// Index of the sample at `x = 0`.
    pub fn origin(&self) -> usize {
        self.n / 2
    }

    /// Signed frequency index `j'` of storage slot `j`.
    pub fn signed_index(&self, j: usize) -> i64 {
        if j < self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    pub fn xi(&self, j: usize) -> f64 {
        std::f64::consts::PI * self.signed_index(j) as f64 / self.half_length
    }

    /// Frequencies in storage (FFT) order.
    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.xi(j)).collect()
    }

    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI / self.h()
    }

    /// Same box, twice the resolution.
    pub fn refined(&self) -> Grid1D {
        Grid1D {
            n: 2 * self.n,
            half_length: self.half_length,
        }
    }
}

/// Samples of a function on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: Grid1D,
    pub values: Vec<Complex64>,
    pub is_real_hint: bool,
}

/// Frequency samples `û(ξ_j)` in storage order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub grid: Grid1D,
    pub values: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Norm {
    L2,
    Sup,
    /// h-weighted `(h Σ |u_k|^q)^{1/q}`.
    Lq(f64),
}

impl GridFunction {
    pub fn new(grid: Grid1D, values: Vec<Complex64>, is_real_hint: bool) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::InvalidParameter(format!(
                "expected {} samples, got {}",
                grid.n(),
                values.len()
            )));
        }
        Ok(GridFunction {
            grid,
            values,
            is_real_hint,
        })
    }

    pub fn zeros(grid: Grid1D) -> Self {
        GridFunction {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.n()],
            is_real_hint: true,
        }
    }

    pub fn from_real(grid: Grid1D, values: &[f64]) -> Result<Self> {
        Self::new(
            grid,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            true,
        )
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: Grid1D, f: F) -> Self {
        GridFunction {
            grid,
            values: (0..grid.n())
                .map(|k| Complex64::new(f(grid.x(k)), 0.0))
                .collect(),
            is_real_hint: true,
        }
    }

    pub fn from_complex_fn<F: Fn(f64) -> Complex64>(grid: Grid1D, f: F) -> Self {
        GridFunction {
            grid,
            values: (0..grid.n()).map(|k| f(grid.x(k))).collect(),
            is_real_hint: false,
        }
    }

    /// Discrete delta of unit mass at `x = 0`.
    pub fn delta(grid: Grid1D) -> Self {
        let mut u = Self::zeros(grid);
        u.values[grid.origin()] = Complex64::new(1.0 / grid.h(), 0.0);
        u
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn re(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn norm(&self, kind: Norm) -> f64 {
        norm(self, kind)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Self {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|&z| f(z)).collect(),
            is_real_hint: self.is_real_hint,
        }
    }

    /// `alpha * self + beta * other`.
    pub fn axpby(&self, alpha: Complex64, other: &GridFunction, beta: Complex64) -> Self {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        GridFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&u, &v)| alpha * u + beta * v)
                .collect(),
            is_real_hint: self.is_real_hint && other.is_real_hint,
        }
    }

    pub fn sub(&self, other: &GridFunction) -> Self {
        self.axpby(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    pub fn add(&self, other: &GridFunction) -> Self {
        self.axpby(Complex64::new(1.0, 0.0), other, Complex64::new(1.0, 0.0))
    }

    /// `‖self - other‖ / ‖other‖` in the given norm.
    pub fn rel_diff(&self, reference: &GridFunction, kind: Norm) -> f64 {
        let d = self.sub(reference).norm(kind);
        let r = reference.norm(kind);
        if r == 0.0 {
            d
        } else {
            d / r
        }
    }

    /// Discrete inner product `h Σ u_k conj(v_k)`.
    pub fn inner(&self, other: &GridFunction) -> Complex64 {
        let h = self.grid.h();
        self.values
            .iter()
            .zip(&other.values)
            .map(|(u, v)| u * v.conj())
            .sum::<Complex64>()
            * h
    }

    /// Drop imaginary parts when the real hint is set.
    pub fn realify(mut self) -> Self {
        if self.is_real_hint {
            for z in &mut self.values {
                z.im = 0.0;
            }
        }
        self
    }

    pub fn to_csv_string(&self) -> String {
        let mut s = format!(
            "# grid n={} L={}\nx,re,im\n",
            self.grid.n(),
            fmt17(self.grid.half_length())
        );
        for (k, z) in self.values.iter().enumerate() {
            let _ = writeln!(
                s,
                "{},{},{}",
                fmt17(self.grid.x(k)),
                fmt17(z.re),
                fmt17(z.im)
            );
        }
        s
    }

    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(self.to_csv_string().as_bytes())?;
        Ok(())
    }

    pub fn read_csv<P: AsRef<Path>>(path: P) -> Result<Self> {
        let f = std::io::BufReader::new(std::fs::File::open(path)?);
        let lines: Vec<String> = f.lines().collect::<std::io::Result<_>>()?;
        Self::parse_csv(&lines.join("\n"))
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let head = lines
            .next()
            .ok_or_else(|| Error::Parse("empty grid file".into()))?;
        let head = head
            .strip_prefix("# grid")
            .ok_or_else(|| Error::Parse(format!("missing grid header, got {head:?}")))?;
        let mut n = None;
        let mut l = None;
        for tok in head.split_whitespace() {
            match tok.split_once('=') {
                Some(("n", v)) => n = v.parse::<usize>().ok(),
                Some(("L", v)) => l = v.parse::<f64>().ok(),
                _ => return Err(Error::Parse(format!("bad header token {tok:?}"))),
            }
        }
        let (n, l) = match (n, l) {
            (Some(n), Some(l)) => (n, l),
            _ => return Err(Error::Parse("header needs n=<n> L=<L>".into())),
        };
        let grid = Grid1D::new(n, l)?;
        let cols = lines
            .next()
            .ok_or_else(|| Error::Parse("missing column line".into()))?;
        if cols.trim() != "x,re,im" {
            return Err(Error::Parse(format!("expected columns x,re,im, got {cols:?}")));
        }
        let mut values = Vec::with_capacity(n);
        for (i, line) in lines.enumerate() {
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(Error::Parse(format!("row {i}: expected 3 columns")));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {i}: {e}")))
            };
            let x = num(parts[0])?;
            if (x - grid.x(i)).abs() > 1e-9 * (1.0 + l) {
                return Err(Error::Parse(format!(
                    "row {i}: x = {x} does not match grid point {}",
                    grid.x(i)
                )));
            }
            values.push(Complex64::new(num(parts[1])?, num(parts[2])?));
        }
        let real = values.iter().all(|z| z.im == 0.0);
        GridFunction::new(grid, values, real)
    }
}

/// Format with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn norm(u: &GridFunction, kind: Norm) -> f64 {
    let h = u.grid.h();
    match kind {
        Norm::Sup => u.max_abs(),
        Norm::L2 => (h * u.values.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt(),
        Norm::Lq(q) => (h * u.values.iter().map(|z| z.norm().powf(q)).sum::<f64>()).powf(1.0 / q),
    }
}

fn fft_in_place(data: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(data.len())
    } else {
        planner.plan_fft_forward(data.len())
    };
    fft.process(data);
}

fn parity(j: i64) -> f64 {
    if j.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn forward_transform(u: &GridFunction) -> Spectrum {
    let g = u.grid;
    let mut data = u.values.clone();
    fft_in_place(&mut data, false);
    let h = g.h();
    for (j, z) in data.iter_mut().enumerate() {
        *z *= h * parity(g.signed_index(j));
    }
    Spectrum {
        grid: g,
        values: data,
    }
}

/// Inverse of [`forward_transform`]; `is_real_hint` is attached to the result.
pub fn inverse_transform(s: &Spectrum, is_real_hint: bool) -> GridFunction {
    let g = s.grid;
    let mut data = s.values.clone();
    for (j, z) in data.iter_mut().enumerate() {
        *z *= parity(g.signed_index(j));
    }
    fft_in_place(&mut data, true);
    let scale = 1.0 / (g.n() as f64 * g.h());
    for z in &mut data {
        *z *= scale;
    }
    GridFunction {
        grid: g,
        values: data,
        is_real_hint,
    }
}

impl Spectrum {
    /// `(1/2L) Σ |û_j|^2`, the Parseval partner of `‖u‖_2^2`.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() / (2.0 * self.grid.half_length())
    }

    /// Ratio of `|û|` at the Nyquist slot to its maximum.
    pub fn nyquist_ratio(&self) -> f64 {
        let peak = self.values.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        if peak == 0.0 {
            return 0.0;
        }
        self.values[self.grid.n() / 2].norm() / peak
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn mirror(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }
}

/// Indicator of one closed/open half of the box; `x = 0` belongs to the plus side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfLineMask {
    pub side: Side,
    pub grid: Grid1D,
}

impl HalfLineMask {
    pub fn new(side: Side, grid: Grid1D) -> Self {
        HalfLineMask { side, grid }
    }

    pub fn contains(&self, k: usize) -> bool {
        match self.side {
            Side::Plus => k >= self.grid.origin(),
            Side::Minus => k < self.grid.origin(),
        }
    }

    pub fn indices(&self) -> std::ops::Range<usize> {
        match self.side {
            Side::Plus => self.grid.origin()..self.grid.n(),
            Side::Minus => 0..self.grid.origin(),
        }
    }

    /// `e r u`: keep the masked side, zero the other.
    pub fn apply(&self, u: &GridFunction) -> GridFunction {
        let mut out = u.clone();
        for (k, z) in out.values.iter_mut().enumerate() {
            if !self.contains(k) {
                *z = Complex64::new(0.0, 0.0);
            }
        }
        out
    }

    /// `r`: samples on the masked side.
    pub fn restrict(&self, u: &GridFunction) -> Vec<Complex64> {
        u.values[self.indices()].to_vec()
    }

    /// `e`: extension by zero of side samples to the whole box.
    pub fn extend(&self, samples: &[Complex64]) -> Result<GridFunction> {
        let r = self.indices();
        if samples.len() != r.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} side samples, got {}",
                r.len(),
                samples.len()
            )));
        }
        let mut out = GridFunction::zeros(self.grid);
        out.values[r].copy_from_slice(samples);
        out.is_real_hint = samples.iter().all(|z| z.im == 0.0);
        Ok(out)
    }

    /// Relative l2 mass of `u` outside the mask, ignoring `collar` samples
    /// adjacent to the origin.
    pub fn leakage(&self, u: &GridFunction, collar: usize) -> f64 {
        let total: f64 = u.values.iter().map(|z| z.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let o = self.grid.origin();
        let outside: f64 = u
            .values
            .iter()
            .enumerate()
            .filter(|(k, _)| match self.side {
                Side::Plus => k + collar < o,
                Side::Minus => *k >= o + collar,
            })
            .map(|(_, z)| z.norm_sqr())
            .sum();
        (outside / total).sqrt()
    }
}

/// `e±r± u` for the given side.
pub fn extend_by_zero(u: &GridFunction, mask: &HalfLineMask) -> GridFunction {
    mask.apply(u)
}

/// Square tensor grid `[-L, L)^2` with `n × n` samples, row-major in `(x1, x2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub axis: Grid1D,
}

impl Grid2D {
    pub fn new(n: usize, half_length: f64) -> Result<Self> {
        Ok(Grid2D {
            axis: Grid1D::new(n, half_length)?,
        })
    }

    pub fn n(&self) -> usize {
        self.axis.n()
    }

    pub fn h(&self) -> f64 {
        self.axis.h()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n() + j
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction2D {
    pub grid: Grid2D,
    pub values: Vec<Complex64>,
}

impl GridFunction2D {
    pub fn from_fn<F: Fn(f64, f64) -> f64>(grid: Grid2D, f: F) -> Self {
        let n = grid.n();
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                values.push(Complex64::new(f(grid.axis.x(i), grid.axis.x(j)), 0.0));
            }
        }
        GridFunction2D { grid, values }
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn re(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }
}

fn fft2(values: &mut [Complex64], n: usize, inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    for row in values.chunks_mut(n) {
        fft.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = values[i * n + j];
        }
        fft.process(&mut col);
        for i in 0..n {
            values[i * n + j] = col[i];
        }
    }
}

/// Apply a multiplier `p(ξ1, ξ2)` to a 2-D grid function.
pub fn apply_multiplier_2d<F: Fn(f64, f64) -> Complex64>(
    u: &GridFunction2D,
    symbol: F,
) -> GridFunction2D {
    let n = u.grid.n();
    let ax = u.grid.axis;
    let mut data = u.values.clone();
    fft2(&mut data, n, false);
    for i in 0..n {
        for j in 0..n {
            data[i * n + j] *= symbol(ax.xi(i), ax.xi(j));
        }
    }
    fft2(&mut data, n, true);
    let s = 1.0 / (n * n) as f64;
    for z in &mut data {
        *z *= s;
    }
    GridFunction2D {
        grid: u.grid,
        values: data,
    }
}
