//! Periodic grid, real fields, and Fourier transforms.
//!
//! The domain is `[-L, L)` sampled at `N` evenly spaced points. Spectral
//! coefficients follow the continuum transform `c_m = dx * sum_n f(x_n) *
//! exp(-i xi_m x_n)` with `xi_m = pi m / L`, stored in FFT layout
//! `m = 0, 1, .., N/2-1, -N/2, .., -1`. Under this normalization `c_m`
//! approximates the line integral `\int f exp(-i xi x) dx` for well-resolved
//! smooth `f`, and Parseval reads `sum_i f_i^2 dx = sum_m |c_m|^2 / (2L)`.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Evenly spaced periodic grid on `[-half_width, half_width)`.
///
/// Cheap to clone; the point and wavenumber tables are shared.
#[derive(Clone, Debug)]
pub struct Grid {
    inner: Arc<GridInner>,
}

#[derive(Debug)]
struct GridInner {
    half_width: f64,
    n: usize,
    dx: f64,
    points: Vec<f64>,
    wavenumbers: Vec<f64>,
}

impl Grid {
    /// `n_points` must be even and at least 16 so the two-thirds dealias rule
    /// always retains a nonempty band.
    pub fn new(half_width: f64, n_points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::BadHalfWidth(half_width));
        }
        if n_points < 16 || !n_points.is_multiple_of(2) {
            return Err(Error::BadGridSize(n_points));
        }
        let n = n_points;
        let dx = 2.0 * half_width / n as f64;
        let points = (0..n).map(|i| -half_width + i as f64 * dx).collect();
        let wavenumbers = (0..n)
            .map(|j| {
                let m = if j < n / 2 {
                    j as i64
                } else {
                    j as i64 - n as i64
                };
                std::f64::consts::PI * m as f64 / half_width
            })
            .collect();
        Ok(Grid {
            inner: Arc::new(GridInner {
                half_width,
                n,
                dx,
                points,
                wavenumbers,
            }),
        })
    }

    pub fn half_width(&self) -> f64 {
        self.inner.half_width
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.inner.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.inner.dx
    }

    /// Sample locations `x_i = -L + i dx`.
    pub fn points(&self) -> &[f64] {
        &self.inner.points
    }

    /// Wavenumbers `pi m / L` in FFT layout.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.inner.wavenumbers
    }

    /// Largest resolved wavenumber magnitude, `pi (N/2) / L`.
    pub fn max_wavenumber(&self) -> f64 {
        std::f64::consts::PI * (self.inner.n as f64 / 2.0) / self.inner.half_width
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.half_width == other.inner.half_width && self.inner.n == other.inner.n)
    }
}

/// Real-valued samples on a [`Grid`]. Construction rejects non-finite entries.
#[derive(Clone, Debug)]
pub struct RealField {
    grid: Grid,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(RealField {
            grid: grid.clone(),
            values,
        })
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.points().iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: &Grid) -> Self {
        RealField {
            grid: grid.clone(),
            values: vec![0.0; grid.len()],
        }
    }

    /// Skips the finite scan; callers guarantee validity.
    pub(crate) fn from_raw(grid: &Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        RealField {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Complex spectral coefficients of a real field, FFT layout, Hermitian for
/// fields produced by [`forward`].
#[derive(Clone, Debug)]
pub struct SpectralCoeffs {
    grid: Grid,
    coeffs: Vec<Complex<f64>>,
}

impl SpectralCoeffs {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex<f64>] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex<f64>] {
        &mut self.coeffs
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn plan_forward(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

pub(crate) fn plan_inverse(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

/// Forward transform to continuum-normalized coefficients.
///
/// The grid starts at `x = -L`, which shows up as the alternating sign
/// `(-1)^j` relative to a raw index-space FFT.
pub fn forward(field: &RealField) -> SpectralCoeffs {
    let n = field.grid.len();
    let mut buf: Vec<Complex<f64>> = field.values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    plan_forward(n).process(&mut buf);
    let dx = field.grid.spacing();
    for (j, c) in buf.iter_mut().enumerate() {
        let sign = if j % 2 == 0 { dx } else { -dx };
        *c *= sign;
    }
    SpectralCoeffs {
        grid: field.grid.clone(),
        coeffs: buf,
    }
}

/// Inverse transform; returns the real part of the reconstruction.
pub fn inverse(coeffs: &SpectralCoeffs) -> RealField {
    let n = coeffs.grid.len();
    let mut buf: Vec<Complex<f64>> = coeffs
        .coeffs
        .iter()
        .enumerate()
        .map(|(j, &c)| if j % 2 == 0 { c } else { -c })
        .collect();
    plan_inverse(n).process(&mut buf);
    let scale = 1.0 / (2.0 * coeffs.grid.half_width());
    let values = buf.iter().map(|c| c.re * scale).collect();
    RealField::from_raw(&coeffs.grid, values)
}

/// Multiplies coefficients by `(i xi)^order` in place. Odd orders zero the
/// Nyquist mode, whose derivative has no Hermitian representative.
pub(crate) fn apply_derivative_symbol(
    coeffs: &mut [Complex<f64>],
    wavenumbers: &[f64],
    order: u32,
) {
    let n = coeffs.len();
    let nyquist = n / 2;
    for (j, c) in coeffs.iter_mut().enumerate() {
        let xi = wavenumbers[j];
        let factor = match order % 4 {
            0 => Complex::new(xi.powi(order as i32), 0.0),
            1 => Complex::new(0.0, xi.powi(order as i32)),
            2 => Complex::new(-xi.powi(order as i32), 0.0),
            _ => Complex::new(0.0, -xi.powi(order as i32)),
        };
        *c *= factor;
        if order % 2 == 1 && j == nyquist {
            *c = Complex::new(0.0, 0.0);
        }
    }
}

/// Spectral derivative of the given order; order 0 returns the field unchanged.
pub fn derivative(field: &RealField, order: u32) -> RealField {
    if order == 0 {
        return field.clone();
    }
    let mut coeffs = forward(field);
    apply_derivative_symbol(&mut coeffs.coeffs, field.grid.wavenumbers(), order);
    inverse(&coeffs)
}

/// Zeroes every mode with `3 |m| >= N` (two-thirds rule), Nyquist included.
pub(crate) fn zero_top_third(coeffs: &mut [Complex<f64>]) {
    let n = coeffs.len();
    for (j, c) in coeffs.iter_mut().enumerate() {
        let m = if j < n / 2 { j } else { n - j };
        if 3 * m >= n {
            *c = Complex::new(0.0, 0.0);
        }
    }
}

/// Pointwise product with two-thirds-rule dealiasing: the top third of each
/// factor's modes is zeroed before multiplication and the product is
/// re-truncated to the same band.
pub fn dealiased_product(a: &RealField, b: &RealField) -> Result<RealField> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    let mut ca = forward(a);
    zero_top_third(&mut ca.coeffs);
    let mut cb = forward(b);
    zero_top_third(&mut cb.coeffs);
    let fa = inverse(&ca);
    let fb = inverse(&cb);
    let prod: Vec<f64> = fa
        .values
        .iter()
        .zip(&fb.values)
        .map(|(&x, &y)| x * y)
        .collect();
    let mut cp = forward(&RealField::from_raw(&a.grid, prod));
    zero_top_third(&mut cp.coeffs);
    Ok(inverse(&cp))
}

/// Rectangle-rule L2 norm, `sqrt(sum_i f_i^2 dx)`.
pub fn l2_norm(field: &RealField) -> f64 {
    let sum: f64 = field.values.iter().map(|&v| v * v).sum();
    (sum * field.grid.spacing()).sqrt()
}

/// L2 norm evaluated on the spectral side, `sqrt(sum_m |c_m|^2 / (2L))`.
/// Agrees with [`l2_norm`] by Parseval.
pub fn parseval_l2(coeffs: &SpectralCoeffs) -> f64 {
    let sum: f64 = coeffs.coeffs.iter().map(|c| c.norm_sqr()).sum();
    (sum / (2.0 * coeffs.grid.half_width())).sqrt()
}

pub fn linf_norm(field: &RealField) -> f64 {
    field.values.iter().fold(0.0, |m, &v| m.max(v.abs()))
}

/// Sobolev norm with the sum-of-derivatives convention,
/// `sqrt(sum_{n<=s} ||d^n f||_L2^2)`, evaluated from one transform.
///
/// `s` is capped at 4; diagnostics never need more.
pub fn sobolev_norm(field: &RealField, s: u32) -> f64 {
    assert!(s <= 4, "sobolev_norm supports s <= 4, got {s}");
    let coeffs = forward(field);
    let n = field.grid.len();
    let nyquist = n / 2;
    let mut sum = 0.0;
    for (j, c) in coeffs.coeffs.iter().enumerate() {
        let xi2 = field.grid.wavenumbers()[j].powi(2);
        let mut weight = 0.0;
        let mut pow = 1.0;
        for order in 0..=s {
            // Odd derivatives drop the Nyquist mode; keep the weight consistent.
            if !(order % 2 == 1 && j == nyquist) {
                weight += pow;
            }
            pow *= xi2;
        }
        sum += c.norm_sqr() * weight;
    }
    (sum / (2.0 * field.grid.half_width())).sqrt()
}
