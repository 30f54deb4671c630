//! Soliton profiles, sums of solitons, and their closed-form Sobolev sizes.
//!
//! The pure-power family `U_t + U_xxx + U^k U_x = 0` has the traveling wave
//!
//! ```text
//! U_s(x, t) = (c (k+1)(k+2) / 2)^(1/k) sech^(2/k)( (k sqrt(c) / 2) (x - c t - x0) )
//! ```
//!
//! and the slow-scale equation `u_t + nu (u_xxx + u u_x) = 0` has
//! `u_s = 3 c sech^2( (sqrt(c)/2) (x - nu c t - x0) )`. Profiles are sampled
//! with the argument wrapped into the periodic box, so a soliton that crosses
//! the boundary re-enters smoothly.

use crate::error::{Error, Result};
use crate::spectral::{Grid, RealField};

/// Profiles whose tails exceed this at the box edge get a log warning: the
/// periodic wrap then no longer approximates the whole-line soliton well.
pub const EDGE_TAIL_WARN: f64 = 1e-10;

/// `sech(z)^(2/k)` without overflow for large `|z|`.
///
/// `cosh` overflows near `z = 710`; going through `2 e^{-|z|} / (1 + e^{-2|z|})`
/// underflows gracefully to zero instead.
fn sech_pow(z: f64, k: u32) -> f64 {
    let e = (-z.abs()).exp();
    let sech = 2.0 * e / (1.0 + e * e);
    match k {
        1 => sech * sech,
        2 => sech,
        _ => sech.powf(2.0 / k as f64),
    }
}

/// Map `y` into `[-l, l)`.
fn wrap(y: f64, l: f64) -> f64 {
    (y + l).rem_euclid(2.0 * l) - l
}

fn check_speed(c: f64) -> Result<()> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "soliton speed must be positive and finite, got {c}"
        )));
    }
    Ok(())
}

fn check_offset(x0: f64) -> Result<()> {
    if !x0.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "soliton offset must be finite, got {x0}"
        )));
    }
    Ok(())
}

fn warn_if_edge_visible(field: &RealField, what: &str) {
    let v = field.values();
    let edge = v[0].abs().max(v[v.len() - 1].abs());
    if edge > EDGE_TAIL_WARN {
        log::warn!(
            "{what}: tail magnitude {edge:.3e} at the box edge exceeds {EDGE_TAIL_WARN:.0e}; \
             enlarge the domain for clean periodic wrapping"
        );
    }
}

/// Traveling wave of the pure-power equation with exponent `k`, sampled at
/// time `t` on `grid`.
pub fn gkdv_soliton(k: u32, c: f64, x0: f64, grid: &Grid, t: f64) -> Result<RealField> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "nonlinearity exponent k must be at least 1".into(),
        ));
    }
    check_speed(c)?;
    check_offset(x0)?;
    let kf = k as f64;
    let amplitude = (c * (kf + 1.0) * (kf + 2.0) / 2.0).powf(1.0 / kf);
    let half_rate = kf * c.sqrt() / 2.0;
    let l = grid.half_width();
    let center = x0 + c * t;
    let field = RealField::from_fn(grid, |x| {
        amplitude * sech_pow(half_rate * wrap(x - center, l), k)
    })?;
    warn_if_edge_visible(&field, "gkdv_soliton");
    Ok(field)
}

/// Traveling wave `3 c sech^2((sqrt(c)/2)(x - nu c t - x0))` of the
/// slow-scale KdV equation.
pub fn rescaled_soliton(nu: f64, c: f64, x0: f64, grid: &Grid, t: f64) -> Result<RealField> {
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "dispersion scale nu must be positive and finite, got {nu}"
        )));
    }
    check_speed(c)?;
    check_offset(x0)?;
    let half_rate = c.sqrt() / 2.0;
    let l = grid.half_width();
    let center = x0 + nu * c * t;
    let field = RealField::from_fn(grid, |x| {
        3.0 * c * sech_pow(half_rate * wrap(x - center, l), 1)
    })?;
    warn_if_edge_visible(&field, "rescaled_soliton");
    Ok(field)
}

/// Sum of two solitons of the same family at `t = 0`.
///
/// Warns when either profile is not small at the other's center, since the
/// sum is then far from a genuine multi-soliton state.
pub fn two_soliton_sum(k: u32, c: [f64; 2], x0: [f64; 2], grid: &Grid) -> Result<RealField> {
    let a = gkdv_soliton(k, c[0], x0[0], grid, 0.0)?;
    let b = gkdv_soliton(k, c[1], x0[1], grid, 0.0)?;
    let l = grid.half_width();
    let dx = grid.spacing();
    // Sample each profile at the other's center (nearest grid point) and
    // compare with its own peak height there.
    let idx = |x: f64| ((wrap(x, l) + l) / dx).round() as usize % grid.len();
    let a_cross = a.values()[idx(x0[1])].abs();
    let b_cross = b.values()[idx(x0[0])].abs();
    let a_peak = a.values()[idx(x0[0])].abs();
    let b_peak = b.values()[idx(x0[1])].abs();
    if a_cross > 1e-3 * a_peak || b_cross > 1e-3 * b_peak {
        log::warn!(
            "two_soliton_sum: profiles overlap (cross magnitudes {a_cross:.3e}, {b_cross:.3e} \
             exceed 1e-3 of the peaks); the sum is not close to a two-soliton state"
        );
    }
    let values: Vec<f64> = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(&p, &q)| p + q)
        .collect();
    RealField::new(grid, values)
}

/// Closed-form squared `H^2` size of the KdV soliton `3 c sech^2(sqrt(c)/2 x)`:
/// `24 sqrt(c) (c + c^2/5 + c^3/7)`.
pub fn kdv_soliton_h2_squared(c: f64) -> f64 {
    24.0 * c.sqrt() * (c + c * c / 5.0 + c * c * c / 7.0)
}

/// Closed-form squared `H^2` size of the mKdV soliton
/// `sqrt(6c) sech(sqrt(c) x)`: `4 sqrt(c) (3 + c + 7 c^2 / 5)`.
pub fn mkdv_soliton_h2_squared(c: f64) -> f64 {
    4.0 * c.sqrt() * (3.0 + c + 7.0 * c * c / 5.0)
}

/// `H^2` norm of a single soliton of the degree-`k` family when a closed form
/// exists (`k = 1` and `k = 2`).
pub fn closed_form_h2(k: u32, c: f64) -> Option<f64> {
    match k {
        1 => Some(kdv_soliton_h2_squared(c).sqrt()),
        2 => Some(mkdv_soliton_h2_squared(c).sqrt()),
        _ => None,
    }
}

/// An exactly known reference solution, sampled on demand.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AnalyticProfile {
    /// Pure-power soliton translating at speed `c`.
    Soliton { k: u32, c: f64, x0: f64 },
    /// Slow-scale soliton translating at speed `nu * c`.
    RescaledSoliton { nu: f64, c: f64, x0: f64 },
}

impl AnalyticProfile {
    pub fn sample(&self, grid: &Grid, t: f64) -> Result<RealField> {
        match *self {
            AnalyticProfile::Soliton { k, c, x0 } => gkdv_soliton(k, c, x0, grid, t),
            AnalyticProfile::RescaledSoliton { nu, c, x0 } => rescaled_soliton(nu, c, x0, grid, t),
        }
    }
}
