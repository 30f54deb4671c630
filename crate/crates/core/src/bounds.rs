//! Predicted lifespans, proximity timescales, and size bounds.
//!
//! Two conventions are reported side by side everywhere: the general form
//! with explicit nonlinearity constants, and the pure-power form that keeps
//! only the leading `||U||^k` dependence. Both are "up to a constant" `c`,
//! which callers can set (default 1). Norms passed in are `H^{s+1}` for the
//! proximity statements and `H^s` for the lifespan ones; the laboratory uses
//! `s = 1` and `s = 2` respectively, so every argument is an `H^2` norm.

use serde::{Serialize, Serializer};

use crate::models::{ModelSpec, PolynomialNonlinearity};

/// An `f64` that may legitimately be infinite; serializes infinities and NaN
/// as the strings `"inf"`, `"-inf"`, `"nan"` so JSON output stays valid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtReal(pub f64);

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            ser.serialize_f64(self.0)
        } else if self.0 == f64::INFINITY {
            ser.serialize_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            ser.serialize_str("-inf")
        } else {
            ser.serialize_str("nan")
        }
    }
}

/// Size constants of `F(U) = sum_{j=1..k} a_j U^j` used by the bounds.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct NonlinearityConstants {
    /// `max_{1 <= j <= k} j |a_j|`.
    pub weighted_max_full: f64,
    /// `max_{1 <= j <= k-1} j |a_j|`; zero for a pure power (`k = 1` included).
    pub weighted_max_lower: f64,
    /// `max_{1 <= j <= k-1} |a_j|`; zero for a pure power.
    pub max_abs_lower: f64,
}

pub fn nonlinearity_constants(nl: &PolynomialNonlinearity) -> NonlinearityConstants {
    let a = nl.coefficients();
    let k = a.len();
    let mut full = 0.0f64;
    let mut lower = 0.0f64;
    let mut abs_lower = 0.0f64;
    for (i, &c) in a.iter().enumerate() {
        let j = (i + 1) as f64;
        full = full.max(j * c.abs());
        if i + 1 < k {
            lower = lower.max(j * c.abs());
            abs_lower = abs_lower.max(c.abs());
        }
    }
    NonlinearityConstants {
        weighted_max_full: full,
        weighted_max_lower: lower,
        max_abs_lower: abs_lower,
    }
}

/// General proximity timescale
/// `c * min( 1 / (A sum_{j=1..k} ||U0||^j), 1 / ||u0|| )`,
/// with `A` the full weighted max and both norms taken in `H^{s+1}`.
pub fn proximity_timescale(
    nl: &PolynomialNonlinearity,
    big_norm: f64,
    small_norm: f64,
    c_const: f64,
) -> f64 {
    let a = nonlinearity_constants(nl).weighted_max_full;
    let k = nl.degree();
    let mut sum = 0.0;
    for j in 1..=k {
        sum += big_norm.powi(j as i32);
    }
    let first = recip_or_inf(a * sum);
    let second = recip_or_inf(small_norm);
    c_const * first.min(second)
}

/// Pure-power proximity timescale `c * min( ||U0||^{-k}, ||u0||^{-1} )`.
pub fn proximity_timescale_power(k: u32, big_norm: f64, small_norm: f64, c_const: f64) -> f64 {
    let first = recip_or_inf(big_norm.powi(k as i32));
    let second = recip_or_inf(small_norm);
    c_const * first.min(second)
}

/// General lifespan `c / ( ||U0||^k + B sum_{j=1..k-1} ||U0||^j )` with `B`
/// the lower-range weighted max; the norm is `H^s`.
pub fn size_lifespan(nl: &PolynomialNonlinearity, norm: f64, c_const: f64) -> f64 {
    let b = nonlinearity_constants(nl).weighted_max_lower;
    let k = nl.degree();
    let mut denom = norm.powi(k as i32);
    let mut sum = 0.0;
    for j in 1..k {
        sum += norm.powi(j as i32);
    }
    denom += b * sum;
    c_const * recip_or_inf(denom)
}

/// Pure-power lifespan `c / ||U0||^k`.
pub fn size_lifespan_power(k: u32, norm: f64, c_const: f64) -> f64 {
    c_const * recip_or_inf(norm.powi(k as i32))
}

/// Scale of the distance between the solution and the slow-scale soliton:
/// `max(eps^2, eps^{k+1})`.
pub fn proximity_scale(k: u32, epsilon: f64) -> f64 {
    let e2 = epsilon * epsilon;
    let ek1 = epsilon.powi(k as i32 + 1);
    e2.max(ek1)
}

fn recip_or_inf(x: f64) -> f64 {
    if x > 0.0 {
        1.0 / x
    } else {
        f64::INFINITY
    }
}

/// Every quantitative prediction for one scenario, ready to serialize.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BoundReport {
    /// Leading degree of the nonlinearity.
    pub k: u32,
    pub nu: f64,
    pub constants: NonlinearityConstants,
    /// `H^2` norm of the initial datum (plays both epsilon roles here: the
    /// scenarios all start both equations from the same profile).
    pub h2_initial: f64,
    /// General-form proximity timescale.
    pub proximity_timescale: ExtReal,
    /// Pure-power proximity timescale `min(eps^{-k}, eps^{-1})`.
    pub proximity_timescale_power: ExtReal,
    /// `c / eps^2`, the window on which the slow-scale description is
    /// expected to hold.
    pub slow_window: ExtReal,
    /// General-form lifespan for the size estimate.
    pub size_lifespan: ExtReal,
    /// Pure-power lifespan `c / eps^k`.
    pub size_lifespan_power: ExtReal,
    /// Expected size of the distance to the slow-scale soliton.
    pub proximity_scale: f64,
    /// The doubling bound `2 eps` checked by the size monitor.
    pub size_bound: f64,
    /// The undetermined constant all timescales are multiplied by.
    pub c_const: f64,
}

/// Assemble the report for a model started from a datum of `H^2` size
/// `epsilon` (used for both the full and the slow-scale equation).
pub fn bound_report(model: &ModelSpec, epsilon: f64, c_const: f64) -> BoundReport {
    let nl = &model.nonlinearity;
    let k = nl.degree();
    BoundReport {
        k,
        nu: model.nu,
        constants: nonlinearity_constants(nl),
        h2_initial: epsilon,
        proximity_timescale: ExtReal(proximity_timescale(nl, epsilon, epsilon, c_const)),
        proximity_timescale_power: ExtReal(proximity_timescale_power(k, epsilon, epsilon, c_const)),
        slow_window: ExtReal(c_const * recip_or_inf(epsilon * epsilon)),
        size_lifespan: ExtReal(size_lifespan(nl, epsilon, c_const)),
        size_lifespan_power: ExtReal(size_lifespan_power(k, epsilon, c_const)),
        proximity_scale: proximity_scale(k, epsilon),
        size_bound: 2.0 * epsilon,
        c_const,
    }
}
