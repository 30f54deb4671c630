//! Equation family `U_t + nu U_xxx + nu F(U) U_x = 0` with polynomial `F`.
//!
//! `F(U) = sum_{j=1..k} a_j U^j`, `F(0) = 0`, `a_k != 0`. The advective term
//! is assembled in flux form `nu d/dx G(U)` with `G(v) = sum_j a_j v^{j+1} /
//! (j+1)`, which keeps the discrete mass exactly conserved. `nu = 1` is the
//! standard family; `nu < 1` with `a = [1]` is the rescaled KdV equation.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::spectral::{apply_derivative_symbol, forward, inverse, zero_top_third, RealField};

/// Fields whose magnitude passes this threshold are treated as blown up.
pub const BLOWUP_THRESHOLD: f64 = 1e8;

/// Coefficients `a_1..a_k` of `F(U) = sum a_j U^j`; the leading one is nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialNonlinearity {
    a: Vec<f64>,
}

impl PolynomialNonlinearity {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidParameter(
                "nonlinearity needs at least one coefficient".into(),
            ));
        }
        if a.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(
                "nonlinearity coefficients must be finite".into(),
            ));
        }
        if *a.last().unwrap() == 0.0 {
            return Err(Error::InvalidParameter(
                "leading nonlinearity coefficient must be nonzero".into(),
            ));
        }
        Ok(PolynomialNonlinearity { a })
    }

    /// Pure power `F(U) = U^k`.
    pub fn monomial(k: u32) -> Self {
        let mut a = vec![0.0; k as usize];
        a[k as usize - 1] = 1.0;
        PolynomialNonlinearity { a }
    }

    /// Degree `k` of the leading term.
    pub fn degree(&self) -> u32 {
        self.a.len() as u32
    }

    /// `a_1..a_k` in order.
    pub fn coefficients(&self) -> &[f64] {
        &self.a
    }

    /// `F(u)`, evaluated by Horner on `u * (a_1 + u * (a_2 + ...))`.
    pub fn eval(&self, u: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.a.iter().rev() {
            acc = acc * u + c;
        }
        acc * u
    }

    /// Flux antiderivative `G(u) = sum a_j u^{j+1} / (j+1)`, `G(0) = 0`.
    pub fn eval_flux(&self, u: f64) -> f64 {
        let mut acc = 0.0;
        for (j, &c) in self.a.iter().enumerate().rev() {
            acc = acc * u + c / (j as f64 + 2.0);
        }
        acc * u * u
    }

    /// Upper bound for `|F'|` on `[-amplitude, amplitude]`,
    /// `sum j |a_j| amplitude^{j-1}`.
    pub fn derivative_bound(&self, amplitude: f64) -> f64 {
        let amp = amplitude.abs();
        self.a
            .iter()
            .enumerate()
            .map(|(i, &c)| (i as f64 + 1.0) * c.abs() * amp.powi(i as i32))
            .sum()
    }
}

/// Pointwise `F(U)`; overflow to a non-finite value reports blow-up.
pub fn eval_f(nl: &PolynomialNonlinearity, field: &RealField) -> Result<RealField> {
    let values: Vec<f64> = field.values().iter().map(|&u| nl.eval(u)).collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    Ok(RealField::from_raw(field.grid(), values))
}

/// One member of the family: nonlinearity plus dispersion scale `nu`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub nonlinearity: PolynomialNonlinearity,
    pub nu: f64,
}

impl ModelSpec {
    pub fn new(nonlinearity: PolynomialNonlinearity, nu: f64) -> Result<Self> {
        if !(nu.is_finite() && nu > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "dispersion scale nu must be positive and finite, got {nu}"
            )));
        }
        Ok(ModelSpec { nonlinearity, nu })
    }

    /// `U_t + U_xxx + U U_x = 0`.
    pub fn kdv() -> Self {
        ModelSpec {
            nonlinearity: PolynomialNonlinearity::monomial(1),
            nu: 1.0,
        }
    }

    /// `U_t + U_xxx + U^2 U_x = 0`.
    pub fn mkdv() -> Self {
        ModelSpec {
            nonlinearity: PolynomialNonlinearity::monomial(2),
            nu: 1.0,
        }
    }

    /// Pure power `U_t + U_xxx + U^k U_x = 0`.
    pub fn gkdv(k: u32) -> Self {
        ModelSpec {
            nonlinearity: PolynomialNonlinearity::monomial(k.max(1)),
            nu: 1.0,
        }
    }

    /// `u_t + nu u_xxx + nu u u_x = 0`, the slow-scale comparison equation.
    pub fn rescaled_kdv(nu: f64) -> Result<Self> {
        ModelSpec::new(PolynomialNonlinearity::monomial(1), nu)
    }
}

/// Right-hand side `-nu U_xxx - nu d/dx G(U)` with a dealiased flux.
pub fn rhs(model: &ModelSpec, field: &RealField) -> Result<RealField> {
    let grid = field.grid().clone();
    let u_hat = forward(field);

    // Flux route: truncate the field, evaluate G pointwise, re-truncate.
    let mut ud_hat = u_hat.clone();
    zero_top_third(ud_hat.coeffs_mut());
    let ud = inverse(&ud_hat);
    let g_values: Vec<f64> = ud
        .values()
        .iter()
        .map(|&u| model.nonlinearity.eval_flux(u))
        .collect();
    if let Some(i) = g_values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let mut g_hat = forward(&RealField::from_raw(&grid, g_values));
    zero_top_third(g_hat.coeffs_mut());
    apply_derivative_symbol(g_hat.coeffs_mut(), grid.wavenumbers(), 1);

    let mut out = u_hat;
    apply_derivative_symbol(out.coeffs_mut(), grid.wavenumbers(), 3);
    for (o, g) in out.coeffs_mut().iter_mut().zip(g_hat.coeffs()) {
        *o = -model.nu * (*o + g);
    }
    Ok(inverse(&out))
}

/// Discrete invariants of the flow.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConservedQuantities {
    /// `int U dx` by the rectangle rule.
    pub mass: f64,
    /// `int U^2 dx`, i.e. the squared L2 norm.
    pub momentum: f64,
}

pub fn conserved_quantities(field: &RealField) -> ConservedQuantities {
    let dx = field.grid().spacing();
    let mut mass = 0.0;
    let mut momentum = 0.0;
    for &v in field.values() {
        mass += v;
        momentum += v * v;
    }
    ConservedQuantities {
        mass: mass * dx,
        momentum: momentum * dx,
    }
}

/// True if any entry is non-finite or beyond [`BLOWUP_THRESHOLD`].
pub fn out_of_range(values: &[f64]) -> bool {
    values
        .iter()
        .any(|v| !v.is_finite() || v.abs() > BLOWUP_THRESHOLD)
}

/// Complex-buffer variant used by the stepping kernel.
pub(crate) fn out_of_range_complex(values: &[Complex<f64>], scale: f64) -> bool {
    values
        .iter()
        .any(|c| !(c.re.is_finite() && c.im.is_finite()) || c.re.abs() * scale > BLOWUP_THRESHOLD)
}
