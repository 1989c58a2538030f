//! Duan-type separability tests, the sudden-death time of the raw test, and the PPT measure
//! from the symplectic spectrum of the partially transposed covariance matrix.
//!
//! With `u = |a| x1 + x2/a` and `v = |a| p1 - p2/a`, every separable state obeys
//! `<du^2>/L^2 + L^2 <dv^2>/hbar^2 >= a^2 + 1/a^2`. Minimizing the left side over `L` gives the
//! product form `2 sqrt(<du^2><dv^2>)/hbar`, which for `a = +1` and `a = -1` reduces to
//! `<X^2><p^2> >= hbar^2/16` and `<x^2><P^2> >= hbar^2`.

use serde::Serialize;

use crate::covariance::{Invariants, StandardForm};
use crate::error::{positive, Error, Result};
use crate::model::{make_state, moments, ModelParams, SecondMoments};
use crate::scalar::close;
use crate::Real;

/// Sign of the Duan parameter `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `a = +1`: centre-of-mass position against relative momentum.
    Plus,
    /// `a = -1`: relative position against total momentum.
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DuanResult<T> {
    pub lhs: T,
    pub rhs: T,
    /// Separability condition holds; `false` certifies entanglement.
    pub satisfied: bool,
    #[serde(skip)]
    pub branch: Branch,
}

impl<T: Real> DuanResult<T> {
    fn new(lhs: T, rhs: T, branch: Branch) -> Self {
        Self { lhs, rhs, satisfied: lhs >= rhs, branch }
    }
}

/// `(<du^2>, <dv^2>)` for the EPR-like pair built with parameter `a`.
fn epr_variances<T: Real>(mom: &SecondMoments<T>, a: T) -> (T, T) {
    let s = a.abs();
    let r = a.recip();
    let two = T::lit(2.0);
    let du = s * s * mom.xx11 + r * r * mom.xx22 + two * s * r * mom.xx12;
    let dv = s * s * mom.pp11 + r * r * mom.pp22 - two * s * r * mom.pp12;
    (du, dv)
}

/// Left side of the sum-form Duan inequality; compare against `a^2 + 1/a^2`.
pub fn duan_quadratic<T: Real>(mom: &SecondMoments<T>, a: T, scale: T, hbar: T) -> Result<T> {
    if a == T::zero() || !a.is_finite() {
        return Err(Error::ZeroDuanParameter);
    }
    positive("L", scale)?;
    positive("hbar", hbar)?;
    let (du, dv) = epr_variances(mom, a);
    Ok(du / (scale * scale) + scale * scale * dv / (hbar * hbar))
}

/// `min_L` of [`duan_quadratic`]: `2 sqrt(<du^2><dv^2>) / hbar`.
pub fn duan_product_bound<T: Real>(mom: &SecondMoments<T>, a: T, hbar: T) -> Result<T> {
    if a == T::zero() || !a.is_finite() {
        return Err(Error::ZeroDuanParameter);
    }
    let (du, dv) = epr_variances(mom, a);
    Ok(T::lit(2.0) * (du * dv).sqrt() / hbar)
}

/// Product-form tests for both branches, returned as `(plus, minus)`.
pub fn duan_products<T: Real>(mom: &SecondMoments<T>, hbar: T) -> (DuanResult<T>, DuanResult<T>) {
    let h2 = hbar * hbar;
    (
        DuanResult::new(mom.x_cm_sq * mom.p_rel_sq, h2 / T::lit(16.0), Branch::Plus),
        DuanResult::new(mom.x_rel_sq * mom.p_cm_sq, h2, Branch::Minus),
    )
}

/// Time at which the raw `a = -1` product test stops detecting entanglement.
///
/// `None` when `2d < sigma`: that branch is then never violated. At `2d = sigma` the answer is 0.
pub fn esd_time<T: Real>(params: &ModelParams<T>) -> Result<Option<T>> {
    params.validate()?;
    let ModelParams { sigma, d, mass, hbar } = *params;
    let gap = T::lit(4.0) * d * d - sigma * sigma;
    if gap < T::zero() {
        return Ok(None);
    }
    Ok(Some(mass / hbar * (sigma * sigma * gap).sqrt()))
}

/// Product tests on the barred variables `x_i - p_i t/m`, i.e. after the local canonical
/// transformations that undo free spreading. The verdict is independent of `t`.
pub fn duan_locc<T: Real>(params: &ModelParams<T>, t: T) -> Result<(DuanResult<T>, DuanResult<T>)> {
    let mom = moments(&make_state(*params, t)?);
    let k = -t / params.mass;
    Ok(duan_products(&mom.sheared(k, k), params.hbar))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymplecticResult<T> {
    /// Larger symplectic eigenvalue of the partial transpose.
    pub nu1: T,
    pub nu2: T,
    pub nu_min: T,
    /// `max(0, -ln(2 nu_min))`, natural log.
    pub entanglement: T,
}

/// PPT measure from the partially transposed symplectic spectrum.
///
/// Transposing mode 2 flips the sign of `det C`, so `nu^2` are the roots of
/// `x^2 - (det G + det H - 2 det C) x + det M = 0`. When `g = h` the roots factor as
/// `(g + c)(g - c')` and `(g - c)(g + c')`; those products are used for the returned values since
/// the quadratic has a double root at the separable point, where solving it directly loses half
/// the digits.
pub fn symplectic_measure<T: Real>(sf: &StandardForm<T>, inv: &Invariants<T>) -> Result<SymplecticResult<T>> {
    let delta = inv.det_g + inv.det_h - T::lit(2.0) * inv.det_c;
    let det = inv.det_m;
    if !(det > T::zero()) || !(delta > T::zero()) {
        return Err(Error::InvalidCovariance(format!(
            "det M = {:e}, det G + det H - 2 det C = {:e}",
            det.as_f64(),
            delta.as_f64()
        )));
    }
    let mut disc = delta * delta - T::lit(4.0) * det;
    if disc < T::zero() {
        if -disc > T::tol(1e-12) * delta * delta {
            return Err(Error::InvalidCovariance("complex symplectic eigenvalues".into()));
        }
        disc = T::zero();
    }
    // stable root pair: large root directly, small one from the product
    let mut big = (delta + disc.sqrt()) / T::lit(2.0);
    let mut small = det / big;

    let StandardForm { g, h, c, c_prime } = *sf;
    if close(g, h, T::tol(1e-12), T::zero()) {
        let x_a = (g + c) * (g - c_prime);
        let x_b = (g - c) * (g + c_prime);
        // loose: both inputs normally come from the same covariance matrix, and det M carries
        // the rounding of much larger products
        let scale = g * g;
        let consistent = x_a > T::zero()
            && x_b > T::zero()
            && (x_a + x_b - delta).abs() <= T::tol(1e-6) * scale
            && (x_a * x_b - det).abs() <= T::tol(1e-6) * scale * scale;
        if !consistent {
            return Err(Error::InvalidCovariance("standard form does not match the invariants".into()));
        }
        (big, small) = (x_a.max(x_b), x_a.min(x_b));
    }
    let (nu1, nu2) = (big.sqrt(), small.sqrt());
    let nu_min = nu2;
    let entanglement = (-(T::lit(2.0) * nu_min).ln()).max(T::zero());
    Ok(SymplecticResult { nu1, nu2, nu_min, entanglement })
}
