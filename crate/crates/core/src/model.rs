//! The symmetric two-particle Gaussian pure state and its free evolution.
//!
//! The wave function is written in the particle coordinates as
//!
//! ```text
//! psi(x1, x2; t) = N exp(-(A11 x1^2 + 2 A12 x1 x2 + A22 x2^2) / 4)
//! ```
//!
//! with complex coefficients `Aij(t)`. The relative coordinate `x = x1 - x2` carries a Gaussian of
//! width `sigma` (reduced mass `m/2`), the centre of mass `X = (x1 + x2)/2` one of width `d`
//! (total mass `2m`). Each factor spreads as a free packet, so
//!
//! ```text
//! sigma^2(t)   = sigma^2 + hbar^2 t^2 / (m^2 sigma^2)
//! sigma_d^2(t) = d^2     + hbar^2 t^2 / (16 m^2 d^2)
//! ```

use num_complex::Complex;

use crate::error::{finite, positive, Result};
use crate::Real;

/// Physical inputs of the state: relative width `sigma`, centre-of-mass width `d`, the mass of
/// each particle and `hbar`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T> {
    pub sigma: T,
    pub d: T,
    pub mass: T,
    pub hbar: T,
}

impl<T: Real> ModelParams<T> {
    pub fn new(sigma: T, d: T, mass: T, hbar: T) -> Result<Self> {
        let p = Self { sigma, d, mass, hbar };
        p.validate()?;
        Ok(p)
    }

    /// Parameters with `mass = hbar = 1`.
    pub fn natural(sigma: T, d: T) -> Result<Self> {
        Self::new(sigma, d, T::one(), T::one())
    }

    pub fn validate(&self) -> Result<()> {
        positive("sigma", self.sigma)?;
        positive("d", self.d)?;
        positive("mass", self.mass)?;
        positive("hbar", self.hbar)?;
        let r = self.ratio();
        positive("2d/sigma", r)?;
        Ok(())
    }

    /// `R = 2d / sigma`; the state is a product state iff `R = 1`.
    pub fn ratio(&self) -> T {
        T::lit(2.0) * self.d / self.sigma
    }

    /// Mass conjugate to the relative coordinate.
    pub fn reduced_mass(&self) -> T {
        self.mass / T::lit(2.0)
    }

    /// Mass conjugate to the centre-of-mass coordinate.
    pub fn total_mass(&self) -> T {
        T::lit(2.0) * self.mass
    }

    /// Real `(a11, a12)` at `t = 0`; `a22 = a11`.
    pub fn initial_coefficients(&self) -> (T, T) {
        let rel = (self.sigma * self.sigma).recip();
        let cm = (T::lit(4.0) * self.d * self.d).recip();
        (rel + cm, cm - rel)
    }

    pub(crate) fn sigma_sq_at(&self, t: T) -> T {
        let s2 = self.sigma * self.sigma;
        let k = self.hbar * t / self.mass;
        s2 + k * k / s2
    }

    pub(crate) fn sigma_d_sq_at(&self, t: T) -> T {
        let d2 = self.d * self.d;
        let k = self.hbar * t / self.mass;
        d2 + k * k / (T::lit(16.0) * d2)
    }
}

/// Complex quadratic-form coefficients of the evolved wave function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadCoeffs<T> {
    pub a11: Complex<T>,
    pub a12: Complex<T>,
    pub a22: Complex<T>,
}

/// The state at time `t`, with its spreading widths and quadratic form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolvedState<T> {
    params: ModelParams<T>,
    t: T,
    sigma_sq_t: T,
    sigma_d_sq_t: T,
    quad: QuadCoeffs<T>,
}

impl<T: Real> EvolvedState<T> {
    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    pub fn t(&self) -> T {
        self.t
    }

    /// `<x^2>` of the relative coordinate at time `t`.
    pub fn sigma_sq_t(&self) -> T {
        self.sigma_sq_t
    }

    /// `<X^2>` of the centre of mass at time `t`.
    pub fn sigma_d_sq_t(&self) -> T {
        self.sigma_d_sq_t
    }

    pub fn quad_coeffs(&self) -> &QuadCoeffs<T> {
        &self.quad
    }

    /// Normalized wave function `psi(x1, x2; t)`.
    ///
    /// The global phase is fixed so that `psi(0, 0; t)` is real and positive.
    pub fn amplitude(&self, x1: T, x2: T) -> Complex<T> {
        let q = &self.quad;
        let form = q.a11 * (x1 * x1) + q.a12 * (T::lit(2.0) * x1 * x2) + q.a22 * (x2 * x2);
        (-form / T::lit(4.0)).exp() * self.norm()
    }

    fn norm(&self) -> T {
        let q = &self.quad;
        let det_re = q.a11.re * q.a22.re - q.a12.re * q.a12.re;
        det_re.sqrt().sqrt() / (T::lit(2.0) * T::PI()).sqrt()
    }
}

/// Evolves the `t = 0` state freely for time `t` (negative `t` is allowed).
pub fn make_state<T: Real>(params: ModelParams<T>, t: T) -> Result<EvolvedState<T>> {
    params.validate()?;
    finite("t", t)?;
    let ModelParams { sigma, d, mass, hbar } = params;
    let one = Complex::new(T::one(), T::zero());
    // 1 + i hbar t / (2 mu s^2) for each factor
    let tau_rel = Complex::new(T::one(), hbar * t / (mass * sigma * sigma));
    let tau_cm = Complex::new(T::one(), hbar * t / (T::lit(4.0) * mass * d * d));
    let rel = one / (tau_rel * (sigma * sigma));
    let cm = one / (tau_cm * (T::lit(4.0) * d * d));
    let quad = QuadCoeffs { a11: rel + cm, a12: cm - rel, a22: rel + cm };
    Ok(EvolvedState {
        params,
        t,
        sigma_sq_t: params.sigma_sq_at(t),
        sigma_d_sq_t: params.sigma_d_sq_at(t),
        quad,
    })
}

/// Real part of `A11(t)`: `1/sigma^2(t) + 1/(4 sigma_d^2(t))`.
pub fn coeff_a11<T: Real>(state: &EvolvedState<T>) -> T {
    state.sigma_sq_t.recip() + (T::lit(4.0) * state.sigma_d_sq_t).recip()
}

/// Real part of `A12(t)`: `-1/sigma^2(t) + 1/(4 sigma_d^2(t))`.
pub fn coeff_a12<T: Real>(state: &EvolvedState<T>) -> T {
    (T::lit(4.0) * state.sigma_d_sq_t).recip() - state.sigma_sq_t.recip()
}

/// First and second moments of the evolved state. All first moments vanish.
///
/// `xp11_sym` is `<x1 p1 + p1 x1>/2`; the mixed terms `xp12 = <x1 p2>`, `xp21 = <x2 p1>` need no
/// symmetrization. The relative/centre-of-mass block holds `<x^2>`, `<X^2>`, `<p^2>` and `<P^2>`
/// with `p = (p1 - p2)/2` and `P = p1 + p2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondMoments<T> {
    pub xx11: T,
    pub xx22: T,
    pub xx12: T,
    pub pp11: T,
    pub pp22: T,
    pub pp12: T,
    pub xp12: T,
    pub xp21: T,
    pub xp11_sym: T,
    pub xp22_sym: T,
    pub x_rel_sq: T,
    pub x_cm_sq: T,
    pub p_rel_sq: T,
    pub p_cm_sq: T,
}

impl<T: Real> SecondMoments<T> {
    /// Moments after the local shears `x_i -> x_i + k_i p_i` (momenta unchanged).
    ///
    /// With `k_1 = k_2 = -t/m` this undoes free evolution for time `t`.
    pub fn sheared(&self, k1: T, k2: T) -> Self {
        let two = T::lit(2.0);
        let mut out = *self;
        out.xx11 = self.xx11 + two * k1 * self.xp11_sym + k1 * k1 * self.pp11;
        out.xx22 = self.xx22 + two * k2 * self.xp22_sym + k2 * k2 * self.pp22;
        out.xx12 = self.xx12 + k2 * self.xp12 + k1 * self.xp21 + k1 * k2 * self.pp12;
        out.xp12 = self.xp12 + k1 * self.pp12;
        out.xp21 = self.xp21 + k2 * self.pp12;
        out.xp11_sym = self.xp11_sym + k1 * self.pp11;
        out.xp22_sym = self.xp22_sym + k2 * self.pp22;
        let (x, big_x, p, big_p) = out.relative_from_particles();
        out.x_rel_sq = x;
        out.x_cm_sq = big_x;
        out.p_rel_sq = p;
        out.p_cm_sq = big_p;
        out
    }

    /// `(<x^2>, <X^2>, <p^2>, <P^2>)` recomputed from the particle moments.
    pub fn relative_from_particles(&self) -> (T, T, T, T) {
        let two = T::lit(2.0);
        let four = T::lit(4.0);
        (
            self.xx11 + self.xx22 - two * self.xx12,
            (self.xx11 + self.xx22 + two * self.xx12) / four,
            (self.pp11 + self.pp22 - two * self.pp12) / four,
            self.pp11 + self.pp22 + two * self.pp12,
        )
    }
}

pub fn moments<T: Real>(state: &EvolvedState<T>) -> SecondMoments<T> {
    let p = &state.params;
    let quarter = T::lit(0.25);
    let hbar_sq = p.hbar * p.hbar;
    let inv_rel = (p.sigma * p.sigma).recip();
    let inv_cm = (T::lit(4.0) * p.d * p.d).recip();
    let xx_diag = state.sigma_d_sq_t + quarter * state.sigma_sq_t;
    let xx_off = state.sigma_d_sq_t - quarter * state.sigma_sq_t;
    let pp_diag = quarter * hbar_sq * (inv_rel + inv_cm);
    let pp_off = quarter * hbar_sq * (inv_cm - inv_rel);
    let shear = quarter * hbar_sq * state.t / p.mass;
    let xp_cross = shear * (inv_cm - inv_rel);
    let xp_sym = shear * (inv_rel + inv_cm);
    SecondMoments {
        xx11: xx_diag,
        xx22: xx_diag,
        xx12: xx_off,
        pp11: pp_diag,
        pp22: pp_diag,
        pp12: pp_off,
        xp12: xp_cross,
        xp21: xp_cross,
        xp11_sym: xp_sym,
        xp22_sym: xp_sym,
        x_rel_sq: state.sigma_sq_t,
        x_cm_sq: state.sigma_d_sq_t,
        p_rel_sq: hbar_sq / (T::lit(4.0) * p.sigma * p.sigma),
        p_cm_sq: hbar_sq / (T::lit(4.0) * p.d * p.d),
    }
}
