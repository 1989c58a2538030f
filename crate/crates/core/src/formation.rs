//! Reduced-density-matrix spectrum, von Neumann entropy and entanglement of formation.

use crate::spectrum::{Neumaier, PtSpectrum};
use crate::Real;

/// Spectrum `lambda_n = lambda0 beta^(2n)` shared by both single-particle reductions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedSpectrum<T> {
    pub lambda0: T,
    pub beta: T,
    /// `R = (1 + beta)/(1 - beta) >= 1`.
    pub ratio: T,
}

pub fn reduced_spectrum<T: Real>(spec: &PtSpectrum<T>) -> ReducedSpectrum<T> {
    let one = T::one();
    ReducedSpectrum {
        lambda0: spec.lambda0,
        beta: spec.beta,
        ratio: (one + spec.beta) / (one - spec.beta),
    }
}

impl<T: Real> ReducedSpectrum<T> {
    pub fn eigenvalue(&self, n: usize) -> T {
        self.lambda0 * self.beta.powi(2 * n as i32)
    }

    /// All eigenvalues in decreasing order (they underflow to 0 eventually).
    pub fn iter(&self) -> impl Iterator<Item = T> {
        let step = self.beta * self.beta;
        std::iter::successors(Some(self.lambda0), move |&l| Some(l * step))
    }

    /// `sum_n n lambda_n = beta^2 / (1 - beta^2)`.
    pub fn mean_occupation(&self) -> T {
        let b2 = self.beta * self.beta;
        b2 / (T::one() - b2)
    }

    /// `Tr rho_1^2 = lambda0^2 / (1 - beta^4)`.
    pub fn purity(&self) -> T {
        let b2 = self.beta * self.beta;
        self.lambda0 * self.lambda0 / (T::one() - b2 * b2)
    }
}

/// Below this `|R - 1|` the closed form switches to its leading-order expansion.
const NEAR_SEPARABLE: f64 = 1e-8;

/// Von Neumann entropy of either reduction, natural log, from the closed form in `R`:
/// `ln R + 2 ln((1 + R)/(2R)) + ((R - 1)^2 / (2R)) ln((R + 1)/(R - 1))`.
pub fn entropy<T: Real>(red: &ReducedSpectrum<T>) -> T {
    entropy_closed_form(red.ratio)
}

/// Closed-form entropy as a function of `R = 2d/sigma`; `R < 1` is mapped to `1/R`.
pub fn entropy_closed_form<T: Real>(ratio: T) -> T {
    let one = T::one();
    let two = T::lit(2.0);
    let r = if ratio < one { ratio.recip() } else { ratio };
    let eps = r - one;
    if eps < T::lit(NEAR_SEPARABLE) {
        if eps <= T::zero() {
            return T::zero();
        }
        // beta ~ eps/2: S = beta^2 (1 - 2 ln beta) to second order
        return eps * eps / T::lit(4.0) + eps * eps / two * (two / eps).ln();
    }
    // (1 + R)/(2R) = 1 - (R - 1)/(2R); ln_1p keeps the O(eps^2) result from cancelling away
    eps.ln_1p() + two * (-eps / (two * r)).ln_1p() + eps * eps / (two * r) * ((r + one) / eps).ln()
}

/// `-sum lambda_n ln lambda_n`, truncated once `lambda_n < 1e-18`; `0 ln 0 = 0`.
pub fn entropy_series<T: Real>(red: &ReducedSpectrum<T>) -> T {
    if red.beta == T::zero() {
        return T::zero();
    }
    let cutoff = T::lit(1e-18);
    let ln_l0 = red.lambda0.ln();
    let ln_b2 = T::lit(2.0) * red.beta.ln();
    let mut acc = Neumaier::default();
    let mut lambda = red.lambda0;
    let mut n = 0usize;
    while lambda >= cutoff && lambda > T::zero() {
        acc.add(-lambda * (ln_l0 + T::lit(n as f64) * ln_b2));
        n += 1;
        lambda = red.lambda0 * (T::lit(n as f64) * ln_b2).exp();
    }
    acc.total()
}

/// For a pure bipartite state the entanglement of formation is the reduced entropy.
pub fn entanglement_of_formation<T: Real>(red: &ReducedSpectrum<T>) -> T {
    entropy(red)
}
