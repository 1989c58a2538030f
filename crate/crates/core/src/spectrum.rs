//! Analytic eigenvalues of the partially transposed density matrix.
//!
//! The real Gaussian `psi ~ exp(-(a11 (x1^2 + x2^2) + 2 a12 x1 x2)/4)` has the Mehler (Schmidt)
//! expansion `sqrt(1 - beta^2) sum_n (s beta)^n phi_n(x1) phi_n(x2)` with Hermite scale
//! `gamma = sqrt(a11^2 - a12^2)/2` and `s = -sign(a12)`. The partial transpose then has
//! eigenvalues `lambda0 beta^(2n)` on `phi_n phi_n` and `+-lambda0 beta^(m+n)` on the
//! (anti)symmetrized pairs `phi_m phi_n +- phi_n phi_m`, with `lambda0 = 1 - beta^2`.

use crate::error::{positive, Error, Result};
use crate::hermite::{hermite_functions, HermiteFunctions};
use crate::model::ModelParams;
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtSpectrum<T> {
    pub lambda0: T,
    pub beta: T,
    pub gamma: T,
    /// `+1` when `a12 <= 0`, `-1` otherwise; the second particle's Hermite functions pick up
    /// `(-1)^n` in the latter case.
    pub schmidt_sign: T,
}

pub fn pt_spectrum<T: Real>(a11: T, a12: T) -> Result<PtSpectrum<T>> {
    positive("a11", a11)?;
    if !a12.is_finite() || a12.abs() >= a11 {
        return Err(Error::NonNormalizable { a11: a11.as_f64(), a12: a12.as_f64() });
    }
    // a11 - D = a12^2 / (a11 + D) avoids cancellation for small a12
    let root = ((a11 - a12) * (a11 + a12)).sqrt();
    let denom = a11 + root;
    let beta_sq = a12 * a12 / (denom * denom);
    Ok(PtSpectrum {
        lambda0: T::lit(2.0) * root / denom,
        beta: beta_sq.sqrt(),
        gamma: root / T::lit(2.0),
        schmidt_sign: if a12 > T::zero() { -T::one() } else { T::one() },
    })
}

impl<T: Real> PtSpectrum<T> {
    /// Spectrum of the symmetric state from its `t = 0` coefficients; free evolution is a local
    /// unitary and leaves it unchanged.
    ///
    /// Built from `sigma` and `d` directly rather than through the rounded coefficients, whose
    /// difference `a11 - |a12|` loses `~R^2` ulps: `D = 1/(sigma d)`,
    /// `beta = |2d - sigma|/(2d + sigma)`, `lambda0 = 8 sigma d/(2d + sigma)^2`.
    pub fn from_params(params: &ModelParams<T>) -> Result<Self> {
        params.validate()?;
        let ModelParams { sigma, d, .. } = *params;
        let two_d = T::lit(2.0) * d;
        let sum = two_d + sigma;
        Ok(PtSpectrum {
            lambda0: T::lit(4.0) * sigma * two_d / (sum * sum),
            beta: (two_d - sigma).abs() / sum,
            gamma: (T::lit(2.0) * sigma * d).recip(),
            schmidt_sign: if sigma > two_d { -T::one() } else { T::one() },
        })
    }

    /// Eigenvalues by total degree `m + n`, then `m`, `+` before `-`.
    pub fn eigenvalues(&self) -> PtEigenvalues<T> {
        PtEigenvalues { lambda0: self.lambda0, beta: self.beta, degree: 0, m: 0, minus_pending: false, power: T::one() }
    }

    /// First `count` eigenvalues in enumeration order.
    pub fn head(&self, count: usize) -> Vec<T> {
        self.eigenvalues().take(count).map(|e| e.value).collect()
    }

    /// Sums over all eigenvalues with `|lambda| >= cutoff`, at most `max_terms` of them.
    pub fn truncated_sums(&self, cutoff: T, max_terms: usize) -> TruncatedSums<T> {
        let mut trace = Neumaier::default();
        let mut neg = Neumaier::default();
        let mut terms = 0;
        let mut max_degree = 0;
        let mut exhausted = true;
        for e in self.eigenvalues() {
            if e.value.abs() < cutoff || (self.beta == T::zero() && e.degree > 0) {
                break;
            }
            if terms == max_terms {
                exhausted = false;
                break;
            }
            trace.add(e.value);
            if e.value < T::zero() {
                neg.add(-e.value);
            }
            terms += 1;
            max_degree = e.degree;
        }
        let tail_bound = self.abs_tail_after(if terms == 0 { None } else { Some(max_degree) });
        TruncatedSums { trace: trace.total(), negativity: neg.total(), terms, max_degree, tail_bound, capped: !exhausted }
    }

    /// Bound on `sum |lambda|` over all degrees beyond `degree` (everything when `None`).
    fn abs_tail_after(&self, degree: Option<usize>) -> T {
        let b = self.beta;
        let one = T::one();
        let start = degree.map_or(0, |s| s + 1);
        if b == T::zero() {
            return if start == 0 { self.lambda0 } else { T::zero() };
        }
        // sum_{s >= S} (s + 1) b^s = b^S ((S + 1) - S b) / (1 - b)^2
        let s = T::lit(start as f64);
        self.lambda0 * b.powi(start as i32) * ((s + one) - s * b) / ((one - b) * (one - b))
    }

    /// Eigenfunctions on the subspace spanned by `phi_m phi_n` and `phi_n phi_m`.
    pub fn eigenfunctions(&self, m: usize, n: usize) -> Vec<PtEigenfunction<T>> {
        pt_eigenfunctions(self, m, n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value<T: Real>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtEigenvalue<T> {
    pub m: usize,
    pub n: usize,
    pub degree: usize,
    pub sign: Sign,
    pub value: T,
}

/// Unbounded enumeration of the signed spectrum, `m <= n` labels each pair.
#[derive(Debug, Clone)]
pub struct PtEigenvalues<T> {
    lambda0: T,
    beta: T,
    degree: usize,
    m: usize,
    minus_pending: bool,
    power: T,
}

impl<T: Real> Iterator for PtEigenvalues<T> {
    type Item = PtEigenvalue<T>;

    fn next(&mut self) -> Option<Self::Item> {
        let (m, n, s) = (self.m, self.degree - self.m, self.degree);
        let mag = self.lambda0 * self.power;
        if self.minus_pending {
            self.minus_pending = false;
            self.advance();
            return Some(PtEigenvalue { m, n, degree: s, sign: Sign::Minus, value: -mag });
        }
        if m == n {
            self.advance();
        } else {
            self.minus_pending = true;
        }
        Some(PtEigenvalue { m, n, degree: s, sign: Sign::Plus, value: mag })
    }
}

impl<T: Real> PtEigenvalues<T> {
    fn advance(&mut self) {
        self.m += 1;
        if 2 * self.m > self.degree {
            self.degree += 1;
            self.m = 0;
            self.power = self.power * self.beta;
        }
    }
}

/// Partial sums of the enumerated spectrum and how much was left out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedSums<T> {
    pub trace: T,
    /// `sum |lambda|` over negative eigenvalues.
    pub negativity: T,
    pub terms: usize,
    pub max_degree: usize,
    /// Upper bound on `sum |lambda|` beyond `max_degree`.
    pub tail_bound: T,
    /// The term cap stopped the enumeration before the cutoff did.
    pub capped: bool,
}

/// Compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Neumaier<T> {
    sum: T,
    comp: T,
}

impl<T: Real> Neumaier<T> {
    pub(crate) fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> T {
        self.sum + self.comp
    }
}

/// Default enumeration cutoff and term cap.
pub const TAIL_CUTOFF: f64 = 1e-15;
pub const MAX_TERMS: usize = 10_000;

/// Absolute sum of the negative eigenvalues, `beta / (1 - beta)`.
pub fn negativity<T: Real>(spec: &PtSpectrum<T>) -> T {
    spec.beta / (T::one() - spec.beta)
}

/// `ln(2N + 1) = ln((1 + beta)/(1 - beta))`, which is `|ln(2d/sigma)|` for the symmetric state.
pub fn log_negativity<T: Real>(spec: &PtSpectrum<T>) -> T {
    (T::lit(2.0) * negativity(spec) + T::one()).ln()
}

/// `sqrt(1 - beta^2) sum_{n < n_terms} beta^n phi_n(x) phi_n(y)`.
pub fn mehler_kernel<T: Real>(x: T, y: T, beta: T, gamma: T, n_terms: usize) -> Result<T> {
    check_mehler(beta, gamma)?;
    if n_terms == 0 {
        return Err(Error::InvalidGrid("n_terms must be at least 1".into()));
    }
    let mut acc = T::zero();
    let mut power = T::one();
    for (px, py) in HermiteFunctions::new(x, gamma).zip(HermiteFunctions::new(y, gamma)).take(n_terms) {
        acc = acc + power * px * py;
        power = power * beta;
    }
    Ok((T::one() - beta * beta).sqrt() * acc)
}

/// Closed form of the Mehler sum,
/// `sqrt(gamma/pi) exp(-gamma((1 + beta^2)(x^2 + y^2) - 4 beta x y) / (2 (1 - beta^2)))`.
pub fn mehler_closed_form<T: Real>(x: T, y: T, beta: T, gamma: T) -> Result<T> {
    check_mehler(beta, gamma)?;
    let one = T::one();
    let b2 = beta * beta;
    let q = (one + b2) * (x * x + y * y) - T::lit(4.0) * beta * x * y;
    Ok((gamma / T::PI()).sqrt() * (-gamma * q / (T::lit(2.0) * (one - b2))).exp())
}

fn check_mehler<T: Real>(beta: T, gamma: T) -> Result<()> {
    if !(beta >= T::zero() && beta < T::one()) {
        return Err(Error::MehlerDivergence(beta.as_f64()));
    }
    positive("gamma", gamma)?;
    Ok(())
}

/// An eigenfunction `Phi` of the partial transpose with its eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtEigenfunction<T> {
    pub m: usize,
    pub n: usize,
    pub sign: Sign,
    pub eigenvalue: T,
    gamma: T,
    schmidt_sign: T,
}

impl<T: Real> PtEigenfunction<T> {
    /// `Phi(x1, x2)`; normalized to one over the plane.
    pub fn eval(&self, x1: T, x2: T) -> T {
        let top = self.m.max(self.n) + 1;
        let a = hermite_functions(x1, self.gamma, top);
        let b = hermite_functions(self.schmidt_sign * x2, self.gamma, top);
        if self.m == self.n {
            return a[self.m] * b[self.n];
        }
        let s: T = self.sign.value();
        (a[self.m] * b[self.n] + s * a[self.n] * b[self.m]) / T::lit(2.0).sqrt()
    }
}

pub fn pt_eigenfunctions<T: Real>(spec: &PtSpectrum<T>, m: usize, n: usize) -> Vec<PtEigenfunction<T>> {
    let value = spec.lambda0 * spec.beta.powi((m + n) as i32);
    let make = |sign: Sign| PtEigenfunction {
        m,
        n,
        sign,
        eigenvalue: sign.value::<T>() * value,
        gamma: spec.gamma,
        schmidt_sign: spec.schmidt_sign,
    };
    if m == n {
        vec![make(Sign::Plus)]
    } else {
        vec![make(Sign::Plus), make(Sign::Minus)]
    }
}
