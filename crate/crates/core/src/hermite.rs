//! Orthonormal Hermite functions `phi_n(x) = (gamma/pi)^(1/4) H_n(sqrt(gamma) x) e^(-gamma x^2/2) / sqrt(2^n n!)`.
//!
//! Evaluated with the normalized three-term recurrence
//! `phi_{n+1} = sqrt(2/(n+1)) xi phi_n - sqrt(n/(n+1)) phi_{n-1}`, `xi = sqrt(gamma) x`,
//! which never forms `H_n` or factorials and stays bounded by `1.0865 (gamma/pi)^(1/4)`.

use crate::Real;

/// Iterator over `phi_0(x), phi_1(x), ...`.
#[derive(Debug, Clone)]
pub struct HermiteFunctions<T> {
    xi: T,
    n: usize,
    prev: T,
    cur: T,
}

impl<T: Real> HermiteFunctions<T> {
    pub fn new(x: T, gamma: T) -> Self {
        let xi = gamma.sqrt() * x;
        let cur = (gamma / T::PI()).sqrt().sqrt() * (-(xi * xi) / T::lit(2.0)).exp();
        Self { xi, n: 0, prev: T::zero(), cur }
    }
}

impl<T: Real> Iterator for HermiteFunctions<T> {
    type Item = T;

    fn next(&mut self) -> Option<T> {
        let out = self.cur;
        let n = T::lit(self.n as f64);
        let next = (T::lit(2.0) / (n + T::one())).sqrt() * self.xi * self.cur
            - (n / (n + T::one())).sqrt() * self.prev;
        self.prev = self.cur;
        self.cur = next;
        self.n += 1;
        Some(out)
    }
}

/// `[phi_0(x), ..., phi_{count-1}(x)]`.
pub fn hermite_functions<T: Real>(x: T, gamma: T, count: usize) -> Vec<T> {
    HermiteFunctions::new(x, gamma).take(count).collect()
}

/// `phi_n(x)` alone.
pub fn hermite_function<T: Real>(n: usize, x: T, gamma: T) -> T {
    HermiteFunctions::new(x, gamma).nth(n).unwrap()
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;

    #[test]
    fn low_orders_match_explicit_forms() {
        let gamma = 0.7;
        for &x in &[-2.3, -0.4, 0.0, 1.1, 3.0] {
            let xi = f64::sqrt(gamma) * x;
            let phi0 = (gamma / std::f64::consts::PI).powf(0.25) * (-xi * xi / 2.0).exp();
            let v = hermite_functions(x, gamma, 4);
            assert_relative_eq!(v[0], phi0, max_relative = 1e-14);
            assert_relative_eq!(v[1], phi0 * 2.0 * xi / 2f64.sqrt(), max_relative = 1e-13, epsilon = 1e-16);
            let h2 = 4.0 * xi * xi - 2.0;
            assert_relative_eq!(v[2], phi0 * h2 / 8f64.sqrt(), max_relative = 1e-12, epsilon = 1e-15);
            let h3 = 8.0 * xi.powi(3) - 12.0 * xi;
            assert_relative_eq!(v[3], phi0 * h3 / 48f64.sqrt(), max_relative = 1e-12, epsilon = 1e-15);
        }
    }

    #[test]
    fn parity() {
        let a = hermite_functions(1.37, 2.0, 30);
        let b = hermite_functions(-1.37, 2.0, 30);
        for (n, (x, y)) in a.iter().zip(&b).enumerate() {
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_relative_eq!(*x, s * y, epsilon = 1e-15);
        }
    }

    #[test]
    fn high_orders_stay_bounded() {
        for &gamma in &[0.25, 1.0, 4.0] {
            let envelope = (gamma / std::f64::consts::PI).powf(0.25);
            for k in 0..=400 {
                let x = (-8.0 + 16.0 * k as f64 / 400.0) / f64::sqrt(gamma);
                for v in HermiteFunctions::new(x, gamma).take(201) {
                    assert!(v.is_finite());
                    assert!(v.abs() <= 1.1 * envelope, "x = {x}, value {v}");
                }
            }
        }
    }
}
