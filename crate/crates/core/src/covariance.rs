//! Dimensionless covariance matrix, its determinant invariants and the standard form.
//!
//! Quadratures are ordered `(Q1/L, L P1/hbar, Q2/L, L P2/hbar)`, so each 2x2 block reads
//! `[[<x^2>/L^2, <xp+px>/(2 hbar)], [.., L^2 <p^2>/hbar^2]]`. A pure state has `det M = 1/16`.

use crate::error::{positive, Error, Result};
use crate::model::SecondMoments;
use crate::scalar::close;
use crate::Real;

pub type Mat2<T> = [[T; 2]; 2];
pub type Mat4<T> = [[T; 4]; 4];

pub(crate) fn det2<T: Real>(m: &Mat2<T>) -> T {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Determinant by Gaussian elimination with partial pivoting.
pub(crate) fn det4<T: Real>(m: &Mat4<T>) -> T {
    let mut a = *m;
    let mut det = T::one();
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col] == T::zero() {
            return T::zero();
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det = det * a[col][col];
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] = a[row][k] - f * a[col][k];
            }
        }
    }
    det
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix<T> {
    scale: T,
    m: Mat4<T>,
}

impl<T: Real> CovarianceMatrix<T> {
    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn matrix(&self) -> &Mat4<T> {
        &self.m
    }

    fn block(&self, r: usize, c: usize) -> Mat2<T> {
        [[self.m[r][c], self.m[r][c + 1]], [self.m[r + 1][c], self.m[r + 1][c + 1]]]
    }

    /// Single-mode block of particle 1.
    pub fn g(&self) -> Mat2<T> {
        self.block(0, 0)
    }

    /// Single-mode block of particle 2.
    pub fn h(&self) -> Mat2<T> {
        self.block(2, 2)
    }

    /// Cross-correlation block.
    pub fn c(&self) -> Mat2<T> {
        self.block(0, 2)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..4).all(|i| (0..4).all(|j| self.m[i][j] == self.m[j][i]))
    }

    /// Cholesky test.
    pub fn is_positive_definite(&self) -> bool {
        let mut l = [[T::zero(); 4]; 4];
        for i in 0..4 {
            for j in 0..=i {
                let mut s = self.m[i][j];
                for k in 0..j {
                    s = s - l[i][k] * l[j][k];
                }
                if i == j {
                    if s <= T::zero() {
                        return false;
                    }
                    l[i][i] = s.sqrt();
                } else {
                    l[i][j] = s / l[j][j];
                }
            }
        }
        true
    }
}

/// Assembles the covariance matrix from second moments at length scale `scale`.
pub fn build_covariance<T: Real>(mom: &SecondMoments<T>, scale: T, hbar: T) -> Result<CovarianceMatrix<T>> {
    positive("L", scale)?;
    positive("hbar", hbar)?;
    let l2 = scale * scale;
    let x = |v: T| v / l2;
    let xp = |v: T| v / hbar;
    let p = |v: T| l2 * v / (hbar * hbar);
    let m = [
        [x(mom.xx11), xp(mom.xp11_sym), x(mom.xx12), xp(mom.xp12)],
        [xp(mom.xp11_sym), p(mom.pp11), xp(mom.xp21), p(mom.pp12)],
        [x(mom.xx12), xp(mom.xp21), x(mom.xx22), xp(mom.xp22_sym)],
        [xp(mom.xp12), p(mom.pp12), xp(mom.xp22_sym), p(mom.pp22)],
    ];
    Ok(CovarianceMatrix { scale, m })
}

/// Local-symplectic invariants `det G`, `det H`, `det C` and `det M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Invariants<T> {
    pub det_g: T,
    pub det_h: T,
    pub det_c: T,
    pub det_m: T,
}

pub fn invariants<T: Real>(cov: &CovarianceMatrix<T>) -> Invariants<T> {
    Invariants {
        det_g: det2(&cov.g()),
        det_h: det2(&cov.h()),
        det_c: det2(&cov.c()),
        det_m: det4(&cov.m),
    }
}

/// The canonical form `G = g I`, `H = h I`, `C = diag(c, c')`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardForm<T> {
    pub g: T,
    pub h: T,
    pub c: T,
    pub c_prime: T,
}

impl<T: Real> StandardForm<T> {
    pub fn matrix(&self) -> Mat4<T> {
        let z = T::zero();
        [
            [self.g, z, self.c, z],
            [z, self.g, z, self.c_prime],
            [self.c, z, self.h, z],
            [z, self.c_prime, z, self.h],
        ]
    }

    /// Invariants implied by the standard form.
    pub fn invariants(&self) -> Invariants<T> {
        let gh = self.g * self.h;
        Invariants {
            det_g: self.g * self.g,
            det_h: self.h * self.h,
            det_c: self.c * self.c_prime,
            det_m: (gh - self.c * self.c) * (gh - self.c_prime * self.c_prime),
        }
    }
}

/// Recovers `(g, h, c, c')` of a symmetric-state covariance matrix (`G = H`).
///
/// `g = sqrt(det G)`. `c` is the correlation along the position-like direction: `g` times the
/// eigenvalue of `G^-1 C` whose left eigenvector is closest to the position axis. That eigenvalue
/// is unchanged by identical local symplectic maps on both modes, free evolution included, and
/// for this family `c > 0` iff `2d > sigma`. The result is checked against all four invariants.
pub fn standard_form<T: Real>(cov: &CovarianceMatrix<T>) -> Result<StandardForm<T>> {
    let rel = T::tol(1e-10);
    let abs = T::tol(1e-14);
    let (gm, hm, cm) = (cov.g(), cov.h(), cov.c());
    let same = (0..2).all(|i| (0..2).all(|j| close(gm[i][j], hm[i][j], rel, abs)));
    if !same {
        return Err(Error::DegenerateInvariants("single-mode blocks G and H differ".into()));
    }
    let inv = invariants(cov);
    if inv.det_g <= T::zero() || inv.det_h <= T::zero() {
        return Err(Error::DegenerateInvariants("det G or det H is not positive".into()));
    }
    let g = inv.det_g.sqrt();
    let h = inv.det_h.sqrt();
    // With G = H the reduction uses the same symplectic map on both modes, which is a similarity
    // transform of G^-1 C; its eigenvalues are c/g and c'/g. They stay distinct for this family
    // (c' = -c), unlike the roots c^2, c'^2 of the invariant quadratic.
    let (mu_pos, mu_mom) = position_eigenvalues(&gm, &cm)?;
    let (c, c_prime) = (g * mu_pos, g * mu_mom);

    let sf = StandardForm { g, h, c, c_prime };
    let back = sf.invariants();
    // det C and det M are small differences of much larger products for strongly correlated or
    // widely spread states, so they are compared at the size of those products
    let scale = det2_scale(&gm).max(det2_scale(&cm));
    let ok = close(back.det_g, inv.det_g, rel, abs)
        && close(back.det_h, inv.det_h, rel, abs)
        && (back.det_c - inv.det_c).abs() <= rel * scale + abs
        && (back.det_m - inv.det_m).abs() <= rel * scale * scale + abs;
    if !ok {
        return Err(Error::DegenerateInvariants("recovered form does not reproduce the invariants".into()));
    }
    Ok(sf)
}

/// `|m00 m11| + |m01 m10|`, the size of the terms that cancel in `det2(m)`.
fn det2_scale<T: Real>(m: &Mat2<T>) -> T {
    (m[0][0] * m[1][1]).abs() + (m[0][1] * m[1][0]).abs()
}

/// Eigenvalues of `G^-1 C`, returned as (position-like, momentum-like).
fn position_eigenvalues<T: Real>(gm: &Mat2<T>, cm: &Mat2<T>) -> Result<(T, T)> {
    let det = det2(gm);
    let gi = [[gm[1][1] / det, -gm[0][1] / det], [-gm[1][0] / det, gm[0][0] / det]];
    let mut b = [[T::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            b[i][j] = gi[i][0] * cm[0][j] + gi[i][1] * cm[1][j];
        }
    }
    let tr = b[0][0] + b[1][1];
    let half = T::lit(0.5);
    let mut disc = tr * tr - T::lit(4.0) * det2(&b);
    let scale = tr * tr + (b[0][1] * b[1][0]).abs() + b[0][0] * b[0][0] + b[1][1] * b[1][1];
    if disc < T::zero() {
        if -disc > T::tol(1e-9) * scale + T::tol(1e-14) {
            return Err(Error::DegenerateInvariants("G^-1 C has complex eigenvalues".into()));
        }
        disc = T::zero();
    }
    let root = disc.sqrt();
    let (mu_a, mu_b) = (half * (tr + root), half * (tr - root));
    // |x-component| of the unit left eigenvector, i.e. of the null vector of B^T - mu I
    let x_weight = |mu: T| -> T {
        let r0 = [b[0][0] - mu, b[1][0]];
        let r1 = [b[0][1], b[1][1] - mu];
        let n0 = r0[0] * r0[0] + r0[1] * r0[1];
        let n1 = r1[0] * r1[0] + r1[1] * r1[1];
        let r = if n0 >= n1 { r0 } else { r1 };
        let (w0, w1) = (r[1], -r[0]);
        let norm = (w0 * w0 + w1 * w1).sqrt();
        if norm == T::zero() {
            T::zero()
        } else {
            w0.abs() / norm
        }
    };
    if x_weight(mu_a) >= x_weight(mu_b) {
        Ok((mu_a, mu_b))
    } else {
        Ok((mu_b, mu_a))
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;
    use crate::model::{make_state, moments, ModelParams};

    fn cov_for(sigma: f64, d: f64, t: f64, scale: f64) -> CovarianceMatrix<f64> {
        let p = ModelParams::natural(sigma, d).unwrap();
        build_covariance(&moments(&make_state(p, t).unwrap()), scale, 1.0).unwrap()
    }

    #[test]
    fn blocks_at_t0() {
        let cov = cov_for(1.0, 1.0, 0.0, 1.0);
        assert_eq!(cov.g(), [[1.25, 0.0], [0.0, 0.3125]]);
        assert_eq!(cov.c(), [[0.75, 0.0], [0.0, -0.1875]]);
        assert_eq!(cov.g(), cov.h());
        assert!(cov.is_symmetric() && cov.is_positive_definite());
    }

    #[test]
    fn shear_term_at_t1() {
        assert_relative_eq!(cov_for(1.0, 1.0, 1.0, 1.0).g()[0][1], 0.3125, epsilon = 1e-15);
    }

    #[test]
    fn determinants() {
        for &t in &[0.0, 0.5, 3.0] {
            let inv = invariants(&cov_for(1.0, 1.0, t, 1.0));
            assert_relative_eq!(inv.det_c, -0.140625, max_relative = 1e-12);
            assert_relative_eq!(inv.det_m, 0.0625, max_relative = 1e-12);
        }
        let inv = invariants(&cov_for(1.0, 0.5, 0.7, 1.0));
        assert_eq!(inv.det_c, 0.0);
    }

    #[test]
    fn invariants_do_not_depend_on_scale() {
        let a = invariants(&cov_for(0.7, 1.9, 1.3, 1.0));
        for &l in &[0.01, 0.3, 7.0, 250.0] {
            let b = invariants(&cov_for(0.7, 1.9, 1.3, l));
            assert_relative_eq!(a.det_g, b.det_g, max_relative = 1e-11);
            assert_relative_eq!(a.det_c, b.det_c, max_relative = 1e-11);
            assert_relative_eq!(a.det_m, b.det_m, max_relative = 1e-10);
        }
    }

    #[test]
    fn standard_form_examples() {
        let sf = standard_form(&cov_for(1.0, 1.0, 0.0, 1.0)).unwrap();
        assert_relative_eq!(sf.g, 0.625, max_relative = 1e-12);
        assert_relative_eq!(sf.h, 0.625, max_relative = 1e-12);
        assert_relative_eq!(sf.c, 0.375, max_relative = 1e-10);
        assert_relative_eq!(sf.c_prime, -0.375, max_relative = 1e-10);

        let sf = standard_form(&cov_for(2.0, 3.0, 0.0, 1.0)).unwrap();
        assert_relative_eq!(sf.g, 5.0 / 6.0, max_relative = 1e-12);
        assert_relative_eq!(sf.c, 2.0 / 3.0, max_relative = 1e-10);

        let sf = standard_form(&cov_for(1.0, 0.5, 0.0, 1.0)).unwrap();
        assert_relative_eq!(sf.g, 0.5, max_relative = 1e-12);
        assert_eq!((sf.c, sf.c_prime), (0.0, 0.0));
    }

    #[test]
    fn sign_of_c_follows_ratio() {
        let sf = standard_form(&cov_for(3.0, 1.0, 2.0, 1.0)).unwrap();
        // (sigma d / 2)(1/sigma^2 - 1/(4 d^2)) for sigma = 3, d = 1
        assert_relative_eq!(sf.c, 1.5 * (1.0 / 9.0 - 0.25), max_relative = 1e-9);
        assert!(sf.c_prime > 0.0);
    }

    #[test]
    fn rejects_asymmetric_blocks() {
        let mut cov = cov_for(1.0, 1.0, 0.0, 1.0);
        cov.m[2][2] = 2.0;
        assert!(matches!(standard_form(&cov), Err(Error::DegenerateInvariants(_))));
    }

    #[test]
    fn det4_matches_block_formula_for_standard_form() {
        let sf = StandardForm { g: 1.3, h: 0.9, c: 0.4, c_prime: -0.2 };
        assert_relative_eq!(det4(&sf.matrix()), sf.invariants().det_m, max_relative = 1e-14);
    }

    #[test]
    fn scale_must_be_positive() {
        let m = moments(&make_state(ModelParams::natural(1.0, 1.0).unwrap(), 0.0).unwrap());
        assert!(build_covariance(&m, 0.0, 1.0).is_err());
    }
}
